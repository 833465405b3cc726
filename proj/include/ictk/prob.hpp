#ifndef ICTK_PROB_HPP
#define ICTK_PROB_HPP

// Finite-alphabet probability primitives: pmfs, conditional pmfs, empirical
// types, total variation, typicality, entropy and mutual information.
// All quantities in bits (log2). All types are immutable value types.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ictk {

inline constexpr double kMassTolerance = 1e-9;

inline double log2_safe(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

// p * log2(p) with the 0 log 0 = 0 convention.
inline double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Binary entropy in bits.
inline double binary_entropy(double p) { return -plog2p(p) - plog2p(1.0 - p); }

class Pmf {
 public:
  Pmf() = default;

  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0))
        throw std::invalid_argument("Pmf: negative or NaN entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTolerance)
      throw std::invalid_argument("Pmf: mass " + std::to_string(sum) +
                                  " deviates from 1 beyond tolerance");
    for (double& p : probs_) p /= sum;
  }

  static Pmf uniform(std::size_t k) {
    return Pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static Pmf point_mass(std::size_t symbol, std::size_t k) {
    std::vector<double> v(k, 0.0);
    v.at(symbol) = 1.0;
    return Pmf(std::move(v));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Row-stochastic matrix: one Pmf per input symbol.
class CondPmf {
 public:
  CondPmf() = default;

  explicit CondPmf(std::vector<std::vector<double>> rows) {
    if (rows.empty()) throw std::invalid_argument("CondPmf: no rows");
    out_size_ = rows.front().size();
    rows_.reserve(rows.size());
    for (auto& r : rows) {
      if (r.size() != out_size_)
        throw std::invalid_argument("CondPmf: ragged rows");
      rows_.emplace_back(std::move(r));
    }
  }

  static CondPmf identity(std::size_t k) {
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) rows[i][i] = 1.0;
    return CondPmf(std::move(rows));
  }

  static CondPmf bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("bsc: crossover must be in [0,1]");
    return CondPmf({{1.0 - p, p}, {p, 1.0 - p}});
  }

  std::size_t in_size() const { return rows_.size(); }
  std::size_t out_size() const { return out_size_; }
  const Pmf& row(std::size_t x) const { return rows_[x]; }
  double operator()(std::size_t out, std::size_t in) const {
    return rows_[in][out];
  }

 private:
  std::vector<Pmf> rows_;
  std::size_t out_size_ = 0;
};

// Distribution over a product alphabet, stored as a flat row-major table.
class JointPmf {
 public:
  JointPmf(std::vector<double> table, std::vector<std::size_t> sizes)
      : table_(std::move(table)), sizes_(std::move(sizes)) {
    std::size_t total = 1;
    for (std::size_t s : sizes_) total *= s;
    if (total != table_.size())
      throw std::invalid_argument("JointPmf: table size mismatch");
    double sum = 0.0;
    for (double p : table_) {
      if (!(p >= 0.0)) throw std::invalid_argument("JointPmf: negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTolerance)
      throw std::invalid_argument("JointPmf: mass deviates from 1");
    for (double& p : table_) p /= sum;
  }

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<double>& table() const { return table_; }

  // Two-axis access for the common pair case.
  double at2(std::size_t a, std::size_t b) const {
    return table_[a * sizes_[1] + b];
  }

  Pmf marginal(std::size_t axis) const {
    std::vector<double> m(sizes_.at(axis), 0.0);
    std::size_t stride = 1;
    for (std::size_t ax = sizes_.size(); ax-- > axis + 1;) stride *= sizes_[ax];
    const std::size_t block = stride * sizes_[axis];
    for (std::size_t i = 0; i < table_.size(); ++i)
      m[(i % block) / stride] += table_[i];
    return Pmf(std::move(m));
  }

 private:
  std::vector<double> table_;
  std::vector<std::size_t> sizes_;
};

struct SymbolSequence {
  std::vector<std::size_t> symbols;

  std::size_t length() const { return symbols.size(); }
};

inline double total_variation(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: alphabet size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline Pmf empirical_type(const SymbolSequence& seq, std::size_t alphabet_size) {
  if (seq.symbols.empty())
    throw std::invalid_argument("empirical_type: empty sequence");
  std::vector<double> counts(alphabet_size, 0.0);
  for (std::size_t s : seq.symbols) {
    if (s >= alphabet_size)
      throw std::invalid_argument("empirical_type: symbol out of range");
    counts[s] += 1.0;
  }
  const double n = static_cast<double>(seq.symbols.size());
  for (double& c : counts) c /= n;
  return Pmf(std::move(counts));
}

inline JointPmf joint_empirical_type(const SymbolSequence& a,
                                     const SymbolSequence& b,
                                     std::size_t size_a, std::size_t size_b) {
  if (a.symbols.size() != b.symbols.size())
    throw std::invalid_argument("joint_empirical_type: length mismatch");
  if (a.symbols.empty())
    throw std::invalid_argument("joint_empirical_type: empty sequences");
  std::vector<double> counts(size_a * size_b, 0.0);
  for (std::size_t i = 0; i < a.symbols.size(); ++i)
    counts.at(a.symbols[i] * size_b + b.symbols[i]) += 1.0;
  const double n = static_cast<double>(a.symbols.size());
  for (double& c : counts) c /= n;
  return JointPmf(std::move(counts), {size_a, size_b});
}

// Strict inequality, exactly as the typical-set definition.
inline bool is_typical(const SymbolSequence& seq, const Pmf& p, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("is_typical: epsilon <= 0");
  return total_variation(empirical_type(seq, p.size()), p) < epsilon;
}

inline double entropy(const Pmf& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) h -= plog2p(p[i]);
  return h < 0.0 ? 0.0 : h;
}

// Output distribution sum_x p(x) W(z|x).
inline Pmf push_forward(const Pmf& p_x, const CondPmf& w) {
  if (p_x.size() != w.in_size())
    throw std::invalid_argument("push_forward: dimension mismatch");
  std::vector<double> out(w.out_size(), 0.0);
  for (std::size_t x = 0; x < p_x.size(); ++x) {
    if (p_x[x] == 0.0) continue;
    for (std::size_t z = 0; z < w.out_size(); ++z) out[z] += p_x[x] * w(z, x);
  }
  return Pmf(std::move(out));
}

// I(X;Y) = H(Y) - H(Y|X) in bits.
inline double mutual_information(const Pmf& p_x, const CondPmf& w) {
  if (p_x.size() != w.in_size())
    throw std::invalid_argument("mutual_information: dimension mismatch");
  const Pmf q = push_forward(p_x, w);
  double h_y = entropy(q);
  double h_y_given_x = 0.0;
  for (std::size_t x = 0; x < p_x.size(); ++x) {
    if (p_x[x] == 0.0) continue;
    h_y_given_x += p_x[x] * entropy(w.row(x));
  }
  const double mi = h_y - h_y_given_x;
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace ictk

#endif  // ICTK_PROB_HPP
