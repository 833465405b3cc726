#ifndef ICTK_SIM_HPP
#define ICTK_SIM_HPP

// Random-codebook simulation at small blocklengths: single-user coding with
// ML or joint-typicality decoding, the two-user coordination construction
// (covering searches at both encoders, typicality decoding), and
// interference-type convergence sweeps.
//
// Per-trial random streams are derived from (seed, trial index), so runs are
// reproducible and order-independent.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ictk/capacity.hpp"
#include "ictk/coord.hpp"
#include "ictk/prob.hpp"

namespace ictk {

// Cap on materialized codebooks: ceil(2^{nR}) * n symbols per codebook.
inline constexpr double kCodebookEntryCap = static_cast<double>(1ULL << 26);

class MemoryCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecoderSpec {
  enum class Kind { kML, kTypicality };
  Kind kind = Kind::kML;
  double epsilon = 0.0;  // typicality only

  static DecoderSpec ml() { return {}; }
  static DecoderSpec typicality(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("typicality: epsilon <= 0");
    return {Kind::kTypicality, eps};
  }
};

// Default typicality margin when none is given: 2/sqrt(n). An artifact
// choice; the achievability proofs fix no schedule.
inline double default_epsilon(int n) { return 2.0 / std::sqrt(static_cast<double>(n)); }

struct SimReport {
  int n = 0;
  int trials = 0;
  double error_rate = 0.0;
  double mean_tv = 0.0;
  std::vector<std::pair<double, double>> tv_exceed_frac;  // (epsilon, fraction)
  std::uint64_t seed = 0;
};

struct TwoUserSimReport {
  int n = 0;
  int trials = 0;
  double error_rate_1 = 0.0;
  double error_rate_2 = 0.0;
  double cover_fail_1 = 0.0;  // fraction of trials hitting the m_c fallback
  double cover_fail_2 = 0.0;  // fraction hitting the l fallback
  double mean_tv = 0.0;
  std::vector<std::pair<double, double>> tv_exceed_frac;
  std::uint64_t seed = 0;
};

namespace simdetail {

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(
      detail::splitmix64(detail::splitmix64(seed) ^ (trial * 0x9e3779b97f4a7c15ULL)));
}

inline std::size_t sample(const Pmf& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (u < p[i]) return i;
    u -= p[i];
  }
  return p.size() - 1;
}

inline SymbolSequence iid_sequence(const Pmf& p, int n, std::mt19937_64& rng) {
  SymbolSequence s;
  s.symbols.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.symbols.push_back(sample(p, rng));
  return s;
}

inline SymbolSequence send_through(const SymbolSequence& x, const CondPmf& w,
                                   std::mt19937_64& rng) {
  SymbolSequence y;
  y.symbols.reserve(x.symbols.size());
  for (std::size_t s : x.symbols) y.symbols.push_back(sample(w.row(s), rng));
  return y;
}

inline double codebook_size(double n, double rate) {
  return std::ceil(std::exp2(n * rate));
}

// TV between the joint type of (a, b) and the product target p_a(x) w(y|x),
// without building Pmf objects (hot path in the decoders).
inline double joint_type_tv(const SymbolSequence& a, const SymbolSequence& b,
                            const std::vector<double>& target,
                            std::size_t size_b) {
  thread_local std::vector<double> counts;
  counts.assign(target.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(a.symbols.size());
  for (std::size_t i = 0; i < a.symbols.size(); ++i)
    counts[a.symbols[i] * size_b + b.symbols[i]] += inv_n;
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    s += std::abs(counts[i] - target[i]);
  return 0.5 * s;
}

inline std::vector<double> product_joint(const Pmf& p, const CondPmf& w) {
  std::vector<double> t(p.size() * w.out_size());
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < w.out_size(); ++y)
      t[x * w.out_size() + y] = p[x] * w(y, x);
  return t;
}

// Exact error-event sampling for ML decoding with an i.i.d. codebook that is
// too large to materialize, restricted to binary input alphabets. Given the
// received y^n, the log-likelihood of a random codeword decomposes per
// received-symbol class, so P(some competitor ties or beats the true
// codeword) is computable from binomial class counts. Sampling a Bernoulli
// with that probability reproduces the explicit-codebook error distribution.
struct ImplicitMlState {
  double p_gt = 0.0;
  double p_eq = 0.0;
};

inline ImplicitMlState competitor_score_tail(
    const SymbolSequence& y, double s0, const Pmf& p_x, const CondPmf& w) {
  const std::size_t ny = w.out_size();
  std::vector<std::size_t> class_count(ny, 0);
  for (std::size_t s : y.symbols) ++class_count[s];

  // Per class c: a codeword symbol is 0 w.p. p_x[0] contributing log w(c|0),
  // else log w(c|1). Fold classes recursively.
  struct Class {
    std::size_t m;
    double la, lb;  // log-likelihood for input 0 / input 1
  };
  std::vector<Class> classes;
  double joint_support = 1.0;
  for (std::size_t c = 0; c < ny; ++c) {
    if (class_count[c] == 0) continue;
    const double wa = w(c, 0), wb = w(c, 1);
    classes.push_back({class_count[c],
                       wa > 0.0 ? std::log(wa) : -std::numeric_limits<double>::infinity(),
                       wb > 0.0 ? std::log(wb) : -std::numeric_limits<double>::infinity()});
    joint_support *= static_cast<double>(class_count[c] + 1);
  }
  if (joint_support > 4e6)
    throw MemoryCapError("implicit ML: class-count support too large");

  const double p0 = p_x[0];
  ImplicitMlState st;
  const double tie_tol = 1e-9;

  // Precompute per-class binomial pmfs.
  std::vector<std::vector<double>> binom(classes.size());
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const std::size_t m = classes[ci].m;
    std::vector<double>& row = binom[ci];
    row.assign(m + 1, 0.0);
    // log C(m,k) p0^k (1-p0)^(m-k), exponentiated (underflow is harmless).
    double log_c = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      if (k > 0)
        log_c += std::log(static_cast<double>(m - k + 1)) -
                 std::log(static_cast<double>(k));
      double lp = log_c;
      lp += p0 > 0.0 ? static_cast<double>(k) * std::log(p0)
                     : (k > 0 ? -std::numeric_limits<double>::infinity() : 0.0);
      lp += (1.0 - p0) > 0.0
                ? static_cast<double>(m - k) * std::log(1.0 - p0)
                : (k < m ? -std::numeric_limits<double>::infinity() : 0.0);
      row[k] = std::exp(lp);
    }
  }

  // DFS over class counts accumulating probability mass and score.
  auto dfs = [&](auto&& self, std::size_t ci, double prob, double score) -> void {
    if (prob == 0.0) return;
    if (ci == classes.size()) {
      if (std::isinf(score)) return;  // strictly below s0, counts as "less"
      if (score > s0 + tie_tol)
        st.p_gt += prob;
      else if (score >= s0 - tie_tol)
        st.p_eq += prob;
      return;
    }
    const Class& cl = classes[ci];
    for (std::size_t k = 0; k <= cl.m; ++k) {
      double contrib = 0.0;
      if (k > 0) contrib += static_cast<double>(k) * cl.la;
      if (k < cl.m) contrib += static_cast<double>(cl.m - k) * cl.lb;
      self(self, ci + 1, prob * binom[ci][k], score + contrib);
    }
  };
  dfs(dfs, 0, 1.0, 0.0);
  return st;
}

// P(true codeword wins under random tie-breaking) for M total codewords.
inline double ml_correct_probability(const ImplicitMlState& st, double m_total) {
  const double p_lt = std::max(1.0 - st.p_gt - st.p_eq, 0.0);
  const double q_le = std::max(1.0 - st.p_gt, 0.0);
  if (st.p_eq < 1e-15) return std::pow(q_le, m_total - 1.0);
  return (std::pow(q_le, m_total) - std::pow(p_lt, m_total)) /
         (m_total * st.p_eq);
}

}  // namespace simdetail

inline SimReport simulate_single_user(
    const SingleUserChannel& ch, const Pmf& p_x, int n, double rate, int trials,
    DecoderSpec decoder, std::uint64_t seed,
    const std::vector<double>& exceed_epsilons = {0.05, 0.1}) {
  if (n < 1) throw std::invalid_argument("simulate_single_user: n < 1");
  if (!(rate > 0.0)) throw std::invalid_argument("simulate_single_user: rate <= 0");
  if (trials < 1) throw std::invalid_argument("simulate_single_user: trials < 1");
  if (p_x.size() != ch.p_y_given_x.in_size())
    throw std::invalid_argument("simulate_single_user: input dimension mismatch");

  const double m_total = simdetail::codebook_size(n, rate);
  const bool materialize = m_total * n <= kCodebookEntryCap;
  const bool implicit_ml = !materialize &&
                           decoder.kind == DecoderSpec::Kind::kML &&
                           p_x.size() == 2;
  if (!materialize && !implicit_ml)
    throw MemoryCapError(
        "simulate_single_user: codebook of " + std::to_string(m_total) +
        " codewords x n=" + std::to_string(n) +
        " exceeds the entry cap and no implicit decoder applies");

  const Pmf g_z = push_forward(p_x, ch.p_z_given_x);
  const auto joint_xy = simdetail::product_joint(p_x, ch.p_y_given_x);
  const std::size_t ny = ch.p_y_given_x.out_size();

  SimReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  std::vector<double> exceed_counts(exceed_epsilons.size(), 0.0);
  double errors = 0.0, tv_sum = 0.0;

  for (int t = 0; t < trials; ++t) {
    auto rng = simdetail::trial_rng(seed, static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    bool error = false;
    SymbolSequence x0, y, z;
    if (materialize) {
      const std::size_t m_count = static_cast<std::size_t>(m_total);
      std::vector<SymbolSequence> codebook;
      codebook.reserve(m_count);
      for (std::size_t m = 0; m < m_count; ++m)
        codebook.push_back(simdetail::iid_sequence(p_x, n, rng));
      const std::size_t sent =
          std::uniform_int_distribution<std::size_t>(0, m_count - 1)(rng);
      x0 = codebook[sent];
      y = simdetail::send_through(x0, ch.p_y_given_x, rng);
      z = simdetail::send_through(x0, ch.p_z_given_x, rng);

      if (decoder.kind == DecoderSpec::Kind::kML) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> arg;
        for (std::size_t m = 0; m < m_count; ++m) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            const double w = ch.p_y_given_x(y.symbols[static_cast<std::size_t>(i)],
                                            codebook[m].symbols[static_cast<std::size_t>(i)]);
            if (w == 0.0) {
              s = -std::numeric_limits<double>::infinity();
              break;
            }
            s += std::log(w);
          }
          if (s > best + 1e-12) {
            best = s;
            arg.assign(1, m);
          } else if (s >= best - 1e-12 && !std::isinf(s)) {
            arg.push_back(m);
          }
        }
        std::size_t decoded = m_count;  // sentinel: nothing decodable
        if (!arg.empty())
          decoded = arg[std::uniform_int_distribution<std::size_t>(
              0, arg.size() - 1)(rng)];
        error = decoded != sent;
      } else {
        std::size_t match_count = 0, match = 0;
        for (std::size_t m = 0; m < m_count; ++m) {
          if (simdetail::joint_type_tv(codebook[m], y, joint_xy, ny) <
              decoder.epsilon) {
            ++match_count;
            match = m;
          }
        }
        error = !(match_count == 1 && match == sent);
      }
    } else {
      // Implicit i.i.d. codebook: sample the transmitted codeword and the
      // exact conditional error event.
      x0 = simdetail::iid_sequence(p_x, n, rng);
      y = simdetail::send_through(x0, ch.p_y_given_x, rng);
      z = simdetail::send_through(x0, ch.p_z_given_x, rng);
      double s0 = 0.0;
      for (int i = 0; i < n; ++i)
        s0 += std::log(ch.p_y_given_x(y.symbols[static_cast<std::size_t>(i)],
                                      x0.symbols[static_cast<std::size_t>(i)]));
      const auto st = simdetail::competitor_score_tail(y, s0, p_x, ch.p_y_given_x);
      const double p_correct = simdetail::ml_correct_probability(st, m_total);
      error = uni(rng) >= p_correct;
    }

    if (error) errors += 1.0;
    const double tv = total_variation(empirical_type(z, g_z.size()), g_z);
    tv_sum += tv;
    for (std::size_t e = 0; e < exceed_epsilons.size(); ++e)
      if (tv >= exceed_epsilons[e]) exceed_counts[e] += 1.0;
  }

  rep.error_rate = errors / trials;
  rep.mean_tv = tv_sum / trials;
  for (std::size_t e = 0; e < exceed_epsilons.size(); ++e)
    rep.tv_exceed_frac.emplace_back(exceed_epsilons[e], exceed_counts[e] / trials);
  return rep;
}

// The proof construction at desk scale: u-sequences indexed by the
// coordination message, a covering search at each encoder with fallback to
// index 1, and joint-typicality decoding at both receivers.
inline TwoUserSimReport simulate_two_user(
    const TwoUserChannel& ch, const CoordinationDist& dist, int n, double r1,
    double r2, double rc, double epsilon, int trials, std::uint64_t seed,
    double r2_tilde_margin = 0.1,
    const std::vector<double>& exceed_epsilons = {0.05, 0.1}) {
  if (n < 1) throw std::invalid_argument("simulate_two_user: n < 1");
  if (!(r1 > 0.0 && r2 > 0.0 && rc > 0.0))
    throw std::invalid_argument("simulate_two_user: rates must be positive");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("simulate_two_user: epsilon <= 0");

  const Pmf m_x1 = dist.marginal_x1();
  const Pmf m_x2 = dist.marginal_x2();
  const double i_ux2 = mutual_information(dist.p_u, dist.p_x2_given_u);

  const double mc_total = std::max(std::floor(std::exp2(n * rc)), 1.0);
  const double m1_total = simdetail::codebook_size(n, r1);
  const double m2_total = simdetail::codebook_size(n, r2);
  const double ml_total = simdetail::codebook_size(n, i_ux2 + r2_tilde_margin);
  if (mc_total * n > kCodebookEntryCap || m1_total * n > kCodebookEntryCap ||
      m2_total * ml_total * n > kCodebookEntryCap)
    throw MemoryCapError("simulate_two_user: codebook exceeds the entry cap");
  const auto mc_count = static_cast<std::size_t>(mc_total);
  const auto m1_count = static_cast<std::size_t>(m1_total);
  const auto m2_count = static_cast<std::size_t>(m2_total);
  const auto ml_count = static_cast<std::size_t>(ml_total);

  const auto joint_ux1 = simdetail::product_joint(dist.p_u, dist.p_x1_given_u);
  const auto joint_ux2 = simdetail::product_joint(dist.p_u, dist.p_x2_given_u);
  const auto joint_x1y1 = simdetail::product_joint(m_x1, ch.p_y1_given_x1);
  const auto joint_x2y2 = simdetail::product_joint(m_x2, ch.p_y2_given_x2);
  const Pmf q_z = induced_interference(ch, dist);

  const std::size_t n1 = ch.x1_size(), n2 = ch.x2_size();
  const std::size_t ny1 = ch.p_y1_given_x1.out_size();
  const std::size_t ny2 = ch.p_y2_given_x2.out_size();

  TwoUserSimReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  std::vector<double> exceed_counts(exceed_epsilons.size(), 0.0);
  double err1 = 0.0, err2 = 0.0, cf1 = 0.0, cf2 = 0.0, tv_sum = 0.0;

  for (int t = 0; t < trials; ++t) {
    auto rng = simdetail::trial_rng(seed, static_cast<std::uint64_t>(t));

    std::vector<SymbolSequence> u_book, x1_book, x2_book;
    u_book.reserve(mc_count);
    for (std::size_t m = 0; m < mc_count; ++m)
      u_book.push_back(simdetail::iid_sequence(dist.p_u, n, rng));
    x1_book.reserve(m1_count);
    for (std::size_t m = 0; m < m1_count; ++m)
      x1_book.push_back(simdetail::iid_sequence(m_x1, n, rng));
    x2_book.reserve(m2_count * ml_count);
    for (std::size_t m = 0; m < m2_count * ml_count; ++m)
      x2_book.push_back(simdetail::iid_sequence(m_x2, n, rng));
    auto x2_at = [&](std::size_t l, std::size_t m2) -> const SymbolSequence& {
      return x2_book[l * m2_count + m2];
    };

    const std::size_t m1 =
        std::uniform_int_distribution<std::size_t>(0, m1_count - 1)(rng);
    const std::size_t m2 =
        std::uniform_int_distribution<std::size_t>(0, m2_count - 1)(rng);

    // Encoder 1 covering search for the coordination index.
    std::vector<std::size_t> cands;
    for (std::size_t mc = 0; mc < mc_count; ++mc)
      if (simdetail::joint_type_tv(u_book[mc], x1_book[m1], joint_ux1, n1) <
          epsilon)
        cands.push_back(mc);
    std::size_t mc = 0;
    if (cands.empty()) {
      cf1 += 1.0;
    } else {
      mc = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
    }

    // Encoder 2 covering search for l given u(mc).
    cands.clear();
    for (std::size_t l = 0; l < ml_count; ++l)
      if (simdetail::joint_type_tv(u_book[mc], x2_at(l, m2), joint_ux2, n2) <
          epsilon)
        cands.push_back(l);
    std::size_t l_sel = 0;
    if (cands.empty()) {
      cf2 += 1.0;
    } else {
      l_sel = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
    }

    const SymbolSequence& x1 = x1_book[m1];
    const SymbolSequence& x2 = x2_at(l_sel, m2);
    const SymbolSequence y1 = simdetail::send_through(x1, ch.p_y1_given_x1, rng);
    const SymbolSequence y2 = simdetail::send_through(x2, ch.p_y2_given_x2, rng);
    SymbolSequence z;
    z.symbols.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const std::size_t pair =
          x1.symbols[static_cast<std::size_t>(i)] * n2 +
          x2.symbols[static_cast<std::size_t>(i)];
      z.symbols.push_back(simdetail::sample(ch.p_z_given_x1x2.row(pair), rng));
    }

    // Decoder 1: unique typical message.
    std::size_t hits = 0, hit = 0;
    for (std::size_t m = 0; m < m1_count; ++m)
      if (simdetail::joint_type_tv(x1_book[m], y1, joint_x1y1, ny1) < epsilon) {
        ++hits;
        hit = m;
      }
    if (!(hits == 1 && hit == m1)) err1 += 1.0;

    // Decoder 2: unique message index such that some bin index is typical.
    hits = 0;
    hit = 0;
    for (std::size_t m = 0; m < m2_count; ++m) {
      bool any = false;
      for (std::size_t l = 0; l < ml_count && !any; ++l)
        if (simdetail::joint_type_tv(x2_at(l, m), y2, joint_x2y2, ny2) < epsilon)
          any = true;
      if (any) {
        ++hits;
        hit = m;
      }
    }
    if (!(hits == 1 && hit == m2)) err2 += 1.0;

    const double tv = total_variation(empirical_type(z, q_z.size()), q_z);
    tv_sum += tv;
    for (std::size_t e = 0; e < exceed_epsilons.size(); ++e)
      if (tv >= exceed_epsilons[e]) exceed_counts[e] += 1.0;
  }

  rep.error_rate_1 = err1 / trials;
  rep.error_rate_2 = err2 / trials;
  rep.cover_fail_1 = cf1 / trials;
  rep.cover_fail_2 = cf2 / trials;
  rep.mean_tv = tv_sum / trials;
  for (std::size_t e = 0; e < exceed_epsilons.size(); ++e)
    rep.tv_exceed_frac.emplace_back(exceed_epsilons[e], exceed_counts[e] / trials);
  return rep;
}

// Interference-type convergence sweep: TV statistics of simulate_single_user
// across a blocklength list (a two-codeword book, so the input is i.i.d. p_x).
inline std::vector<SimReport> tv_convergence_profile(
    const SingleUserChannel& ch, const Pmf& p_x, const std::vector<int>& n_list,
    int trials, std::uint64_t seed,
    const std::vector<double>& exceed_epsilons = {0.05, 0.1}) {
  std::vector<SimReport> out;
  out.reserve(n_list.size());
  for (int n : n_list)
    out.push_back(simulate_single_user(ch, p_x, n, 1.0 / n, trials,
                                       DecoderSpec::ml(), seed, exceed_epsilons));
  return out;
}

// Deterministic partition-declaration scheme on the 16-symbol preset:
// Encoder 1 sends uniform symbols, declares per-symbol loud/quiet, Encoder 2
// uses the complementary block. Channels are noiseless, so decoding is exact;
// the interesting statistic is the measured coordination cost, the entropy of
// the empirical type of the declaration sequence.
struct Example1PartitionReport {
  int n = 0;
  int trials = 0;
  double error_rate = 0.0;
  double mean_coord_bits_per_action = 0.0;
  std::uint64_t seed = 0;
};

inline Example1PartitionReport simulate_example1_partition(int n, int trials,
                                                           std::uint64_t seed) {
  if (n < 1 || trials < 1)
    throw std::invalid_argument("simulate_example1_partition: bad arguments");
  const TwoUserChannel ch = example1_channel();
  Example1PartitionReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  double errors = 0.0, coord_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto rng = simdetail::trial_rng(seed, static_cast<std::uint64_t>(t));
    std::uniform_int_distribution<std::size_t> sym16(0, kExample1Symbols - 1);
    std::uniform_int_distribution<std::size_t> quiet(kExample1LoudSymbols,
                                                     kExample1Symbols - 1);
    std::uniform_int_distribution<std::size_t> loud(0, kExample1LoudSymbols - 1);
    SymbolSequence x1, x2, u;
    for (int i = 0; i < n; ++i) {
      const std::size_t s = sym16(rng);
      x1.symbols.push_back(s);
      const bool s_loud = s < kExample1LoudSymbols;
      u.symbols.push_back(s_loud ? 0 : 1);
      x2.symbols.push_back(s_loud ? quiet(rng) : loud(rng));
    }
    const SymbolSequence y1 = simdetail::send_through(x1, ch.p_y1_given_x1, rng);
    const SymbolSequence y2 = simdetail::send_through(x2, ch.p_y2_given_x2, rng);
    if (y1.symbols != x1.symbols || y2.symbols != x2.symbols) errors += 1.0;
    coord_sum += entropy(empirical_type(u, 2));
  }
  rep.error_rate = errors / trials;
  rep.mean_coord_bits_per_action = coord_sum / trials;
  return rep;
}

}  // namespace ictk

#endif  // ICTK_SIM_HPP
