#ifndef ICTK_POLYTOPE_HPP
#define ICTK_POLYTOPE_HPP

// The pre-image polytope {P_X : sum_x P_X(x) P_{Z|X}(z|x) = G_Z} intersected
// with the probability simplex. Vertices are the basic feasible solutions of
// the equality system; the LP oracle scans them.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ictk/prob.hpp"

namespace ictk {

inline constexpr std::size_t kMaxEnumerationAlphabet = 24;

struct PreimagePolytope {
  CondPmf channel_z;  // P_{Z|X}
  Pmf target;         // G_Z
  double equality_tolerance = 1e-9;

  PreimagePolytope(CondPmf ch, Pmf g, double tol = 1e-9)
      : channel_z(std::move(ch)), target(std::move(g)), equality_tolerance(tol) {
    if (channel_z.out_size() != target.size())
      throw std::invalid_argument("PreimagePolytope: dimension mismatch");
  }
};

struct VertexSet {
  std::vector<Pmf> vertices;
  bool exactness_flag = true;  // false when degeneracy was detected
};

namespace detail {

// Row-reduced equality system A x = b with near-zero rows dropped.
// inconsistent is set when a zero row has a nonzero right-hand side.
struct ReducedSystem {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  bool inconsistent = false;
};

inline ReducedSystem reduce_constraints(const PreimagePolytope& poly) {
  const std::size_t m = poly.channel_z.in_size();
  const std::size_t nz = poly.channel_z.out_size();
  std::vector<std::vector<double>> a(nz + 1, std::vector<double>(m));
  std::vector<double> b(nz + 1);
  for (std::size_t x = 0; x < m; ++x) a[0][x] = 1.0;
  b[0] = 1.0;
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t x = 0; x < m; ++x) a[z + 1][x] = poly.channel_z(z, x);
    b[z + 1] = poly.target[z];
  }

  // Gaussian elimination with partial pivoting; keep only pivot rows.
  ReducedSystem out;
  const double tol = 1e-12;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < m && pivot_row < a.size(); ++col) {
    std::size_t best = pivot_row;
    for (std::size_t r = pivot_row + 1; r < a.size(); ++r)
      if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
    if (std::abs(a[best][col]) <= tol) continue;
    std::swap(a[pivot_row], a[best]);
    std::swap(b[pivot_row], b[best]);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == pivot_row) continue;
      const double f = a[r][col] / a[pivot_row][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < m; ++c) a[r][c] -= f * a[pivot_row][c];
      a[r][col] = 0.0;
      b[r] -= f * b[pivot_row];
    }
    ++pivot_row;
  }
  for (std::size_t r = pivot_row; r < a.size(); ++r)
    if (std::abs(b[r]) > 1e-9) out.inconsistent = true;
  out.rows.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(pivot_row));
  out.rhs.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(pivot_row));
  return out;
}

// Solve the square system formed by the chosen columns. Returns nullopt when
// (numerically) singular.
inline std::optional<std::vector<double>> solve_square(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const std::vector<std::size_t>& cols) {
  const std::size_t r = a.size();
  std::vector<std::vector<double>> mat(r, std::vector<double>(r + 1));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) mat[i][j] = a[i][cols[j]];
    mat[i][r] = b[i];
  }
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t best = col;
    for (std::size_t row = col + 1; row < r; ++row)
      if (std::abs(mat[row][col]) > std::abs(mat[best][col])) best = row;
    if (std::abs(mat[best][col]) <= 1e-12) return std::nullopt;
    std::swap(mat[col], mat[best]);
    for (std::size_t row = 0; row < r; ++row) {
      if (row == col) continue;
      const double f = mat[row][col] / mat[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= r; ++c) mat[row][c] -= f * mat[col][c];
    }
  }
  std::vector<double> x(r);
  for (std::size_t i = 0; i < r; ++i) x[i] = mat[i][r] / mat[i][i];
  return x;
}

inline bool lexicographic_less(const Pmf& a, const Pmf& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

}  // namespace detail

// All basic feasible solutions of {P >= 0, sum P = 1, P * P_{Z|X} = G_Z},
// deduplicated and sorted lexicographically.
inline VertexSet enumerate_vertices(const PreimagePolytope& poly) {
  const std::size_t m = poly.channel_z.in_size();
  if (m > kMaxEnumerationAlphabet)
    throw std::invalid_argument(
        "enumerate_vertices: input alphabet exceeds the enumeration guard (" +
        std::to_string(kMaxEnumerationAlphabet) +
        "); this is an artifact limit, not a model one");

  const auto sys = detail::reduce_constraints(poly);
  VertexSet out;
  if (sys.inconsistent) return out;
  const std::size_t r = sys.rows.size();

  auto try_basis = [&](const std::vector<std::size_t>& cols) {
    auto sol = detail::solve_square(sys.rows, sys.rhs, cols);
    if (!sol) return;
    std::vector<double> full(m, 0.0);
    bool degenerate = false;
    for (std::size_t j = 0; j < r; ++j) {
      if ((*sol)[j] < -1e-9) return;
      double v = std::max((*sol)[j], 0.0);
      if (v <= 1e-10) degenerate = true;
      full[cols[j]] = v;
    }
    // Re-verify against the original constraints.
    double mass = 0.0;
    for (double v : full) mass += v;
    if (std::abs(mass - 1.0) > 1e-8) return;
    for (double& v : full) v /= mass;
    Pmf candidate{full};
    if (total_variation(push_forward(candidate, poly.channel_z), poly.target) >
        std::max(poly.equality_tolerance, 1e-9))
      return;
    for (const Pmf& v : out.vertices)
      if (total_variation(v, candidate) <= 1e-8) return;
    if (degenerate) out.exactness_flag = false;
    out.vertices.push_back(std::move(candidate));
  };

  // Enumerate all r-subsets of the m columns.
  std::vector<std::size_t> cols(r);
  for (std::size_t i = 0; i < r; ++i) cols[i] = i;
  if (r == 0) return out;
  while (true) {
    try_basis(cols);
    std::size_t i = r;
    while (i-- > 0) {
      if (cols[i] < m - (r - i)) {
        ++cols[i];
        for (std::size_t j = i + 1; j < r; ++j) cols[j] = cols[j - 1] + 1;
        break;
      }
      if (i == 0) {
        std::sort(out.vertices.begin(), out.vertices.end(),
                  detail::lexicographic_less);
        return out;
      }
    }
  }
}

// Non-emptiness check with a witness. The polytope is bounded, so it is
// non-empty exactly when it has a basic feasible solution.
inline std::pair<bool, std::optional<Pmf>> is_feasible(
    const PreimagePolytope& poly) {
  auto vs = enumerate_vertices(poly);
  if (vs.vertices.empty()) return {false, std::nullopt};
  return {true, vs.vertices.front()};
}

// argmax / max of <objective, P> over the polytope; attained at a vertex.
inline std::pair<Pmf, double> lp_maximize(const PreimagePolytope& poly,
                                          const std::vector<double>& objective) {
  if (objective.size() != poly.channel_z.in_size())
    throw std::invalid_argument("lp_maximize: objective dimension mismatch");
  auto vs = enumerate_vertices(poly);
  if (vs.vertices.empty())
    throw std::runtime_error("lp_maximize: infeasible polytope");
  const Pmf* best = nullptr;
  double best_val = 0.0;
  for (const Pmf& v : vs.vertices) {
    double val = 0.0;
    for (std::size_t i = 0; i < objective.size(); ++i) val += objective[i] * v[i];
    if (!best || val > best_val) {
      best = &v;
      best_val = val;
    }
  }
  return {*best, best_val};
}

}  // namespace ictk

#endif  // ICTK_POLYTOPE_HPP
