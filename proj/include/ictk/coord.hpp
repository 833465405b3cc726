#ifndef ICTK_COORD_HPP
#define ICTK_COORD_HPP

// Two-user coordination region: achievable (R1, R2, Rc) tuples at a fixed
// interference type, a multi-start search for frontier points, and a small
// 3D convex hull. Frontier results are inner-bound points: the search is
// nonconvex, so they are lower bounds on the true frontier.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ictk/capacity.hpp"
#include "ictk/prob.hpp"

namespace ictk {

struct TwoUserChannel {
  CondPmf p_y1_given_x1;
  CondPmf p_y2_given_x2;
  // P_{Z|X1,X2}: rows indexed by x1 * |X2| + x2.
  CondPmf p_z_given_x1x2;

  TwoUserChannel(CondPmf y1, CondPmf y2, CondPmf z)
      : p_y1_given_x1(std::move(y1)),
        p_y2_given_x2(std::move(y2)),
        p_z_given_x1x2(std::move(z)) {
    if (p_z_given_x1x2.in_size() !=
        p_y1_given_x1.in_size() * p_y2_given_x2.in_size())
      throw std::invalid_argument("TwoUserChannel: P_Z rows must cover X1 x X2");
  }

  std::size_t x1_size() const { return p_y1_given_x1.in_size(); }
  std::size_t x2_size() const { return p_y2_given_x2.in_size(); }
  std::size_t z_size() const { return p_z_given_x1x2.out_size(); }
};

// Joint input distribution factored as P_U P_{X1|U} P_{X2|U}; X1 - U - X2
// forms a Markov chain by construction.
struct CoordinationDist {
  Pmf p_u;
  CondPmf p_x1_given_u;
  CondPmf p_x2_given_u;

  CoordinationDist(Pmf u, CondPmf x1u, CondPmf x2u)
      : p_u(std::move(u)),
        p_x1_given_u(std::move(x1u)),
        p_x2_given_u(std::move(x2u)) {
    if (p_u.size() != p_x1_given_u.in_size() ||
        p_u.size() != p_x2_given_u.in_size())
      throw std::invalid_argument("CoordinationDist: U alphabet mismatch");
  }

  std::size_t u_size() const { return p_u.size(); }

  Pmf marginal_x1() const { return push_forward(p_u, p_x1_given_u); }
  Pmf marginal_x2() const { return push_forward(p_u, p_x2_given_u); }
};

struct RegionPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  double rc = 0.0;
  Pmf q_z;
  std::optional<CoordinationDist> dist;
};

inline Pmf induced_interference(const TwoUserChannel& ch,
                                const CoordinationDist& dist) {
  const std::size_t n1 = ch.x1_size(), n2 = ch.x2_size(), nz = ch.z_size();
  std::vector<double> q(nz, 0.0);
  for (std::size_t u = 0; u < dist.u_size(); ++u) {
    const double pu = dist.p_u[u];
    if (pu == 0.0) continue;
    for (std::size_t a = 0; a < n1; ++a) {
      const double p1 = dist.p_x1_given_u(a, u);
      if (p1 == 0.0) continue;
      for (std::size_t b = 0; b < n2; ++b) {
        const double w = pu * p1 * dist.p_x2_given_u(b, u);
        if (w == 0.0) continue;
        for (std::size_t z = 0; z < nz; ++z)
          q[z] += w * ch.p_z_given_x1x2(z, a * n2 + b);
      }
    }
  }
  return Pmf(std::move(q));
}

// Boundary values of the region conditions: R1 = I(X1;Y1),
// R2 = [I(X2;Y2) - I(U;X2)]^+, Rc = I(U;X1). Every interior point of the
// box below these values is achievable.
inline RegionPoint rate_tuple(const TwoUserChannel& ch,
                              const CoordinationDist& dist) {
  RegionPoint pt;
  pt.r1 = mutual_information(dist.marginal_x1(), ch.p_y1_given_x1);
  const double i_x2y2 = mutual_information(dist.marginal_x2(), ch.p_y2_given_x2);
  const double i_ux2 = mutual_information(dist.p_u, dist.p_x2_given_u);
  pt.r2 = std::max(i_x2y2 - i_ux2, 0.0);
  pt.rc = mutual_information(dist.p_u, dist.p_x1_given_u);
  pt.q_z = induced_interference(ch, dist);
  pt.dist = dist;
  return pt;
}

// ---------------------------------------------------------------------------
// Built-in 16-symbol constellation preset: two noiseless 16-ary channels and
// a binary interference output that fires exactly when both inputs come from
// the 12-symbol "loud" block (symbols 0..11; symbols 12..15 are quiet).
// ---------------------------------------------------------------------------

inline constexpr std::size_t kExample1Symbols = 16;
inline constexpr std::size_t kExample1LoudSymbols = 12;

inline TwoUserChannel example1_channel() {
  std::vector<std::vector<double>> z_rows;
  z_rows.reserve(kExample1Symbols * kExample1Symbols);
  for (std::size_t a = 0; a < kExample1Symbols; ++a)
    for (std::size_t b = 0; b < kExample1Symbols; ++b) {
      const bool both_loud =
          a < kExample1LoudSymbols && b < kExample1LoudSymbols;
      z_rows.push_back(both_loud ? std::vector<double>{0.0, 1.0}
                                 : std::vector<double>{1.0, 0.0});
    }
  return TwoUserChannel(CondPmf::identity(kExample1Symbols),
                        CondPmf::identity(kExample1Symbols),
                        CondPmf(std::move(z_rows)));
}

// The partition-declaration distribution: U flags whether Encoder 1 uses a
// loud symbol (prob 3/4); Encoder 2 opportunistically uses the complementary
// block. Encoder 1's marginal is uniform over all 16 symbols.
inline CoordinationDist example1_dist() {
  const double loud = 1.0 / kExample1LoudSymbols;
  const double quiet = 1.0 / (kExample1Symbols - kExample1LoudSymbols);
  std::vector<double> x1_loud(kExample1Symbols, 0.0), x1_quiet(kExample1Symbols, 0.0);
  std::vector<double> x2_loud(kExample1Symbols, 0.0), x2_quiet(kExample1Symbols, 0.0);
  for (std::size_t s = 0; s < kExample1Symbols; ++s) {
    if (s < kExample1LoudSymbols) {
      x1_loud[s] = loud;
      x2_quiet[s] = loud;
    } else {
      x1_quiet[s] = quiet;
      x2_loud[s] = quiet;
    }
  }
  return CoordinationDist(Pmf({0.75, 0.25}), CondPmf({x1_loud, x1_quiet}),
                          CondPmf({x2_loud, x2_quiet}));
}

struct Example1Rates {
  double r1;
  double r2_uncoordinated;
  double r2_coordinated;
  double rc;
};

inline Example1Rates example1_rates() {
  return {4.0, 2.0, 1.5 + 0.25 * std::log2(12.0), binary_entropy(0.25)};
}

// ---------------------------------------------------------------------------
// 3D convex hull (small point sets, brute force, deterministic ordering).
// ---------------------------------------------------------------------------

struct Hull3D {
  int dim = -1;  // affine dimension of the point set
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> facets;  // index triples, dim==3 only
};

namespace detail {

inline bool solve4(const std::array<std::array<double, 5>, 4>& in,
                   std::array<double, 4>& out) {
  auto m = in;
  for (int col = 0; col < 4; ++col) {
    int best = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[best][col])) best = r;
    if (std::abs(m[best][col]) <= 1e-12) return false;
    std::swap(m[col], m[best]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (int i = 0; i < 4; ++i) out[i] = m[i][4] / m[i][i];
  return true;
}

// Whether p lies in the convex hull of the given points (Caratheodory:
// enough to test 4-point subsets in 3D, plus lower-order degenerate combos
// which appear as near-singular systems handled by smaller subsets).
inline bool in_hull_of(const std::array<double, 3>& p,
                       const std::vector<std::array<double, 3>>& pts) {
  const double tol = 1e-9;
  for (const auto& q : pts)
    if (std::abs(q[0] - p[0]) <= tol && std::abs(q[1] - p[1]) <= tol &&
        std::abs(q[2] - p[2]) <= tol)
      return true;
  const std::size_t n = pts.size();
  // Segments.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = pts[i];
      const auto& b = pts[j];
      double denom = 0.0, num = 0.0;
      for (int c = 0; c < 3; ++c) {
        denom += (b[c] - a[c]) * (b[c] - a[c]);
        num += (p[c] - a[c]) * (b[c] - a[c]);
      }
      if (denom <= tol * tol) continue;
      const double t = num / denom;
      if (t < -tol || t > 1.0 + tol) continue;
      double err = 0.0;
      for (int c = 0; c < 3; ++c)
        err = std::max(err, std::abs(a[c] + t * (b[c] - a[c]) - p[c]));
      if (err <= 1e-8) return true;
    }
  // 4-point combinations.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          std::array<std::array<double, 5>, 4> sys{};
          const std::array<std::size_t, 4> idx{i, j, k, l};
          for (int c = 0; c < 3; ++c) {
            for (int v = 0; v < 4; ++v) sys[c][v] = pts[idx[v]][c];
            sys[c][4] = p[c];
          }
          for (int v = 0; v < 4; ++v) sys[3][v] = 1.0;
          sys[3][4] = 1.0;
          std::array<double, 4> lambda{};
          if (!solve4(sys, lambda)) continue;
          bool ok = true;
          for (double lv : lambda)
            if (lv < -1e-8) ok = false;
          if (ok) return true;
        }
  return false;
}

}  // namespace detail

inline Hull3D convex_hull_3d(const std::vector<std::array<double, 3>>& points) {
  if (points.empty()) throw std::invalid_argument("convex_hull_3d: no points");

  // Deduplicate, preserving first occurrence, then sort for determinism.
  std::vector<std::array<double, 3>> pts;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : pts)
      if (std::abs(q[0] - p[0]) <= 1e-9 && std::abs(q[1] - p[1]) <= 1e-9 &&
          std::abs(q[2] - p[2]) <= 1e-9)
        dup = true;
    if (!dup) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());

  Hull3D hull;
  // Extreme points: not in the hull of the others.
  std::vector<std::array<double, 3>> extremes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::array<double, 3>> others;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) others.push_back(pts[j]);
    if (others.empty() || !detail::in_hull_of(pts[i], others))
      extremes.push_back(pts[i]);
  }
  hull.vertices = extremes;

  // Affine dimension from the extreme points.
  if (extremes.size() == 1) {
    hull.dim = 0;
    return hull;
  }
  if (extremes.size() == 2) {
    hull.dim = 1;
    return hull;
  }
  // Check for full dimension by brute-force facet search; collect facets.
  const std::size_t n = extremes.size();
  bool planar = true;
  for (std::size_t i = 0; i < n && planar; ++i)
    for (std::size_t j = i + 1; j < n && planar; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto& a = extremes[i];
        const auto& b = extremes[j];
        const auto& c = extremes[k];
        const std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const std::array<double, 3> v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        const std::array<double, 3> nrm{u[1] * v[2] - u[2] * v[1],
                                        u[2] * v[0] - u[0] * v[2],
                                        u[0] * v[1] - u[1] * v[0]};
        const double norm =
            std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
        if (norm <= 1e-10) continue;
        bool above = false, below = false;
        for (const auto& p : extremes) {
          const double s = (nrm[0] * (p[0] - a[0]) + nrm[1] * (p[1] - a[1]) +
                            nrm[2] * (p[2] - a[2])) /
                           norm;
          if (s > 1e-9) above = true;
          if (s < -1e-9) below = true;
        }
        if (above && below) {
          planar = false;
          break;
        }
        if (!above || !below) hull.facets.push_back({i, j, k});
      }
  hull.dim = planar ? 2 : 3;
  if (planar) hull.facets.clear();
  std::sort(hull.facets.begin(), hull.facets.end());
  return hull;
}

// ---------------------------------------------------------------------------
// Frontier search: multi-start projected gradient ascent on the penalized
// weighted objective w1 R1 + w2 R2 - wc Rc - mu * ||Q_Z - target||^2.
// ---------------------------------------------------------------------------

struct FrontierWeights {
  double w1 = 1.0;
  double w2 = 1.0;
  double wc = 0.0;
};

struct RegionFrontier {
  std::vector<RegionPoint> points;  // one per weight vector, best feasible
  std::vector<bool> found;          // per weight: feasible point located
  Hull3D hull;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Parameter vector layout: [p_u | p_x1|u rows | p_x2|u rows], each block a
// point of its simplex (normalized inside the evaluator).
struct FrontierProblem {
  const TwoUserChannel& ch;
  std::size_t u_size;
  const Pmf* target;  // may be null: unconstrained interference
  std::vector<double> h_w1_rows, h_w2_rows;  // per-input-row channel entropies

  FrontierProblem(const TwoUserChannel& c, std::size_t us, const Pmf* t)
      : ch(c), u_size(us), target(t) {
    for (std::size_t x = 0; x < ch.x1_size(); ++x)
      h_w1_rows.push_back(entropy(ch.p_y1_given_x1.row(x)));
    for (std::size_t x = 0; x < ch.x2_size(); ++x)
      h_w2_rows.push_back(entropy(ch.p_y2_given_x2.row(x)));
  }

  std::size_t dim() const {
    return u_size * (1 + ch.x1_size() + ch.x2_size());
  }

  struct Rates {
    double r1, r2, rc;
    std::vector<double> q_z;
  };

  // Normalizes each simplex block in place and evaluates the rate terms.
  Rates rates(std::vector<double>& v) const {
    const std::size_t n1 = ch.x1_size(), n2 = ch.x2_size(), nz = ch.z_size();
    auto normalize = [](double* p, std::size_t k) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (p[i] < 0.0) p[i] = 0.0;
        s += p[i];
      }
      if (s <= 0.0) {
        for (std::size_t i = 0; i < k; ++i) p[i] = 1.0 / static_cast<double>(k);
      } else {
        for (std::size_t i = 0; i < k; ++i) p[i] /= s;
      }
    };
    double* pu = v.data();
    normalize(pu, u_size);
    for (std::size_t u = 0; u < u_size; ++u) {
      normalize(v.data() + u_size + u * n1, n1);
      normalize(v.data() + u_size + u_size * n1 + u * n2, n2);
    }
    auto p1 = [&](std::size_t u, std::size_t x) {
      return v[u_size + u * n1 + x];
    };
    auto p2 = [&](std::size_t u, std::size_t x) {
      return v[u_size + u_size * n1 + u * n2 + x];
    };

    std::vector<double> m1(n1, 0.0), m2(n2, 0.0);
    for (std::size_t u = 0; u < u_size; ++u) {
      for (std::size_t x = 0; x < n1; ++x) m1[x] += pu[u] * p1(u, x);
      for (std::size_t x = 0; x < n2; ++x) m2[x] += pu[u] * p2(u, x);
    }
    auto h = [](const std::vector<double>& p) {
      double s = 0.0;
      for (double x : p) s -= plog2p(x);
      return s;
    };
    auto mi_through = [&](const std::vector<double>& px, const CondPmf& w,
                          const std::vector<double>& row_h) {
      std::vector<double> qy(w.out_size(), 0.0);
      double cond = 0.0;
      for (std::size_t x = 0; x < px.size(); ++x) {
        if (px[x] == 0.0) continue;
        cond += px[x] * row_h[x];
        for (std::size_t y = 0; y < w.out_size(); ++y)
          qy[y] += px[x] * w(y, x);
      }
      const double mi = h(qy) - cond;
      return mi < 0.0 ? 0.0 : mi;
    };

    Rates r;
    r.r1 = mi_through(m1, ch.p_y1_given_x1, h_w1_rows);
    // I(U;X1) = H(X1) - H(X1|U), and likewise for X2.
    double h_x1_given_u = 0.0, h_x2_given_u = 0.0;
    for (std::size_t u = 0; u < u_size; ++u) {
      double h1 = 0.0, h2 = 0.0;
      for (std::size_t x = 0; x < n1; ++x) h1 -= plog2p(p1(u, x));
      for (std::size_t x = 0; x < n2; ++x) h2 -= plog2p(p2(u, x));
      h_x1_given_u += pu[u] * h1;
      h_x2_given_u += pu[u] * h2;
    }
    r.rc = std::max(h(m1) - h_x1_given_u, 0.0);
    const double i_ux2 = std::max(h(m2) - h_x2_given_u, 0.0);
    r.r2 = std::max(mi_through(m2, ch.p_y2_given_x2, h_w2_rows) - i_ux2, 0.0);

    r.q_z.assign(nz, 0.0);
    for (std::size_t u = 0; u < u_size; ++u) {
      if (pu[u] == 0.0) continue;
      for (std::size_t a = 0; a < n1; ++a) {
        const double w1 = pu[u] * p1(u, a);
        if (w1 == 0.0) continue;
        for (std::size_t b = 0; b < n2; ++b) {
          const double w = w1 * p2(u, b);
          if (w == 0.0) continue;
          for (std::size_t z = 0; z < nz; ++z)
            r.q_z[z] += w * ch.p_z_given_x1x2(z, a * n2 + b);
        }
      }
    }
    return r;
  }

  double objective(std::vector<double> v, const FrontierWeights& w,
                   double mu) const {
    const Rates r = rates(v);
    double f = w.w1 * r.r1 + w.w2 * r.r2 - w.wc * r.rc;
    if (target) {
      double pen = 0.0;
      for (std::size_t z = 0; z < r.q_z.size(); ++z) {
        const double d = r.q_z[z] - (*target)[z];
        pen += d * d;
      }
      f -= mu * pen;
    }
    return f;
  }
};

inline void ascend(const FrontierProblem& prob, const FrontierWeights& w,
                   double mu, std::vector<double>& v, int max_inner) {
  const std::size_t d = prob.dim();
  double f = prob.objective(v, w, mu);
  double step = 0.1;
  std::vector<double> grad(d), cand(d);
  for (int it = 0; it < max_inner; ++it) {
    const double h = 1e-7;
    for (std::size_t i = 0; i < d; ++i) {
      cand = v;
      cand[i] += h;
      grad[i] = (prob.objective(cand, w, mu) - f) / h;
    }
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm <= 1e-13) break;
    for (std::size_t i = 0; i < d; ++i) {
      cand[i] = v[i] + step * grad[i] / norm;
      if (cand[i] < 0.0) cand[i] = 0.0;
    }
    const double fc = prob.objective(cand, w, mu);
    if (fc > f) {
      v = cand;
      f = fc;
      step = std::min(step * 1.3, 0.3);
    } else {
      step *= 0.5;
      if (step < 1e-10) break;
    }
  }
}

// Hard-support initialization for constrained searches: give each X1|u row a
// small random support, then start X2|u uniform on the symbols with minimal
// expected squared distance between the induced interference row and the
// target. Smooth random starts tend to suppress the same X2 symbols under
// every u; seeding from discrete supports lets restarts reach basins where
// the conditional supports differ per u.
inline void support_seed(const FrontierProblem& prob, const Pmf& target,
                         std::mt19937_64& rng, std::vector<double>& v) {
  const std::size_t n1 = prob.ch.x1_size(), n2 = prob.ch.x2_size(),
                    nz = prob.ch.z_size(), us = prob.u_size;
  std::exponential_distribution<double> expo(1.0);
  for (std::size_t u = 0; u < us; ++u) v[u] = expo(rng);

  std::vector<std::size_t> order(n1);
  for (std::size_t i = 0; i < n1; ++i) order[i] = i;
  for (std::size_t u = 0; u < us; ++u) {
    double* row1 = v.data() + us + u * n1;
    double* row2 = v.data() + us + us * n1 + u * n2;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t max_k = std::max<std::size_t>(2, n1 / 4);
    const std::size_t k =
        1 + std::uniform_int_distribution<std::size_t>(0, max_k - 1)(rng);
    std::fill(row1, row1 + n1, 0.0);
    for (std::size_t i = 0; i < k; ++i) row1[order[i]] = 1.0 / double(k);

    // Expected squared deviation of the interference row from the target,
    // per candidate x2, under the chosen X1|u support.
    std::vector<double> score(n2, 0.0);
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t a = order[i];
        double d2 = 0.0;
        for (std::size_t z = 0; z < nz; ++z) {
          const double d = prob.ch.p_z_given_x1x2(z, a * n2 + b) - target[z];
          d2 += d * d;
        }
        score[b] += d2 / double(k);
      }
    const double best = *std::min_element(score.begin(), score.end());
    for (std::size_t b = 0; b < n2; ++b)
      row2[b] = score[b] <= best + 1e-12 ? 1.0 : 0.0;
  }
}

}  // namespace detail

// For each weight vector, the best feasible point found over `restarts`
// seeded random starts, with the penalty weight ramped x10 across 5 stages.
// Pass an empty optional target to leave the interference unconstrained.
inline RegionFrontier frontier_search(const TwoUserChannel& ch,
                                      const std::optional<Pmf>& q_z_target,
                                      const std::vector<FrontierWeights>& weights,
                                      std::size_t u_size, int restarts,
                                      std::uint64_t seed,
                                      double feasibility_tv = 1e-6,
                                      int max_inner = 400) {
  if (u_size < 1) throw std::invalid_argument("frontier_search: u_size < 1");
  if (q_z_target && q_z_target->size() != ch.z_size())
    throw std::invalid_argument("frontier_search: target dimension mismatch");

  detail::FrontierProblem prob(ch, u_size,
                               q_z_target ? &*q_z_target : nullptr);
  RegionFrontier out;

  for (std::size_t wi = 0; wi < weights.size(); ++wi) {
    const FrontierWeights& w = weights[wi];
    bool have_best = false;
    double best_val = 0.0;
    std::vector<double> best_v;

    for (int rs = 0; rs < restarts; ++rs) {
      std::mt19937_64 rng(detail::splitmix64(
          seed ^ detail::splitmix64(wi * 1000003ULL + static_cast<std::uint64_t>(rs))));
      std::vector<double> v(prob.dim());
      // Alternate diffuse and spiky starts to cover distinct support patterns.
      std::exponential_distribution<double> expo(1.0);
      const double sharp = (rs % 2 == 0) ? 1.0 : 4.0;
      for (double& x : v) x = std::pow(expo(rng), sharp);
      if (q_z_target && rs % 3 == 2)
        detail::support_seed(prob, *q_z_target, rng, v);

      if (q_z_target) {
        double mu = 10.0;
        for (int stage = 0; stage < 5; ++stage, mu *= 10.0)
          detail::ascend(prob, w, mu, v, max_inner);
        // The penalty leaves a residual on the constraint. When the target
        // sits on the boundary of the achievable set, that residual lives in
        // near-zero probabilities; truncating them can land exactly on the
        // target. Sweep thresholds and keep the best feasible truncation.
        prob.rates(v);  // normalize the blocks in place
        bool have_cand = false;
        double cand_val = 0.0;
        std::vector<double> cand_v;
        for (double thr : {0.0, 1e-9, 1e-7, 1e-5, 1e-3, 1e-2}) {
          std::vector<double> t = v;
          if (thr > 0.0)
            for (double& x : t)
              if (x < thr) x = 0.0;
          const auto rt = prob.rates(t);
          double tv = 0.0;
          for (std::size_t z = 0; z < rt.q_z.size(); ++z)
            tv += std::abs(rt.q_z[z] - (*q_z_target)[z]);
          if (0.5 * tv > feasibility_tv) continue;
          const double val = w.w1 * rt.r1 + w.w2 * rt.r2 - w.wc * rt.rc;
          if (!have_cand || val > cand_val) {
            have_cand = true;
            cand_val = val;
            cand_v = t;
          }
        }
        if (have_cand) v = cand_v;
      } else {
        detail::ascend(prob, w, 0.0, v, max_inner);
      }

      auto r = prob.rates(v);
      if (q_z_target) {
        double tv = 0.0;
        for (std::size_t z = 0; z < r.q_z.size(); ++z)
          tv += std::abs(r.q_z[z] - (*q_z_target)[z]);
        if (0.5 * tv > feasibility_tv) continue;
      }
      const double val = w.w1 * r.r1 + w.w2 * r.r2 - w.wc * r.rc;
      if (!have_best || val > best_val ||
          (val == best_val && v < best_v)) {
        have_best = true;
        best_val = val;
        best_v = v;
      }
    }

    out.found.push_back(have_best);
    if (have_best) {
      // Rebuild a validated distribution and self-certify via rate_tuple.
      const std::size_t n1 = ch.x1_size(), n2 = ch.x2_size();
      auto r = prob.rates(best_v);  // normalizes best_v in place
      std::vector<double> pu(best_v.begin(), best_v.begin() + u_size);
      std::vector<std::vector<double>> rows1, rows2;
      for (std::size_t u = 0; u < u_size; ++u) {
        rows1.emplace_back(best_v.begin() + u_size + u * n1,
                           best_v.begin() + u_size + (u + 1) * n1);
        rows2.emplace_back(best_v.begin() + u_size + u_size * n1 + u * n2,
                           best_v.begin() + u_size + u_size * n1 + (u + 1) * n2);
      }
      const CoordinationDist dist{Pmf(pu), CondPmf(rows1), CondPmf(rows2)};
      out.points.push_back(rate_tuple(ch, dist));
    } else {
      out.points.push_back(RegionPoint{});
    }
  }

  std::vector<std::array<double, 3>> hull_pts;
  for (std::size_t i = 0; i < out.points.size(); ++i)
    if (out.found[i])
      hull_pts.push_back({out.points[i].r1, out.points[i].r2, out.points[i].rc});
  if (!hull_pts.empty()) out.hull = convex_hull_3d(hull_pts);
  return out;
}

}  // namespace ictk

#endif  // ICTK_COORD_HPP
