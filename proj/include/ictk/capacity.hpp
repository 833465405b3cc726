#ifndef ICTK_CAPACITY_HPP
#define ICTK_CAPACITY_HPP

// Single-user constrained capacity: maximize the concave I(X;Y) over the
// pre-image polytope with Frank-Wolfe steps against the enumerated vertex
// set. The Frank-Wolfe gap upper-bounds the suboptimality and is the
// stopping certificate.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ictk/polytope.hpp"
#include "ictk/prob.hpp"

namespace ictk {

struct SingleUserChannel {
  CondPmf p_y_given_x;
  CondPmf p_z_given_x;

  SingleUserChannel(CondPmf py, CondPmf pz)
      : p_y_given_x(std::move(py)), p_z_given_x(std::move(pz)) {
    if (p_y_given_x.in_size() != p_z_given_x.in_size())
      throw std::invalid_argument(
          "SingleUserChannel: input alphabets disagree");
  }
};

struct CapacityResult {
  double rate = 0.0;
  Pmf optimizer;
  double duality_gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool feasible = false;
  bool converged = false;
  std::vector<double> objective_history;
};

namespace detail {

// Gradient of I(X;Y) w.r.t. P_X, up to an additive constant that cancels on
// the simplex: grad[x] = D(W(.|x) || q) in bits, q = P_X W.
inline std::vector<double> mi_gradient(const Pmf& p, const CondPmf& w) {
  const Pmf q = push_forward(p, w);
  std::vector<double> g(p.size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    double d = 0.0;
    for (std::size_t y = 0; y < w.out_size(); ++y) {
      const double wyx = w(y, x);
      if (wyx == 0.0) continue;
      if (q[y] <= 0.0) {
        d = 1e12;  // unreachable from the current iterate; steer towards it
        break;
      }
      d += wyx * std::log2(wyx / q[y]);
    }
    g[x] = d;
  }
  return g;
}

inline double golden_section_max(const std::vector<double>& base,
                                 const std::vector<double>& dir,
                                 double lo, double hi, const CondPmf& w,
                                 int iters = 60) {
  auto eval = [&](double t) {
    std::vector<double> p(base.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = std::max(base[i] + t * dir[i], 0.0);
    double s = 0.0;
    for (double v : p) s += v;
    for (double& v : p) v /= s;
    return mutual_information(Pmf(p), w);
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = eval(x1);
    }
  }
  return 0.5 * (a + b);
}

// Frank-Wolfe (pairwise steps) over an explicit vertex set. Iterates are
// kept as convex-combination weights so away vertices are exact.
inline CapacityResult maximize_mi(const CondPmf& w,
                                  const std::vector<Pmf>& vertices,
                                  double tol, int max_iter) {
  CapacityResult res;
  res.feasible = true;
  const std::size_t m = w.in_size();
  const std::size_t nv = vertices.size();

  std::vector<double> weights(nv, 1.0 / static_cast<double>(nv));
  auto current = [&]() {
    std::vector<double> p(m, 0.0);
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t x = 0; x < m; ++x) p[x] += weights[v] * vertices[v][x];
    double s = 0.0;
    for (double x : p) s += x;
    for (double& x : p) x /= s;
    return p;
  };

  std::vector<double> p = current();
  double obj = mutual_information(Pmf(p), w);
  res.objective_history.push_back(obj);

  if (nv == 1) {
    res.rate = obj;
    res.optimizer = vertices.front();
    res.duality_gap = 0.0;
    res.converged = true;
    return res;
  }

  for (int it = 0; it < max_iter; ++it) {
    const auto grad = mi_gradient(Pmf(p), w);
    auto dot = [&](const Pmf& v) {
      double s = 0.0;
      for (std::size_t x = 0; x < m; ++x) s += grad[x] * v[x];
      return s;
    };
    double grad_p = 0.0;
    for (std::size_t x = 0; x < m; ++x) grad_p += grad[x] * p[x];

    std::size_t fw = 0, away = 0;
    double fw_val = -std::numeric_limits<double>::infinity();
    double away_val = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < nv; ++v) {
      const double d = dot(vertices[v]);
      if (d > fw_val) {
        fw_val = d;
        fw = v;
      }
      if (weights[v] > 1e-15 && d < away_val) {
        away_val = d;
        away = v;
      }
    }
    res.duality_gap = fw_val - grad_p;
    res.iterations = it;
    if (res.duality_gap <= tol) {
      res.converged = true;
      break;
    }

    // Pairwise step: shift weight from the away vertex to the FW vertex.
    const double max_step = weights[away];
    std::vector<double> dir(m);
    for (std::size_t x = 0; x < m; ++x)
      dir[x] = vertices[fw][x] - vertices[away][x];
    const double gamma = golden_section_max(p, dir, 0.0, max_step, w);
    weights[fw] += gamma;
    weights[away] -= gamma;
    if (weights[away] < 0.0) weights[away] = 0.0;

    p = current();
    const double new_obj = mutual_information(Pmf(p), w);
    if (new_obj >= obj) obj = new_obj;
    res.objective_history.push_back(obj);
  }

  res.rate = obj;
  res.optimizer = Pmf(p);
  return res;
}

}  // namespace detail

inline CapacityResult constrained_capacity(const SingleUserChannel& ch,
                                           const Pmf& g_z, double tol = 1e-7,
                                           int max_iter = 10000) {
  if (!(tol > 0.0)) throw std::invalid_argument("constrained_capacity: tol <= 0");
  if (ch.p_z_given_x.out_size() != g_z.size())
    throw std::invalid_argument("constrained_capacity: target dimension mismatch");
  PreimagePolytope poly(ch.p_z_given_x, g_z);
  auto vs = enumerate_vertices(poly);
  if (vs.vertices.empty()) {
    CapacityResult res;
    res.feasible = false;
    return res;
  }
  return detail::maximize_mi(ch.p_y_given_x, vs.vertices, tol, max_iter);
}

inline CapacityResult unconstrained_capacity(const CondPmf& p_y_given_x,
                                             double tol = 1e-7,
                                             int max_iter = 10000) {
  if (!(tol > 0.0)) throw std::invalid_argument("unconstrained_capacity: tol <= 0");
  std::vector<Pmf> corners;
  corners.reserve(p_y_given_x.in_size());
  for (std::size_t x = 0; x < p_y_given_x.in_size(); ++x)
    corners.push_back(Pmf::point_mass(x, p_y_given_x.in_size()));
  return detail::maximize_mi(p_y_given_x, corners, tol, max_iter);
}

// Per-target results; infeasible targets are reported, not dropped.
inline std::vector<std::pair<Pmf, CapacityResult>> capacity_curve(
    const SingleUserChannel& ch, const std::vector<Pmf>& targets,
    double tol = 1e-7, int max_iter = 10000) {
  std::vector<std::pair<Pmf, CapacityResult>> out;
  out.reserve(targets.size());
  for (const Pmf& g : targets)
    out.emplace_back(g, constrained_capacity(ch, g, tol, max_iter));
  return out;
}

}  // namespace ictk

#endif  // ICTK_CAPACITY_HPP
