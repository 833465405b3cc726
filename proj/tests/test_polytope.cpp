#include <doctest.h>

#include <random>
#include <vector>

#include "ictk/polytope.hpp"

using namespace ictk;

namespace {

Pmf random_pmf(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(k);
  double s = 0.0;
  for (double& x : v) {
    x = expo(rng);
    s += x;
  }
  for (double& x : v) x /= s;
  return Pmf(v);
}

CondPmf random_channel(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < in; ++r) rows.push_back(random_pmf(out, rng).probs());
  return CondPmf(rows);
}

}  // namespace

TEST_CASE("feasibility: identity channel pins the witness to the target") {
  const Pmf g({0.3, 0.2, 0.5});
  auto [ok, w] = is_feasible(PreimagePolytope(CondPmf::identity(3), g));
  REQUIRE(ok);
  CHECK(total_variation(*w, g) <= 1e-9);
}

TEST_CASE("feasibility: constant-row channel") {
  const CondPmf constant({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
  CHECK(is_feasible(PreimagePolytope(constant, Pmf({0.2, 0.8}))).first);
  CHECK_FALSE(is_feasible(PreimagePolytope(constant, Pmf({0.3, 0.7}))).first);
}

TEST_CASE("vertex enumeration: whole simplex gives the unit vectors") {
  const CondPmf constant({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
  const auto vs = enumerate_vertices(PreimagePolytope(constant, Pmf({0.2, 0.8})));
  REQUIRE(vs.vertices.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    bool found = false;
    for (const auto& v : vs.vertices)
      if (total_variation(v, Pmf::point_mass(i, 3)) <= 1e-9) found = true;
    CHECK(found);
  }
}

TEST_CASE("vertex enumeration: identity channel leaves a single vertex") {
  const Pmf g({0.25, 0.25, 0.5});
  const auto vs = enumerate_vertices(PreimagePolytope(CondPmf::identity(3), g));
  REQUIRE(vs.vertices.size() == 1);
  CHECK(total_variation(vs.vertices[0], g) <= 1e-9);
}

TEST_CASE("vertex enumeration: hand-solved 3x2 instance") {
  // Rows (1,0), (0,1), (0.5,0.5); target (0.5,0.5). The equalities are
  // p0 + 0.5 p2 = 0.5 and p1 + 0.5 p2 = 0.5 with p on the simplex, a segment
  // between (0.5,0.5,0) and (0,0,1).
  const CondPmf ch({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  const auto vs = enumerate_vertices(PreimagePolytope(ch, Pmf({0.5, 0.5})));
  REQUIRE(vs.vertices.size() == 2);
  CHECK(total_variation(vs.vertices[0], Pmf({0.0, 0.0, 1.0})) <= 1e-9);
  CHECK(total_variation(vs.vertices[1], Pmf({0.5, 0.5, 0.0})) <= 1e-9);
}

TEST_CASE("enumeration guard rejects oversized alphabets") {
  std::vector<std::vector<double>> rows(25, std::vector<double>{1.0});
  CHECK_THROWS(enumerate_vertices(PreimagePolytope(CondPmf(rows), Pmf({1.0}))));
}

TEST_CASE("lp_maximize examples") {
  const CondPmf constant({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
  const PreimagePolytope simplex(constant, Pmf({0.2, 0.8}));
  auto [argmax, val] = lp_maximize(simplex, {3.0, 1.0, 2.0});
  CHECK(val == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(total_variation(argmax, Pmf::point_mass(0, 3)) <= 1e-9);

  auto [a0, v0] = lp_maximize(simplex, {0.0, 0.0, 0.0});
  CHECK(v0 == doctest::Approx(0.0));

  const CondPmf ch({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  const PreimagePolytope seg(ch, Pmf({0.5, 0.5}));
  auto [a1, v1] = lp_maximize(seg, {0.0, 0.0, 1.0});
  CHECK(v1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(total_variation(a1, Pmf({0.0, 0.0, 1.0})) <= 1e-9);

  CHECK_THROWS(lp_maximize(PreimagePolytope(constant, Pmf({0.9, 0.1})), {1.0, 0.0, 0.0}));
}

TEST_CASE("randomized: witnesses, convexity, hull round trip, LP dominance") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t nx = 2 + iter % 3, nz = 2 + (iter / 2) % 2;
    const CondPmf ch = random_channel(nx, nz, rng);
    // Feasible target by construction: push-forward of a random input.
    const Pmf g = push_forward(random_pmf(nx, rng), ch);
    const PreimagePolytope poly(ch, g);

    auto [ok, w] = is_feasible(poly);
    REQUIRE(ok);
    CHECK(total_variation(push_forward(*w, ch), g) <= 1e-8);

    const auto vs = enumerate_vertices(poly);
    REQUIRE(!vs.vertices.empty());
    for (const auto& v : vs.vertices)
      CHECK(total_variation(push_forward(v, ch), g) <= 1e-8);

    // Random convex combination stays feasible; midpoints stay feasible.
    std::vector<double> lambda(vs.vertices.size());
    double s = 0.0;
    for (double& l : lambda) {
      l = uni(rng);
      s += l;
    }
    std::vector<double> mix(nx, 0.0);
    for (std::size_t v = 0; v < vs.vertices.size(); ++v)
      for (std::size_t x = 0; x < nx; ++x)
        mix[x] += lambda[v] / s * vs.vertices[v][x];
    const Pmf mixed(mix);
    CHECK(total_variation(push_forward(mixed, ch), g) <= 1e-9);

    // LP value dominates the objective at the random feasible point.
    std::vector<double> obj(nx);
    for (double& o : obj) o = uni(rng) * 2.0 - 1.0;
    auto [arg, val] = lp_maximize(poly, obj);
    double at_mixed = 0.0;
    for (std::size_t x = 0; x < nx; ++x) at_mixed += obj[x] * mixed[x];
    CHECK(val >= at_mixed - 1e-9);
  }
}
