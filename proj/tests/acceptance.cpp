// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. argv[1] must be the path to the CLI binary (used for the
// subcommand-facing criteria).

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ictk/capacity.hpp"
#include "ictk/coord.hpp"
#include "ictk/polytope.hpp"
#include "ictk/prob.hpp"
#include "ictk/sim.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& cli, const std::string& args) {
  CliRun r;
  const std::string cmd = cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.output.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return r;
}

ictk::Pmf random_pmf(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(k);
  double s = 0.0;
  for (double& x : v) s += (x = expo(rng));
  for (double& x : v) x /= s;
  return ictk::Pmf(v);
}

ictk::CondPmf random_channel(std::size_t in, std::size_t out,
                             std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < in; ++i) rows.push_back(random_pmf(out, rng).probs());
  return ictk::CondPmf(rows);
}

// Independent mutual-information evaluation on raw vectors (no library
// optimizer machinery) for the grid oracle.
double raw_mi(const std::vector<double>& p, const ictk::CondPmf& w) {
  const std::size_t ny = w.out_size();
  std::vector<double> q(ny, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * w(y, x);
  double mi = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      const double wyx = w(y, x);
      if (wyx > 0.0) mi += p[x] * wyx * std::log2(wyx / q[y]);
    }
  }
  return mi;
}

// Exhaustive grid search over the pre-image polytope in barycentric
// coordinates over its vertices (the polytope has affine dimension <= 2 for
// |X| <= 3, so triples of vertices cover it).
double grid_capacity(const ictk::SingleUserChannel& ch, const ictk::Pmf& g_z,
                     double step) {
  const ictk::PreimagePolytope poly(ch.p_z_given_x, g_z);
  const auto vs = ictk::enumerate_vertices(poly);
  const auto& v = vs.vertices;
  if (v.empty()) return -1.0;
  double best = 0.0;
  const std::size_t dim = v.front().size();
  std::vector<double> p(dim);
  const int m = static_cast<int>(std::lround(1.0 / step));
  auto eval_combo = [&](const ictk::Pmf& a, const ictk::Pmf& b,
                        const ictk::Pmf& c, double la, double lb, double lc) {
    for (std::size_t i = 0; i < dim; ++i)
      p[i] = la * a[i] + lb * b[i] + lc * c[i];
    const double mi = raw_mi(p, ch.p_y_given_x);
    if (mi > best) best = mi;
  };
  for (std::size_t i = 0; i < v.size(); ++i)
    eval_combo(v[i], v[i], v[i], 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      for (std::size_t k = j; k < v.size(); ++k)
        for (int a = 0; a <= m; ++a)
          for (int b = 0; a + b <= m; ++b)
            eval_combo(v[i], v[j], v[k], double(a) / m, double(b) / m,
                       double(m - a - b) / m);
  return best;
}

bool report(int index, const std::string& name, bool ok, double secs,
            const std::string& detail) {
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL",
              index, name.c_str(), detail.c_str(), secs);
  return ok;
}

// --------------------------------------------------------------------------

bool criterion1(const std::string& cli) {
  const auto t0 = Clock::now();
  const auto run = run_cli(cli, "example1");
  bool ok = run.exit_code == 0;
  double r1 = -1, r2u = -1, r2c = -1, rc = -1;
  std::istringstream in(run.output);
  std::string line;
  std::getline(in, line);  // header
  if (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    row >> r1 >> r2u >> r2c >> rc;
  }
  const double r2c_closed = 1.5 + 0.25 * std::log2(12.0);
  const double rc_closed = ictk::binary_entropy(0.25);
  ok = ok && r1 == 4.0 && r2u == 2.0;
  ok = ok && std::abs(r2c - r2c_closed) <= 1e-12 && std::abs(r2c - 2.4) <= 0.01;
  ok = ok && std::abs(rc - rc_closed) <= 1e-12 && std::abs(rc - 0.81) <= 0.005;
  ok = ok && run.output.find("(4,2.4)") != std::string::npos &&
       run.output.find("0.81") != std::string::npos;
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  std::ostringstream d;
  d << "constellation rates r1=" << r1 << " r2c=" << r2c << " rc=" << rc;
  return report(1, "built-in constellation numbers", ok, secs, d.str());
}

bool criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20250314);
  double worst = 0.0;
  bool ok = true;
  int instances = 0;
  for (int c = 0; c < 20; ++c) {
    std::uniform_int_distribution<std::size_t> dim(2, 3);
    const std::size_t nx = dim(rng), ny = dim(rng), nz = dim(rng);
    const ictk::SingleUserChannel ch(random_channel(nx, ny, rng),
                                     random_channel(nx, nz, rng));
    for (int t = 0; t < 3; ++t) {
      const ictk::Pmf g_z =
          ictk::push_forward(random_pmf(nx, rng), ch.p_z_given_x);
      const auto res = ictk::constrained_capacity(ch, g_z, 1e-9);
      const double oracle = grid_capacity(ch, g_z, 1e-3);
      if (!res.feasible || oracle < 0.0) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(res.rate - oracle));
      ++instances;
    }
  }
  ok = ok && instances == 60 && worst <= 1e-4;
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  std::ostringstream d;
  d << "60 targets, worst |solver - grid| = " << worst;
  return report(2, "solver vs exhaustive grid oracle", ok, secs, d.str());
}

bool criterion3() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (double p : {0.05, 0.11, 0.25}) {
    const auto res = ictk::unconstrained_capacity(ictk::CondPmf::bsc(p), 1e-9);
    const double want = 1.0 - ictk::binary_entropy(p);
    ok = ok && std::abs(res.rate - want) <= 1e-7;
  }
  // A constant-row interference map constrains nothing: the target equal to
  // the row leaves the whole simplex available.
  std::mt19937_64 rng(7);
  for (int c = 0; c < 5; ++c) {
    const ictk::Pmf row = random_pmf(3, rng);
    const ictk::CondPmf pz({row.probs(), row.probs(), row.probs(),
                            row.probs()});
    const ictk::CondPmf py = random_channel(4, 3, rng);
    const auto free_res = ictk::unconstrained_capacity(py, 1e-9);
    const auto res =
        ictk::constrained_capacity(ictk::SingleUserChannel(py, pz), row, 1e-9);
    ok = ok && res.feasible && std::abs(res.rate - free_res.rate) <= 1e-7;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 5.0;
  return report(3, "unconstrained baselines", ok, secs,
                "binary symmetric closed forms and constant-row reduction");
}

bool criterion4() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::mt19937_64 rng(11);
  const ictk::Pmf row({0.3, 0.7});
  const ictk::CondPmf const_pz({row.probs(), row.probs(), row.probs()});
  for (int i = 0; i < 20; ++i) {
    ictk::Pmf g = random_pmf(2, rng);
    if (ictk::total_variation(g, row) < 1e-6) continue;
    ok = ok && !ictk::is_feasible(ictk::PreimagePolytope(const_pz, g)).first;
  }
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<std::size_t> dim(2, 4);
    const std::size_t nx = dim(rng), nz = dim(rng);
    const ictk::CondPmf pz = random_channel(nx, nz, rng);
    const ictk::Pmf g = ictk::push_forward(random_pmf(nx, rng), pz);
    const auto [feasible, witness] =
        ictk::is_feasible(ictk::PreimagePolytope(pz, g));
    ok = ok && feasible && witness.has_value();
    if (witness)
      ok = ok &&
           ictk::total_variation(ictk::push_forward(*witness, pz), g) <= 1e-7;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 5.0;
  return report(4, "feasibility detection", ok, secs,
                "constant rows reject off-row targets; images always feasible");
}

// All length-n types over a k-ary alphabet, visited without materializing
// sequences (every type is realized by some sequence).
template <typename F>
void for_each_type(int n, int k, std::vector<int>& counts, int pos, int left,
                   F&& f) {
  if (pos == k - 1) {
    counts[static_cast<std::size_t>(pos)] = left;
    f(counts);
    return;
  }
  for (int c = 0; c <= left; ++c) {
    counts[static_cast<std::size_t>(pos)] = c;
    for_each_type(n, k, counts, pos + 1, left - c, f);
  }
}

bool criterion5() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(123456);
  std::uniform_int_distribution<int> kd(2, 4), nd(1, 12);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  long violations = 0;
  int done = 0;
  while (done < 10000) {
    const int k = kd(rng), n = nd(rng);
    const ictk::Pmf q = random_pmf(static_cast<std::size_t>(k), rng);
    const ictk::Pmf qt = random_pmf(static_cast<std::size_t>(k), rng);
    const double tv = ictk::total_variation(q, qt);
    if (tv <= 1e-12) continue;
    const double eps = uni(rng) * 0.499 * tv;  // guarantees tv > 2*eps
    if (eps <= 0.0) continue;
    ++done;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    std::vector<double> type(static_cast<std::size_t>(k));
    for_each_type(n, k, counts, 0, n, [&](const std::vector<int>& c) {
      for (int i = 0; i < k; ++i)
        type[static_cast<std::size_t>(i)] =
            double(c[static_cast<std::size_t>(i)]) / n;
      double tv_q = 0.0, tv_qt = 0.0;
      for (int i = 0; i < k; ++i) {
        tv_q += std::abs(type[static_cast<std::size_t>(i)] -
                         q[static_cast<std::size_t>(i)]);
        tv_qt += std::abs(type[static_cast<std::size_t>(i)] -
                          qt[static_cast<std::size_t>(i)]);
      }
      if (0.5 * tv_q < eps && 0.5 * tv_qt < eps) ++violations;
    });
  }
  const double secs = seconds_since(t0);
  bool ok = violations == 0 && secs < 30.0;
  std::ostringstream d;
  d << "10000 well-separated pairs, " << violations
    << " types typical for both";
  return report(5, "disjoint typical sets", ok, secs, d.str());
}

bool criterion6() {
  const auto t0 = Clock::now();
  const auto ch = ictk::example1_channel();
  const ictk::Pmf target({1.0, 0.0});
  const auto coord = ictk::frontier_search(
      ch, target, {{1000.0, 1.0, 0.0}}, /*u_size=*/2, /*restarts=*/64,
      /*seed=*/2718);
  // Same lexicographic weights for the |U|=1 baseline: hold R1 at its
  // maximum and see how much R2 the uncoordinated layer can carry.
  const auto solo = ictk::frontier_search(
      ch, target, {{1000.0, 1.0, 0.0}}, /*u_size=*/1, /*restarts=*/64,
      /*seed=*/2718);
  bool ok = coord.found.size() == 1 && coord.found[0] && solo.found.size() == 1 &&
            solo.found[0];
  double r1 = 0.0, r2 = 0.0, r2_solo = -1.0;
  if (ok) {
    r1 = coord.points[0].r1;
    r2 = coord.points[0].r2;
    r2_solo = solo.points[0].r2;
    ok = r1 >= 4.0 - 1e-6 && r2 >= 2.38 && r2 > 2.0 && r2_solo <= 2.0 + 1e-6;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  std::ostringstream d;
  d << "|U|=2 point (" << r1 << ", " << r2 << "), |U|=1 cap " << r2_solo;
  return report(6, "coordination gain at zero interference", ok, secs, d.str());
}

bool criterion7() {
  const auto t0 = Clock::now();
  const ictk::SingleUserChannel ch(ictk::CondPmf::bsc(0.11),
                                   ictk::CondPmf::identity(2));
  const std::vector<int> ns = {25, 100, 400};
  std::vector<double> err, exceed;
  const int trials = 500;
  for (int n : ns) {
    const auto rep = ictk::simulate_single_user(
        ch, ictk::Pmf::uniform(2), n, 0.3, trials, ictk::DecoderSpec::ml(),
        112358);
    err.push_back(rep.error_rate);
    exceed.push_back(rep.tv_exceed_frac[1].second);  // threshold 0.1
  }
  auto inversions = [&](const std::vector<double>& v) {
    int cnt = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double se_i = std::sqrt(std::max(v[i] * (1 - v[i]), 1.0 / trials) / trials);
      const double se_j =
          std::sqrt(std::max(v[i + 1] * (1 - v[i + 1]), 1.0 / trials) / trials);
      const double se = std::sqrt(se_i * se_i + se_j * se_j);
      if (v[i + 1] > v[i] + 2.0 * se) ++cnt;
    }
    return cnt;
  };
  bool ok = inversions(err) <= 1 && inversions(exceed) <= 1;
  const double secs = seconds_since(t0);
  ok = ok && secs < 180.0;
  std::ostringstream d;
  d << "error " << err[0] << "/" << err[1] << "/" << err[2] << ", exceed(0.1) "
    << exceed[0] << "/" << exceed[1] << "/" << exceed[2];
  return report(7, "decoding and interference trends", ok, secs, d.str());
}

bool criterion8(const std::string& cli) {
  const auto t0 = Clock::now();
  const std::vector<std::string> cmds = {
      "example1",
      "capacity --channel bsc:0.2 --target 0.3,0.7 --target 0.1:0.5:5",
      "region --channel example1 --target 1,0 --weights 1,1,0 --u-size 2 "
      "--restarts 2 --seed 3",
      "simulate --channel bsc:0.11 --rate 0.3 --n-list 25 --n-list 50 "
      "--trials 100 --seed 9",
      "simulate --channel example1 --example1-partition --n-list 200 "
      "--trials 20 --seed 4",
  };
  bool ok = true;
  for (const auto& cmd : cmds) {
    const auto a = run_cli(cli, cmd);
    const auto b = run_cli(cli, cmd);
    if (a.exit_code != 0 || b.exit_code != 0 || a.output != b.output ||
        a.output.empty()) {
      ok = false;
      std::fprintf(stderr, "  determinism breach: %s (exit %d/%d)\n",
                   cmd.c_str(), a.exit_code, b.exit_code);
    }
  }
  return report(8, "byte-identical reruns", ok, seconds_since(t0),
                "every subcommand rerun with fixed seed");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];
  bool all = true;
  all &= criterion1(cli);
  all &= criterion2();
  all &= criterion3();
  all &= criterion4();
  all &= criterion5();
  all &= criterion6();
  all &= criterion7();
  all &= criterion8(cli);
  std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
