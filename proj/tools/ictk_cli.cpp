// Command-line front end: capacity sweeps (single user), coordination-region
// frontier search (two users), random-codebook simulation, and the built-in
// 16-symbol constellation numbers. Output is CSV at full precision (17
// significant digits); --round switches the display to 6 digits.
//
// Exit codes: 0 success, 1 error, 2 infeasible-only results.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ictk/capacity.hpp"
#include "ictk/channel_io.hpp"
#include "ictk/coord.hpp"
#include "ictk/sim.hpp"

namespace {

bool g_round = false;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), g_round ? "%.6g" : "%.17g", v);
  return buf;
}

std::string fmt_pmf(const ictk::Pmf& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ';';
    s += fmt(p[i]);
  }
  return s;
}

ictk::Pmf parse_pmf(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return ictk::Pmf(v);
}

// A target is either a comma-separated pmf or a binary sweep t0:t1:steps.
std::vector<ictk::Pmf> parse_targets(const std::vector<std::string>& specs) {
  std::vector<ictk::Pmf> out;
  for (const auto& s : specs) {
    if (s.find(':') != std::string::npos) {
      std::stringstream ss(s);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c, ':');
      const double t0 = std::stod(a), t1 = std::stod(b);
      const int steps = std::stoi(c);
      if (steps < 1) throw std::invalid_argument("sweep needs steps >= 1");
      for (int i = 0; i < steps; ++i) {
        const double t =
            steps == 1 ? t0 : t0 + (t1 - t0) * i / static_cast<double>(steps - 1);
        out.push_back(ictk::Pmf({t, 1.0 - t}));
      }
    } else {
      out.push_back(parse_pmf(s));
    }
  }
  return out;
}

std::vector<ictk::FrontierWeights> parse_weights(const std::string& s) {
  std::vector<ictk::FrontierWeights> out;
  std::stringstream groups(s);
  std::string grp;
  while (std::getline(groups, grp, ';')) {
    std::stringstream ss(grp);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    out.push_back({std::stod(a), std::stod(b), std::stod(c)});
  }
  if (out.empty()) throw std::invalid_argument("empty weight list");
  return out;
}

int check_threads_env() {
  const char* v = std::getenv("ICTK_THREADS");
  if (!v) return 0;
  try {
    if (std::stoi(v) < 1) throw std::invalid_argument("");
  } catch (...) {
    std::cerr << "error: ICTK_THREADS must be a positive integer\n";
    return 1;
  }
  return 0;
}

struct OutputSink {
  std::ofstream file;
  std::ostream* os = &std::cout;

  int open(const std::string& path) {
    if (path.empty()) return 0;
    file.open(path);
    if (!file) {
      std::cerr << "error: cannot open output file '" << path << "'\n";
      return 1;
    }
    os = &file;
    return 0;
  }
  std::ostream& out() { return *os; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication-interference trade-off toolkit"};
  app.require_subcommand(1);

  std::string channel_spec, out_path, weights_spec = "1,1,0";
  std::vector<std::string> target_specs;
  std::string input_spec, decoder_name = "ml";
  double tol = 1e-7, epsilon = 0.0, rate = 0.5;
  int max_iter = 10000, restarts = 64, trials = 500, u_size = 0;
  std::uint64_t seed = 1;
  std::vector<int> n_list{25, 100, 400};
  bool partition = false;

  auto* ex1 = app.add_subcommand(
      "example1", "Rates for the built-in 16-symbol constellation");
  ex1->add_flag("--round", g_round, "display-rounded output");

  auto* cap = app.add_subcommand("capacity", "Single-user constrained capacity sweep");
  cap->add_option("--channel", channel_spec, "channel file or preset")->required();
  cap->add_option("--target", target_specs,
                  "interference type: comma pmf or binary sweep t0:t1:steps")
      ->required();
  cap->add_option("--tol", tol, "Frank-Wolfe gap tolerance");
  cap->add_option("--max-iter", max_iter, "iteration cap");
  cap->add_option("--out", out_path, "output CSV path (default stdout)");
  cap->add_flag("--round", g_round, "display-rounded output");

  auto* reg = app.add_subcommand("region", "Two-user coordination frontier");
  reg->add_option("--channel", channel_spec, "channel file or preset")->required();
  reg->add_option("--target", target_specs, "target interference type (comma pmf)");
  reg->add_option("--weights", weights_spec, "w1,w2,wc groups separated by ';'");
  reg->add_option("--u-size", u_size, "auxiliary alphabet size (default min(|X1|,|X2|)+1)");
  reg->add_option("--restarts", restarts, "search restarts per weight vector");
  reg->add_option("--seed", seed, "random seed");
  reg->add_option("--out", out_path, "output CSV path (default stdout)");
  reg->add_flag("--round", g_round, "display-rounded output");

  auto* sim = app.add_subcommand("simulate", "Random-codebook simulation sweep");
  sim->add_option("--channel", channel_spec, "single-user channel file or preset")
      ->required();
  sim->add_option("--input", input_spec, "input pmf (default uniform)");
  sim->add_option("--rate", rate, "communication rate (bits/use)");
  sim->add_option("--decoder", decoder_name, "ml | typicality");
  sim->add_option("--epsilon", epsilon, "typicality margin (default 2/sqrt(n))");
  sim->add_option("--n-list", n_list, "blocklengths");
  sim->add_option("--trials", trials, "trials per blocklength");
  sim->add_option("--seed", seed, "random seed");
  sim->add_flag("--example1-partition", partition,
                "run the constellation partition-declaration diagnostic instead");
  sim->add_option("--out", out_path, "output CSV path (default stdout)");
  sim->add_flag("--round", g_round, "display-rounded output");

  CLI11_PARSE(app, argc, argv);
  if (check_threads_env() != 0) return 1;

  OutputSink sink;
  if (sink.open(out_path) != 0) return 1;

  try {
    if (ex1->parsed()) {
      const auto r = ictk::example1_rates();
      sink.out() << "r1,r2_uncoordinated,r2_coordinated,rc\n"
                 << fmt(r.r1) << ',' << fmt(r.r2_uncoordinated) << ','
                 << fmt(r.r2_coordinated) << ',' << fmt(r.rc) << '\n';
      char rounded[128];
      std::snprintf(rounded, sizeof(rounded),
                    "# rounded: (R1,R2)=(%.0f,%.1f), Rc=%.2f\n", r.r1,
                    r.r2_coordinated, r.rc);
      sink.out() << rounded;
      return 0;
    }

    if (cap->parsed()) {
      const auto spec = ictk::parse_channel_file(channel_spec);
      if (!spec.is_single()) {
        std::cerr << "error: capacity needs a single-user channel\n";
        return 1;
      }
      const auto targets = parse_targets(target_specs);
      const auto results = ictk::capacity_curve(spec.single(), targets, tol, max_iter);
      sink.out() << "g_z,feasible,rate,gap,iterations\n";
      bool any_feasible = false;
      for (const auto& [g, res] : results) {
        any_feasible = any_feasible || res.feasible;
        sink.out() << fmt_pmf(g) << ',' << (res.feasible ? 1 : 0) << ','
                   << (res.feasible ? fmt(res.rate) : "") << ','
                   << (res.feasible ? fmt(res.duality_gap) : "") << ','
                   << res.iterations << '\n';
      }
      return any_feasible ? 0 : 2;
    }

    if (reg->parsed()) {
      const auto spec = ictk::parse_channel_file(channel_spec);
      if (spec.is_single()) {
        std::cerr << "error: region needs a two-user channel\n";
        return 1;
      }
      const auto& ch = spec.two_user();
      std::optional<ictk::Pmf> target;
      if (!target_specs.empty()) {
        if (target_specs.size() > 1) {
          std::cerr << "error: region takes a single target\n";
          return 1;
        }
        target = parse_pmf(target_specs.front());
      }
      const std::size_t us =
          u_size > 0 ? static_cast<std::size_t>(u_size)
                     : std::min(ch.x1_size(), ch.x2_size()) + 1;
      const auto frontier = ictk::frontier_search(
          ch, target, parse_weights(weights_spec), us, restarts, seed);
      sink.out() << "found,r1,r2,rc,tv_to_target\n";
      bool any = false;
      for (std::size_t i = 0; i < frontier.points.size(); ++i) {
        if (!frontier.found[i]) {
          sink.out() << "0,,,,\n";
          continue;
        }
        any = true;
        const auto& p = frontier.points[i];
        const double tv =
            target ? ictk::total_variation(p.q_z, *target) : 0.0;
        sink.out() << "1," << fmt(p.r1) << ',' << fmt(p.r2) << ',' << fmt(p.rc)
                   << ',' << fmt(tv) << '\n';
      }
      sink.out() << "# hull_dim=" << frontier.hull.dim << '\n';
      for (const auto& f : frontier.hull.facets)
        sink.out() << "# facet," << f[0] << ',' << f[1] << ',' << f[2] << '\n';
      return any ? 0 : 2;
    }

    if (sim->parsed()) {
      if (partition) {
        sink.out() << "n,trials,error_rate,coord_bits_per_action\n";
        for (int n : n_list) {
          const auto rep = ictk::simulate_example1_partition(n, trials, seed);
          sink.out() << n << ',' << trials << ',' << fmt(rep.error_rate) << ','
                     << fmt(rep.mean_coord_bits_per_action) << '\n';
        }
        return 0;
      }
      const auto spec = ictk::parse_channel_file(channel_spec);
      if (!spec.is_single()) {
        std::cerr << "error: simulate needs a single-user channel "
                     "(use --example1-partition for the two-user preset)\n";
        return 1;
      }
      const auto& ch = spec.single();
      const ictk::Pmf p_x = input_spec.empty()
                                ? ictk::Pmf::uniform(ch.p_y_given_x.in_size())
                                : parse_pmf(input_spec);
      sink.out() << "n,trials,error_rate,mean_tv,exceed_0.05,exceed_0.1\n";
      for (int n : n_list) {
        ictk::DecoderSpec dec =
            decoder_name == "typicality"
                ? ictk::DecoderSpec::typicality(
                      epsilon > 0.0 ? epsilon : ictk::default_epsilon(n))
                : ictk::DecoderSpec::ml();
        const auto rep =
            ictk::simulate_single_user(ch, p_x, n, rate, trials, dec, seed);
        sink.out() << n << ',' << trials << ',' << fmt(rep.error_rate) << ','
                   << fmt(rep.mean_tv) << ',' << fmt(rep.tv_exceed_frac[0].second)
                   << ',' << fmt(rep.tv_exceed_frac[1].second) << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
