// qslimit: command-line front end. Every subcommand writes to --output
// (standard output by default). Exit codes: 0 success, 1 module error,
// 2 usage error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qslimit/qslimit.hpp"

namespace {

using namespace qslimit;

struct Common {
  std::string output;
  bool json = false;
  bool csv = false;
};

struct CfFlags {
  double t_max = 200.0;
  std::size_t grid_size = 4096;
  int iters = 200;
  double tol = 1e-8;
  std::string init = "gaussian";
};

struct DensityFlags {
  double x_min = -4.0;
  double x_max = 6.0;
  double dx = 0.005;
  int u_nodes = 64;
  int iters = 60;
  double tol = 1e-6;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--output,-o", c.output, "Output file (default: standard output)");
  auto* j = sub->add_flag("--json", c.json, "Emit JSON");
  auto* v = sub->add_flag("--csv", c.csv, "Emit CSV");
  j->excludes(v);
}

void add_cf_flags(CLI::App* sub, CfFlags& f) {
  sub->add_option("--t-max", f.t_max, "Largest t on the CF grid")->check(CLI::PositiveNumber);
  sub->add_option("--grid-size", f.grid_size, "Number of CF grid points")->check(CLI::Range(4, 1 << 24));
  sub->add_option("--iters", f.iters, "Maximum iterations")->check(CLI::PositiveNumber);
  sub->add_option("--tol", f.tol, "Sup-norm stopping tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--init", f.init, "Initial law")->check(CLI::IsMember({"gaussian", "uniform"}));
}

void add_density_flags(CLI::App* sub, DensityFlags& f) {
  sub->add_option("--x-min", f.x_min, "Left end of the x grid");
  sub->add_option("--x-max", f.x_max, "Right end of the x grid");
  sub->add_option("--dx", f.dx, "x grid spacing")->check(CLI::PositiveNumber);
  sub->add_option("--u-nodes", f.u_nodes, "Gauss-Legendre nodes on (0, 1/2)")->check(CLI::Range(8, 4096));
  sub->add_option("--iters", f.iters, "Maximum iterations")->check(CLI::PositiveNumber);
  sub->add_option("--tol", f.tol, "Sup-norm stopping tolerance")->check(CLI::PositiveNumber);
}

CfIteration solve_cf(const CfFlags& f) {
  const auto init = f.init == "uniform" ? init_uniform_cf(f.t_max, f.grid_size)
                                        : init_gaussian_cf(f.t_max, f.grid_size);
  return iterate_cf(init, f.iters, f.tol);
}

DensityIteration solve_density(const DensityFlags& f) {
  DensityMapOptions opt;
  opt.u_nodes = f.u_nodes;
  return iterate_density(init_gaussian_density(f.x_min, f.x_max, f.dx), f.iters, f.tol, opt);
}

std::optional<double> sup_ceiling(int k, bool trick, bool deep) {
  if (k == 0) return trick ? 15.3 : 18.2;
  if (deep) return 2466.0;
  return trick ? 2492.1 : 3652.1;
}

int run_supf(const Common& c, int k, bool trick, bool deep, double max_p) {
  if (max_p <= 0.0) max_p = k == 0 ? 3.5 : (deep ? 4.5 : 3.5);
  const auto env = make_envelope(standard_chain(max_p), trick);
  auto r = sup_fk_report(env, k);
  r.published_ceiling = sup_ceiling(k, trick, deep && max_p >= 4.5);
  Output out(c.output);
  auto& os = out.stream();
  if (c.json) {
    write_json(os, to_json(r));
    return 0;
  }
  if (c.csv) {
    os << "t_lo,t_hi,p,c,form,integral\n";
    for (const auto& [pc, v] : r.pieces)
      os << fmt_real(pc.t_lo) << ',' << fmt_real(pc.t_hi) << ',' << fmt_real(pc.bound.p)
         << ',' << fmt_real(pc.bound.c) << ',' << to_string(pc.bound.form) << ','
         << fmt_real(v) << '\n';
    return 0;
  }
  const char* what = k == 0 ? "sup f" : "sup |f'|";
  os << std::setprecision(10) << what << " <= " << r.total << '\n';
  if (trick) {
    const double ceiling = k == 0 ? kMaxfCeiling : kMaxf1Ceiling;
    const bool ok = r.total < ceiling;
    os << (k == 0 ? "max f < 16: " : "max |f'| < 2466: ") << (ok ? "PASS" : "FAIL") << '\n';
    if (k == 0 && !ok) return 1;
  }
  return 0;
}

int run_report(const Common& c) {
  AcceptanceContext ctx;
  const auto results = run_acceptance(ctx);
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  Output out(c.output);
  auto& os = out.stream();
  if (c.json) {
    Json list = Json::array();
    for (const auto& r : results)
      list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    write_json(os, {{"criteria", list}, {"all_pass", all}});
  } else {
    for (const auto& r : results)
      os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ". " << r.title << ": " << r.detail
         << '\n';
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting Quicksort distribution: bounds, solvers, simulation"};
  app.require_subcommand(1);
  Common common;

  double max_p = 3.5;
  bool trick = false;
  auto* bounds = app.add_subcommand("bounds", "Bound chain on |phi| and its envelope");
  bounds->add_option("--max-p", max_p, "Largest exponent in the chain")->check(CLI::PositiveNumber);
  bounds->add_flag("--trick", trick, "Splice the logarithmic bound into the envelope");
  add_common(bounds, common);

  double supf_max_p = 0.0;
  bool with_92 = false;
  auto* supf = app.add_subcommand("supf", "Envelope bound on sup f");
  supf->add_flag("--trick", trick, "Use the logarithmic bound");
  supf->add_option("--max-p", supf_max_p, "Largest exponent in the chain (default 3.5)");
  add_common(supf, common);
  auto* supf1 = app.add_subcommand("supf1", "Envelope bound on sup |f'|");
  supf1->add_flag("--trick", trick, "Use the logarithmic bound");
  supf1->add_flag("--with-9-2", with_92, "Extend the chain to p = 9/2");
  supf1->add_option("--max-p", supf_max_p, "Largest exponent in the chain (default 3.5)");
  add_common(supf1, common);

  CfFlags cf;
  auto* phi = app.add_subcommand("phi", "Iterate the CF fixed point; CSV t,re,im");
  add_cf_flags(phi, cf);
  add_common(phi, common);

  int k = 0;
  double inv_x_min = -4.0, inv_x_max = 6.0, inv_dx = 0.005;
  auto* invert = app.add_subcommand("invert", "Fourier-invert the CF fixed point; CSV x,f or x,fk");
  add_cf_flags(invert, cf);
  invert->add_option("--k", k, "Derivative order")->check(CLI::NonNegativeNumber);
  invert->add_option("--x-min", inv_x_min, "Left end of the x grid");
  invert->add_option("--x-max", inv_x_max, "Right end of the x grid");
  invert->add_option("--dx", inv_dx, "x grid spacing")->check(CLI::PositiveNumber);
  add_common(invert, common);

  DensityFlags df;
  std::string convergence;
  auto* density = app.add_subcommand("density", "Iterate the density integral equation; CSV x,f");
  add_density_flags(density, df);
  density->add_option("--convergence", convergence, "Also write convergence JSON to this file");
  add_common(density, common);

  auto* cdf_cmd = app.add_subcommand("cdf", "CDF of the density fixed point; CSV x,F");
  add_density_flags(cdf_cmd, df);
  add_common(cdf_cmd, common);

  SimulationConfig sim;
  std::string ref_cdf, hist_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo of X_n; SimulationSummary JSON");
  simulate_cmd->add_option("--n", sim.n, "Input size")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--samples", sim.samples, "Number of samples")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "RNG seed");
  simulate_cmd->add_option("--bins", sim.bins, "Histogram bins")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--cdf", ref_cdf, "Reference CDF (x,F CSV) for the KS distance")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--histogram", hist_out, "Write the histogram CSV to this file");
  add_common(simulate_cmd, common);

  int K = 8;
  double moment_tol = 1e-13;
  auto* moments = app.add_subcommand("moments", "Moments of the limit by recursion");
  moments->add_option("--k-max", K, "Highest moment order")->check(CLI::Range(2, 40));
  moments->add_option("--tol", moment_tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
  add_common(moments, common);

  auto* report = app.add_subcommand("report", "Run every acceptance check; pass/fail table");
  add_common(report, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*bounds) {
      const auto chain = standard_chain(max_p);
      const auto env = make_envelope(chain, trick);
      Output out(common.output);
      auto& os = out.stream();
      if (common.csv) {
        os << "p,c,ceiling,provenance\n";
        for (const auto& e : chain.entries())
          os << fmt_real(e.p) << ',' << fmt_real(e.c) << ',' << fmt_real(e.ceiling()) << ','
             << to_string(e.provenance) << '\n';
      } else if (common.json) {
        Json j = to_json(chain);
        j["envelope"] = to_json(env)["pieces"];
        write_json(os, j);
      } else {
        os << std::setprecision(12);
        for (const auto& e : chain.entries())
          os << "c_" << e.p << " = " << e.c << "  (ceiling " << e.ceiling() << ", "
             << to_string(e.provenance) << ")\n";
      }
      return 0;
    }
    if (*supf) return run_supf(common, 0, trick, false, supf_max_p);
    if (*supf1) return run_supf(common, 1, trick, with_92, with_92 ? 4.5 : supf_max_p);
    if (*phi) {
      const auto r = solve_cf(cf);
      Output out(common.output);
      if (common.json) {
        write_json(out.stream(), {{"iterations", r.iterations},
                                  {"final_diff", r.final_diff},
                                  {"diff_history", r.diff_history}});
      } else {
        write_cf_csv(out.stream(), r.phi);
      }
      return 0;
    }
    if (*invert) {
      if (!(inv_x_max > inv_x_min)) throw std::invalid_argument("--x-max must exceed --x-min");
      const auto r = solve_cf(cf);
      const auto n = points_in(inv_x_min, inv_x_max, inv_dx);
      const auto g = invert_cf(r.phi, k, inv_x_min, inv_dx, n);
      Output out(common.output);
      write_density_csv(out.stream(), g, k);
      return 0;
    }
    if (*density) {
      const auto r = solve_density(df);
      if (r.warning) std::cerr << "warning: " << *r.warning << '\n';
      if (!convergence.empty()) {
        Output conv(convergence);
        write_json(conv.stream(), to_json(r));
      }
      Output out(common.output);
      if (common.json) {
        write_json(out.stream(), to_json(r));
      } else {
        write_density_csv(out.stream(), r.f.grid());
      }
      return 0;
    }
    if (*cdf_cmd) {
      const auto r = solve_density(df);
      if (r.warning) std::cerr << "warning: " << *r.warning << '\n';
      Output out(common.output);
      write_cdf_csv(out.stream(), cdf(r.f));
      return 0;
    }
    if (*simulate_cmd) {
      std::optional<RealGrid> ref;
      if (!ref_cdf.empty()) {
        std::ifstream in(ref_cdf);
        ref = read_cdf_csv(in);
      }
      const auto s = simulate(sim, ref ? &*ref : nullptr);
      if (!hist_out.empty()) {
        Output h(hist_out);
        write_histogram_csv(h.stream(), s.histogram);
      }
      Output out(common.output);
      if (common.csv) {
        write_histogram_csv(out.stream(), s.histogram);
      } else {
        write_json(out.stream(), to_json(s));
      }
      return 0;
    }
    if (*moments) {
      const auto ms = pump_moments(K, {moment_tol, 4000});
      Output out(common.output);
      if (common.csv) {
        out.stream() << "k,value\n";
        for (std::size_t i = 0; i <= ms.order(); ++i)
          out.stream() << i << ',' << fmt_real(ms[i]) << '\n';
      } else {
        write_json(out.stream(), to_json(ms));
      }
      return 0;
    }
    if (*report) return run_report(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
