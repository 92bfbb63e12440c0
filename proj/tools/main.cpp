// Command-line front end: runs the experiment suites and writes CSV/JSON
// artifacts plus a manifest per run.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sympidx/floer_book.hpp"
#include "sympidx/format.hpp"
#include "sympidx/ham_flow.hpp"
#include "sympidx/magnetic.hpp"
#include "sympidx/orbit_finder.hpp"
#include "sympidx/path_index.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sympidx;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunContext {
  fs::path out_dir;
  json config_echo;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write_artifact(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    fs::path final_path = out_dir / name;
    fs::path tmp_path = out_dir / (name + ".tmp");
    {
      std::ofstream out(tmp_path, std::ios::binary);
      out << content;
    }
    fs::rename(tmp_path, final_path);
    artifacts.push_back(name);
  }

  void finish(const std::string& command, int exit_code,
              const std::string& error_name = "") {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config_echo;
    manifest["version"] = kVersion;
    const char* threads = std::getenv("SYMPIDX_THREADS");
    manifest["threads"] = threads ? std::atoi(threads) : 1;
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    manifest["wall_time_s"] = wall;
    manifest["artifacts"] = artifacts;
    manifest["status"] = exit_code == 0 ? "ok" : "failed";
    if (!error_name.empty()) manifest["error"] = error_name;
    fs::create_directories(out_dir);
    fs::path tmp = out_dir / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << manifest.dump(2) << "\n";
    }
    fs::rename(tmp, out_dir / "manifest.json");
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw InvalidParams("expected a comma-separated list");
  return out;
}

int run_index(const std::string& path_file, const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"path", path_file}};
  try {
    SympPath path = path_from_json(read_file(path_file));
    DeltaReport report = delta_tilde(path);
    std::cout << "delta_tilde = " << fmt17(report.delta) << "\n";
    std::string mu_note;
    try {
      int mu = conley_zehnder(path);
      std::cout << "mu_cz = " << mu << "\n";
    } catch (const Error& e) {
      mu_note = e.what();
      std::cout << "mu_cz = unavailable (" << mu_note << ")\n";
    }
    std::ostringstream csv;
    csv << "t,theta\r\n";
    for (size_t i = 0; i < path.size(); ++i)
      csv << fmt17(path.times[i]) << "," << fmt17(report.winding_trace[i])
          << "\r\n";
    ctx.write_artifact("winding.csv", csv.str());
    ctx.finish("index", 0);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("index", 2, "ParseError");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("index", 3, typeid(e).name());
    return 3;
  }
}

int run_sturm(int dim, double T, int trials, uint64_t seed,
              const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"dim", dim}, {"t", T}, {"trials", trials},
                     {"seed", seed}};
  try {
    if (dim < 2 || dim % 2 != 0)
      throw InvalidParams("sturm: dim must be even and >= 2");
    QuadHamiltonian H0{dim, [dim](double) { return Mat::Zero(dim, dim); }};
    QuadHamiltonian H1{dim, [dim](double) { return Mat::Identity(dim, dim); }};
    SturmReport base = sturm_compare(H0, H1, T, 8192);
    std::cout << "closed-form margin = " << fmt17(base.margin)
              << " (expected " << fmt17(dim / 2 * T / 3.14159265358979323846)
              << ")\n";

    std::ostringstream csv;
    csv << "trial,delta_h0,delta_h1,margin\r\n";
    csv << 0 << "," << fmt17(base.delta_h0) << "," << fmt17(base.delta_h1)
        << "," << fmt17(base.margin) << "\r\n";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (int t = 1; t <= trials; ++t) {
      Mat S0(dim, dim), G(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          G(i, j) = uni(rng);
          if (j >= i) S0(i, j) = S0(j, i) = uni(rng);
        }
      Mat S1 = S0 + G * G.transpose();
      QuadHamiltonian A{dim, [S0](double) { return S0; }};
      QuadHamiltonian B{dim, [S1](double) { return S1; }};
      SturmReport rep = sturm_compare(A, B, T, 2048);
      csv << t << "," << fmt17(rep.delta_h0) << "," << fmt17(rep.delta_h1)
          << "," << fmt17(rep.margin) << "\r\n";
    }
    ctx.write_artifact("sturm.csv", csv.str());
    ctx.finish("sturm", 0);
    return 0;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("sturm", 2, "InvalidParams");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("sturm", 3, typeid(e).name());
    return 3;
  }
}

int run_magnetic(const std::string& config_file, double r, double T, int steps,
                 uint64_t seed, const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"config", config_file}, {"r", r}, {"t", T},
                     {"steps", steps}, {"seed", seed}};
  try {
    MagneticSystem sys = magnetic_from_json(read_file(config_file));
    validate_system(sys);
    HamSystem ham = equations_of_motion(sys);
    Vec z0 = sample_level(sys, r, 1, seed).front();
    Trajectory traj = flow(ham, z0, T, steps, SignConvention::section4);
    std::cout << "energy drift = " << fmt17(traj.energy_drift) << "\n";
    std::cout << "arc length = " << fmt17(arc_length(traj)) << "\n";
    ctx.write_artifact("trajectory.csv", trajectory_to_csv(ham, traj));
    ctx.finish("magnetic", 0);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("magnetic", 2, "ParseError");
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("magnetic", 2, "InvalidParams");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("magnetic", 3, typeid(e).name());
    return 3;
  }
}

int run_growth(const std::string& config_file, double r, int iterates,
               int steps, const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"config", config_file}, {"r", r},
                     {"iterates", iterates}, {"steps", steps}};
  try {
    MagneticSystem sys = magnetic_from_json(read_file(config_file));
    validate_system(sys);
    HamSystem ham = equations_of_motion(sys);
    double B0 = sys.b_mean();
    OrbitRecord guess = oracle_orbit({B0, r});
    Vec z = guess.z0;
    z.tail<2>() *= std::exp(sys.u_at(z.head<2>()));
    ShootOptions opts;
    opts.steps_per_period = steps;
    OrbitRecord orbit = shoot_periodic(ham, z, guess.period, opts);
    std::vector<double> deltas = orbit_delta(ham, orbit, iterates, steps);
    std::vector<std::pair<double, double>> samples;
    for (int j = 0; j < iterates; ++j)
      samples.emplace_back((j + 1) * orbit.period, std::abs(deltas[j]));
    GrowthFit fit = growth_fit(samples);
    std::cout << "period = " << fmt17(orbit.period) << "\n";
    std::cout << "slope = " << fmt17(fit.slope)
              << "  intercept = " << fmt17(fit.intercept)
              << "  r_squared = " << fmt17(fit.r_squared) << "\n";

    std::ostringstream csv;
    csv << "j,T,delta,abs_delta\r\n";
    for (int j = 0; j < iterates; ++j)
      csv << (j + 1) << "," << fmt17((j + 1) * orbit.period) << ","
          << fmt17(deltas[j]) << "," << fmt17(std::abs(deltas[j])) << "\r\n";
    ctx.write_artifact("growth.csv", csv.str());

    json fj;
    fj["period"] = orbit.period;
    fj["residual"] = orbit.residual;
    fj["contractible"] = orbit.contractible;
    fj["slope"] = fit.slope;
    fj["intercept"] = fit.intercept;
    fj["r_squared"] = fit.r_squared;
    ctx.write_artifact("growth.json", fj.dump(2) + "\n");

    std::ostringstream plot;
    plot << "set datafile separator ','\n"
         << "set key left top\n"
         << "plot 'growth.csv' every ::1 using 2:4 with points title "
            "'|delta|', " << fmt17(fit.slope) << "*x-" << fmt17(fit.intercept)
         << " with lines title 'fit'\n";
    ctx.write_artifact("plot.gp", plot.str());
    ctx.finish("growth", 0);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("growth", 2, "ParseError");
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("growth", 2, "InvalidParams");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("growth", 3, typeid(e).name());
    return 3;
  }
}

int run_floer(int m, int q, double r2, double eps0, double lam_min,
              double lam_max, double lambda0, int samples,
              const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"m", m},       {"q", q},           {"r2", r2},
                     {"eps0", eps0}, {"lam_min", lam_min},
                     {"lam_max", lam_max}, {"lambda0", lambda0},
                     {"samples", samples}};
  try {
    floer::GeometryParams p;
    p.m = m;
    p.q = q;
    p.r = std::sqrt(r2);
    p.eps0 = eps0;
    p.lam_min = lam_min;
    p.lam_max = lam_max;
    floer::LevelScheme scheme = floer::derive_levels(p);
    floer::WindowReport window = floer::check_window(scheme, lambda0);
    floer::HomotopyReport homotopy = floer::homotopy_trace(p, samples);
    std::string scheme_json = floer::scheme_to_json(scheme, window);
    std::cout << scheme_json << "\n";
    std::cout << "homotopy margin = " << fmt17(homotopy.min_margin)
              << (homotopy.ok ? " (clear)" : " (violated)") << "\n";
    ctx.write_artifact("scheme.json", scheme_json + "\n");
    ctx.write_artifact("levels.csv", floer::levels_to_csv(scheme));
    ctx.finish("floer-levels", 0);
    return 0;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("floer-levels", 2, "InvalidParams");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("floer-levels", 3, typeid(e).name());
    return 3;
  }
}

int run_sweep(const std::string& config_file, const std::string& r_text,
              uint64_t seed, int iterates, int steps,
              const std::string& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.config_echo = {{"config", config_file}, {"r", r_text}, {"seed", seed},
                     {"iterates", iterates}, {"steps", steps}};
  try {
    MagneticSystem sys = magnetic_from_json(read_file(config_file));
    std::vector<double> r_list = parse_double_list(r_text);
    ShootOptions opts;
    opts.steps_per_period = steps;
    std::vector<SweepRow> rows =
        period_bound_sweep(sys, r_list, seed, iterates, opts);
    for (const auto& row : rows)
      std::cout << "r=" << fmt17(row.r) << " T=" << fmt17(row.period)
                << (row.converged ? "" : " (failed)") << "\n";
    ctx.write_artifact("sweep.csv", sweep_to_csv(rows, iterates));
    std::ostringstream plot;
    plot << "set datafile separator ','\n"
         << "plot 'sweep.csv' every ::1 using 1:2 with linespoints title "
            "'period vs r'\n";
    ctx.write_artifact("plot.gp", plot.str());
    ctx.finish("sweep", 0);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("sweep", 2, "ParseError");
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("sweep", 2, "InvalidParams");
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("sweep", 3, typeid(e).name());
    return 3;
  }
}

int run_validate(const std::string& config_file) {
  std::vector<std::string> violations;
  try {
    json cfg = json::parse(read_file(config_file));
    std::string command = cfg.value("command", "");
    json params = cfg.value("params", json::object());
    if (command.empty()) violations.push_back("config: missing command");
    if (command == "floer-levels") {
      double r2 = params.value("r2", 1.0);
      double eps0 = params.value("eps0", 0.05);
      if (!(eps0 <= r2 / 10.0 * (1.0 + 1e-12)))
        violations.push_back("floer-book: eps0 <= r^2/10 required");
      double lmin = params.value("lam_min", 1.0);
      double lmax = params.value("lam_max", 1.0);
      if (!(lmin > 0.0 && lmin <= lmax))
        violations.push_back("floer-book: need 0 < lam_min <= lam_max");
      if (params.value("m", 1) < 1 || params.value("q", 1) < 1)
        violations.push_back("floer-book: m, q must be positive integers");
    } else if (command == "magnetic" || command == "growth" ||
               command == "sweep") {
      if (params.contains("system")) {
        try {
          MagneticSystem sys = magnetic_from_json(params["system"].dump());
          validate_system(sys);
        } catch (const Error& e) {
          violations.push_back(std::string("magnetic: ") + e.what());
        }
      }
      if (params.contains("r") && params["r"].is_number() &&
          !(params["r"].get<double>() > 0.0))
        violations.push_back("magnetic: energy parameter r must be positive");
    } else if (command == "sturm") {
      int dim = params.value("dim", 2);
      if (dim < 2 || dim % 2 != 0)
        violations.push_back("path-index: dim must be even and >= 2");
    } else if (command != "index" && !command.empty()) {
      violations.push_back("config: unknown command '" + command + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (violations.empty()) {
    std::cout << "ok: no violations\n";
  } else {
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic path invariants and magnetic flow experiments"};
  app.require_subcommand(1);

  // index
  std::string idx_path, idx_out = "out-index";
  auto* idx = app.add_subcommand("index", "Winding invariant and index of a "
                                          "stored symplectic path");
  idx->add_option("--path", idx_path, "path JSON file")->required();
  idx->add_option("--out", idx_out, "output directory");

  // sturm
  int st_dim = 2, st_trials = 0;
  double st_t = 10.0;
  uint64_t st_seed = 1;
  std::string st_out = "out-sturm";
  auto* st = app.add_subcommand("sturm", "Comparison margins of quadratic "
                                         "Hamiltonian flows");
  st->add_option("--dim", st_dim, "phase dimension 2n");
  st->add_option("--t", st_t, "time horizon");
  st->add_option("--trials", st_trials, "random comparable pairs");
  st->add_option("--seed", st_seed, "RNG seed");
  st->add_option("--out", st_out, "output directory");

  // magnetic
  std::string mg_config, mg_out = "out-magnetic";
  double mg_r = 0.1, mg_t = 50.0;
  int mg_steps = 8192;
  uint64_t mg_seed = 1;
  auto* mg = app.add_subcommand("magnetic", "Integrate the twisted geodesic "
                                            "flow");
  mg->add_option("--config", mg_config, "magnetic system JSON")->required();
  mg->add_option("--r", mg_r, "energy level K = r^2");
  mg->add_option("--t", mg_t, "integration time");
  mg->add_option("--steps", mg_steps, "integration steps");
  mg->add_option("--seed", mg_seed, "RNG seed for the initial point");
  mg->add_option("--out", mg_out, "output directory");

  // growth
  std::string gr_config, gr_out = "out-growth";
  double gr_r = 0.05;
  int gr_iter = 8, gr_steps = 4096;
  auto* gr = app.add_subcommand("growth", "Winding growth along a periodic "
                                          "orbit and its iterates");
  gr->add_option("--config", gr_config, "magnetic system JSON")->required();
  gr->add_option("--r", gr_r, "energy level K = r^2");
  gr->add_option("--iterates", gr_iter, "number of orbit iterates");
  gr->add_option("--steps", gr_steps, "integration steps per period");
  gr->add_option("--out", gr_out, "output directory");

  // floer-levels
  int fl_m = 1, fl_q = 1, fl_samples = 100;
  double fl_r2 = 1.0, fl_eps0 = 0.1, fl_lmin = 1.0, fl_lmax = 1.0;
  double fl_lambda0 = std::numeric_limits<double>::infinity();
  std::string fl_out = "out-floer";
  auto* fl = app.add_subcommand("floer-levels", "Action/index level scheme "
                                                "and window checks");
  fl->add_option("--m", fl_m, "half-dimension of the critical submanifold");
  fl->add_option("--q", fl_q, "half-codimension");
  fl->add_option("--r2", fl_r2, "shell energy r^2");
  fl->add_option("--eps0", fl_eps0, "shell half-width");
  fl->add_option("--lam-min", fl_lmin, "smallest fiber Hessian eigenvalue");
  fl->add_option("--lam-max", fl_lmax, "largest fiber Hessian eigenvalue");
  fl->add_option("--lambda0", fl_lambda0, "sphere-area quantum (inf if none)");
  fl->add_option("--samples", fl_samples, "homotopy trace samples");
  fl->add_option("--out", fl_out, "output directory");

  // sweep
  std::string sw_config, sw_r = "0.2,0.1,0.05", sw_out = "out-sweep";
  uint64_t sw_seed = 1;
  int sw_iter = 4, sw_steps = 4096;
  auto* sw = app.add_subcommand("sweep", "Period bound sweep over energy "
                                         "levels");
  sw->add_option("--config", sw_config, "magnetic system JSON")->required();
  sw->add_option("--r", sw_r, "comma-separated r values");
  sw->add_option("--seed", sw_seed, "RNG seed");
  sw->add_option("--iterates", sw_iter, "orbit iterates per row");
  sw->add_option("--steps", sw_steps, "integration steps per period");
  sw->add_option("--out", sw_out, "output directory");

  // validate
  std::string va_config;
  auto* va = app.add_subcommand("validate", "Check an experiment config "
                                            "against module preconditions");
  va->add_option("--config", va_config, "experiment JSON")->required();

  CLI11_PARSE(app, argc, argv);

  if (idx->parsed()) return run_index(idx_path, idx_out);
  if (st->parsed()) return run_sturm(st_dim, st_t, st_trials, st_seed, st_out);
  if (mg->parsed())
    return run_magnetic(mg_config, mg_r, mg_t, mg_steps, mg_seed, mg_out);
  if (gr->parsed()) return run_growth(gr_config, gr_r, gr_iter, gr_steps,
                                      gr_out);
  if (fl->parsed())
    return run_floer(fl_m, fl_q, fl_r2, fl_eps0, fl_lmin, fl_lmax, fl_lambda0,
                     fl_samples, fl_out);
  if (sw->parsed())
    return run_sweep(sw_config, sw_r, sw_seed, sw_iter, sw_steps, sw_out);
  if (va->parsed()) return run_validate(va_config);
  return 0;
}
