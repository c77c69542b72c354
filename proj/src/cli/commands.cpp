#include "expnls/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "expnls/coefficients.hpp"
#include "expnls/diagnostics.hpp"

namespace expnls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double laplacian_coefficient(const std::string& type) { return type == "rotating_bec2d" ? 0.5 : 1.0; }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const ErrorReport& r) {
  return {{"method", r.method},
          {"h", r.h},
          {"steps", r.steps},
          {"phase_error", nullable(r.phase_error)},
          {"mass_error", r.mass_error},
          {"energy_error", r.energy_error},
          {"seconds", r.seconds},
          {"precompute_seconds", r.precompute_seconds},
          {"total_iterations", r.total_iterations},
          {"max_iterations", r.max_iterations}};
}

void write_snapshot(const fs::path& dir, const std::string& label, std::size_t index, long step,
                    double t, const SpectralField& psi, bool rotating) {
  const std::string stem = "snapshot_" + label + "_" + std::to_string(index);
  {
    std::ofstream bin = open_output(dir / (stem + ".bin"));
    for (const auto& v : psi.values()) {
      const double rho = std::norm(v);
      unsigned char bytes[8];
      std::uint64_t bits;
      std::memcpy(&bits, &rho, 8);
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
      bin.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  std::ofstream txt = open_output(dir / (stem + ".txt"));
  const Grid& g = psi.grid();
  txt << "format float64-le density\n";
  txt << "layout row-major axis0-slowest\n";
  txt << "dims " << g.dims() << "\n";
  txt << "shape";
  for (const Axis& a : g.axes()) txt << ' ' << a.modes();
  txt << "\n";
  for (int a = 0; a < g.dims(); ++a)
    txt << (a == 0 ? "x " : "y ") << format_double(g.axis(a).left) << ' ' << format_double(g.axis(a).right) << "\n";
  txt << "time " << format_double(t) << "\n";
  txt << "step " << step << "\n";
  txt << "frame " << (rotating ? "rotating" : "lab") << "\n";
}

}  // namespace

int cmd_run(const RunConfig& cfg, const CommandOptions& opt) {
  if (cfg.h.size() != 1) throw ConfigError("key 'h': run takes a single step size");
  const double h = cfg.h.front();
  long steps = 0;
  try {
    steps = step_count(cfg.T, h);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("keys 'T'/'h': ") + e.what());
  }
  const Grid grid = build_grid(cfg);
  if (!cfg.snapshots.empty() && grid.dims() != 2) throw ConfigError("key 'snapshots' requires a 2-D problem");
  if (has(cfg.observers, "angular_momentum") && grid.dims() != 2)
    throw ConfigError("key 'observers': angular_momentum requires a 2-D problem");
  const Problem problem = build_problem(cfg);
  if (has(cfg.observers, "phase_error") && !problem.has_exact())
    throw ConfigError("key 'observers': phase_error needs a problem with an exact solution");

  fs::create_directories(opt.out);
  std::vector<long> snap_steps;
  for (double ts : cfg.snapshots) snap_steps.push_back(std::llround(ts / h));

  BuildOptions build{cfg.solver, opt.threads};
  json reports = json::array();
  for (const MethodSpec& method : cfg.methods) {
    const std::string label = method.label();
    if (opt.log) *opt.log << "run " << label << " h=" << format_double(h) << " steps=" << steps << std::endl;
    TrackOptions track;
    track.energy = has(cfg.observers, "energy");
    track.angular_momentum = has(cfg.observers, "angular_momentum");
    if (!snap_steps.empty()) {
      track.extra = [&](long n, double t, const SpectralField& psi) {
        for (std::size_t i = 0; i < snap_steps.size(); ++i)
          if (snap_steps[i] == n) write_snapshot(opt.out, label, i, n, t, psi, problem.rotating_frame);
      };
    }
    const ErrorReport rep = run_with_diagnostics(problem, method, cfg.T, h, build, track);

    std::ofstream csv = open_output(opt.out / ("run_" + label + ".csv"));
    csv << "step,t";
    if (has(cfg.observers, "mass")) csv << ",mass";
    if (track.energy) csv << ",energy";
    if (has(cfg.observers, "phase_error")) csv << ",phase_error";
    if (track.angular_momentum) csv << ",angular_momentum";
    csv << "\n";
    for (std::size_t n = 0; n < rep.times.size(); ++n) {
      csv << n << ',' << format_double(rep.times[n]);
      if (has(cfg.observers, "mass")) csv << ',' << format_double(rep.mass[n]);
      if (track.energy) csv << ',' << format_double(rep.energy[n]);
      if (has(cfg.observers, "phase_error")) csv << ',' << format_double(rep.phase[n]);
      if (track.angular_momentum) csv << ',' << format_double(rep.angular_momentum[n]);
      csv << "\n";
    }
    reports.push_back(report_json(rep));
  }
  json summary = {{"schema", "expnls.run/1"}, {"config", to_json(cfg)}, {"reports", reports}};
  open_output(opt.out / "summary.json") << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg, const CommandOptions& opt) {
  const Problem problem = build_problem(cfg);
  struct Cell {
    std::size_t method;
    double h;
    ErrorReport report;
    std::string status = "ok";
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m)
    for (double h : cfg.h) {
      const double n = std::max(1.0, std::round(cfg.T / h));
      cells.push_back({m, cfg.T / n, {}, "ok"});
    }

  BuildOptions build{cfg.solver, 1};
  unsigned workers = opt.threads > 0 ? static_cast<unsigned>(opt.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      const MethodSpec& method = cfg.methods[c.method];
      try {
        c.report = run_with_diagnostics(problem, method, cfg.T, c.h, build, {});
      } catch (const std::runtime_error& e) {
        c.status = "failed";
        c.report.method = method.label();
        c.report.h = c.h;
        c.report.phase_error = c.report.mass_error = c.report.energy_error = std::nan("");
      }
      if (opt.log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        *opt.log << method.label() << " h=" << format_double(c.h) << " " << c.status << std::endl;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  fs::create_directories(opt.out);
  std::ofstream csv = open_output(opt.out / "converge.csv");
  csv << "kind,method,h,steps,status,phase_error,mass_error,energy_error,slope,intercept,residual,points\n";
  bool failed = false;
  for (const Cell& c : cells) {
    failed = failed || c.status != "ok";
    csv << "cell," << cfg.methods[c.method].label() << ',' << format_double(c.h) << ','
        << step_count(cfg.T, c.h) << ',' << c.status << ',' << format_double(c.report.phase_error) << ','
        << format_double(c.report.mass_error) << ',' << format_double(c.report.energy_error) << ",,,,\n";
  }
  if (cfg.h.size() >= 3 && problem.has_exact()) {
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      std::vector<std::pair<double, double>> data;
      for (const Cell& c : cells)
        if (c.method == m && c.status == "ok") data.emplace_back(c.h, c.report.phase_error);
      csv << "order_phase," << cfg.methods[m].label() << ",,,";
      try {
        const OrderEstimate est = order_estimate(data);
        csv << "ok,,,," << format_double(est.slope) << ',' << format_double(est.intercept) << ','
            << format_double(est.residual) << ',' << est.points << "\n";
      } catch (const InvalidArgument&) {
        csv << "insufficient,,,,,,,0\n";
      }
    }
  }

  json timings = json::array();
  for (const Cell& c : cells)
    timings.push_back({{"method", cfg.methods[c.method].label()},
                       {"h", c.h},
                       {"status", c.status},
                       {"seconds", c.report.seconds},
                       {"precompute_seconds", c.report.precompute_seconds}});
  open_output(opt.out / "converge_timings.json")
      << json{{"schema", "expnls.converge/1"}, {"config", to_json(cfg)}, {"cells", timings}}.dump(2) << "\n";
  return failed ? kExitNumerical : kExitOk;
}

int cmd_coeffs(const RunConfig& cfg, const CommandOptions& opt) {
  const MethodSpec& method = cfg.methods.front();
  if (method.family == MethodFamily::Splitting)
    throw ConfigError("key 'methods[0]': coeffs needs an erk or lawson method");
  const double h = cfg.h.front();
  const Grid grid = build_grid(cfg);
  const double nu = laplacian_coefficient(cfg.problem.type);
  const CollocationNodes nodes = method.collocation_nodes();
  const auto alphas = erk_alpha_set(nodes);
  const CoefficientTables t = precompute_tables(grid, h, nu, nodes, alphas, opt.threads, true);
  const ButcherTableau tab = collocation_tableau(nodes);
  const RVector omega = laplacian_symbol(grid);
  const int s = nodes.s;

  fs::create_directories(opt.out);
  std::ofstream csv = open_output(opt.out / "coeffs.csv");
  csv << "index";
  for (int a = 0; a < grid.dims(); ++a) csv << ",m" << a;
  csv << ",omega,h_abs_omega,abs_argument,regime";
  for (int k = 1; k <= s; ++k)
    for (int l = 1; l <= s; ++l) csv << ",a_" << k << '_' << l << "_re,a_" << k << '_' << l << "_im";
  for (int k = 1; k <= s; ++k) csv << ",b_" << k << "_re,b_" << k << "_im";
  csv << "\n";
  static const char* regime_names[] = {"contour", "direct", "mixed"};
  const int m1 = grid.dims() == 2 ? grid.axis(1).modes() : 1;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    csv << p;
    if (grid.dims() == 1) {
      csv << ',' << grid.axis(0).mode_of_index(static_cast<int>(p));
    } else {
      csv << ',' << grid.axis(0).mode_of_index(static_cast<int>(p) / m1) << ','
          << grid.axis(1).mode_of_index(static_cast<int>(p) % m1);
    }
    csv << ',' << format_double(omega[p]) << ',' << format_double(h * std::abs(omega[p])) << ','
        << format_double(std::abs(h * nu * omega[p])) << ',' << regime_names[static_cast<int>(t.regime[p])];
    for (const auto& arr : t.a) csv << ',' << format_double(arr[p].real()) << ',' << format_double(arr[p].imag());
    for (const auto& arr : t.b) csv << ',' << format_double(arr[p].real()) << ',' << format_double(arr[p].imag());
    csv << "\n";
  }

  double dev = 0.0;
  for (int k = 0; k < s; ++k) {
    for (int l = 0; l < s; ++l) dev = std::max(dev, std::abs(t.A(k, l)[0] - tab.A(k, l)));
    dev = std::max(dev, std::abs(t.b[k][0] - tab.b[k]));
  }
  std::vector<std::size_t> order(grid.size());
  for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(omega[x]) < std::abs(omega[y]); });
  json crossing = nullptr, first_direct = nullptr;
  for (std::size_t p : order) {
    if (crossing.is_null() && h * std::abs(omega[p]) > 0.5)
      crossing = {{"index", p}, {"omega", omega[p]}, {"h_abs_omega", h * std::abs(omega[p])}};
    if (first_direct.is_null() && t.regime[p] != ModeRegime::Contour)
      first_direct = {{"index", p}, {"omega", omega[p]}, {"abs_argument", std::abs(h * nu * omega[p])}};
  }
  json check = {{"schema", "expnls.coeffs/1"},
                {"method", method.label()},
                {"h", h},
                {"nu", nu},
                {"mode0_max_deviation", dev},
                {"mode0_matches_tableau", dev <= 1e-13},
                {"contour_switch_radius", kContourSwitchRadius},
                {"first_mode_h_omega_above_half", crossing},
                {"first_non_contour_mode", first_direct}};
  open_output(opt.out / "coeffs_check.json") << check.dump(2) << "\n";
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Exponential integrators for periodic nonlinear Schrödinger equations"};
  app.require_subcommand(1);
  std::string config_path, out = ".";
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment configuration")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
  };
  CLI::App* run = app.add_subcommand("run", "integrate one configuration");
  CLI::App* converge = app.add_subcommand("converge", "sweep step sizes and estimate orders");
  CLI::App* coeffs = app.add_subcommand("coeffs", "dump coefficient tables");
  for (CLI::App* sub : {run, converge, coeffs}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CommandOptions opt{out, threads, &std::cerr};
  try {
    const RunConfig cfg = load_config(config_path);
    if (run->parsed()) return cmd_run(cfg, opt);
    if (converge->parsed()) return cmd_converge(cfg, opt);
    return cmd_coeffs(cfg, opt);
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace expnls::cli
