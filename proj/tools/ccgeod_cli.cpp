// Command-line front end: geodesic shooting, boundary-data shooting,
// endpoint Jacobians, expansion fitting, figure data and the invariant
// battery.  Exit codes: 0 ok, 1 config error, 2 numeric failure,
// 3 invariant failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccgeod/asymptotics.hpp"
#include "ccgeod/checks.hpp"
#include "ccgeod/errors.hpp"
#include "ccgeod/figures.hpp"
#include "ccgeod/io.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"
#include "ccgeod/systems.hpp"

namespace {

using namespace ccgeod;

struct GlobalOptions {
  std::string chart_spec;
  std::string config_path;
  std::string out_dir = ".";
  unsigned seed = 1;
  IntegratorConfig cfg;
  nlohmann::json config;  // parsed --config document, may be null
};

ChartPtr resolve_chart(const GlobalOptions& g) {
  std::string spec = g.chart_spec;
  if (spec.empty() && g.config.contains("chart")) spec = g.config["chart"].get<std::string>();
  if (spec.empty()) throw domain_error("no chart given (use --chart or a config file)");
  if (std::filesystem::exists(spec) && spec.find('{') == std::string::npos)
    return load_chart_file(spec);
  return load_chart(spec);
}

Vec parse_doubles(const std::string& text) {
  Vec out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw domain_error("cannot parse '" + cell + "' as a number");
    }
  }
  if (out.empty()) throw domain_error("empty numeric list");
  return out;
}

// --p gives (x^1, ..., x^n, y) with y > 0 the h-distance from the boundary
Vec point_from_cli(const Vec& p, int dim) {
  if (static_cast<int>(p.size()) != dim)
    throw domain_error("--p needs " + std::to_string(dim) + " values: x1,...,xn,y");
  Vec x(dim);
  x[0] = -p.back();
  for (int a = 0; a < dim - 1; a++) x[a + 1] = p[a];
  return x;
}

// direction from angles against the coordinate frame: theta = 0 is the
// inward normal; for curved h supply --dir with raw components instead
Vec direction_from_angles(const Vec& theta, int dim) {
  const int n = dim - 1;
  if (static_cast<int>(theta.size()) != n)
    throw domain_error("--theta needs " + std::to_string(n) + " angle(s)");
  double mag = 0.0;
  for (double t : theta) mag += t * t;
  mag = std::sqrt(mag);
  Vec v(dim, 0.0);
  v[0] = std::cos(mag);
  const double s = (mag > 0.0) ? std::sin(mag) / mag : 0.0;
  for (int a = 0; a < n; a++) v[a + 1] = s * theta[a];
  return v;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

double config_or(const nlohmann::json& cfg, const std::string& key, double fallback) {
  return cfg.contains(key) ? cfg[key].get<double>() : fallback;
}

int run_shoot(const GlobalOptions& g, const Vec& p_cli, const Vec& theta_cli, const Vec& dir_cli) {
  ChartPtr chart = resolve_chart(g);
  const int dim = chart->dim();
  Vec p = point_from_cli(p_cli, dim);
  Vec v = dir_cli.empty() ? direction_from_angles(theta_cli, dim) : dir_cli;
  ShootResult r = endpoint_map(*chart, p, v, g.cfg);

  ensure_out_dir(g.out_dir);
  const std::string tau_csv = g.out_dir + "/shoot_tau.csv";
  const std::string arc_csv = g.out_dir + "/shoot_arclength.csv";
  write_trajectory_csv(*chart, r.trajectory, tau_csv);
  if (r.arclength_trajectory.size() > 0)
    write_trajectory_csv(*chart, r.arclength_trajectory, arc_csv);
  write_file_atomic(g.out_dir + "/shoot_result.json", shoot_result_json(r, tau_csv));

  if (!r.ok()) {
    std::cerr << "shoot failed: " << to_string(r.termination) << "\n";
    return 2;
  }
  std::cout << "endpoint:";
  for (double c : r.endpoint.x_prime) std::cout << ' ' << c;
  std::cout << "\nresult: " << g.out_dir << "/shoot_result.json\n";
  return 0;
}

int run_boundary_shoot(const GlobalOptions& g, const Vec& q_cli, const Vec& u_cli,
                       double tau_end, bool do_fit, const Vec& window_cli, bool nuisance) {
  ChartPtr chart = resolve_chart(g);
  const int n = chart->boundary_dim();
  if (static_cast<int>(q_cli.size()) != n) throw domain_error("--q needs n values");
  if (static_cast<int>(u_cli.size()) != n) throw domain_error("--u needs n values");
  if (tau_end == 0.0) tau_end = -chart->delta();

  IntegratorConfig cfg = g.cfg;
  if (do_fit && cfg.max_step == 0.0) cfg.max_step = 2.5e-4;  // sample density for the fit
  Trajectory traj = boundary_shoot(*chart, BoundaryPoint{q_cli}, u_cli, tau_end, cfg);

  ensure_out_dir(g.out_dir);
  const std::string csv = g.out_dir + "/boundary_shoot.csv";
  write_trajectory_csv(*chart, traj, csv);
  if (traj.termination == Termination::left_inbound_regime) {
    // the geodesic turned around before tau_end; the curve up to the turn
    // is still valid data
    std::cerr << "note: geodesic left the inbound regime at tau = "
              << traj.back_param() << "\n";
  } else if (traj.termination != Termination::reached_limit) {
    std::cerr << "boundary shoot failed: " << to_string(traj.termination) << "\n";
    return 2;
  }
  std::cout << "trajectory: " << csv << "\n";

  if (do_fit) {
    std::pair<double, double> window = default_fit_window();
    if (!window_cli.empty()) {
      if (window_cli.size() != 2) throw domain_error("--window needs tau_lo,tau_hi");
      window = {window_cli[0], window_cli[1]};
    }
    ExpansionFit fit = fit_expansion(traj, window, nuisance);
    write_file_atomic(g.out_dir + "/boundary_shoot_fit.json", expansion_fit_json(fit));
    std::cout << "O_fit:";
    for (double c : fit.obstruction) std::cout << ' ' << c;
    std::cout << "\nu_fit:";
    for (double c : fit.quadratic) std::cout << ' ' << c;
    std::cout << "\nfit: " << g.out_dir << "/boundary_shoot_fit.json\n";
  }
  return 0;
}

int run_expmap(const GlobalOptions& g, const Vec& p_cli, const Vec& theta_cli, const Vec& dir_cli,
               double fd_step) {
  ChartPtr chart = resolve_chart(g);
  const int dim = chart->dim();
  Vec p = point_from_cli(p_cli, dim);
  Vec v = dir_cli.empty() ? direction_from_angles(theta_cli, dim) : dir_cli;
  EndpointJacobian jac = endpoint_jacobian(*chart, p, v, g.cfg, fd_step);
  ensure_out_dir(g.out_dir);
  write_file_atomic(g.out_dir + "/expmap_jacobian.json", endpoint_jacobian_json(jac));
  std::cout << "smallest_singular_value: " << jac.smallest_singular_value << "\n";
  std::cout << "result: " << g.out_dir << "/expmap_jacobian.json\n";
  return 0;
}

int run_fit(const GlobalOptions& g, const std::string& traj_path, const Vec& window_cli,
            bool nuisance) {
  Trajectory traj = read_trajectory_csv(traj_path);
  std::pair<double, double> window = default_fit_window();
  if (!window_cli.empty()) {
    if (window_cli.size() != 2) throw domain_error("--window needs tau_lo,tau_hi");
    window = {window_cli[0], window_cli[1]};
  }
  ExpansionFit fit = fit_expansion(traj, window, nuisance);
  ensure_out_dir(g.out_dir);
  write_file_atomic(g.out_dir + "/fit.json", expansion_fit_json(fit));
  std::cout << expansion_fit_json(fit) << "\n";
  return 0;
}

int run_figures(const GlobalOptions& g, int id, const std::string& eps_text) {
  FigureOptions opts;
  opts.cfg = g.cfg;
  opts.out_dir = g.out_dir;
  if (!eps_text.empty()) {
    opts.epsilon_list.clear();
    for (double e : parse_doubles(eps_text)) opts.epsilon_list.push_back(e);
  }
  ensure_out_dir(g.out_dir);
  const auto files = figure_data(id, opts);
  for (const auto& f : files) std::cout << f << "\n";
  std::cout << files.size() << " files written\n";
  return 0;
}

int run_check(const GlobalOptions& g) {
  std::vector<CheckResult> results;
  if (!g.chart_spec.empty() || g.config.contains("chart")) {
    ChartPtr chart = resolve_chart(g);
    results = chart_integrity_checks(*chart);
  } else {
    results = run_invariant_battery(g.seed, g.cfg);
  }
  std::cout << check_report_table(results);
  ensure_out_dir(g.out_dir);
  write_file_atomic(g.out_dir + "/check_report.json", check_report_json(results));
  return all_passed(results) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesics of conformally compact metrics up to the conformal infinity"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string rel_tol_s, abs_tol_s, tau_min_s;
  app.add_option("--chart", g.chart_spec,
                 "chart spec: epsilon:<v>, warped_ah, inline JSON or a JSON file path");
  app.add_option("--config", g.config_path, "JSON config file with defaults");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "seed for randomized checks");
  app.add_option("--rel-tol", g.cfg.rel_tol, "integrator relative tolerance");
  app.add_option("--abs-tol", g.cfg.abs_tol, "integrator absolute tolerance");
  app.add_option("--tau-min", g.cfg.tau_min, "final-step threshold near tau = 0");

  std::string p_text, theta_text, dir_text, q_text, u_text, window_text, eps_text, traj_path;
  double tau_end = 0.0, fd_step = 1e-4;
  bool do_fit = false, no_nuisance = false;
  int figure_id = 1;

  CLI::App* shoot_cmd = app.add_subcommand("shoot", "geodesic shot toward the boundary");
  shoot_cmd->add_option("--p", p_text, "start point x1,...,xn,y");
  shoot_cmd->add_option("--theta", theta_text, "direction angle(s) off the inward normal");
  shoot_cmd->add_option("--dir", dir_text, "raw direction components dx0,dx1,...");

  CLI::App* bshoot_cmd =
      app.add_subcommand("boundary-shoot", "geodesic shot from a boundary point");
  bshoot_cmd->add_option("--q", q_text, "boundary point coordinates");
  bshoot_cmd->add_option("--u", u_text, "prescribed quadratic coefficient(s)");
  bshoot_cmd->add_option("--tau-end", tau_end, "final tau (< 0; default -delta)");
  bshoot_cmd->add_flag("--fit", do_fit, "fit the boundary expansion afterwards");
  bshoot_cmd->add_option("--window", window_text, "fit window tau_lo,tau_hi");
  bshoot_cmd->add_flag("--no-nuisance", no_nuisance, "drop the cubic nuisance terms");

  CLI::App* expmap_cmd = app.add_subcommand("expmap", "endpoint Jacobian over directions");
  expmap_cmd->add_option("--p", p_text, "start point x1,...,xn,y");
  expmap_cmd->add_option("--theta", theta_text, "base direction angle(s)");
  expmap_cmd->add_option("--dir", dir_text, "raw base direction components");
  expmap_cmd->add_option("--fd-step", fd_step, "finite-difference step in radians");

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the boundary expansion of a trajectory CSV");
  fit_cmd->add_option("--traj", traj_path, "tau-trajectory CSV path")->required();
  fit_cmd->add_option("--window", window_text, "fit window tau_lo,tau_hi");
  fit_cmd->add_flag("--no-nuisance", no_nuisance, "drop the cubic nuisance terms");

  CLI::App* figures_cmd = app.add_subcommand("figures", "emit figure data CSVs");
  figures_cmd->add_option("--id", figure_id, "figure id (1, 2 or 3)");
  figures_cmd->add_option("--eps", eps_text, "comma list of epsilon values");

  CLI::App* check_cmd =
      app.add_subcommand("check", "run the invariant battery (or chart integrity with --chart)");
  (void)check_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (!g.config_path.empty()) {
      std::ifstream in(g.config_path);
      if (!in) throw domain_error("cannot open config file '" + g.config_path + "'");
      in >> g.config;
      g.cfg.rel_tol = config_or(g.config, "rel_tol", g.cfg.rel_tol);
      g.cfg.abs_tol = config_or(g.config, "abs_tol", g.cfg.abs_tol);
      g.cfg.tau_min = config_or(g.config, "tau_min", g.cfg.tau_min);
      if (g.config.contains("out") && g.out_dir == ".")
        g.out_dir = g.config["out"].get<std::string>();
      if (g.config.contains("seed")) g.seed = g.config["seed"].get<unsigned>();
      auto fill = [&](const std::string& key, std::string& target) {
        if (target.empty() && g.config.contains(key)) {
          if (g.config[key].is_array()) {
            std::ostringstream os;
            for (size_t i = 0; i < g.config[key].size(); i++) {
              if (i) os << ',';
              os << g.config[key][i].get<double>();
            }
            target = os.str();
          } else if (g.config[key].is_number()) {
            target = std::to_string(g.config[key].get<double>());
          } else {
            target = g.config[key].get<std::string>();
          }
        }
      };
      fill("p", p_text);
      fill("theta", theta_text);
      fill("q", q_text);
      fill("u", u_text);
      fill("window", window_text);
      fill("eps", eps_text);
      if (g.config.contains("tau_end") && tau_end == 0.0)
        tau_end = g.config["tau_end"].get<double>();
      if (g.config.contains("fit")) do_fit = do_fit || g.config["fit"].get<bool>();
      if (g.config.contains("figure_id") && !figures_cmd->count("--id"))
        figure_id = g.config["figure_id"].get<int>();
    }
    g.cfg.validate();

    if (shoot_cmd->parsed())
      return run_shoot(g, parse_doubles(p_text), theta_text.empty() ? Vec{} : parse_doubles(theta_text),
                       dir_text.empty() ? Vec{} : parse_doubles(dir_text));
    if (bshoot_cmd->parsed())
      return run_boundary_shoot(g, parse_doubles(q_text), parse_doubles(u_text), tau_end, do_fit,
                                window_text.empty() ? Vec{} : parse_doubles(window_text),
                                !no_nuisance);
    if (expmap_cmd->parsed())
      return run_expmap(g, parse_doubles(p_text),
                        theta_text.empty() ? Vec{} : parse_doubles(theta_text),
                        dir_text.empty() ? Vec{} : parse_doubles(dir_text), fd_step);
    if (fit_cmd->parsed()) return run_fit(g, traj_path, window_text.empty() ? Vec{} : parse_doubles(window_text), !no_nuisance);
    if (figures_cmd->parsed()) return run_figures(g, figure_id, eps_text);
    if (check_cmd->parsed()) return run_check(g);
    return 1;
  } catch (const domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const fit_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const chart_integrity_error& e) {
    std::cerr << "chart integrity failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
