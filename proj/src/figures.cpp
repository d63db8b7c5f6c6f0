#include "ccgeod/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccgeod/errors.hpp"
#include "ccgeod/io.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"

namespace ccgeod {

std::vector<double> geometric_grid(double y_hi, double y_lo, int points_per_decade) {
  const double decades = std::log10(y_hi / y_lo);
  const int count = std::max(2, static_cast<int>(std::round(decades * points_per_decade)) + 1);
  std::vector<double> grid(count);
  for (int i = 0; i < count; i++)
    grid[i] = y_hi * std::pow(y_lo / y_hi, i / double(count - 1));
  return grid;
}

std::vector<std::pair<double, double>> resample_curve(const Trajectory& arclength_part,
                                                      const Trajectory& tau_part,
                                                      const std::vector<double>& y_grid) {
  // collect (y, x) with y = -x^0 from both phases, sorted by decreasing y
  std::vector<std::pair<double, double>> samples;
  for (size_t i = 0; i < arclength_part.size(); i++) {
    const CotangentState s = arclength_part.cotangent_state(i);
    samples.push_back({-s.x[0], s.x[1]});
  }
  for (size_t i = 0; i < tau_part.size(); i++) {
    const TauState s = tau_part.tau_state(i);
    samples.push_back({-s.tau, s.x_prime[0]});
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                samples.end());
  if (samples.size() < 2) throw domain_error("resample_curve: trajectory too short");

  // Slopes dx/dy by weighted central differences; exact for quadratics, so
  // the y^2-scale bottom of the curves survives the geometric sample
  // spacing.
  const size_t m = samples.size();
  std::vector<double> slope(m);
  for (size_t i = 0; i < m; i++) {
    if (i == 0) {
      slope[i] = (samples[1].second - samples[0].second) /
                 (samples[1].first - samples[0].first);
    } else if (i + 1 == m) {
      slope[i] = (samples[m - 1].second - samples[m - 2].second) /
                 (samples[m - 1].first - samples[m - 2].first);
    } else {
      const double h0 = samples[i].first - samples[i - 1].first;
      const double h1 = samples[i + 1].first - samples[i].first;
      const double d0 = (samples[i].second - samples[i - 1].second) / h0;
      const double d1 = (samples[i + 1].second - samples[i].second) / h1;
      slope[i] = (d0 * h1 + d1 * h0) / (h0 + h1);
    }
  }

  std::vector<std::pair<double, double>> out;
  const double y_max = samples.front().first;
  const double y_min = samples.back().first;
  for (double y : y_grid) {
    if (y > y_max + 1e-12 || y < y_min - 1e-12) continue;
    const double yc = std::clamp(y, y_min, y_max);
    auto it = std::lower_bound(samples.begin(), samples.end(), yc,
                               [](const auto& s, double v) { return s.first > v; });
    if (it == samples.begin()) it++;
    if (it == samples.end()) it--;
    const size_t i1 = static_cast<size_t>(it - samples.begin());  // lower y
    const size_t i0 = i1 - 1;                                     // higher y
    const double h = samples[i1].first - samples[i0].first;
    double x;
    if (h == 0.0) {
      x = samples[i0].second;
    } else {
      const double t = (yc - samples[i0].first) / h;
      const double t2 = t * t, t3 = t2 * t;
      x = (2 * t3 - 3 * t2 + 1) * samples[i0].second + (t3 - 2 * t2 + t) * h * slope[i0] +
          (-2 * t3 + 3 * t2) * samples[i1].second + (t3 - t2) * h * slope[i1];
    }
    out.push_back({y, x});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string curve_csv(const std::vector<std::pair<double, double>>& samples, int figure_id,
                      double epsilon, const std::string& param_name, double param_value,
                      const IntegratorConfig& cfg) {
  std::ostringstream os;
  os << "# ccgeod figure data v1\n";
  os << "# figure: " << figure_id << "\n";
  os << "# epsilon: " << fmt_short(epsilon) << "\n";
  os << "# " << param_name << ": " << fmt(param_value) << "\n";
  os << "# rel_tol: " << fmt_short(cfg.rel_tol) << " abs_tol: " << fmt_short(cfg.abs_tol)
     << " tau_min: " << fmt_short(cfg.tau_min) << "\n";
  os << "# version: 0.1.0\n";
  os << "y,x\n";
  for (const auto& [y, x] : samples) os << fmt(y) << ',' << fmt(x) << "\n";
  return os.str();
}

const double kFigureAngles[5] = {-M_PI / 4, -M_PI / 8, 0.0, M_PI / 8, M_PI / 4};
const double kFigureUs[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};

}  // namespace

std::vector<std::string> figure_data(int figure_id, const FigureOptions& options) {
  if (figure_id < 1 || figure_id > 3)
    throw domain_error("figure_data: figure id must be 1, 2 or 3");
  std::vector<std::string> written;
  const std::string dir = options.out_dir.empty() ? "." : options.out_dir;

  auto path_of = [&dir](const std::string& name) { return dir + "/" + name; };

  if (figure_id == 1) {
    const std::vector<double> grid = geometric_grid(1.0, 1e-4);
    for (double eps : options.epsilon_list) {
      ChartPtr chart = make_epsilon_chart({eps});
      for (int k = 0; k < 5; k++) {
        const double theta = kFigureAngles[k];
        const Vec p{-1.0, 0.0};
        const Vec v{std::cos(theta), std::sin(theta)};
        ShootResult r = endpoint_map(*chart, p, v, options.cfg);
        if (!r.ok())
          throw numeric_error("figure 1 shot failed: " + to_string(r.termination));
        auto samples = resample_curve(r.arclength_trajectory, r.trajectory, grid);
        std::ostringstream name;
        name << "fig1_eps" << fmt_short(eps) << "_dir" << k << ".csv";
        write_file_atomic(path_of(name.str()),
                          curve_csv(samples, 1, eps, "theta", theta, options.cfg));
        written.push_back(path_of(name.str()));
      }
    }
    return written;
  }

  if (figure_id == 2) {
    const std::vector<double> grid = geometric_grid(1.0, 1e-4);
    for (double eps : options.epsilon_list) {
      ChartPtr chart = make_epsilon_chart({eps});
      for (int k = 0; k < 5; k++) {
        const double u = kFigureUs[k];
        Trajectory traj =
            boundary_shoot(*chart, BoundaryPoint{{0.0}}, {u}, -chart->delta(), options.cfg);
        // steep curves legitimately turn around before tau_end
        if (traj.termination != Termination::reached_limit &&
            traj.termination != Termination::left_inbound_regime)
          throw numeric_error("figure 2 shot failed: " + to_string(traj.termination));
        Trajectory empty;
        empty.parameter_kind = ParamKind::arclength;
        empty.boundary_dim = 1;
        auto samples = resample_curve(empty, traj, grid);
        std::ostringstream name;
        name << "fig2_eps" << fmt_short(eps) << "_u" << k << ".csv";
        write_file_atomic(path_of(name.str()),
                          curve_csv(samples, 2, eps, "u", u, options.cfg));
        written.push_back(path_of(name.str()));
      }
    }
    return written;
  }

  // figure 3: the eps = 1 boundary shots plus their asymptotes
  const std::vector<double> grid = geometric_grid(1e-1, 1e-4);
  ChartPtr chart = make_epsilon_chart({1.0});
  for (int k = 0; k < 5; k++) {
    const double u = kFigureUs[k];
    Trajectory traj =
        boundary_shoot(*chart, BoundaryPoint{{0.0}}, {u}, -chart->delta(), options.cfg);
    if (traj.termination != Termination::reached_limit &&
        traj.termination != Termination::left_inbound_regime)
      throw numeric_error("figure 3 shot failed: " + to_string(traj.termination));
    Trajectory empty;
    empty.parameter_kind = ParamKind::arclength;
    empty.boundary_dim = 1;
    auto samples = resample_curve(empty, traj, grid);
    std::ostringstream name;
    name << "fig3_u" << k << ".csv";
    write_file_atomic(path_of(name.str()), curve_csv(samples, 3, 1.0, "u", u, options.cfg));
    written.push_back(path_of(name.str()));

    std::vector<std::pair<double, double>> asym;
    for (double y : grid) asym.push_back({y, -0.5 * y * y * std::log(y) + u * y * y});
    std::ostringstream aname;
    aname << "fig3_asymptote_u" << k << ".csv";
    write_file_atomic(path_of(aname.str()),
                      curve_csv(asym, 3, 1.0, "asymptote_u", u, options.cfg));
    written.push_back(path_of(aname.str()));
  }
  return written;
}

}  // namespace ccgeod
