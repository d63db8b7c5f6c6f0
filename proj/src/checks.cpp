#include "ccgeod/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ccgeod/asymptotics.hpp"
#include "ccgeod/errors.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"
#include "ccgeod/systems.hpp"

namespace ccgeod {

namespace {

void push(std::vector<CheckResult>& out, const std::string& name, double measured,
          double tolerance) {
  out.push_back({name, measured, tolerance, measured <= tolerance});
}

// grid over the collar: x^0 in [-delta, 0], x' over the box
std::vector<Vec> collar_grid(const FermiChart& chart, int per_axis) {
  const int n = chart.boundary_dim();
  const auto box = chart.x_box();
  std::vector<Vec> pts;
  std::vector<int> idx(n + 1, 0);
  while (true) {
    Vec x(n + 1);
    x[0] = std::max(-chart.delta() * idx[0] / double(per_axis - 1), -chart.delta());
    for (int a = 0; a < n; a++)
      x[a + 1] = std::clamp(
          box[a].first + (box[a].second - box[a].first) * idx[a + 1] / double(per_axis - 1),
          box[a].first, box[a].second);
    pts.push_back(x);
    int a = 0;
    for (; a <= n; a++) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
    if (a > n) break;
  }
  return pts;
}

}  // namespace

std::vector<CheckResult> chart_integrity_checks(const FermiChart& chart) {
  std::vector<CheckResult> out;
  const std::string tag = chart.id();
  const auto grid = collar_grid(chart, 10);

  double min_eig = 1e300;
  double worst_rho_sign = 0.0;   // positive when a rho sign violation is found
  double worst_rho_zero = 0.0;   // |rho| on the boundary face
  double min_kappa = 1e300;
  double worst_ratio = 0.0;      // |rho/(-kappa x0) - 1| at x0 = -1e-6
  for (const auto& x : grid) {
    const Vec evals = sym_eigenvalues(chart.h(x));
    min_eig = std::min(min_eig, evals[0]);
    const double r = chart.rho(x);
    if (x[0] == 0.0) {
      worst_rho_zero = std::max(worst_rho_zero, std::abs(r));
      const Vec x_prime(x.begin() + 1, x.end());
      const double k = -chart.drho_normal(x);
      min_kappa = std::min(min_kappa, k);
      if (k > 0.0) {
        Vec probe = x;
        probe[0] = -1e-6;
        const double ratio = chart.rho(probe) / (-k * probe[0]);
        worst_ratio = std::max(worst_ratio, std::abs(ratio - 1.0));
      }
    } else if (r <= 0.0) {
      worst_rho_sign = std::max(worst_rho_sign, 1.0);
    }
  }
  push(out, tag + ": h SPD (min eigenvalue shortfall)", min_eig > 0.0 ? 0.0 : 1.0 - min_eig, 0.0);
  push(out, tag + ": rho > 0 in the interior", worst_rho_sign, 0.0);
  push(out, tag + ": rho = 0 on the boundary", worst_rho_zero, 1e-12);
  push(out, tag + ": kappa > 0 on the boundary", min_kappa > 0.0 ? 0.0 : 1.0, 0.0);
  push(out, tag + ": rho/(-kappa x0) - 1 at x0 = -1e-6", worst_ratio, 1e-4);
  return out;
}

std::vector<CheckResult> run_invariant_battery(unsigned seed, const IntegratorConfig& cfg) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::pair<std::string, ChartPtr>> charts = {
      {"g0", make_epsilon_chart({0.0})},
      {"g0.5", make_epsilon_chart({0.5})},
      {"g1", make_epsilon_chart({1.0})},
      {"warped", make_warped_ah_chart()},
  };

  for (const auto& [tag, chart] : charts) {
    for (auto& c : chart_integrity_checks(*chart)) out.push_back(c);

    // transport inverse pair over sampled interior points
    double worst_ml = 0.0;
    for (int s = 0; s < 25; s++) {
      Vec x(2);
      x[0] = -chart->delta() * (0.05 + 0.95 * unit(rng));
      const auto box = chart->x_box();
      x[1] = box[0].first + (box[0].second - box[0].first) * unit(rng);
      const TransportMatrices tm = transport_matrices(*chart, x);
      worst_ml = std::max(worst_ml, (tm.M * tm.L - Mat::identity(1)).norm_inf());
    }
    push(out, tag + ": ||M L - I||", worst_ml, 1e-12);

    // interior k_covector converges to the boundary value
    double worst_k = 0.0;
    for (int s = 0; s < 5; s++) {
      const auto box = chart->x_box();
      const double xp = box[0].first + (box[0].second - box[0].first) * unit(rng);
      const Vec kb = k_covector(*chart, {0.0, xp});
      const Vec ki = k_covector(*chart, {-1e-6, xp});
      worst_k = std::max(worst_k, std::abs(ki[0] - kb[0]));
    }
    push(out, tag + ": k_covector boundary limit at x0 = -1e-6", worst_k, 1e-4);

    // remainder bounded and stable under eps_cut halving
    double sup_e = 0.0, worst_drift = 0.0;
    for (const auto& x : collar_grid(*chart, 10)) {
      const Vec e1 = smooth_remainder(*chart, x, 1e-4);
      const Vec e2 = smooth_remainder(*chart, x, 5e-5);
      sup_e = std::max(sup_e, norm2(e1));
      worst_drift = std::max(worst_drift, norm2(axpy(-1.0, e2, e1)) / (1.0 + norm2(e1)));
    }
    push(out, tag + ": remainder stability under eps_cut halving", worst_drift, 1e-3);
    push(out, tag + ": remainder bounded", std::isfinite(sup_e) ? 0.0 : 1.0, 0.0);
  }

  // obstruction values on the family
  {
    const BoundaryPoint q{{0.3}};
    push(out, "g0: |obstruction|", norm2(obstruction(*charts[0].second, q)), 1e-10);
    push(out, "g0.5: |obstruction + 0.25|",
         std::abs(obstruction(*charts[1].second, q)[0] + 0.25), 1e-9);
    push(out, "g1: |obstruction + 0.5|",
         std::abs(obstruction(*charts[2].second, q)[0] + 0.5), 1e-9);
    push(out, "warped: |obstruction|", norm2(obstruction(*charts[3].second, q)), 1e-12);
  }

  // energy conservation and the zeta0 limit along a g1 shot
  {
    ChartPtr g1 = charts[2].second;
    const Vec p{-1.0, 0.0};
    const Vec v{std::cos(0.4), std::sin(0.4)};
    ShootResult r = endpoint_map(*g1, p, v, cfg);
    if (!r.ok()) {
      push(out, "g1: shot completes", 1.0, 0.0);
    } else {
      double drift = 0.0;
      for (size_t i = 0; i < r.trajectory.size(); i++)
        drift = std::max(drift, std::abs(energy(*g1, r.trajectory.tau_state(i)) - 1.0));
      push(out, "g1: |2H - 1| along the tau trajectory", drift, 1e-9);

      double worst_zeta = 0.0;
      for (size_t i = 0; i < r.arclength_trajectory.size(); i++) {
        const CotangentState s = r.arclength_trajectory.cotangent_state(i);
        const double rho = g1->rho(s.x);
        if (rho < 1e-4) worst_zeta = std::max(worst_zeta, 1.0 - s.zeta0(rho));
      }
      for (size_t i = 0; i < r.trajectory.size(); i++) {
        const TauState s = r.trajectory.tau_state(i);
        if (s.tau < 0.0 && g1->rho(s.coordinates()) < 1e-4)
          worst_zeta = std::max(worst_zeta, 1.0 - s.w0);
      }
      push(out, "g1: 1 - zeta0 once rho < 1e-4", worst_zeta, 1e-3);
    }
  }

  // flow Lipschitz bound on g1
  {
    ChartPtr g1 = charts[2].second;
    std::vector<TauStatePair> pairs;
    for (int s = 0; s < 10; s++) {
      TauStatePair pr;
      for (TauState* st : {&pr.first, &pr.second}) {
        st->tau = -0.2;
        st->x_prime = {0.4 * unit(rng) - 0.2};
        st->w0 = 0.9 + 0.2 * unit(rng);
        st->w = {unit(rng) - 0.5};
      }
      pairs.push_back(pr);
    }
    RhsFn rhs = make_tau_rhs(*g1);
    const double c_est =
        estimate_rhs_lipschitz(rhs, -0.2, 0.0, {-0.3, 0.6, -0.7}, {0.3, 1.2, 0.7}, 1000, seed);
    const double len = std::min(0.5 / c_est, 0.2);
    LipschitzReport rep = flow_lipschitz_check(*g1, -0.2, len, pairs, cfg);
    push(out, "g1: flow displacement ratio (<= e)", rep.max_ratio, std::exp(1.0));
  }

  // synthetic expansion fit recovers exact coefficients
  {
    Trajectory traj;
    traj.parameter_kind = ParamKind::tau;
    traj.boundary_dim = 1;
    traj.chart_id = "synthetic";
    traj.termination = Termination::reached_boundary;
    const double a = -0.5, b = 0.3;
    for (int i = 0; i <= 400; i++) {
      const double tau = -0.02 + 0.02 * i / 400.0;
      traj.params.push_back(tau);
      const double lg = (tau < 0.0) ? std::log(-tau) : 0.0;
      traj.states.push_back({a * tau * tau * lg + b * tau * tau, 1.0, 0.0});
    }
    ExpansionFit fit = fit_expansion(traj, default_fit_window(), false);
    const double err = std::max(std::abs(fit.obstruction[0] - a), std::abs(fit.quadratic[0] - b));
    push(out, "synthetic fit recovers (a, b)", err, 1e-10);
  }

  return out;
}

std::string check_report_json(const std::vector<CheckResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"name", r.name},
                   {"measured", r.measured},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  }
  nlohmann::json j;
  j["checks"] = arr;
  j["all_passed"] = all_passed(results);
  return j.dump(2);
}

std::string check_report_table(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-60s measured=%-12.4g tol=%-10.3g %s\n", r.name.c_str(),
                  r.measured, r.tolerance, r.pass ? "PASS" : "FAIL");
    os << buf;
  }
  os << (all_passed(results) ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");
  return os.str();
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace ccgeod
