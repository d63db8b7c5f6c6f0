#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ccgeod/asymptotics.hpp"
#include "ccgeod/errors.hpp"
#include "ccgeod/figures.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"
#include "ccgeod/systems.hpp"
#include "oracles.hpp"

using namespace ccgeod;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// (y, x) rows of a figure CSV
std::vector<std::pair<double, double>> read_curve(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'y') continue;
    const auto comma = line.find(',');
    rows.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return rows;
}

std::string temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("ccgeod_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_SUITE("model_charts") {

TEST_CASE("hyperbolic endpoint oracle") {
  CHECK(hyperbolic_endpoint_oracle(0.3, 2.0, 0.0) == doctest::Approx(0.3));
  CHECK(hyperbolic_endpoint_oracle(0.0, 1.0, M_PI / 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hyperbolic_endpoint_oracle(0.0, 1.0, M_PI / 4) ==
        doctest::Approx(0.41421356237309503).epsilon(1e-12));
  CHECK_THROWS_AS(hyperbolic_endpoint_oracle(0.0, -1.0, 0.1), domain_error);
}

TEST_CASE("epsilon chart encodes the half-plane family") {
  ChartPtr c = make_epsilon_chart({0.7});
  CHECK(c->dim() == 2);
  CHECK(c->rho({-0.5, 0.2}) == doctest::Approx(0.5 * std::exp(0.14)));
  CHECK(c->h({-0.5, 0.2})(0, 0) == 1.0);
  CHECK(kappa(*c, {0.2}) == doctest::Approx(std::exp(0.14)));
  CHECK_THROWS_AS(make_epsilon_chart({0.7, 1.5}), domain_error);
}

TEST_CASE("warped chart values and its smooth boundary shots") {
  ChartPtr w = make_warped_ah_chart();
  CHECK(transport_matrices(*w, {-0.5, 0.0}).M(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(obstruction(*w, BoundaryPoint{{0.8}})[0]) < 1e-14);

  IntegratorConfig cfg;
  cfg.max_step = 2.5e-4;
  const Trajectory t = boundary_shoot(*w, BoundaryPoint{{0.0}}, {0.4}, -0.5, cfg);
  REQUIRE(t.termination == Termination::reached_limit);
  const ExpansionFit fit = fit_expansion(t, default_fit_window(), true);
  CHECK(std::abs(fit.obstruction[0]) <= 1e-4);
}

TEST_CASE("polynomial chart reproduces the warped chart") {
  // h = (1 + x0)^2 = 1 + 2 x0 + x0^2, rho = -x0
  PolynomialChartSpec spec;
  spec.dim = 2;
  spec.delta = 0.9;
  spec.x_box = {{-2.0, 2.0}};
  spec.h = {{{{1.0, {0, 0}}, {2.0, {1, 0}}, {1.0, {2, 0}}}}};
  spec.rho = {{-1.0, {1, 0}}};
  ChartPtr poly = make_polynomial_chart(spec);
  ChartPtr w = make_warped_ah_chart();

  for (double x0 : {-0.8, -0.3, 0.0}) {
    const Vec x{x0, 0.5};
    CHECK(poly->rho(x) == doctest::Approx(w->rho(x)));
    CHECK(poly->h(x)(0, 0) == doctest::Approx(w->h(x)(0, 0)));
    CHECK(poly->dh_normal(x)(0, 0) == doctest::Approx(w->dh_normal(x)(0, 0)));
    CHECK(transport_generator(*poly, x)(0, 0) ==
          doctest::Approx(transport_generator(*w, x)(0, 0)).epsilon(1e-11));
  }
  CHECK(kappa(*poly, {0.3}) == doctest::Approx(1.0));
}

TEST_CASE("polynomial analytic boundary data matches the difference fallback") {
  // same metric data as the curved oracle chart, entered as polynomials
  PolynomialChartSpec spec;
  spec.dim = 2;
  spec.delta = 0.5;
  spec.x_box = {{-1.5, 1.5}};
  // (1 + 0.3 x0 + 0.1 x0 x1)^2 expanded
  spec.h = {{{{1.0, {0, 0}},
              {0.6, {1, 0}},
              {0.2, {1, 1}},
              {0.09, {2, 0}},
              {0.06, {2, 1}},
              {0.01, {2, 2}}}}};
  spec.rho = {{-1.0, {1, 0}}, {-0.2, {1, 1}}, {-0.1, {2, 0}}};
  ChartPtr poly = make_polynomial_chart(spec);
  testing::CurvedTestChart fd_chart;

  for (double xp : {-1.2, 0.0, 0.9}) {
    const BoundaryData analytic = boundary_data(*poly, {xp});
    const BoundaryData fd = boundary_data(fd_chart, {xp});
    CHECK(analytic.kappa == doctest::Approx(fd.kappa).epsilon(1e-12));
    CHECK(analytic.kappa_grad[0] == doctest::Approx(fd.kappa_grad[0]).epsilon(1e-8));
    CHECK(analytic.log_coeff[0] == doctest::Approx(fd.log_coeff[0]).epsilon(1e-8));
    CHECK(analytic.log_coeff_grad(0, 0) ==
          doctest::Approx(fd.log_coeff_grad(0, 0)).epsilon(1e-6));
  }

  // and the tau systems agree on the two descriptions of the same metric
  TauState s;
  s.tau = -0.35;
  s.x_prime = {0.4};
  s.w0 = 0.9;
  s.w = {0.6};
  const TauRhs a = rhs_tau_regular(*poly, s);
  const TauRhs b = rhs_tau_regular(fd_chart, s);
  CHECK(a.dx_prime[0] == doctest::Approx(b.dx_prime[0]).epsilon(1e-9));
  CHECK(a.dw0 == doctest::Approx(b.dw0).epsilon(1e-9));
  CHECK(a.dw[0] == doctest::Approx(b.dw[0]).epsilon(1e-7));
}

TEST_CASE("chart loading from documents and shorthands") {
  ChartPtr a = load_chart("epsilon:0.5");
  CHECK(kappa(*a, {1.0}) == doctest::Approx(std::exp(0.5)));
  ChartPtr b = load_chart(R"({"type":"epsilon_family","epsilon":1.0,"delta":0.9,"x_box":[-2,2]})");
  CHECK(kappa(*b, {0.0}) == 1.0);
  ChartPtr w = load_chart(R"({"type":"warped_ah"})");
  CHECK(w->id() == "warped_ah");
  ChartPtr p = load_chart(
      R"({"type":"polynomial","dim":2,"delta":0.9,"x_box":[[-1,1]],
          "h":[[[{"c":1.0,"p":[0,0]}]]],"rho":[{"c":-1.0,"p":[1,0]}]})");
  CHECK(p->rho({-0.25, 0.0}) == doctest::Approx(0.25));

  CHECK_THROWS_AS(load_chart("epsilon:nope"), domain_error);
  CHECK_THROWS_AS(load_chart(R"({"type":"unknown_thing"})"), domain_error);
  CHECK_THROWS_AS(load_chart("not json at all {"), domain_error);
  // degree above 6
  CHECK_THROWS_AS(load_chart(
                      R"({"type":"polynomial","dim":2,"delta":0.9,"x_box":[[-1,1]],
                          "h":[[[{"c":1.0,"p":[0,0]}]]],"rho":[{"c":-1.0,"p":[7,0]}]})"),
                  domain_error);
  // rho not vanishing on the boundary face
  CHECK_THROWS_AS(load_chart(
                      R"({"type":"polynomial","dim":2,"delta":0.9,"x_box":[[-1,1]],
                          "h":[[[{"c":1.0,"p":[0,0]}]]],"rho":[{"c":1.0,"p":[0,0]}]})"),
                  chart_integrity_error);
}

TEST_CASE("figure 1 endpoints and determinism") {
  const std::string dir = temp_dir("fig1");
  FigureOptions opts;
  opts.epsilon_list = {0.0};
  opts.out_dir = dir;
  const auto files = figure_data(1, opts);
  CHECK(files.size() == 5);

  // endpoints of the eps = 0 fan: 0 and +- tan(pi/16), +- tan(pi/8),
  // read off the deepest sample of each curve (y = 1e-4)
  const double expected[5] = {-std::tan(M_PI / 8), -std::tan(M_PI / 16), 0.0,
                              std::tan(M_PI / 16), std::tan(M_PI / 8)};
  for (int k = 0; k < 5; k++) {
    const auto rows = read_curve(files[k]);
    REQUIRE(rows.size() > 100);
    CHECK(rows.front().first == doctest::Approx(1.0));
    CHECK(rows.back().first == doctest::Approx(1e-4));
    CHECK(std::abs(rows.back().second - expected[k]) < 1e-5);
  }

  // byte-identical rerun
  const std::string before = slurp(files[2]);
  figure_data(1, opts);
  CHECK(slurp(files[2]) == before);
}

TEST_CASE("figure 2 hyperbolic curves carry their quadratic coefficients") {
  const std::string dir = temp_dir("fig2");
  FigureOptions opts;
  opts.epsilon_list = {0.0};
  opts.out_dir = dir;
  const auto files = figure_data(2, opts);
  CHECK(files.size() == 5);
  const double us[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int k = 0; k < 5; k++) {
    const auto rows = read_curve(files[k]);
    REQUIRE(!rows.empty());
    // x/y^2 tends to u; check at the small-y end
    for (const auto& [y, x] : rows) {
      if (y > 2e-3) continue;
      if (us[k] == 0.0) {
        CHECK(std::abs(x) < 1e-8);
      } else {
        CHECK(x / (y * y) == doctest::Approx(us[k]).epsilon(2e-2));
      }
    }
  }
}

TEST_CASE("figure 3 curves stay near their asymptotes") {
  const std::string dir = temp_dir("fig3");
  FigureOptions opts;
  opts.out_dir = dir;
  const auto files = figure_data(3, opts);
  CHECK(files.size() == 10);

  // u = 0 curve (index 2): residual against -y^2 log(y)/2 divided by y^2
  // stays bounded
  const auto curve = read_curve(files[4]);
  const auto asym = read_curve(files[5]);
  REQUIRE(curve.size() == asym.size());
  for (size_t i = 0; i < curve.size(); i++) {
    const double y = curve[i].first;
    CHECK(std::abs(curve[i].second - asym[i].second) / (y * y) <= 1.5);
  }
}

TEST_CASE("figure id validation") {
  FigureOptions opts;
  CHECK_THROWS_AS(figure_data(0, opts), domain_error);
  CHECK_THROWS_AS(figure_data(4, opts), domain_error);
}

}  // TEST_SUITE

namespace {

// diagonal two-dimensional boundary: exercises every n = 2 index path while
// the transport family stays commuting
PolynomialChartSpec two_boundary_spec() {
  PolynomialChartSpec spec;
  spec.dim = 3;
  spec.delta = 0.5;
  spec.x_box = {{-1.0, 1.0}, {-1.0, 1.0}};
  const Polynomial h11 = {{1.0, {0, 0, 0}}, {0.2, {1, 0, 0}}, {0.1, {1, 1, 0}}};
  const Polynomial h22 = {{1.0, {0, 0, 0}}, {0.3, {1, 0, 1}}};
  const Polynomial zero = {};
  spec.h = {{h11, zero}, {zero, h22}};
  spec.rho = {{-1.0, {1, 0, 0}}, {-0.1, {1, 1, 0}}, {-0.05, {1, 0, 1}}};
  return spec;
}

}  // namespace

TEST_SUITE("model_charts") {

TEST_CASE("two-dimensional boundary: derived quantities and both data paths") {
  ChartPtr chart = make_polynomial_chart(two_boundary_spec());
  CHECK(chart->boundary_dim() == 2);
  CHECK(kappa(*chart, {0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(kappa(*chart, {0.4, -0.2}) == doctest::Approx(1.0 + 0.04 - 0.01));

  const Vec obs = obstruction(*chart, BoundaryPoint{{0.0, 0.0}});
  CHECK(obs[0] == doctest::Approx(-0.05).epsilon(1e-10));
  CHECK(obs[1] == doctest::Approx(-0.025).epsilon(1e-10));

  // analytic boundary data against the difference-quotient fallback
  testing::NoHookChart fd_chart(chart);
  for (Vec q : {Vec{0.3, -0.5}, Vec{-0.8, 0.6}}) {
    const BoundaryData a = boundary_data(*chart, q);
    const BoundaryData b = boundary_data(fd_chart, q);
    CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-12));
    for (int i = 0; i < 2; i++) {
      CHECK(a.kappa_grad[i] == doctest::Approx(b.kappa_grad[i]).epsilon(1e-8));
      CHECK(a.log_coeff[i] == doctest::Approx(b.log_coeff[i]).epsilon(1e-8));
      for (int j = 0; j < 2; j++)
        CHECK(a.log_coeff_grad(i, j) ==
              doctest::Approx(b.log_coeff_grad(i, j)).epsilon(1e-6));
    }
  }
}

TEST_CASE("two-dimensional boundary: flows, energy, and the ladder") {
  ChartPtr chart = make_polynomial_chart(two_boundary_spec());
  IntegratorConfig cfg;

  // boundary shot with mixed quadratic data conserves energy to 1e-9
  const Trajectory traj =
      boundary_shoot(*chart, BoundaryPoint{{0.1, -0.2}}, {0.2, -0.1}, -0.4, cfg);
  REQUIRE(traj.termination == Termination::reached_limit);
  double drift = 0.0;
  for (size_t i = 0; i < traj.size(); i++)
    drift = std::max(drift, std::abs(energy(*chart, traj.tau_state(i)) - 1.0));
  CHECK(drift <= 1e-9);

  // matched starts for the two parametrizations agree on the overlap
  CotangentState s0;
  s0.x = {-0.45, 0.1, -0.1};
  const double rho = chart->rho(s0.x);
  const Mat h = chart->h(s0.x);
  Vec v{0.2, -0.15};
  double tangential = quad_form(v, h, v);
  s0.xi = {std::sqrt(1.0 - tangential) / rho, h(0, 0) * v[0] + h(0, 1) * v[1],
           h(1, 0) * v[0] + h(1, 1) * v[1]};
  for (int a = 1; a <= 2; a++) s0.xi[a] /= rho;  // xi = h v / rho for |v|_h = rho scaling
  // rescale onto the energy surface exactly
  {
    const double e = energy(*chart, s0);
    for (auto& c : s0.xi) c /= std::sqrt(e);
  }

  IntegratorConfig dense = cfg;
  dense.rel_tol = 1e-12;
  dense.abs_tol = 1e-14;
  dense.max_step = 2.5e-4;
  const Trajectory arc = integrate_t(*chart, s0, 50.0, dense);
  REQUIRE(arc.termination == Termination::reached_boundary);
  const Trajectory tau_traj = integrate_tau_to_boundary(*chart, to_tau_state(*chart, s0), dense);
  REQUIRE(tau_traj.termination == Termination::reached_boundary);
  double sup = 0.0;
  for (size_t i = 1; i + 1 < arc.size(); i += 5) {
    const CotangentState s = arc.cotangent_state(i);
    if (s.x[0] < tau_traj.front_param() || s.x[0] > -1e-10) continue;
    const Vec interp = tau_traj.interpolate(s.x[0]);
    sup = std::max(sup, std::abs(interp[0] - s.x[1]));
    sup = std::max(sup, std::abs(interp[1] - s.x[2]));
  }
  CHECK(sup <= 1e-7);

  // expansion fit recovers the analytic obstruction per component
  IntegratorConfig fit_cfg = cfg;
  fit_cfg.max_step = 2.5e-4;
  const Trajectory fit_traj =
      boundary_shoot(*chart, BoundaryPoint{{0.0, 0.0}}, {0.0, 0.0}, -0.3, fit_cfg);
  REQUIRE(fit_traj.termination == Termination::reached_limit);
  const ExpansionFit fit = fit_expansion(fit_traj, default_fit_window(), true);
  const Vec obs = obstruction(*chart, BoundaryPoint{{0.0, 0.0}});
  for (int a = 0; a < 2; a++) {
    CHECK(std::abs(fit.obstruction[a] - obs[a]) <= std::max(0.02 * std::abs(obs[a]), 5e-3));
    CHECK(std::abs(fit.quadratic[a]) <= 5e-2);
  }
}

TEST_CASE("two-dimensional boundary: endpoint map and direction jacobian") {
  ChartPtr chart = make_polynomial_chart(two_boundary_spec());
  IntegratorConfig cfg;
  const Vec p{-0.45, 0.0, 0.0};
  const Vec dir{1.0, 0.08, -0.05};
  const ShootResult r = endpoint_map(*chart, p, dir, cfg);
  REQUIRE(r.ok());
  CHECK(r.endpoint.x_prime.size() == 2);
  CHECK(r.diagnostics.at("final_energy_drift") < 1e-9);

  const EndpointJacobian jac = endpoint_jacobian(*chart, p, dir, cfg);
  CHECK(jac.jacobian.rows() == 2);
  CHECK(jac.smallest_singular_value > 0.0);
}

}  // TEST_SUITE
