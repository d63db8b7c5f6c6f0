#include "ccgeod/model_charts.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccgeod/errors.hpp"

namespace ccgeod {

namespace {

class EpsilonChart final : public FermiChart {
public:
  explicit EpsilonChart(const EpsilonFamily& p) : p_(p) {
    if (!(p.delta > 0.0 && p.delta < 1.0))
      throw domain_error("epsilon_family: delta must lie in (0, 1)");
    if (!(p.epsilon >= 0.0)) throw domain_error("epsilon_family: epsilon must be >= 0");
    if (!(p.depth >= p.delta)) throw domain_error("epsilon_family: depth must cover the collar");
  }

  int dim() const override { return 2; }
  Mat h(const Vec&) const override { return Mat::identity(1); }
  Mat dh_normal(const Vec&) const override { return Mat::zero(1, 1); }
  Mat dh_tangential(const Vec&, int) const override { return Mat::zero(1, 1); }

  double rho(const Vec& x) const override { return -x[0] * std::exp(p_.epsilon * x[1]); }
  double drho_normal(const Vec& x) const override { return -std::exp(p_.epsilon * x[1]); }
  Vec drho_tangential(const Vec& x) const override {
    return {-x[0] * p_.epsilon * std::exp(p_.epsilon * x[1])};
  }

  bool boundary_data_analytic(const Vec& x_prime, BoundaryData& out) const override {
    const double k = std::exp(p_.epsilon * x_prime[0]);
    out.kappa = k;
    out.kappa_grad = {p_.epsilon * k};
    out.log_coeff = {p_.epsilon / k};
    out.log_coeff_grad = Mat(1, 1);
    out.log_coeff_grad(0, 0) = -p_.epsilon * p_.epsilon / k;
    return true;
  }

  double delta() const override { return p_.delta; }
  double x0_min() const override { return -p_.depth; }
  std::vector<std::pair<double, double>> x_box() const override { return {p_.x_box}; }

  std::string id() const override {
    std::ostringstream os;
    os << "epsilon_family(epsilon=" << p_.epsilon << ")";
    return os.str();
  }

private:
  EpsilonFamily p_;
};

class WarpedAhChart final : public FermiChart {
public:
  int dim() const override { return 2; }
  Mat h(const Vec& x) const override {
    Mat m(1, 1);
    m(0, 0) = (1.0 + x[0]) * (1.0 + x[0]);
    return m;
  }
  Mat dh_normal(const Vec& x) const override {
    Mat m(1, 1);
    m(0, 0) = 2.0 * (1.0 + x[0]);
    return m;
  }
  Mat dh_tangential(const Vec&, int) const override { return Mat::zero(1, 1); }
  double rho(const Vec& x) const override { return -x[0]; }
  double drho_normal(const Vec&) const override { return -1.0; }
  Vec drho_tangential(const Vec&) const override { return {0.0}; }
  bool boundary_data_analytic(const Vec&, BoundaryData& out) const override {
    out.kappa = 1.0;
    out.kappa_grad = {0.0};
    out.log_coeff = {0.0};
    out.log_coeff_grad = Mat(1, 1);
    return true;
  }
  double delta() const override { return 0.9; }
  std::vector<std::pair<double, double>> x_box() const override { return {{-2.0, 2.0}}; }
  std::string id() const override { return "warped_ah"; }
};

double poly_eval(const Polynomial& p, const Vec& x) {
  double s = 0.0;
  for (const auto& term : p) {
    double t = term.coeff;
    for (size_t i = 0; i < term.powers.size(); i++) {
      for (int k = 0; k < term.powers[i]; k++) t *= x[i];
    }
    s += t;
  }
  return s;
}

Polynomial poly_derivative(const Polynomial& p, int axis) {
  Polynomial out;
  for (const auto& term : p) {
    if (term.powers[axis] == 0) continue;
    PolynomialTerm d = term;
    d.coeff *= d.powers[axis];
    d.powers[axis] -= 1;
    out.push_back(d);
  }
  return out;
}

class PolynomialChart final : public FermiChart {
public:
  explicit PolynomialChart(const PolynomialChartSpec& spec) : spec_(spec) {
    const int n = spec.dim - 1;
    if (spec.dim < 2) throw domain_error("polynomial chart: dim must be >= 2");
    if (!(spec.delta > 0.0 && spec.delta < 1.0))
      throw domain_error("polynomial chart: delta must lie in (0, 1)");
    if (static_cast<int>(spec.x_box.size()) != n)
      throw domain_error("polynomial chart: x_box must list one interval per boundary axis");
    if (static_cast<int>(spec.h.size()) != n)
      throw domain_error("polynomial chart: h must be an n x n array of polynomials");
    for (const auto& row : spec.h)
      if (static_cast<int>(row.size()) != n)
        throw domain_error("polynomial chart: h must be an n x n array of polynomials");
    auto check_degree = [&](const Polynomial& p) {
      for (const auto& term : p) {
        if (static_cast<int>(term.powers.size()) != spec.dim)
          throw domain_error("polynomial chart: each term needs one exponent per coordinate");
        int total = 0;
        for (int e : term.powers) {
          if (e < 0) throw domain_error("polynomial chart: negative exponent");
          total += e;
        }
        if (total > 6) throw domain_error("polynomial chart: degree must be <= 6");
      }
    };
    for (const auto& row : spec.h)
      for (const auto& p : row) check_degree(p);
    check_degree(spec.rho);
    for (const auto& term : spec.rho)
      if (term.powers[0] == 0 && term.coeff != 0.0)
        throw chart_integrity_error("polynomial chart: rho must vanish on x^0 = 0");

    dh0_.resize(n, std::vector<Polynomial>(n));
    dh_tan_.resize(n, std::vector<std::vector<Polynomial>>(n, std::vector<Polynomial>(n)));
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        dh0_[a][b] = poly_derivative(spec.h[a][b], 0);
        for (int g = 0; g < n; g++) dh_tan_[a][b][g] = poly_derivative(spec.h[a][b], g + 1);
      }
    drho0_ = poly_derivative(spec.rho, 0);
    drho_tan_.resize(n);
    for (int g = 0; g < n; g++) drho_tan_[g] = poly_derivative(spec.rho, g + 1);
    dkappa_.resize(n);
    ddkappa_.resize(n, std::vector<Polynomial>(n));
    for (int b = 0; b < n; b++) {
      dkappa_[b] = poly_derivative(drho0_, b + 1);
      for (int l = 0; l < n; l++) ddkappa_[b][l] = poly_derivative(dkappa_[b], l + 1);
    }
  }

  int dim() const override { return spec_.dim; }
  Mat h(const Vec& x) const override {
    const int n = spec_.dim - 1;
    Mat m(n, n);
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) m(a, b) = poly_eval(spec_.h[a][b], x);
    return m;
  }
  Mat dh_normal(const Vec& x) const override {
    const int n = spec_.dim - 1;
    Mat m(n, n);
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) m(a, b) = poly_eval(dh0_[a][b], x);
    return m;
  }
  Mat dh_tangential(const Vec& x, int gamma) const override {
    const int n = spec_.dim - 1;
    Mat m(n, n);
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) m(a, b) = poly_eval(dh_tan_[a][b][gamma - 1], x);
    return m;
  }
  double rho(const Vec& x) const override { return poly_eval(spec_.rho, x); }
  double drho_normal(const Vec& x) const override { return poly_eval(drho0_, x); }
  Vec drho_tangential(const Vec& x) const override {
    const int n = spec_.dim - 1;
    Vec out(n);
    for (int g = 0; g < n; g++) out[g] = poly_eval(drho_tan_[g], x);
    return out;
  }
  bool boundary_data_analytic(const Vec& x_prime, BoundaryData& out) const override {
    const int n = spec_.dim - 1;
    Vec x0(n + 1, 0.0);
    for (int a = 0; a < n; a++) x0[a + 1] = x_prime[a];
    const double k = -poly_eval(drho0_, x0);
    if (!(k > 0.0)) return false;  // let the caller surface the integrity error
    out.kappa = k;
    out.kappa_grad.resize(n);
    for (int b = 0; b < n; b++) out.kappa_grad[b] = -poly_eval(dkappa_[b], x0);
    const Mat h0 = h(x0);
    const Mat h0_inv = inverse(h0);
    out.log_coeff = h0_inv * out.kappa_grad;
    for (auto& c : out.log_coeff) c /= k * k;
    out.log_coeff_grad = Mat(n, n);
    for (int l = 0; l < n; l++) {
      // d_l (h^{ab} kappa_b / kappa^2) assembled term by term
      const Mat dh_l = dh_tangential(x0, l + 1);
      const Mat dhinv = (h0_inv * dh_l * h0_inv).scaled(-1.0);
      Vec dgrad(n);
      for (int b = 0; b < n; b++) dgrad[b] = -poly_eval(ddkappa_[b][l], x0);
      const Vec t1 = dhinv * out.kappa_grad;
      const Vec t2 = h0_inv * dgrad;
      for (int a = 0; a < n; a++)
        out.log_coeff_grad(a, l) =
            t1[a] / (k * k) + t2[a] / (k * k) - 2.0 * out.log_coeff[a] * out.kappa_grad[l] / k;
    }
    return true;
  }

  double delta() const override { return spec_.delta; }
  std::vector<std::pair<double, double>> x_box() const override { return spec_.x_box; }
  std::string id() const override { return "polynomial"; }

private:
  PolynomialChartSpec spec_;
  std::vector<std::vector<Polynomial>> dh0_;
  std::vector<std::vector<std::vector<Polynomial>>> dh_tan_;
  Polynomial drho0_;
  std::vector<Polynomial> drho_tan_;
  std::vector<Polynomial> dkappa_;
  std::vector<std::vector<Polynomial>> ddkappa_;
};

Polynomial parse_polynomial(const nlohmann::json& j) {
  Polynomial p;
  for (const auto& t : j) {
    PolynomialTerm term;
    term.coeff = t.at("c").get<double>();
    term.powers = t.at("p").get<std::vector<int>>();
    p.push_back(term);
  }
  return p;
}

}  // namespace

ChartPtr make_epsilon_chart(const EpsilonFamily& params) {
  return std::make_shared<EpsilonChart>(params);
}

ChartPtr make_warped_ah_chart() { return std::make_shared<WarpedAhChart>(); }

ChartPtr make_polynomial_chart(const PolynomialChartSpec& spec) {
  return std::make_shared<PolynomialChart>(spec);
}

ChartPtr load_chart(const std::string& spec_text) {
  // shorthand "epsilon:<value>"
  if (spec_text.rfind("epsilon:", 0) == 0) {
    EpsilonFamily p;
    try {
      p.epsilon = std::stod(spec_text.substr(8));
    } catch (const std::exception&) {
      throw domain_error("bad epsilon value in chart shorthand '" + spec_text + "'");
    }
    return make_epsilon_chart(p);
  }
  if (spec_text == "warped_ah") return make_warped_ah_chart();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(spec_text);
  } catch (const std::exception&) {
    throw domain_error("unknown chart spec '" + spec_text +
                       "' (expected epsilon:<v>, warped_ah, or a JSON document)");
  }
  const std::string type = j.value("type", "");
  if (type == "epsilon_family") {
    EpsilonFamily p;
    p.epsilon = j.value("epsilon", 0.0);
    p.delta = j.value("delta", 0.9);
    if (j.contains("x_box")) {
      auto b = j.at("x_box").get<std::vector<double>>();
      if (b.size() != 2) throw domain_error("epsilon_family: x_box must be [lo, hi]");
      p.x_box = {b[0], b[1]};
    }
    p.depth = j.value("depth", p.depth);
    return make_epsilon_chart(p);
  }
  if (type == "warped_ah") return make_warped_ah_chart();
  if (type == "polynomial") {
    PolynomialChartSpec spec;
    spec.dim = j.at("dim").get<int>();
    spec.delta = j.value("delta", 0.9);
    for (const auto& pair : j.at("x_box")) {
      auto b = pair.get<std::vector<double>>();
      if (b.size() != 2) throw domain_error("polynomial chart: x_box entries must be [lo, hi]");
      spec.x_box.push_back({b[0], b[1]});
    }
    for (const auto& row : j.at("h")) {
      std::vector<Polynomial> r;
      for (const auto& entry : row) r.push_back(parse_polynomial(entry));
      spec.h.push_back(std::move(r));
    }
    spec.rho = parse_polynomial(j.at("rho"));
    return make_polynomial_chart(spec);
  }
  throw domain_error("unknown chart type '" + type + "'");
}

ChartPtr load_chart_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open chart file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_chart(buf.str());
}

double hyperbolic_endpoint_oracle(double x0, double y0, double theta) {
  if (!(y0 > 0.0)) throw domain_error("hyperbolic_endpoint_oracle requires y0 > 0");
  return x0 + y0 * std::tan(0.5 * theta);
}

}  // namespace ccgeod
