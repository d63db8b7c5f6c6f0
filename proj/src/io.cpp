#include "ccgeod/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccgeod/errors.hpp"
#include "ccgeod/states.hpp"

namespace ccgeod {

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed for '" + path + "'");
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const FermiChart& chart, const Trajectory& traj) {
  const int n = traj.boundary_dim;
  std::ostringstream os;
  os << "# ccgeod trajectory v1\n";
  os << "# chart: " << traj.chart_id << "\n";
  os << "# kind: " << to_string(traj.parameter_kind) << "\n";
  os << "# termination: " << to_string(traj.termination) << "\n";
  os << "# boundary_dim: " << n << "\n";
  if (traj.parameter_kind == ParamKind::tau) {
    os << "tau";
    for (int a = 1; a <= n; a++) os << ",x" << a;
    os << ",w0";
    for (int a = 1; a <= n; a++) os << ",w" << a;
  } else {
    os << "t,x0";
    for (int a = 1; a <= n; a++) os << ",x" << a;
    os << ",xi0";
    for (int a = 1; a <= n; a++) os << ",xi" << a;
  }
  os << ",rho,energy\n";
  for (size_t i = 0; i < traj.size(); i++) {
    os << fmt(traj.params[i]);
    for (double v : traj.states[i]) os << ',' << fmt(v);
    double rho_val, energy_val;
    if (traj.parameter_kind == ParamKind::tau) {
      const TauState s = traj.tau_state(i);
      rho_val = (s.tau == 0.0) ? 0.0 : chart.rho(s.coordinates());
      energy_val = energy(chart, s);
    } else {
      const CotangentState s = traj.cotangent_state(i);
      rho_val = chart.rho(s.x);
      energy_val = energy(chart, s);
    }
    os << ',' << fmt(rho_val) << ',' << fmt(energy_val) << "\n";
  }
  return os.str();
}

void write_trajectory_csv(const FermiChart& chart, const Trajectory& traj,
                          const std::string& path) {
  write_file_atomic(path, trajectory_csv(chart, traj));
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open trajectory file '" + path + "'");
  Trajectory traj;
  traj.termination = Termination::reached_boundary;
  std::string line;
  bool have_kind = false, have_dim = false, header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "kind:") {
        std::string kind;
        ls >> kind;
        traj.parameter_kind = (kind == "arclength") ? ParamKind::arclength : ParamKind::tau;
        have_kind = true;
      } else if (key == "boundary_dim:") {
        ls >> traj.boundary_dim;
        have_dim = true;
      } else if (key == "chart:") {
        std::getline(ls, traj.chart_id);
        if (!traj.chart_id.empty() && traj.chart_id[0] == ' ')
          traj.chart_id.erase(0, 1);
      } else if (key == "termination:") {
        std::string term;
        ls >> term;
        if (term == "reached_boundary") traj.termination = Termination::reached_boundary;
        else if (term == "left_chart") traj.termination = Termination::left_chart;
        else if (term == "left_inbound_regime") traj.termination = Termination::left_inbound_regime;
        else if (term == "reached_limit") traj.termination = Termination::reached_limit;
        else traj.termination = Termination::step_failure;
      }
      continue;
    }
    if (!header_done) {  // column header row
      header_done = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    const size_t state_len =
        traj.parameter_kind == ParamKind::tau ? 2 * traj.boundary_dim + 1
                                              : 2 * (traj.boundary_dim + 1);
    if (row.size() < 1 + state_len)
      throw domain_error("trajectory CSV row too short in '" + path + "'");
    traj.params.push_back(row[0]);
    traj.states.emplace_back(row.begin() + 1, row.begin() + 1 + state_len);
  }
  if (!have_kind || !have_dim || traj.size() == 0)
    throw domain_error("'" + path + "' is not a ccgeod trajectory CSV");
  return traj;
}

std::string shoot_result_json(const ShootResult& result, const std::string& trajectory_file) {
  nlohmann::json j;
  j["endpoint"] = result.ok() ? nlohmann::json(result.endpoint.x_prime) : nlohmann::json();
  j["termination"] = to_string(result.termination);
  j["diagnostics"] = result.diagnostics;
  j["handoff"] = nlohmann::json::parse(to_json(result.handoff));
  j["trajectory_file"] = trajectory_file;
  return j.dump(2);
}

std::string expansion_fit_json(const ExpansionFit& fit) {
  nlohmann::json j;
  j["obstruction_fit"] = fit.obstruction;
  j["u_fit"] = fit.quadratic;
  nlohmann::json nuisance = nlohmann::json::array();
  for (const auto& [c3_log, c3] : fit.nuisance) nuisance.push_back({c3_log, c3});
  j["nuisance"] = nuisance;
  j["window"] = {fit.window.first, fit.window.second};
  j["residual_rms"] = fit.residual_rms;
  j["condition"] = fit.condition;
  return j.dump(2);
}

std::string endpoint_jacobian_json(const EndpointJacobian& jac) {
  nlohmann::json j;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < jac.jacobian.rows(); i++) {
    std::vector<double> row;
    for (int k = 0; k < jac.jacobian.cols(); k++) row.push_back(jac.jacobian(i, k));
    rows.push_back(row);
  }
  j["jacobian"] = rows;
  j["smallest_singular_value"] = jac.smallest_singular_value;
  j["fd_step"] = jac.fd_step;
  return j.dump(2);
}

}  // namespace ccgeod
