#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ccgeod/checks.hpp"
#include "ccgeod/errors.hpp"
#include "ccgeod/io.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"
#include "ccgeod/states.hpp"

using namespace ccgeod;

TEST_SUITE("io") {

TEST_CASE("state JSON round trips with kind tags") {
  TauState t;
  t.tau = -0.25;
  t.x_prime = {0.3, -0.1};
  t.w0 = 0.9;
  t.w = {1.5, 0.0};
  const TauState t2 = tau_state_from_json(to_json(t));
  CHECK(t2.tau == t.tau);
  CHECK(t2.x_prime == t.x_prime);
  CHECK(t2.w0 == t.w0);
  CHECK(t2.w == t.w);

  CotangentState c;
  c.t = 2.0;
  c.x = {-0.5, 0.25};
  c.xi = {1.0, -0.75};
  const CotangentState c2 = cotangent_state_from_json(to_json(c));
  CHECK(c2.x == c.x);
  CHECK(c2.xi == c.xi);

  CHECK_THROWS_AS(tau_state_from_json(to_json(c)), domain_error);
}

TEST_CASE("trajectory CSV round trips through files") {
  ChartPtr chart = make_epsilon_chart({1.0});
  IntegratorConfig cfg;
  const Trajectory traj = boundary_shoot(*chart, BoundaryPoint{{0.0}}, {0.5}, -0.4, cfg);
  REQUIRE(traj.termination == Termination::reached_limit);

  const auto path =
      (std::filesystem::temp_directory_path() / "ccgeod_roundtrip.csv").string();
  write_trajectory_csv(*chart, traj, path);
  const Trajectory back = read_trajectory_csv(path);
  CHECK(back.parameter_kind == ParamKind::tau);
  CHECK(back.boundary_dim == 1);
  CHECK(back.chart_id == traj.chart_id);
  CHECK(back.termination == traj.termination);
  REQUIRE(back.size() == traj.size());
  for (size_t i = 0; i < traj.size(); i++) {
    CHECK(back.params[i] == traj.params[i]);
    for (size_t j = 0; j < traj.states[i].size(); j++)
      CHECK(back.states[i][j] == traj.states[i][j]);
  }
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_trajectory_csv("/nonexistent/path.csv"), domain_error);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "ccgeod_atomic.txt").string();
  write_file_atomic(path, "payload\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "payload");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
}

TEST_CASE("result JSON documents expose the documented keys") {
  ChartPtr chart = make_epsilon_chart({0.0});
  IntegratorConfig cfg;
  const ShootResult r = endpoint_map(*chart, {-1.0, 0.0}, {1.0, 0.4}, cfg);
  REQUIRE(r.ok());
  const auto doc = nlohmann::json::parse(shoot_result_json(r, "traj.csv"));
  CHECK(doc.contains("endpoint"));
  CHECK(doc.contains("diagnostics"));
  CHECK(doc.contains("trajectory_file"));
  CHECK(doc.contains("termination"));
  CHECK(doc["termination"] == "reached_boundary");

  const auto jac = nlohmann::json::parse(endpoint_jacobian_json(
      endpoint_jacobian(*chart, {-1.0, 0.0}, {1.0, 0.0}, cfg)));
  CHECK(jac.contains("jacobian"));
  CHECK(jac.contains("smallest_singular_value"));
}

TEST_CASE("check report serialization") {
  std::vector<CheckResult> results = {{"alpha", 0.5, 1.0, true}, {"beta", 2.0, 1.0, false}};
  const auto doc = nlohmann::json::parse(check_report_json(results));
  CHECK(doc["checks"].size() == 2);
  CHECK(doc["all_passed"] == false);
  CHECK(check_report_table(results).find("FAIL") != std::string::npos);
  CHECK_FALSE(all_passed(results));
}

}  // TEST_SUITE
