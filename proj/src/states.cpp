#include "ccgeod/states.hpp"

#include <json.hpp>

#include "ccgeod/errors.hpp"

namespace ccgeod {

std::string to_json(const CotangentState& s) {
  nlohmann::json j;
  j["kind"] = "cotangent";
  std::vector<double> values;
  values.push_back(s.t);
  values.insert(values.end(), s.x.begin(), s.x.end());
  values.insert(values.end(), s.xi.begin(), s.xi.end());
  j["values"] = values;
  return j.dump();
}

std::string to_json(const TauState& s) {
  nlohmann::json j;
  j["kind"] = "tau";
  std::vector<double> values;
  values.push_back(s.tau);
  values.insert(values.end(), s.x_prime.begin(), s.x_prime.end());
  values.push_back(s.w0);
  values.insert(values.end(), s.w.begin(), s.w.end());
  j["values"] = values;
  return j.dump();
}

CotangentState cotangent_state_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("kind", "") != "cotangent")
    throw domain_error("state JSON is not tagged kind=cotangent");
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() < 5 || values.size() % 2 == 0)
    throw domain_error("cotangent state needs 1 + 2(n+1) values");
  const size_t m = (values.size() - 1) / 2;
  CotangentState s;
  s.t = values[0];
  s.x.assign(values.begin() + 1, values.begin() + 1 + m);
  s.xi.assign(values.begin() + 1 + m, values.end());
  return s;
}

TauState tau_state_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("kind", "") != "tau") throw domain_error("state JSON is not tagged kind=tau");
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() < 4 || values.size() % 2 != 0)
    throw domain_error("tau state needs 1 + (2n+1) values");
  const size_t n = (values.size() - 2) / 2;
  TauState s;
  s.tau = values[0];
  s.x_prime.assign(values.begin() + 1, values.begin() + 1 + n);
  s.w0 = values[1 + n];
  s.w.assign(values.begin() + 2 + n, values.end());
  return s;
}

}  // namespace ccgeod
