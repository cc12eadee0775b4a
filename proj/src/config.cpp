#include "hfl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hfl/error.hpp"
#include "json.hpp"

namespace hfl {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::Config, "config " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) bad(where, "unknown key '" + item.key() + "'");
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& where, const char* key) {
  if (!v.is_number()) bad(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& where, const char* key) {
  if (!v.is_number_unsigned()) bad(where, std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& where, const char* key) {
  if (!v.is_string()) bad(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

PopulationModel parse_model(const json& m, const std::string& where) {
  check_keys(m, where, {"name", "kind", "theta_A_star", "theta_B_star", "theta_AB_star", "sigma2", "rho"});
  PopulationModel model;
  model.name = text(need(m, "name", where), where, "name");
  const std::string kind = text(need(m, "kind", where), where, "kind");
  if (kind == "strict_additive") {
    model.kind = ModelKind::StrictAdditive;
  } else if (kind == "correlated_normal") {
    model.kind = ModelKind::CorrelatedNormal;
    model.rho = number(need(m, "rho", where), where, "rho");
  } else {
    bad(where, "unknown model kind '" + kind + "'");
  }
  if (model.kind == ModelKind::StrictAdditive && m.contains("rho")) bad(where, "'rho' needs kind correlated_normal");
  model.theta_A_star = number(need(m, "theta_A_star", where), where, "theta_A_star");
  model.theta_B_star = number(need(m, "theta_B_star", where), where, "theta_B_star");
  model.theta_AB_star = number(need(m, "theta_AB_star", where), where, "theta_AB_star");
  model.sigma2 = number(need(m, "sigma2", where), where, "sigma2");
  return model;
}

SweepConfig parse_one(const json& c, const std::string& where) {
  check_keys(c, where,
             {"n_units", "n_plus", "model", "pi_grid", "replicates", "min_cell", "alpha", "master_seed",
              "situations", "max_attempts"});
  SweepConfig cfg;
  cfg.n_units = count(need(c, "n_units", where), where, "n_units");
  cfg.n_plus = count(need(c, "n_plus", where), where, "n_plus");
  cfg.model = parse_model(need(c, "model", where), where + ".model");

  const json& grid = need(c, "pi_grid", where);
  if (!grid.is_array()) bad(where, "'pi_grid' must be an array of numbers");
  for (const auto& p : grid) cfg.pi_grid.push_back(number(p, where, "pi_grid"));

  cfg.replicates = count(need(c, "replicates", where), where, "replicates");
  cfg.master_seed = count(need(c, "master_seed", where), where, "master_seed");
  if (c.contains("min_cell")) cfg.min_cell = count(c["min_cell"], where, "min_cell");
  if (c.contains("alpha")) cfg.alpha = number(c["alpha"], where, "alpha");
  if (c.contains("max_attempts")) cfg.max_attempts = count(c["max_attempts"], where, "max_attempts");
  if (c.contains("situations")) {
    const json& s = c["situations"];
    if (!s.is_array()) bad(where, "'situations' must be an array");
    cfg.situations.clear();
    for (const auto& v : s) {
      const std::string name = text(v, where, "situations");
      if (name == "I") {
        cfg.situations.push_back(Situation::I);
      } else if (name == "II") {
        cfg.situations.push_back(Situation::II);
      } else {
        bad(where, "unknown situation '" + name + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<SweepConfig> parse_sweep_configs(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<SweepConfig> out;
  if (doc.is_array()) {
    if (doc.empty()) bad("root", "empty array");
    for (std::size_t k = 0; k < doc.size(); ++k) out.push_back(parse_one(doc[k], "[" + std::to_string(k) + "]"));
  } else {
    out.push_back(parse_one(doc, "root"));
  }
  return out;
}

std::vector<SweepConfig> load_sweep_configs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_configs(buf.str());
}

}  // namespace hfl
