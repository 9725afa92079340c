#include <json.hpp>

#include "drohs/case.hpp"

namespace drohs {

using nlohmann::json;

namespace {

double num(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw CaseError(std::string("case json: missing numeric '") + key + "' in " + ctx);
  return j[key].get<double>();
}

int integer(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw CaseError(std::string("case json: missing integer '") + key + "' in " + ctx);
  return j[key].get<int>();
}

}  // namespace

NetworkCase parse_case_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CaseError(std::string("case json: ") + e.what());
  }

  NetworkCase c;
  c.name = j.value("name", "unnamed");
  c.base_mva = num(j, "base_mva", "root");

  if (!j.contains("buses") || !j["buses"].is_array())
    throw CaseError("case json: missing 'buses' array");
  for (const auto& jb : j["buses"]) {
    BusRecord b;
    b.id = integer(jb, "id", "bus");
    b.type = integer(jb, "type", "bus");
    b.pd = num(jb, "pd", "bus");
    b.qd = num(jb, "qd", "bus");
    b.gs = jb.value("gs", 0.0);
    b.bs = jb.value("bs", 0.0);
    b.vmax = num(jb, "vmax", "bus");
    b.vmin = num(jb, "vmin", "bus");
    b.base_kv = jb.value("base_kv", 0.0);
    c.buses.push_back(b);
  }

  if (!j.contains("branches") || !j["branches"].is_array())
    throw CaseError("case json: missing 'branches' array");
  for (const auto& jb : j["branches"]) {
    BranchRecord br;
    br.from_bus = integer(jb, "from", "branch");
    br.to_bus = integer(jb, "to", "branch");
    br.r = num(jb, "r", "branch");
    br.x = num(jb, "x", "branch");
    br.b = jb.value("b", 0.0);
    br.rate_a = jb.value("rate_a", 0.0);
    br.tap = jb.value("tap", 1.0);
    br.shift_deg = jb.value("shift_deg", 0.0);
    c.branches.push_back(br);
  }

  if (!j.contains("generators") || !j["generators"].is_array())
    throw CaseError("case json: missing 'generators' array");
  for (const auto& jg : j["generators"]) {
    GenRecord g;
    g.bus = integer(jg, "bus", "generator");
    g.pmax = num(jg, "pmax", "generator");
    g.pmin = num(jg, "pmin", "generator");
    g.qmax = num(jg, "qmax", "generator");
    g.qmin = num(jg, "qmin", "generator");
    if (!jg.contains("cost") || !jg["cost"].is_object())
      throw CaseError("case json: generator missing 'cost'");
    const auto& jc = jg["cost"];
    g.cost = GenCost{jc.value("c2", 0.0), jc.value("c1", 0.0), jc.value("c0", 0.0)};
    c.generators.push_back(g);
  }

  c.rebuild_index();
  validate_case(c);
  return c;
}

std::string serialize_case_json(const NetworkCase& c) {
  json j;
  j["name"] = c.name;
  j["base_mva"] = c.base_mva;
  j["buses"] = json::array();
  for (const auto& b : c.buses)
    j["buses"].push_back({{"id", b.id},
                          {"type", b.type},
                          {"pd", b.pd},
                          {"qd", b.qd},
                          {"gs", b.gs},
                          {"bs", b.bs},
                          {"vmax", b.vmax},
                          {"vmin", b.vmin},
                          {"base_kv", b.base_kv}});
  j["branches"] = json::array();
  for (const auto& br : c.branches)
    j["branches"].push_back({{"from", br.from_bus},
                             {"to", br.to_bus},
                             {"r", br.r},
                             {"x", br.x},
                             {"b", br.b},
                             {"rate_a", br.rate_a},
                             {"tap", br.tap},
                             {"shift_deg", br.shift_deg}});
  j["generators"] = json::array();
  for (const auto& g : c.generators)
    j["generators"].push_back({{"bus", g.bus},
                               {"pmax", g.pmax},
                               {"pmin", g.pmin},
                               {"qmax", g.qmax},
                               {"qmin", g.qmin},
                               {"cost",
                                {{"c2", g.cost.c2}, {"c1", g.cost.c1}, {"c0", g.cost.c0}}}});
  return j.dump(2) + "\n";
}

}  // namespace drohs
