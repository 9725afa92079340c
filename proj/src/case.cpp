#include "drohs/case.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>

namespace drohs {

int NetworkCase::bus_index(int id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw CaseError("unknown bus id " + std::to_string(id));
  return it->second;
}

void NetworkCase::rebuild_index() {
  index_.clear();
  for (int i = 0; i < n_bus(); ++i) {
    auto [it, fresh] = index_.emplace(buses[i].id, i);
    (void)it;
    if (!fresh)
      throw CaseError("duplicate bus id " + std::to_string(buses[i].id));
  }
}

std::vector<std::vector<int>> NetworkCase::gens_at_bus() const {
  std::vector<std::vector<int>> out(n_bus());
  for (int g = 0; g < n_gen(); ++g) out[bus_index(generators[g].bus)].push_back(g);
  return out;
}

std::vector<std::vector<int>> NetworkCase::branches_at_bus() const {
  std::vector<std::vector<int>> out(n_bus());
  for (int l = 0; l < n_branch(); ++l) {
    out[bus_index(branches[l].from_bus)].push_back(l);
    out[bus_index(branches[l].to_bus)].push_back(l);
  }
  return out;
}

void validate_case(const NetworkCase& c) {
  if (c.base_mva <= 0) throw CaseError(c.name + ": baseMVA must be positive");
  if (c.n_bus() == 0) throw CaseError(c.name + ": no buses");

  int n_ref = 0;
  for (const auto& b : c.buses) {
    if (b.type < 1 || b.type > 3)
      throw CaseError(c.name + ": bus " + std::to_string(b.id) +
                      " has unsupported type " + std::to_string(b.type));
    if (b.type == 3) ++n_ref;
    if (!(b.vmin > 0) || !(b.vmax >= b.vmin))
      throw CaseError(c.name + ": bus " + std::to_string(b.id) +
                      " has bad voltage bounds");
  }
  if (n_ref != 1)
    throw CaseError(c.name + ": expected exactly one reference bus, found " +
                    std::to_string(n_ref));

  for (const auto& br : c.branches) {
    c.bus_index(br.from_bus);
    c.bus_index(br.to_bus);
    if (br.from_bus == br.to_bus)
      throw CaseError(c.name + ": branch connects bus " +
                      std::to_string(br.from_bus) + " to itself");
    if (br.r == 0 && br.x == 0)
      throw CaseError(c.name + ": branch " + std::to_string(br.from_bus) + "-" +
                      std::to_string(br.to_bus) + " has zero impedance");
    if (br.tap <= 0)
      throw CaseError(c.name + ": branch " + std::to_string(br.from_bus) + "-" +
                      std::to_string(br.to_bus) + " has non-positive tap");
  }
  for (const auto& g : c.generators) {
    c.bus_index(g.bus);
    if (g.pmin > g.pmax || g.qmin > g.qmax)
      throw CaseError(c.name + ": generator at bus " + std::to_string(g.bus) +
                      " has inverted limits");
  }

  // Every bus must reach every other through in-service branches. Isolated
  // buses would later produce degenerate nodal blocks, so fail here.
  std::vector<std::vector<int>> adj(c.n_bus());
  for (const auto& br : c.branches) {
    int f = c.bus_index(br.from_bus), t = c.bus_index(br.to_bus);
    adj[f].push_back(t);
    adj[t].push_back(f);
  }
  std::vector<char> seen(c.n_bus(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : adj[u])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  if (reached != c.n_bus()) {
    for (int i = 0; i < c.n_bus(); ++i)
      if (!seen[i])
        throw CaseError(c.name + ": bus " + std::to_string(c.buses[i].id) +
                        " is disconnected from the reference component");
  }
}

NetworkCase load_case(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".m") return parse_matpower_file(path);
  if (ext == ".json") return parse_case_json_file(path);
  throw CaseError("cannot tell case format from extension: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkCase parse_matpower_file(const std::string& path) {
  return parse_matpower(read_text_file(path),
                        std::filesystem::path(path).stem().string());
}

NetworkCase parse_case_json_file(const std::string& path) {
  return parse_case_json(read_text_file(path));
}

}  // namespace drohs
