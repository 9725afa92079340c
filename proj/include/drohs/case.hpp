#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace drohs {

// Network data model. All powers, shunts and flow limits are stored per-unit
// on base_mva; cost coefficients keep the source-file convention ($/h over
// MW), converted exactly once where the money objective is assembled.

struct BusRecord {
  int id = 0;          // external bus number, arbitrary but unique
  int type = 1;        // 1 = PQ, 2 = PV, 3 = reference
  double pd = 0.0;     // real demand, p.u.
  double qd = 0.0;     // reactive demand, p.u.
  double gs = 0.0;     // shunt conductance, p.u.
  double bs = 0.0;     // shunt susceptance, p.u.
  double vmax = 1.1;   // voltage magnitude bounds, p.u.
  double vmin = 0.9;
  double base_kv = 0.0;
};

struct BranchRecord {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;         // series impedance, p.u.
  double x = 0.0;
  double b = 0.0;         // total line charging susceptance, p.u.
  double rate_a = 0.0;    // apparent-power limit, p.u.; 0 = unlimited
  double tap = 1.0;       // off-nominal turns ratio (source value 0 means 1)
  double shift_deg = 0.0; // phase shift in degrees
};

struct GenCost {
  double c2 = 0.0;  // $/MW^2 h
  double c1 = 0.0;  // $/MWh
  double c0 = 0.0;  // $/h
};

struct GenRecord {
  int bus = 0;
  double pmax = 0.0;  // p.u.
  double pmin = 0.0;
  double qmax = 0.0;
  double qmin = 0.0;
  GenCost cost;
};

struct NetworkCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<BusRecord> buses;
  std::vector<BranchRecord> branches;   // out-of-service rows already dropped
  std::vector<GenRecord> generators;    // likewise

  int n_bus() const { return static_cast<int>(buses.size()); }
  int n_branch() const { return static_cast<int>(branches.size()); }
  int n_gen() const { return static_cast<int>(generators.size()); }

  // external id -> dense index
  int bus_index(int id) const;
  void rebuild_index();

  std::vector<std::vector<int>> gens_at_bus() const;
  std::vector<std::vector<int>> branches_at_bus() const;

 private:
  std::unordered_map<int, int> index_;
};

struct CaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// MATPOWER case-file text (mpc.baseMVA / bus / branch / gen / gencost).
// Polynomial costs of degree <= 2 only; anything else is a CaseError.
NetworkCase parse_matpower(const std::string& text, const std::string& name);
NetworkCase parse_matpower_file(const std::string& path);

// Canonical JSON schema (see docs/format.md). Round-trips exactly.
NetworkCase parse_case_json(const std::string& text);
NetworkCase parse_case_json_file(const std::string& path);
std::string serialize_case_json(const NetworkCase& c);

// Reads either format, keyed on the file extension (.m vs .json).
NetworkCase load_case(const std::string& path);

std::string read_text_file(const std::string& path);

// Structural validation shared by both parsers: unique bus ids, exactly one
// reference bus, endpoints resolve, connected topology, sane bounds.
void validate_case(const NetworkCase& c);

}  // namespace drohs
