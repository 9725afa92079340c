#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>

#include "drohs/case.hpp"

namespace drohs {
namespace {

// The case-file grammar we accept is the data subset of MATLAB that MATPOWER
// cases actually use: scalar assignments (mpc.baseMVA = 100;) and numeric
// matrix literals (mpc.bus = [ ... ];) with %-comments.

std::string strip_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  for (char ch : text) {
    if (ch == '%') in_comment = true;
    if (ch == '\n') in_comment = false;
    if (!in_comment) out.push_back(ch);
  }
  return out;
}

struct Table {
  std::vector<std::vector<double>> rows;
};

double to_number(const std::string& tok, const std::string& field) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw CaseError("bad numeric token '" + tok + "' in mpc." + field);
  return v;
}

Table parse_matrix(const std::string& body, const std::string& field) {
  Table t;
  std::vector<double> row;
  std::string tok;
  auto flush_tok = [&] {
    if (!tok.empty()) {
      row.push_back(to_number(tok, field));
      tok.clear();
    }
  };
  auto flush_row = [&] {
    flush_tok();
    if (!row.empty()) {
      t.rows.push_back(row);
      row.clear();
    }
  };
  for (char ch : body) {
    if (ch == ';' || ch == '\n' || ch == '\r') {
      flush_row();
    } else if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      flush_tok();
    } else {
      tok.push_back(ch);
    }
  }
  flush_row();
  if (!t.rows.empty()) {
    size_t w = t.rows.front().size();
    for (const auto& r : t.rows)
      if (r.size() != w)
        throw CaseError("ragged rows in mpc." + field);
  }
  return t;
}

double row_at(const std::vector<double>& r, size_t col, const std::string& field) {
  if (col >= r.size())
    throw CaseError("mpc." + field + " needs at least " + std::to_string(col + 1) +
                    " columns, got " + std::to_string(r.size()));
  return r[col];
}

}  // namespace

NetworkCase parse_matpower(const std::string& text, const std::string& name) {
  std::string src = strip_comments(text);

  std::map<std::string, Table> tables;
  double base_mva = -1;

  size_t pos = 0;
  while ((pos = src.find("mpc.", pos)) != std::string::npos) {
    size_t name_start = pos + 4;
    size_t name_end = name_start;
    while (name_end < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[name_end])) || src[name_end] == '_'))
      ++name_end;
    std::string field = src.substr(name_start, name_end - name_start);
    size_t eq = src.find('=', name_end);
    if (eq == std::string::npos) break;
    size_t val = src.find_first_not_of(" \t\r\n", eq + 1);
    if (val == std::string::npos) break;

    if (src[val] == '[') {
      size_t close = src.find(']', val);
      if (close == std::string::npos)
        throw CaseError(name + ": unterminated matrix for mpc." + field);
      tables[field] = parse_matrix(src.substr(val + 1, close - val - 1), field);
      pos = close + 1;
    } else if (src[val] == '\'') {
      pos = src.find('\'', val + 1);  // quoted scalar (version string); skip
      pos = (pos == std::string::npos) ? src.size() : pos + 1;
    } else {
      size_t end = src.find_first_of(";\n", val);
      std::string tok = src.substr(val, end - val);
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back())))
        tok.pop_back();
      if (field == "baseMVA") base_mva = to_number(tok, field);
      pos = (end == std::string::npos) ? src.size() : end;
    }
  }

  if (base_mva <= 0) throw CaseError(name + ": missing or bad mpc.baseMVA");
  for (const char* req : {"bus", "branch", "gen", "gencost"})
    if (!tables.count(req)) throw CaseError(name + ": missing mpc." + std::string(req));

  NetworkCase c;
  c.name = name;
  c.base_mva = base_mva;
  const double sb = base_mva;

  for (const auto& r : tables["bus"].rows) {
    BusRecord b;
    b.id = static_cast<int>(row_at(r, 0, "bus"));
    b.type = static_cast<int>(row_at(r, 1, "bus"));
    b.pd = row_at(r, 2, "bus") / sb;
    b.qd = row_at(r, 3, "bus") / sb;
    b.gs = row_at(r, 4, "bus") / sb;
    b.bs = row_at(r, 5, "bus") / sb;
    b.base_kv = row_at(r, 9, "bus");
    b.vmax = row_at(r, 11, "bus");
    b.vmin = row_at(r, 12, "bus");
    c.buses.push_back(b);
  }

  for (const auto& r : tables["branch"].rows) {
    int status = r.size() > 10 ? static_cast<int>(r[10]) : 1;
    if (status == 0) continue;
    BranchRecord br;
    br.from_bus = static_cast<int>(row_at(r, 0, "branch"));
    br.to_bus = static_cast<int>(row_at(r, 1, "branch"));
    br.r = row_at(r, 2, "branch");
    br.x = row_at(r, 3, "branch");
    br.b = row_at(r, 4, "branch");
    br.rate_a = row_at(r, 5, "branch") / sb;
    double ratio = row_at(r, 8, "branch");
    br.tap = (ratio == 0.0) ? 1.0 : ratio;
    br.shift_deg = row_at(r, 9, "branch");
    c.branches.push_back(br);
  }

  const auto& gen_rows = tables["gen"].rows;
  const auto& cost_rows = tables["gencost"].rows;
  if (cost_rows.size() != gen_rows.size() && cost_rows.size() != 2 * gen_rows.size())
    throw CaseError(name + ": gencost must have ng or 2*ng rows");

  for (size_t i = 0; i < gen_rows.size(); ++i) {
    const auto& r = gen_rows[i];
    int status = static_cast<int>(row_at(r, 7, "gen"));
    if (status == 0) continue;
    GenRecord g;
    g.bus = static_cast<int>(row_at(r, 0, "gen"));
    g.qmax = row_at(r, 3, "gen") / sb;
    g.qmin = row_at(r, 4, "gen") / sb;
    g.pmax = row_at(r, 8, "gen") / sb;
    g.pmin = row_at(r, 9, "gen") / sb;

    const auto& cr = cost_rows[i];  // rows past ng would be reactive prices
    int model = static_cast<int>(row_at(cr, 0, "gencost"));
    if (model != 2)
      throw CaseError(name + ": only polynomial costs supported (model 2), got " +
                      std::to_string(model));
    int ncoef = static_cast<int>(row_at(cr, 3, "gencost"));
    if (ncoef < 1 || ncoef > 3)
      throw CaseError(name + ": polynomial cost degree must be <= 2, got " +
                      std::to_string(ncoef - 1) + " coefficients beyond constant");
    if (static_cast<int>(cr.size()) < 4 + ncoef)
      throw CaseError(name + ": gencost row too short");
    double coef[3] = {0, 0, 0};  // c2, c1, c0
    for (int k = 0; k < ncoef; ++k) coef[3 - ncoef + k] = cr[4 + k];
    g.cost = GenCost{coef[0], coef[1], coef[2]};
    c.generators.push_back(g);
  }

  c.rebuild_index();
  validate_case(c);
  return c;
}

}  // namespace drohs
