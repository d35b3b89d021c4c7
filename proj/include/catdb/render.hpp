#pragma once

#include <json.hpp>

#include "catdb/instance.hpp"

namespace catdb {

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<Table> instance_tables(const SaturatedInstance& J) {
  std::vector<Table> out;
  const Schema& S = *J.schema;
  for (const auto& e : S.pres.entities) {
    Table t{e, {"row"}, {}};
    for (const auto* f : S.edges_from(e)) t.header.push_back(f->name);
    for (const auto* a : S.attributes_of(e)) t.header.push_back(a->name);
    for (std::size_t i = 0; i < J.rows(e); ++i) {
      std::vector<std::string> r{J.row_name(e, i)};
      for (const auto* f : S.edges_from(e)) r.push_back(J.row_name(f->cod, J.follow(f->name, i)));
      for (const auto* a : S.attributes_of(e)) r.push_back(S.show(J.cell(a->name, i)));
      t.rows.push_back(r);
    }
    out.push_back(t);
  }
  return out;
}

inline std::vector<std::string> type_equation_lines(const SaturatedInstance& J) {
  std::vector<std::string> out;
  for (const auto& e : J.type_equations()) out.push_back(J.schema->show(e.lhs) + " = " + J.schema->show(e.rhs));
  return out;
}

inline void render_ascii(std::ostream& os, const Table& t) {
  std::vector<std::size_t> w(t.header.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = t.header[c].size();
    for (const auto& r : t.rows) w[c] = std::max(w[c], r[c].size());
  }
  auto rule = [&] {
    os << '+';
    for (auto n : w) os << std::string(n + 2, '-') << '+';
    os << '\n';
  };
  auto line = [&](const std::vector<std::string>& r) {
    os << '|';
    for (std::size_t c = 0; c < w.size(); ++c) os << ' ' << r[c] << std::string(w[c] - r[c].size(), ' ') << " |";
    os << '\n';
  };
  os << t.title << " (" << t.rows.size() << " rows)\n";
  rule();
  line(t.header);
  rule();
  for (const auto& r : t.rows) line(r);
  rule();
}

inline void render_ascii(std::ostream& os, const SaturatedInstance& J) {
  for (const auto& t : instance_tables(J)) {
    render_ascii(os, t);
    os << '\n';
  }
  auto eqs = type_equation_lines(J);
  if (!eqs.empty()) {
    os << "type equations\n";
    for (const auto& e : eqs) os << "  " << e << '\n';
  }
}

using ojson = nlohmann::ordered_json;

inline ojson to_json(const Table& t) {
  ojson j;
  j["entity"] = t.title;
  j["columns"] = t.header;
  j["rows"] = ojson::array();
  for (const auto& r : t.rows) {
    ojson row;
    for (std::size_t c = 0; c < r.size(); ++c) row[t.header[c]] = r[c];
    j["rows"].push_back(row);
  }
  return j;
}

inline ojson to_json(const SaturatedInstance& J) {
  ojson j;
  j["instance"] = J.name;
  j["schema"] = J.schema->name;
  j["tables"] = ojson::array();
  for (const auto& t : instance_tables(J)) j["tables"].push_back(to_json(t));
  j["type_equations"] = type_equation_lines(J);
  return j;
}

}  // namespace catdb
