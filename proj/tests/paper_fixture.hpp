#pragma once

#include <sstream>

#include "catdb/query.hpp"

namespace fx {

using namespace catdb;

// "e.mgr.wrk" -> wrk(mgr(e))
inline Term P(const std::string& s) {
  std::stringstream ss(s);
  std::string part;
  std::getline(ss, part, '.');
  Term t = Term::var(part);
  while (std::getline(ss, part, '.')) t = unary(part, t);
  return t;
}
inline Term N(long v) { return int_lit(v); }
inline Term Str(const std::string& s) { return str_lit(s); }
inline Term T() { return bool_lit(true); }
inline Term le(Term a, Term b) { return Term::app("<=", {a, b}); }
inline Term minus(Term a, Term b) { return Term::app("+", {a, Term::app("neg", {b})}); }

inline Equation sch_eq(const std::string& v, const std::string& ent, Term l, Term r, const Signature& sig) {
  return make_equation(Context{{v, ent}}, l, r, sig);
}

inline SchemaPresentation emp_dept() {
  SchemaPresentation p;
  p.entities = {"Emp", "Dept"};
  p.edges = {{"mgr", {"Emp"}, "Emp"}, {"wrk", {"Emp"}, "Dept"}, {"sec", {"Dept"}, "Emp"}};
  p.attributes = {{"last", {"Emp"}, "Str"}, {"name", {"Dept"}, "Str"}, {"sal", {"Emp"}, "Int"}};
  return p;
}

inline void add_emp_dept_eqs(SchemaPresentation& p) {
  auto sig = collage_signature(p);
  p.path_eqs.push_back(sch_eq("e", "Emp", P("e.mgr.mgr"), P("e.mgr"), sig));
  p.path_eqs.push_back(sch_eq("e", "Emp", P("e.mgr.wrk"), P("e.wrk"), sig));
  p.path_eqs.push_back(sch_eq("d", "Dept", P("d.sec.wrk"), P("d"), sig));
  p.obs_eqs.push_back(sch_eq("e", "Emp", le(P("e.sal"), P("e.mgr.sal")), T(), sig));
}

inline SchemaRef schema_S() {
  auto p = emp_dept();
  add_emp_dept_eqs(p);
  return compile_schema(p, "S");
}

inline SchemaRef schema_T() {
  auto p = emp_dept();
  p.entities.push_back("QR");
  p.edges.push_back({"f", {"QR"}, "Emp"});
  p.edges.push_back({"g", {"QR"}, "Dept"});
  add_emp_dept_eqs(p);
  auto sig = collage_signature(p);
  p.obs_eqs.push_back(sch_eq("q", "QR", le(P("q.f.sal"), P("q.g.sec.sal")), T(), sig));
  p.obs_eqs.push_back(sch_eq("q", "QR", P("q.f.wrk.name"), Str("Admin"), sig));
  return compile_schema(p, "T");
}

inline SchemaRef schema_L() {
  auto p = emp_dept();
  p.entities.push_back("Team");
  p.edges.push_back({"on", {"Emp"}, "Team"});
  p.edges.push_back({"bel", {"Team"}, "Dept"});
  p.attributes.push_back({"col", {"Team"}, "Str"});
  add_emp_dept_eqs(p);
  auto sig = collage_signature(p);
  p.path_eqs.push_back(sch_eq("e", "Emp", P("e.mgr.on"), P("e.on"), sig));
  p.path_eqs.push_back(sch_eq("e", "Emp", P("e.on.bel"), P("e.wrk"), sig));
  return compile_schema(p, "L");
}

inline SchemaRef schema_R() {
  SchemaPresentation p;
  p.entities = {"A"};
  p.attributes = {{"diff", {"A"}, "Int"}, {"emp_last", {"A"}, "Str"}, {"dept_name", {"A"}, "Str"}};
  return compile_schema(p, "R");
}

inline SchemaMapping inclusion(const SchemaRef& src, const SchemaRef& dst, const std::string& name) {
  SchemaMapping F = identity_mapping(src);
  F.name = name;
  F.src = src;
  F.dst = dst;
  return F;
}

inline SchemaMapping mapping_F(const SchemaRef& R, const SchemaRef& T) {
  SchemaMapping F{"F", R, T, {{"A", "QR"}}, {}, {}};
  F.attr_map["diff"] = minus(P("x.g.sec.sal"), P("x.f.sal"));
  F.attr_map["emp_last"] = P("x.f.last");
  F.attr_map["dept_name"] = P("x.g.name");
  return F;
}

struct EmpRow {
  const char* id;
  const char* last;
  const char* wrk;
  const char* mgr;
  long sal;  // -1 for the null x
};

inline InstancePresentation instance_J(const SchemaRef& S) {
  InstancePresentation J{"J", S, {}, {}};
  std::vector<EmpRow> emps = {{"e1", "Gauss", "d3", "e1", 250},   {"e2", "Noether", "d2", "e4", 200},
                              {"e3", "Einstein", "d1", "e3", 300}, {"e4", "Turing", "d2", "e4", 400},
                              {"e5", "Newton", "d3", "e1", 100},   {"e6", "Euclid", "d2", "e7", 150},
                              {"e7", "Hypatia", "d2", "e7", -1}};
  std::vector<std::array<const char*, 3>> depts = {{"d1", "HR", "e3"}, {"d2", "Admin", "e6"}, {"d3", "IT", "e5"}};
  for (auto& e : emps) J.gens.add(e.id, "Emp");
  for (auto& d : depts) J.gens.add(d[0], "Dept");
  J.gens.add("x", "Int");
  for (auto& e : emps) {
    std::string id = e.id;
    J.eqs.push_back(ground_eq(J, P(id + ".last"), Str(e.last)));
    J.eqs.push_back(ground_eq(J, P(id + ".wrk"), P(e.wrk)));
    J.eqs.push_back(ground_eq(J, P(id + ".mgr"), P(e.mgr)));
    J.eqs.push_back(ground_eq(J, P(id + ".sal"), e.sal < 0 ? Term::var("x") : N(e.sal)));
  }
  for (auto& d : depts) {
    std::string id = d[0];
    J.eqs.push_back(ground_eq(J, P(id + ".name"), Str(d[1])));
    J.eqs.push_back(ground_eq(J, P(id + ".sec"), P(d[2])));
  }
  return J;
}

// frozen instance of the query block: e with d
inline InstancePresentation instance_I(const SchemaRef& S) {
  InstancePresentation I{"I", S, Context{{"e", "Emp"}, {"d", "Dept"}}, {}};
  I.eqs.push_back(ground_eq(I, P("e.wrk.name"), Str("Admin")));
  I.eqs.push_back(ground_eq(I, le(P("e.sal"), P("d.sec.sal")), T()));
  return I;
}

inline InstancePresentation instance_I2(const SchemaRef& S) {
  InstancePresentation I{"I2", S, Context{{"e2", "Emp"}}, {}};
  I.eqs.push_back(ground_eq(I, P("e2.wrk.name"), Str("Admin")));
  I.eqs.push_back(ground_eq(I, le(P("e2.sal"), P("e2.wrk.sec.sal")), T()));
  return I;
}

// J without e7; Euclid becomes their own manager
inline InstancePresentation instance_Jbar(const SchemaRef& S) {
  auto J = instance_J(S);
  InstancePresentation out{"Jbar", S, {}, {}};
  for (const auto& b : J.gens)
    if (b.var != "e7" && b.var != "x") out.gens.add(b.var, b.sort);
  for (auto e : J.eqs) {
    auto vs = vars_of(e.lhs);
    if (std::find(vs.begin(), vs.end(), "e7") != vs.end()) continue;
    if (e.lhs == P("e6.mgr")) e.rhs = P("e6");
    out.eqs.push_back(e);
  }
  return out;
}

inline Query query_Q(const SchemaRef& S) {
  return make_query("Q", S, Context{{"e", "Emp"}, {"d", "Dept"}},
                    {{P("e.wrk.name"), Str("Admin")}, {le(P("e.sal"), P("d.sec.sal")), T()}},
                    {{"emp_last", P("e.last")}, {"dept_name", P("d.name")}, {"diff", minus(P("d.sec.sal"), P("e.sal"))}});
}

inline SchemaRef schema_U() {
  SchemaPresentation p;
  p.entities = {"A'", "A"};
  p.edges = {{"f", {"A'"}, "A"}};
  p.attributes = {{"last", {"A'"}, "Str"}, {"dept_name", {"A"}, "Str"}, {"diff", {"A"}, "Int"}};
  return compile_schema(p, "U");
}

inline UberQuery uber_N(const SchemaRef& S) {
  UberQuery N{"N", S, schema_U(), {}};
  UberBlock a2{"A'", Context{{"e'", "Emp"}}, {}, {}, {{"last", P("e'.last")}}};
  a2.where_eqs.push_back({Context{}, P("e'.wrk.name"), Str("Admin"), "Str"});
  a2.where_eqs.push_back({Context{}, le(P("e'.sal"), P("e'.wrk.sec.sal")), T(), "Bool"});
  Context tgt{{"e", "Emp"}, {"d", "Dept"}};
  a2.keys["f"] = ContextMorphism{a2.for_ctx, tgt, {P("e'"), P("e'.wrk")}};
  UberBlock a{"A", tgt, {}, {}, {{"dept_name", P("d.name")}, {"diff", minus(P("d.sec.sal"), P("e.sal"))}}};
  a.where_eqs.push_back({Context{}, P("e.wrk.name"), Str("Admin"), "Str"});
  a.where_eqs.push_back({Context{}, le(P("e.sal"), P("d.sec.sal")), T(), "Bool"});
  N.blocks = {a2, a};
  return N;
}

inline std::size_t row_named(const SaturatedInstance& J, const std::string& e, const std::string& name) {
  for (std::size_t i = 0; i < J.rows(e); ++i)
    if (J.row_name(e, i) == name) return i;
  throw std::runtime_error("no row " + name);
}

}  // namespace fx
