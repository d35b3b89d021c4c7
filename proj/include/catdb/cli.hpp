#pragma once

#include <CLI11.hpp>
#include <random>

#include "catdb/catdb.hpp"

namespace catdb {

namespace cli {

struct Opts {
  std::string file, theory, instance, from, to, query, mapping, mode = "delta", format = "ascii";
  std::vector<std::string> terms;
  std::size_t budget = 10000, count = 1000;
  unsigned seed = 1;
  bool crosscheck = false, saturate = false;
};

inline void print_instance(std::ostream& out, const SaturatedInstance& J, const Opts& o) {
  if (o.format == "json")
    out << to_json(J).dump(2) << '\n';
  else
    render_ascii(out, J);
}

inline std::string show_assignment(const InstancePresentation& P, const SaturatedInstance& J, const Assignment& a) {
  std::string s;
  for (const auto& b : P.gens) {
    std::string v;
    if (auto it = a.ent.find(b.var); it != a.ent.end())
      v = J.row_name(b.sort, it->second);
    else if (auto jt = a.typ.find(b.var); jt != a.typ.end())
      v = J.schema->show(jt->second);
    s += (s.empty() ? "" : ", ") + b.var + " := " + v;
  }
  return "[" + s + "]";
}

inline int cmd_check(const Workspace& ws, const Opts& o, std::ostream& out) {
  int bad = 0;
  auto report = [&](const std::string& what, const std::vector<std::string>& v) {
    out << what << (v.empty() ? ": ok" : ": " + std::to_string(v.size()) + " problem(s)") << '\n';
    for (const auto& x : v) out << "  " << x << '\n';
    bad += !v.empty();
  };
  for (const auto& d : ws.order) {
    std::vector<std::string> v;
    std::string label;
    try {
      switch (d.kind) {
        case Workspace::Kind::Theory: {
          auto rs = complete(ws.theory(d.name).pres, o.budget);
          label = "theory " + d.name + " (" + to_string(rs.status) + ", " + std::to_string(rs.rules.size()) + " rules)";
          if (rs.status == Status::BudgetExhausted) v.push_back("completion did not finish");
          break;
        }
        case Workspace::Kind::Schema:
          label = "schema " + d.name;
          break;
        case Workspace::Kind::Instance: {
          auto J = saturate(ws.instance(d.name), o.budget);
          label = "instance " + d.name + " (" + std::to_string(J.total_rows()) + " rows)";
          break;
        }
        case Workspace::Kind::Mapping:
          label = "mapping " + d.name;
          v = check_mapping(ws.mapping(d.name), o.budget);
          break;
        case Workspace::Kind::Bimodule:
          label = "bimodule " + d.name;
          collage_of_bimodule(ws.bimodule(d.name), o.budget);
          break;
        case Workspace::Kind::Query:
          label = "query " + d.name;
          for (const auto& x : check_domain_independence(ws.query(d.name)))
            v.push_back("FOR variable " + x + " is type-sorted");
          break;
        case Workspace::Kind::UberQuery:
          label = "uberquery " + d.name;
          v = check_uber_query(ws.uber_query(d.name), o.budget);
          break;
      }
    } catch (const Error& e) {
      if (label.empty()) label = d.name;
      v.push_back(d.span.str() + ": " + e.what());
    }
    report(label.empty() ? d.name : label, v);
  }
  return bad ? 1 : 0;
}

inline int cmd_complete(const Workspace& ws, const Opts& o, std::ostream& out) {
  const Theory& th = ws.theory(o.theory);
  auto rs = complete(th.pres, o.budget);
  PrintOptions po{&th.pres.sig};
  if (o.format == "json") {
    ojson j;
    j["theory"] = th.name;
    j["status"] = to_string(rs.status);
    j["rules"] = ojson::array();
    for (const auto& r : rs.rules) j["rules"].push_back(to_string(r.lhs, po) + " -> " + to_string(r.rhs, po));
    j["equations"] = ojson::array();
    for (const auto& r : rs.equations) j["equations"].push_back(to_string(r.lhs, po) + " = " + to_string(r.rhs, po));
    out << j.dump(2) << '\n';
  } else {
    out << th.name << ": " << to_string(rs.status) << ", " << rs.rules.size() << " rules\n";
    for (const auto& r : rs.rules) out << "  " << to_string(r.lhs, po) << " -> " << to_string(r.rhs, po) << '\n';
    for (const auto& r : rs.equations) out << "  " << to_string(r.lhs, po) << " = " << to_string(r.rhs, po) << '\n';
  }
  return rs.status == Status::BudgetExhausted ? 1 : 0;
}

inline int cmd_eq(const Workspace& ws, const Opts& o, std::ostream& out) {
  if (o.terms.size() != 2) throw Error(ErrorKind::Usage, "eq needs two terms");
  const Theory& th = ws.theory(o.theory);
  Term a = parse_theory_term(o.terms[0], th), b = parse_theory_term(o.terms[1], th);
  auto rs = complete(th.pres, o.budget);
  EqResult r = decide_equal(a, b, rs);
  PrintOptions po{&th.pres.sig};
  if (o.format == "json") {
    ojson j;
    j["result"] = to_string(r);
    j["lhs_normal_form"] = to_string(normalize(a, rs), po);
    j["rhs_normal_form"] = to_string(normalize(b, rs), po);
    out << j.dump(2) << '\n';
  } else {
    out << to_string(r) << '\n';
    out << "  " << to_string(a, po) << "  ~>  " << to_string(normalize(a, rs), po) << '\n';
    out << "  " << to_string(b, po) << "  ~>  " << to_string(normalize(b, rs), po) << '\n';
  }
  return r == EqResult::Unknown ? 1 : 0;
}

inline int cmd_homs(const Workspace& ws, const Opts& o, std::ostream& out) {
  const auto& P = ws.instance(o.from);
  auto J = saturate(ws.instance(o.to), o.budget);
  auto hs = enumerate_transforms(P, J);
  if (o.format == "json") {
    ojson j;
    j["from"] = o.from;
    j["to"] = o.to;
    j["count"] = hs.size();
    j["transforms"] = ojson::array();
    for (const auto& h : hs) j["transforms"].push_back(show_assignment(P, J, h));
    out << j.dump(2) << '\n';
  } else {
    out << hs.size() << " transform(s) " << o.from << " -> " << o.to << '\n';
    for (const auto& h : hs) out << "  " << show_assignment(P, J, h) << '\n';
  }
  return 0;
}

inline int cmd_query(const Workspace& ws, const Opts& o, std::ostream& out) {
  auto J = saturate(ws.instance(o.instance), o.budget);
  if (ws.uber_queries.count(o.query)) {
    print_instance(out, eval_uber_query(ws.uber_query(o.query), J, o.budget), o);
    return 0;
  }
  const Query& Q = ws.query(o.query);
  auto res = eval_query(Q, J);
  print_instance(out, res.table, o);
  if (o.crosscheck) {
    auto m = crosscheck_migration(Q, J, o.budget);
    out << "crosscheck: " << (m ? "MISMATCH " + *m : std::string("ok")) << '\n';
    if (m) return 1;
  }
  return 0;
}

inline int cmd_migrate(const Workspace& ws, const Opts& o, std::ostream& out) {
  const SchemaMapping& F = ws.mapping(o.mapping);
  const InstancePresentation& P = ws.instance(o.instance);
  if (o.mode == "sigma") {
    if (P.schema->name != F.src->name) throw Error(ErrorKind::SchemaMismatch, P.name + " is not on " + F.src->name);
    auto K = sigma(F, P);
    std::replace(K.name.begin(), K.name.end(), ' ', '_');
    if (o.saturate) {
      print_instance(out, saturate(K, o.budget), o);
    } else {
      Workspace tmp;
      tmp.order.push_back({Workspace::Kind::Instance, K.name, {}});
      tmp.instances[K.name] = K;
      out << print_workspace(tmp);
    }
    return 0;
  }
  if (o.mode == "delta") {
    if (P.schema->name != F.dst->name) throw Error(ErrorKind::SchemaMismatch, P.name + " is not on " + F.dst->name);
    print_instance(out, delta(F, saturate(P, o.budget)), o);
    return 0;
  }
  if (o.mode == "pi") {
    if (P.schema->name != F.src->name) throw Error(ErrorKind::SchemaMismatch, P.name + " is not on " + F.src->name);
    print_instance(out, pi(F, saturate(P, o.budget), o.budget), o);
    return 0;
  }
  throw Error(ErrorKind::Usage, "unknown mode " + o.mode);
}

// Random terms over a theory: normal forms are fixed points and agree with the original under decide.
inline int cmd_fuzz(const Workspace& ws, const Opts& o, std::ostream& out) {
  const Theory& th = ws.theory(o.theory);
  auto rs = complete(th.pres, o.budget);
  std::mt19937 rng(o.seed);
  const auto& sig = th.pres.sig;
  std::function<Term(const std::string&, int)> gen = [&](const std::string& s, int depth) -> Term {
    std::vector<Symbol> cands;
    for (const auto& f : sig.symbols())
      if (f.cod == s && (depth > 0 || f.dom.empty())) cands.push_back(f);
    if (cands.empty() || std::uniform_int_distribution<int>(0, 4)(rng) == 0)
      return Term::var(std::string(1, "abc"[std::uniform_int_distribution<int>(0, 2)(rng)]));
    const Symbol& f = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
    std::vector<Term> args;
    for (const auto& d : f.dom) args.push_back(gen(d, depth - 1));
    return Term::app(f.name, args);
  };
  std::size_t fails = 0;
  for (std::size_t i = 0; i < o.count; ++i) {
    const auto& sorts = sig.sorts();
    Term t = gen(sorts[std::uniform_int_distribution<std::size_t>(0, sorts.size() - 1)(rng)], 5);
    Term n = normalize(t, rs);
    if (normalize(n, rs) != n || decide_equal(t, n, rs) != EqResult::Equal) {
      ++fails;
      out << "  not idempotent: " << to_string(t) << '\n';
    }
  }
  out << o.count << " random terms, " << fails << " failure(s), seed " << o.seed << '\n';
  return fails ? 1 : 0;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli;
  Opts o;
  CLI::App app{"catdb: algebraic databases from presentations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  auto common = [&](CLI::App* c) {
    c->add_option("file", o.file, "workspace file (.cdb)")->required();
    c->add_option("--budget", o.budget, "step budget for completion and saturation");
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"ascii", "json"}));
    c->add_option("--seed", o.seed, "seed for randomized commands");
  };
  auto* check = app.add_subcommand("check", "load a workspace and check every declaration");
  common(check);
  auto* comp = app.add_subcommand("complete", "run completion on a theory");
  common(comp);
  comp->add_option("--theory", o.theory)->required();
  auto* eq = app.add_subcommand("eq", "decide an equation in a theory");
  common(eq);
  eq->add_option("--theory", o.theory)->required();
  eq->add_option("terms", o.terms)->expected(2);
  auto* sat = app.add_subcommand("saturate", "print the tables of an instance");
  common(sat);
  sat->add_option("--instance", o.instance)->required();
  auto* homs = app.add_subcommand("homs", "enumerate transforms between instances");
  common(homs);
  homs->add_option("--from", o.from)->required();
  homs->add_option("--to", o.to)->required();
  auto* qry = app.add_subcommand("query", "evaluate a query or uberquery");
  common(qry);
  qry->add_option("--query", o.query)->required();
  qry->add_option("--instance", o.instance)->required();
  qry->add_flag("--crosscheck", o.crosscheck, "compare with the migration route");
  auto* mig = app.add_subcommand("migrate", "run a data migration along a mapping");
  common(mig);
  mig->add_option("--mapping", o.mapping)->required();
  mig->add_option("--instance", o.instance)->required();
  mig->add_option("--mode", o.mode)->check(CLI::IsMember({"sigma", "delta", "pi"}));
  mig->add_flag("--saturate", o.saturate, "saturate the result of sigma");
  auto* fuzz = app.add_subcommand("fuzz", "normalize random terms of a theory");
  common(fuzz);
  fuzz->add_option("--theory", o.theory)->required();
  fuzz->add_option("--count", o.count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    Workspace ws = load_workspace(o.file);
    if (*check) return cmd_check(ws, o, out);
    if (*comp) return cmd_complete(ws, o, out);
    if (*eq) return cmd_eq(ws, o, out);
    if (*sat) {
      print_instance(out, saturate(ws.instance(o.instance), o.budget), o);
      return 0;
    }
    if (*homs) return cmd_homs(ws, o, out);
    if (*qry) return cmd_query(ws, o, out);
    if (*mig) return cmd_migrate(ws, o, out);
    if (*fuzz) return cmd_fuzz(ws, o, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.kind) {
      case ErrorKind::Io:
      case ErrorKind::Usage:
      case ErrorKind::Parse:
        return 2;
      default:
        return 1;
    }
  }
  return 2;
}

}  // namespace catdb
