#include <catch_amalgamated.hpp>

#include "paper_fixture.hpp"

using namespace catdb;
using fx::P;

namespace {

using Row = std::vector<std::string>;

std::vector<Row> table_rows(const SaturatedInstance& T, const std::string& e) {
  std::vector<Row> out;
  for (std::size_t i = 0; i < T.rows(e); ++i) {
    Row r;
    for (const auto* a : T.schema->attributes_of(e)) r.push_back(T.schema->show(T.cell(a->name, i)));
    out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ground tables of Jbar, computed without the engine
struct Ground {
  std::vector<std::string> last{"Gauss", "Noether", "Einstein", "Turing", "Newton", "Euclid"};
  std::vector<int> wrk{2, 1, 0, 1, 2, 1};
  std::vector<int> sal{250, 200, 300, 400, 100, 150};
  std::vector<std::string> name{"HR", "Admin", "IT"};
  std::vector<int> sec{2, 5, 4};
};

}  // namespace

TEST_CASE("query Q on J") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  auto Q = fx::query_Q(S);
  CHECK(check_domain_independence(Q).empty());
  auto r = eval_query(Q, J);
  CHECK(r.table.alg == J.alg);
  CHECK(table_rows(r.table, "*") ==
        std::vector<Row>{{"\"Euclid\"", "\"Admin\"", "0"}, {"\"Euclid\"", "\"HR\"", "150"}, {"\"Noether\"", "\"HR\"", "100"}});
  CHECK(r.tuples.size() <= J.rows("Emp") * J.rows("Dept"));
}

TEST_CASE("query Q on Jbar against a direct loop") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_Jbar(S));
  CHECK(J.alg->nulls().empty());
  CHECK(J.type_equations().empty());
  auto r = eval_query(fx::query_Q(S), J);
  Ground g;
  std::vector<Row> want;
  for (int e = 0; e < 6; ++e)
    for (int d = 0; d < 3; ++d) {
      if (g.name[g.wrk[e]] != "Admin") continue;
      if (!(g.sal[e] <= g.sal[g.sec[d]])) continue;
      want.push_back({"\"" + g.last[e] + "\"", "\"" + g.name[d] + "\"", std::to_string(g.sal[g.sec[d]] - g.sal[e])});
    }
  std::sort(want.begin(), want.end());
  CHECK(table_rows(r.table, "*") == want);
  CHECK(!crosscheck_migration(fx::query_Q(S), J));
}

TEST_CASE("domain independence") {
  auto S = fx::schema_S();
  auto Qn = make_query("Qn", S, Context{{"n", "Int"}}, {}, {});
  CHECK(check_domain_independence(Qn) == std::vector<std::string>{"n"});
  auto Qm = make_query("Qm", S, Context{{"e", "Emp"}, {"n", "Int"}}, {}, {});
  CHECK(check_domain_independence(Qm) == std::vector<std::string>{"n"});
  auto J = saturate(fx::instance_J(S));
  try {
    eval_query(Qm, J);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::DomainDependence);
  }
}

TEST_CASE("query on the empty instance") {
  auto S = fx::schema_S();
  auto E = saturate(InstancePresentation{"E", S, {}, {}});
  auto r = eval_query(fx::query_Q(S), E);
  CHECK(r.table.rows("*") == 0);
  CHECK(!crosscheck_migration(fx::query_Q(S), E));
}

TEST_CASE("frozen instance and bimodule of Q") {
  auto S = fx::schema_S();
  auto Q = fx::query_Q(S);
  auto F = saturate(frozen_instance(Q));
  std::vector<std::string> depts;
  for (std::size_t i = 0; i < F.rows("Dept"); ++i) depts.push_back(F.row_name("Dept", i));
  CHECK(depts == std::vector<std::string>{"d", "e.wrk"});
  auto [R, M] = query_to_bimodule(Q);
  CHECK(R->pres.entities == std::vector<std::string>{"*"});
  CHECK(R->pres.attributes.size() == 3);
  auto C = collage_of_bimodule(M);
  CHECK(C.schema->pres.entities.size() == 3);
  CHECK(C.schema->pres.edges.size() == 5);
  CHECK(C.schema->pres.attributes.size() == 6);
  CHECK(check_mapping(C.incl_src).empty());
  CHECK(check_mapping(C.incl_dst).empty());
}

TEST_CASE("crosscheck through the collage") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  auto why = crosscheck_migration(fx::query_Q(S), J);
  INFO((why ? *why : std::string("ok")));
  CHECK(!why);
}

TEST_CASE("more WHERE equations never add rows") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  std::vector<std::pair<Term, Term>> where = {{P("e.wrk.name"), fx::Str("Admin")},
                                              {fx::le(P("e.sal"), P("d.sec.sal")), fx::T()},
                                              {P("e.mgr"), P("e")}};
  std::size_t prev = SIZE_MAX;
  for (std::size_t k = 0; k <= where.size(); ++k) {
    std::vector<std::pair<Term, Term>> w(where.begin(), where.begin() + k);
    auto Q = make_query("Qk", S, Context{{"e", "Emp"}, {"d", "Dept"}}, w, {{"l", P("e.last")}});
    auto n = eval_query(Q, J).table.rows("*");
    CHECK(n <= prev);
    prev = n;
    CHECK(!crosscheck_migration(Q, J));
  }
}

TEST_CASE("uber-query N on J") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  auto N = fx::uber_N(S);
  CHECK(check_uber_query(N).empty());
  auto out = eval_uber_query(N, J);
  REQUIRE(out.rows("A'") == 1);
  CHECK(out.cell("last", 0) == str_lit("Euclid"));
  std::size_t a = out.follow("f", 0);
  CHECK(out.cell("dept_name", a) == str_lit("Admin"));
  CHECK(out.cell("diff", a) == int_lit(0));
  CHECK(table_rows(out, "A") == std::vector<Row>{{"\"Admin\"", "0"}, {"\"HR\"", "100"}, {"\"HR\"", "150"}});
}

TEST_CASE("invalid keys are rejected") {
  auto S = fx::schema_S();
  auto N = fx::uber_N(S);
  N.blocks[0].keys["f"].assign = {P("e'.mgr"), P("e'.wrk")};
  CHECK(!check_uber_query(N).empty());
  auto J = saturate(fx::instance_J(S));
  try {
    eval_uber_query(N, J);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::InvalidKeys);
  }
}
