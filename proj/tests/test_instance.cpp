#include <catch_amalgamated.hpp>

#include "paper_fixture.hpp"

using namespace catdb;
using fx::P;

TEST_CASE("saturating J reproduces its tables") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  REQUIRE(J.rows("Emp") == 7);
  REQUIRE(J.rows("Dept") == 3);
  const char* last[] = {"Gauss", "Noether", "Einstein", "Turing", "Newton", "Euclid", "Hypatia"};
  const char* mgr[] = {"e1", "e4", "e3", "e4", "e1", "e7", "e7"};
  const char* wrk[] = {"d3", "d2", "d1", "d2", "d3", "d2", "d2"};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(J.row_name("Emp", i) == "e" + std::to_string(i + 1));
    CHECK(J.cell("last", i) == str_lit(last[i]));
    CHECK(J.row_name("Emp", J.follow("mgr", i)) == mgr[i]);
    CHECK(J.row_name("Dept", J.follow("wrk", i)) == wrk[i]);
  }
  CHECK(J.cell("sal", 6) == Term::var("x"));
  CHECK(J.cell("sal", 3) == int_lit(400));
  auto eqs = J.type_equations();
  REQUIRE(eqs.size() == 1);
  CHECK(J.decide(fx::le(int_lit(150), Term::var("x")), bool_lit(true), "Bool") == EqResult::Equal);
  CHECK(J.decide(fx::le(Term::var("x"), int_lit(300)), bool_lit(true), "Bool") == EqResult::Unknown);
}

TEST_CASE("saturation of a presentation with derived rows") {
  auto S = fx::schema_S();
  auto I = saturate(fx::instance_I(S));
  CHECK(I.rows("Emp") == 6);
  CHECK(I.rows("Dept") == 2);
  CHECK(I.row_name("Emp", 0) == "e");
  CHECK(I.row_name("Dept", 0) == "d");
  auto I2 = saturate(fx::instance_I2(S));
  CHECK(I2.rows("Emp") == 4);
  CHECK(I2.rows("Dept") == 1);
}

TEST_CASE("contradictory instance is rejected") {
  auto S = fx::schema_S();
  auto p = fx::instance_J(S);
  p.eqs.push_back(ground_eq(p, P("e7.sal"), int_lit(100)));
  try {
    saturate(p);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::InconsistentInstance);
  }
}

TEST_CASE("free cycle runs out of budget") {
  SchemaPresentation p;
  p.entities = {"N"};
  p.edges = {{"s", {"N"}, "N"}};
  auto S = compile_schema(p);
  try {
    saturate(representable(S, "N"), 200);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::PossiblyInfinite);
  }
}

TEST_CASE("transforms from the frozen query block into J") {
  auto S = fx::schema_S();
  auto J = saturate(fx::instance_J(S));
  auto hs = enumerate_transforms(fx::instance_I(S), J);
  std::vector<std::pair<std::string, std::string>> got;
  for (auto& a : hs) got.push_back({J.row_name("Emp", a.ent.at("e")), J.row_name("Dept", a.ent.at("d"))});
  std::vector<std::pair<std::string, std::string>> want = {{"e2", "d1"}, {"e6", "d1"}, {"e6", "d2"}};
  CHECK(got == want);

  Assignment e7d1;
  e7d1.ent = {{"e", 6}, {"d", 0}};
  CHECK(check_transform(fx::instance_I(S), J, e7d1).size() == 1);
}

TEST_CASE("transforms between the two frozen blocks") {
  auto S = fx::schema_S();
  auto Isat = saturate(fx::instance_I(S));
  auto I2sat = saturate(fx::instance_I2(S));
  auto fwd = enumerate_transforms(fx::instance_I(S), I2sat);
  REQUIRE(fwd.size() == 2);
  std::set<std::string> images;
  for (auto& a : fwd) {
    images.insert(I2sat.row_name("Emp", a.ent.at("e")));
    CHECK(I2sat.row_name("Dept", a.ent.at("d")) == "e2.wrk");
  }
  CHECK(images == std::set<std::string>{"e2", "e2.wrk.sec"});
  auto back = enumerate_transforms(fx::instance_I2(S), Isat);
  REQUIRE(back.size() == 1);
  CHECK(Isat.row_name("Emp", back[0].ent.at("e2")) == "e.wrk.sec");
}

TEST_CASE("canonical presentation round trip") {
  auto S = fx::schema_S();
  for (auto p : {fx::instance_J(S), fx::instance_I(S), fx::instance_I2(S)}) {
    auto A = saturate(p);
    auto C = canonical_presentation(A);
    auto B = saturate(C.pres);
    CHECK(isomorphic(A, B));
    auto ids = enumerate_transforms(C.pres, A);
    CHECK(ids.size() >= 1);
  }
}

TEST_CASE("isomorphism notices a changed cell") {
  auto S = fx::schema_S();
  auto p = fx::instance_J(S);
  auto A = saturate(p);
  for (auto& e : p.eqs)
    if (e.lhs == P("e1.last")) e.rhs = str_lit("Riemann");
  auto B = saturate(p);
  CHECK(!isomorphic(A, B));
}
