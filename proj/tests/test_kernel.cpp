#include <catch_amalgamated.hpp>

#include "catdb/kernel.hpp"

using namespace catdb;

TEST_CASE("variable lookup") {
  Signature s;
  s.add_sort("Int");
  Context c{{"x", "Int"}};
  CHECK(well_sort_check(Term::var("x"), c, s) == "Int");
}
