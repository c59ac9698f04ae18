#include <doctest.h>

#include "pinnfp/autodiff/partial.hpp"
#include "pinnfp/error.hpp"

using pinnfp::autodiff::Partial;
using pinnfp::autodiff::PartialSet;

TEST_CASE("partial counts and suffix") {
  const Partial p = Partial::along({1, 0, 1});
  CHECK(p.count(0) == 1);
  CHECK(p.count(1) == 2);
  CHECK(p.order() == 3);
  CHECK(p.suffix() == "_txx");
  CHECK(p.axes() == std::vector<int>{0, 1, 1});
  CHECK(Partial{}.is_value());
  CHECK(Partial::along({0}).plus(1) == Partial::along({1, 0}));
  CHECK(Partial::along({1}).divides(p));
  CHECK_FALSE(Partial::along({2}).divides(p));
}

TEST_CASE("partial set closes under sub-partials") {
  const PartialSet set{Partial::along({0, 0})};
  REQUIRE(set.size() == 3);
  CHECK(set[0].is_value());
  CHECK(set.contains(Partial::along({0})));
  CHECK(set.index_of(Partial::along({1})) == -1);
  CHECK(set.max_order() == 2);
  CHECK(set.min_input_width() == 1);

  const PartialSet mixed{Partial::along({0, 1, 1})};
  // value, t, x, tx, xx, txx
  CHECK(mixed.size() == 6);
  CHECK(mixed.min_input_width() == 2);
}

TEST_CASE("chain terms follow Faa di Bruno") {
  const PartialSet set{Partial::along({0, 0, 0})};
  const auto& terms = set.chain_terms(static_cast<std::size_t>(set.index_of(Partial::along({0, 0, 0}))));
  // s''' s' ; 3 s'' s_t s_tt ; s''' s_t^3
  REQUIRE(terms.size() == 3);
  double total = 0;
  for (const auto& t : terms) total += t.coeff;
  CHECK(total == doctest::Approx(5.0));  // Bell number B3
}

TEST_CASE("orders above three are refused") {
  CHECK_THROWS_AS(PartialSet{Partial::along({0, 0, 0, 0})}, pinnfp::CapabilityError);
}
