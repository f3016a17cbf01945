#include "doctest.h"

#include "cfair/model.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cfair;
using namespace cfair::testing;

TEST_CASE("variables_of returns exactly the attribution variables") {
  CHECK(variables_of(loan_factual()) ==
        VariableSet{var("G"), var("MS"), var("SAT"), var("GAI"), var("Deg"), var("Exp")});
  CHECK(variables_of(DataPoint{}).empty());
  DataPoint dp{{attr("A", "x"), {var("B"), ValueTerm::sum({atom("y"), atom("z")})}}};
  CHECK(variables_of(dp) == VariableSet{var("A"), var("B")});
}

TEST_CASE("data point rejects a repeated variable") {
  CHECK_THROWS_AS(DataPoint({attr("A", "x"), attr("A", "y")}), ModelError);
  CHECK_THROWS_AS(DataPoint({attr("A", "x"), attr("A", "x")}), ModelError);
}

TEST_CASE("variable names are tokens") {
  CHECK_NOTHROW(VariableId{"Deg."});
  CHECK_NOTHROW(VariableId{"a_1"});
  CHECK_THROWS_AS(VariableId{""}, ModelError);
  CHECK_THROWS_AS(VariableId{"a b"}, ModelError);
  CHECK_THROWS_AS(VariableId{"a-b"}, ModelError);
  CHECK(VariableId{"ms"} != VariableId{"MS"});
}

TEST_CASE("value terms") {
  SUBCASE("sums need two distinct members") {
    CHECK_THROWS_AS(ValueTerm::sum({atom("a")}), ModelError);
    CHECK_THROWS_AS(ValueTerm::sum({atom("a"), atom("a")}), ModelError);
    CHECK_NOTHROW(ValueTerm::sum({atom("a"), ValueTerm::complement(atom("a"))}));
  }
  SUBCASE("no simplification") {
    auto dbl = ValueTerm::complement(ValueTerm::complement(atom("a")));
    CHECK(dbl != atom("a"));
    CHECK(dbl.to_string() == "!!a");
  }
  SUBCASE("printing") {
    auto s = ValueTerm::sum({atom("married"), atom("divorced")});
    CHECK(s.to_string() == "married + divorced");
    CHECK(ValueTerm::complement(s).to_string() == "!(married + divorced)");
    CHECK(ValueTerm::sum({atom("a"), s}).to_string() == "a + (married + divorced)");
  }
}

TEST_CASE("value_matches") {
  auto md = ValueTerm::sum({atom("married"), atom("divorced")});
  CHECK(value_matches(md, "divorced"));
  CHECK_FALSE(value_matches(md, "single"));
  CHECK_FALSE(value_matches(ValueTerm::complement(atom("white")), "white"));
  CHECK(value_matches(ValueTerm::complement(atom("white")), "black"));

  // !(a + b) against "c", with the truth table over {a, b, c} written out.
  auto not_ab = ValueTerm::complement(ValueTerm::sum({atom("a"), atom("b")}));
  const std::map<std::string, bool> table{{"a", false}, {"b", false}, {"c", true}};
  for (const auto& [token, expected] : table) CHECK(value_matches(not_ab, token) == expected);
}

TEST_CASE("value_matches: a term and its complement split every token") {
  Rng rng{7};
  for (int i = 0; i < 500; ++i) {
    auto t = random_value_term(rng, 3);
    for (const auto& token : token_pool()) {
      CHECK(value_matches(t, token) != value_matches(ValueTerm::complement(t), token));
    }
    CHECK(value_matches(t, "zzz") != value_matches(ValueTerm::complement(t), "zzz"));
  }
}

TEST_CASE("causal graph invariants") {
  CHECK_NOTHROW(loan_graph());
  CHECK(loan_graph().edges().size() == 10);
  CHECK(loan_graph().nodes().size() == 7);

  SUBCASE("cycle carries a witness") {
    try {
      CausalGraph::from_edges({edge("A", "B"), edge("B", "A")});
      FAIL("expected a cycle");
    } catch (const CycleError& ex) {
      CHECK(ex.cycle() == std::vector<VariableId>{var("A"), var("B"), var("A")});
    }
  }
  SUBCASE("self edge") { CHECK_THROWS_AS(CausalGraph::from_edges({edge("A", "A")}), CycleError); }
  SUBCASE("dangling endpoint") {
    CHECK_THROWS_AS(CausalGraph({var("A")}, {edge("A", "B")}), ModelError);
  }
}

TEST_CASE("intervention values are atomic") {
  CHECK_THROWS_AS(Intervention(var("MS"), ValueTerm::sum({atom("a"), atom("b")})), ModelError);
  CHECK_THROWS_AS(Intervention(var("MS"), ValueTerm::complement(atom("a"))), ModelError);
}

TEST_CASE("intervention expression requires its variables to be graph nodes") {
  CHECK_THROWS_AS(InterventionExpr(loan_graph(), loan_factual(), Intervention{var("Zip"), atom("1")}), ModelError);
  CHECK_THROWS_AS(InterventionExpr(loan_graph(), DataPoint{{attr("Zip", "1")}}, Intervention{var("MS"), atom("d")}),
                  ModelError);
}

TEST_CASE("probability") {
  CHECK(Probability::parse_decimal("0.60") == Probability::ratio(3, 5));
  CHECK(Probability::parse_decimal("1") == Probability::one());
  CHECK(Probability::parse_decimal("0.000001") == Probability::ratio(1, 1'000'000));
  CHECK_THROWS_AS(Probability::parse_decimal("0.0000001"), ModelError);
  CHECK_THROWS_AS(Probability::parse_decimal("1.2"), ModelError);
  CHECK_THROWS_AS(Probability::parse_decimal(".5"), ModelError);
  CHECK_THROWS_AS(Probability::parse_decimal("0."), ModelError);
  CHECK_THROWS_AS(Probability::ratio(3, 2), ModelError);

  CHECK(Probability::ratio(3, 5).to_string() == "0.60");
  CHECK(Probability::ratio(1, 10).to_string() == "0.10");
  CHECK(Probability::ratio(1, 8).to_string() == "0.125");
  CHECK(Probability::ratio(1, 3).to_string() == "1/3");
  CHECK(Probability::ratio(1, 128).to_string() == "1/128");
  CHECK(Probability::zero().to_string() == "0");
  CHECK(Probability::one().to_string() == "1");
  CHECK(abs_difference(Probability::ratio(3, 5), Probability::ratio(1, 2)) == Probability::ratio(1, 10));
}

TEST_CASE("judgment invariants and multiset equality") {
  const auto e = InterventionExpr{loan_graph(), loan_factual(), Intervention{var("MS"), atom("div")}};
  CHECK_THROWS_AS(Judgment({e, e}, var("Loan"), atom("yes"), Probability::one()), ModelError);
  CHECK_THROWS_AS(Judgment({attr("Loan", "no")}, var("Loan"), atom("yes"), Probability::one()), ModelError);

  Judgment a{{attr("A", "x"), edge("A", "B"), attr("C", "y")}, var("T"), atom("t"), Probability::ratio(1, 2)};
  Judgment b{{attr("C", "y"), attr("A", "x"), edge("A", "B")}, var("T"), atom("t"), Probability::ratio(1, 2)};
  Judgment c{{attr("C", "y"), attr("A", "x"), edge("A", "B"), attr("A", "x")}, var("T"), atom("t"),
             Probability::ratio(1, 2)};
  Judgment d{{attr("A", "x"), edge("A", "B"), attr("C", "y")}, var("T"), atom("t"), Probability::ratio(1, 3)};
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK_FALSE(a == d);
}
