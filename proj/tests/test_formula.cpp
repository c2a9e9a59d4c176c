#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "ltlground/formula.hpp"
#include "support/fuzz.hpp"

using namespace ltlground;

TEST_CASE("prefix parsing of prompt examples") {
  FormulaPtr f = parse_prefix("F b");
  CHECK(f->op() == Op::Finally);
  CHECK(f->left()->op() == Op::Prop);
  CHECK(f->left()->prop_name() == "b");

  FormulaPtr g = parse_prefix("& F b F h");
  CHECK(g->op() == Op::And);
  CHECK(structurally_equal(g->left(), f_eventually(f_prop("b"))));
  CHECK(structurally_equal(g->right(), f_eventually(f_prop("h"))));

  CHECK(structurally_equal(parse_prefix("a"), f_prop("a")));

  FormulaPtr h = parse_prefix("G e b X h");
  CHECK(structurally_equal(h, f_always(f_equiv(f_prop("b"), f_next(f_prop("h"))))));

  CHECK(structurally_equal(parse_prefix("U b h"), f_until(f_prop("b"), f_prop("h"))));
}

TEST_CASE("prefix parse errors") {
  CHECK_THROWS_AS(parse_prefix("U b"), UnexpectedEndOfInput);
  CHECK_THROWS_AS(parse_prefix("& F"), UnexpectedEndOfInput);
  CHECK_THROWS_AS(parse_prefix("F a b"), TrailingTokens);
  CHECK_THROWS_AS(parse_prefix(""), UnexpectedEndOfInput);
  CHECK_THROWS_AS(parse_prefix("F @x"), InvalidPropName);
}

TEST_CASE("props named i and e are rejected") {
  CHECK_THROWS_AS(f_prop("i"), InvalidPropName);
  CHECK_THROWS_AS(f_prop("e"), InvalidPropName);
  // as operators they parse fine
  CHECK(parse_prefix("i a b")->op() == Op::Implies);
  CHECK(parse_prefix("e a b")->op() == Op::Equiv);
}

TEST_CASE("prefix printing") {
  CHECK(print_prefix(f_eventually(f_prop("b"))) == "F b");
  CHECK(print_prefix(f_and(f_eventually(f_prop("b")), f_eventually(f_prop("h")))) ==
        "& F b F h");
  CHECK(print_prefix(f_until(f_prop("b"), f_prop("h"))) == "U b h");
}

TEST_CASE("infix parsing and printing") {
  FormulaPtr f = parse_infix("F(a) & (!a U b)");
  CHECK(structurally_equal(
      f, f_and(f_eventually(f_prop("a")), f_until(f_not(f_prop("a")), f_prop("b")))));
  CHECK(print_infix(f_always(f_not(f_prop("a")))) == "G(!(a))");
  CHECK(structurally_equal(parse_infix("(a)"), f_prop("a")));

  // precedence: unary > U/W/M > & > | > -> > <->
  FormulaPtr g = parse_infix("a U b & c | d -> x <-> y");
  CHECK(g->op() == Op::Equiv);
  CHECK(g->left()->op() == Op::Implies);
  CHECK(g->left()->left()->op() == Op::Or);
  CHECK(g->left()->left()->left()->op() == Op::And);
  CHECK(g->left()->left()->left()->left()->op() == Op::Until);

  CHECK_THROWS_AS(parse_infix("(a"), ParseError);
  CHECK_THROWS_AS(parse_infix("a &"), ParseError);
  CHECK_THROWS_AS(parse_infix("U a"), ParseError);
}

TEST_CASE("desugar removes abbreviations") {
  auto has_sugar = [](const FormulaPtr& f) {
    bool found = false;
    std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
      switch (g->op()) {
        case Op::Implies:
        case Op::Equiv:
        case Op::Finally:
        case Op::Globally:
        case Op::WeakUntil:
        case Op::StrongRelease:
        case Op::Release:
          found = true;
          break;
        default:
          break;
      }
      if (g->left()) walk(g->left());
      if (g->right()) walk(g->right());
    };
    walk(f);
    return found;
  };

  FormulaPtr fa = desugar(parse_prefix("F a"));
  CHECK(!has_sugar(fa));
  CHECK(structurally_equal(fa, f_until(f_or(f_prop("a"), f_not(f_prop("a"))), f_prop("a"))));

  CHECK(!has_sugar(desugar(parse_prefix("W a b"))));
  CHECK(!has_sugar(desugar(parse_prefix("M a b"))));
  CHECK(structurally_equal(desugar(parse_prefix("M a b")),
                           f_until(f_prop("b"), f_and(f_prop("a"), f_prop("b")))));
  CHECK(!has_sugar(desugar(parse_prefix("G e a X b"))));
}

TEST_CASE("skeletonize uses the canonical sequence by first occurrence") {
  auto r1 = skeletonize(parse_prefix("F chase"));
  CHECK(print_prefix(r1.skeleton.formula) == "F a");
  CHECK(r1.renaming.at("chase") == "a");

  auto r2 = skeletonize(parse_prefix("F walmart"));
  CHECK(print_prefix(r2.skeleton.formula) == "F a");

  auto r3 = skeletonize(parse_prefix("& F b F h"));
  CHECK(print_prefix(r3.skeleton.formula) == "& F a F b");
  CHECK(r3.renaming.at("b") == "a");
  CHECK(r3.renaming.at("h") == "b");

  // 5 distinct props map to a b c d h
  auto r4 = skeletonize(parse_prefix("& F p1 & F p2 & F p3 & F p4 F p5"));
  CHECK(print_prefix(r4.skeleton.formula) == "& F a & F b & F c & F d F h");
}

TEST_CASE("skeletonize is idempotent on skeletons") {
  FormulaPtr s = parse_prefix("& F a & U ! b a F b");
  auto r = skeletonize(s);
  CHECK(structurally_equal(r.skeleton.formula, s));
  for (const auto& [k, v] : r.renaming) CHECK(k == v);
}

TEST_CASE("substitute") {
  FormulaPtr f = parse_prefix("F A");
  CHECK(print_prefix(substitute(f, {{"A", "walmart"}})) == "F walmart");

  FormulaPtr g = parse_prefix("& F A F B");
  CHECK(print_prefix(substitute(g, {{"A", "B"}, {"B", "A"}})) == "& F B F A");
  CHECK(structurally_equal(substitute(g, {{"A", "A"}, {"B", "B"}}), g));

  CHECK_THROWS_AS(substitute(f, {{"X1", "y"}}), SubstitutionError);
}

TEST_CASE("round-trip over fuzzed formulas") {
  testing::FormulaFuzzer fuzz(12345, {"a", "b", "c", "d", "h"}, 8);
  for (int i = 0; i < 500; ++i) {
    FormulaPtr f = fuzz.next();
    CAPTURE(print_prefix(f));
    CHECK(structurally_equal(parse_prefix(print_prefix(f)), f));
    CHECK(structurally_equal(parse_infix(print_infix(f)), f));
    // prefix unambiguity: token count equals node count
    std::string s = print_prefix(f);
    std::size_t tokens = 1 + std::count(s.begin(), s.end(), ' ');
    CHECK(tokens == formula_size(f));
  }
}

TEST_CASE("substitute then inverse-substitute is identity") {
  testing::FormulaFuzzer fuzz(99, {"x1", "x2", "x3"}, 6);
  for (int i = 0; i < 200; ++i) {
    FormulaPtr f = fuzz.next();
    auto r = skeletonize(f);
    std::map<std::string, std::string> inverse;
    for (const auto& [k, v] : r.renaming) inverse[v] = k;
    CHECK(structurally_equal(substitute(r.skeleton.formula, inverse), f));
  }
}

TEST_CASE("json round-trip") {
  testing::FormulaFuzzer fuzz(777, {"a", "b"}, 6);
  for (int i = 0; i < 100; ++i) {
    FormulaPtr f = fuzz.next();
    CHECK(structurally_equal(formula_from_json(formula_to_json(f)), f));
  }
  CHECK(formula_to_json(f_prop("a")) == "{\"prop\":\"a\"}");
}
