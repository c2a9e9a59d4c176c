#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include "ltlground/buchi.hpp"
#include "ltlground/formula.hpp"
#include "support/fuzz.hpp"

using namespace ltlground;

namespace {

LassoTrace make_lasso(const std::vector<std::string>& alphabet,
                      const std::vector<std::vector<std::string>>& prefix,
                      const std::vector<std::vector<std::string>>& cycle) {
  LassoTrace t;
  t.alphabet = alphabet;
  for (const auto& s : prefix) t.prefix.push_back(valuation_from_props(alphabet, s));
  for (const auto& s : cycle) t.cycle.push_back(valuation_from_props(alphabet, s));
  return t;
}

}  // namespace

TEST_CASE("eval_lasso hand-checked cases") {
  // F a, prefix=[{}], cycle=[{a}] -> true
  CHECK(eval_lasso(parse_prefix("F a"), make_lasso({"a"}, {{}}, {{"a"}})));
  // G a, prefix=[{a}], cycle=[{}] -> false
  CHECK(!eval_lasso(parse_prefix("G a"), make_lasso({"a"}, {{"a"}}, {{}})));
  // U a b, prefix=[{a},{a,b}], cycle=[{}] -> true
  CHECK(eval_lasso(parse_prefix("U a b"), make_lasso({"a", "b"}, {{"a"}, {"a", "b"}}, {{}})));

  // strong until requires the right side to eventually hold
  CHECK(!eval_lasso(parse_prefix("U a b"), make_lasso({"a", "b"}, {}, {{"a"}})));
  // weak until does not
  CHECK(eval_lasso(parse_prefix("W a b"), make_lasso({"a", "b"}, {}, {{"a"}})));
  // strong release: a M b = b U (a & b)
  CHECK(eval_lasso(parse_prefix("M a b"), make_lasso({"a", "b"}, {{"b"}}, {{"a", "b"}})));
  CHECK(!eval_lasso(parse_prefix("M a b"), make_lasso({"a", "b"}, {}, {{"b"}})));
  // next
  CHECK(eval_lasso(parse_prefix("X a"), make_lasso({"a"}, {{}}, {{"a"}})));
  CHECK(!eval_lasso(parse_prefix("X a"), make_lasso({"a"}, {{"a"}}, {{}})));
  // G F a on a cycle containing a
  CHECK(eval_lasso(parse_prefix("G F a"), make_lasso({"a"}, {}, {{}, {"a"}})));
  CHECK(!eval_lasso(parse_prefix("G F a"), make_lasso({"a"}, {{"a"}}, {{}})));
}

TEST_CASE("to_buchi basics") {
  // G ! a accepts exactly traces where a never holds
  BuchiAutomaton never = to_buchi(parse_prefix("G ! a"));
  CHECK(accepts_lasso(never, make_lasso({"a"}, {}, {{}})));
  CHECK(!accepts_lasso(never, make_lasso({"a"}, {{}}, {{"a"}})));
  CHECK(!accepts_lasso(never, make_lasso({"a"}, {{"a"}}, {{}})));

  BuchiAutomaton fa = to_buchi(parse_prefix("F a"));
  CHECK(accepts_lasso(fa, make_lasso({"a"}, {{}, {"a"}}, {{}})));
  CHECK(!accepts_lasso(fa, make_lasso({"a"}, {{}}, {{}})));

  // contradiction has the empty language
  CHECK(is_empty(to_buchi(parse_prefix("& F a G ! a"))));
  CHECK(!is_empty(fa));
}

TEST_CASE("emptiness witnesses satisfy the formula") {
  for (const char* text : {"F a", "G a", "U a b", "& F a F b", "G F a", "W a b",
                           "M a b", "G i a X b", "& F a G ! b"}) {
    FormulaPtr f = parse_prefix(text);
    auto w = find_accepting_lasso(to_buchi(f));
    REQUIRE(w.has_value());
    CAPTURE(text);
    CAPTURE(lasso_to_string(*w));
    CHECK(eval_lasso(f, *w));
  }
}

TEST_CASE("equivalence basics") {
  CHECK(equivalent(parse_prefix("F a"), parse_prefix("! G ! a")));
  auto r = check_equivalent(parse_prefix("F a"), parse_prefix("F b"));
  CHECK(!r.equivalent);
  REQUIRE(r.witness.has_value());
  // the witness distinguishes the two formulas
  bool fa = eval_lasso(parse_prefix("F a"), *r.witness);
  bool fb = eval_lasso(parse_prefix("F b"), *r.witness);
  CHECK(fa != fb);

  // W desugaring: a W b = a U (b | G a)
  CHECK(equivalent(parse_prefix("W a b"),
                   f_until(f_prop("a"), f_or(f_prop("b"), f_always(f_prop("a"))))));
  // M desugaring: a M b = b U (a & b)
  CHECK(equivalent(parse_prefix("M a b"),
                   f_until(f_prop("b"), f_and(f_prop("a"), f_prop("b")))));
}

TEST_CASE("desugar preserves the language") {
  testing::FormulaFuzzer fuzz(4242, {"a", "b", "c"}, 5);
  for (int i = 0; i < 60; ++i) {
    FormulaPtr f = fuzz.next_sized(10);
    CAPTURE(print_prefix(f));
    CHECK(equivalent(f, desugar(f)));
  }
}

TEST_CASE("f and not f is empty") {
  testing::FormulaFuzzer fuzz(31337, {"a", "b"}, 5);
  for (int i = 0; i < 60; ++i) {
    FormulaPtr f = fuzz.next_sized(10);
    CAPTURE(print_prefix(f));
    CHECK(is_empty(to_buchi(f_and(f, f_not(f)))));
  }
}

TEST_CASE("equivalence is an equivalence relation (spot checks)") {
  testing::FormulaFuzzer fuzz(555, {"a", "b"}, 4);
  std::vector<FormulaPtr> fs;
  for (int i = 0; i < 8; ++i) fs.push_back(fuzz.next_sized(8));
  EquivalenceChecker checker;
  for (const auto& f : fs) CHECK(checker.equivalent(f, f));  // reflexive
  for (const auto& f : fs)
    for (const auto& g : fs) CHECK(checker.equivalent(f, g) == checker.equivalent(g, f));
  for (const auto& f : fs)
    for (const auto& g : fs)
      for (const auto& h : fs)
        if (checker.equivalent(f, g) && checker.equivalent(g, h))
          CHECK(checker.equivalent(f, h));
}

TEST_CASE("skeleton back-substitution is equivalent") {
  testing::FormulaFuzzer fuzz(808, {"walmart", "chase", "cvs"}, 5);
  for (int i = 0; i < 40; ++i) {
    FormulaPtr f = fuzz.next_sized(10);
    auto r = skeletonize(f);
    std::map<std::string, std::string> inverse;
    for (const auto& [k, v] : r.renaming) inverse[v] = k;
    CHECK(equivalent(f, substitute(r.skeleton.formula, inverse)));
  }
}

TEST_CASE("cached checker agrees with the direct construction") {
  testing::FormulaFuzzer fuzz(2024, {"a", "b"}, 4);
  EquivalenceChecker checker;
  for (int i = 0; i < 40; ++i) {
    FormulaPtr f = fuzz.next_sized(8);
    FormulaPtr g = fuzz.next_sized(8);
    CHECK(checker.equivalent(f, g) == equivalent(f, g));
  }
}

TEST_CASE("oracle agreement: membership equals eval_lasso on all short lassos") {
  // smoke-scale version of the acceptance run (which uses >= 10,000 formulas)
  testing::FormulaFuzzer fuzz1(7, {"a"}, 5);
  testing::FormulaFuzzer fuzz2(8, {"a", "b"}, 5);
  auto lassos1 = testing::enumerate_lassos({"a"}, 2, 2);
  auto lassos2 = testing::enumerate_lassos({"a", "b"}, 2, 2);
  for (int i = 0; i < 120; ++i) {
    FormulaPtr f = fuzz1.next_sized(12);
    BuchiAutomaton a = to_buchi(f, std::vector<std::string>{"a"});
    for (const auto& t : lassos1) {
      CAPTURE(print_prefix(f));
      CAPTURE(lasso_to_string(t));
      REQUIRE(accepts_lasso(a, t) == eval_lasso(f, t));
    }
  }
  for (int i = 0; i < 40; ++i) {
    FormulaPtr f = fuzz2.next_sized(12);
    BuchiAutomaton a = to_buchi(f, std::vector<std::string>{"a", "b"});
    for (const auto& t : lassos2) {
      CAPTURE(print_prefix(f));
      CAPTURE(lasso_to_string(t));
      REQUIRE(accepts_lasso(a, t) == eval_lasso(f, t));
    }
  }
}

TEST_CASE("formula too large") {
  // deeply alternating formula with a tiny budget
  FormulaPtr f = parse_prefix("a");
  for (int i = 0; i < 12; ++i) f = f_until(f_next(f), f_or(f, f_not(f_prop("a"))));
  CHECK_THROWS_AS(to_buchi(f, std::size_t(8)), FormulaTooLarge);
}

TEST_CASE("automaton dumps") {
  BuchiAutomaton a = to_buchi(parse_prefix("F a"));
  std::string j = buchi_to_json(a);
  CHECK(j.find("\"alphabet\"") != std::string::npos);
  CHECK(j.find("\"constraint\"") != std::string::npos);
  std::string d = buchi_to_dot(a);
  CHECK(d.find("digraph") != std::string::npos);
  CHECK(d.find("doublecircle") != std::string::npos);
}

TEST_CASE("parallel equivalence checks share no mutable state") {
  std::vector<FormulaPtr> fs = {parse_prefix("F a"), parse_prefix("! G ! a"),
                                parse_prefix("G F a"), parse_prefix("F G a")};
  std::atomic<int> failures{0};
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k)
    threads.emplace_back([&, k] {
      for (int i = 0; i < 10; ++i) {
        bool eq = equivalent(fs[k % fs.size()], fs[(k + 1) % fs.size()]);
        bool expect = (k % fs.size() == 0 && (k + 1) % fs.size() == 1) ||
                      (k % fs.size() == 1 && (k + 1) % fs.size() == 0);
        if (eq != expect) ++failures;
      }
    });
  for (auto& t : threads) t.join();
  CHECK(failures == 0);
}
