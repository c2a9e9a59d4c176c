#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ltlground/patterns.hpp"
#include "support/fuzz.hpp"

using namespace ltlground;

TEST_CASE("instantiate basic families") {
  FormulaPtr v2 = instantiate({PatternFamily::Visit, 2}, {"p1", "p2"});
  CHECK(structurally_equal(v2, f_and(f_eventually(f_prop("p1")), f_eventually(f_prop("p2")))));

  FormulaPtr s2 = instantiate({PatternFamily::SequenceVisit, 2}, {"p1", "p2"});
  CHECK(structurally_equal(s2, f_eventually(f_and(f_prop("p1"), f_eventually(f_prop("p2"))))));

  CHECK(print_prefix(instantiate({PatternFamily::Wait, 2}, {"a", "b"})) == "W a b");
  CHECK(print_prefix(instantiate({PatternFamily::PastAvoidance, 2}, {"a", "b"})) == "W ! a b");
  CHECK(print_prefix(instantiate({PatternFamily::BoundDelay, 2}, {"a", "b"})) == "G e a X b");
  CHECK(print_prefix(instantiate({PatternFamily::FutureAvoidance, 2}, {"a", "b"})) ==
        "G i a X G ! b");
}

TEST_CASE("instantiate arity errors") {
  CHECK_THROWS_AS(instantiate({PatternFamily::Visit, 2}, {"a"}), ArityMismatch);
  CHECK_THROWS_AS(instantiate({PatternFamily::Visit, 6}, {"a", "b", "c", "d", "h", "f"}),
                  ArityMismatch);
  CHECK_THROWS_AS(instantiate({PatternFamily::Wait, 2}, {"a", "a"}), ArityMismatch);
  CHECK_THROWS_AS(instantiate({PatternFamily::SequenceVisit, 1}, {"a"}), ArityMismatch);
}

TEST_CASE("restricted avoidance matches the catalog forms") {
  // at least one / at most one / exactly one visit
  CHECK(print_prefix(visits_at_least("a", 2)) == "F & a U a & ! a U ! a F a");
  CHECK(print_prefix(visits_at_most("a", 1)) == "! F & a U a & ! a U ! a F a");
  CHECK(print_prefix(visits_exactly("a", 1)) == "M a | ! a G | a G ! a");
  CHECK(print_prefix(visits_exactly("a", 2)) ==
        "M & a F & ! a F a | ! a G | a G | ! a G | a G ! a");

  // the exactly-three form used in the grounded prompt
  std::string prompt =
      "M & seybolt_park F & ! seybolt_park F & seybolt_park F & ! seybolt_park F seybolt_park "
      "| ! seybolt_park G | seybolt_park G | ! seybolt_park G | seybolt_park G "
      "| ! seybolt_park G | seybolt_park G ! seybolt_park";
  FormulaPtr expected = parse_prefix(prompt);
  FormulaPtr built =
      instantiate({PatternFamily::ExactRestrictedAvoidance, 3}, {"seybolt_park"});
  CHECK(structurally_equal(built, expected));
}

TEST_CASE("visit counting semantics on concrete lassos") {
  auto blocks = [](const std::vector<int>& bits) {
    LassoTrace t;
    t.alphabet = {"a"};
    for (int b : bits) t.prefix.push_back(b ? 1 : 0);
    t.cycle = {0};
    return t;
  };
  // two separate visits
  LassoTrace two = blocks({0, 1, 0, 1, 0});
  CHECK(eval_lasso(visits_at_least("a", 2), two));
  CHECK(!eval_lasso(visits_at_least("a", 3), two));
  CHECK(eval_lasso(visits_at_most("a", 2), two));
  CHECK(!eval_lasso(visits_at_most("a", 1), two));
  CHECK(eval_lasso(visits_exactly("a", 2), two));
  CHECK(!eval_lasso(visits_exactly("a", 1), two));
  CHECK(!eval_lasso(visits_exactly("a", 3), two));
  // one long visit is still one visit
  LassoTrace one = blocks({0, 1, 1, 1, 0});
  CHECK(eval_lasso(visits_exactly("a", 1), one));
  CHECK(!eval_lasso(visits_at_least("a", 2), one));
}

TEST_CASE("exactly-n equals at-least-n and at-most-n") {
  for (int n = 1; n <= 3; ++n) {
    CHECK(equivalent(visits_exactly("a", n),
                     f_and(visits_at_least("a", n), visits_at_most("a", n))));
  }
}

TEST_CASE("all_templates") {
  const auto& ts = all_templates();
  CHECK(ts.size() == 47);
  const TemplateEntry* v1 = find_template("visit_1");
  REQUIRE(v1 != nullptr);
  CHECK(print_prefix(v1->skeleton.formula) == "F a");
  // ids unique
  std::set<std::string> ids;
  for (const auto& t : ts) ids.insert(t.id);
  CHECK(ids.size() == 47);
  // every skeleton is canonical and equivalent to its instantiation
  for (const auto& t : ts) CHECK(is_canonical_skeleton(t.skeleton.formula));
  // prop counts span 1..5 and prefix lengths span 2..67
  std::size_t min_len = 1000, max_len = 0;
  for (const auto& t : ts) {
    std::size_t len = formula_size(t.skeleton.formula);
    min_len = std::min(min_len, len);
    max_len = std::max(max_len, len);
  }
  CHECK(min_len == 2);
  CHECK(max_len == 67);
}

TEST_CASE("classify") {
  EquivalenceChecker checker;
  TemplateClassifier cls(checker);
  CHECK(cls.classify(parse_prefix("& F a F b")) == std::string("visit_2"));
  CHECK(cls.classify(parse_prefix("! G ! a")) == std::string("visit_1"));
  CHECK(cls.classify(parse_prefix("X X a")) == std::nullopt);
  CHECK(cls.classify(parse_prefix("F & walmart F chase")) == std::string("sequence_visit_2"));
  // permuted propositions map back to the same template
  CHECK(cls.classify(instantiate({PatternFamily::OrderedVisit, 3}, {"c", "a", "b"})) ==
        std::string("ordered_visit_3"));
}

TEST_CASE("instantiate then skeletonize equals the stored skeleton") {
  for (const auto& t : all_templates()) {
    std::vector<std::string> props;
    int k = template_prop_count(t.tmpl);
    for (int i = 0; i < k; ++i) props.push_back("x" + std::to_string(9 - i));
    FormulaPtr inst = instantiate(t.tmpl, props);
    CHECK(structurally_equal(skeletonize(inst).skeleton.formula, t.skeleton.formula));
  }
}

TEST_CASE("permutation invariance of unordered families") {
  std::vector<std::string> ps = {"a", "b", "c"};
  std::vector<std::string> rev = {"c", "a", "b"};
  for (PatternFamily fam :
       {PatternFamily::Visit, PatternFamily::Patrolling, PatternFamily::GlobalAvoidance}) {
    CHECK(equivalent(instantiate({fam, 3}, ps), instantiate({fam, 3}, rev)));
  }
  for (PatternFamily fam : {PatternFamily::SequenceVisit, PatternFamily::OrderedVisit,
                            PatternFamily::StrictlyOrderedVisit}) {
    std::vector<std::string> two = {"a", "b"};
    std::vector<std::string> swapped = {"b", "a"};
    CHECK(!equivalent(instantiate({fam, 2}, two), instantiate({fam, 2}, swapped)));
  }
}

TEST_CASE("ordered-visit strength hierarchy") {
  // L(stronger) subset of L(weaker): stronger & !weaker is empty
  for (int n = 2; n <= 3; ++n) {
    std::vector<std::string> props(canonical_props().begin(), canonical_props().begin() + n);
    FormulaPtr strict = instantiate({PatternFamily::StrictlyOrderedVisit, n}, props);
    FormulaPtr ordered = instantiate({PatternFamily::OrderedVisit, n}, props);
    FormulaPtr seq = instantiate({PatternFamily::SequenceVisit, n}, props);
    CHECK(is_empty(to_buchi(f_and(strict, f_not(ordered)))));
    CHECK(is_empty(to_buchi(f_and(ordered, f_not(seq)))));
    // and the inclusions are strict
    CHECK(!is_empty(to_buchi(f_and(ordered, f_not(strict)))));
    CHECK(!is_empty(to_buchi(f_and(seq, f_not(ordered)))));
  }
}

TEST_CASE("templates json") {
  std::string j = templates_to_json();
  CHECK(j.find("\"visit_1\"") != std::string::npos);
  CHECK(j.find("\"skeleton\": \"F a\"") != std::string::npos);
  CHECK(j.find("\"exact_restricted_avoidance_5\"") != std::string::npos);
}
