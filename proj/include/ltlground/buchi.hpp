#ifndef LTLGROUND_BUCHI_HPP
#define LTLGROUND_BUCHI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltlground/formula.hpp"

namespace ltlground {

// A valuation is the set of propositions true at an instant, encoded as a
// bitmask over a sorted alphabet.
using Valuation = std::uint32_t;

// Ultimately periodic word prefix . cycle^omega, sufficient as an
// (in)equivalence witness.
struct LassoTrace {
  std::vector<std::string> alphabet;  // sorted proposition names
  std::vector<Valuation> prefix;
  std::vector<Valuation> cycle;  // non-empty

  Valuation at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : cycle[i - prefix.size()];
  }
  std::size_t positions() const { return prefix.size() + cycle.size(); }
  std::size_t next(std::size_t i) const { return i + 1 < positions() ? i + 1 : prefix.size(); }
};

Valuation valuation_from_props(const std::vector<std::string>& alphabet,
                               const std::vector<std::string>& true_props);
std::vector<std::string> valuation_props(const std::vector<std::string>& alphabet, Valuation v);

struct BuchiAutomaton {
  // Transition constraint: conjunction of literals over the alphabet.
  // must_true == must_false == 0 encodes `true`.
  struct Transition {
    Valuation must_true = 0;
    Valuation must_false = 0;
    int target = 0;

    bool admits(Valuation v) const {
      return (v & must_true) == must_true && (v & must_false) == 0;
    }
  };

  std::vector<std::string> alphabet;  // sorted
  int num_states = 0;
  std::vector<int> initial;
  std::vector<std::vector<Transition>> transitions;  // indexed by source state
  std::vector<bool> accepting;

  // Deterministic, duplicate-free successor list under one valuation.
  std::vector<int> successors(int state, Valuation v) const;
};

// Standard LTL satisfaction on the lasso word, computed exactly by fixpoint
// evaluation over the lasso's positions.  Handles every operator directly,
// including the abbreviated ones; this is the independent brute-force
// oracle for the tableau construction.
bool eval_lasso(const FormulaPtr& f, const LassoTrace& t);

inline constexpr std::size_t kDefaultNodeBudget = 1000000;

// Tableau translation of a desugared formula (base operators plus And) to
// a Buchi automaton: negation normal form with Release as the dual of
// Until, then on-the-fly node expansion, degeneralization, and removal of
// unreachable/dead states.  Throws FormulaTooLarge past `node_budget`.
BuchiAutomaton to_buchi(const FormulaPtr& f,
                        const std::vector<std::string>& alphabet,
                        std::size_t node_budget = kDefaultNodeBudget);
BuchiAutomaton to_buchi(const FormulaPtr& f, std::size_t node_budget = kDefaultNodeBudget);

// Nested depth-first search for an accepting lasso with on-demand
// successor expansion.  Returns a witness, or nullopt when L(A) is empty.
std::optional<LassoTrace> find_accepting_lasso(const BuchiAutomaton& a);
inline bool is_empty(const BuchiAutomaton& a) { return !find_accepting_lasso(a); }

// Membership of the lasso word in L(A), decided on the product of A with
// the trace automaton.
bool accepts_lasso(const BuchiAutomaton& a, const LassoTrace& t);

// Intersection via the standard two-phase flag construction.  Both inputs
// must share one alphabet (see rebase_alphabet).
BuchiAutomaton intersect(const BuchiAutomaton& a, const BuchiAutomaton& b);

// Reindexes transition constraints onto a superset alphabet.
BuchiAutomaton rebase_alphabet(const BuchiAutomaton& a, const std::vector<std::string>& alphabet);

struct EquivResult {
  bool equivalent = false;
  std::optional<LassoTrace> witness;  // distinguishing trace when inequivalent
};

// Language equality over props(f)odot props(g): emptiness of f and !g and
// of !f and g.
EquivResult check_equivalent(const FormulaPtr& f, const FormulaPtr& g,
                             std::size_t node_budget = kDefaultNodeBudget);
inline bool equivalent(const FormulaPtr& f, const FormulaPtr& g,
                       std::size_t node_budget = kDefaultNodeBudget) {
  return check_equivalent(f, g, node_budget).equivalent;
}

// Equivalence checking with an automaton cache keyed by formula text, for
// batch workloads (template classification, split generation, scoring).
class EquivalenceChecker {
 public:
  explicit EquivalenceChecker(std::size_t node_budget = kDefaultNodeBudget)
      : budget_(node_budget) {}

  bool equivalent(const FormulaPtr& f, const FormulaPtr& g);
  EquivResult check(const FormulaPtr& f, const FormulaPtr& g);

 private:
  struct CacheEntry {
    std::vector<std::string> props;
    BuchiAutomaton pos;  // automaton of f over its own props
    BuchiAutomaton neg;  // automaton of !f
  };
  const CacheEntry& entry(const FormulaPtr& f);

  std::size_t budget_;
  std::map<std::string, CacheEntry> cache_;
};

// JSON adjacency dump with constraint formulas in prefix text, and a
// GraphViz rendering for debugging.
std::string buchi_to_json(const BuchiAutomaton& a);
std::string buchi_to_dot(const BuchiAutomaton& a);

std::string lasso_to_string(const LassoTrace& t);

}  // namespace ltlground

#endif
