#ifndef LTLGROUND_PATTERNS_HPP
#define LTLGROUND_PATTERNS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltlground/buchi.hpp"
#include "ltlground/formula.hpp"

namespace ltlground {

enum class PatternFamily {
  Visit,
  SequenceVisit,
  OrderedVisit,
  StrictlyOrderedVisit,
  Patrolling,
  BoundDelay,
  DelayedReaction,
  PromptReaction,
  Wait,
  PastAvoidance,
  FutureAvoidance,
  GlobalAvoidance,
  UpperRestrictedAvoidance,
  LowerRestrictedAvoidance,
  ExactRestrictedAvoidance,
};

const char* family_name(PatternFamily f);
std::optional<PatternFamily> family_from_name(const std::string& name);

// A pattern family with its parameter n: the waypoint count for the
// multi-waypoint families, the visit count for the restricted-avoidance
// families (which always take a single waypoint), fixed 2 for the
// reaction/wait/avoidance-pair families.
struct PatternTemplate {
  PatternFamily family;
  int n;
};

// Number of propositions an instantiation takes.
int template_prop_count(const PatternTemplate& t);

// Legal n range for the family, as configured for the 47-template set.
std::pair<int, int> family_arity_range(PatternFamily f);

// Builds the family's formula over the given propositions.  Throws
// ArityMismatch when |props| differs from template_prop_count or n is out
// of the family's range, or when props repeat.
FormulaPtr instantiate(const PatternTemplate& t, const std::vector<std::string>& props);

// Separate-visit counting blocks shared by the restricted-avoidance
// families (a visit is a maximal contiguous stretch where the proposition
// holds).
FormulaPtr visits_at_least(const std::string& prop, int n);
FormulaPtr visits_at_most(const std::string& prop, int n);
FormulaPtr visits_exactly(const std::string& prop, int n);

struct TemplateEntry {
  std::string id;
  PatternTemplate tmpl;
  Skeleton skeleton;  // instantiation over the canonical propositions
};

// The 47 lifted templates: every family over its configured arity range.
// Pairwise semantic inequivalence is enforced by the acceptance suite.
const std::vector<TemplateEntry>& all_templates();

const TemplateEntry* find_template(const std::string& id);

// templates.json payload: id, family, n, prefix-format skeleton text.
std::string templates_to_json();

// Maps formulas to the unique template with a semantically equivalent
// skeleton; nullopt when no template matches.  Results are memoized by
// skeleton text.
class TemplateClassifier {
 public:
  explicit TemplateClassifier(EquivalenceChecker& checker) : checker_(checker) {}

  std::optional<std::string> classify(const FormulaPtr& f);

 private:
  EquivalenceChecker& checker_;
  std::map<std::string, std::optional<std::string>> memo_;
};

}  // namespace ltlground

#endif
