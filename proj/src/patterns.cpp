#include "ltlground/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

namespace ltlground {

using json = nlohmann::json;

const char* family_name(PatternFamily f) {
  switch (f) {
    case PatternFamily::Visit: return "Visit";
    case PatternFamily::SequenceVisit: return "SequenceVisit";
    case PatternFamily::OrderedVisit: return "OrderedVisit";
    case PatternFamily::StrictlyOrderedVisit: return "StrictlyOrderedVisit";
    case PatternFamily::Patrolling: return "Patrolling";
    case PatternFamily::BoundDelay: return "BoundDelay";
    case PatternFamily::DelayedReaction: return "DelayedReaction";
    case PatternFamily::PromptReaction: return "PromptReaction";
    case PatternFamily::Wait: return "Wait";
    case PatternFamily::PastAvoidance: return "PastAvoidance";
    case PatternFamily::FutureAvoidance: return "FutureAvoidance";
    case PatternFamily::GlobalAvoidance: return "GlobalAvoidance";
    case PatternFamily::UpperRestrictedAvoidance: return "UpperRestrictedAvoidance";
    case PatternFamily::LowerRestrictedAvoidance: return "LowerRestrictedAvoidance";
    case PatternFamily::ExactRestrictedAvoidance: return "ExactRestrictedAvoidance";
  }
  return "";
}

std::optional<PatternFamily> family_from_name(const std::string& name) {
  static const std::vector<PatternFamily> all = {
      PatternFamily::Visit, PatternFamily::SequenceVisit, PatternFamily::OrderedVisit,
      PatternFamily::StrictlyOrderedVisit, PatternFamily::Patrolling, PatternFamily::BoundDelay,
      PatternFamily::DelayedReaction, PatternFamily::PromptReaction, PatternFamily::Wait,
      PatternFamily::PastAvoidance, PatternFamily::FutureAvoidance,
      PatternFamily::GlobalAvoidance, PatternFamily::UpperRestrictedAvoidance,
      PatternFamily::LowerRestrictedAvoidance, PatternFamily::ExactRestrictedAvoidance};
  for (PatternFamily f : all)
    if (name == family_name(f)) return f;
  return std::nullopt;
}

int template_prop_count(const PatternTemplate& t) {
  switch (t.family) {
    case PatternFamily::BoundDelay:
    case PatternFamily::DelayedReaction:
    case PatternFamily::PromptReaction:
    case PatternFamily::Wait:
    case PatternFamily::PastAvoidance:
    case PatternFamily::FutureAvoidance:
      return 2;
    case PatternFamily::UpperRestrictedAvoidance:
    case PatternFamily::LowerRestrictedAvoidance:
    case PatternFamily::ExactRestrictedAvoidance:
      return 1;
    default:
      return t.n;
  }
}

std::pair<int, int> family_arity_range(PatternFamily f) {
  switch (f) {
    case PatternFamily::Visit:
    case PatternFamily::Patrolling:
    case PatternFamily::GlobalAvoidance:
    case PatternFamily::UpperRestrictedAvoidance:
    case PatternFamily::ExactRestrictedAvoidance:
      return {1, 5};
    case PatternFamily::SequenceVisit:
    case PatternFamily::OrderedVisit:
    case PatternFamily::StrictlyOrderedVisit:
    case PatternFamily::LowerRestrictedAvoidance:
      // n=1 collapses to Visit(1); the configured set starts at 2
      return {2, 5};
    default:
      return {2, 2};
  }
}

namespace {

FormulaPtr conj(std::vector<FormulaPtr> parts) {
  FormulaPtr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = f_and(parts[i], acc);
  return acc;
}

}  // namespace

FormulaPtr visits_at_least(const std::string& prop, int n) {
  if (n < 1) throw ArityMismatch("visits_at_least: n must be >= 1");
  FormulaPtr p = f_prop(prop), np = f_not(f_prop(prop));
  FormulaPtr acc = f_eventually(p);  // one visit
  for (int k = 2; k <= n; ++k)
    acc = f_eventually(f_and(p, f_until(p, f_and(np, f_until(np, acc)))));
  return acc;
}

FormulaPtr visits_at_most(const std::string& prop, int n) {
  if (n < 1) throw ArityMismatch("visits_at_most: n must be >= 1");
  return f_not(visits_at_least(prop, n + 1));
}

FormulaPtr visits_exactly(const std::string& prop, int n) {
  if (n < 1) throw ArityMismatch("visits_exactly: n must be >= 1");
  FormulaPtr p = f_prop(prop), np = f_not(f_prop(prop));
  // left side: the visit blocks happen (alternating F chain of depth 2n-1)
  FormulaPtr left = p;
  for (int k = 2; k <= 2 * n - 1; ++k)
    left = f_and(k % 2 == 1 ? p : np, f_eventually(left));
  // right side: eventually the proposition settles after the n-th block
  FormulaPtr right = np;
  for (int k = 1; k <= 2 * n; ++k)
    right = f_or(k % 2 == 1 ? p : np, f_always(right));
  // note the alternation leaves `right` with a leading not-prop disjunct
  return f_strong_release(left, right);
}

FormulaPtr instantiate(const PatternTemplate& t, const std::vector<std::string>& props) {
  auto [lo, hi] = family_arity_range(t.family);
  if (t.n < lo || t.n > hi)
    throw ArityMismatch(std::string(family_name(t.family)) + ": n=" + std::to_string(t.n) +
                        " outside legal range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  if (static_cast<int>(props.size()) != template_prop_count(t))
    throw ArityMismatch(std::string(family_name(t.family)) + ": expected " +
                        std::to_string(template_prop_count(t)) + " propositions, got " +
                        std::to_string(props.size()));
  std::set<std::string> distinct(props.begin(), props.end());
  if (distinct.size() != props.size())
    throw ArityMismatch("instantiate: propositions must be distinct");

  const int n = t.n;
  switch (t.family) {
    case PatternFamily::Visit: {
      std::vector<FormulaPtr> parts;
      for (const auto& p : props) parts.push_back(f_eventually(f_prop(p)));
      return conj(std::move(parts));
    }
    case PatternFamily::SequenceVisit: {
      FormulaPtr acc = f_eventually(f_prop(props.back()));
      for (std::size_t i = props.size() - 1; i-- > 0;)
        acc = f_eventually(f_and(f_prop(props[i]), acc));
      return acc;
    }
    case PatternFamily::OrderedVisit: {
      std::vector<FormulaPtr> parts = {f_eventually(f_prop(props.back()))};
      for (int i = 0; i + 1 < n; ++i)
        parts.push_back(f_until(f_not(f_prop(props[i + 1])), f_prop(props[i])));
      return conj(std::move(parts));
    }
    case PatternFamily::StrictlyOrderedVisit: {
      std::vector<FormulaPtr> parts = {f_eventually(f_prop(props.back()))};
      for (int i = 0; i + 1 < n; ++i)
        parts.push_back(f_until(f_not(f_prop(props[i + 1])), f_prop(props[i])));
      for (int i = 0; i + 1 < n; ++i) {
        FormulaPtr pi = f_prop(props[i]), npi = f_not(f_prop(props[i]));
        parts.push_back(f_until(npi, f_until(pi, f_until(npi, f_prop(props[i + 1])))));
      }
      return conj(std::move(parts));
    }
    case PatternFamily::Patrolling: {
      std::vector<FormulaPtr> parts;
      for (const auto& p : props) parts.push_back(f_always(f_eventually(f_prop(p))));
      return conj(std::move(parts));
    }
    case PatternFamily::BoundDelay:
      return f_always(f_equiv(f_prop(props[0]), f_next(f_prop(props[1]))));
    case PatternFamily::DelayedReaction:
      return f_always(f_implies(f_prop(props[0]), f_eventually(f_prop(props[1]))));
    case PatternFamily::PromptReaction:
      return f_always(f_implies(f_prop(props[0]), f_next(f_prop(props[1]))));
    case PatternFamily::Wait:
      return f_weak_until(f_prop(props[0]), f_prop(props[1]));
    case PatternFamily::PastAvoidance:
      return f_weak_until(f_not(f_prop(props[0])), f_prop(props[1]));
    case PatternFamily::FutureAvoidance:
      return f_always(
          f_implies(f_prop(props[0]), f_next(f_always(f_not(f_prop(props[1]))))));
    case PatternFamily::GlobalAvoidance: {
      std::vector<FormulaPtr> parts;
      for (const auto& p : props) parts.push_back(f_always(f_not(f_prop(p))));
      return conj(std::move(parts));
    }
    case PatternFamily::UpperRestrictedAvoidance:
      return visits_at_most(props[0], n);
    case PatternFamily::LowerRestrictedAvoidance:
      return visits_at_least(props[0], n);
    case PatternFamily::ExactRestrictedAvoidance:
      return visits_exactly(props[0], n);
  }
  throw Error("instantiate: unreachable");
}

namespace {

std::string snake_case(PatternFamily f) {
  std::string name = family_name(f);
  std::string out;
  for (char c : name) {
    if (std::isupper(static_cast<unsigned char>(c)) && !out.empty()) out += '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool family_has_fixed_arity(PatternFamily f) {
  auto [lo, hi] = family_arity_range(f);
  return lo == hi;
}

std::vector<TemplateEntry> build_templates() {
  static const std::vector<PatternFamily> order = {
      PatternFamily::Visit, PatternFamily::SequenceVisit, PatternFamily::OrderedVisit,
      PatternFamily::StrictlyOrderedVisit, PatternFamily::Patrolling, PatternFamily::BoundDelay,
      PatternFamily::DelayedReaction, PatternFamily::PromptReaction, PatternFamily::Wait,
      PatternFamily::PastAvoidance, PatternFamily::FutureAvoidance,
      PatternFamily::GlobalAvoidance, PatternFamily::UpperRestrictedAvoidance,
      PatternFamily::LowerRestrictedAvoidance, PatternFamily::ExactRestrictedAvoidance};
  std::vector<TemplateEntry> out;
  const auto& canon = canonical_props();
  for (PatternFamily fam : order) {
    auto [lo, hi] = family_arity_range(fam);
    for (int n = lo; n <= hi; ++n) {
      PatternTemplate t{fam, n};
      std::vector<std::string> props(canon.begin(), canon.begin() + template_prop_count(t));
      // skeletonize: ordered families mention the last waypoint first, so
      // the canonical-instantiation and the skeleton differ structurally
      Skeleton skel = skeletonize(instantiate(t, props)).skeleton;
      std::string id = snake_case(fam);
      if (!family_has_fixed_arity(fam)) id += "_" + std::to_string(n);
      out.push_back(TemplateEntry{std::move(id), t, std::move(skel)});
    }
  }
  if (out.size() != 47) throw Error("template set must contain exactly 47 entries");
  return out;
}

}  // namespace

const std::vector<TemplateEntry>& all_templates() {
  static const std::vector<TemplateEntry> templates = build_templates();
  return templates;
}

const TemplateEntry* find_template(const std::string& id) {
  for (const auto& t : all_templates())
    if (t.id == id) return &t;
  return nullptr;
}

std::string templates_to_json() {
  json arr = json::array();
  for (const auto& t : all_templates()) {
    arr.push_back({{"id", t.id},
                   {"family", family_name(t.tmpl.family)},
                   {"n", t.tmpl.n},
                   {"prop_count", template_prop_count(t.tmpl)},
                   {"skeleton", print_prefix(t.skeleton.formula)}});
  }
  return arr.dump(2);
}

std::optional<std::string> TemplateClassifier::classify(const FormulaPtr& f) {
  Skeleton skel = skeletonize(f).skeleton;
  std::string key = print_prefix(skel.formula);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  std::optional<std::string> result;
  for (const auto& t : all_templates()) {
    if (checker_.equivalent(skel.formula, t.skeleton.formula)) {
      result = t.id;
      break;
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

}  // namespace ltlground
