#ifndef LTLGROUND_FORMULA_HPP
#define LTLGROUND_FORMULA_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ltlground/errors.hpp"

namespace ltlground {

// Operator kinds. True/False/Release exist for internal rewriting
// (desugaring, negation normal form) and never appear in parsed input.
enum class Op {
  Prop,
  True,
  False,
  Not,
  Next,
  Finally,
  Globally,
  And,
  Or,
  Implies,
  Equiv,
  Until,
  WeakUntil,
  StrongRelease,
  Release,
};

int op_arity(Op op);

// Prefix token for an operator kind ("!", "&", "|", "i", "e", "X", "F",
// "G", "U", "W", "M").  True/False/Release have no token of their own.
const char* op_token(Op op);

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable LTL syntax tree node.  Values are shareable across threads;
// every operation on them is pure.
class Formula {
 public:
  Op op() const { return op_; }
  const std::string& prop_name() const { return prop_; }
  const FormulaPtr& left() const { return left_; }
  const FormulaPtr& right() const { return right_; }
  int arity() const { return op_arity(op_); }

  static FormulaPtr make_prop(const std::string& name);
  static FormulaPtr make_const(bool value);
  static FormulaPtr make_unary(Op op, FormulaPtr child);
  static FormulaPtr make_binary(Op op, FormulaPtr lhs, FormulaPtr rhs);

 private:
  Formula(Op op, std::string prop, FormulaPtr l, FormulaPtr r)
      : op_(op), prop_(std::move(prop)), left_(std::move(l)), right_(std::move(r)) {}

  Op op_;
  std::string prop_;
  FormulaPtr left_;
  FormulaPtr right_;
};

// Convenience constructors.
FormulaPtr f_prop(const std::string& name);
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_next(FormulaPtr f);
FormulaPtr f_eventually(FormulaPtr f);
FormulaPtr f_always(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_equiv(FormulaPtr a, FormulaPtr b);
FormulaPtr f_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_weak_until(FormulaPtr a, FormulaPtr b);
FormulaPtr f_strong_release(FormulaPtr a, FormulaPtr b);
FormulaPtr f_release(FormulaPtr a, FormulaPtr b);

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

// Node count; equals the prefix token count for constant-free formulas.
std::size_t formula_size(const FormulaPtr& f);
std::size_t formula_height(const FormulaPtr& f);

// Distinct proposition names in pre-order of first occurrence.
std::vector<std::string> formula_props(const FormulaPtr& f);

// True iff `name` matches [A-Za-z0-9_]+ and is not a reserved operator token.
bool is_valid_prop_name(const std::string& name);

// --- prefix format (single-space-separated tokens) ---

FormulaPtr parse_prefix(const std::string& text);
std::string print_prefix(const FormulaPtr& f);

// --- infix format (parenthesized ASCII: ! & | -> <-> X F G U W M) ---

FormulaPtr parse_infix(const std::string& text);
std::string print_infix(const FormulaPtr& f);

// Rewrites to the base operator set {Prop, Not, Or, Next, Until} plus And.
// Truth constants are realized as tautologies over a proposition of the
// operand, so the output parses in the external token format.
FormulaPtr desugar(const FormulaPtr& f);

// A formula whose propositions follow the canonical naming sequence in
// first-occurrence order.
struct Skeleton {
  FormulaPtr formula;
};

// Canonical proposition sequence: a b c d h, then the remaining lowercase
// letters that do not collide with the reserved operator tokens `e`/`i`.
const std::vector<std::string>& canonical_props();

struct SkeletonizeResult {
  Skeleton skeleton;
  std::map<std::string, std::string> renaming;  // original name -> canonical
};

// Renames propositions to the canonical sequence by first occurrence in
// pre-order.  The formula may use at most canonical_props().size() (24)
// distinct propositions.
SkeletonizeResult skeletonize(const FormulaPtr& f);

bool is_canonical_skeleton(const FormulaPtr& f);

// Replaces every proposition per `mapping`.  The mapping must cover all
// propositions of `f`; structure is otherwise unchanged.
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, std::string>& mapping);

// --- JSON encoding: {"op": "...", "args": [...]} or {"prop": "name"} ---

std::string formula_to_json(const FormulaPtr& f);
FormulaPtr formula_from_json(const std::string& json_text);

}  // namespace ltlground

#endif
