#include "ltlground/buchi.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace ltlground {

using json = nlohmann::json;

Valuation valuation_from_props(const std::vector<std::string>& alphabet,
                               const std::vector<std::string>& true_props) {
  Valuation v = 0;
  for (const auto& p : true_props) {
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), p);
    if (it == alphabet.end() || *it != p)
      throw Error("valuation_from_props: '" + p + "' not in alphabet");
    v |= Valuation(1) << (it - alphabet.begin());
  }
  return v;
}

std::vector<std::string> valuation_props(const std::vector<std::string>& alphabet, Valuation v) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (v & (Valuation(1) << i)) out.push_back(alphabet[i]);
  return out;
}

std::vector<int> BuchiAutomaton::successors(int state, Valuation v) const {
  std::vector<int> out;
  for (const auto& t : transitions[state])
    if (t.admits(v)) out.push_back(t.target);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- lasso evaluation (independent oracle) ---

namespace {

int alphabet_index(const std::vector<std::string>& alphabet, const std::string& p) {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), p);
  if (it == alphabet.end() || *it != p) return -1;
  return static_cast<int>(it - alphabet.begin());
}

using BoolVec = std::vector<char>;

// v[i] = op(i, v[next(i)]) iterated to the least (start=0) or greatest
// (start=1) fixpoint; sound because the step function is monotone.
template <typename Step>
BoolVec fixpoint(const LassoTrace& t, bool start, Step step) {
  std::size_t n = t.positions();
  BoolVec v(n, start ? 1 : 0);
  for (std::size_t round = 0; round <= n + 1; ++round) {
    bool changed = false;
    for (std::size_t i = n; i-- > 0;) {
      char nv = step(i, v[t.next(i)]) ? 1 : 0;
      if (nv != v[i]) {
        v[i] = nv;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return v;
}

BoolVec eval_vec(const FormulaPtr& f, const LassoTrace& t) {
  std::size_t n = t.positions();
  switch (f->op()) {
    case Op::Prop: {
      int idx = alphabet_index(t.alphabet, f->prop_name());
      if (idx < 0) throw Error("eval_lasso: proposition '" + f->prop_name() + "' not in trace alphabet");
      BoolVec v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (t.at(i) >> idx) & 1;
      return v;
    }
    case Op::True:
      return BoolVec(n, 1);
    case Op::False:
      return BoolVec(n, 0);
    case Op::Not: {
      BoolVec c = eval_vec(f->left(), t);
      for (auto& x : c) x = !x;
      return c;
    }
    case Op::And: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      for (std::size_t i = 0; i < n; ++i) l[i] = l[i] && r[i];
      return l;
    }
    case Op::Or: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      for (std::size_t i = 0; i < n; ++i) l[i] = l[i] || r[i];
      return l;
    }
    case Op::Implies: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      for (std::size_t i = 0; i < n; ++i) l[i] = !l[i] || r[i];
      return l;
    }
    case Op::Equiv: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      for (std::size_t i = 0; i < n; ++i) l[i] = l[i] == r[i];
      return l;
    }
    case Op::Next: {
      BoolVec c = eval_vec(f->left(), t);
      BoolVec v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = c[t.next(i)];
      return v;
    }
    case Op::Finally: {
      BoolVec c = eval_vec(f->left(), t);
      return fixpoint(t, false, [&](std::size_t i, bool nxt) { return c[i] || nxt; });
    }
    case Op::Globally: {
      BoolVec c = eval_vec(f->left(), t);
      return fixpoint(t, true, [&](std::size_t i, bool nxt) { return c[i] && nxt; });
    }
    case Op::Until: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      return fixpoint(t, false, [&](std::size_t i, bool nxt) { return r[i] || (l[i] && nxt); });
    }
    case Op::WeakUntil: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      return fixpoint(t, true, [&](std::size_t i, bool nxt) { return r[i] || (l[i] && nxt); });
    }
    case Op::Release: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      return fixpoint(t, true, [&](std::size_t i, bool nxt) { return r[i] && (l[i] || nxt); });
    }
    case Op::StrongRelease: {
      BoolVec l = eval_vec(f->left(), t), r = eval_vec(f->right(), t);
      return fixpoint(t, false,
                      [&](std::size_t i, bool nxt) { return (l[i] && r[i]) || (r[i] && nxt); });
    }
  }
  throw Error("eval_lasso: unreachable");
}

}  // namespace

bool eval_lasso(const FormulaPtr& f, const LassoTrace& t) {
  if (t.cycle.empty()) throw Error("eval_lasso: lasso cycle must be non-empty");
  return eval_vec(f, t)[0];
}

// --- negation normal form ---

namespace {

// Pushes negations to the literals and removes every abbreviation, using
// Release as the dual of Until.  Handling F/G/W/M natively (rather than via
// the tautology realization of desugar()) keeps the closure small.
FormulaPtr to_nnf(const FormulaPtr& f, bool negated) {
  switch (f->op()) {
    case Op::Prop:
      return negated ? f_not(f) : f;
    case Op::True:
      return negated ? f_false() : f_true();
    case Op::False:
      return negated ? f_true() : f_false();
    case Op::Not:
      return to_nnf(f->left(), !negated);
    case Op::Next:
      return f_next(to_nnf(f->left(), negated));
    case Op::And: {
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_or(l, r) : f_and(l, r);
    }
    case Op::Or: {
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_and(l, r) : f_or(l, r);
    }
    case Op::Until: {
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_release(l, r) : f_until(l, r);
    }
    case Op::Release: {
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_until(l, r) : f_release(l, r);
    }
    case Op::Finally:
      return negated ? f_release(f_false(), to_nnf(f->left(), true))
                     : f_until(f_true(), to_nnf(f->left(), false));
    case Op::Globally:
      return negated ? f_until(f_true(), to_nnf(f->left(), true))
                     : f_release(f_false(), to_nnf(f->left(), false));
    case Op::WeakUntil: {
      // a W b = b R (b | a);  !(a W b) = !b U (!a & !b)
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_until(r, f_and(l, r)) : f_release(r, f_or(r, l));
    }
    case Op::StrongRelease: {
      // a M b = b U (a & b);  !(a M b) = !b R (!b | !a)
      FormulaPtr l = to_nnf(f->left(), negated), r = to_nnf(f->right(), negated);
      return negated ? f_release(r, f_or(r, l)) : f_until(r, f_and(l, r));
    }
    case Op::Implies:
      return negated ? f_and(to_nnf(f->left(), false), to_nnf(f->right(), true))
                     : f_or(to_nnf(f->left(), true), to_nnf(f->right(), false));
    case Op::Equiv: {
      FormulaPtr lp = to_nnf(f->left(), false), ln = to_nnf(f->left(), true);
      FormulaPtr rp = to_nnf(f->right(), false), rn = to_nnf(f->right(), true);
      return negated ? f_or(f_and(lp, rn), f_and(ln, rp))
                     : f_or(f_and(lp, rp), f_and(ln, rn));
    }
  }
  throw Error("to_nnf: unreachable");
}

// --- tableau construction (on-the-fly node expansion) ---

// Structural key that keeps True/False distinct from printed tautologies.
inline void structural_key(const FormulaPtr& f, std::string& out) {
  switch (f->op()) {
    case Op::Prop: out += 'p'; out += f->prop_name(); out += ';'; return;
    case Op::True: out += 'T'; return;
    case Op::False: out += 'N'; return;
    case Op::Release: out += 'R'; break;
    default: out += op_token(f->op()); break;
  }
  out += '(';
  structural_key(f->left(), out);
  if (f->right()) structural_key(f->right(), out);
  out += ')';
}

struct ClosureTable {
  std::vector<FormulaPtr> forms;
  std::vector<Op> ops;
  std::vector<int> left, right;   // child ids, -1 when absent
  std::vector<int> prop;          // alphabet index for Prop nodes
  std::unordered_map<std::string, int> by_text;

  const std::vector<std::string>* alphabet = nullptr;

  int intern(const FormulaPtr& f) {
    std::string key;
    structural_key(f, key);
    auto it = by_text.find(key);
    if (it != by_text.end()) return it->second;
    int l = -1, r = -1, p = -1;
    if (f->op() == Op::Prop) {
      p = alphabet_index(*alphabet, f->prop_name());
      if (p < 0) throw Error("to_buchi: proposition '" + f->prop_name() + "' not in alphabet");
    }
    if (f->left()) l = intern(f->left());
    if (f->right()) r = intern(f->right());
    int id = static_cast<int>(forms.size());
    forms.push_back(f);
    ops.push_back(f->op());
    left.push_back(l);
    right.push_back(r);
    prop.push_back(p);
    by_text.emplace(std::move(key), id);
    return id;
  }
};

struct TableauNode {
  std::vector<int> incoming;  // automaton state ids (0 = virtual initial)
  std::set<int> new_, old_, next_;
};

struct GeneralizedBuchi {
  // state 0 is the virtual initial state; nodes are 1..n
  std::vector<std::vector<int>> incoming;                    // per node
  std::vector<std::pair<Valuation, Valuation>> label;        // (must_true, must_false) per node
  std::vector<std::vector<char>> acc_sets;                   // per acceptance set: state membership
  int num_states = 0;
};

class TableauBuilder {
 public:
  TableauBuilder(const FormulaPtr& nnf, const std::vector<std::string>& alphabet,
                 std::size_t budget)
      : alphabet_(alphabet), budget_(budget) {
    closure_.alphabet = &alphabet_;
    root_ = closure_.intern(nnf);
  }

  GeneralizedBuchi build() {
    TableauNode start;
    start.incoming = {0};
    start.new_.insert(root_);
    process(std::move(start));
    while (!pending_.empty()) {
      TableauNode n = std::move(pending_.front());
      pending_.pop_front();
      process(std::move(n));
    }

    GeneralizedBuchi g;
    g.num_states = static_cast<int>(stored_.size()) + 1;
    g.incoming.resize(g.num_states);
    g.label.assign(g.num_states, {0, 0});
    for (std::size_t k = 0; k < stored_.size(); ++k) {
      int id = static_cast<int>(k) + 1;
      g.incoming[id] = stored_[k].incoming;
      Valuation mt = 0, mf = 0;
      for (int e : stored_[k].old_) {
        if (closure_.ops[e] == Op::Prop) mt |= Valuation(1) << closure_.prop[e];
        if (closure_.ops[e] == Op::Not) mf |= Valuation(1) << closure_.prop[closure_.left[e]];
      }
      g.label[id] = {mt, mf};
    }
    // one acceptance set per Until subformula: states where the until is
    // not pending or its right-hand side already holds
    std::vector<int> untils;
    for (std::size_t e = 0; e < closure_.ops.size(); ++e)
      if (closure_.ops[e] == Op::Until) untils.push_back(static_cast<int>(e));
    for (int u : untils) {
      std::vector<char> in_set(g.num_states, 0);
      in_set[0] = 1;
      for (std::size_t k = 0; k < stored_.size(); ++k) {
        const auto& old = stored_[k].old_;
        in_set[k + 1] = !old.count(u) || old.count(closure_.right[u]);
      }
      g.acc_sets.push_back(std::move(in_set));
    }
    return g;
  }

 private:
  void charge() {
    if (++nodes_created_ > budget_) throw FormulaTooLarge(budget_);
  }

  // Fully reduces New via the expansion rules, storing completed nodes.
  void process(TableauNode node) {
    std::vector<TableauNode> work;
    work.push_back(std::move(node));
    while (!work.empty()) {
      TableauNode n = std::move(work.back());
      work.pop_back();
      if (n.new_.empty()) {
        complete(std::move(n));
        continue;
      }
      int eta = *n.new_.begin();
      n.new_.erase(n.new_.begin());
      Op op = closure_.ops[eta];
      switch (op) {
        case Op::True:
          work.push_back(std::move(n));
          break;
        case Op::False:
          break;  // contradiction: node discarded
        case Op::Prop:
        case Op::Not: {
          int negation = negation_of(eta);
          if (negation >= 0 && n.old_.count(negation)) break;  // contradiction
          n.old_.insert(eta);
          work.push_back(std::move(n));
          break;
        }
        case Op::And: {
          if (!n.old_.count(closure_.left[eta])) n.new_.insert(closure_.left[eta]);
          if (!n.old_.count(closure_.right[eta])) n.new_.insert(closure_.right[eta]);
          n.old_.insert(eta);
          work.push_back(std::move(n));
          break;
        }
        case Op::Or: {
          charge();
          TableauNode n2 = n;
          if (!n.old_.count(closure_.left[eta])) n.new_.insert(closure_.left[eta]);
          n.old_.insert(eta);
          if (!n2.old_.count(closure_.right[eta])) n2.new_.insert(closure_.right[eta]);
          n2.old_.insert(eta);
          work.push_back(std::move(n));
          work.push_back(std::move(n2));
          break;
        }
        case Op::Next: {
          n.old_.insert(eta);
          n.next_.insert(closure_.left[eta]);
          work.push_back(std::move(n));
          break;
        }
        case Op::Until: {
          charge();
          TableauNode n2 = n;
          if (!n.old_.count(closure_.left[eta])) n.new_.insert(closure_.left[eta]);
          n.next_.insert(eta);
          n.old_.insert(eta);
          if (!n2.old_.count(closure_.right[eta])) n2.new_.insert(closure_.right[eta]);
          n2.old_.insert(eta);
          work.push_back(std::move(n));
          work.push_back(std::move(n2));
          break;
        }
        case Op::Release: {
          charge();
          TableauNode n2 = n;
          if (!n.old_.count(closure_.right[eta])) n.new_.insert(closure_.right[eta]);
          n.next_.insert(eta);
          n.old_.insert(eta);
          if (!n2.old_.count(closure_.left[eta])) n2.new_.insert(closure_.left[eta]);
          if (!n2.old_.count(closure_.right[eta])) n2.new_.insert(closure_.right[eta]);
          n2.old_.insert(eta);
          work.push_back(std::move(n));
          work.push_back(std::move(n2));
          break;
        }
        default:
          throw Error("tableau: formula must be in negation normal form");
      }
    }
  }

  int negation_of(int literal) {
    Op op = closure_.ops[literal];
    if (op == Op::Prop) {
      std::string key = "!(p" + closure_.forms[literal]->prop_name() + ";)";
      auto it = closure_.by_text.find(key);
      return it == closure_.by_text.end() ? -1 : it->second;
    }
    return closure_.left[literal];  // Not(p) -> p
  }

  void complete(TableauNode n) {
    auto key = std::make_pair(std::vector<int>(n.old_.begin(), n.old_.end()),
                              std::vector<int>(n.next_.begin(), n.next_.end()));
    auto it = dedup_.find(key);
    if (it != dedup_.end()) {
      auto& inc = stored_[it->second].incoming;
      for (int s : n.incoming)
        if (std::find(inc.begin(), inc.end(), s) == inc.end()) inc.push_back(s);
      return;
    }
    charge();
    int idx = static_cast<int>(stored_.size());
    dedup_.emplace(std::move(key), idx);
    TableauNode succ;
    succ.incoming = {idx + 1};  // automaton state id
    succ.new_ = n.next_;
    stored_.push_back(std::move(n));
    pending_.push_back(std::move(succ));
  }

  std::vector<std::string> alphabet_;
  std::size_t budget_;
  std::size_t nodes_created_ = 0;
  ClosureTable closure_;
  int root_;
  std::vector<TableauNode> stored_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> dedup_;
  std::deque<TableauNode> pending_;
};

// Degeneralization: counter over the acceptance sets, advanced on entering
// a state; accepting when the counter has cycled through every set.
BuchiAutomaton degeneralize(const GeneralizedBuchi& g, const std::vector<std::string>& alphabet) {
  int k = static_cast<int>(g.acc_sets.size());
  BuchiAutomaton a;
  a.alphabet = alphabet;

  // base edges: src -> node, labeled by the node's literal constraint
  std::vector<std::vector<std::pair<Valuation, Valuation>>> edge_label(g.num_states);
  std::vector<std::vector<int>> edge_to(g.num_states);
  for (int q = 1; q < g.num_states; ++q)
    for (int src : g.incoming[q]) {
      edge_label[src].push_back(g.label[q]);
      edge_to[src].push_back(q);
    }

  if (k == 0) {
    a.num_states = g.num_states;
    a.initial = {0};
    a.accepting.assign(g.num_states, true);
    a.transitions.resize(g.num_states);
    for (int s = 0; s < g.num_states; ++s)
      for (std::size_t e = 0; e < edge_to[s].size(); ++e)
        a.transitions[s].push_back({edge_label[s][e].first, edge_label[s][e].second, edge_to[s][e]});
    return a;
  }

  auto advance = [&](int counter, int target) {
    int c = counter == k ? 0 : counter;
    while (c < k && g.acc_sets[c][target]) ++c;
    return c;
  };

  std::map<std::pair<int, int>, int> index;  // (state, counter) -> id
  std::vector<std::pair<int, int>> states;
  auto get_id = [&](int q, int c) {
    auto it = index.find({q, c});
    if (it != index.end()) return it->second;
    int id = static_cast<int>(states.size());
    index.emplace(std::make_pair(q, c), id);
    states.emplace_back(q, c);
    return id;
  };

  std::deque<int> todo;
  int init_id = get_id(0, 0);
  todo.push_back(init_id);
  std::vector<std::vector<BuchiAutomaton::Transition>> trans;
  std::set<int> expanded;
  while (!todo.empty()) {
    int id = todo.front();
    todo.pop_front();
    if (!expanded.insert(id).second) continue;
    auto [q, c] = states[id];
    if (static_cast<int>(trans.size()) <= id) trans.resize(id + 1);
    for (std::size_t e = 0; e < edge_to[q].size(); ++e) {
      int target = edge_to[q][e];
      int c2 = advance(c, target);
      int tid = get_id(target, c2);
      trans[id].push_back({edge_label[q][e].first, edge_label[q][e].second, tid});
      todo.push_back(tid);
    }
  }
  trans.resize(states.size());

  a.num_states = static_cast<int>(states.size());
  a.initial = {init_id};
  a.transitions = std::move(trans);
  a.accepting.resize(a.num_states);
  for (int i = 0; i < a.num_states; ++i) a.accepting[i] = states[i].second == k;
  return a;
}

// Drops states that cannot start an infinite run, then unreachable states.
BuchiAutomaton trim(const BuchiAutomaton& a) {
  int n = a.num_states;
  std::vector<char> alive(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      bool has_succ = false;
      for (const auto& t : a.transitions[s])
        if (alive[t.target] && (t.must_true & t.must_false) == 0) {
          has_succ = true;
          break;
        }
      if (!has_succ) {
        alive[s] = 0;
        changed = true;
      }
    }
  }
  std::vector<char> reach(n, 0);
  std::deque<int> todo;
  for (int s : a.initial)
    if (alive[s]) {
      reach[s] = 1;
      todo.push_back(s);
    }
  while (!todo.empty()) {
    int s = todo.front();
    todo.pop_front();
    for (const auto& t : a.transitions[s])
      if (alive[t.target] && !reach[t.target]) {
        reach[t.target] = 1;
        todo.push_back(t.target);
      }
  }

  std::vector<int> remap(n, -1);
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  for (int s = 0; s < n; ++s)
    if (reach[s]) remap[s] = out.num_states++;
  if (out.num_states == 0) {
    // empty language: keep a single initial state with no transitions
    out.num_states = 1;
    out.initial = {0};
    out.transitions.resize(1);
    out.accepting = {false};
    return out;
  }
  out.transitions.resize(out.num_states);
  out.accepting.assign(out.num_states, false);
  for (int s = 0; s < n; ++s) {
    if (remap[s] < 0) continue;
    out.accepting[remap[s]] = a.accepting[s];
    for (const auto& t : a.transitions[s])
      if (remap[t.target] >= 0)
        out.transitions[remap[s]].push_back({t.must_true, t.must_false, remap[t.target]});
  }
  for (int s : a.initial)
    if (remap[s] >= 0) out.initial.push_back(remap[s]);
  if (out.initial.empty()) {
    // initial state was dead; language is empty but the automaton must
    // still carry an initial state
    out.initial = {0};
  }
  return out;
}

}  // namespace

BuchiAutomaton to_buchi(const FormulaPtr& f, const std::vector<std::string>& alphabet,
                        std::size_t node_budget) {
  if (alphabet.size() > 32) throw Error("to_buchi: alphabet too large (max 32 propositions)");
  if (!std::is_sorted(alphabet.begin(), alphabet.end()))
    throw Error("to_buchi: alphabet must be sorted");
  FormulaPtr nnf = to_nnf(f, false);
  TableauBuilder builder(nnf, alphabet, node_budget);
  return trim(degeneralize(builder.build(), alphabet));
}

BuchiAutomaton to_buchi(const FormulaPtr& f, std::size_t node_budget) {
  auto props = formula_props(f);
  std::sort(props.begin(), props.end());
  return to_buchi(f, props, node_budget);
}

// --- emptiness: nested DFS over an implicit successor relation ---

namespace {

struct SearchGraph {
  std::vector<std::int64_t> initial;
  // deterministic successor enumeration: (valuation, target)
  std::function<void(std::int64_t, std::vector<std::pair<Valuation, std::int64_t>>&)> succs;
  std::function<bool(std::int64_t)> accepting;
};

struct LassoWitness {
  std::vector<Valuation> prefix;
  std::vector<Valuation> cycle;
};

// Courcoubetis-Vardi-Wolper-Yannakakis nested depth-first search with the
// stack-hit shortcut; the red search's visited set persists across seeds.
class NestedDfs {
 public:
  explicit NestedDfs(const SearchGraph& g) : g_(g) {}

  std::optional<LassoWitness> run() {
    for (std::int64_t init : g_.initial) {
      if (blue_.count(init)) continue;
      if (auto w = dfs_blue(init)) return w;
    }
    return std::nullopt;
  }

 private:
  struct Frame {
    std::int64_t state;
    std::size_t next_idx = 0;
    std::vector<std::pair<Valuation, std::int64_t>> succ;
  };

  std::optional<LassoWitness> dfs_blue(std::int64_t root) {
    std::vector<Frame> stack;
    push_blue(stack, root, 0);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next_idx < f.succ.size()) {
        auto [lbl, t] = f.succ[f.next_idx++];
        if (!cyan_.count(t) && !blue_.count(t)) push_blue(stack, t, lbl);
        continue;
      }
      // post-order: seed the red search from accepting states
      std::int64_t s = f.state;
      if (g_.accepting(s)) {
        if (auto cyc = dfs_red(s)) {
          LassoWitness w;
          for (std::size_t i = 1; i < path_.size(); ++i) w.prefix.push_back(path_label_[i]);
          w.cycle = std::move(*cyc);
          return w;
        }
      }
      cyan_.erase(s);
      blue_.insert(s);
      path_.pop_back();
      path_label_.pop_back();
      stack.pop_back();
    }
    return std::nullopt;
  }

  void push_blue(std::vector<Frame>& stack, std::int64_t s, Valuation lbl) {
    cyan_.insert(s);
    path_.push_back(s);
    path_label_.push_back(lbl);
    Frame f;
    f.state = s;
    g_.succs(s, f.succ);
    stack.push_back(std::move(f));
  }

  // Searches from `seed` for the seed itself or any state on the blue
  // path; either closes an accepting cycle through the seed.
  std::optional<std::vector<Valuation>> dfs_red(std::int64_t seed) {
    if (red_.count(seed)) return std::nullopt;  // explored from an earlier seed
    std::vector<Frame> stack;
    std::map<std::int64_t, std::pair<std::int64_t, Valuation>> parent;
    auto visit = [&](std::int64_t s) {
      Frame f;
      f.state = s;
      g_.succs(s, f.succ);
      stack.push_back(std::move(f));
    };
    red_.insert(seed);
    visit(seed);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next_idx >= f.succ.size()) {
        stack.pop_back();
        continue;
      }
      auto [lbl, t] = f.succ[f.next_idx++];
      bool hit_seed = t == seed;
      bool hit_stack = cyan_.count(t) > 0;
      if (hit_seed || hit_stack) {
        // labels seed -> ... -> f.state, then the closing edge
        std::vector<Valuation> back;
        std::int64_t cur = f.state;
        back.push_back(lbl);
        while (cur != seed) {
          auto [p, l] = parent.at(cur);
          back.push_back(l);
          cur = p;
        }
        std::reverse(back.begin(), back.end());
        if (hit_seed) return back;
        // t is on the blue path: append the path segment t -> ... -> seed
        std::size_t pos = 0;
        while (path_[pos] != t) ++pos;
        for (std::size_t i = pos + 1; i < path_.size(); ++i) back.push_back(path_label_[i]);
        return back;
      }
      if (!red_.count(t)) {
        red_.insert(t);
        parent.emplace(t, std::make_pair(f.state, lbl));
        visit(t);
      }
    }
    return std::nullopt;
  }

  const SearchGraph& g_;
  std::unordered_set<std::int64_t> cyan_, blue_, red_;
  std::vector<std::int64_t> path_;
  std::vector<Valuation> path_label_;
};

SearchGraph graph_of(const BuchiAutomaton& a) {
  SearchGraph g;
  for (int s : a.initial) g.initial.push_back(s);
  std::size_t nvals = std::size_t(1) << a.alphabet.size();
  g.succs = [&a, nvals](std::int64_t s, std::vector<std::pair<Valuation, std::int64_t>>& out) {
    out.clear();
    for (Valuation v = 0; v < nvals; ++v)
      for (const auto& t : a.transitions[static_cast<int>(s)])
        if (t.admits(v)) out.emplace_back(v, t.target);
  };
  g.accepting = [&a](std::int64_t s) { return a.accepting[static_cast<int>(s)]; };
  return g;
}

}  // namespace

std::optional<LassoTrace> find_accepting_lasso(const BuchiAutomaton& a) {
  SearchGraph g = graph_of(a);
  NestedDfs search(g);
  auto w = search.run();
  if (!w) return std::nullopt;
  LassoTrace t;
  t.alphabet = a.alphabet;
  t.prefix = std::move(w->prefix);
  t.cycle = std::move(w->cycle);
  return t;
}

// --- membership of a lasso word, via the product with the trace automaton ---

bool accepts_lasso(const BuchiAutomaton& a, const LassoTrace& t) {
  if (t.alphabet != a.alphabet) throw Error("accepts_lasso: alphabet mismatch");
  if (t.cycle.empty()) throw Error("accepts_lasso: cycle must be non-empty");
  const int npos = static_cast<int>(t.positions());
  const int total = a.num_states * npos;
  auto id = [&](int s, int i) { return s * npos + i; };

  // reachable product exploration
  std::vector<char> reached(total, 0);
  std::vector<int> order;
  std::deque<int> todo;
  for (int s : a.initial) {
    if (!reached[id(s, 0)]) {
      reached[id(s, 0)] = 1;
      todo.push_back(id(s, 0));
    }
  }
  std::vector<std::vector<int>> adj(total);
  while (!todo.empty()) {
    int v = todo.front();
    todo.pop_front();
    order.push_back(v);
    int s = v / npos, i = v % npos;
    int ni = static_cast<int>(t.next(i));
    for (const auto& tr : a.transitions[s]) {
      if (!tr.admits(t.at(i))) continue;
      int w = id(tr.target, ni);
      adj[v].push_back(w);
      if (!reached[w]) {
        reached[w] = 1;
        todo.push_back(w);
      }
    }
  }

  // iterative Tarjan SCC; accept iff some cycle contains an accepting state
  std::vector<int> index(total, -1), low(total, 0);
  std::vector<char> on_stack(total, 0);
  std::vector<int> scc_stack;
  int counter = 0;
  struct TFrame {
    int v;
    std::size_t ei = 0;
  };
  for (int root : order) {
    if (index[root] != -1) continue;
    std::vector<TFrame> st;
    st.push_back({root});
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = 1;
    while (!st.empty()) {
      TFrame& f = st.back();
      if (f.ei < adj[f.v].size()) {
        int w = adj[f.v][f.ei++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = 1;
          st.push_back({w});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      int v = f.v;
      st.pop_back();
      if (!st.empty()) low[st.back().v] = std::min(low[st.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        bool cyclic = comp.size() > 1;
        if (!cyclic) {
          for (int u : adj[comp[0]])
            if (u == comp[0]) cyclic = true;
        }
        if (cyclic)
          for (int u : comp)
            if (a.accepting[u / npos]) return true;
      }
    }
  }
  return false;
}

// --- intersection and alphabet rebasing ---

BuchiAutomaton rebase_alphabet(const BuchiAutomaton& a, const std::vector<std::string>& alphabet) {
  std::vector<int> remap(a.alphabet.size());
  for (std::size_t i = 0; i < a.alphabet.size(); ++i) {
    int idx = alphabet_index(alphabet, a.alphabet[i]);
    if (idx < 0) throw Error("rebase_alphabet: target alphabet is not a superset");
    remap[i] = idx;
  }
  auto remap_mask = [&](Valuation v) {
    Valuation out = 0;
    for (std::size_t i = 0; i < a.alphabet.size(); ++i)
      if (v & (Valuation(1) << i)) out |= Valuation(1) << remap[i];
    return out;
  };
  BuchiAutomaton out = a;
  out.alphabet = alphabet;
  for (auto& ts : out.transitions)
    for (auto& t : ts) {
      t.must_true = remap_mask(t.must_true);
      t.must_false = remap_mask(t.must_false);
    }
  return out;
}

namespace {

// Implicit-product emptiness: avoids materializing the intersection.
std::optional<LassoTrace> product_lasso(const BuchiAutomaton& a, const BuchiAutomaton& b) {
  if (a.alphabet != b.alphabet) throw Error("product: alphabet mismatch");
  const std::int64_t nb = b.num_states;
  auto encode = [nb](int p, int q, int flag) {
    return ((static_cast<std::int64_t>(p) * nb + q) << 1) | flag;
  };
  std::size_t nvals = std::size_t(1) << a.alphabet.size();

  SearchGraph g;
  for (int p : a.initial)
    for (int q : b.initial) g.initial.push_back(encode(p, q, 0));
  g.succs = [&, nvals](std::int64_t v, std::vector<std::pair<Valuation, std::int64_t>>& out) {
    out.clear();
    int flag = static_cast<int>(v & 1);
    std::int64_t pq = v >> 1;
    int p = static_cast<int>(pq / nb), q = static_cast<int>(pq % nb);
    int nflag = flag == 0 ? (a.accepting[p] ? 1 : 0) : (b.accepting[q] ? 0 : 1);
    for (Valuation val = 0; val < nvals; ++val)
      for (const auto& ta : a.transitions[p]) {
        if (!ta.admits(val)) continue;
        for (const auto& tb : b.transitions[q])
          if (tb.admits(val)) out.emplace_back(val, encode(ta.target, tb.target, nflag));
      }
  };
  g.accepting = [&](std::int64_t v) {
    int flag = static_cast<int>(v & 1);
    int p = static_cast<int>((v >> 1) / nb);
    return flag == 0 && a.accepting[p];
  };

  NestedDfs search(g);
  auto w = search.run();
  if (!w) return std::nullopt;
  LassoTrace t;
  t.alphabet = a.alphabet;
  t.prefix = std::move(w->prefix);
  t.cycle = std::move(w->cycle);
  return t;
}

}  // namespace

BuchiAutomaton intersect(const BuchiAutomaton& a, const BuchiAutomaton& b) {
  if (a.alphabet != b.alphabet) throw Error("intersect: alphabet mismatch");
  const int nb = b.num_states;
  std::map<std::tuple<int, int, int>, int> index;
  std::vector<std::tuple<int, int, int>> states;
  auto get_id = [&](int p, int q, int flag) {
    auto key = std::make_tuple(p, q, flag);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(states.size());
    index.emplace(key, id);
    states.push_back(key);
    return id;
  };
  (void)nb;
  BuchiAutomaton out;
  out.alphabet = a.alphabet;
  std::deque<int> todo;
  for (int p : a.initial)
    for (int q : b.initial) {
      out.initial.push_back(get_id(p, q, 0));
      todo.push_back(out.initial.back());
    }
  std::set<int> done;
  std::vector<std::vector<BuchiAutomaton::Transition>> trans;
  while (!todo.empty()) {
    int id = todo.front();
    todo.pop_front();
    if (!done.insert(id).second) continue;
    auto [p, q, flag] = states[id];
    if (static_cast<int>(trans.size()) <= id) trans.resize(id + 1);
    int nflag = flag == 0 ? (a.accepting[p] ? 1 : 0) : (b.accepting[q] ? 0 : 1);
    for (const auto& ta : a.transitions[p])
      for (const auto& tb : b.transitions[q]) {
        Valuation mt = ta.must_true | tb.must_true;
        Valuation mf = ta.must_false | tb.must_false;
        if (mt & mf) continue;  // contradictory constraint
        int tid = get_id(ta.target, tb.target, nflag);
        trans[id].push_back({mt, mf, tid});
        todo.push_back(tid);
      }
  }
  trans.resize(states.size());
  out.num_states = static_cast<int>(states.size());
  out.transitions = std::move(trans);
  out.accepting.resize(out.num_states);
  for (int i = 0; i < out.num_states; ++i) {
    auto [p, q, flag] = states[i];
    (void)q;
    out.accepting[i] = flag == 0 && a.accepting[p];
  }
  return out;
}

// --- equivalence ---

namespace {

std::vector<std::string> union_props(const FormulaPtr& f, const FormulaPtr& g) {
  auto ps = formula_props(f);
  auto qs = formula_props(g);
  ps.insert(ps.end(), qs.begin(), qs.end());
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

}  // namespace

EquivResult check_equivalent(const FormulaPtr& f, const FormulaPtr& g, std::size_t node_budget) {
  auto alphabet = union_props(f, g);
  auto one_direction = [&](const FormulaPtr& x, const FormulaPtr& y) {
    return find_accepting_lasso(to_buchi(f_and(x, f_not(y)), alphabet, node_budget));
  };
  if (auto w = one_direction(f, g)) return {false, std::move(w)};
  if (auto w = one_direction(g, f)) return {false, std::move(w)};
  return {true, std::nullopt};
}

const EquivalenceChecker::CacheEntry& EquivalenceChecker::entry(const FormulaPtr& f) {
  std::string key = print_prefix(f);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  CacheEntry e;
  e.props = formula_props(f);
  std::sort(e.props.begin(), e.props.end());
  e.pos = to_buchi(f, e.props, budget_);
  e.neg = to_buchi(f_not(f), e.props, budget_);
  return cache_.emplace(std::move(key), std::move(e)).first->second;
}

EquivResult EquivalenceChecker::check(const FormulaPtr& f, const FormulaPtr& g) {
  auto alphabet = union_props(f, g);
  // std::map references survive the second insertion
  const CacheEntry& ef = entry(f);
  const CacheEntry& eg = entry(g);
  BuchiAutomaton fp = rebase_alphabet(ef.pos, alphabet);
  BuchiAutomaton fn = rebase_alphabet(ef.neg, alphabet);
  BuchiAutomaton gp = rebase_alphabet(eg.pos, alphabet);
  BuchiAutomaton gn = rebase_alphabet(eg.neg, alphabet);
  if (auto w = product_lasso(fp, gn)) return {false, std::move(w)};
  if (auto w = product_lasso(gp, fn)) return {false, std::move(w)};
  return {true, std::nullopt};
}

bool EquivalenceChecker::equivalent(const FormulaPtr& f, const FormulaPtr& g) {
  return check(f, g).equivalent;
}

// --- dumps ---

namespace {

FormulaPtr constraint_formula(const BuchiAutomaton& a, const BuchiAutomaton::Transition& t) {
  FormulaPtr acc = nullptr;
  for (std::size_t i = 0; i < a.alphabet.size(); ++i) {
    Valuation bit = Valuation(1) << i;
    FormulaPtr lit = nullptr;
    if (t.must_true & bit) lit = f_prop(a.alphabet[i]);
    else if (t.must_false & bit) lit = f_not(f_prop(a.alphabet[i]));
    if (lit) acc = acc ? f_and(acc, lit) : lit;
  }
  if (!acc) {
    std::string p = a.alphabet.empty() ? "p" : a.alphabet.front();
    acc = f_or(f_prop(p), f_not(f_prop(p)));  // unconstrained
  }
  return acc;
}

}  // namespace

std::string buchi_to_json(const BuchiAutomaton& a) {
  json j;
  j["alphabet"] = a.alphabet;
  j["initial"] = a.initial;
  json states = json::array();
  for (int s = 0; s < a.num_states; ++s) {
    json st;
    st["id"] = s;
    st["accepting"] = static_cast<bool>(a.accepting[s]);
    json edges = json::array();
    for (const auto& t : a.transitions[s])
      edges.push_back({{"constraint", print_prefix(constraint_formula(a, t))}, {"target", t.target}});
    st["transitions"] = std::move(edges);
    states.push_back(std::move(st));
  }
  j["states"] = std::move(states);
  return j.dump(2);
}

std::string buchi_to_dot(const BuchiAutomaton& a) {
  std::string out = "digraph buchi {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int s : a.initial)
    out += "  init" + std::to_string(s) + " [shape=point]; init" + std::to_string(s) + " -> s" +
           std::to_string(s) + ";\n";
  for (int s = 0; s < a.num_states; ++s) {
    if (a.accepting[s])
      out += "  s" + std::to_string(s) + " [shape=doublecircle];\n";
    for (const auto& t : a.transitions[s])
      out += "  s" + std::to_string(s) + " -> s" + std::to_string(t.target) + " [label=\"" +
             print_prefix(constraint_formula(a, t)) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string lasso_to_string(const LassoTrace& t) {
  auto fmt = [&](const std::vector<Valuation>& vs) {
    std::string s;
    for (Valuation v : vs) {
      s += '{';
      auto ps = valuation_props(t.alphabet, v);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) s += ' ';
        s += ps[i];
      }
      s += '}';
    }
    return s;
  };
  return "prefix=" + fmt(t.prefix) + " cycle=" + fmt(t.cycle);
}

}  // namespace ltlground
