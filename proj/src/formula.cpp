#include "ltlground/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace ltlground {

using json = nlohmann::json;

int op_arity(Op op) {
  switch (op) {
    case Op::Prop:
    case Op::True:
    case Op::False:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      return 1;
    default:
      return 2;
  }
}

const char* op_token(Op op) {
  switch (op) {
    case Op::Not: return "!";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "i";
    case Op::Equiv: return "e";
    case Op::Next: return "X";
    case Op::Finally: return "F";
    case Op::Globally: return "G";
    case Op::Until: return "U";
    case Op::WeakUntil: return "W";
    case Op::StrongRelease: return "M";
    default: return "";
  }
}

namespace {

const std::set<std::string>& reserved_tokens() {
  static const std::set<std::string> toks = {"!", "&", "|", "i", "e", "X",
                                             "F", "G", "U", "W", "M"};
  return toks;
}

bool token_op(const std::string& tok, Op& out) {
  if (tok == "!") out = Op::Not;
  else if (tok == "&") out = Op::And;
  else if (tok == "|") out = Op::Or;
  else if (tok == "i") out = Op::Implies;
  else if (tok == "e") out = Op::Equiv;
  else if (tok == "X") out = Op::Next;
  else if (tok == "F") out = Op::Finally;
  else if (tok == "G") out = Op::Globally;
  else if (tok == "U") out = Op::Until;
  else if (tok == "W") out = Op::WeakUntil;
  else if (tok == "M") out = Op::StrongRelease;
  else return false;
  return true;
}

}  // namespace

bool is_valid_prop_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return reserved_tokens().count(name) == 0;
}

FormulaPtr Formula::make_prop(const std::string& name) {
  if (!is_valid_prop_name(name)) throw InvalidPropName(name);
  return FormulaPtr(new Formula(Op::Prop, name, nullptr, nullptr));
}

FormulaPtr Formula::make_const(bool value) {
  return FormulaPtr(new Formula(value ? Op::True : Op::False, "", nullptr, nullptr));
}

FormulaPtr Formula::make_unary(Op op, FormulaPtr child) {
  if (op_arity(op) != 1 || !child) throw Error("make_unary: bad operator or missing child");
  return FormulaPtr(new Formula(op, "", std::move(child), nullptr));
}

FormulaPtr Formula::make_binary(Op op, FormulaPtr lhs, FormulaPtr rhs) {
  if (op_arity(op) != 2 || !lhs || !rhs) throw Error("make_binary: bad operator or missing child");
  return FormulaPtr(new Formula(op, "", std::move(lhs), std::move(rhs)));
}

FormulaPtr f_prop(const std::string& name) { return Formula::make_prop(name); }
FormulaPtr f_true() { return Formula::make_const(true); }
FormulaPtr f_false() { return Formula::make_const(false); }
FormulaPtr f_not(FormulaPtr f) { return Formula::make_unary(Op::Not, std::move(f)); }
FormulaPtr f_next(FormulaPtr f) { return Formula::make_unary(Op::Next, std::move(f)); }
FormulaPtr f_eventually(FormulaPtr f) { return Formula::make_unary(Op::Finally, std::move(f)); }
FormulaPtr f_always(FormulaPtr f) { return Formula::make_unary(Op::Globally, std::move(f)); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::Or, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::Implies, std::move(a), std::move(b)); }
FormulaPtr f_equiv(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::Equiv, std::move(a), std::move(b)); }
FormulaPtr f_until(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::Until, std::move(a), std::move(b)); }
FormulaPtr f_weak_until(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::WeakUntil, std::move(a), std::move(b)); }
FormulaPtr f_strong_release(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::StrongRelease, std::move(a), std::move(b)); }
FormulaPtr f_release(FormulaPtr a, FormulaPtr b) { return Formula::make_binary(Op::Release, std::move(a), std::move(b)); }

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->op() != b->op()) return false;
  if (a->op() == Op::Prop) return a->prop_name() == b->prop_name();
  switch (a->arity()) {
    case 0: return true;
    case 1: return structurally_equal(a->left(), b->left());
    default:
      return structurally_equal(a->left(), b->left()) &&
             structurally_equal(a->right(), b->right());
  }
}

std::size_t formula_size(const FormulaPtr& f) {
  std::size_t n = 1;
  if (f->left()) n += formula_size(f->left());
  if (f->right()) n += formula_size(f->right());
  return n;
}

std::size_t formula_height(const FormulaPtr& f) {
  std::size_t h = 0;
  if (f->left()) h = formula_height(f->left());
  if (f->right()) h = std::max(h, formula_height(f->right()));
  return h + 1;
}

namespace {

void collect_props(const FormulaPtr& f, std::vector<std::string>& out,
                   std::unordered_set<std::string>& seen) {
  if (f->op() == Op::Prop) {
    if (seen.insert(f->prop_name()).second) out.push_back(f->prop_name());
    return;
  }
  if (f->left()) collect_props(f->left(), out, seen);
  if (f->right()) collect_props(f->right(), out, seen);
}

}  // namespace

std::vector<std::string> formula_props(const FormulaPtr& f) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_props(f, out, seen);
  return out;
}

// --- prefix format ---

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> toks;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) toks.push_back(tok);
  return toks;
}

FormulaPtr parse_prefix_at(const std::vector<std::string>& toks, std::size_t& pos) {
  if (pos >= toks.size()) throw UnexpectedEndOfInput(pos);
  const std::string& tok = toks[pos++];
  Op op;
  if (token_op(tok, op)) {
    if (op_arity(op) == 1) {
      return Formula::make_unary(op, parse_prefix_at(toks, pos));
    }
    FormulaPtr l = parse_prefix_at(toks, pos);
    FormulaPtr r = parse_prefix_at(toks, pos);
    return Formula::make_binary(op, std::move(l), std::move(r));
  }
  return Formula::make_prop(tok);  // any non-operator token is a proposition
}

void print_prefix_rec(const FormulaPtr& f, std::string& out,
                      const std::string& taut_prop);

std::string fresh_taut_prop(const FormulaPtr& f) {
  auto used = formula_props(f);
  std::set<std::string> used_set(used.begin(), used.end());
  if (!used_set.count("p")) return "p";
  for (int i = 0;; ++i) {
    std::string cand = "p" + std::to_string(i);
    if (!used_set.count(cand)) return cand;
  }
}

void print_prefix_rec(const FormulaPtr& f, std::string& out, const std::string& taut_prop) {
  switch (f->op()) {
    case Op::Prop:
      out += f->prop_name();
      return;
    case Op::True:
      out += "| " + taut_prop + " ! " + taut_prop;
      return;
    case Op::False:
      out += "& " + taut_prop + " ! " + taut_prop;
      return;
    case Op::Release:
      // internal dual of Until; external form via its definition
      print_prefix_rec(f_not(f_until(f_not(f->left()), f_not(f->right()))), out, taut_prop);
      return;
    default:
      break;
  }
  out += op_token(f->op());
  out += ' ';
  print_prefix_rec(f->left(), out, taut_prop);
  if (f->right()) {
    out += ' ';
    print_prefix_rec(f->right(), out, taut_prop);
  }
}

}  // namespace

FormulaPtr parse_prefix(const std::string& text) {
  auto toks = split_tokens(text);
  if (toks.empty()) throw UnexpectedEndOfInput(0);
  std::size_t pos = 0;
  FormulaPtr f = parse_prefix_at(toks, pos);
  if (pos != toks.size()) throw TrailingTokens(toks[pos], pos);
  return f;
}

std::string print_prefix(const FormulaPtr& f) {
  std::string out;
  print_prefix_rec(f, out, fresh_taut_prop(f));
  return out;
}

// --- infix format ---

namespace {

struct InfixLexer {
  explicit InfixLexer(const std::string& text) : text_(text) {}

  struct Tok {
    std::string s;
    std::size_t pos;
  };

  Tok next() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    if (i_ >= text_.size()) return {"", i_};
    std::size_t start = i_;
    char c = text_[i_];
    if (c == '(' || c == ')' || c == '!' || c == '&' || c == '|') {
      ++i_;
      return {std::string(1, c), start};
    }
    if (c == '-') {
      if (i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
        i_ += 2;
        return {"->", start};
      }
      throw ParseError("unexpected character '-'", start);
    }
    if (c == '<') {
      if (i_ + 2 < text_.size() && text_[i_ + 1] == '-' && text_[i_ + 2] == '>') {
        i_ += 3;
        return {"<->", start};
      }
      throw ParseError("unexpected character '<'", start);
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
        ++i_;
      return {text_.substr(start, i_ - start), start};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  const std::string& text_;
  std::size_t i_ = 0;
};

// Precedence: unary > U/W/M > & > | > -> > <->.
class InfixParser {
 public:
  explicit InfixParser(const std::string& text) : lex_(text) { advance(); }

  FormulaPtr parse() {
    FormulaPtr f = parse_equiv();
    if (!cur_.s.empty()) throw ParseError("trailing input '" + cur_.s + "'", cur_.pos);
    return f;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  FormulaPtr parse_equiv() {
    FormulaPtr l = parse_implies();
    while (cur_.s == "<->") {
      advance();
      l = f_equiv(std::move(l), parse_implies());
    }
    return l;
  }

  FormulaPtr parse_implies() {
    FormulaPtr l = parse_or();
    if (cur_.s == "->") {
      advance();
      return f_implies(std::move(l), parse_implies());  // right-assoc
    }
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (cur_.s == "|") {
      advance();
      l = f_or(std::move(l), parse_and());
    }
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_until();
    while (cur_.s == "&") {
      advance();
      l = f_and(std::move(l), parse_until());
    }
    return l;
  }

  FormulaPtr parse_until() {
    FormulaPtr l = parse_unary();
    if (cur_.s == "U" || cur_.s == "W" || cur_.s == "M") {
      Op op = cur_.s == "U" ? Op::Until : cur_.s == "W" ? Op::WeakUntil : Op::StrongRelease;
      advance();
      return Formula::make_binary(op, std::move(l), parse_until());  // right-assoc
    }
    return l;
  }

  FormulaPtr parse_unary() {
    if (cur_.s == "!" || cur_.s == "X" || cur_.s == "F" || cur_.s == "G") {
      Op op = cur_.s == "!" ? Op::Not
              : cur_.s == "X" ? Op::Next
              : cur_.s == "F" ? Op::Finally
                              : Op::Globally;
      advance();
      return Formula::make_unary(op, parse_unary());
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    if (cur_.s.empty()) throw UnexpectedEndOfInput(cur_.pos);
    if (cur_.s == "(") {
      advance();
      FormulaPtr f = parse_equiv();
      if (cur_.s != ")") throw ParseError("expected ')'", cur_.pos);
      advance();
      return f;
    }
    if (cur_.s == "U" || cur_.s == "W" || cur_.s == "M")
      throw ParseError("binary operator '" + cur_.s + "' needs a left operand", cur_.pos);
    FormulaPtr f = Formula::make_prop(cur_.s);
    advance();
    return f;
  }

  InfixLexer lex_;
  InfixLexer::Tok cur_;
};

void print_infix_rec(const FormulaPtr& f, std::string& out, const std::string& taut_prop) {
  switch (f->op()) {
    case Op::Prop:
      out += f->prop_name();
      return;
    case Op::True:
      out += "(" + taut_prop + " | !(" + taut_prop + "))";
      return;
    case Op::False:
      out += "(" + taut_prop + " & !(" + taut_prop + "))";
      return;
    case Op::Not:
    case Op::Next:
    case Op::Finally:
    case Op::Globally: {
      out += f->op() == Op::Not ? "!" : f->op() == Op::Next ? "X"
             : f->op() == Op::Finally ? "F" : "G";
      out += '(';
      print_infix_rec(f->left(), out, taut_prop);
      out += ')';
      return;
    }
    case Op::Release:
      print_infix_rec(f_not(f_until(f_not(f->left()), f_not(f->right()))), out, taut_prop);
      return;
    default: {
      const char* sym = f->op() == Op::And ? "&" : f->op() == Op::Or ? "|"
                        : f->op() == Op::Implies ? "->" : f->op() == Op::Equiv ? "<->"
                        : f->op() == Op::Until ? "U" : f->op() == Op::WeakUntil ? "W" : "M";
      out += '(';
      print_infix_rec(f->left(), out, taut_prop);
      out += ' ';
      out += sym;
      out += ' ';
      print_infix_rec(f->right(), out, taut_prop);
      out += ')';
      return;
    }
  }
}

}  // namespace

FormulaPtr parse_infix(const std::string& text) { return InfixParser(text).parse(); }

std::string print_infix(const FormulaPtr& f) {
  std::string out;
  print_infix_rec(f, out, fresh_taut_prop(f));
  return out;
}

// --- desugaring ---

namespace {

// A tautology over some proposition of `scope`, so prefix output stays in
// the external token format.
FormulaPtr tautology_for(const FormulaPtr& scope) {
  auto ps = formula_props(scope);
  std::string p = ps.empty() ? "p" : ps.front();
  return f_or(f_prop(p), f_not(f_prop(p)));
}

}  // namespace

FormulaPtr desugar(const FormulaPtr& f) {
  switch (f->op()) {
    case Op::Prop:
    case Op::True:
    case Op::False:
      return f;
    case Op::Not:
      return f_not(desugar(f->left()));
    case Op::Next:
      return f_next(desugar(f->left()));
    case Op::And:
      return f_and(desugar(f->left()), desugar(f->right()));
    case Op::Or:
      return f_or(desugar(f->left()), desugar(f->right()));
    case Op::Until:
      return f_until(desugar(f->left()), desugar(f->right()));
    case Op::Implies:
      return f_or(f_not(desugar(f->left())), desugar(f->right()));
    case Op::Equiv: {
      FormulaPtr a = desugar(f->left());
      FormulaPtr b = desugar(f->right());
      return f_and(f_or(f_not(a), b), f_or(f_not(b), a));
    }
    case Op::Finally: {
      FormulaPtr a = desugar(f->left());
      return f_until(tautology_for(a), a);
    }
    case Op::Globally: {
      FormulaPtr a = desugar(f->left());
      return f_not(f_until(tautology_for(a), f_not(a)));
    }
    case Op::WeakUntil: {
      // a W b = a U (b | G a)
      FormulaPtr a = desugar(f->left());
      FormulaPtr b = desugar(f->right());
      FormulaPtr ga = f_not(f_until(tautology_for(a), f_not(a)));
      return f_until(a, f_or(b, ga));
    }
    case Op::StrongRelease: {
      // a M b = b U (a & b)
      FormulaPtr a = desugar(f->left());
      FormulaPtr b = desugar(f->right());
      return f_until(b, f_and(a, b));
    }
    case Op::Release: {
      FormulaPtr a = desugar(f->left());
      FormulaPtr b = desugar(f->right());
      return f_not(f_until(f_not(a), f_not(b)));
    }
  }
  throw Error("desugar: unreachable");
}

// --- skeletons & substitution ---

const std::vector<std::string>& canonical_props() {
  static const std::vector<std::string> seq = [] {
    std::vector<std::string> v = {"a", "b", "c", "d", "h"};
    for (char c = 'a'; c <= 'z'; ++c) {
      std::string s(1, c);
      if (c == 'e' || c == 'i') continue;  // reserved operator tokens
      if (std::find(v.begin(), v.end(), s) != v.end()) continue;
      v.push_back(s);
    }
    return v;
  }();
  return seq;
}

SkeletonizeResult skeletonize(const FormulaPtr& f) {
  auto ps = formula_props(f);
  const auto& canon = canonical_props();
  if (ps.size() > canon.size())
    throw Error("skeletonize: more than " + std::to_string(canon.size()) +
                " distinct propositions");
  std::map<std::string, std::string> renaming;
  for (std::size_t i = 0; i < ps.size(); ++i) renaming[ps[i]] = canon[i];
  return {Skeleton{substitute(f, renaming)}, renaming};
}

bool is_canonical_skeleton(const FormulaPtr& f) {
  auto ps = formula_props(f);
  const auto& canon = canonical_props();
  if (ps.size() > canon.size()) return false;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i] != canon[i]) return false;
  return true;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, std::string>& mapping) {
  switch (f->op()) {
    case Op::Prop: {
      auto it = mapping.find(f->prop_name());
      if (it == mapping.end())
        throw SubstitutionError("substitute: no mapping for proposition '" + f->prop_name() + "'");
      return f_prop(it->second);
    }
    case Op::True:
    case Op::False:
      return f;
    default:
      if (f->arity() == 1) return Formula::make_unary(f->op(), substitute(f->left(), mapping));
      return Formula::make_binary(f->op(), substitute(f->left(), mapping),
                                  substitute(f->right(), mapping));
  }
}

// --- JSON encoding ---

namespace {

const char* op_json_name(Op op) {
  switch (op) {
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "implies";
    case Op::Equiv: return "equiv";
    case Op::Next: return "next";
    case Op::Finally: return "finally";
    case Op::Globally: return "globally";
    case Op::Until: return "until";
    case Op::WeakUntil: return "weak_until";
    case Op::StrongRelease: return "strong_release";
    case Op::Release: return "release";
    case Op::True: return "true";
    case Op::False: return "false";
    default: return "";
  }
}

json to_json_rec(const FormulaPtr& f) {
  if (f->op() == Op::Prop) return json{{"prop", f->prop_name()}};
  json args = json::array();
  if (f->left()) args.push_back(to_json_rec(f->left()));
  if (f->right()) args.push_back(to_json_rec(f->right()));
  return json{{"op", op_json_name(f->op())}, {"args", std::move(args)}};
}

FormulaPtr from_json_rec(const json& j) {
  if (j.contains("prop")) return f_prop(j.at("prop").get<std::string>());
  std::string op = j.at("op").get<std::string>();
  const json& args = j.contains("args") ? j.at("args") : json::array();
  static const std::map<std::string, Op> ops = {
      {"not", Op::Not}, {"and", Op::And}, {"or", Op::Or}, {"implies", Op::Implies},
      {"equiv", Op::Equiv}, {"next", Op::Next}, {"finally", Op::Finally},
      {"globally", Op::Globally}, {"until", Op::Until}, {"weak_until", Op::WeakUntil},
      {"strong_release", Op::StrongRelease}, {"release", Op::Release},
      {"true", Op::True}, {"false", Op::False}};
  auto it = ops.find(op);
  if (it == ops.end()) throw Error("formula_from_json: unknown op '" + op + "'");
  Op o = it->second;
  if (op_arity(o) != static_cast<int>(args.size()))
    throw Error("formula_from_json: arity mismatch for op '" + op + "'");
  if (op_arity(o) == 0) return Formula::make_const(o == Op::True);
  if (op_arity(o) == 1) return Formula::make_unary(o, from_json_rec(args[0]));
  return Formula::make_binary(o, from_json_rec(args[0]), from_json_rec(args[1]));
}

}  // namespace

std::string formula_to_json(const FormulaPtr& f) { return to_json_rec(f).dump(); }

FormulaPtr formula_from_json(const std::string& json_text) {
  return from_json_rec(json::parse(json_text));
}

}  // namespace ltlground
