#ifndef LTLGROUND_ERRORS_HPP
#define LTLGROUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ltlground {

// Root of the toolkit's exception hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- formula / parsing ---

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at token " + std::to_string(position) + ")"), pos(position) {}
  std::size_t pos;
};

struct UnexpectedEndOfInput : ParseError {
  explicit UnexpectedEndOfInput(std::size_t position)
      : ParseError("unexpected end of input: operator is missing operands", position) {}
};

struct TrailingTokens : ParseError {
  TrailingTokens(const std::string& tok, std::size_t position)
      : ParseError("trailing tokens after complete formula: '" + tok + "'", position) {}
};

struct InvalidPropName : Error {
  explicit InvalidPropName(const std::string& name)
      : Error("invalid proposition name '" + name +
              "': must match [A-Za-z0-9_]+ and not be a reserved operator token") {}
};

struct SubstitutionError : Error {
  using Error::Error;
};

// --- automaton ---

struct FormulaTooLarge : Error {
  explicit FormulaTooLarge(std::size_t budget)
      : Error("tableau construction exceeded the node budget of " + std::to_string(budget)) {}
};

// --- patterns ---

struct ArityMismatch : Error {
  using Error::Error;
};

// --- dataset ---

struct PlaceholderMismatch : Error {
  using Error::Error;
};

struct TooFewClasses : Error {
  using Error::Error;
};

struct DatasetError : Error {
  using Error::Error;
};

// --- grounding / backends ---

struct BackendError : Error {
  using Error::Error;
};

struct NonSubstringOutput : Error {
  explicit NonSubstringOutput(const std::string& text)
      : Error("model returned text not found in the utterance: '" + text + "'") {}
};

struct ZeroVector : Error {
  explicit ZeroVector(const std::string& what_for)
      : Error("embedding has zero norm for: " + what_for) {}
};

struct UnboundSymbol : Error {
  explicit UnboundSymbol(const std::string& symbol)
      : Error("lifted formula uses symbol '" + symbol + "' with no landmark binding") {}
};

struct GroundingError : Error {
  using Error::Error;
};

// Wraps a failure from one pipeline stage with its stage tag.
struct StageError : Error {
  StageError(const std::string& stage_tag, const std::string& msg)
      : Error("[" + stage_tag + "] " + msg), stage(stage_tag) {}
  std::string stage;
};

// --- constrained decoding ---

struct SessionFinished : Error {
  SessionFinished() : Error("decode session already finished") {}
};

struct DisallowedToken : Error {
  explicit DisallowedToken(const std::string& tok)
      : Error("token '" + tok + "' is not admitted by the current mask") {}
};

struct TokenBudgetExceeded : Error {
  TokenBudgetExceeded() : Error("cannot complete a formula within the token budget") {}
};

// --- planner ---

struct UnknownProposition : Error {
  explicit UnknownProposition(const std::string& name)
      : Error("formula proposition '" + name + "' does not label any map node") {}
};

}  // namespace ltlground

#endif
