#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hopfmean::expr {

/// Parse failure with the byte offset of the offending token.
struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
  std::size_t offset;
};

struct MissingParameter : std::runtime_error {
  explicit MissingParameter(const std::string& name)
      : std::runtime_error("missing parameter: " + name) {}
};

enum class NodeKind : std::uint8_t {
  Constant,
  StateVar,   // x1..xn, stored as zero-based index
  Param,      // index into the parameter name list
  Neg,
  Add, Sub, Mul, Div, Pow,
  Call,
};

enum class Func : std::uint8_t { Exp, Log, Sin, Cos, Tanh, Sqrt, Abs };

struct Node {
  NodeKind kind;
  Func func{};
  double value{};
  int index{};
  int lhs{-1};
  int rhs{-1};
};

/// Immutable arithmetic expression tree over state variables x1..xn and
/// named parameters. Evaluation is pure; instances are safe to share
/// across threads.
class Ast {
public:
  /// Grammar: ^ binds tighter than unary minus, which binds tighter than
  /// * and /, which bind tighter than + and -. Binary + - * / are
  /// left-associative, ^ is right-associative. No implicit multiplication.
  static Ast parse(std::string_view source, int dimension,
                   const std::vector<std::string>& parameter_names);

  /// Evaluate with parameter values aligned to parameter_names().
  /// IEEE semantics: division by zero and log of non-positive values
  /// produce inf/nan which propagate to the caller.
  double eval(std::span<const double> state, std::span<const double> params) const;

  /// Map-based convenience; throws MissingParameter.
  double eval(std::span<const double> state,
              const std::map<std::string, double>& params) const;

  /// Fully parenthesized form; reparses to a structurally identical tree.
  std::string str() const;

  int dimension() const { return dim_; }
  const std::vector<std::string>& parameter_names() const { return params_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

  bool structurally_equal(const Ast& other) const;

private:
  std::vector<Node> nodes_;
  int root_ = -1;
  int dim_ = 0;
  std::vector<std::string> params_;
};

}  // namespace hopfmean::expr
