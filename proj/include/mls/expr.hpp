#ifndef MLS_EXPR_HPP
#define MLS_EXPR_HPP

// Parse trees. Control syntax and operators keep dedicated node kinds for
// the evaluator, and canonical_call() maps every node onto the call form
// used by the purity analyzer.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mls/value.hpp"

namespace mls {

struct CallArg {
  std::optional<std::string> name;
  ExprPtr value;
};

namespace expr {

struct Constant {
  Value value;
};
struct Symbol {
  std::string name;
};
struct Call {
  ExprPtr callee;
  std::vector<CallArg> args;
};
struct FunctionLiteral {
  std::vector<Formal> formals;
  ExprPtr body;
};
struct Assign {
  ExprPtr target;  // always a Symbol
  ExprPtr value;
};
struct SuperAssign {
  ExprPtr target;  // always a Symbol
  ExprPtr value;
};
struct Block {
  std::vector<ExprPtr> exprs;
};
struct If {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;  // may be null
};
struct While {
  ExprPtr cond;
  ExprPtr body;
};
struct Index {
  ExprPtr object;
  std::vector<ExprPtr> indices;
  bool element = false;  // [[ ]]
};
struct IndexAssign {
  ExprPtr object;
  std::vector<ExprPtr> indices;
  bool element = false;
  ExprPtr value;
  bool super = false;  // <<-
};
struct FieldAccess {
  ExprPtr object;
  std::string name;
};
struct FieldAssign {
  ExprPtr object;
  std::string name;
  ExprPtr value;
  bool super = false;
};

}  // namespace expr

struct Node {
  using Variant = std::variant<expr::Constant, expr::Symbol, expr::Call, expr::FunctionLiteral,
                               expr::Assign, expr::SuperAssign, expr::Block, expr::If,
                               expr::While, expr::Index, expr::IndexAssign,
                               expr::FieldAccess, expr::FieldAssign>;
  Variant data;
  SourceLocation loc;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&data);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
};

template <class T>
ExprPtr make_node(T data, SourceLocation loc = {}) {
  return std::make_shared<const Node>(Node{std::move(data), loc});
}

inline ExprPtr make_symbol(std::string name, SourceLocation loc = {}) {
  return make_node(expr::Symbol{std::move(name)}, loc);
}
inline ExprPtr make_constant(Value v, SourceLocation loc = {}) {
  return make_node(expr::Constant{std::move(v)}, loc);
}

/// Structural equality ignoring source locations.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// The call-form view of a node: If becomes `if`(cond, then, else), Block
/// becomes `{`(...), assignments become `<-`/`<<-`(target, value),
/// indexing becomes `[`/`[[`, field access becomes `$`(obj, name) and a
/// function literal becomes `function`(body) with formals carried as
/// named arguments. Constants and symbols are returned unchanged.
ExprPtr canonical_call(const ExprPtr& e);

/// Name of the callee when it is a plain symbol.
std::optional<std::string> callee_name(const expr::Call& call);

}  // namespace mls

#endif  // MLS_EXPR_HPP
