#ifndef MLS_READER_HPP
#define MLS_READER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "mls/expr.hpp"

namespace mls {

/// Parses MLS source into top-level expressions. Throws SyntaxError.
std::vector<ExprPtr> parse_program(std::string_view source);

/// Parses exactly one expression (surrounding blank lines allowed).
ExprPtr parse_expression(std::string_view source);

/// Source text that reparses to a structurally equal expression.
std::string deparse(const ExprPtr& e);

/// Deparse of a constant value, e.g. `c(1, 2)` or `"a"`.
std::string deparse_value(const Value& v);

/// `function(x, y = 2) body` for a closure.
std::string deparse_function(const std::vector<Formal>& formals, const ExprPtr& body);

/// True for names that can be written without backquotes.
bool is_syntactic_name(std::string_view name);

}  // namespace mls

#endif  // MLS_READER_HPP
