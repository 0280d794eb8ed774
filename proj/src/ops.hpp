#ifndef MLS_SRC_OPS_HPP
#define MLS_SRC_OPS_HPP

// Vector primitives shared by the evaluator and the builtins. None of
// these dispatch; method lookup happens in the builtin wrappers.

#include <string>
#include <string_view>
#include <vector>

#include "mls/interpreter.hpp"
#include "mls/value.hpp"

namespace mls::ops {

/// Truth value of an `if`/`while` condition: first element of a
/// non-empty logical or numeric vector.
bool condition_value(const Value& v);

/// Kind ordering used for coercion: Logical < Integer < Double < String < List.
int kind_rank(Kind k);
Value coerce(const Value& v, Kind target);
/// Coerces, keeping only the names attribute.
Value coerce_plain(const Value& v, Kind target);

/// + - * / ^ %% %/% with recycling. Integer results stay integer except
/// for `/` and `^`. Only names survive, taken from the longer operand.
Value arith(std::string_view op, const Value& a, const Value& b);
Value negate(const Value& a);
Value logical_not(const Value& a);
/// == != < <= > >= on numbers or strings.
Value compare(std::string_view op, const Value& a, const Value& b);
/// Elementwise & and |.
Value logical_elementwise(std::string_view op, const Value& a, const Value& b);
Value range(const Value& from, const Value& to);

Value index_get(const Value& obj, const std::vector<Value>& indices, bool element);
Value index_set(const Value& obj, const std::vector<Value>& indices, bool element, const Value& v);

/// `$` on lists, environments, reference instances and generators.
Value field_get(Interpreter& interp, const Value& obj, const std::string& name);
/// Returns the updated container; environments and reference instances
/// are mutated in place and returned unchanged.
Value field_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v);

/// Sets (or with Null removes) a named list element.
Value list_set_field(const Value& list, const std::string& name, const Value& v);

/// c(): flattens vectors and lists, promoting to the highest kind.
Value combine(const std::vector<NamedValue>& args);

/// Element i of a vector as a length-1 vector of the same kind.
Value element_at(const Value& v, std::size_t i);

}  // namespace mls::ops

#endif  // MLS_SRC_OPS_HPP
