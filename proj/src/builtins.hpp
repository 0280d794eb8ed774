#ifndef MLS_SRC_BUILTINS_HPP
#define MLS_SRC_BUILTINS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mls/interpreter.hpp"

namespace mls::builtins {

void install_core(Interpreter& interp);
void install_vectors(Interpreter& interp);
void install_environment(Interpreter& interp);
void install_oop(Interpreter& interp);
void install_state(Interpreter& interp);
/// Definitions written in MLS itself (print generic and friends).
void install_prelude(Interpreter& interp);

/// Matches evaluated arguments to the named formals of a builtin: exact
/// names first, then positions. Unmatched formals are nullopt.
std::vector<std::optional<Value>> bind(const std::vector<NamedValue>& args,
                                       const std::vector<std::string_view>& formals, const std::string& fn);

/// The bound value, or an "argument is missing" error.
const Value& required(const std::vector<std::optional<Value>>& bound, std::size_t i, std::string_view formal);

Value value_or(const std::vector<std::optional<Value>>& bound, std::size_t i, Value fallback);

/// Runs S4 then S3 operator dispatch when either operand is an object or
/// an S4 generic exists for op; nullopt means the builtin should apply.
std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op, const std::vector<Value>& operands,
                                       const CallContext& ctx);

}  // namespace mls::builtins

#endif  // MLS_SRC_BUILTINS_HPP
