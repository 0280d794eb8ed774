#ifndef MLS_S3_HPP
#define MLS_S3_HPP

// Informal dispatch: a method for generic g and class c is any function
// bound to the name "g.c" on the lookup environment's chain. The class
// vector of the first argument is walked in order, then "g.default".

#include <optional>
#include <string>
#include <vector>

#include "mls/interpreter.hpp"

namespace mls::s3 {

struct S3Method {
  Value function;
  std::string name;  // e.g. "print.lm"
};

/// First `generic.class` function found for classes in order, then
/// `generic.default` when include_default is set.
std::optional<S3Method> find_method(Interpreter& interp, const std::string& generic,
                                    const std::vector<std::string>& classes, const EnvPtr& lookup_env,
                                    bool include_default = true);

/// Dispatches on the first formal of the closure running in call_env and
/// returns the selected method's value. The method receives the generic's
/// original promises.
Value use_method(Interpreter& interp, const std::string& generic, const EnvPtr& call_env);

bool inherits(const Value& v, const std::string& cls);

/// Method dispatch for an operator on either operand. Returns nullopt when
/// neither operand selects a method, so the builtin applies.
std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op,
                                       const std::vector<Value>& operands, const EnvPtr& env);

}  // namespace mls::s3

#endif  // MLS_S3_HPP
