#include "mls/s3.hpp"

#include <algorithm>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/reader.hpp"

namespace mls::s3 {

namespace {

std::string describe_classes(const std::vector<std::string>& classes) {
  if (classes.size() == 1) return "\"" + classes[0] + "\"";
  std::string out = "c(";
  for (std::size_t i = 0; i < classes.size(); ++i) out += (i ? ", \"" : "\"") + classes[i] + "\"";
  return out + ")";
}

std::optional<S3Method> find_in(Interpreter& interp, const std::string& name, const std::vector<EnvPtr>& envs) {
  for (const auto& env : envs) {
    if (!env) continue;
    if (auto fn = interp.find_function_opt(name, env)) return S3Method{*fn, name};
  }
  return std::nullopt;
}

std::optional<S3Method> find_method_in(Interpreter& interp, const std::string& generic,
                                       const std::vector<std::string>& classes, const std::vector<EnvPtr>& envs,
                                       bool include_default) {
  for (const auto& cls : classes) {
    if (auto m = find_in(interp, generic + "." + cls, envs)) return m;
  }
  if (include_default) return find_in(interp, generic + ".default", envs);
  return std::nullopt;
}

}  // namespace

std::optional<S3Method> find_method(Interpreter& interp, const std::string& generic,
                                    const std::vector<std::string>& classes, const EnvPtr& lookup_env,
                                    bool include_default) {
  return find_method_in(interp, generic, classes, {lookup_env}, include_default);
}

Value use_method(Interpreter& interp, const std::string& generic, const EnvPtr& call_env) {
  const Frame* frame = interp.frame_for(call_env);
  if (frame == nullptr || frame->function.kind() != Kind::Closure) {
    throw Error("UseMethod called from outside a function");
  }
  const auto& formals = frame->function.closure_data().formals;
  Value dispatch_on;
  if (!formals.empty()) {
    const Binding* b = call_env->find_local(formals[0].name);
    if (b != nullptr) dispatch_on = interp.read_binding(*b, formals[0].name);
  }
  std::vector<std::string> classes = implicit_class(dispatch_on);
  std::vector<PromiseArg> args = frame->args;
  EnvPtr caller = frame->caller;

  auto method = find_method_in(interp, generic, classes, {caller, call_env}, true);
  if (!method) {
    throw Error("no applicable method for '" + generic + "' applied to class " + describe_classes(classes));
  }
  return interp.apply(method->function, std::move(args), caller, {}, method->name);
}

bool inherits(const Value& v, const std::string& cls) {
  auto classes = implicit_class(v);
  return std::find(classes.begin(), classes.end(), cls) != classes.end();
}

std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op,
                                       const std::vector<Value>& operands, const EnvPtr& env) {
  std::optional<S3Method> left;
  std::optional<S3Method> right;
  if (!operands.empty() && operands[0].is_object()) {
    left = find_method(interp, op, implicit_class(operands[0]), env, false);
  }
  if (operands.size() > 1 && operands[1].is_object()) {
    right = find_method(interp, op, implicit_class(operands[1]), env, false);
  }
  if (!left && !right) return std::nullopt;
  const S3Method* chosen = left ? &*left : &*right;
  if (left && right && !structurally_equal(left->function, right->function)) {
    interp.warn("incompatible methods (\"" + left->name + "\", \"" + right->name + "\") for \"" + op +
                "\"; using \"" + left->name + "\"");
  }
  std::vector<NamedValue> args;
  for (const auto& v : operands) args.push_back({std::nullopt, v});
  return interp.call_value(chosen->function, std::move(args), env, {}, chosen->name);
}

}  // namespace mls::s3
