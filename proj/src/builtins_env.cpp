// Environment access: environment(), new.env(), assign/get/exists, eval.

#include <algorithm>

#include "builtins.hpp"
#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/reader.hpp"
#include "ops.hpp"

namespace mls::builtins {

namespace {

using Args = std::vector<NamedValue>;

EnvPtr env_arg(Interpreter& in, const std::optional<Value>& v, const EnvPtr& fallback, const CallContext& ctx) {
  if (!v) return fallback;
  if (v->kind() == Kind::Environment) return v->environment_data();
  if (v->kind() == Kind::RefInstance) return v->ref_data().backing;
  if (v->kind() == Kind::List) {
    EnvPtr env = in.new_environment(ctx.env, "list");
    auto names = v->names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!names[i].empty()) env->define_value(names[i], v->elements()[i]);
    }
    return env;
  }
  throw Error("invalid 'envir' argument of type '" + std::string(kind_name(v->kind())) + "'");
}

}  // namespace

void install_environment(Interpreter& interp) {
  interp.define_builtin("environment", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"fun"}, ctx.name);
    if (!b[0] || b[0]->is_null()) return Value::environment(ctx.env);
    if (b[0]->kind() == Kind::Closure) return Value::environment(b[0]->closure_data().enclosure);
    return Value();
  });
  interp.define_builtin("new.env", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"parent"}, ctx.name);
    EnvPtr parent = env_arg(in, b[0], ctx.env, ctx);
    return Value::environment(in.new_environment(parent, "env"));
  });
  interp.define_builtin("globalenv", [](Interpreter& in, Args& args, const CallContext& ctx) {
    bind(args, {}, ctx.name);
    return Value::environment(in.global_env());
  });
  interp.define_builtin("environmentName", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value e = required(bind(args, {"env"}, ctx.name), 0, "env");
    if (e.kind() != Kind::Environment) return Value::str("");
    return Value::str(e.environment_data()->tag());
  });
  interp.define_builtin("ls", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"envir"}, ctx.name);
    EnvPtr env = env_arg(in, b[0], ctx.env, ctx);
    std::vector<std::string> out;
    for (const auto& n : env->names()) {
      if (!n.empty() && n[0] != '.') out.push_back(n);
    }
    return Value::str(std::move(out));
  });
  interp.define_builtin("assign", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "value", "envir"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "x"), "x");
    Value value = required(b, 1, "value");
    EnvPtr env = env_arg(in, b[2], ctx.env, ctx);
    in.write_binding(*env, name, value);
    in.set_visible(false);
    return value;
  });
  interp.define_builtin("get", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "envir"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "x"), "x");
    return in.lookup(name, env_arg(in, b[1], ctx.env, ctx));
  });
  interp.define_builtin("exists", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "envir", "inherits"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "x"), "x");
    EnvPtr env = env_arg(in, b[1], ctx.env, ctx);
    bool inherits = as_logical_scalar(value_or(b, 2, Value::logical(true)), "inherits");
    return Value::logical(inherits ? env->find_owner(name) != nullptr : env->has_local(name));
  });
  interp.define_builtin("eval", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"expr", "envir"}, ctx.name);
    Value e = required(b, 0, "expr");
    EnvPtr env = env_arg(in, b[1], ctx.env, ctx);
    if (e.kind() != Kind::Expression) return e;
    return in.eval(e.expression_data(), env);
  });
  interp.define_builtin("parse_text", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::string text = as_string_scalar(required(bind(args, {"text"}, ctx.name), 0, "text"), "text");
    ExprPtr e = parse_expression(text);
    if (const auto* c = e->as<expr::Constant>()) return c->value;
    return Value::expression(e);
  });
}

}  // namespace mls::builtins
