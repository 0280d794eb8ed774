// Operators, control builtins and argument-binding helpers.

#include <algorithm>

#include "builtins.hpp"
#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/reader.hpp"
#include "mls/s3.hpp"
#include "mls/s4.hpp"
#include "ops.hpp"

namespace mls::builtins {

std::vector<std::optional<Value>> bind(const std::vector<NamedValue>& args,
                                       const std::vector<std::string_view>& formals, const std::string& fn) {
  std::vector<std::optional<Value>> out(formals.size());
  std::vector<bool> used(args.size(), false);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].name) continue;
    auto it = std::find(formals.begin(), formals.end(), *args[i].name);
    if (it == formals.end()) throw Error("unused argument " + *args[i].name + " in " + fn + "()");
    auto j = static_cast<std::size_t>(it - formals.begin());
    if (out[j]) throw Error("formal argument \"" + *args[i].name + "\" matched by multiple arguments");
    out[j] = args[i].value;
    used[i] = true;
  }
  std::size_t next = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (used[i]) continue;
    while (next < formals.size() && out[next]) ++next;
    if (next == formals.size()) throw Error("unused argument in " + fn + "()");
    out[next] = args[i].value;
  }
  return out;
}

const Value& required(const std::vector<std::optional<Value>>& bound, std::size_t i, std::string_view formal) {
  if (!bound[i]) throw Error("argument \"" + std::string(formal) + "\" is missing, with no default");
  return *bound[i];
}

Value value_or(const std::vector<std::optional<Value>>& bound, std::size_t i, Value fallback) {
  return bound[i] ? *bound[i] : std::move(fallback);
}

std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op, const std::vector<Value>& operands,
                                       const CallContext& ctx) {
  if (interp.generics().find(op) != nullptr) {
    if (auto r = s4::dispatch_operator(interp, op, operands, ctx.env)) return r;
  }
  bool any_object = std::any_of(operands.begin(), operands.end(), [](const Value& v) { return v.is_object(); });
  if (!any_object) return std::nullopt;
  return s3::dispatch_operator(interp, op, operands, ctx.env);
}

namespace {

std::vector<Value> values_of(const std::vector<NamedValue>& args) {
  std::vector<Value> out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back(a.value);
  return out;
}

void install_arith(Interpreter& interp, const std::string& op) {
  interp.define_builtin(op, [op](Interpreter& in, std::vector<NamedValue>& args, const CallContext& ctx) -> Value {
    if (args.size() == 1 && (op == "+" || op == "-")) {
      if (auto r = dispatch_operator(in, op, {args[0].value}, ctx)) return *r;
      if (op == "-") return ops::negate(args[0].value);
      if (!args[0].value.is_numeric()) throw Error("invalid argument to unary operator");
      return args[0].value;
    }
    if (args.size() != 2) throw Error("operator needs two arguments");
    if (auto r = dispatch_operator(in, op, values_of(args), ctx)) return *r;
    return ops::arith(op, args[0].value, args[1].value);
  });
}

void install_compare(Interpreter& interp, const std::string& op) {
  interp.define_builtin(op, [op](Interpreter& in, std::vector<NamedValue>& args, const CallContext& ctx) -> Value {
    if (args.size() != 2) throw Error("operator needs two arguments");
    if (auto r = dispatch_operator(in, op, values_of(args), ctx)) return *r;
    return ops::compare(op, args[0].value, args[1].value);
  });
}

bool scalar_truth(const Value& v, const std::string& op) {
  if (v.length() != 1 || !v.is_atomic()) {
    throw Error("invalid 'x' type in 'x " + op + " y'");
  }
  return ops::condition_value(v);
}

std::string message_of(const std::vector<NamedValue>& args) {
  std::string msg;
  for (const auto& a : args) {
    for (const auto& s : as_character(a.value)) msg += s;
  }
  return msg;
}

}  // namespace

void install_core(Interpreter& interp) {
  for (const char* op : {"+", "-", "*", "/", "^", "%%", "%/%"}) install_arith(interp, op);
  for (const char* op : {"==", "!=", "<", "<=", ">", ">="}) install_compare(interp, op);

  interp.define_builtin("!", [](Interpreter& in, std::vector<NamedValue>& args, const CallContext& ctx) -> Value {
    if (args.size() != 1) throw Error("operator needs one argument");
    if (auto r = dispatch_operator(in, "!", {args[0].value}, ctx)) return *r;
    return ops::logical_not(args[0].value);
  });
  for (const char* op : {"&", "|"}) {
    std::string name = op;
    interp.define_builtin(name, [name](Interpreter& in, std::vector<NamedValue>& args, const CallContext& ctx) {
      if (args.size() != 2) throw Error("operator needs two arguments");
      if (auto r = dispatch_operator(in, name, values_of(args), ctx)) return *r;
      return ops::logical_elementwise(name, args[0].value, args[1].value);
    });
  }
  interp.define_special("&&", [](Interpreter& in, std::span<const CallArg> args, const CallContext& ctx) {
    if (args.size() != 2) throw Error("operator needs two arguments");
    if (!scalar_truth(in.eval(args[0].value, ctx.env), "&&")) return Value::logical(false);
    bool r = scalar_truth(in.eval(args[1].value, ctx.env), "&&");
    in.set_visible(true);
    return Value::logical(r);
  });
  interp.define_special("||", [](Interpreter& in, std::span<const CallArg> args, const CallContext& ctx) {
    if (args.size() != 2) throw Error("operator needs two arguments");
    if (scalar_truth(in.eval(args[0].value, ctx.env), "||")) return Value::logical(true);
    bool r = scalar_truth(in.eval(args[1].value, ctx.env), "||");
    in.set_visible(true);
    return Value::logical(r);
  });
  interp.define_builtin(":", [](Interpreter&, std::vector<NamedValue>& args, const CallContext&) {
    if (args.size() != 2) throw Error("operator needs two arguments");
    return ops::range(args[0].value, args[1].value);
  });
  interp.define_builtin("%in%", [](Interpreter&, std::vector<NamedValue>& args, const CallContext&) {
    if (args.size() != 2) throw Error("operator needs two arguments");
    Value x = ops::coerce_plain(args[0].value, Kind::String);
    Value table = ops::coerce_plain(args[1].value, Kind::String);
    std::vector<bool> r;
    for (const auto& s : x.strings()) {
      r.push_back(std::find(table.strings().begin(), table.strings().end(), s) != table.strings().end());
    }
    return Value::logical(std::move(r));
  });

  interp.define_special("quote", [](Interpreter&, std::span<const CallArg> args, const CallContext&) {
    if (args.size() != 1) throw Error("quote() takes exactly one argument");
    if (const auto* c = args[0].value->as<expr::Constant>()) return c->value;
    return Value::expression(args[0].value);
  });
  interp.define_special("missing", [](Interpreter&, std::span<const CallArg> args, const CallContext& ctx) {
    const expr::Symbol* sym = args.size() == 1 ? args[0].value->as<expr::Symbol>() : nullptr;
    if (sym == nullptr) throw Error("invalid use of 'missing'");
    const Binding* b = ctx.env->find_local(sym->name);
    if (b == nullptr) throw Error("'missing' can only be used for arguments");
    if (std::holds_alternative<MissingArg>(b->slot)) return Value::logical(true);
    if (const auto* p = std::get_if<PromisePtr>(&b->slot)) return Value::logical((*p)->is_default);
    return Value::logical(false);
  });
  interp.define_special("return", [](Interpreter& in, std::span<const CallArg> args, const CallContext& ctx) -> Value {
    if (args.size() > 1) throw Error("multi-argument returns are not permitted");
    if (in.frame_for(ctx.env) == nullptr) throw Error("no function to return from, jumping to top level");
    Value v;
    in.set_visible(true);
    if (!args.empty()) v = in.eval(args[0].value, ctx.env);
    throw FrameReturn{ctx.env.get(), std::move(v)};
  });
  interp.define_builtin("invisible", [](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
    Value v = args.empty() ? Value() : args[0].value;
    in.set_visible(false);
    return v;
  });
  interp.define_builtin("identity", [](Interpreter&, std::vector<NamedValue>& args, const CallContext& ctx) {
    return required(bind(args, {"x"}, ctx.name), 0, "x");
  });
  interp.define_builtin("stop", [](Interpreter&, std::vector<NamedValue>& args, const CallContext&) -> Value {
    throw Error(message_of(args));
  });
  interp.define_builtin("warning", [](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
    std::string msg = message_of(args);
    in.warn(msg);
    in.set_visible(false);
    return Value::str(msg);
  });
  interp.define_special("stopifnot", [](Interpreter& in, std::span<const CallArg> args, const CallContext& ctx) {
    for (const auto& a : args) {
      Value v = in.eval(a.value, ctx.env);
      bool ok = v.kind() == Kind::Logical && v.length() > 0;
      if (ok) {
        for (bool b : v.logicals()) ok = ok && b;
      }
      if (!ok) throw Error(deparse(a.value) + " is not TRUE");
    }
    in.set_visible(false);
    return Value();
  });
  interp.define_builtin("do.call", [](Interpreter& in, std::vector<NamedValue>& args, const CallContext& ctx) {
    auto b = bind(args, {"what", "args", "envir"}, ctx.name);
    Value what = required(b, 0, "what");
    Value list = value_or(b, 1, Value::list({}));
    EnvPtr env = b[2] && b[2]->kind() == Kind::Environment ? b[2]->environment_data() : ctx.env;
    std::string name = "<anonymous>";
    if (what.kind() == Kind::String) {
      name = as_string_scalar(what, "what");
      what = in.find_function(name, env);
    }
    if (!what.is_function()) throw Error("'what' must be a function or character string");
    if (list.kind() != Kind::List) list = ops::coerce(list, Kind::List);
    std::vector<NamedValue> call_args;
    auto names = list.names();
    for (std::size_t i = 0; i < list.length(); ++i) {
      std::optional<std::string> n;
      if (!names.empty() && !names[i].empty()) n = names[i];
      call_args.push_back({n, list.elements()[i]});
    }
    return in.call_value(what, std::move(call_args), env, ctx.loc, name);
  });
}

}  // namespace mls::builtins
