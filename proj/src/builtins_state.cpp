// Interpreter-state builtins (options, generator, foreign stubs), output,
// and the prelude written in MLS.

#include <cmath>

#include "builtins.hpp"
#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/reader.hpp"
#include "mls/refclass.hpp"
#include "ops.hpp"

namespace mls::builtins {

namespace {

using Args = std::vector<NamedValue>;

constexpr const char* kPrelude = R"mls(
pi <- 3.141592653589793
print <- function(x) UseMethod("print")
print.default <- function(x) print_default(x)
)mls";

Value options_table(Interpreter& in) {
  const Binding* b = in.global_env()->find_local(kOptionsName);
  if (b == nullptr || !b->is_immediate()) return Value::list({}, {});
  return std::get<Value>(b->slot);
}

Value ddot(std::vector<Value>& args) {
  if (args.size() != 2) throw Error("blas_ddot expects two vectors");
  Value x = ops::coerce_plain(args[0], Kind::Double);
  Value y = ops::coerce_plain(args[1], Kind::Double);
  if (x.length() != y.length()) throw Error("blas_ddot: vector lengths differ");
  double s = 0;
  for (std::size_t i = 0; i < x.length(); ++i) s += x.doubles()[i] * y.doubles()[i];
  return Value::dbl(s);
}

}  // namespace

void install_state(Interpreter& interp) {
  interp.define_builtin("options", [](Interpreter& in, Args& args, const CallContext&) {
    if (args.empty()) return options_table(in);
    std::vector<Value> old;
    std::vector<std::string> names;
    auto record = [&](const std::string& name, const Value& v) {
      names.push_back(name);
      old.push_back(in.get_option(name));
      in.set_option(name, v);
    };
    if (args.size() == 2 && !args[0].name && !args[1].name) {
      record(as_string_scalar(args[0].value, "name"), args[1].value);
    } else if (args.size() == 1 && !args[0].name) {
      std::string name = as_string_scalar(args[0].value, "name");
      return Value::list({in.get_option(name)}, {name});
    } else {
      for (const auto& a : args) {
        if (!a.name) throw Error("options: arguments must be named, or a name and a value");
        record(*a.name, a.value);
      }
    }
    in.set_visible(false);
    return Value::list(std::move(old), std::move(names));
  });
  interp.define_builtin("get_option", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"name", "default"}, ctx.name);
    Value v = in.get_option(as_string_scalar(required(b, 0, "name"), "name"));
    if (v.is_null() && b[1]) return *b[1];
    return v;
  });
  interp.define_builtin("get_option_from", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"opts", "name"}, ctx.name);
    Value opts = required(b, 0, "opts");
    std::string name = as_string_scalar(required(b, 1, "name"), "name");
    if (opts.is_null()) return Value();
    if (opts.kind() != Kind::List) throw Error("'opts' must be a list");
    return ops::index_get(opts, {Value::str(name)}, true);
  });
  interp.define_builtin("set_seed", [](Interpreter& in, Args& args, const CallContext& ctx) {
    Value seed = required(bind(args, {"seed"}, ctx.name), 0, "seed");
    double d = as_double_scalar(seed, "seed");
    if (!std::isfinite(d) || d != std::floor(d)) throw Error("supplied seed is not a valid integer");
    in.set_seed(static_cast<std::int64_t>(d));
    in.set_visible(false);
    return Value();
  });
  interp.define_builtin("rng_draw", [](Interpreter& in, Args& args, const CallContext& ctx) {
    Value n = required(bind(args, {"n"}, ctx.name), 0, "n");
    double d = as_double_scalar(n, "n");
    if (d < 0) throw Error("invalid number of draws: " + as_character(n).front());
    return in.rng_draw(static_cast<std::int64_t>(d));
  });
  interp.define_builtin("foreign", [](Interpreter& in, Args& args, const CallContext&) {
    if (args.empty()) throw Error("argument \"tag\" is missing, with no default");
    std::string tag = as_string_scalar(args[0].value, "tag");
    std::vector<Value> rest;
    for (std::size_t i = 1; i < args.size(); ++i) rest.push_back(args[i].value);
    return in.call_foreign(tag, std::move(rest));
  });
  interp.register_foreign("identity", [](std::vector<Value>& args) {
    if (args.size() != 1) throw Error("foreign identity expects one argument");
    return args[0];
  });
  interp.register_foreign("blas_ddot", ddot);

  interp.define_builtin("print_default", [](Interpreter& in, Args& args, const CallContext& ctx) {
    Value x = required(bind(args, {"x"}, ctx.name), 0, "x");
    if (x.kind() == Kind::RefInstance) {
      in.out() << refclass::format_instance(in, x);
    } else {
      in.out() << format_value(x);
    }
    in.set_visible(false);
    return x;
  });
  interp.define_builtin("cat", [](Interpreter& in, Args& args, const CallContext&) {
    std::string sep = " ";
    std::vector<std::string> items;
    for (const auto& a : args) {
      if (a.name && *a.name == "sep") {
        sep = as_string_scalar(a.value, "sep");
        continue;
      }
      if (a.value.is_null()) continue;
      if (a.value.kind() == Kind::List) {
        for (const auto& e : a.value.elements()) items.push_back(format_for_cat(e));
      } else if (a.value.is_atomic()) {
        for (std::size_t i = 0; i < a.value.length(); ++i) items.push_back(format_for_cat(ops::element_at(a.value, i)));
      } else {
        items.push_back(format_for_cat(a.value));
      }
    }
    for (std::size_t i = 0; i < items.size(); ++i) in.out() << (i ? sep : "") << items[i];
    in.set_visible(false);
    return Value();
  });
}

void install_prelude(Interpreter& interp) {
  for (const auto& e : parse_program(kPrelude)) interp.eval(e, interp.base_env());
}

}  // namespace mls::builtins
