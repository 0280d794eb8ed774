// Builtins for the three object systems: UseMethod, the formal class and
// generic functions, and reference-class generators.

#include <algorithm>

#include "builtins.hpp"
#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/refclass.hpp"
#include "mls/s3.hpp"
#include "mls/s4.hpp"

namespace mls::builtins {

namespace {

using Args = std::vector<NamedValue>;

/// Named character vector or named list of class names.
s4::SlotList slot_list(const Value& v, const std::string& what) {
  s4::SlotList out;
  if (v.is_null()) return out;
  auto names = v.names();
  for (std::size_t i = 0; i < v.length(); ++i) {
    if (i >= names.size() || names[i].empty()) throw Error("all elements of '" + what + "' must be named");
    Value cls = v.kind() == Kind::List ? v.elements()[i] : Value::str(as_character(v)[i]);
    out.emplace_back(names[i], as_string_scalar(cls, what));
  }
  return out;
}

std::vector<std::string> string_vector(const std::optional<Value>& v) {
  if (!v || v->is_null()) return {};
  if (v->kind() != Kind::String) throw Error("expected a character vector");
  return v->strings();
}

/// Signature given as a (possibly named) character vector or list.
std::vector<NamedValue> signature_entries(const Value& sig) {
  std::vector<NamedValue> out;
  auto names = sig.names();
  for (std::size_t i = 0; i < sig.length(); ++i) {
    std::optional<std::string> name;
    if (i < names.size() && !names[i].empty()) name = names[i];
    Value cls = sig.kind() == Kind::List ? sig.elements()[i] : Value::str(as_character(sig)[i]);
    out.push_back({name, cls});
  }
  return out;
}

/// Exact-signature lookup, padding with ANY like set_method.
const s4::MethodDefinition* exact_method(Interpreter& in, const std::string& f, const Value& sig) {
  const s4::GenericFunction* g = in.generics().find(f);
  if (g == nullptr) throw Error("no generic function found for '" + f + "'");
  std::vector<std::string> key(g->signature.size(), std::string(s4::kAny));
  std::size_t next = 0;
  for (const auto& e : signature_entries(sig)) {
    std::size_t idx = next;
    if (e.name) {
      auto it = std::find(g->signature.begin(), g->signature.end(), *e.name);
      if (it == g->signature.end()) return nullptr;
      idx = static_cast<std::size_t>(it - g->signature.begin());
    } else {
      ++next;
    }
    if (idx >= key.size()) return nullptr;
    key[idx] = as_string_scalar(e.value, "signature");
  }
  auto it = g->methods.find(key);
  return it == g->methods.end() ? nullptr : &it->second;
}

std::vector<refclass::FieldSpec> field_specs(const std::optional<Value>& fields,
                                             const std::vector<std::string>& read_only) {
  std::vector<refclass::FieldSpec> out;
  if (!fields || fields->is_null()) return out;
  auto names = fields->names();
  for (std::size_t i = 0; i < fields->length(); ++i) {
    refclass::FieldSpec spec;
    if (fields->kind() == Kind::String && names.empty()) {
      spec.name = fields->strings()[i];  // unnamed: untyped fields
    } else {
      if (i >= names.size() || names[i].empty()) throw Error("all fields must be named");
      spec.name = names[i];
      Value v = fields->kind() == Kind::List ? fields->elements()[i] : Value::str(as_character(*fields)[i]);
      if (v.kind() == Kind::Closure) {
        spec.getter = v;
        if (!v.closure_data().formals.empty()) spec.setter = v;
      } else {
        spec.declared_class = as_string_scalar(v, "fields");
      }
    }
    spec.read_only = std::find(read_only.begin(), read_only.end(), spec.name) != read_only.end();
    out.push_back(std::move(spec));
  }
  for (const auto& r : read_only) {
    if (std::none_of(out.begin(), out.end(), [&](const auto& f) { return f.name == r; })) {
      throw Error("read-only field \"" + r + "\" is not a declared field");
    }
  }
  return out;
}

std::vector<std::pair<std::string, Value>> method_specs(const std::optional<Value>& methods) {
  std::vector<std::pair<std::string, Value>> out;
  if (!methods || methods->is_null()) return out;
  if (methods->kind() != Kind::List) throw Error("'methods' must be a named list of functions");
  auto names = methods->names();
  for (std::size_t i = 0; i < methods->length(); ++i) {
    if (i >= names.size() || names[i].empty()) throw Error("all methods must be named");
    out.emplace_back(names[i], methods->elements()[i]);
  }
  return out;
}

}  // namespace

void install_oop(Interpreter& interp) {
  // -- informal dispatch -----------------------------------------------------
  interp.define_builtin("UseMethod", [](Interpreter& in, Args& args, const CallContext& ctx) -> Value {
    auto b = bind(args, {"generic", "object"}, ctx.name);
    std::string generic = as_string_scalar(required(b, 0, "generic"), "generic");
    Value v = s3::use_method(in, generic, ctx.env);
    throw FrameReturn{ctx.env.get(), std::move(v)};
  });

  // -- formal classes --------------------------------------------------------
  interp.define_builtin("representation", [](Interpreter&, Args& args, const CallContext&) {
    std::vector<std::string> names;
    std::vector<std::string> classes;
    for (const auto& a : args) {
      if (!a.name) throw Error("representation() arguments must be named");
      names.push_back(*a.name);
      classes.push_back(as_string_scalar(a.value, *a.name));
    }
    return Value::str(std::move(classes)).with_attribute("names", Value::str(std::move(names)));
  });
  interp.define_builtin("setClass", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"Class", "slots", "contains", "virtual", "representation"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "Class"), "Class");
    Value slots = b[1] ? *b[1] : value_or(b, 4, Value());
    bool is_virtual = as_logical_scalar(value_or(b, 3, Value::logical(false)), "virtual");
    const auto& def = in.classes().set_class(name, slot_list(slots, "slots"), string_vector(b[2]), is_virtual);
    in.set_visible(false);
    return s4::class_representation(def);
  });
  interp.define_builtin("new", [](Interpreter& in, Args& args, const CallContext&) {
    if (args.empty() || args[0].name.value_or("Class") != "Class") {
      throw Error("argument \"Class\" is missing, with no default");
    }
    std::string name = as_string_scalar(args[0].value, "Class");
    std::vector<NamedValue> inits(args.begin() + 1, args.end());
    if (in.ref_classes().find(name) != nullptr) return refclass::generator_new(in, name, inits);
    return s4::new_instance(in, name, inits);
  });
  interp.define_builtin("slot", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"object", "name"}, ctx.name);
    return s4::slot_get(required(b, 0, "object"), as_string_scalar(required(b, 1, "name"), "name"));
  });
  interp.define_builtin("set_slot", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"object", "name", "value"}, ctx.name);
    return s4::slot_set(in, required(b, 0, "object"), as_string_scalar(required(b, 1, "name"), "name"),
                        required(b, 2, "value"));
  });
  interp.define_builtin("slotNames", [](Interpreter& in, Args& args, const CallContext& ctx) {
    Value x = required(bind(args, {"x"}, ctx.name), 0, "x");
    std::vector<std::string> out;
    if (x.kind() == Kind::S4Instance) {
      for (const auto& [n, _] : x.s4_data().slots) out.push_back(n);
    } else {
      std::string name = as_string_scalar(x, "x");
      const s4::ClassDefinition* def = in.classes().find(name);
      if (def == nullptr) throw Error("undefined class \"" + name + "\"");
      for (const auto& [n, _] : def->slots) out.push_back(n);
    }
    return Value::str(std::move(out));
  });
  interp.define_builtin("is", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"object", "class2"}, ctx.name);
    const Value& obj = required(b, 0, "object");
    if (!b[1]) {
      std::vector<std::string> out;
      for (const auto& a : s4::lineage_of_value(in.classes(), obj)) out.push_back(a.name);
      return Value::str(std::move(out));
    }
    return Value::logical(in.conforms(obj, as_string_scalar(*b[1], "class2")));
  });
  interp.define_builtin("isVirtualClass", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"Class"}, ctx.name), 0, "Class"), "Class");
    const s4::ClassDefinition* def = in.classes().find(name);
    return Value::logical(def != nullptr && def->is_virtual);
  });
  interp.define_builtin("existsClass", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"Class"}, ctx.name), 0, "Class"), "Class");
    return Value::logical(in.classes().defined(name));
  });
  interp.define_builtin("getClass", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"Class"}, ctx.name), 0, "Class"), "Class");
    const s4::ClassDefinition* def = in.classes().find(name);
    if (def == nullptr) throw Error("\"" + name + "\" is not a defined class");
    return s4::class_representation(*def);
  });
  interp.define_builtin("superclassDistance", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"from", "to"}, ctx.name);
    auto d = in.classes().superclass_distance(as_string_scalar(required(b, 0, "from"), "from"),
                                              as_string_scalar(required(b, 1, "to"), "to"));
    return d ? Value::integer(static_cast<std::int64_t>(*d)) : Value();
  });

  // -- generic functions -----------------------------------------------------
  interp.define_builtin("setGeneric", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"name", "def", "signature"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "name"), "name");
    return s4::set_generic(in, name, value_or(b, 1, Value()), string_vector(b[2]), ctx.env);
  });
  interp.define_builtin("standardGeneric", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"f"}, ctx.name), 0, "f"), "f");
    return s4::standard_generic(in, name, ctx.env);
  });
  interp.define_builtin("signature", [](Interpreter&, Args& args, const CallContext&) {
    std::vector<std::string> names;
    std::vector<std::string> classes;
    bool any_named = false;
    for (const auto& a : args) {
      names.push_back(a.name.value_or(""));
      any_named = any_named || a.name.has_value();
      classes.push_back(as_string_scalar(a.value, "signature"));
    }
    Value out = Value::str(std::move(classes));
    return any_named ? out.with_attribute("names", Value::str(std::move(names))) : out;
  });
  interp.define_builtin("setMethod", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"f", "signature", "definition"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "f"), "f");
    Value m = s4::set_method(in, name, signature_entries(value_or(b, 1, Value())), required(b, 2, "definition"),
                             ctx.env);
    in.set_visible(false);
    return m;
  });
  interp.define_builtin("isGeneric", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"f"}, ctx.name), 0, "f"), "f");
    return Value::logical(in.generics().find(name) != nullptr);
  });
  interp.define_builtin("getGenerics", [](Interpreter& in, Args& args, const CallContext& ctx) {
    bind(args, {}, ctx.name);
    return Value::str(in.generics().names());
  });
  interp.define_builtin("getGeneric", [](Interpreter& in, Args& args, const CallContext& ctx) {
    std::string name = as_string_scalar(required(bind(args, {"f"}, ctx.name), 0, "f"), "f");
    const s4::GenericFunction* g = in.generics().find(name);
    if (g == nullptr) throw Error("no generic function found for '" + name + "'");
    std::vector<std::string> formals;
    for (const auto& f : g->formals) formals.push_back(f.name);
    std::vector<Value> methods;
    for (const auto& [_, m] : g->methods) methods.push_back(s4::method_value(name, m));
    return Value::list({Value::str(name), Value::str(formals), Value::str(g->signature), Value::list(methods)},
                       {"name", "formals", "signature", "methods"});
  });
  interp.define_builtin("getMethod", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"f", "signature"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "f"), "f");
    Value sig = value_or(b, 1, Value());
    const s4::MethodDefinition* m = exact_method(in, name, sig);
    if (m == nullptr) {
      throw Error("no method for '" + name + "' matches the signature (" +
                  (sig.is_null() ? std::string() : as_character(sig).front()) + ")");
    }
    return s4::method_value(name, *m);
  });
  interp.define_builtin("existsMethod", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"f", "signature"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "f"), "f");
    if (in.generics().find(name) == nullptr) return Value::logical(false);
    return Value::logical(exact_method(in, name, value_or(b, 1, Value())) != nullptr);
  });
  interp.define_builtin("selectMethod", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"f", "signature"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "f"), "f");
    const s4::GenericFunction* g = in.generics().find(name);
    if (g == nullptr) throw Error("no generic function found for '" + name + "'");
    std::vector<std::string> classes = string_vector(b[1]);
    classes.resize(g->signature.size(), std::string(s4::kAny));
    auto sel = s4::select_method(*g, classes, in.classes());
    return s4::method_value(name, *sel.method);
  });

  // -- reference classes -----------------------------------------------------
  interp.define_builtin("setRefClass", [](Interpreter& in, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"Class", "fields", "methods", "contains", "read_only"}, ctx.name);
    std::string name = as_string_scalar(required(b, 0, "Class"), "Class");
    std::optional<std::string> contains;
    if (b[3] && !b[3]->is_null()) contains = as_string_scalar(*b[3], "contains");
    return refclass::set_ref_class(in, name, field_specs(b[1], string_vector(b[4])), method_specs(b[2]), contains,
                                   ctx.env);
  });
  interp.define_builtin("copy", [](Interpreter& in, Args& args, const CallContext& ctx) {
    return refclass::copy_instance(in, required(bind(args, {"x"}, ctx.name), 0, "x"));
  });
}

}  // namespace mls::builtins
