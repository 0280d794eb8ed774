#include "mls/refclass.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/s4.hpp"

namespace mls::refclass {

const RefClassDefinition* Registry::find(const std::string& name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : &it->second;
}

const RefClassDefinition& Registry::define(RefClassDefinition def) {
  std::string name = def.name;
  auto& slot = classes_[name];
  slot = std::move(def);
  return slot;
}

namespace {

constexpr const char* kGeneratorClass = "refObjectGenerator";

/// A function closed over the instance's backing environment.
Value reenclose(const Value& fn, const EnvPtr& backing) {
  if (fn.kind() != Kind::Closure) return fn;
  ClosureData c = fn.closure_data();
  c.enclosure = backing;
  return Value::closure(std::move(c)).with_attributes(fn.attributes());
}

std::string field_type_error(const std::string& field, const std::string& declared, const Value& v) {
  return "invalid assignment for reference class field '" + field + "', should be from class \"" + declared +
         "\" or a subclass (was class \"" + implicit_class(v).front() + "\")";
}

const RefClassDefinition& definition_or_error(Interpreter& interp, const std::string& name) {
  const RefClassDefinition* def = interp.ref_classes().find(name);
  if (def == nullptr) throw Error("no reference class named \"" + name + "\"");
  return *def;
}

Binding field_binding(const FieldSpec& f, const EnvPtr& backing, Value initial) {
  Binding b;
  b.is_field = true;
  b.declared_class = f.declared_class;
  if (f.is_active()) {
    b.slot = ActiveBinding{reenclose(f.getter, backing), reenclose(f.setter, backing)};
  } else {
    b.slot = std::move(initial);
    b.read_only = f.read_only;
  }
  return b;
}

void bind_methods(const RefClassDefinition& def, const EnvPtr& backing) {
  for (const auto& [name, fn] : def.methods) {
    Binding b{reenclose(fn, backing)};
    b.is_method = true;
    backing->define(name, std::move(b));
  }
}

Value make_instance(Interpreter& interp, const RefClassDefinition& def, EnvPtr& backing) {
  backing = interp.new_environment(def.definition_env, "ref:" + def.name);
  Value obj = Value::ref(RefData{backing, def.name, def.lineage});
  Binding self{obj};
  self.read_only = true;
  backing->define(".self", std::move(self));
  bind_methods(def, backing);
  return obj;
}

Value copy_rec(Interpreter& interp, const Value& obj, std::map<const Environment*, Value>& done) {
  const RefData& src = obj.ref_data();
  if (auto it = done.find(src.backing.get()); it != done.end()) return it->second;
  const RefClassDefinition& def = definition_or_error(interp, src.class_name);
  EnvPtr backing;
  Value copy = make_instance(interp, def, backing);
  done.emplace(src.backing.get(), copy);
  for (const auto& f : def.fields) {
    const Binding* b = src.backing->find_local(f.name);
    Value v;
    if (b != nullptr && !f.is_active()) {
      v = std::get<Value>(b->slot);
      v = v.kind() == Kind::RefInstance ? copy_rec(interp, v, done) : deep_copy(v);
    }
    backing->define(f.name, field_binding(f, backing, std::move(v)));
  }
  return copy;
}

}  // namespace

Value set_ref_class(Interpreter& interp, const std::string& name, const std::vector<FieldSpec>& fields,
                    const std::vector<std::pair<std::string, Value>>& methods,
                    const std::optional<std::string>& contains, const EnvPtr& env) {
  RefClassDefinition def;
  def.name = name;
  def.contains = contains;
  def.definition_env = env;
  if (contains) {
    const RefClassDefinition* parent = interp.ref_classes().find(*contains);
    if (parent == nullptr) {
      throw Error("superclass \"" + *contains + "\" of reference class \"" + name + "\" is not a reference class");
    }
    def.fields = parent->fields;
    def.methods = parent->methods;
    def.lineage = parent->lineage;
  } else {
    def.lineage = {"envRefClass"};
  }
  def.lineage.insert(def.lineage.begin(), name);

  std::set<std::string> field_names;
  for (const auto& f : def.fields) field_names.insert(f.name);
  for (const auto& f : fields) {
    if (f.name.empty() || f.name[0] == '.') throw Error("invalid field name \"" + f.name + "\"");
    if (!field_names.insert(f.name).second) {
      throw Error("duplicate field \"" + f.name + "\" in reference class \"" + name + "\"");
    }
    if (!f.is_active() && f.declared_class != s4::kAny && !interp.classes().defined(f.declared_class)) {
      throw Error("class \"" + f.declared_class + "\" for field \"" + f.name + "\" is not defined");
    }
    def.fields.push_back(f);
  }
  for (const auto& [mname, fn] : methods) {
    if (fn.kind() != Kind::Closure) throw Error("method \"" + mname + "\" must be a function");
    auto it = std::find_if(def.methods.begin(), def.methods.end(), [&](const auto& m) { return m.first == mname; });
    if (it != def.methods.end()) {
      it->second = fn;
    } else {
      def.methods.emplace_back(mname, fn);
    }
  }
  std::set<std::string> method_names;
  for (const auto& [mname, _] : def.methods) {
    if (!method_names.insert(mname).second) throw Error("duplicate method \"" + mname + "\" in \"" + name + "\"");
    if (field_names.count(mname) != 0) {
      throw Error("\"" + mname + "\" is defined as both a field and a method of reference class \"" + name + "\"");
    }
  }

  interp.classes().set_class(name, {}, {contains ? *contains : std::string("envRefClass")}, false, true);
  return generator_value(interp.ref_classes().define(std::move(def)));
}

Value generator_value(const RefClassDefinition& def) {
  std::string name = def.name;
  BuiltinData b;
  b.name = name;
  b.eager = [name](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
    return generator_new(in, name, args);
  };
  return Value::builtin(std::move(b))
      .with_attribute("className", Value::str(name))
      .with_attribute("class", Value::str(kGeneratorClass));
}

bool is_generator(const Value& v) {
  return v.kind() == Kind::Builtin && v.attribute("className").kind() == Kind::String;
}

namespace {

/// Named field classes, or method names, of a definition.
Value generator_listing(const RefClassDefinition& def, const std::string& which) {
  std::vector<std::string> names;
  if (which == "methods") {
    for (const auto& m : def.methods) names.push_back(m.first);
    return Value::str(std::move(names));
  }
  std::vector<std::string> classes;
  for (const auto& f : def.fields) {
    names.push_back(f.name);
    classes.push_back(f.is_active() ? "activeBindingFunction" : f.declared_class);
  }
  return Value::str(std::move(classes)).with_attribute("names", Value::str(std::move(names)));
}

}  // namespace

Value generator_member(Interpreter& interp, const Value& gen, const std::string& name) {
  std::string cls = as_string_scalar(gen.attribute("className"), "className");
  definition_or_error(interp, cls);
  if (name == "new") {
    BuiltinData b;
    b.name = "new";
    b.eager = [cls](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
      return generator_new(in, cls, args);
    };
    return Value::builtin(std::move(b));
  }
  if (name == "className") return Value::str(cls);
  if (name == "fields" || name == "methods") {
    BuiltinData b;
    b.name = name;
    b.eager = [cls, name](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
      if (!args.empty()) throw Error("unused argument in call to $" + name + "()");
      return generator_listing(definition_or_error(in, cls), name);
    };
    return Value::builtin(std::move(b));
  }
  throw Error("'" + name + "' is not a valid member of the generator for class \"" + cls + "\"");
}

Value generator_new(Interpreter& interp, const std::string& class_name, const std::vector<NamedValue>& args) {
  const RefClassDefinition& def = definition_or_error(interp, class_name);
  EnvPtr backing;
  Value obj = make_instance(interp, def, backing);

  std::vector<std::optional<Value>> init(def.fields.size());
  for (const auto& a : args) {
    if (!a.name) throw Error("unnamed argument to the generator for \"" + class_name + "\"; fields are set by name");
    auto it = std::find_if(def.fields.begin(), def.fields.end(), [&](const FieldSpec& f) { return f.name == *a.name; });
    if (it == def.fields.end()) {
      throw Error("\"" + *a.name + "\" is not a field in class \"" + class_name + "\"");
    }
    auto i = static_cast<std::size_t>(it - def.fields.begin());
    if (init[i]) throw Error("field \"" + *a.name + "\" supplied more than once");
    if (!it->is_active() && !interp.conforms(a.value, it->declared_class)) {
      throw Error(field_type_error(it->name, it->declared_class, a.value));
    }
    init[i] = a.value;
  }

  for (std::size_t i = 0; i < def.fields.size(); ++i) {
    const FieldSpec& f = def.fields[i];
    Value initial;
    if (!f.is_active()) {
      if (init[i]) {
        initial = *init[i];
      } else if (auto z = s4::zero_value(interp.classes(), f.declared_class)) {
        initial = *z;
      }
    }
    backing->define(f.name, field_binding(f, backing, initial));
  }
  // Active fields take their initial value through the setter.
  for (std::size_t i = 0; i < def.fields.size(); ++i) {
    if (def.fields[i].is_active() && init[i]) interp.write_binding(*backing, def.fields[i].name, *init[i]);
  }
  interp.set_visible(true);
  return obj;
}

Value field_get(Interpreter& interp, const Value& obj, const std::string& name) {
  const RefData& r = obj.ref_data();
  if (const Binding* b = r.backing->find_local(name)) {
    if (b->is_field || b->is_method || name == ".self") return interp.read_binding(*b, name);
  }
  if (name == "copy") {
    BuiltinData b;
    b.name = "copy";
    b.eager = [obj](Interpreter& in, std::vector<NamedValue>& args, const CallContext&) {
      if (!args.empty()) throw Error("copy() takes no arguments");
      return copy_instance(in, obj);
    };
    return Value::builtin(std::move(b));
  }
  if (name == "show") {
    BuiltinData b;
    b.name = "show";
    b.eager = [obj](Interpreter& in, std::vector<NamedValue>&, const CallContext&) {
      in.out() << format_instance(in, obj);
      in.set_visible(false);
      return Value();
    };
    return Value::builtin(std::move(b));
  }
  throw Error("'" + name + "' is not a valid field or method name for reference class \"" + r.class_name + "\"");
}

void field_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v) {
  const RefData& r = obj.ref_data();
  const Binding* b = r.backing->find_local(name);
  if (b == nullptr || !(b->is_field || b->is_method)) {
    throw Error("invalid assignment: '" + name + "' is not a field in reference class \"" + r.class_name + "\"");
  }
  interp.write_binding(*r.backing, name, v);
}

Value invoke_method(Interpreter& interp, const Value& obj, const std::string& name, std::vector<NamedValue> args) {
  const Binding* b = obj.ref_data().backing->find_local(name);
  if (b == nullptr || !b->is_method) {
    throw Error("'" + name + "' is not a method of reference class \"" + obj.ref_data().class_name + "\"");
  }
  Value fn = interp.read_binding(*b, name);
  return interp.call_value(fn, std::move(args), interp.global_env(), {}, name);
}

Value copy_instance(Interpreter& interp, const Value& obj) {
  if (obj.kind() != Kind::RefInstance) throw Error("copy() requires a reference class object");
  std::map<const Environment*, Value> done;
  return copy_rec(interp, obj, done);
}

const RefClassDefinition& definition_of(Interpreter& interp, const Value& obj) {
  return definition_or_error(interp, obj.ref_data().class_name);
}

std::string format_instance(Interpreter& interp, const Value& obj) {
  const RefClassDefinition& def = definition_of(interp, obj);
  std::ostringstream os;
  os << "Reference class object of class \"" << def.name << "\"\n";
  for (const auto& f : def.fields) {
    os << "Field \"" << f.name << "\":\n";
    Value v = field_get(interp, obj, f.name);
    os << (v.kind() == Kind::RefInstance ? format_instance(interp, v) : format_value(v));
  }
  return os.str();
}

}  // namespace mls::refclass
