#include "mls/s4.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/reader.hpp"

namespace mls::s4 {

// -- class registry ----------------------------------------------------------

ClassRegistry::ClassRegistry() {
  auto basic = [&](const std::string& name, std::vector<std::string> contains = {}, bool is_virtual = false) {
    ClassDefinition def;
    def.name = name;
    def.contains = std::move(contains);
    def.is_basic = true;
    def.is_virtual = is_virtual;
    classes_[name] = std::move(def);
  };
  basic("numeric");
  basic("integer", {"numeric"});
  basic("character");
  basic("logical");
  basic("list");
  basic("function");
  basic("NULL");
  basic("environment");
  basic("expression");
  basic("envRefClass", {}, true);
  rebuild();
  set_class("classRepresentation",
            {{"className", "character"}, {"slots", "character"}, {"contains", "character"}, {"virtual", "logical"}},
            {});
  set_class("MethodDefinition", {{"generic", "character"}, {"signature", "character"}, {"implementation", "function"}},
            {});
}

const ClassDefinition& ClassRegistry::set_class(const std::string& name, SlotList slots,
                                                std::vector<std::string> contains, bool is_virtual, bool is_ref) {
  if (name.empty() || name == kAny || name == kMissing) throw Error("invalid class name \"" + name + "\"");
  if (auto* existing = find(name); existing != nullptr && existing->is_basic) {
    throw Error("cannot redefine basic class \"" + name + "\"");
  }
  std::set<std::string> seen_super;
  for (const auto& super : contains) {
    if (super == name) throw Error("class \"" + name + "\" cannot contain itself: inheritance cycle");
    const ClassDefinition* def = find(super);
    if (def == nullptr) throw Error("no definition found for superclass \"" + super + "\" of class \"" + name + "\"");
    if (!seen_super.insert(super).second) throw Error("duplicate superclass \"" + super + "\" for class \"" + name + "\"");
    for (const auto& anc : def->linearization) {
      if (anc.name == name) {
        throw Error("inheritance cycle: class \"" + name + "\" would contain itself through \"" + super + "\"");
      }
    }
  }
  std::set<std::string> own;
  for (const auto& [slot, cls] : slots) {
    if (!own.insert(slot).second) throw Error("duplicate slot name \"" + slot + "\" in class \"" + name + "\"");
  }
  for (const auto& super : contains) {
    for (const auto& [slot, cls] : find(super)->slots) {
      if (own.count(slot) != 0) {
        throw Error("slot \"" + slot + "\" in class \"" + name + "\" duplicates a slot inherited from \"" + super + "\"");
      }
    }
  }

  ClassDefinition def;
  def.name = name;
  def.own_slots = std::move(slots);
  def.contains = std::move(contains);
  def.is_virtual = is_virtual;
  def.is_ref = is_ref;
  classes_[name] = std::move(def);
  rebuild();
  return classes_.find(name)->second;
}

const ClassDefinition* ClassRegistry::find(std::string_view name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> ClassRegistry::superclass_distance(const std::string& from, const std::string& to) const {
  return lineage_distance(lineage_of(from), to);
}

Lineage ClassRegistry::lineage_of(const std::string& cls) const {
  if (const ClassDefinition* def = find(cls)) return def->linearization;
  return {{cls, 0}};
}

std::vector<std::string> ClassRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : classes_) out.push_back(name);
  return out;
}

Lineage ClassRegistry::linearize(const std::string& name) const {
  // Order: depth-first preorder over `contains`, first occurrence wins.
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::vector<std::string> stack{name};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    order.push_back(cur);
    const ClassDefinition* def = find(cur);
    if (def == nullptr) continue;
    for (auto it = def->contains.rbegin(); it != def->contains.rend(); ++it) stack.push_back(*it);
  }
  // Distances: shortest containment path.
  std::map<std::string, std::size_t> dist{{name, 0}};
  std::deque<std::string> queue{name};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    const ClassDefinition* def = find(cur);
    if (def == nullptr) continue;
    for (const auto& super : def->contains) {
      if (dist.emplace(super, dist[cur] + 1).second) queue.push_back(super);
    }
  }
  Lineage out;
  for (const auto& c : order) out.push_back({c, dist[c]});
  return out;
}

void ClassRegistry::rebuild() {
  for (auto& [name, def] : classes_) def.linearization = linearize(name);
  for (auto& [name, def] : classes_) {
    def.slots = def.own_slots;
    std::set<std::string> have;
    for (const auto& [slot, _] : def.slots) have.insert(slot);
    for (std::size_t i = 1; i < def.linearization.size(); ++i) {
      const ClassDefinition* anc = find(def.linearization[i].name);
      if (anc == nullptr) continue;
      for (const auto& s : anc->own_slots) {
        if (have.insert(s.first).second) def.slots.push_back(s);
      }
    }
  }
}

// -- generics ----------------------------------------------------------------

const MethodDefinition& GenericFunction::set_method(std::vector<std::string> sig, Value implementation) {
  if (sig.size() > signature.size()) {
    throw Error("more elements in the method signature (" + std::to_string(sig.size()) +
                ") than in the generic signature (" + std::to_string(signature.size()) + ") for function '" + name + "'");
  }
  sig.resize(signature.size(), std::string(kAny));
  auto& slot = methods[sig];
  slot.signature = sig;
  slot.implementation = std::move(implementation);
  return slot;
}

GenericFunction* GenericTable::find(std::string_view name) {
  auto it = generics_.find(name);
  return it == generics_.end() ? nullptr : &it->second;
}

const GenericFunction* GenericTable::find(std::string_view name) const {
  auto it = generics_.find(name);
  return it == generics_.end() ? nullptr : &it->second;
}

GenericFunction& GenericTable::define(GenericFunction g) {
  std::string name = g.name;
  auto& slot = generics_[name];
  slot = std::move(g);
  return slot;
}

std::vector<std::string> GenericTable::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : generics_) out.push_back(name);
  return out;
}

// -- selection ---------------------------------------------------------------

std::optional<std::size_t> lineage_distance(const Lineage& actual, std::string_view declared) {
  if (declared == kAny) return actual.size();
  for (const auto& a : actual) {
    if (a.name == declared) return a.distance;
  }
  return std::nullopt;
}

namespace {

std::string signature_text(const std::vector<std::string>& sig) {
  std::string out = "(";
  for (std::size_t i = 0; i < sig.size(); ++i) out += (i ? ", \"" : "\"") + sig[i] + "\"";
  return out + ")";
}

}  // namespace

Selection select_method(const GenericFunction& g, std::span<const Lineage> actual) {
  Selection best;
  std::size_t best_sum = 0;
  std::vector<const MethodDefinition*> tied;
  for (const auto& [sig, method] : g.methods) {
    std::vector<std::size_t> d;
    bool admissible = true;
    for (std::size_t i = 0; i < sig.size() && admissible; ++i) {
      static const Lineage kMissingLineage{{std::string(kMissing), 0}};
      const Lineage& lin = i < actual.size() ? actual[i] : kMissingLineage;
      auto di = lineage_distance(lin, sig[i]);
      if (!di) {
        admissible = false;
      } else {
        d.push_back(*di);
      }
    }
    if (!admissible) continue;
    std::size_t sum = 0;
    for (auto x : d) sum += x;
    bool better = best.method == nullptr || sum < best_sum || (sum == best_sum && d < best.distances);
    bool equal = best.method != nullptr && sum == best_sum && d == best.distances;
    if (better) {
      best.method = &method;
      best.distances = d;
      best_sum = sum;
      tied.assign(1, &method);
    } else if (equal) {
      tied.push_back(&method);
    }
  }
  if (best.method == nullptr) {
    std::string desc;
    for (std::size_t i = 0; i < g.signature.size(); ++i) {
      std::string cls = i < actual.size() && !actual[i].empty() ? actual[i][0].name : std::string(kMissing);
      desc += (i ? ", " : "") + g.signature[i] + " = \"" + cls + "\"";
    }
    throw DispatchError(DispatchError::Reason::NoMethod,
                        "unable to find an inherited method for function '" + g.name + "' for signature '" + desc + "'");
  }
  if (tied.size() > 1) {
    std::string list;
    for (std::size_t i = 0; i < tied.size(); ++i) list += (i ? " and " : "") + signature_text(tied[i]->signature);
    throw DispatchError(DispatchError::Reason::Ambiguous,
                        "ambiguous method selection for function '" + g.name + "': signatures " + list + " tie");
  }
  return best;
}

Selection select_method(const GenericFunction& g, const std::vector<std::string>& actual_classes,
                        const ClassRegistry& registry) {
  std::vector<Lineage> lineages;
  for (const auto& c : actual_classes) lineages.push_back(c == kMissing ? Lineage{{c, 0}} : registry.lineage_of(c));
  return select_method(g, std::span<const Lineage>(lineages));
}

// -- runtime -----------------------------------------------------------------

Lineage lineage_of_value(const ClassRegistry& registry, const Value& v) {
  if (v.kind() == Kind::S4Instance) return registry.lineage_of(v.s4_data().class_name);
  if (v.kind() == Kind::RefInstance) return registry.lineage_of(v.ref_data().class_name);
  Value cls = v.attribute("class");
  if (cls.kind() == Kind::String && cls.length() > 0) {
    const auto& names = cls.strings();
    if (names.size() == 1 && registry.defined(names[0])) return registry.lineage_of(names[0]);
    Lineage out;
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], i});
    return out;
  }
  return registry.lineage_of(base_class(v));
}

std::optional<Value> zero_value(const ClassRegistry&, const std::string& cls) {
  if (cls == "numeric") return Value::dbl(std::vector<double>{});
  if (cls == "integer") return Value::integer(std::vector<std::int64_t>{});
  if (cls == "character") return Value::str(std::vector<std::string>{});
  if (cls == "logical") return Value::logical(std::vector<bool>{});
  if (cls == "list") return Value::list({});
  if (cls == "NULL" || cls == kAny) return Value();
  return std::nullopt;
}

Value class_representation(const ClassDefinition& def) {
  std::vector<std::string> slot_names;
  std::vector<std::string> slot_classes;
  for (const auto& [n, c] : def.slots) {
    slot_names.push_back(n);
    slot_classes.push_back(c);
  }
  std::vector<std::string> supers;
  for (std::size_t i = 1; i < def.linearization.size(); ++i) supers.push_back(def.linearization[i].name);
  S4Data d;
  d.class_name = "classRepresentation";
  d.lineage = {"classRepresentation"};
  d.slots = {{"className", Value::str(def.name)},
             {"slots", Value::str(slot_classes).with_attribute("names", Value::str(slot_names))},
             {"contains", Value::str(supers)},
             {"virtual", Value::logical(def.is_virtual)}};
  return Value::s4(std::move(d));
}

namespace {

std::vector<std::string> lineage_names(const Lineage& l) {
  std::vector<std::string> out;
  for (const auto& a : l) out.push_back(a.name);
  return out;
}

void check_slot(Interpreter& interp, const ClassDefinition& def, const std::string& slot, const std::string& declared,
                const Value& v) {
  if (!interp.conforms(v, declared)) {
    throw Error("invalid class \"" + def.name + "\" object: invalid object for slot \"" + slot + "\" in class \"" +
                def.name + "\": got class \"" + implicit_class(v).front() + "\", should be or extend class \"" +
                declared + "\"");
  }
}

const ClassDefinition& class_or_error(const ClassRegistry& registry, const std::string& name) {
  const ClassDefinition* def = registry.find(name);
  if (def == nullptr) throw Error("undefined class \"" + name + "\"");
  return *def;
}

bool is_operator_name(const std::string& name) {
  static const std::set<std::string> ops{"+", "-", "*", "/", "^", "%%", "%/%", "==", "!=",
                                         "<", "<=", ">", ">=", "&", "|", "!"};
  return ops.count(name) != 0;
}

}  // namespace

Value new_instance(Interpreter& interp, const std::string& class_name, const std::vector<NamedValue>& inits) {
  const ClassDefinition& def = class_or_error(interp.classes(), class_name);
  if (def.is_ref) throw Error("class \"" + class_name + "\" is a reference class; call its generator instead");
  if (def.is_virtual) {
    throw Error("cannot allocate an object of a virtual class (\"" + class_name + "\")");
  }
  if (def.is_basic) {
    if (!inits.empty()) {
      if (inits.size() != 1 || inits[0].name) throw Error("basic class \"" + class_name + "\" takes one unnamed value");
      check_slot(interp, def, ".Data", class_name, inits[0].value);
      return inits[0].value;
    }
    if (auto z = zero_value(interp.classes(), class_name)) return *z;
    throw Error("cannot allocate an object of class \"" + class_name + "\" without an initial value");
  }
  std::vector<std::optional<Value>> values(def.slots.size());
  for (const auto& init : inits) {
    if (!init.name) throw Error("cannot use object of class \"" + implicit_class(init.value).front() +
                                "\" in new(): class \"" + class_name + "\" does not extend that class");
    auto it = std::find_if(def.slots.begin(), def.slots.end(), [&](const auto& s) { return s.first == *init.name; });
    if (it == def.slots.end()) {
      throw Error("invalid name for slot of class \"" + class_name + "\": " + *init.name);
    }
    auto idx = static_cast<std::size_t>(it - def.slots.begin());
    if (values[idx]) throw Error("slot \"" + *init.name + "\" supplied more than once");
    check_slot(interp, def, it->first, it->second, init.value);
    values[idx] = init.value;
  }
  S4Data data;
  data.class_name = class_name;
  data.lineage = lineage_names(def.linearization);
  for (std::size_t i = 0; i < def.slots.size(); ++i) {
    const auto& [slot, cls] = def.slots[i];
    if (!values[i]) {
      auto z = zero_value(interp.classes(), cls);
      if (!z) {
        throw Error("slot \"" + slot + "\" of class \"" + class_name + "\" (class \"" + cls +
                    "\") has no default value and must be initialized");
      }
      values[i] = *z;
    }
    data.slots.emplace_back(slot, *values[i]);
  }
  return Value::s4(std::move(data));
}

Value slot_get(const Value& obj, const std::string& name) {
  if (obj.kind() != Kind::S4Instance) {
    throw Error("no slot of name \"" + name + "\" for this object of class \"" + implicit_class(obj).front() + "\"");
  }
  for (const auto& [slot, v] : obj.s4_data().slots) {
    if (slot == name) return v;
  }
  throw Error("no slot of name \"" + name + "\" for this object of class \"" + obj.s4_data().class_name + "\"");
}

Value slot_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v) {
  if (obj.kind() != Kind::S4Instance) throw Error("slot assignment requires an S4 object");
  const ClassDefinition& def = class_or_error(interp.classes(), obj.s4_data().class_name);
  auto it = std::find_if(def.slots.begin(), def.slots.end(), [&](const auto& s) { return s.first == name; });
  if (it == def.slots.end()) {
    throw Error("no slot of name \"" + name + "\" for this object of class \"" + def.name + "\"");
  }
  check_slot(interp, def, name, it->second, v);
  S4Data data = obj.s4_data();
  for (auto& [slot, val] : data.slots) {
    if (slot == name) val = v;
  }
  return Value::s4(std::move(data)).with_attributes(obj.attributes());
}

Value set_generic(Interpreter& interp, const std::string& name, const Value& def, std::vector<std::string> signature,
                  const EnvPtr& env) {
  GenericFunction* existing_generic = interp.generics().find(name);
  std::optional<Value> existing = interp.find_function_opt(name, env);
  std::vector<Formal> formals;
  Value generic_fn;
  if (!def.is_null()) {
    if (def.kind() != Kind::Closure) throw Error("the 'def' argument of setGeneric must be a function");
    formals = def.closure_data().formals;
    generic_fn = def;
  } else if (existing && existing->kind() == Kind::Closure) {
    formals = existing->closure_data().formals;
  } else if (is_operator_name(name)) {
    formals = {{"e1", nullptr}, {"e2", nullptr}};
  } else {
    throw Error("must supply a function skeleton for '" + name + "', explicitly or via an existing function");
  }
  if (generic_fn.is_null() && !is_operator_name(name)) {
    CallArg arg{std::nullopt, make_constant(Value::str(name))};
    ExprPtr body = make_node(expr::Call{make_symbol("standardGeneric"), {arg}});
    generic_fn = Value::closure(ClosureData{formals, body, env});
  }
  if (signature.empty()) {
    for (const auto& f : formals) signature.push_back(f.name);
  }
  for (const auto& s : signature) {
    if (std::none_of(formals.begin(), formals.end(), [&](const Formal& f) { return f.name == s; })) {
      throw Error("signature element \"" + s + "\" is not a formal argument of '" + name + "'");
    }
  }

  GenericFunction g;
  g.name = name;
  g.formals = formals;
  g.signature = signature;
  if (existing_generic != nullptr) {
    g.methods = existing_generic->methods;
  } else if (existing && existing->kind() == Kind::Closure && (def.is_null() || !structurally_equal(*existing, def))) {
    // The previous function becomes the default method.
    g.set_method({}, *existing);
  }
  interp.generics().define(std::move(g));
  if (!generic_fn.is_null()) interp.assign_local(name, generic_fn, env);
  return Value::str(name);
}

Value set_method(Interpreter& interp, const std::string& name, const std::vector<NamedValue>& signature,
                 const Value& def, const EnvPtr& env) {
  if (interp.generics().find(name) == nullptr) {
    if (!is_operator_name(name) && !interp.find_function_opt(name, env)) {
      throw Error("no existing definition for function '" + name + "'");
    }
    set_generic(interp, name, Value(), {}, env);
  }
  GenericFunction& g = *interp.generics().find(name);
  if (def.kind() != Kind::Closure) throw Error("the method definition for '" + name + "' must be a function");
  const auto& mf = def.closure_data().formals;
  bool same = mf.size() == g.formals.size();
  for (std::size_t i = 0; same && i < mf.size(); ++i) same = mf[i].name == g.formals[i].name;
  if (!same) {
    std::string expect;
    for (std::size_t i = 0; i < g.formals.size(); ++i) expect += (i ? ", " : "") + g.formals[i].name;
    throw Error("methods for '" + name + "' must have the same formal arguments as the generic (" + expect + ")");
  }
  std::vector<std::string> sig(g.signature.size(), std::string(kAny));
  std::vector<bool> set(g.signature.size(), false);
  std::size_t next = 0;
  for (const auto& s : signature) {
    std::string cls = as_string_scalar(s.value, "signature");
    std::size_t idx;
    if (s.name) {
      auto it = std::find(g.signature.begin(), g.signature.end(), *s.name);
      if (it == g.signature.end()) {
        throw Error("the signature for '" + name + "' names \"" + *s.name + "\", which is not a dispatch argument");
      }
      idx = static_cast<std::size_t>(it - g.signature.begin());
    } else {
      while (next < set.size() && set[next]) ++next;
      if (next >= set.size()) throw Error("too many classes in the signature for '" + name + "'");
      idx = next;
    }
    sig[idx] = cls;
    set[idx] = true;
  }
  const MethodDefinition& m = g.set_method(sig, def);
  return method_value(name, m);
}

Value method_value(const std::string& generic, const MethodDefinition& m) {
  S4Data d;
  d.class_name = "MethodDefinition";
  d.lineage = {"MethodDefinition"};
  d.slots = {{"generic", Value::str(generic)},
             {"signature", Value::str(m.signature)},
             {"implementation", m.implementation}};
  return Value::s4(std::move(d));
}

Value standard_generic(Interpreter& interp, const std::string& name, const EnvPtr& env) {
  const GenericFunction* g = interp.generics().find(name);
  if (g == nullptr) throw Error("expected a generic function or a primitive for dispatch, got '" + name + "'");
  const Frame* frame = interp.frame_for(env);
  if (frame == nullptr) throw Error("standardGeneric(\"" + name + "\") called from outside a generic function");
  std::vector<Lineage> lineages;
  for (const auto& formal : g->signature) {
    const Binding* b = env->find_local(formal);
    bool missing = b == nullptr || std::holds_alternative<MissingArg>(b->slot);
    if (!missing) {
      if (const auto* p = std::get_if<PromisePtr>(&b->slot)) missing = (*p)->is_default;
    }
    if (missing) {
      lineages.push_back({{std::string(kMissing), 0}});
    } else {
      lineages.push_back(lineage_of_value(interp.classes(), interp.read_binding(*b, formal)));
    }
  }
  Selection sel = select_method(*g, std::span<const Lineage>(lineages));
  Value impl = sel.method->implementation;
  std::vector<PromiseArg> args = frame->args;
  EnvPtr caller = frame->caller;
  return interp.apply(impl, std::move(args), caller, {}, name);
}

std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op, const std::vector<Value>& operands,
                                       const EnvPtr& env) {
  const GenericFunction* g = interp.generics().find(op);
  if (g == nullptr || g->methods.empty()) return std::nullopt;
  std::vector<Lineage> lineages;
  for (const auto& v : operands) lineages.push_back(lineage_of_value(interp.classes(), v));
  Selection sel;
  try {
    sel = select_method(*g, std::span<const Lineage>(lineages));
  } catch (const DispatchError& e) {
    if (e.reason() == DispatchError::Reason::NoMethod) return std::nullopt;
    throw;
  }
  std::vector<NamedValue> args;
  for (const auto& v : operands) args.push_back({std::nullopt, v});
  return interp.call_value(sel.method->implementation, std::move(args), env, {}, op);
}

}  // namespace mls::s4
