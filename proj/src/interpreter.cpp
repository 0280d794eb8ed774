#include "mls/interpreter.hpp"

#include <algorithm>
#include <bit>
#include <iostream>

#include "builtins.hpp"
#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/reader.hpp"
#include "mls/refclass.hpp"
#include "mls/rng.hpp"
#include "mls/s4.hpp"
#include "ops.hpp"

namespace mls {

// -- environments and promises ---------------------------------------------

std::shared_ptr<Promise> Promise::lazy(ExprPtr expr, EnvPtr env, bool is_default) {
  auto p = std::make_shared<Promise>();
  p->expr = std::move(expr);
  p->env = std::move(env);
  p->is_default = is_default;
  return p;
}

std::shared_ptr<Promise> Promise::ready(Value v) {
  auto p = std::make_shared<Promise>();
  p->forced = true;
  p->value = std::move(v);
  return p;
}

Binding* Environment::find_local(const std::string& name) {
  auto it = frame_.find(name);
  return it == frame_.end() ? nullptr : &it->second;
}

const Binding* Environment::find_local(const std::string& name) const {
  auto it = frame_.find(name);
  return it == frame_.end() ? nullptr : &it->second;
}

Environment* Environment::find_owner(const std::string& name) {
  for (Environment* e = this; e != nullptr; e = e->parent_.get()) {
    if (e->has_local(name)) return e;
  }
  return nullptr;
}

std::vector<std::string> Environment::names() const {
  std::vector<std::string> out;
  out.reserve(frame_.size());
  for (const auto& [name, _] : frame_) out.push_back(name);
  return out;
}

// -- interpreter -----------------------------------------------------------

namespace {

struct FramePop {
  std::deque<Frame>& frames;
  ~FramePop() { frames.pop_back(); }
};

void attach_location(Error& e, SourceLocation loc) {
  if (!e.location().known() && loc.known()) e.set_location(loc);
}

std::string describe_arg(const PromiseArg& a) {
  if (a.promise->expr) return deparse(a.promise->expr);
  if (a.promise->forced) return deparse_value(a.promise->value);
  return "<argument>";
}

}  // namespace

Interpreter::Interpreter() : Interpreter(std::cout, std::cerr) {}

Interpreter::Interpreter(std::ostream& out, std::ostream& err)
    : out_(&out),
      err_(&err),
      classes_(std::make_unique<s4::ClassRegistry>()),
      generics_(std::make_unique<s4::GenericTable>()),
      ref_classes_(std::make_unique<refclass::Registry>()) {
  base_ = new_environment(nullptr, "base");
  global_ = new_environment(base_, "global");
  global_->define_value(kOptionsName, Value::list({}, {}));
  install_builtins();
}

Interpreter::~Interpreter() {
  // Closures, promises and reference objects form cycles through their
  // environments; emptying every frame releases them.
  for (auto& weak : envs_) {
    if (auto env = weak.lock()) env->clear();
  }
}

EnvPtr Interpreter::new_environment(EnvPtr parent, std::string tag) {
  auto env = std::make_shared<Environment>(std::move(parent), std::move(tag));
  if (envs_.size() >= envs_compacted_at_) {
    std::erase_if(envs_, [](const std::weak_ptr<Environment>& w) { return w.expired(); });
    envs_compacted_at_ = std::max<std::size_t>(64, envs_.size() * 2);
  }
  envs_.push_back(env);
  return env;
}

std::vector<EnvPtr> Interpreter::live_environments() const {
  std::vector<EnvPtr> out;
  for (const auto& weak : envs_) {
    if (auto env = weak.lock()) out.push_back(std::move(env));
  }
  return out;
}

void Interpreter::define_builtin(const std::string& name, EagerFn fn) {
  base_->define_value(name, Value::builtin(BuiltinData{name, std::move(fn), nullptr}));
}

void Interpreter::define_special(const std::string& name, SpecialFn fn) {
  base_->define_value(name, Value::builtin(BuiltinData{name, nullptr, std::move(fn)}));
}

void Interpreter::warn(std::string message) {
  *err_ << "Warning: " << message << '\n';
  warnings_.push_back(std::move(message));
}

const Frame* Interpreter::frame_for(const EnvPtr& env) const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if (it->env == env) return &*it;
  }
  return nullptr;
}

// -- lookup ----------------------------------------------------------------

Value Interpreter::force(const PromisePtr& p) {
  if (p->forced) return p->value;
  if (p->forcing) {
    throw Error("promise already under evaluation: recursive default argument reference or earlier problems?");
  }
  p->forcing = true;
  try {
    Value v = eval(p->expr, p->env);
    p->value = std::move(v);
  } catch (...) {
    p->forcing = false;
    throw;
  }
  p->forcing = false;
  p->forced = true;
  p->env.reset();
  visible_ = true;
  return p->value;
}

Value Interpreter::read_binding(const Binding& b, const std::string& name) {
  if (const auto* v = std::get_if<Value>(&b.slot)) return *v;
  if (const auto* p = std::get_if<PromisePtr>(&b.slot)) {
    PromisePtr promise = *p;
    return force(promise);
  }
  if (const auto* a = std::get_if<ActiveBinding>(&b.slot)) {
    Value getter = a->getter;
    Value v = call_value(getter, {}, global_, {}, name);
    visible_ = true;
    return v;
  }
  throw Error("argument \"" + name + "\" is missing, with no default");
}

Value Interpreter::lookup(const std::string& name, const EnvPtr& env, SourceLocation loc) {
  for (Environment* e = env.get(); e != nullptr; e = e->parent().get()) {
    if (const Binding* b = e->find_local(name)) {
      try {
        return read_binding(*b, name);
      } catch (Error& err) {
        attach_location(err, loc);
        throw;
      }
    }
  }
  throw Error("object '" + name + "' not found", loc);
}

std::optional<Value> Interpreter::find_function_opt(const std::string& name, const EnvPtr& env) {
  for (Environment* e = env.get(); e != nullptr; e = e->parent().get()) {
    if (const Binding* b = e->find_local(name)) {
      if (std::holds_alternative<MissingArg>(b->slot)) continue;
      Value v = read_binding(*b, name);
      if (v.is_function()) return v;
    }
  }
  return std::nullopt;
}

Value Interpreter::find_function(const std::string& name, const EnvPtr& env, SourceLocation loc) {
  std::optional<Value> fn;
  try {
    fn = find_function_opt(name, env);
  } catch (Error& err) {
    attach_location(err, loc);
    throw;
  }
  if (!fn) throw Error("could not find function \"" + name + "\"", loc);
  return *fn;
}

// -- evaluation ------------------------------------------------------------

Value Interpreter::eval_source(std::string_view source, EnvPtr env) {
  if (!env) env = global_;
  Value last;
  for (const auto& e : parse_program(source)) last = eval(e, env);
  return last;
}

void Interpreter::run_toplevel(const std::vector<ExprPtr>& exprs, bool autoprint) {
  for (const auto& e : exprs) {
    visible_ = true;
    Value v = eval(e, global_);
    if (autoprint && visible_) print_value(v, global_);
  }
}

void Interpreter::print_value(const Value& v, const EnvPtr& env) {
  if (v.is_object()) {
    if (auto print = find_function_opt("print", env)) {
      call_value(*print, {{std::nullopt, v}}, env, {}, "print");
      visible_ = false;
      return;
    }
  }
  *out_ << format_value(v);
}

Value Interpreter::eval(const ExprPtr& e, const EnvPtr& env) {
  const Node& node = *e;
  switch (node.data.index()) {
    case 0: {  // Constant
      visible_ = true;
      return std::get<expr::Constant>(node.data).value;
    }
    case 1: {  // Symbol
      visible_ = true;
      return lookup(std::get<expr::Symbol>(node.data).name, env, node.loc);
    }
    case 2: return eval_call(std::get<expr::Call>(node.data), e, env);
    case 3: {  // FunctionLiteral
      const auto& f = std::get<expr::FunctionLiteral>(node.data);
      visible_ = true;
      return Value::closure(ClosureData{f.formals, f.body, env});
    }
    case 4: {  // Assign
      const auto& a = std::get<expr::Assign>(node.data);
      Value v = eval(a.value, env);
      try {
        assign_local(a.target->as<expr::Symbol>()->name, v, env);
      } catch (Error& err) {
        attach_location(err, node.loc);
        throw;
      }
      visible_ = false;
      return v;
    }
    case 5: {  // SuperAssign
      const auto& a = std::get<expr::SuperAssign>(node.data);
      Value v = eval(a.value, env);
      try {
        assign_super(a.target->as<expr::Symbol>()->name, v, env);
      } catch (Error& err) {
        attach_location(err, node.loc);
        throw;
      }
      visible_ = false;
      return v;
    }
    case 6: {  // Block
      const auto& b = std::get<expr::Block>(node.data);
      Value last;
      visible_ = true;
      for (const auto& sub : b.exprs) last = eval(sub, env);
      return last;
    }
    case 7: {  // If
      const auto& i = std::get<expr::If>(node.data);
      Value cond = eval(i.cond, env);
      bool truth;
      try {
        truth = ops::condition_value(cond);
      } catch (Error& err) {
        attach_location(err, node.loc);
        throw;
      }
      if (truth) return eval(i.then_branch, env);
      if (i.else_branch) return eval(i.else_branch, env);
      visible_ = false;
      return Value();
    }
    case 8: {  // While
      const auto& w = std::get<expr::While>(node.data);
      for (;;) {
        Value cond = eval(w.cond, env);
        bool truth;
        try {
          truth = ops::condition_value(cond);
        } catch (Error& err) {
          attach_location(err, node.loc);
          throw;
        }
        if (!truth) break;
        eval(w.body, env);
      }
      visible_ = false;
      return Value();
    }
    case 9: {  // Index
      const auto& ix = std::get<expr::Index>(node.data);
      Value obj = eval(ix.object, env);
      std::vector<Value> indices;
      for (const auto& i : ix.indices) indices.push_back(eval(i, env));
      visible_ = true;
      try {
        return ops::index_get(obj, indices, ix.element);
      } catch (Error& err) {
        attach_location(err, node.loc);
        throw;
      }
    }
    case 10: return eval_index_assign(std::get<expr::IndexAssign>(node.data), env, node.loc);
    case 11: {  // FieldAccess
      const auto& f = std::get<expr::FieldAccess>(node.data);
      Value obj = eval(f.object, env);
      try {
        Value v = ops::field_get(*this, obj, f.name);
        visible_ = true;
        return v;
      } catch (Error& err) {
        attach_location(err, node.loc);
        throw;
      }
    }
    case 12: return eval_field_assign(std::get<expr::FieldAssign>(node.data), env, node.loc);
    default: break;
  }
  throw Error("internal: unknown expression node", node.loc);
}

Value Interpreter::eval_call(const expr::Call& call, const ExprPtr& self, const EnvPtr& env) {
  SourceLocation loc = self->loc;
  Value fn;
  std::string name;
  if (auto n = callee_name(call)) {
    name = *n;
    fn = find_function(name, env, loc);
  } else {
    fn = eval(call.callee, env);
    if (const auto* fa = call.callee->as<expr::FieldAccess>()) {
      name = fa->name;
    } else {
      name = "<anonymous>";
    }
    if (!fn.is_function()) throw Error("attempt to apply non-function", loc);
  }

  if (fn.kind() == Kind::Builtin) {
    const BuiltinData& b = fn.builtin_data();
    CallContext ctx{env, loc, name};
    try {
      if (b.special) {
        visible_ = true;
        return b.special(*this, std::span<const CallArg>(call.args), ctx);
      }
      std::vector<NamedValue> args;
      args.reserve(call.args.size());
      for (const auto& a : call.args) args.push_back({a.name, eval(a.value, env)});
      visible_ = true;
      return b.eager(*this, args, ctx);
    } catch (Error& err) {
      attach_location(err, loc);
      throw;
    }
  }

  std::vector<PromiseArg> args;
  args.reserve(call.args.size());
  for (const auto& a : call.args) {
    if (const auto* c = a.value->as<expr::Constant>()) {
      auto p = Promise::ready(c->value);
      p->expr = a.value;
      args.push_back({a.name, std::move(p)});
    } else {
      args.push_back({a.name, Promise::lazy(a.value, env)});
    }
  }
  return apply_closure(fn, std::move(args), env, loc, name);
}

Value Interpreter::apply(const Value& fn, std::vector<PromiseArg> args, const EnvPtr& caller, SourceLocation loc,
                         const std::string& name) {
  if (fn.kind() == Kind::Closure) return apply_closure(fn, std::move(args), caller, loc, name);
  if (fn.kind() != Kind::Builtin) throw Error("attempt to apply non-function", loc);
  std::vector<NamedValue> values;
  for (auto& a : args) values.push_back({a.name, force(a.promise)});
  return call_value(fn, std::move(values), caller, loc, name);
}

Value Interpreter::call_value(const Value& fn, std::vector<NamedValue> args, const EnvPtr& caller, SourceLocation loc,
                              const std::string& name) {
  if (fn.kind() == Kind::Closure) {
    std::vector<PromiseArg> promises;
    promises.reserve(args.size());
    for (auto& a : args) promises.push_back({a.name, Promise::ready(std::move(a.value))});
    return apply_closure(fn, std::move(promises), caller, loc, name.empty() ? "<anonymous>" : name);
  }
  if (fn.kind() != Kind::Builtin) throw Error("attempt to apply non-function", loc);
  const BuiltinData& b = fn.builtin_data();
  CallContext ctx{caller ? caller : global_, loc, name.empty() ? b.name : name};
  try {
    visible_ = true;
    if (b.eager) return b.eager(*this, args, ctx);
    std::vector<CallArg> exprs;
    for (auto& a : args) exprs.push_back({a.name, make_constant(a.value, loc)});
    return b.special(*this, std::span<const CallArg>(exprs), ctx);
  } catch (Error& err) {
    attach_location(err, loc);
    throw;
  }
}

Value Interpreter::apply_closure(const Value& fn, std::vector<PromiseArg> args, const EnvPtr& caller,
                                 SourceLocation loc, const std::string& name) {
  if (frames_.size() >= kMaxDepth) {
    throw Error("evaluation nested too deeply: infinite recursion?", loc);
  }
  const ClosureData& c = fn.closure_data();
  EnvPtr call_env;
  try {
    call_env = match_arguments(c, args, "call:" + name);
  } catch (Error& err) {
    attach_location(err, loc);
    throw;
  }
  frames_.push_back(Frame{fn, std::move(args), call_env, caller, name});
  FramePop pop{frames_};
  try {
    return eval(c.body, call_env);
  } catch (FrameReturn& r) {
    if (r.target != call_env.get()) throw;
    return std::move(r.value);
  }
}

EnvPtr Interpreter::match_arguments(const ClosureData& closure, const std::vector<PromiseArg>& args,
                                    const std::string& tag) {
  const auto& formals = closure.formals;
  std::vector<int> arg_for_formal(formals.size(), -1);
  std::vector<bool> arg_used(args.size(), false);

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].name) continue;
    const std::string& n = *args[i].name;
    auto it = std::find_if(formals.begin(), formals.end(), [&](const Formal& f) { return f.name == n; });
    if (it == formals.end()) throw Error("unused argument " + n + " (" + n + " = " + describe_arg(args[i]) + ")");
    auto j = static_cast<std::size_t>(it - formals.begin());
    if (arg_for_formal[j] >= 0) {
      throw Error("formal argument \"" + n + "\" matched by multiple arguments");
    }
    arg_for_formal[j] = static_cast<int>(i);
    arg_used[i] = true;
  }

  std::size_t next_formal = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (arg_used[i]) continue;
    while (next_formal < formals.size() && arg_for_formal[next_formal] >= 0) ++next_formal;
    if (next_formal == formals.size()) throw Error("unused argument (" + describe_arg(args[i]) + ")");
    arg_for_formal[next_formal] = static_cast<int>(i);
    arg_used[i] = true;
  }

  EnvPtr env = new_environment(closure.enclosure, tag);
  for (std::size_t j = 0; j < formals.size(); ++j) {
    if (arg_for_formal[j] >= 0) {
      env->define(formals[j].name, Binding{args[static_cast<std::size_t>(arg_for_formal[j])].promise});
    } else if (formals[j].default_value) {
      env->define(formals[j].name, Binding{Promise::lazy(formals[j].default_value, env, true)});
    } else {
      env->define(formals[j].name, Binding{MissingArg{}});
    }
  }
  return env;
}

// -- assignment ------------------------------------------------------------

void Interpreter::write_binding(Environment& owner, const std::string& name, const Value& v) {
  Binding* b = owner.find_local(name);
  if (b == nullptr) {
    owner.define_value(name, v);
    return;
  }
  if (const auto* active = std::get_if<ActiveBinding>(&b->slot)) {
    if (active->setter.is_null()) {
      if (b->is_field) {
        throw Error("invalid assignment for reference class field '" + name +
                    "': field is read-only (active binding without a setter)");
      }
      throw Error("cannot change active binding '" + name + "' without a setter");
    }
    Value setter = active->setter;
    call_value(setter, {{std::nullopt, v}}, global_, {}, name);
    return;
  }
  if (b->is_method) throw Error("cannot replace method '" + name + "' of a reference class object");
  if (b->read_only) {
    if (b->is_field) throw Error("invalid assignment for reference class field '" + name + "': field is read-only");
    throw Error("cannot change value of locked binding for '" + name + "'");
  }
  if (!b->declared_class.empty() && b->declared_class != "ANY" && !conforms(v, b->declared_class)) {
    throw Error("invalid assignment for reference class field '" + name + "', should be from class \"" +
                b->declared_class + "\" or a subclass (was class \"" + implicit_class(v).front() + "\")");
  }
  b->slot = v;
}

void Interpreter::assign_local(const std::string& name, const Value& v, const EnvPtr& env) {
  write_binding(*env, name, v);
}

void Interpreter::assign_super(const std::string& name, const Value& v, const EnvPtr& env) {
  for (Environment* e = env->parent().get(); e != nullptr; e = e->parent().get()) {
    if (e == base_.get()) break;
    if (e->has_local(name)) {
      write_binding(*e, name, v);
      return;
    }
  }
  write_binding(*global_, name, v);
}

void Interpreter::update_target(const ExprPtr& target, const std::function<Value(const Value&)>& modify,
                                const EnvPtr& env, bool super) {
  if (const auto* sym = target->as<expr::Symbol>()) {
    Value current;
    if (super) {
      EnvPtr start = env->parent() ? env->parent() : global_;
      current = lookup(sym->name, start, target->loc);
    } else {
      current = lookup(sym->name, env, target->loc);
    }
    Value updated = modify(current);
    bool aliasing = updated.kind() == Kind::Environment || updated.kind() == Kind::RefInstance;
    if (aliasing && structurally_equal(updated, current)) return;
    if (super) {
      assign_super(sym->name, updated, env);
    } else {
      assign_local(sym->name, updated, env);
    }
    return;
  }
  if (const auto* ix = target->as<expr::Index>()) {
    std::vector<Value> indices;
    for (const auto& i : ix->indices) indices.push_back(eval(i, env));
    update_target(
        ix->object,
        [&](const Value& obj) {
          Value inner = ops::index_get(obj, indices, ix->element);
          return ops::index_set(obj, indices, ix->element, modify(inner));
        },
        env, super);
    return;
  }
  if (const auto* fa = target->as<expr::FieldAccess>()) {
    update_target(
        fa->object,
        [&](const Value& obj) {
          Value inner = ops::field_get(*this, obj, fa->name);
          return ops::field_set(*this, obj, fa->name, modify(inner));
        },
        env, super);
    return;
  }
  throw Error("invalid assignment target", target->loc);
}

Value Interpreter::eval_index_assign(const expr::IndexAssign& node, const EnvPtr& env, SourceLocation loc) {
  Value value = eval(node.value, env);
  std::vector<Value> indices;
  for (const auto& i : node.indices) indices.push_back(eval(i, env));
  try {
    update_target(
        node.object, [&](const Value& obj) { return ops::index_set(obj, indices, node.element, value); }, env,
        node.super);
  } catch (Error& err) {
    attach_location(err, loc);
    throw;
  }
  visible_ = false;
  return value;
}

Value Interpreter::eval_field_assign(const expr::FieldAssign& node, const EnvPtr& env, SourceLocation loc) {
  Value value = eval(node.value, env);
  try {
    update_target(
        node.object, [&](const Value& obj) { return ops::field_set(*this, obj, node.name, value); }, env,
        node.super);
  } catch (Error& err) {
    attach_location(err, loc);
    throw;
  }
  visible_ = false;
  return value;
}

// -- classes ---------------------------------------------------------------

bool Interpreter::conforms(const Value& v, const std::string& cls) const {
  if (cls.empty() || cls == s4::kAny) return true;
  for (const auto& c : implicit_class(v)) {
    if (c == cls || classes_->superclass_distance(c, cls)) return true;
  }
  std::string base = base_class(v);
  return base == cls || classes_->superclass_distance(base, cls).has_value();
}

// -- state -----------------------------------------------------------------

void Interpreter::set_seed(std::int64_t seed) {
  std::uint64_t state = rng::state_from_seed(seed);
  global_->define_value(kSeedName, Value::integer(std::bit_cast<std::int64_t>(state)));
}

std::uint64_t Interpreter::rng_state() {
  const Binding* b = global_->find_local(kSeedName);
  if (b == nullptr) {
    set_seed(0);
    b = global_->find_local(kSeedName);
  }
  Value v = read_binding(*b, kSeedName);
  if (v.kind() != Kind::Integer || v.length() != 1) throw Error("'.Random.seed' is not a valid generator state");
  auto state = std::bit_cast<std::uint64_t>(v.integers()[0]);
  return state == 0 ? rng::kZeroSeedReplacement : state;
}

Value Interpreter::rng_draw(std::int64_t n) {
  if (n < 0) throw Error("invalid number of draws: " + std::to_string(n));
  std::vector<double> out;
  if (n == 0) return Value::dbl(std::move(out));
  std::uint64_t state = rng_state();
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(rng::word_to_unit(rng::next_word(state)));
  global_->define_value(kSeedName, Value::integer(std::bit_cast<std::int64_t>(state)));
  return Value::dbl(std::move(out));
}

void Interpreter::set_option(const std::string& name, const Value& v) {
  const Binding* b = global_->find_local(kOptionsName);
  Value table = b != nullptr && b->is_immediate() ? std::get<Value>(b->slot) : Value::list({}, {});
  if (table.kind() != Kind::List) table = Value::list({}, {});
  global_->define_value(kOptionsName, ops::list_set_field(table, name, v));
}

Value Interpreter::get_option(const std::string& name) const {
  const Binding* b = global_->find_local(kOptionsName);
  if (b == nullptr || !b->is_immediate()) return Value();
  const Value& table = std::get<Value>(b->slot);
  if (table.kind() != Kind::List) return Value();
  auto names = table.names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return table.elements()[i];
  }
  return Value();
}

void Interpreter::register_foreign(std::string tag, ForeignFn fn) { foreign_[std::move(tag)] = std::move(fn); }

Value Interpreter::call_foreign(const std::string& tag, std::vector<Value> args) {
  auto it = foreign_.find(tag);
  if (it == foreign_.end()) throw Error("unknown foreign routine '" + tag + "'");
  return it->second(args);
}

void Interpreter::install_builtins() {
  builtins::install_core(*this);
  builtins::install_vectors(*this);
  builtins::install_environment(*this);
  builtins::install_oop(*this);
  builtins::install_state(*this);
  builtins::install_prelude(*this);
}

}  // namespace mls
