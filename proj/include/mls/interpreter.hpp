#ifndef MLS_INTERPRETER_HPP
#define MLS_INTERPRETER_HPP

#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mls/environment.hpp"
#include "mls/expr.hpp"
#include "mls/value.hpp"

namespace mls {

namespace s4 {
class ClassRegistry;
class GenericTable;
}  // namespace s4

namespace refclass {
class Registry;
}

struct CallContext {
  EnvPtr env;  // environment the call expression was evaluated in
  SourceLocation loc;
  std::string name;
};

struct PromiseArg {
  std::optional<std::string> name;
  PromisePtr promise;
};

/// One active closure call. UseMethod and standardGeneric find the
/// generic's original promises through this record.
struct Frame {
  Value function;
  std::vector<PromiseArg> args;
  EnvPtr env;
  EnvPtr caller;
  std::string name;
};

/// Thrown to leave a closure call early with a value (UseMethod does not
/// return to the generic's body).
struct FrameReturn {
  const Environment* target;
  Value value;
};

using ForeignFn = std::function<Value(std::vector<Value>&)>;

/// A single-threaded evaluator. Owns the base and global environments,
/// the options table, the class/generic registries and the call stack.
/// Independent instances share nothing.
class Interpreter {
 public:
  explicit Interpreter(std::ostream& out, std::ostream& err);
  Interpreter();
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  const EnvPtr& base_env() const { return base_; }
  const EnvPtr& global_env() const { return global_; }
  EnvPtr new_environment(EnvPtr parent, std::string tag);
  /// Every environment created by this interpreter that is still alive.
  std::vector<EnvPtr> live_environments() const;

  // -- evaluation ----------------------------------------------------------

  Value eval(const ExprPtr& e, const EnvPtr& env);
  /// Parses and evaluates source in env (global when null); returns the
  /// last value.
  Value eval_source(std::string_view source, EnvPtr env = nullptr);
  /// Evaluates top-level expressions in the global environment, printing
  /// each visible result when autoprint is set.
  void run_toplevel(const std::vector<ExprPtr>& exprs, bool autoprint);

  bool visible() const { return visible_; }
  void set_visible(bool v) { visible_ = v; }

  Value lookup(const std::string& name, const EnvPtr& env, SourceLocation loc = {});
  /// Like lookup but skips bindings whose value is not a function.
  Value find_function(const std::string& name, const EnvPtr& env, SourceLocation loc = {});
  std::optional<Value> find_function_opt(const std::string& name, const EnvPtr& env);
  Value force(const PromisePtr& p);
  /// Reads a binding, forcing promises and running active getters.
  Value read_binding(const Binding& b, const std::string& name);

  Value apply(const Value& fn, std::vector<PromiseArg> args, const EnvPtr& caller, SourceLocation loc,
              const std::string& name);
  /// Calls fn with already-evaluated arguments.
  Value call_value(const Value& fn, std::vector<NamedValue> args, const EnvPtr& caller,
                   SourceLocation loc = {}, const std::string& name = "");
  /// Builds the call environment: exact-name matching, then positional.
  EnvPtr match_arguments(const ClosureData& closure, const std::vector<PromiseArg>& args,
                         const std::string& tag);

  /// Binds in env's own frame.
  void assign_local(const std::string& name, const Value& v, const EnvPtr& env);
  /// Rebinds in the first enclosing frame (from env's parent, skipping
  /// base) that has the name; otherwise binds in the global environment.
  void assign_super(const std::string& name, const Value& v, const EnvPtr& env);
  /// Checked write through an existing binding (read-only, declared class,
  /// active setter).
  void write_binding(Environment& owner, const std::string& name, const Value& v);

  /// True when v is acceptable where class cls is declared.
  bool conforms(const Value& v, const std::string& cls) const;

  // -- state builtins --------------------------------------------------------

  void set_seed(std::int64_t seed);
  /// n draws in [0,1); updates .Random.seed.
  Value rng_draw(std::int64_t n);
  std::uint64_t rng_state();

  void set_option(const std::string& name, const Value& v);
  Value get_option(const std::string& name) const;

  void register_foreign(std::string tag, ForeignFn fn);
  Value call_foreign(const std::string& tag, std::vector<Value> args);

  // -- registries ------------------------------------------------------------

  s4::ClassRegistry& classes() { return *classes_; }
  s4::GenericTable& generics() { return *generics_; }
  refclass::Registry& ref_classes() { return *ref_classes_; }

  const Frame* frame_for(const EnvPtr& env) const;
  const std::deque<Frame>& frames() const { return frames_; }

  // -- io --------------------------------------------------------------------

  void warn(std::string message);
  const std::vector<std::string>& warnings() const { return warnings_; }
  void clear_warnings() { warnings_.clear(); }
  std::ostream& out() { return *out_; }
  std::ostream& err() { return *err_; }

  /// Prints as auto-printing would: objects go through `print`.
  void print_value(const Value& v, const EnvPtr& env);

  void define_builtin(const std::string& name, EagerFn fn);
  void define_special(const std::string& name, SpecialFn fn);

  static constexpr std::size_t kMaxDepth = 1000;

 private:
  Value eval_call(const expr::Call& call, const ExprPtr& self, const EnvPtr& env);
  Value eval_index_assign(const expr::IndexAssign& node, const EnvPtr& env, SourceLocation loc);
  Value eval_field_assign(const expr::FieldAssign& node, const EnvPtr& env, SourceLocation loc);
  /// Replacement semantics for `a$b[i] <- v`: reads the innermost target,
  /// applies modify, and writes each level back outwards.
  void update_target(const ExprPtr& target, const std::function<Value(const Value&)>& modify,
                     const EnvPtr& env, bool super);
  Value apply_closure(const Value& fn, std::vector<PromiseArg> args, const EnvPtr& caller,
                      SourceLocation loc, const std::string& name);

  void install_builtins();

  std::ostream* out_;
  std::ostream* err_;
  EnvPtr base_;
  EnvPtr global_;
  std::vector<std::weak_ptr<Environment>> envs_;
  std::size_t envs_compacted_at_ = 64;
  std::deque<Frame> frames_;
  std::vector<std::string> warnings_;
  std::map<std::string, ForeignFn> foreign_;
  std::unique_ptr<s4::ClassRegistry> classes_;
  std::unique_ptr<s4::GenericTable> generics_;
  std::unique_ptr<refclass::Registry> ref_classes_;
  bool visible_ = true;
};

/// Name under which the generator state lives in the global environment.
inline constexpr const char* kSeedName = ".Random.seed";
/// Name of the options list in the global environment.
inline constexpr const char* kOptionsName = ".Options";

}  // namespace mls

#endif  // MLS_INTERPRETER_HPP
