#ifndef MLS_ENVIRONMENT_HPP
#define MLS_ENVIRONMENT_HPP

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mls/value.hpp"

namespace mls {

/// An unevaluated argument paired with the environment it came from.
/// Forced at most once; the value is memoized.
struct Promise {
  ExprPtr expr;
  EnvPtr env;
  bool forced = false;
  bool forcing = false;
  bool is_default = false;  // built from a formal's default expression
  Value value;

  static std::shared_ptr<Promise> lazy(ExprPtr expr, EnvPtr env, bool is_default = false);
  static std::shared_ptr<Promise> ready(Value v);
};
using PromisePtr = std::shared_ptr<Promise>;

/// Reads call getter(); writes call setter(value). A Null setter makes the
/// binding read-only.
struct ActiveBinding {
  Value getter;
  Value setter;
};

/// Marker for a formal that received no argument and has no default.
struct MissingArg {};

struct Binding {
  using Slot = std::variant<Value, PromisePtr, ActiveBinding, MissingArg>;

  Binding() = default;
  Binding(Slot s) : slot(std::move(s)) {}  // NOLINT(google-explicit-constructor)

  Slot slot;
  bool read_only = false;
  bool is_field = false;         // reference-class field
  bool is_method = false;        // reference-class method
  std::string declared_class;    // empty or "ANY" means unchecked

  bool is_immediate() const { return std::holds_alternative<Value>(slot); }
};

class Environment {
 public:
  Environment(EnvPtr parent, std::string tag) : parent_(std::move(parent)), tag_(std::move(tag)) {}

  const EnvPtr& parent() const { return parent_; }
  const std::string& tag() const { return tag_; }

  Binding* find_local(const std::string& name);
  const Binding* find_local(const std::string& name) const;
  bool has_local(const std::string& name) const { return find_local(name) != nullptr; }

  /// First environment in the chain (starting here) whose frame binds name.
  Environment* find_owner(const std::string& name);

  /// Raw frame write; no read-only or type checks.
  void define(const std::string& name, Binding b) { frame_[name] = std::move(b); }
  void define_value(const std::string& name, Value v) { frame_[name] = Binding{std::move(v)}; }
  bool remove(const std::string& name) { return frame_.erase(name) > 0; }

  const std::map<std::string, Binding>& frame() const { return frame_; }
  std::vector<std::string> names() const;

  void clear() { frame_.clear(); }

 private:
  std::map<std::string, Binding> frame_;
  EnvPtr parent_;
  std::string tag_;
};

}  // namespace mls

#endif  // MLS_ENVIRONMENT_HPP
