#ifndef MLS_VALUE_HPP
#define MLS_VALUE_HPP

// The universal object. Every datum, function, expression and class
// definition is a Value carrying an optional ordered attribute map.
//
// A Value is a handle to an immutable representation. Operations that
// "modify" a value build a new representation, so two bindings can never
// observe each other's changes. Environments and reference-class instances
// are the exception: their payload is a pointer to a mutable Environment,
// and copying the Value copies that pointer.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mls {

enum class Kind : std::uint8_t {
  Null,
  Logical,
  Integer,
  Double,
  String,
  List,
  Closure,
  Builtin,
  Expression,
  Environment,
  S4Instance,
  RefInstance,
};

std::string_view kind_name(Kind k);

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

class Environment;
using EnvPtr = std::shared_ptr<Environment>;

class Interpreter;
class Value;

using Attributes = std::vector<std::pair<std::string, Value>>;

struct SourceLocation {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

/// A formal argument of a function literal or closure. A null
/// default_value means the formal has no default.
struct Formal {
  std::string name;
  ExprPtr default_value;
};

struct ClosureData {
  std::vector<Formal> formals;
  ExprPtr body;
  EnvPtr enclosure;
};

struct CallContext;
struct CallArg;
struct NamedValue;

using EagerFn = std::function<Value(Interpreter&, std::vector<NamedValue>&, const CallContext&)>;
using SpecialFn = std::function<Value(Interpreter&, std::span<const CallArg>, const CallContext&)>;

struct BuiltinData {
  std::string name;
  EagerFn eager;      // set for builtins receiving evaluated arguments
  SpecialFn special;  // set for builtins receiving unevaluated arguments
};

struct S4Data {
  std::string class_name;
  std::vector<std::string> lineage;
  std::vector<std::pair<std::string, Value>> slots;
};

struct RefData {
  EnvPtr backing;
  std::string class_name;
  std::vector<std::string> lineage;
};

class Value {
 public:
  Value();

  static Value null() { return Value(); }
  static Value logical(std::vector<bool> v);
  static Value logical(bool b) { return logical(std::vector<bool>{b}); }
  static Value integer(std::vector<std::int64_t> v);
  static Value integer(std::int64_t i) { return integer(std::vector<std::int64_t>{i}); }
  static Value dbl(std::vector<double> v);
  static Value dbl(double d) { return dbl(std::vector<double>{d}); }
  static Value str(std::vector<std::string> v);
  static Value str(std::string s) { return str(std::vector<std::string>{std::move(s)}); }
  static Value list(std::vector<Value> elements);
  static Value list(std::vector<Value> elements, std::vector<std::string> names);
  static Value closure(ClosureData c);
  static Value builtin(BuiltinData b);
  static Value expression(ExprPtr e);
  static Value environment(EnvPtr e);
  static Value s4(S4Data d);
  static Value ref(RefData d);

  Kind kind() const;
  bool is_null() const { return kind() == Kind::Null; }
  bool is_function() const { return kind() == Kind::Closure || kind() == Kind::Builtin; }
  bool is_atomic() const;
  bool is_numeric() const;  // Logical, Integer or Double
  /// True for values that take part in S3/S4 dispatch: explicit class
  /// attribute, S4 instance or reference instance.
  bool is_object() const;

  /// Element count for vectors and lists; 1 for every other non-null kind.
  std::size_t length() const;

  const std::vector<bool>& logicals() const;
  const std::vector<std::int64_t>& integers() const;
  const std::vector<double>& doubles() const;
  const std::vector<std::string>& strings() const;
  const std::vector<Value>& elements() const;
  const ClosureData& closure_data() const;
  const BuiltinData& builtin_data() const;
  const ExprPtr& expression_data() const;
  const EnvPtr& environment_data() const;
  const S4Data& s4_data() const;
  const RefData& ref_data() const;

  const Attributes& attributes() const;
  /// The attribute, or Null when absent.
  Value attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const;
  /// Copy with the named attribute replaced; Null removes it. No class
  /// validation is done here (see set_attribute).
  Value with_attribute(std::string_view name, const Value& attr) const;
  Value with_attributes(Attributes attrs) const;
  Value without_attributes() const;

  /// Names attribute as strings; empty when absent.
  std::vector<std::string> names() const;

  /// True when both handles point at the same representation.
  bool same_storage(const Value& other) const { return rep_ == other.rep_; }

 private:
  struct Rep;
  explicit Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
  friend Value deep_copy(const Value& v);
};

struct NamedValue {
  std::optional<std::string> name;
  Value value;
};

/// Class vector used for dispatch: the class attribute if present,
/// otherwise a one-element base-kind name. Never empty.
std::vector<std::string> implicit_class(const Value& v);

/// Base-kind class name ignoring any class attribute ("numeric",
/// "character", "list", "function", "NULL", "logical", "integer", ...).
std::string base_class(const Value& v);

/// Returns v with the attribute set. A "class" attribute must be a
/// non-empty character vector, or Null to remove it.
Value set_attribute(const Value& v, std::string_view name, const Value& attr);
Value get_attribute(const Value& v, std::string_view name);

/// Fresh, unshared copy. Environment and reference payloads are not
/// copied; the reference is, preserving aliasing.
Value deep_copy(const Value& v);

/// Structural equality. Doubles compare bitwise except that NaN equals
/// NaN; environments and reference instances compare by identity.
bool structurally_equal(const Value& a, const Value& b);

/// Shorthand for scalar extraction with kind coercion. Throws Error when
/// the value is not a length >= 1 vector of a compatible kind.
double as_double_scalar(const Value& v, std::string_view what);
std::int64_t as_integer_scalar(const Value& v, std::string_view what);
std::string as_string_scalar(const Value& v, std::string_view what);
bool as_logical_scalar(const Value& v, std::string_view what);

}  // namespace mls

#endif  // MLS_VALUE_HPP
