#include "mls/value.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/expr.hpp"

namespace mls {

struct Value::Rep {
  using Payload = std::variant<std::monostate, std::vector<bool>, std::vector<std::int64_t>,
                               std::vector<double>, std::vector<std::string>, std::vector<Value>,
                               ClosureData, BuiltinData, ExprPtr, EnvPtr, S4Data, RefData>;
  Kind kind = Kind::Null;
  Payload payload;
  Attributes attributes;
};

namespace {

template <class T>
const T& payload_as(const Value& v, const T* p, Kind expected) {
  if (p == nullptr) {
    throw Error("internal: expected " + std::string(kind_name(expected)) + ", got " +
                std::string(kind_name(v.kind())));
  }
  return *p;
}

const Attributes& empty_attributes() {
  static const Attributes empty;
  return empty;
}

}  // namespace

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Null: return "NULL";
    case Kind::Logical: return "logical";
    case Kind::Integer: return "integer";
    case Kind::Double: return "double";
    case Kind::String: return "character";
    case Kind::List: return "list";
    case Kind::Closure: return "closure";
    case Kind::Builtin: return "builtin";
    case Kind::Expression: return "expression";
    case Kind::Environment: return "environment";
    case Kind::S4Instance: return "S4";
    case Kind::RefInstance: return "reference";
  }
  return "unknown";
}

Value::Value() = default;

#define MLS_MAKE(KIND, EXPR)                           \
  auto rep = std::make_shared<Rep>();                  \
  rep->kind = KIND;                                    \
  rep->payload = EXPR;                                 \
  return Value(std::shared_ptr<const Rep>(std::move(rep)))

Value Value::logical(std::vector<bool> v) { MLS_MAKE(Kind::Logical, std::move(v)); }
Value Value::integer(std::vector<std::int64_t> v) { MLS_MAKE(Kind::Integer, std::move(v)); }
Value Value::dbl(std::vector<double> v) { MLS_MAKE(Kind::Double, std::move(v)); }
Value Value::str(std::vector<std::string> v) { MLS_MAKE(Kind::String, std::move(v)); }
Value Value::list(std::vector<Value> elements) { MLS_MAKE(Kind::List, std::move(elements)); }
Value Value::closure(ClosureData c) { MLS_MAKE(Kind::Closure, std::move(c)); }
Value Value::builtin(BuiltinData b) { MLS_MAKE(Kind::Builtin, std::move(b)); }
Value Value::expression(ExprPtr e) { MLS_MAKE(Kind::Expression, std::move(e)); }
Value Value::environment(EnvPtr e) { MLS_MAKE(Kind::Environment, std::move(e)); }
Value Value::s4(S4Data d) { MLS_MAKE(Kind::S4Instance, std::move(d)); }
Value Value::ref(RefData d) { MLS_MAKE(Kind::RefInstance, std::move(d)); }

#undef MLS_MAKE

Value Value::list(std::vector<Value> elements, std::vector<std::string> names) {
  std::size_t n = elements.size();
  Value v = list(std::move(elements));
  if (!names.empty()) {
    if (names.size() != n) throw Error("names attribute must be the same length as the list");
    v = v.with_attribute("names", str(std::move(names)));
  }
  return v;
}

Kind Value::kind() const { return rep_ ? rep_->kind : Kind::Null; }

bool Value::is_atomic() const {
  switch (kind()) {
    case Kind::Logical:
    case Kind::Integer:
    case Kind::Double:
    case Kind::String: return true;
    default: return false;
  }
}

bool Value::is_numeric() const {
  Kind k = kind();
  return k == Kind::Logical || k == Kind::Integer || k == Kind::Double;
}

bool Value::is_object() const {
  Kind k = kind();
  return k == Kind::S4Instance || k == Kind::RefInstance || has_attribute("class");
}

std::size_t Value::length() const {
  switch (kind()) {
    case Kind::Null: return 0;
    case Kind::Logical: return logicals().size();
    case Kind::Integer: return integers().size();
    case Kind::Double: return doubles().size();
    case Kind::String: return strings().size();
    case Kind::List: return elements().size();
    default: return 1;
  }
}

const std::vector<bool>& Value::logicals() const {
  return payload_as(*this, rep_ ? std::get_if<std::vector<bool>>(&rep_->payload) : nullptr, Kind::Logical);
}
const std::vector<std::int64_t>& Value::integers() const {
  return payload_as(*this, rep_ ? std::get_if<std::vector<std::int64_t>>(&rep_->payload) : nullptr,
                    Kind::Integer);
}
const std::vector<double>& Value::doubles() const {
  return payload_as(*this, rep_ ? std::get_if<std::vector<double>>(&rep_->payload) : nullptr, Kind::Double);
}
const std::vector<std::string>& Value::strings() const {
  return payload_as(*this, rep_ ? std::get_if<std::vector<std::string>>(&rep_->payload) : nullptr,
                    Kind::String);
}
const std::vector<Value>& Value::elements() const {
  return payload_as(*this, rep_ ? std::get_if<std::vector<Value>>(&rep_->payload) : nullptr, Kind::List);
}
const ClosureData& Value::closure_data() const {
  return payload_as(*this, rep_ ? std::get_if<ClosureData>(&rep_->payload) : nullptr, Kind::Closure);
}
const BuiltinData& Value::builtin_data() const {
  return payload_as(*this, rep_ ? std::get_if<BuiltinData>(&rep_->payload) : nullptr, Kind::Builtin);
}
const ExprPtr& Value::expression_data() const {
  return payload_as(*this, rep_ ? std::get_if<ExprPtr>(&rep_->payload) : nullptr, Kind::Expression);
}
const EnvPtr& Value::environment_data() const {
  return payload_as(*this, rep_ ? std::get_if<EnvPtr>(&rep_->payload) : nullptr, Kind::Environment);
}
const S4Data& Value::s4_data() const {
  return payload_as(*this, rep_ ? std::get_if<S4Data>(&rep_->payload) : nullptr, Kind::S4Instance);
}
const RefData& Value::ref_data() const {
  return payload_as(*this, rep_ ? std::get_if<RefData>(&rep_->payload) : nullptr, Kind::RefInstance);
}

const Attributes& Value::attributes() const { return rep_ ? rep_->attributes : empty_attributes(); }

Value Value::attribute(std::string_view name) const {
  for (const auto& [key, val] : attributes()) {
    if (key == name) return val;
  }
  return Value();
}

bool Value::has_attribute(std::string_view name) const {
  const auto& attrs = attributes();
  return std::any_of(attrs.begin(), attrs.end(), [&](const auto& kv) { return kv.first == name; });
}

Value Value::with_attribute(std::string_view name, const Value& attr) const {
  if (!rep_) {
    // NULL carries no attributes.
    if (attr.is_null()) return *this;
    throw Error("attempt to set an attribute on NULL");
  }
  Attributes attrs = rep_->attributes;
  auto it = std::find_if(attrs.begin(), attrs.end(), [&](const auto& kv) { return kv.first == name; });
  if (attr.is_null()) {
    if (it == attrs.end()) return *this;
    attrs.erase(it);
  } else if (it != attrs.end()) {
    it->second = attr;
  } else {
    attrs.emplace_back(std::string(name), attr);
  }
  return with_attributes(std::move(attrs));
}

Value Value::with_attributes(Attributes attrs) const {
  if (!rep_) return *this;
  auto rep = std::make_shared<Rep>(*rep_);
  rep->attributes = std::move(attrs);
  return Value(std::shared_ptr<const Rep>(std::move(rep)));
}

Value Value::without_attributes() const {
  if (attributes().empty()) return *this;
  return with_attributes({});
}

std::vector<std::string> Value::names() const {
  Value n = attribute("names");
  if (n.kind() != Kind::String) return {};
  return n.strings();
}

std::string base_class(const Value& v) {
  switch (v.kind()) {
    case Kind::Null: return "NULL";
    case Kind::Logical: return "logical";
    case Kind::Integer: return "integer";
    case Kind::Double: return "numeric";
    case Kind::String: return "character";
    case Kind::List: return "list";
    case Kind::Closure:
    case Kind::Builtin: return "function";
    case Kind::Expression: return "expression";
    case Kind::Environment: return "environment";
    case Kind::S4Instance: return v.s4_data().class_name;
    case Kind::RefInstance: return v.ref_data().class_name;
  }
  return "NULL";
}

std::vector<std::string> implicit_class(const Value& v) {
  Value cls = v.attribute("class");
  if (cls.kind() == Kind::String && !cls.strings().empty()) return cls.strings();
  if (v.kind() == Kind::S4Instance) return v.s4_data().lineage;
  if (v.kind() == Kind::RefInstance) return v.ref_data().lineage;
  return {base_class(v)};
}

Value set_attribute(const Value& v, std::string_view name, const Value& attr) {
  if (name == "class" && !attr.is_null()) {
    if (attr.kind() != Kind::String || attr.strings().empty()) throw Error("invalid class attribute");
  }
  if (name == "names" && !attr.is_null()) {
    if (attr.kind() != Kind::String) throw Error("names attribute must be a character vector");
    if (attr.length() != v.length()) {
      throw Error("names attribute must be the same length as the vector");
    }
  }
  return v.with_attribute(name, attr);
}

Value get_attribute(const Value& v, std::string_view name) { return v.attribute(name); }

Value deep_copy(const Value& v) {
  if (!v.rep_) return v;
  auto rep = std::make_shared<Value::Rep>();
  rep->kind = v.rep_->kind;
  if (const auto* elems = std::get_if<std::vector<Value>>(&v.rep_->payload)) {
    std::vector<Value> copied;
    copied.reserve(elems->size());
    for (const auto& e : *elems) copied.push_back(deep_copy(e));
    rep->payload = std::move(copied);
  } else if (const auto* s4 = std::get_if<S4Data>(&v.rep_->payload)) {
    S4Data copy{s4->class_name, s4->lineage, {}};
    for (const auto& [slot, val] : s4->slots) copy.slots.emplace_back(slot, deep_copy(val));
    rep->payload = std::move(copy);
  } else {
    // Vectors copy their storage; environment and reference payloads copy
    // only the pointer.
    rep->payload = v.rep_->payload;
  }
  for (const auto& [key, val] : v.rep_->attributes) rep->attributes.emplace_back(key, deep_copy(val));
  return Value(std::shared_ptr<const Value::Rep>(std::move(rep)));
}

namespace {

bool doubles_equal(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool attributes_equal(const Attributes& a, const Attributes& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !structurally_equal(a[i].second, b[i].second)) return false;
  }
  return true;
}

bool formals_equal(const std::vector<Formal>& a, const std::vector<Formal>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) return false;
    if (!expr_equal(a[i].default_value, b[i].default_value)) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  if (!attributes_equal(a.attributes(), b.attributes())) return false;
  switch (a.kind()) {
    case Kind::Null: return true;
    case Kind::Logical: return a.logicals() == b.logicals();
    case Kind::Integer: return a.integers() == b.integers();
    case Kind::Double: {
      const auto& x = a.doubles();
      const auto& y = b.doubles();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!doubles_equal(x[i], y[i])) return false;
      }
      return true;
    }
    case Kind::String: return a.strings() == b.strings();
    case Kind::List: {
      const auto& x = a.elements();
      const auto& y = b.elements();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!structurally_equal(x[i], y[i])) return false;
      }
      return true;
    }
    case Kind::Closure: {
      const auto& x = a.closure_data();
      const auto& y = b.closure_data();
      return x.enclosure == y.enclosure && formals_equal(x.formals, y.formals) &&
             expr_equal(x.body, y.body);
    }
    case Kind::Builtin: return a.builtin_data().name == b.builtin_data().name;
    case Kind::Expression: return expr_equal(a.expression_data(), b.expression_data());
    case Kind::Environment: return a.environment_data() == b.environment_data();
    case Kind::S4Instance: {
      const auto& x = a.s4_data();
      const auto& y = b.s4_data();
      if (x.class_name != y.class_name || x.slots.size() != y.slots.size()) return false;
      for (std::size_t i = 0; i < x.slots.size(); ++i) {
        if (x.slots[i].first != y.slots[i].first ||
            !structurally_equal(x.slots[i].second, y.slots[i].second)) {
          return false;
        }
      }
      return true;
    }
    case Kind::RefInstance: return a.ref_data().backing == b.ref_data().backing;
  }
  return false;
}

double as_double_scalar(const Value& v, std::string_view what) {
  if (v.length() >= 1) {
    switch (v.kind()) {
      case Kind::Double: return v.doubles()[0];
      case Kind::Integer: return static_cast<double>(v.integers()[0]);
      case Kind::Logical: return v.logicals()[0] ? 1.0 : 0.0;
      default: break;
    }
  }
  throw Error("invalid '" + std::string(what) + "' argument: expected a number");
}

std::int64_t as_integer_scalar(const Value& v, std::string_view what) {
  if (v.length() >= 1) {
    switch (v.kind()) {
      case Kind::Integer: return v.integers()[0];
      case Kind::Logical: return v.logicals()[0] ? 1 : 0;
      case Kind::Double: {
        double d = v.doubles()[0];
        if (std::isfinite(d) && std::abs(d) < 9.2e18) return static_cast<std::int64_t>(std::trunc(d));
        break;
      }
      default: break;
    }
  }
  throw Error("invalid '" + std::string(what) + "' argument: expected an integer");
}

std::string as_string_scalar(const Value& v, std::string_view what) {
  if (v.kind() == Kind::String && v.length() >= 1) return v.strings()[0];
  throw Error("invalid '" + std::string(what) + "' argument: expected a character string");
}

bool as_logical_scalar(const Value& v, std::string_view what) {
  if (v.length() >= 1) {
    switch (v.kind()) {
      case Kind::Logical: return v.logicals()[0];
      case Kind::Integer: return v.integers()[0] != 0;
      case Kind::Double: return v.doubles()[0] != 0.0;
      default: break;
    }
  }
  throw Error("invalid '" + std::string(what) + "' argument: expected a logical value");
}

std::string Error::describe() const {
  if (loc_.known()) {
    return "Error at " + std::to_string(loc_.line) + ":" + std::to_string(loc_.column) + ": " + message_;
  }
  return "Error: " + message_;
}

}  // namespace mls
