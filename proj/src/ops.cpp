#include "ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <type_traits>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/refclass.hpp"

namespace mls::ops {

namespace {

template <class T>
const std::vector<T>& items(const Value& v);
template <>
const std::vector<bool>& items<bool>(const Value& v) { return v.logicals(); }
template <>
const std::vector<std::int64_t>& items<std::int64_t>(const Value& v) { return v.integers(); }
template <>
const std::vector<double>& items<double>(const Value& v) { return v.doubles(); }
template <>
const std::vector<std::string>& items<std::string>(const Value& v) { return v.strings(); }
template <>
const std::vector<Value>& items<Value>(const Value& v) { return v.elements(); }

Value make(std::vector<bool> v) { return Value::logical(std::move(v)); }
Value make(std::vector<std::int64_t> v) { return Value::integer(std::move(v)); }
Value make(std::vector<double> v) { return Value::dbl(std::move(v)); }
Value make(std::vector<std::string> v) { return Value::str(std::move(v)); }
Value make(std::vector<Value> v) { return Value::list(std::move(v)); }

template <class F>
decltype(auto) by_kind(Kind k, F&& f) {
  switch (k) {
    case Kind::Logical: return f(std::type_identity<bool>{});
    case Kind::Integer: return f(std::type_identity<std::int64_t>{});
    case Kind::Double: return f(std::type_identity<double>{});
    case Kind::String: return f(std::type_identity<std::string>{});
    case Kind::List: return f(std::type_identity<Value>{});
    default: break;
  }
  throw Error("object of type '" + std::string(kind_name(k)) + "' is not subsettable");
}

bool is_vector(const Value& v) { return v.is_atomic() || v.kind() == Kind::List; }

double parse_double(const std::string& s) {
  double out = 0;
  std::string_view sv(s);
  while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
  while (!sv.empty() && sv.back() == ' ') sv.remove_suffix(1);
  if (sv == "Inf") return std::numeric_limits<double>::infinity();
  if (sv == "-Inf") return -std::numeric_limits<double>::infinity();
  if (sv == "NaN") return std::nan("");
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  if (sv.empty() || ec != std::errc() || ptr != sv.data() + sv.size()) {
    throw Error("cannot coerce \"" + s + "\" to numeric");
  }
  return out;
}

Value names_for(const Value& a, const Value& b, std::size_t n) {
  if (a.length() == n && a.has_attribute("names")) return a.attribute("names");
  if (b.length() == n && b.has_attribute("names")) return b.attribute("names");
  return Value();
}

Value with_names(Value v, const Value& names) {
  if (names.is_null()) return v;
  return v.with_attribute("names", names);
}

std::size_t recycled_length(std::size_t a, std::size_t b) { return (a == 0 || b == 0) ? 0 : std::max(a, b); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double fmod_floor(double a, double b) { return a - std::floor(a / b) * b; }

}  // namespace

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Null: return -1;
    case Kind::Logical: return 0;
    case Kind::Integer: return 1;
    case Kind::Double: return 2;
    case Kind::String: return 3;
    case Kind::List: return 4;
    default: return 5;
  }
}

bool condition_value(const Value& v) {
  if (v.length() == 0 || !v.is_atomic()) throw Error("argument is of length zero");
  switch (v.kind()) {
    case Kind::Logical: return v.logicals()[0];
    case Kind::Integer: return v.integers()[0] != 0;
    case Kind::Double: {
      double d = v.doubles()[0];
      if (std::isnan(d)) throw Error("missing value where TRUE/FALSE needed");
      return d != 0;
    }
    case Kind::String: {
      const std::string& s = v.strings()[0];
      if (s == "TRUE" || s == "true" || s == "T") return true;
      if (s == "FALSE" || s == "false" || s == "F") return false;
      throw Error("argument is not interpretable as logical");
    }
    default: break;
  }
  throw Error("argument is not interpretable as logical");
}

Value coerce(const Value& v, Kind target) {
  if (v.kind() == target) return v;
  if (v.is_null()) {
    return by_kind(target, []<class T>(std::type_identity<T>) { return make(std::vector<T>{}); });
  }
  Value out;
  if (target == Kind::List) {
    if (!v.is_atomic()) {
      out = Value::list({v});
    } else {
      std::vector<Value> elems;
      for (std::size_t i = 0; i < v.length(); ++i) elems.push_back(element_at(v, i).without_attributes());
      out = Value::list(std::move(elems));
    }
    return out.with_attributes(v.attributes());
  }
  if (v.kind() == Kind::List) {
    Value flat = combine({{std::nullopt, v.without_attributes()}});
    if (flat.length() != v.length()) {
      throw Error("(list) object cannot be coerced to type '" + std::string(kind_name(target)) + "'");
    }
    return coerce(flat, target).with_attributes(v.attributes());
  }
  if (!v.is_atomic()) {
    throw Error("cannot coerce type '" + std::string(kind_name(v.kind())) + "' to vector of type '" +
                std::string(kind_name(target)) + "'");
  }
  std::size_t n = v.length();
  switch (target) {
    case Kind::Logical: {
      std::vector<bool> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        switch (v.kind()) {
          case Kind::Integer: r[i] = v.integers()[i] != 0; break;
          case Kind::Double: r[i] = v.doubles()[i] != 0; break;
          default: r[i] = condition_value(Value::str(v.strings()[i])); break;
        }
      }
      out = Value::logical(std::move(r));
      break;
    }
    case Kind::Integer: {
      std::vector<std::int64_t> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        switch (v.kind()) {
          case Kind::Logical: r[i] = v.logicals()[i] ? 1 : 0; break;
          case Kind::Double: {
            double d = v.doubles()[i];
            if (!std::isfinite(d)) throw Error("cannot coerce non-finite value to integer");
            r[i] = static_cast<std::int64_t>(std::trunc(d));
            break;
          }
          default: r[i] = static_cast<std::int64_t>(std::trunc(parse_double(v.strings()[i]))); break;
        }
      }
      out = Value::integer(std::move(r));
      break;
    }
    case Kind::Double: {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        switch (v.kind()) {
          case Kind::Logical: r[i] = v.logicals()[i] ? 1.0 : 0.0; break;
          case Kind::Integer: r[i] = static_cast<double>(v.integers()[i]); break;
          default: r[i] = parse_double(v.strings()[i]); break;
        }
      }
      out = Value::dbl(std::move(r));
      break;
    }
    case Kind::String: out = Value::str(as_character(v.without_attributes())); break;
    default:
      throw Error("cannot coerce to vector of type '" + std::string(kind_name(target)) + "'");
  }
  return out.with_attributes(v.attributes());
}

Value coerce_plain(const Value& v, Kind target) {
  Value c = coerce(v, target);
  Value names = v.attribute("names");
  return with_names(c.without_attributes(), names);
}

Value element_at(const Value& v, std::size_t i) {
  return by_kind(v.kind(), [&]<class T>(std::type_identity<T>) -> Value {
    if constexpr (std::is_same_v<T, Value>) {
      return Value::list({items<Value>(v).at(i)});
    } else {
      return make(std::vector<T>{items<T>(v).at(i)});
    }
  });
}

// -- arithmetic ------------------------------------------------------------

Value arith(std::string_view op, const Value& a, const Value& b) {
  auto numeric_operand = [&](const Value& x) {
    return x.is_numeric() || x.is_null();
  };
  if (!numeric_operand(a) || !numeric_operand(b)) throw Error("non-numeric argument to binary operator");
  std::size_t na = a.length();
  std::size_t nb = b.length();
  std::size_t n = recycled_length(na, nb);
  Value names = names_for(a, b, n);
  bool integer_result = a.kind() != Kind::Double && b.kind() != Kind::Double && op != "/" && op != "^";
  if (integer_result) {
    Value ia = coerce(a.without_attributes(), Kind::Integer);
    Value ib = coerce(b.without_attributes(), Kind::Integer);
    const auto& x = ia.integers();
    const auto& y = ib.integers();
    std::vector<std::int64_t> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t p = x[i % na];
      std::int64_t q = y[i % nb];
      if (op == "+") {
        r[i] = p + q;
      } else if (op == "-") {
        r[i] = p - q;
      } else if (op == "*") {
        r[i] = p * q;
      } else if (op == "%%") {
        if (q == 0) throw Error("integer modulus by zero");
        r[i] = p - floor_div(p, q) * q;
      } else if (op == "%/%") {
        if (q == 0) throw Error("integer division by zero");
        r[i] = floor_div(p, q);
      } else {
        throw Error("unknown arithmetic operator " + std::string(op));
      }
    }
    return with_names(Value::integer(std::move(r)), names);
  }
  Value da = coerce(a.without_attributes(), Kind::Double);
  Value db = coerce(b.without_attributes(), Kind::Double);
  const auto& x = da.doubles();
  const auto& y = db.doubles();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = x[i % na];
    double q = y[i % nb];
    if (op == "+") {
      r[i] = p + q;
    } else if (op == "-") {
      r[i] = p - q;
    } else if (op == "*") {
      r[i] = p * q;
    } else if (op == "/") {
      r[i] = p / q;
    } else if (op == "^") {
      r[i] = std::pow(p, q);
    } else if (op == "%%") {
      r[i] = fmod_floor(p, q);
    } else if (op == "%/%") {
      r[i] = std::floor(p / q);
    } else {
      throw Error("unknown arithmetic operator " + std::string(op));
    }
  }
  return with_names(Value::dbl(std::move(r)), names);
}

Value negate(const Value& a) {
  Value names = a.attribute("names");
  switch (a.kind()) {
    case Kind::Logical:
    case Kind::Integer: {
      std::vector<std::int64_t> r = coerce(a.without_attributes(), Kind::Integer).integers();
      for (auto& x : r) x = -x;
      return with_names(Value::integer(std::move(r)), names);
    }
    case Kind::Double: {
      std::vector<double> r = a.doubles();
      for (auto& x : r) x = -x;
      return with_names(Value::dbl(std::move(r)), names);
    }
    default: break;
  }
  throw Error("invalid argument to unary operator");
}

Value logical_not(const Value& a) {
  if (!a.is_numeric()) throw Error("invalid argument type");
  Value l = coerce(a.without_attributes(), Kind::Logical);
  std::vector<bool> r = l.logicals();
  r.flip();
  return with_names(Value::logical(std::move(r)), a.attribute("names"));
}

Value compare(std::string_view op, const Value& a, const Value& b) {
  if (!(a.is_atomic() || a.is_null()) || !(b.is_atomic() || b.is_null())) {
    throw Error("comparison (" + std::string(op) + ") is possible only for atomic types");
  }
  std::size_t na = a.length();
  std::size_t nb = b.length();
  std::size_t n = recycled_length(na, nb);
  Value names = names_for(a, b, n);
  std::vector<bool> r(n);
  auto decide = [&](int c) {
    if (op == "==") return c == 0;
    if (op == "!=") return c != 0;
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    return c >= 0;
  };
  if (a.kind() == Kind::String || b.kind() == Kind::String) {
    Value sa = coerce(a.without_attributes(), Kind::String);
    Value sb = coerce(b.without_attributes(), Kind::String);
    for (std::size_t i = 0; i < n; ++i) {
      int c = sa.strings()[i % na].compare(sb.strings()[i % nb]);
      r[i] = decide(c < 0 ? -1 : (c > 0 ? 1 : 0));
    }
  } else {
    Value da = coerce(a.without_attributes(), Kind::Double);
    Value db = coerce(b.without_attributes(), Kind::Double);
    for (std::size_t i = 0; i < n; ++i) {
      double p = da.doubles()[i % na];
      double q = db.doubles()[i % nb];
      if (std::isnan(p) || std::isnan(q)) {
        r[i] = op == "!=";
      } else {
        r[i] = decide(p < q ? -1 : (p > q ? 1 : 0));
      }
    }
  }
  return with_names(Value::logical(std::move(r)), names);
}

Value logical_elementwise(std::string_view op, const Value& a, const Value& b) {
  if (!(a.is_numeric() || a.is_null()) || !(b.is_numeric() || b.is_null())) {
    throw Error("operations are possible only for numeric or logical types");
  }
  std::size_t na = a.length();
  std::size_t nb = b.length();
  std::size_t n = recycled_length(na, nb);
  Value la = coerce(a.without_attributes(), Kind::Logical);
  Value lb = coerce(b.without_attributes(), Kind::Logical);
  std::vector<bool> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool p = la.logicals()[i % na];
    bool q = lb.logicals()[i % nb];
    r[i] = op == "&" ? (p && q) : (p || q);
  }
  return with_names(Value::logical(std::move(r)), names_for(a, b, n));
}

Value range(const Value& from, const Value& to) {
  double f = as_double_scalar(from, "from");
  double t = as_double_scalar(to, "to");
  if (!std::isfinite(f) || !std::isfinite(t)) throw Error("result would be too long a vector");
  double span = std::floor(std::abs(t - f) + 1e-10);
  if (span > 1e8) throw Error("result would be too long a vector");
  auto count = static_cast<std::size_t>(span) + 1;
  double step = t >= f ? 1.0 : -1.0;
  if (f == std::floor(f) && std::abs(f) < 9e15) {
    std::vector<std::int64_t> r(count);
    auto start = static_cast<std::int64_t>(f);
    auto s = static_cast<std::int64_t>(step);
    for (std::size_t i = 0; i < count; ++i) r[i] = start + s * static_cast<std::int64_t>(i);
    return Value::integer(std::move(r));
  }
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i) r[i] = f + step * static_cast<double>(i);
  return Value::dbl(std::move(r));
}

// -- indexing --------------------------------------------------------------

namespace {

struct Positions {
  std::vector<std::size_t> at;      // 0-based, may exceed the length when extending
  std::vector<std::string> new_names;  // names for positions created by string subscripts
};

Positions resolve_positions(const Value& idx, std::size_t n, const std::vector<std::string>& names,
                            bool extend) {
  Positions out;
  switch (idx.kind()) {
    case Kind::Null: return out;
    case Kind::Logical: {
      const auto& mask = idx.logicals();
      if (mask.empty()) return out;
      std::size_t len = std::max(n, mask.size());
      if (mask.size() > n && !extend) throw Error("subscript out of bounds");
      for (std::size_t i = 0; i < len; ++i) {
        if (mask[i % mask.size()]) out.at.push_back(i);
      }
      return out;
    }
    case Kind::Integer:
    case Kind::Double: {
      Value iv = coerce(idx.without_attributes(), Kind::Integer);
      const auto& xs = iv.integers();
      bool any_negative = std::any_of(xs.begin(), xs.end(), [](std::int64_t x) { return x < 0; });
      bool any_positive = std::any_of(xs.begin(), xs.end(), [](std::int64_t x) { return x > 0; });
      if (any_negative && any_positive) throw Error("can't mix positive and negative subscripts");
      if (any_negative) {
        std::vector<bool> drop(n, false);
        for (auto x : xs) {
          auto k = static_cast<std::size_t>(-x);
          if (x != 0 && k <= n) drop[k - 1] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (!drop[i]) out.at.push_back(i);
        }
        return out;
      }
      for (auto x : xs) {
        if (x == 0) continue;
        auto k = static_cast<std::size_t>(x - 1);
        if (k >= n && !extend) throw Error("subscript out of bounds");
        out.at.push_back(k);
      }
      return out;
    }
    case Kind::String: {
      std::size_t next = n;
      for (const auto& s : idx.strings()) {
        auto it = std::find(names.begin(), names.end(), s);
        if (it != names.end()) {
          out.at.push_back(static_cast<std::size_t>(it - names.begin()));
          continue;
        }
        auto created = std::find(out.new_names.begin(), out.new_names.end(), s);
        if (created != out.new_names.end()) {
          out.at.push_back(n + static_cast<std::size_t>(created - out.new_names.begin()));
          continue;
        }
        if (!extend) throw Error("subscript out of bounds");
        out.at.push_back(next++);
        out.new_names.push_back(s);
      }
      return out;
    }
    default: break;
  }
  throw Error("invalid subscript type '" + std::string(kind_name(idx.kind())) + "'");
}

std::size_t single_position(const Value& idx, const Value& obj, bool extend) {
  if (idx.length() != 1) {
    throw Error(idx.length() == 0 ? "subscript of length zero" : "subscript must select exactly one element");
  }
  if (idx.kind() == Kind::String) {
    auto names = obj.names();
    auto it = std::find(names.begin(), names.end(), idx.strings()[0]);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    if (!extend) throw Error("subscript out of bounds");
    return obj.length();
  }
  if (!idx.is_numeric() || idx.kind() == Kind::Logical) throw Error("invalid subscript type");
  std::int64_t k = as_integer_scalar(idx, "subscript");
  if (k < 1) throw Error("invalid subscript " + std::to_string(k));
  auto pos = static_cast<std::size_t>(k - 1);
  if (pos >= obj.length() && !extend) throw Error("subscript out of bounds");
  return pos;
}

template <class T>
T zero_of() {
  if constexpr (std::is_same_v<T, Value>) {
    return Value();
  } else {
    return T{};
  }
}

Value env_element(const Value& env_value, const Value& idx) {
  std::string name = as_string_scalar(idx, "name");
  const Binding* b = env_value.environment_data()->find_local(name);
  if (b == nullptr) return Value();
  if (!b->is_immediate()) throw Error("binding '" + name + "' is not an immediate value");
  return std::get<Value>(b->slot);
}

}  // namespace

Value index_get(const Value& obj, const std::vector<Value>& indices, bool element) {
  if (indices.empty()) {
    if (element) throw Error("invalid subscript: [[ ]] needs an index");
    return obj;
  }
  if (indices.size() > 1) throw Error("incorrect number of dimensions");
  const Value& idx = indices[0];
  if (obj.is_null()) return Value();
  if (obj.kind() == Kind::Environment && element) return env_element(obj, idx);
  if (!is_vector(obj)) {
    throw Error("object of type '" + std::string(kind_name(obj.kind())) + "' is not subsettable");
  }
  if (element) {
    if (obj.kind() == Kind::List && idx.kind() == Kind::String && idx.length() == 1) {
      auto names = obj.names();
      auto it = std::find(names.begin(), names.end(), idx.strings()[0]);
      if (it == names.end()) return Value();
      return obj.elements()[static_cast<std::size_t>(it - names.begin())];
    }
    std::size_t pos = single_position(idx, obj, false);
    if (obj.kind() == Kind::List) return obj.elements()[pos];
    return element_at(obj, pos);
  }
  auto names = obj.names();
  Positions p = resolve_positions(idx, obj.length(), names, false);
  return by_kind(obj.kind(), [&]<class T>(std::type_identity<T>) -> Value {
    const auto& src = items<T>(obj);
    std::vector<T> out;
    out.reserve(p.at.size());
    for (auto i : p.at) out.push_back(src[i]);
    Value r = make(std::move(out));
    if (!names.empty()) {
      std::vector<std::string> picked;
      for (auto i : p.at) picked.push_back(names[i]);
      r = r.with_attribute("names", Value::str(std::move(picked)));
    }
    return r;
  });
}

Value index_set(const Value& obj, const std::vector<Value>& indices, bool element, const Value& v) {
  if (indices.size() != 1) {
    throw Error(indices.empty() ? "missing subscript in assignment" : "incorrect number of subscripts");
  }
  const Value& idx = indices[0];
  if (obj.kind() == Kind::Environment) {
    if (!element) throw Error("object of type 'environment' is not subsettable");
    obj.environment_data()->define_value(as_string_scalar(idx, "name"), v);
    return obj;
  }
  Value base = obj;
  if (base.is_null()) {
    if (v.is_null()) return Value();
    bool as_list = v.kind() == Kind::List || !v.is_atomic() || (element && v.length() != 1);
    base = as_list ? Value::list({}) : coerce(Value(), v.kind());
  }
  if (!is_vector(base)) {
    throw Error("object of type '" + std::string(kind_name(base.kind())) + "' is not subsettable");
  }

  Kind target = base.kind();
  if (element) {
    if (target != Kind::List) {
      if (v.kind() == Kind::List || !v.is_atomic()) {
        target = Kind::List;
      } else {
        if (v.length() != 1) throw Error("more elements supplied than there are to replace");
        if (kind_rank(v.kind()) > kind_rank(target)) target = v.kind();
      }
    }
  } else if (target != Kind::List) {
    if (v.kind() == Kind::List || (!v.is_atomic() && !v.is_null())) {
      target = Kind::List;
    } else if (!v.is_null() && kind_rank(v.kind()) > kind_rank(target)) {
      target = v.kind();
    }
  }
  Value attrs_source = base;
  Value work = coerce(base, target);
  std::vector<std::string> names = base.names();
  std::size_t n = work.length();

  // [[<- NULL on a list removes the element; [<- NULL removes selected ones.
  if (target == Kind::List && v.is_null()) {
    std::vector<std::size_t> drop;
    if (element) {
      if (idx.kind() == Kind::String) {
        auto it = std::find(names.begin(), names.end(), as_string_scalar(idx, "name"));
        if (it == names.end()) return base;
        drop.push_back(static_cast<std::size_t>(it - names.begin()));
      } else {
        std::size_t pos = single_position(idx, work, true);
        if (pos >= n) return base;
        drop.push_back(pos);
      }
    } else {
      for (auto i : resolve_positions(idx, n, names, true).at) {
        if (i < n) drop.push_back(i);
      }
    }
    std::vector<Value> kept;
    std::vector<std::string> kept_names;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(drop.begin(), drop.end(), i) != drop.end()) continue;
      kept.push_back(work.elements()[i]);
      if (!names.empty()) kept_names.push_back(names[i]);
    }
    Value r = Value::list(std::move(kept)).with_attributes(work.attributes());
    return r.with_attribute("names", names.empty() ? Value() : Value::str(std::move(kept_names)));
  }

  Positions p;
  if (element) {
    std::size_t pos = single_position(idx, work, true);
    p.at.push_back(pos);
    if (pos >= n && idx.kind() == Kind::String) p.new_names.push_back(idx.strings()[0]);
  } else {
    p = resolve_positions(idx, n, names, true);
  }
  if (p.at.empty()) return work;

  Value source;
  if (target == Kind::List) {
    source = element ? Value::list({v}) : coerce(v.without_attributes(), Kind::List);
  } else {
    source = coerce(v.without_attributes(), target);
  }
  if (source.length() == 0) throw Error("replacement has length zero");

  std::size_t max_pos = *std::max_element(p.at.begin(), p.at.end());
  std::size_t new_len = std::max(n, max_pos + 1);
  Value result = by_kind(target, [&]<class T>(std::type_identity<T>) -> Value {
    std::vector<T> dst = items<T>(work);
    dst.resize(new_len, zero_of<T>());
    const auto& src = items<T>(source);
    for (std::size_t i = 0; i < p.at.size(); ++i) dst[p.at[i]] = src[i % src.size()];
    return make(std::move(dst));
  });
  result = result.with_attributes(work.attributes());
  if (new_len > n && (!names.empty() || !p.new_names.empty())) {
    names.resize(new_len);
    std::size_t k = 0;
    for (std::size_t i = n; i < new_len && k < p.new_names.size(); ++i) names[i] = p.new_names[k++];
    result = result.with_attribute("names", Value::str(std::move(names)));
  }
  return result;
}

// -- fields ----------------------------------------------------------------

Value list_set_field(const Value& list, const std::string& name, const Value& v) {
  Value base = list.is_null() ? Value::list({}) : list;
  if (base.kind() != Kind::List) base = coerce(base, Kind::List);
  return index_set(base, {Value::str(name)}, true, v);
}

Value field_get(Interpreter& interp, const Value& obj, const std::string& name) {
  switch (obj.kind()) {
    case Kind::Null: return Value();
    case Kind::List: return index_get(obj, {Value::str(name)}, true);
    case Kind::Environment: {
      Binding* b = obj.environment_data()->find_local(name);
      if (b == nullptr) return Value();
      return interp.read_binding(*b, name);
    }
    case Kind::RefInstance: return refclass::field_get(interp, obj, name);
    case Kind::Builtin:
      if (refclass::is_generator(obj)) return refclass::generator_member(interp, obj, name);
      break;
    case Kind::S4Instance: throw Error("$ operator not defined for this S4 class");
    default: break;
  }
  if (obj.is_atomic()) throw Error("$ operator is invalid for atomic vectors");
  throw Error("object of type '" + std::string(kind_name(obj.kind())) + "' is not subsettable");
}

Value field_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v) {
  switch (obj.kind()) {
    case Kind::Null:
    case Kind::List: return list_set_field(obj, name, v);
    case Kind::Environment: interp.write_binding(*obj.environment_data(), name, v); return obj;
    case Kind::RefInstance: refclass::field_set(interp, obj, name, v); return obj;
    case Kind::S4Instance: throw Error("no '$<-' method for this S4 class");
    default: break;
  }
  if (obj.is_atomic()) {
    // As in the host language, `$<-` on an atomic vector turns it into a list.
    return list_set_field(coerce(obj, Kind::List), name, v);
  }
  throw Error("invalid '$<-' target of type '" + std::string(kind_name(obj.kind())) + "'");
}

// -- c() -------------------------------------------------------------------

Value combine(const std::vector<NamedValue>& args) {
  Kind target = Kind::Null;
  bool any_names = false;
  for (const auto& a : args) {
    const Value& v = a.value;
    if (v.is_null()) continue;
    Kind k = is_vector(v) ? v.kind() : Kind::List;
    if (kind_rank(k) > kind_rank(target)) target = k;
    if (a.name || v.has_attribute("names")) any_names = true;
  }
  if (target == Kind::Null) return Value();

  std::vector<std::string> names;
  Value result = by_kind(target, [&]<class T>(std::type_identity<T>) -> Value {
    std::vector<T> out;
    for (const auto& a : args) {
      const Value& v = a.value;
      if (v.is_null()) continue;
      std::vector<std::string> vn = v.names();
      std::size_t len;
      if constexpr (std::is_same_v<T, Value>) {
        if (!is_vector(v)) {
          out.push_back(v);
          len = 1;
        } else {
          Value c = coerce(v.without_attributes(), Kind::List);
          for (const auto& e : c.elements()) out.push_back(e);
          len = c.length();
        }
      } else {
        Value c = coerce(v.without_attributes(), target);
        for (const auto& e : items<T>(c)) out.push_back(e);
        len = c.length();
      }
      if (any_names) {
        for (std::size_t i = 0; i < len; ++i) {
          std::string nm;
          if (a.name && len == 1) {
            nm = *a.name;
          } else if (a.name) {
            nm = *a.name + (vn.empty() || vn[i].empty() ? std::to_string(i + 1) : "." + vn[i]);
          } else if (!vn.empty()) {
            nm = vn[i];
          }
          names.push_back(std::move(nm));
        }
      }
    }
    return make(std::move(out));
  });
  if (any_names) result = result.with_attribute("names", Value::str(std::move(names)));
  return result;
}

}  // namespace mls::ops
