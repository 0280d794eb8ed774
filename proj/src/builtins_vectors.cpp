// Vector construction, arithmetic summaries, coercion, strings and
// attribute builtins.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "builtins.hpp"
#include "mls/error.hpp"
#include "mls/printer.hpp"
#include "mls/s3.hpp"
#include "ops.hpp"

namespace mls::builtins {

namespace {

using Args = std::vector<NamedValue>;

Value one(const Args& args, const CallContext& ctx, std::string_view formal = "x") {
  return required(bind(args, {formal}, ctx.name), 0, formal);
}

std::size_t count_arg(const Value& v, std::string_view what) {
  std::int64_t n = as_integer_scalar(v, what);
  if (n < 0) throw Error("invalid '" + std::string(what) + "' argument");
  return static_cast<std::size_t>(n);
}

Value numeric_map(const Value& x, double (*fn)(double), const std::string& name) {
  if (!x.is_numeric()) throw Error("non-numeric argument to mathematical function " + name);
  Value d = ops::coerce_plain(x, Kind::Double);
  std::vector<double> out = d.doubles();
  for (auto& v : out) v = fn(v);
  Value r = Value::dbl(std::move(out));
  return x.has_attribute("names") ? r.with_attribute("names", x.attribute("names")) : r;
}

Value combined(const Args& args) {
  std::vector<NamedValue> plain;
  for (const auto& a : args) plain.push_back({std::nullopt, a.value.without_attributes()});
  return ops::combine(plain);
}

void require_numeric(const Value& v, const std::string& fn) {
  if (!(v.is_numeric() || v.is_null())) throw Error("invalid 'type' (" + std::string(kind_name(v.kind())) + ") of argument to " + fn);
}

Value summary_extreme(Interpreter& in, const Args& args, bool want_max) {
  Value all = combined(args);
  std::string fn = want_max ? "max" : "min";
  if (all.kind() == Kind::String) {
    if (all.length() == 0) throw Error("no non-missing arguments to " + fn);
    const auto& s = all.strings();
    return Value::str(want_max ? *std::max_element(s.begin(), s.end()) : *std::min_element(s.begin(), s.end()));
  }
  require_numeric(all, fn);
  if (all.length() == 0) {
    in.warn("no non-missing arguments to " + fn + "; returning " + (want_max ? "-Inf" : "Inf"));
    return Value::dbl(want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
  }
  if (all.kind() == Kind::Double) {
    const auto& d = all.doubles();
    return Value::dbl(want_max ? *std::max_element(d.begin(), d.end()) : *std::min_element(d.begin(), d.end()));
  }
  Value i = ops::coerce(all, Kind::Integer);
  const auto& d = i.integers();
  return Value::integer(want_max ? *std::max_element(d.begin(), d.end()) : *std::min_element(d.begin(), d.end()));
}

std::vector<std::size_t> ordering(const Value& x, bool decreasing) {
  std::vector<std::size_t> idx(x.length());
  std::iota(idx.begin(), idx.end(), 0);
  if (x.kind() == Kind::String) {
    const auto& s = x.strings();
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return decreasing ? s[b] < s[a] : s[a] < s[b];
    });
  } else {
    Value d = ops::coerce_plain(x, Kind::Double);
    const auto& v = d.doubles();
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return decreasing ? v[b] < v[a] : v[a] < v[b];
    });
  }
  return idx;
}

Value positions_value(const std::vector<std::size_t>& idx) {
  std::vector<std::int64_t> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(static_cast<std::int64_t>(i + 1));
  return Value::integer(std::move(out));
}

Value paste_impl(const Args& args, const std::string& default_sep) {
  std::string sep = default_sep;
  std::optional<std::string> collapse;
  std::vector<std::vector<std::string>> parts;
  for (const auto& a : args) {
    if (a.name && *a.name == "sep") {
      sep = as_string_scalar(a.value, "sep");
    } else if (a.name && *a.name == "collapse") {
      if (!a.value.is_null()) collapse = as_string_scalar(a.value, "collapse");
    } else {
      parts.push_back(as_character(a.value));
    }
  }
  std::size_t n = 0;
  for (const auto& p : parts) n = std::max(n, p.size());
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool first = true;
    for (const auto& p : parts) {
      if (!first) out[i] += sep;
      first = false;
      if (!p.empty()) out[i] += p[i % p.size()];
    }
  }
  if (collapse) {
    std::string joined;
    for (std::size_t i = 0; i < out.size(); ++i) joined += (i ? *collapse : "") + out[i];
    return Value::str(joined);
  }
  return Value::str(std::move(out));
}

std::string sprintf_one(const std::string& fmt, const std::vector<Value>& vals, std::size_t row) {
  std::string out;
  std::size_t next_arg = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out += fmt[i];
      continue;
    }
    if (i + 1 < fmt.size() && fmt[i + 1] == '%') {
      out += '%';
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < fmt.size() && std::string_view("-+ #0123456789.").find(fmt[j]) != std::string_view::npos) ++j;
    if (j >= fmt.size()) throw Error("unrecognised format specification '" + fmt.substr(i) + "'");
    char conv = fmt[j];
    std::string spec = fmt.substr(i, j - i);
    if (next_arg >= vals.size()) throw Error("too few arguments");
    const Value& v = vals[next_arg++];
    if (v.length() == 0) return "";
    char buf[512];
    switch (conv) {
      case 'd':
      case 'i': {
        Value iv = ops::coerce_plain(v, Kind::Integer);
        std::snprintf(buf, sizeof buf, (spec + "lld").c_str(), static_cast<long long>(iv.integers()[row % v.length()]));
        break;
      }
      case 'f':
      case 'e':
      case 'g': {
        Value dv = ops::coerce_plain(v, Kind::Double);
        std::snprintf(buf, sizeof buf, (spec + conv).c_str(), dv.doubles()[row % v.length()]);
        break;
      }
      case 's': {
        std::string s = as_character(v)[row % v.length()];
        std::snprintf(buf, sizeof buf, (spec + "s").c_str(), s.c_str());
        break;
      }
      default: throw Error(std::string("unrecognised format conversion '%") + conv + "'");
    }
    out += buf;
    i = j;
  }
  return out;
}

Value apply_over(Interpreter& in, const Args& args, const CallContext& ctx, bool simplify) {
  std::optional<Value> x;
  std::optional<Value> fn;
  std::vector<NamedValue> extra;
  for (const auto& a : args) {
    if (a.name && *a.name == "X") {
      x = a.value;
    } else if (a.name && *a.name == "FUN") {
      fn = a.value;
    } else if (!a.name && !x) {
      x = a.value;
    } else if (!a.name && !fn) {
      fn = a.value;
    } else {
      extra.push_back(a);
    }
  }
  if (!x) throw Error("argument \"X\" is missing, with no default");
  if (!fn) throw Error("argument \"FUN\" is missing, with no default");
  Value f = *fn;
  if (f.kind() == Kind::String) f = in.find_function(as_string_scalar(f, "FUN"), ctx.env);
  if (!f.is_function()) throw Error("'FUN' is not a function");
  Value xs = x->kind() == Kind::List ? *x : ops::coerce(x->is_null() ? Value::list({}) : *x, Kind::List);
  std::vector<Value> results;
  for (const auto& e : xs.elements()) {
    std::vector<NamedValue> call_args{{std::nullopt, e}};
    call_args.insert(call_args.end(), extra.begin(), extra.end());
    results.push_back(in.call_value(f, std::move(call_args), ctx.env, ctx.loc, "FUN"));
  }
  Value names = x->attribute("names");
  if (simplify && names.is_null() && x->kind() == Kind::String) names = x->without_attributes();
  bool scalars = simplify && !results.empty() && std::all_of(results.begin(), results.end(), [](const Value& v) {
    return v.is_atomic() && v.length() == 1;
  });
  Value out;
  if (scalars) {
    std::vector<NamedValue> parts;
    for (auto& r : results) parts.push_back({std::nullopt, r.without_attributes()});
    out = ops::combine(parts);
  } else {
    out = Value::list(std::move(results));
  }
  if (!names.is_null() && out.length() == names.length()) out = out.with_attribute("names", names);
  return out;
}

Value typed_vector(Kind k, std::size_t n) {
  switch (k) {
    case Kind::Logical: return Value::logical(std::vector<bool>(n, false));
    case Kind::Integer: return Value::integer(std::vector<std::int64_t>(n, 0));
    case Kind::Double: return Value::dbl(std::vector<double>(n, 0.0));
    case Kind::String: return Value::str(std::vector<std::string>(n));
    default: return Value::list(std::vector<Value>(n));
  }
}

Value head_tail(const Args& args, const CallContext& ctx, bool head) {
  auto b = bind(args, {"x", "n"}, ctx.name);
  Value x = required(b, 0, "x");
  std::int64_t n = as_integer_scalar(value_or(b, 1, Value::integer(6)), "n");
  auto len = static_cast<std::int64_t>(x.length());
  std::int64_t take = n >= 0 ? std::min(n, len) : std::max<std::int64_t>(len + n, 0);
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < take; ++i) idx.push_back(head ? i + 1 : len - take + i + 1);
  return ops::index_get(x, {Value::integer(std::move(idx))}, false);
}

}  // namespace

void install_vectors(Interpreter& interp) {
  interp.define_builtin("c", [](Interpreter&, Args& args, const CallContext&) { return ops::combine(args); });
  interp.define_builtin("list", [](Interpreter&, Args& args, const CallContext&) {
    std::vector<Value> elems;
    std::vector<std::string> names;
    bool named = false;
    for (const auto& a : args) {
      elems.push_back(a.value);
      names.push_back(a.name.value_or(""));
      named = named || a.name.has_value();
    }
    return named ? Value::list(std::move(elems), std::move(names)) : Value::list(std::move(elems));
  });
  interp.define_builtin("length", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() == Kind::Environment) return Value::integer(static_cast<std::int64_t>(x.environment_data()->frame().size()));
    return Value::integer(static_cast<std::int64_t>(x.length()));
  });
  interp.define_builtin("names", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() == Kind::Environment) return Value::str(x.environment_data()->names());
    return x.attribute("names");
  });
  interp.define_builtin("setNames", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"object", "nm"}, ctx.name);
    Value nm = value_or(b, 1, Value());
    if (!nm.is_null()) nm = ops::coerce_plain(nm, Kind::String).without_attributes();
    return set_attribute(required(b, 0, "object"), "names", nm);
  });

  for (auto [name, kind] : {std::pair{"numeric", Kind::Double}, std::pair{"double", Kind::Double},
                            std::pair{"integer", Kind::Integer}, std::pair{"character", Kind::String},
                            std::pair{"logical", Kind::Logical}}) {
    Kind k = kind;
    interp.define_builtin(name, [k](Interpreter&, Args& args, const CallContext& ctx) {
      auto b = bind(args, {"length"}, ctx.name);
      return typed_vector(k, count_arg(value_or(b, 0, Value::integer(0)), "length"));
    });
  }
  interp.define_builtin("vector", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"mode", "length"}, ctx.name);
    std::string mode = as_string_scalar(value_or(b, 0, Value::str("logical")), "mode");
    std::size_t n = count_arg(value_or(b, 1, Value::integer(0)), "length");
    if (mode == "list") return typed_vector(Kind::List, n);
    if (mode == "numeric" || mode == "double") return typed_vector(Kind::Double, n);
    if (mode == "integer") return typed_vector(Kind::Integer, n);
    if (mode == "character") return typed_vector(Kind::String, n);
    if (mode == "logical") return typed_vector(Kind::Logical, n);
    throw Error("vector: cannot make a vector of mode '" + mode + "'");
  });

  interp.define_builtin("seq_len", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::size_t n = count_arg(one(args, ctx, "length.out"), "length.out");
    std::vector<std::int64_t> out(n);
    std::iota(out.begin(), out.end(), 1);
    return Value::integer(std::move(out));
  });
  interp.define_builtin("seq_along", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::vector<std::int64_t> out(one(args, ctx, "along.with").length());
    std::iota(out.begin(), out.end(), 1);
    return Value::integer(std::move(out));
  });
  interp.define_builtin("seq", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"from", "to", "by", "length.out"}, ctx.name);
    Value from = value_or(b, 0, Value::integer(1));
    if (b[3]) {
      std::size_t n = count_arg(*b[3], "length.out");
      double f = as_double_scalar(from, "from");
      double step = b[2] ? as_double_scalar(*b[2], "by") : 1.0;
      if (b[1] && !b[2] && n > 1) step = (as_double_scalar(*b[1], "to") - f) / static_cast<double>(n - 1);
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = f + step * static_cast<double>(i);
      return Value::dbl(std::move(out));
    }
    Value to = value_or(b, 1, Value::integer(1));
    if (!b[2]) return ops::range(from, to);
    double f = as_double_scalar(from, "from");
    double t = as_double_scalar(to, "to");
    double by = as_double_scalar(*b[2], "by");
    if (by == 0 || (t - f) * by < 0) {
      if (f == t) return from;
      throw Error("wrong sign in 'by' argument");
    }
    auto n = static_cast<std::size_t>(std::floor((t - f) / by + 1e-10)) + 1;
    bool integral = from.kind() != Kind::Double && b[2]->kind() != Kind::Double;
    if (integral) {
      std::vector<std::int64_t> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int64_t>(f + by * static_cast<double>(i));
      return Value::integer(std::move(out));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f + by * static_cast<double>(i);
    return Value::dbl(std::move(out));
  });
  interp.define_builtin("rep", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "times", "each"}, ctx.name);
    Value x = required(b, 0, "x");
    std::size_t each = count_arg(value_or(b, 2, Value::integer(1)), "each");
    Value times = value_or(b, 1, Value::integer(1));
    std::vector<std::int64_t> idx;
    for (std::size_t i = 0; i < x.length(); ++i) {
      for (std::size_t k = 0; k < each; ++k) idx.push_back(static_cast<std::int64_t>(i + 1));
    }
    std::vector<std::int64_t> out;
    if (times.length() == 1) {
      std::size_t t = count_arg(times, "times");
      for (std::size_t r = 0; r < t; ++r) out.insert(out.end(), idx.begin(), idx.end());
    } else {
      if (times.length() != idx.size()) throw Error("invalid 'times' argument");
      Value ti = ops::coerce_plain(times, Kind::Integer);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::int64_t r = 0; r < ti.integers()[i]; ++r) out.push_back(idx[i]);
      }
    }
    return ops::index_get(x.without_attributes(), {Value::integer(std::move(out))}, false);
  });
  interp.define_builtin("rev", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    std::vector<std::int64_t> idx(x.length());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::int64_t>(idx.size() - i);
    return ops::index_get(x, {Value::integer(std::move(idx))}, false);
  });
  interp.define_builtin("head", [](Interpreter&, Args& args, const CallContext& ctx) { return head_tail(args, ctx, true); });
  interp.define_builtin("tail", [](Interpreter&, Args& args, const CallContext& ctx) { return head_tail(args, ctx, false); });
  interp.define_builtin("sort", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "decreasing"}, ctx.name);
    Value x = required(b, 0, "x");
    bool dec = as_logical_scalar(value_or(b, 1, Value::logical(false)), "decreasing");
    return ops::index_get(x, {positions_value(ordering(x, dec))}, false);
  });
  interp.define_builtin("order", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "decreasing"}, ctx.name);
    bool dec = as_logical_scalar(value_or(b, 1, Value::logical(false)), "decreasing");
    return positions_value(ordering(required(b, 0, "x"), dec));
  });
  interp.define_builtin("unique", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx).without_attributes();
    std::vector<std::int64_t> keep;
    for (std::size_t i = 0; i < x.length(); ++i) {
      Value xi = ops::element_at(x, i);
      bool seen = false;
      for (auto k : keep) seen = seen || structurally_equal(ops::element_at(x, static_cast<std::size_t>(k - 1)), xi);
      if (!seen) keep.push_back(static_cast<std::int64_t>(i + 1));
    }
    return ops::index_get(x, {Value::integer(std::move(keep))}, false);
  });
  interp.define_builtin("unlist", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() != Kind::List) return x;
    std::vector<NamedValue> parts;
    auto names = x.names();
    for (std::size_t i = 0; i < x.length(); ++i) {
      std::optional<std::string> n;
      if (!names.empty() && !names[i].empty()) n = names[i];
      const Value& e = x.elements()[i];
      parts.push_back({n, e.kind() == Kind::List ? e : e.without_attributes().with_attribute("names", e.attribute("names"))});
    }
    Value r = ops::combine(parts);
    while (r.kind() == Kind::List && std::any_of(r.elements().begin(), r.elements().end(), [](const Value& v) { return v.kind() == Kind::List; })) {
      std::vector<NamedValue> again;
      for (const auto& e : r.elements()) again.push_back({std::nullopt, e});
      r = ops::combine(again);
    }
    return r;
  });
  interp.define_builtin("lapply", [](Interpreter& in, Args& args, const CallContext& ctx) { return apply_over(in, args, ctx, false); });
  interp.define_builtin("sapply", [](Interpreter& in, Args& args, const CallContext& ctx) { return apply_over(in, args, ctx, true); });

  // -- numeric summaries ---------------------------------------------------
  interp.define_builtin("sum", [](Interpreter&, Args& args, const CallContext&) {
    Value all = combined(args);
    require_numeric(all, "sum");
    if (all.kind() == Kind::Double) {
      double s = 0;
      for (double d : all.doubles()) s += d;
      return Value::dbl(s);
    }
    std::int64_t s = 0;
    Value ints = ops::coerce(all, Kind::Integer);
    for (auto i : ints.integers()) s += i;
    return Value::integer(s);
  });
  interp.define_builtin("prod", [](Interpreter&, Args& args, const CallContext&) {
    Value all = combined(args);
    require_numeric(all, "prod");
    double p = 1;
    Value dbls = ops::coerce(all, Kind::Double);
    for (double d : dbls.doubles()) p *= d;
    return Value::dbl(p);
  });
  interp.define_builtin("mean", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    require_numeric(x, "mean");
    Value d = ops::coerce_plain(x, Kind::Double);
    if (d.length() == 0) return Value::dbl(std::nan(""));
    double s = 0;
    for (double v : d.doubles()) s += v;
    return Value::dbl(s / static_cast<double>(d.length()));
  });
  interp.define_builtin("cumsum", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    require_numeric(x, "cumsum");
    if (x.kind() == Kind::Double) {
      std::vector<double> out = x.doubles();
      for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
      return Value::dbl(std::move(out));
    }
    std::vector<std::int64_t> out = ops::coerce_plain(x, Kind::Integer).integers();
    for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
    return Value::integer(std::move(out));
  });
  interp.define_builtin("max", [](Interpreter& in, Args& args, const CallContext&) { return summary_extreme(in, args, true); });
  interp.define_builtin("min", [](Interpreter& in, Args& args, const CallContext&) { return summary_extreme(in, args, false); });

  struct MathFn {
    const char* name;
    double (*fn)(double);
  };
  for (MathFn m : {MathFn{"sqrt", [](double x) { return std::sqrt(x); }}, MathFn{"exp", [](double x) { return std::exp(x); }},
                   MathFn{"floor", [](double x) { return std::floor(x); }}, MathFn{"ceiling", [](double x) { return std::ceil(x); }},
                   MathFn{"trunc", [](double x) { return std::trunc(x); }}, MathFn{"log10", [](double x) { return std::log10(x); }},
                   MathFn{"sign", [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }}}) {
    std::string name = m.name;
    auto fn = m.fn;
    interp.define_builtin(name, [name, fn](Interpreter&, Args& args, const CallContext& ctx) {
      return numeric_map(one(args, ctx), fn, name);
    });
  }
  interp.define_builtin("abs", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() == Kind::Integer || x.kind() == Kind::Logical) {
      std::vector<std::int64_t> out = ops::coerce_plain(x, Kind::Integer).integers();
      for (auto& v : out) v = v < 0 ? -v : v;
      return Value::integer(std::move(out));
    }
    return numeric_map(x, [](double v) { return std::fabs(v); }, "abs");
  });
  interp.define_builtin("log", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "base"}, ctx.name);
    Value r = numeric_map(required(b, 0, "x"), [](double v) { return std::log(v); }, "log");
    if (!b[1]) return r;
    double denom = std::log(as_double_scalar(*b[1], "base"));
    std::vector<double> out = r.doubles();
    for (auto& v : out) v /= denom;
    return Value::dbl(std::move(out)).with_attributes(r.attributes());
  });
  interp.define_builtin("round", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "digits"}, ctx.name);
    Value x = required(b, 0, "x");
    if (x.kind() == Kind::Integer || x.kind() == Kind::Logical) return x;
    double scale = std::pow(10.0, static_cast<double>(as_integer_scalar(value_or(b, 1, Value::integer(0)), "digits")));
    Value d = ops::coerce_plain(x, Kind::Double);
    std::vector<double> out = d.doubles();
    for (auto& v : out) v = std::nearbyint(v * scale) / scale;
    return Value::dbl(std::move(out)).with_attributes(d.attributes());
  });

  // -- logical summaries ---------------------------------------------------
  interp.define_builtin("all", [](Interpreter&, Args& args, const CallContext&) {
    Value l = ops::coerce(combined(args), Kind::Logical);
    const auto& v = l.logicals();
    return Value::logical(std::all_of(v.begin(), v.end(), [](bool b) { return b; }));
  });
  interp.define_builtin("any", [](Interpreter&, Args& args, const CallContext&) {
    Value l = ops::coerce(combined(args), Kind::Logical);
    const auto& v = l.logicals();
    return Value::logical(std::any_of(v.begin(), v.end(), [](bool b) { return b; }));
  });
  interp.define_builtin("which", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() != Kind::Logical) throw Error("argument to 'which' is not logical");
    std::vector<std::int64_t> out;
    std::vector<std::string> names;
    auto xn = x.names();
    for (std::size_t i = 0; i < x.length(); ++i) {
      if (!x.logicals()[i]) continue;
      out.push_back(static_cast<std::int64_t>(i + 1));
      if (!xn.empty()) names.push_back(xn[i]);
    }
    Value r = Value::integer(std::move(out));
    return xn.empty() ? r : r.with_attribute("names", Value::str(std::move(names)));
  });
  interp.define_builtin("identical", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "y"}, ctx.name);
    return Value::logical(structurally_equal(required(b, 0, "x"), required(b, 1, "y")));
  });

  // -- type predicates and coercion ----------------------------------------
  struct Predicate {
    const char* name;
    bool (*test)(const Value&);
  };
  for (Predicate p : {
           Predicate{"is.null", [](const Value& v) { return v.is_null(); }},
           Predicate{"is.numeric", [](const Value& v) { return v.kind() == Kind::Integer || v.kind() == Kind::Double; }},
           Predicate{"is.double", [](const Value& v) { return v.kind() == Kind::Double; }},
           Predicate{"is.integer", [](const Value& v) { return v.kind() == Kind::Integer; }},
           Predicate{"is.character", [](const Value& v) { return v.kind() == Kind::String; }},
           Predicate{"is.logical", [](const Value& v) { return v.kind() == Kind::Logical; }},
           Predicate{"is.list", [](const Value& v) { return v.kind() == Kind::List; }},
           Predicate{"is.function", [](const Value& v) { return v.is_function(); }},
           Predicate{"is.environment", [](const Value& v) { return v.kind() == Kind::Environment; }},
           Predicate{"is.atomic", [](const Value& v) { return v.is_atomic(); }},
           Predicate{"is.object", [](const Value& v) { return v.is_object(); }},
       }) {
    auto test = p.test;
    interp.define_builtin(p.name, [test](Interpreter&, Args& args, const CallContext& ctx) {
      return Value::logical(test(one(args, ctx)));
    });
  }
  for (auto [name, kind] : {std::pair{"as.numeric", Kind::Double}, std::pair{"as.double", Kind::Double},
                            std::pair{"as.integer", Kind::Integer}, std::pair{"as.character", Kind::String},
                            std::pair{"as.logical", Kind::Logical}}) {
    Kind k = kind;
    interp.define_builtin(name, [k](Interpreter&, Args& args, const CallContext& ctx) {
      Value x = one(args, ctx);
      return ops::coerce(x, k).without_attributes();
    });
  }
  interp.define_builtin("as.list", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx);
    if (x.kind() == Kind::Environment) {
      std::vector<Value> elems;
      std::vector<std::string> names;
      for (const auto& [n, b] : x.environment_data()->frame()) {
        if (!b.is_immediate()) continue;
        names.push_back(n);
        elems.push_back(std::get<Value>(b.slot));
      }
      return Value::list(std::move(elems), std::move(names));
    }
    return ops::coerce_plain(x, Kind::List);
  });
  interp.define_builtin("typeof", [](Interpreter&, Args& args, const CallContext& ctx) {
    return Value::str(std::string(kind_name(one(args, ctx).kind())));
  });

  // -- strings ---------------------------------------------------------------
  interp.define_builtin("paste", [](Interpreter&, Args& args, const CallContext&) { return paste_impl(args, " "); });
  interp.define_builtin("paste0", [](Interpreter&, Args& args, const CallContext&) { return paste_impl(args, ""); });
  interp.define_builtin("nchar", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::vector<std::int64_t> out;
    for (const auto& s : as_character(one(args, ctx))) out.push_back(static_cast<std::int64_t>(s.size()));
    return Value::integer(std::move(out));
  });
  interp.define_builtin("toupper", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::vector<std::string> out = as_character(one(args, ctx));
    for (auto& s : out) std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return Value::str(std::move(out));
  });
  interp.define_builtin("tolower", [](Interpreter&, Args& args, const CallContext& ctx) {
    std::vector<std::string> out = as_character(one(args, ctx));
    for (auto& s : out) std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return Value::str(std::move(out));
  });
  interp.define_builtin("substr", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "start", "stop"}, ctx.name);
    auto start = as_integer_scalar(required(b, 1, "start"), "start");
    auto stop = as_integer_scalar(required(b, 2, "stop"), "stop");
    std::vector<std::string> out = as_character(required(b, 0, "x"));
    for (auto& s : out) {
      auto from = static_cast<std::size_t>(std::max<std::int64_t>(start, 1) - 1);
      auto to = static_cast<std::size_t>(std::clamp<std::int64_t>(stop, 0, static_cast<std::int64_t>(s.size())));
      s = from < to ? s.substr(from, to - from) : "";
    }
    return Value::str(std::move(out));
  });
  interp.define_builtin("sprintf", [](Interpreter&, Args& args, const CallContext&) {
    if (args.empty()) throw Error("'fmt' argument is missing");
    std::string fmt = as_string_scalar(args[0].value, "fmt");
    std::vector<Value> vals;
    std::size_t n = 1;
    for (std::size_t i = 1; i < args.size(); ++i) {
      vals.push_back(args[i].value);
      if (args[i].value.length() == 0) n = 0;
      n = n == 0 ? 0 : std::max(n, args[i].value.length());
    }
    std::vector<std::string> out;
    for (std::size_t row = 0; row < n; ++row) out.push_back(sprintf_one(fmt, vals, row));
    return Value::str(std::move(out));
  });
  interp.define_builtin("format", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "nsmall"}, ctx.name);
    Value x = required(b, 0, "x");
    if (x.kind() == Kind::Double) {
      std::vector<std::string> out = format_doubles(x.doubles());
      if (b[1]) {
        auto nsmall = as_integer_scalar(*b[1], "nsmall");
        for (std::size_t i = 0; i < out.size(); ++i) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.*f", static_cast<int>(nsmall), x.doubles()[i]);
          auto dot = out[i].find('.');
          std::size_t have = dot == std::string::npos ? 0 : out[i].size() - dot - 1;
          if (have < static_cast<std::size_t>(nsmall) && out[i].find('e') == std::string::npos) out[i] = buf;
        }
      }
      return Value::str(std::move(out));
    }
    return Value::str(as_character(x));
  });

  // -- attributes --------------------------------------------------------------
  interp.define_builtin("attr", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "which"}, ctx.name);
    return get_attribute(required(b, 0, "x"), as_string_scalar(required(b, 1, "which"), "which"));
  });
  interp.define_builtin("set_attr", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "which", "value"}, ctx.name);
    return set_attribute(required(b, 0, "x"), as_string_scalar(required(b, 1, "which"), "which"), value_or(b, 2, Value()));
  });
  interp.define_builtin("attributes", [](Interpreter&, Args& args, const CallContext& ctx) {
    Value x = one(args, ctx, "obj");
    if (x.attributes().empty()) return Value();
    std::vector<Value> vals;
    std::vector<std::string> names;
    for (const auto& [n, v] : x.attributes()) {
      names.push_back(n);
      vals.push_back(v);
    }
    return Value::list(std::move(vals), std::move(names));
  });
  interp.define_builtin("structure", [](Interpreter&, Args& args, const CallContext&) {
    if (args.empty()) throw Error("argument \".Data\" is missing, with no default");
    Value x = args[0].value;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (!args[i].name) throw Error("attributes in structure() must be named");
      std::string name = *args[i].name == ".Names" ? "names" : *args[i].name;
      x = set_attribute(x, name, args[i].value);
    }
    return x;
  });
  interp.define_builtin("class", [](Interpreter&, Args& args, const CallContext& ctx) {
    return Value::str(implicit_class(one(args, ctx)));
  });
  interp.define_builtin("oldClass", [](Interpreter&, Args& args, const CallContext& ctx) {
    return one(args, ctx).attribute("class");
  });
  interp.define_builtin("set_class", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "value"}, ctx.name);
    return set_attribute(required(b, 0, "x"), "class", value_or(b, 1, Value()));
  });
  interp.define_builtin("unclass", [](Interpreter&, Args& args, const CallContext& ctx) {
    return one(args, ctx).with_attribute("class", Value());
  });
  interp.define_builtin("inherits", [](Interpreter&, Args& args, const CallContext& ctx) {
    auto b = bind(args, {"x", "what", "which"}, ctx.name);
    Value x = required(b, 0, "x");
    Value what = required(b, 1, "what");
    if (what.kind() != Kind::String) throw Error("'what' must be a character vector");
    bool which = as_logical_scalar(value_or(b, 2, Value::logical(false)), "which");
    std::vector<std::string> cls = implicit_class(x);
    if (which) {
      std::vector<std::int64_t> out;
      for (const auto& w : what.strings()) {
        auto it = std::find(cls.begin(), cls.end(), w);
        out.push_back(it == cls.end() ? 0 : static_cast<std::int64_t>(it - cls.begin() + 1));
      }
      return Value::integer(std::move(out));
    }
    for (const auto& w : what.strings()) {
      if (s3::inherits(x, w)) return Value::logical(true);
    }
    return Value::logical(false);
  });
}

}  // namespace mls::builtins
