#include "mls/printer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/reader.hpp"

namespace mls {

namespace {

constexpr std::size_t kWidth = 80;
constexpr int kDigits = 7;

std::string non_finite(double d) {
  if (std::isnan(d)) return "NaN";
  return d > 0 ? "Inf" : "-Inf";
}

std::string printf_double(const char* fmt, int prec, double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, prec, d);
  return buf;
}

/// Significant digits (<= kDigits) needed to show d exactly at kDigits
/// precision, and its decimal exponent after rounding.
std::pair<int, int> significance(double d) {
  if (d == 0) return {1, 0};
  std::string full = printf_double("%.*e", kDigits - 1, d);
  auto epos = full.find('e');
  int exponent = std::stoi(full.substr(epos + 1));
  std::string mantissa = full.substr(0, epos);
  mantissa.erase(std::remove(mantissa.begin(), mantissa.end(), '.'), mantissa.end());
  if (!mantissa.empty() && mantissa[0] == '-') mantissa.erase(0, 1);
  int sig = static_cast<int>(mantissa.size());
  while (sig > 1 && mantissa[static_cast<std::size_t>(sig - 1)] == '0') --sig;
  return {sig, exponent};
}

std::string sci(double d, int sig) {
  std::string s = printf_double("%.*e", std::max(sig - 1, 0), d);
  // Two-digit exponents, as in "1e+05".
  auto epos = s.find('e');
  std::string mant = s.substr(0, epos);
  char sign = s[epos + 1];
  std::string digits = s.substr(epos + 2);
  while (digits.size() > 2 && digits[0] == '0') digits.erase(0, 1);
  return mant + "e" + sign + digits;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::vector<std::string> element_strings(const Value& v, bool quote_strings) {
  std::vector<std::string> out;
  switch (v.kind()) {
    case Kind::Logical:
      for (bool b : v.logicals()) out.emplace_back(b ? "TRUE" : "FALSE");
      break;
    case Kind::Integer:
      for (auto i : v.integers()) out.push_back(std::to_string(i));
      break;
    case Kind::Double: out = format_doubles(v.doubles()); break;
    case Kind::String:
      for (const auto& s : v.strings()) out.push_back(quote_strings ? quote(s) : s);
      break;
    default: break;
  }
  return out;
}

std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string empty_vector(const Value& v) {
  switch (v.kind()) {
    case Kind::Logical: return "logical(0)\n";
    case Kind::Integer: return "integer(0)\n";
    case Kind::Double: return "numeric(0)\n";
    case Kind::String: return "character(0)\n";
    default: return "NULL\n";
  }
}

std::string format_atomic(const Value& v) {
  if (v.length() == 0) {
    if (v.has_attribute("names")) return "named " + empty_vector(v);
    return empty_vector(v);
  }
  std::vector<std::string> cells = element_strings(v, true);
  std::size_t width = 0;
  for (const auto& c : cells) width = std::max(width, c.size());
  std::ostringstream os;
  std::vector<std::string> names = v.names();
  if (!names.empty()) {
    for (const auto& n : names) width = std::max(width, n.size());
    std::size_t per_line = std::max<std::size_t>(1, (kWidth + 1) / (width + 1));
    for (std::size_t start = 0; start < cells.size(); start += per_line) {
      std::size_t end = std::min(cells.size(), start + per_line);
      std::string head;
      std::string body;
      for (std::size_t i = start; i < end; ++i) {
        head += pad_left(names[i], width) + (i + 1 < end ? " " : "");
        body += pad_left(cells[i], width) + (i + 1 < end ? " " : "");
      }
      os << head << '\n' << body << '\n';
    }
    return os.str();
  }
  std::string last_label = "[" + std::to_string(cells.size()) + "]";
  std::size_t label_width = last_label.size();
  std::size_t per_line = std::max<std::size_t>(1, (kWidth - label_width) / (width + 1));
  for (std::size_t start = 0; start < cells.size(); start += per_line) {
    std::string label = "[" + std::to_string(start + 1) + "]";
    std::string line = pad_left(label, label_width);
    for (std::size_t i = start; i < std::min(cells.size(), start + per_line); ++i) {
      // Strings are left-aligned, everything else right-aligned.
      if (v.kind() == Kind::String) {
        line += ' ' + cells[i] + std::string(width - cells[i].size(), ' ');
      } else {
        line += ' ' + pad_left(cells[i], width);
      }
    }
    line.erase(line.find_last_not_of(' ') + 1);
    os << line << '\n';
  }
  return os.str();
}

std::string format_with_prefix(const Value& v, const std::string& prefix);

std::string format_attributes(const Value& v, bool skip_class) {
  std::string out;
  for (const auto& [name, val] : v.attributes()) {
    if (name == "names" || (skip_class && name == "class")) continue;
    out += "attr(,\"" + name + "\")\n" + format_value(val);
  }
  return out;
}

std::string format_list(const Value& v, const std::string& prefix) {
  if (v.length() == 0) return prefix.empty() ? "list()\n" : "list()\n";
  std::string out;
  std::vector<std::string> names = v.names();
  for (std::size_t i = 0; i < v.length(); ++i) {
    std::string tag;
    if (!names.empty() && !names[i].empty()) {
      tag = prefix + "$" + (is_syntactic_name(names[i]) ? names[i] : "`" + names[i] + "`");
    } else {
      tag = prefix + "[[" + std::to_string(i + 1) + "]]";
    }
    out += tag + "\n" + format_with_prefix(v.elements()[i], tag) + "\n";
  }
  return out;
}

std::string format_with_prefix(const Value& v, const std::string& prefix) {
  switch (v.kind()) {
    case Kind::List: return format_list(v, prefix) + format_attributes(v, false);
    default: return format_value(v);
  }
}

}  // namespace

std::vector<std::string> format_doubles(const std::vector<double>& xs) {
  int max_sig = 1;
  int max_exp = std::numeric_limits<int>::min();
  int min_exp = std::numeric_limits<int>::max();
  int rgt = 0;
  bool any_finite = false;
  bool neg = false;
  for (double d : xs) {
    if (!std::isfinite(d)) continue;
    any_finite = true;
    if (d < 0) neg = true;
    auto [sig, e] = significance(d);
    max_sig = std::max(max_sig, sig);
    max_exp = std::max(max_exp, e);
    min_exp = std::min(min_exp, e);
    rgt = std::max(rgt, sig - 1 - e);
  }
  std::vector<std::string> out;
  out.reserve(xs.size());
  if (!any_finite) {
    for (double d : xs) out.push_back(non_finite(d));
    return out;
  }
  rgt = std::max(rgt, 0);
  int left = std::max(max_exp + 1, 1);
  int fixed_width = (neg ? 1 : 0) + left + (rgt > 0 ? rgt + 1 : 0);
  int exp_digits = (std::max(std::abs(max_exp), std::abs(min_exp)) >= 100) ? 3 : 2;
  int sci_width = (neg ? 1 : 0) + (max_sig > 1 ? max_sig + 1 : 1) + 2 + exp_digits;
  bool use_fixed = fixed_width <= sci_width && rgt <= 15;
  for (double d : xs) {
    if (!std::isfinite(d)) {
      out.push_back(non_finite(d));
    } else if (use_fixed) {
      std::string s = printf_double("%.*f", rgt, d);
      if (s == "-0" || (s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos)) s.erase(0, 1);
      out.push_back(s);
    } else {
      out.push_back(sci(d, max_sig));
    }
  }
  return out;
}

std::vector<std::string> as_character(const Value& v) {
  std::vector<std::string> out;
  switch (v.kind()) {
    case Kind::Double:
      for (double d : v.doubles()) {
        if (!std::isfinite(d)) {
          out.push_back(non_finite(d));
          continue;
        }
        std::string s = printf_double("%.*g", 15, d);
        auto epos = s.find('e');
        if (epos != std::string::npos) {
          std::string mant = s.substr(0, epos);
          char sign = s[epos + 1];
          std::string digits = s.substr(epos + 2);
          while (digits.size() > 2 && digits[0] == '0') digits.erase(0, 1);
          s = mant + "e" + sign + digits;
        }
        out.push_back(s);
      }
      return out;
    case Kind::List:
      for (const auto& e : v.elements()) {
        if (e.is_atomic() && e.length() == 1) {
          out.push_back(as_character(e).front());
        } else {
          out.push_back(deparse_value(e));
        }
      }
      return out;
    case Kind::Closure:
    case Kind::Builtin:
    case Kind::Environment:
    case Kind::S4Instance:
    case Kind::RefInstance: out.push_back(format_value(v)); return out;
    case Kind::Expression: out.push_back(deparse(v.expression_data())); return out;
    default: return element_strings(v, false);
  }
}

std::string format_for_cat(const Value& v) {
  std::vector<std::string> parts;
  switch (v.kind()) {
    case Kind::Null: return "";
    case Kind::Double:
      for (double d : v.doubles()) parts.push_back(format_doubles({d}).front());
      break;
    case Kind::List:
      for (const auto& e : v.elements()) parts.push_back(format_for_cat(e));
      break;
    case Kind::Logical:
    case Kind::Integer:
    case Kind::String: parts = element_strings(v, false); break;
    default: throw Error("argument of type '" + std::string(kind_name(v.kind())) + "' cannot be handled by 'cat'");
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " " : "") + parts[i];
  return out;
}

std::string format_value(const Value& v) {
  switch (v.kind()) {
    case Kind::Null: return "NULL\n";
    case Kind::Logical:
    case Kind::Integer:
    case Kind::Double:
    case Kind::String: return format_atomic(v) + format_attributes(v, false);
    case Kind::List: return format_list(v, "") + format_attributes(v, false);
    case Kind::Closure: {
      const auto& c = v.closure_data();
      return deparse_function(c.formals, c.body) + "\n" + format_attributes(v, false);
    }
    case Kind::Builtin: {
      Value cls = v.attribute("className");
      if (cls.kind() == Kind::String && cls.length() == 1) {
        return "Generator for class \"" + cls.strings()[0] + "\"\n";
      }
      return "function (...) .Primitive(\"" + v.builtin_data().name + "\")\n";
    }
    case Kind::Expression: return deparse(v.expression_data()) + "\n";
    case Kind::Environment: return "<environment: " + v.environment_data()->tag() + ">\n";
    case Kind::S4Instance: {
      const auto& d = v.s4_data();
      std::string out = "An object of class \"" + d.class_name + "\"\n";
      if (d.slots.empty()) out += "<S4 Type Object>\n";
      for (const auto& [name, val] : d.slots) out += "Slot \"" + name + "\":\n" + format_value(val) + "\n";
      return out;
    }
    case Kind::RefInstance:
      return "Reference class object of class \"" + v.ref_data().class_name + "\"\n";
  }
  return "\n";
}

}  // namespace mls
