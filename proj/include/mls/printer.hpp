#ifndef MLS_PRINTER_HPP
#define MLS_PRINTER_HPP

#include <string>
#include <vector>

#include "mls/value.hpp"

namespace mls {

/// Console representation, e.g. "[1] 120\n". Used by print.default.
std::string format_value(const Value& v);

/// Element-wise conversion as done by as.character and paste: doubles use
/// up to 15 significant digits.
std::vector<std::string> as_character(const Value& v);

/// Space-separated rendering used by cat.
std::string format_for_cat(const Value& v);

/// Elements formatted to a common width/precision, 7 significant digits.
std::vector<std::string> format_doubles(const std::vector<double>& xs);

}  // namespace mls

#endif  // MLS_PRINTER_HPP
