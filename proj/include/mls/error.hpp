#ifndef MLS_ERROR_HPP
#define MLS_ERROR_HPP

#include <exception>
#include <string>

#include "mls/value.hpp"

namespace mls {

/// Evaluation or analysis failure. The location is filled in by the
/// innermost call site that knows one.
class Error : public std::exception {
 public:
  explicit Error(std::string message, SourceLocation loc = {})
      : message_(std::move(message)), loc_(loc) {}

  const char* what() const noexcept override { return message_.c_str(); }
  const std::string& message() const { return message_; }
  const SourceLocation& location() const { return loc_; }
  void set_location(SourceLocation loc) { loc_ = loc; }

  /// "Error at 3:5: message", or "Error: message" without a location.
  std::string describe() const;

 private:
  std::string message_;
  SourceLocation loc_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, SourceLocation loc, std::string token, bool at_end)
      : Error(std::move(message), loc), token_(std::move(token)), at_end_(at_end) {}

  const std::string& token() const { return token_; }
  /// True when the input ended before the expression was complete; the
  /// REPL uses this to ask for a continuation line.
  bool at_end() const { return at_end_; }

 private:
  std::string token_;
  bool at_end_;
};

/// Raised by S4 method selection.
class DispatchError : public Error {
 public:
  enum class Reason { NoMethod, Ambiguous };
  DispatchError(Reason reason, std::string message)
      : Error(std::move(message)), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

}  // namespace mls

#endif  // MLS_ERROR_HPP
