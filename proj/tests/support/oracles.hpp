#ifndef MLS_TESTS_ORACLES_HPP
#define MLS_TESTS_ORACLES_HPP

// Independent reference implementations and generators shared by the unit
// tests and the acceptance runner. Nothing here calls into the code under
// test except to build inputs or read results.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mls/interpreter.hpp"

namespace mls::testing {

std::string source_path(const std::string& relative);
std::string read_text(const std::string& path);

// -- generator oracle --------------------------------------------------------

/// Standalone xorshift64* seeded through splitmix64, written from the
/// published constants without reference to the interpreter.
class RngOracle {
 public:
  explicit RngOracle(std::int64_t seed);
  double next();
  std::vector<double> draw(std::size_t n);

 private:
  std::uint64_t s_;
};

/// The corpus population rule: each generation adds the count of draws
/// below `birth` and removes the count of draws below `death`, floored at 0.
std::vector<double> simplepop_oracle(std::int64_t seed, double birth, double death, double size, int generations);

// -- state snapshots ---------------------------------------------------------

struct BindingImage {
  int slot = 0;  // index of the Binding::Slot alternative
  Value value;   // deep copy for immediates, memoized value for forced promises
  const void* identity = nullptr;
  bool forced = false;
  bool read_only = false;
};

/// Deep image of every live environment. Holding the EnvPtrs keeps them
/// alive for comparison.
struct Snapshot {
  std::vector<std::pair<EnvPtr, std::map<std::string, BindingImage>>> envs;
};

Snapshot snapshot(const Interpreter& interp);
/// Empty when every environment in the snapshot is unchanged; otherwise a
/// description of the first difference.
std::string compare(const Snapshot& before);

// -- locality programs -------------------------------------------------------

struct PureProgram {
  std::string definitions;  // evaluated before the snapshot
  std::string call;         // evaluated after it
};

/// Random program in the pure subset: scalar and vector arithmetic, local
/// and indexed assignment, branches, bounded loops, local closures and
/// calls between the generated functions.
PureProgram random_pure_program(std::mt19937_64& rng);

// -- S3 oracle ---------------------------------------------------------------

struct S3Case {
  std::vector<std::string> classes;
  std::set<std::string> methods;
  bool has_default = false;
  bool local_methods = false;  // methods bound in the caller's frame
};

S3Case random_s3_case(std::mt19937_64& rng);
/// First class with a method, else "default", else nullopt.
std::optional<std::string> s3_oracle(const S3Case& c);
/// Program whose value is the label of the selected method.
std::string s3_program(const S3Case& c);

// -- S4 oracle ---------------------------------------------------------------

struct S4Case {
  std::vector<std::vector<int>> contains;  // class i contains these earlier classes
  std::size_t nargs = 1;
  std::vector<std::vector<std::string>> signatures;  // distinct
  std::vector<std::string> actual;
};

struct S4Outcome {
  enum class Kind { Selected, NoMethod, Ambiguous } kind = Kind::NoMethod;
  std::size_t method = 0;  // index into signatures when selected

  friend bool operator==(const S4Outcome&, const S4Outcome&) = default;
};

std::string s4_class_name(int i);
S4Case random_s4_case(std::mt19937_64& rng);
/// Brute force: breadth-first distances, ANY at the ancestor count, minimal
/// sum, then leftmost smaller distance, else ambiguity.
S4Outcome s4_oracle(const S4Case& c);
/// Defines the classes, the generic and the methods (method i returns
/// "m<i>") followed by a call on fresh instances of the actual classes.
std::string s4_program(const S4Case& c);

std::string describe(const S4Case& c);
std::string describe(const S4Outcome& o);

// -- analyzer fixtures -------------------------------------------------------

struct Expectation {
  std::string module;
  std::string function;
  std::string status;
  std::set<std::string> kinds;
};

struct FixtureModule {
  std::string name;
  std::string path;
  std::string source;
  std::vector<Expectation> expectations;
  std::vector<std::string> probes;
};

/// Every module under corpus/{pure,impure,uncertifiable}, sorted by path.
std::vector<FixtureModule> load_fixtures();

/// Source with import header lines blanked so it evaluates as a script.
std::string runnable_source(const std::string& module_source);

/// Replaces $n with a small non-negative integer and $x with a random
/// numeric vector.
std::string instantiate_probe(const std::string& probe, std::mt19937_64& rng);

// -- processes ---------------------------------------------------------------

struct ProcessResult {
  int exit_code = -1;
  std::string output;
};

/// Runs the built `mls` binary with the given arguments, capturing stdout.
ProcessResult run_mls(const std::string& args);

}  // namespace mls::testing

#endif  // MLS_TESTS_ORACLES_HPP
