#ifndef MLS_PURITY_HPP
#define MLS_PURITY_HPP

// Static certification of functional validity.
//
// A module is one source file: `import <module> (<names>)` header lines
// followed by top-level definitions. Each function definition is scanned
// for local facts, its free names are resolved against the module, its
// imports and the builtin table, and verdicts are propagated bottom-up
// over the strongly connected components of the call graph.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mls/expr.hpp"

namespace mls::purity {

enum class ViolationKind {
  NonlocalAssignment,
  StateRead,
  RngDependence,
  GlobalReference,
  ForeignCode,
  DynamicCode,
};
std::string_view to_string(ViolationKind k);

/// Ordered so that a larger value dominates in propagation.
enum class Status { Functional, Nonfunctional, Uncertifiable };
std::string_view to_string(Status s);

struct Violation {
  ViolationKind kind;
  SourceLocation site;
  std::string detail;
  std::string subject;  // option name, target name or callee, when known
  std::string origin;   // function whose body contains the site

  friend bool operator<(const Violation& a, const Violation& b);
  friend bool operator==(const Violation& a, const Violation& b);
};

// -- builtin table -----------------------------------------------------------

enum class BuiltinClass {
  Pure,
  StateRead,
  Rng,
  Foreign,
  Dynamic,
  Global,
  Nonlocal,  // `assign` with an explicit environment
};

/// Classification of base names. Names absent from the table are treated
/// as unvetted and reported as global references.
struct BuiltinTable {
  std::map<std::string, BuiltinClass, std::less<>> entries;

  std::optional<BuiltinClass> find(std::string_view name) const;
  static BuiltinTable defaults();
};

// -- modules -----------------------------------------------------------------

struct Import {
  std::string module;
  std::vector<std::string> names;
  int line = 0;
};

struct Definition {
  std::string name;
  ExprPtr function;  // a FunctionLiteral node
  SourceLocation loc;
};

struct ModuleUnit {
  std::string name;
  std::vector<Definition> definitions;  // functions, in source order, unique names
  std::set<std::string> constants;      // non-function top-level bindings
  std::vector<Import> imports;
};

/// Splits import headers from the body and collects definitions. Import
/// lines are blanked, not removed, so parse locations match the file.
/// Throws SyntaxError.
ModuleUnit parse_module(std::string name, std::string_view source);

// -- analysis stages -----------------------------------------------------------

/// A name read or called from a function body without a local binding.
struct FreeReference {
  std::string name;
  SourceLocation site;
  bool called = false;
  bool vetted = false;  // the call's argument shape makes it harmless
  std::string subject;  // first literal argument (option name etc.)
};

struct LocalFacts {
  std::vector<Violation> violations;
  std::vector<FreeReference> references;
  /// S3 generics dispatched by UseMethod from this body.
  std::set<std::string> dispatches;
};

LocalFacts scan_function(const ExprPtr& function);

struct Resolved {
  std::vector<Violation> violations;
  std::set<std::string> callees;  // qualified "module::name"
};

/// Classifies free names: module definition or import (call edge),
/// builtin (per table) or unresolved (GlobalReference).
Resolved resolve_names(const ModuleUnit& m, const LocalFacts& facts,
                       const std::map<std::string, ModuleUnit, std::less<>>& loaded, const BuiltinTable& table);

struct Verdict {
  std::string function;
  Status status = Status::Functional;
  std::vector<Violation> reasons;  // own first, then inherited
  std::vector<std::string> via;    // callees contributing reasons
  std::vector<std::string> suggestions;
  std::vector<std::string> callees;
};

std::vector<std::string> suggest_remediation(const Verdict& v);

struct ModuleReport {
  std::string name;
  std::vector<Verdict> functions;  // in definition order
};

struct AnalysisReport {
  std::vector<ModuleReport> modules;
  std::size_t functional = 0;
  std::size_t nonfunctional = 0;
  std::size_t uncertifiable = 0;

  Status worst() const;
  const Verdict* find(std::string_view module, std::string_view function) const;
};

/// Holds loaded modules and analyzes them together so that imports
/// between them resolve.
class Analyzer {
 public:
  explicit Analyzer(BuiltinTable table = BuiltinTable::defaults()) : table_(std::move(table)) {}

  /// Throws Error when a module of the same name is already loaded.
  void add_module(ModuleUnit m);
  void add_source(std::string name, std::string_view source) { add_module(parse_module(std::move(name), source)); }

  AnalysisReport analyze() const;
  /// Report restricted to one module (dependencies still propagate).
  AnalysisReport analyze_module(std::string_view name) const;

  const BuiltinTable& table() const { return table_; }

 private:
  BuiltinTable table_;
  std::map<std::string, ModuleUnit, std::less<>> modules_;
  std::vector<std::string> order_;
};

/// JSON document with lexicographically sorted keys.
std::string to_json(const AnalysisReport& r);
std::string to_text(const AnalysisReport& r);

}  // namespace mls::purity

#endif  // MLS_PURITY_HPP
