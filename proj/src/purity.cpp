#include "mls/purity.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "mls/error.hpp"
#include "mls/reader.hpp"

namespace mls::purity {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::NonlocalAssignment: return "NonlocalAssignment";
    case ViolationKind::StateRead: return "StateRead";
    case ViolationKind::RngDependence: return "RngDependence";
    case ViolationKind::GlobalReference: return "GlobalReference";
    case ViolationKind::ForeignCode: return "ForeignCode";
    case ViolationKind::DynamicCode: return "DynamicCode";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Functional: return "Functional";
    case Status::Nonfunctional: return "Nonfunctional";
    case Status::Uncertifiable: return "Uncertifiable";
  }
  return "?";
}

namespace {

auto violation_key(const Violation& v) {
  return std::tie(v.origin, v.site.line, v.site.column, v.kind, v.detail, v.subject);
}

}  // namespace

bool operator<(const Violation& a, const Violation& b) { return violation_key(a) < violation_key(b); }
bool operator==(const Violation& a, const Violation& b) { return violation_key(a) == violation_key(b); }

// -- builtin table -------------------------------------------------------------

std::optional<BuiltinClass> BuiltinTable::find(std::string_view name) const {
  auto it = entries.find(name);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

BuiltinTable BuiltinTable::defaults() {
  BuiltinTable t;
  auto add = [&](BuiltinClass c, std::initializer_list<const char*> names) {
    for (const char* n : names) t.entries[n] = c;
  };
  add(BuiltinClass::Pure,
      {// operators
       "+", "-", "*", "/", "^", "%%", "%/%", "==", "!=", "<", "<=", ">", ">=", "!", "&", "|", "&&", "||", ":",
       "%in%",
       // control and conditions
       "quote", "missing", "return", "invisible", "identity", "stop", "warning", "stopifnot",
       // construction and shape
       "c", "list", "length", "names", "setNames", "numeric", "double", "integer", "character", "logical",
       "vector", "seq_len", "seq_along", "seq", "rep", "rev", "head", "tail", "sort", "order", "unique", "unlist",
       "lapply", "sapply",
       // arithmetic
       "sum", "prod", "mean", "cumsum", "max", "min", "sqrt", "exp", "floor", "ceiling", "trunc", "log10", "sign",
       "abs", "log", "round", "all", "any", "which", "identical",
       // types
       "is.null", "is.numeric", "is.double", "is.integer", "is.character", "is.logical", "is.list", "is.function",
       "is.environment", "is.atomic", "is.object", "as.numeric", "as.double", "as.integer", "as.character",
       "as.logical", "as.list", "typeof",
       // strings
       "paste", "paste0", "nchar", "toupper", "tolower", "substr", "sprintf", "format",
       // attributes
       "attr", "set_attr", "attributes", "structure", "class", "oldClass", "set_class", "unclass", "inherits",
       // objects (construction and reflection on fresh or argument values)
       "new", "slot", "set_slot", "slotNames", "is", "copy", "representation", "signature", "isVirtualClass",
       "existsClass", "getClass", "superclassDistance", "isGeneric", "getGenerics", "getGeneric", "getMethod",
       "existsMethod", "selectMethod", "UseMethod",
       // environments created by or local to the call
       "new.env", "environment", "environmentName", "ls",
       // explicit-argument option access
       "get_option_from",
       // console output does not affect results or interpreter state
       "print", "print.default", "print_default", "cat",
       // literal names
       "TRUE", "FALSE", "T", "F", "pi"});
  add(BuiltinClass::StateRead, {"options", "get_option", ".Options"});
  add(BuiltinClass::Rng, {"rng_draw", "set_seed", ".Random.seed"});
  add(BuiltinClass::Foreign, {"foreign"});
  add(BuiltinClass::Dynamic, {"eval", "parse_text", "do.call", "get", "exists", "standardGeneric", "setClass",
                              "setGeneric", "setMethod", "setRefClass"});
  add(BuiltinClass::Global, {"globalenv"});
  add(BuiltinClass::Nonlocal, {"assign"});
  return t;
}

// -- module parsing --------------------------------------------------------------

ModuleUnit parse_module(std::string name, std::string_view source) {
  static const std::regex kImport(R"(^\s*import\s+([A-Za-z._][A-Za-z0-9._]*)\s*\(([^)]*)\)\s*$)");
  static const std::regex kImportStart(R"(^\s*import\b.*)");
  ModuleUnit m;
  m.name = std::move(name);
  std::string body;
  std::istringstream in{std::string(source)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::smatch match;
    if (std::regex_match(line, match, kImport)) {
      Import imp;
      imp.module = match[1];
      imp.line = lineno;
      std::string names = match[2];
      std::istringstream ns(names);
      std::string item;
      while (std::getline(ns, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        imp.names.push_back(item.substr(b, e - b + 1));
      }
      m.imports.push_back(std::move(imp));
      body += '\n';
      continue;
    }
    if (std::regex_match(line, kImportStart)) {
      throw SyntaxError("malformed import declaration; expected import <module> (<names>)",
                        SourceLocation{lineno, 1}, "import", false);
    }
    body += line;
    body += '\n';
  }
  std::map<std::string, std::size_t> index;
  for (const auto& e : parse_program(body)) {
    const auto* a = e->as<expr::Assign>();
    if (a == nullptr) continue;
    std::string target = a->target->as<expr::Symbol>()->name;
    if (a->value->is<expr::FunctionLiteral>()) {
      Definition d{target, a->value, e->loc};
      if (auto it = index.find(target); it != index.end()) {
        m.definitions[it->second] = std::move(d);
      } else {
        index[target] = m.definitions.size();
        m.definitions.push_back(std::move(d));
      }
      m.constants.erase(target);
    } else if (index.count(target) == 0) {
      m.constants.insert(target);
    }
  }
  return m;
}

// -- scanning --------------------------------------------------------------------

namespace {

struct Scope {
  std::set<std::string> bound;     // grows in evaluation order
  std::set<std::string> assigned;  // every local binding in the body
  const Scope* parent = nullptr;
};

/// Names bound anywhere in a function body, not descending into nested
/// function literals.
void collect_assigned(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Assign>) {
          out.insert(n.target->template as<expr::Symbol>()->name);
          collect_assigned(n.value, out);
        } else if constexpr (std::is_same_v<T, expr::SuperAssign>) {
          collect_assigned(n.value, out);
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          collect_assigned(n.callee, out);
          for (const auto& a : n.args) collect_assigned(a.value, out);
        } else if constexpr (std::is_same_v<T, expr::Block>) {
          for (const auto& s : n.exprs) collect_assigned(s, out);
        } else if constexpr (std::is_same_v<T, expr::If>) {
          collect_assigned(n.cond, out);
          collect_assigned(n.then_branch, out);
          collect_assigned(n.else_branch, out);
        } else if constexpr (std::is_same_v<T, expr::While>) {
          collect_assigned(n.cond, out);
          collect_assigned(n.body, out);
        } else if constexpr (std::is_same_v<T, expr::Index>) {
          collect_assigned(n.object, out);
          for (const auto& i : n.indices) collect_assigned(i, out);
        } else if constexpr (std::is_same_v<T, expr::IndexAssign> || std::is_same_v<T, expr::FieldAssign>) {
          if (!n.super) {
            ExprPtr root = n.object;
            while (root) {
              if (const auto* s = root->template as<expr::Symbol>()) {
                out.insert(s->name);
                break;
              }
              if (const auto* ix = root->template as<expr::Index>()) {
                root = ix->object;
              } else if (const auto* fa = root->template as<expr::FieldAccess>()) {
                root = fa->object;
              } else {
                break;
              }
            }
          }
          collect_assigned(n.value, out);
        } else if constexpr (std::is_same_v<T, expr::FieldAccess>) {
          collect_assigned(n.object, out);
        }
      },
      e->data);
}

std::optional<std::string> literal_string(const ExprPtr& e) {
  if (!e) return std::nullopt;
  if (const auto* c = e->as<expr::Constant>()) {
    if (c->value.kind() == Kind::String && c->value.length() == 1) return c->value.strings()[0];
  }
  return std::nullopt;
}

/// Argument bound to `formal` by name, else the positional argument at
/// `position` among unnamed arguments.
const CallArg* argument(const expr::Call& call, std::string_view formal, std::size_t position) {
  for (const auto& a : call.args) {
    if (a.name && *a.name == formal) return &a;
  }
  std::size_t i = 0;
  for (const auto& a : call.args) {
    if (a.name) continue;
    if (i++ == position) return &a;
  }
  return nullptr;
}

class Scanner {
 public:
  LocalFacts run(const ExprPtr& fn) {
    const auto* f = fn->as<expr::FunctionLiteral>();
    if (f == nullptr) throw Error("scan_function expects a function literal", fn->loc);
    function(*f, nullptr);
    return std::move(facts_);
  }

 private:
  void function(const expr::FunctionLiteral& f, const Scope* parent) {
    Scope scope;
    scope.parent = parent;
    for (const auto& formal : f.formals) {
      scope.bound.insert(formal.name);
      scope.assigned.insert(formal.name);
    }
    collect_assigned(f.body, scope.assigned);
    for (const auto& formal : f.formals) {
      if (formal.default_value) walk(formal.default_value, scope);
    }
    walk(f.body, scope);
  }

  static bool is_local(const std::string& name, const Scope& scope) {
    if (scope.bound.count(name) != 0) return true;
    for (const Scope* s = scope.parent; s != nullptr; s = s->parent) {
      if (s->assigned.count(name) != 0) return true;
    }
    return false;
  }

  void violation(ViolationKind kind, SourceLocation site, std::string detail, std::string subject = {}) {
    facts_.violations.push_back({kind, site, std::move(detail), std::move(subject), {}});
  }

  void reference(const std::string& name, SourceLocation site, const Scope& scope, bool called, bool vetted = false,
                 std::string subject = {}) {
    if (is_local(name, scope)) return;
    facts_.references.push_back({name, site, called, vetted, std::move(subject)});
  }

  void walk(const ExprPtr& e, Scope& scope) {
    if (!e) return;
    std::visit([&](const auto& n) { visit(n, e, scope); }, e->data);
  }

  void visit(const expr::Constant&, const ExprPtr&, Scope&) {}

  void visit(const expr::Symbol& s, const ExprPtr& e, Scope& scope) { reference(s.name, e->loc, scope, false); }

  void visit(const expr::FunctionLiteral& f, const ExprPtr&, Scope& scope) { function(f, &scope); }

  void visit(const expr::Assign& a, const ExprPtr&, Scope& scope) {
    walk(a.value, scope);
    scope.bound.insert(a.target->as<expr::Symbol>()->name);
  }

  void visit(const expr::SuperAssign& a, const ExprPtr& e, Scope& scope) {
    walk(a.value, scope);
    const std::string& name = a.target->as<expr::Symbol>()->name;
    violation(ViolationKind::NonlocalAssignment, e->loc, "superassignment to '" + name + "'", name);
  }

  void visit(const expr::Block& b, const ExprPtr&, Scope& scope) {
    for (const auto& s : b.exprs) walk(s, scope);
  }

  void visit(const expr::If& i, const ExprPtr&, Scope& scope) {
    walk(i.cond, scope);
    walk(i.then_branch, scope);
    walk(i.else_branch, scope);
  }

  void visit(const expr::While& w, const ExprPtr&, Scope& scope) {
    walk(w.cond, scope);
    walk(w.body, scope);
  }

  void visit(const expr::Index& ix, const ExprPtr&, Scope& scope) {
    walk(ix.object, scope);
    for (const auto& i : ix.indices) walk(i, scope);
  }

  void visit(const expr::FieldAccess& fa, const ExprPtr&, Scope& scope) { walk(fa.object, scope); }

  template <class Replacement>
  void replacement(const Replacement& n, const ExprPtr& e, Scope& scope) {
    walk(n.value, scope);
    walk(n.object, scope);
    ExprPtr root = n.object;
    while (root && !root->template is<expr::Symbol>()) {
      if (const auto* ix = root->template as<expr::Index>()) {
        root = ix->object;
      } else if (const auto* fa = root->template as<expr::FieldAccess>()) {
        root = fa->object;
      } else {
        root = nullptr;
      }
    }
    std::string name = root ? root->template as<expr::Symbol>()->name : std::string("<expression>");
    if (n.super) {
      violation(ViolationKind::NonlocalAssignment, e->loc, "superassignment into '" + name + "'", name);
    } else if (root) {
      scope.bound.insert(name);
    }
  }

  void visit(const expr::IndexAssign& n, const ExprPtr& e, Scope& scope) {
    for (const auto& i : n.indices) walk(i, scope);
    replacement(n, e, scope);
  }

  void visit(const expr::FieldAssign& n, const ExprPtr& e, Scope& scope) { replacement(n, e, scope); }

  void visit(const expr::Call& call, const ExprPtr& e, Scope& scope) {
    const auto* sym = call.callee->as<expr::Symbol>();
    if (sym == nullptr) {
      if (!call.callee->is<expr::FunctionLiteral>()) {
        violation(ViolationKind::DynamicCode, e->loc, "computed callee `" + deparse(call.callee) + "`");
      }
      walk(call.callee, scope);
      for (const auto& a : call.args) walk(a.value, scope);
      return;
    }
    const std::string& name = sym->name;
    if (is_local(name, scope)) {
      for (const auto& a : call.args) walk(a.value, scope);
      return;
    }
    SourceLocation site = call.callee->loc.known() ? call.callee->loc : e->loc;
    bool vetted = false;
    std::string subject;
    if (name == "quote") {
      reference(name, site, scope, true);
      return;
    }
    if (name == "assign") {
      const CallArg* env = argument(call, "envir", 2);
      bool local_env = env == nullptr;
      if (env != nullptr) {
        if (const auto* c = env->value->as<expr::Call>()) {
          auto callee = callee_name(*c);
          local_env = callee && *callee == "environment" && c->args.empty() && !is_local("environment", scope);
        }
      }
      vetted = local_env;
      const CallArg* target = argument(call, "x", 0);
      if (auto lit = target ? literal_string(target->value) : std::nullopt) {
        subject = *lit;
        if (local_env) scope.bound.insert(*lit);
      }
    } else if (name == "do.call") {
      const CallArg* what = argument(call, "what", 0);
      vetted = true;
      if (what != nullptr) {
        if (auto lit = literal_string(what->value)) {
          reference(*lit, what->value->loc.known() ? what->value->loc : site, scope, true);
        } else if (const auto* s = what->value->as<expr::Symbol>(); s != nullptr && is_local(s->name, scope)) {
          violation(ViolationKind::DynamicCode, site, "do.call on local '" + s->name + "', which may name any function");
        } else if (!what->value->is<expr::Symbol>() && !what->value->is<expr::FunctionLiteral>()) {
          violation(ViolationKind::DynamicCode, site, "do.call with a computed function");
        }
      }
    } else if (name == "UseMethod") {
      const CallArg* generic = argument(call, "generic", 0);
      if (auto lit = generic ? literal_string(generic->value) : std::nullopt) {
        facts_.dispatches.insert(*lit);
      } else {
        violation(ViolationKind::DynamicCode, site, "UseMethod with a computed generic name");
      }
    } else if (name == "options") {
      if (!call.args.empty()) {
        if (call.args[0].name) {
          subject = *call.args[0].name;
        } else if (auto lit = literal_string(call.args[0].value)) {
          subject = *lit;
        }
      }
    } else if (name == "get_option" || name == "foreign" || name == "get" || name == "exists") {
      const CallArg* first = call.args.empty() ? nullptr : &call.args[0];
      if (auto lit = first ? literal_string(first->value) : std::nullopt) subject = *lit;
    }
    reference(name, site, scope, true, vetted, subject);
    for (const auto& a : call.args) walk(a.value, scope);
  }

  LocalFacts facts_;
};

}  // namespace

LocalFacts scan_function(const ExprPtr& function) { return Scanner().run(function); }

// -- resolution ------------------------------------------------------------------

namespace {

const Definition* find_definition(const ModuleUnit& m, std::string_view name) {
  for (const auto& d : m.definitions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::string qualified(const std::string& module, const std::string& name) { return module + "::" + name; }

Violation builtin_violation(BuiltinClass c, const FreeReference& r) {
  std::string what = r.called ? "call to " + r.name + "()" : "reference to '" + r.name + "'";
  switch (c) {
    case BuiltinClass::StateRead:
      return {ViolationKind::StateRead, r.site,
              r.subject.empty() ? what + " reads interpreter options" : what + " reads option '" + r.subject + "'",
              r.subject, {}};
    case BuiltinClass::Rng:
      return {ViolationKind::RngDependence, r.site, what + " depends on the random number generator state", r.name, {}};
    case BuiltinClass::Foreign:
      return {ViolationKind::ForeignCode, r.site,
              r.subject.empty() ? what + " enters foreign code" : what + " enters foreign routine '" + r.subject + "'",
              r.subject, {}};
    case BuiltinClass::Dynamic:
      return {ViolationKind::DynamicCode, r.site, what + " evaluates or defines code at run time", r.name, {}};
    case BuiltinClass::Global:
      return {ViolationKind::GlobalReference, r.site, what + " reaches the global environment", r.name, {}};
    case BuiltinClass::Nonlocal:
      return {ViolationKind::NonlocalAssignment, r.site,
              what + " assigns into an environment that is not the local frame", r.subject, {}};
    case BuiltinClass::Pure: break;
  }
  return {ViolationKind::GlobalReference, r.site, what, r.name, {}};
}

}  // namespace

Resolved resolve_names(const ModuleUnit& m, const LocalFacts& facts,
                       const std::map<std::string, ModuleUnit, std::less<>>& loaded, const BuiltinTable& table) {
  Resolved out;
  out.violations = facts.violations;
  for (const auto& r : facts.references) {
    if (find_definition(m, r.name) != nullptr) {
      out.callees.insert(qualified(m.name, r.name));
      continue;
    }
    if (m.constants.count(r.name) != 0) continue;
    bool imported = false;
    for (const auto& imp : m.imports) {
      if (std::find(imp.names.begin(), imp.names.end(), r.name) == imp.names.end()) continue;
      imported = true;
      auto it = loaded.find(imp.module);
      if (it != loaded.end() && find_definition(it->second, r.name) != nullptr) {
        out.callees.insert(qualified(imp.module, r.name));
      } else if (it == loaded.end() || it->second.constants.count(r.name) == 0) {
        out.violations.push_back({ViolationKind::GlobalReference, r.site,
                                  "imported name '" + r.name + "' is not defined by module '" + imp.module + "'",
                                  r.name, {}});
      }
      break;
    }
    if (imported) continue;
    if (auto cls = table.find(r.name)) {
      if (*cls == BuiltinClass::Pure || r.vetted) continue;
      out.violations.push_back(builtin_violation(*cls, r));
      continue;
    }
    out.violations.push_back({ViolationKind::GlobalReference, r.site,
                              "'" + r.name + "' is not defined in the module, its imports or the base environment",
                              r.name, {}});
  }
  for (const auto& generic : facts.dispatches) {
    std::string prefix = generic + ".";
    for (const auto& d : m.definitions) {
      if (d.name.starts_with(prefix)) out.callees.insert(qualified(m.name, d.name));
    }
  }
  return out;
}

// -- remediation -----------------------------------------------------------------

std::vector<std::string> suggest_remediation(const Verdict& v) {
  std::vector<std::string> out;
  auto add = [&](std::string s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  std::vector<Violation> ordered = v.reasons;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Violation& a, const Violation& b) { return a.kind < b.kind; });
  for (const auto& r : ordered) {
    switch (r.kind) {
      case ViolationKind::NonlocalAssignment: add("return the value instead of assigning nonlocally"); break;
      case ViolationKind::StateRead:
        add(r.subject.empty() ? "lift the options read to explicit parameters"
                              : "lift option '" + r.subject + "' to an explicit parameter");
        break;
      case ViolationKind::RngDependence:
        add("accept the generator's initial state as an argument");
        add("require explicit set_seed in reproducible examples");
        break;
      case ViolationKind::GlobalReference:
        add(r.subject.empty() ? "declare an import or define locally"
                              : "declare an import or define '" + r.subject + "' locally");
        break;
      case ViolationKind::ForeignCode:
      case ViolationKind::DynamicCode: add("no automatic remediation; manual audit required"); break;
    }
  }
  return out;
}

// -- propagation -----------------------------------------------------------------

Status AnalysisReport::worst() const {
  if (uncertifiable > 0) return Status::Uncertifiable;
  if (nonfunctional > 0) return Status::Nonfunctional;
  return Status::Functional;
}

const Verdict* AnalysisReport::find(std::string_view module, std::string_view function) const {
  for (const auto& m : modules) {
    if (m.name != module) continue;
    for (const auto& f : m.functions) {
      if (f.function == function) return &f;
    }
  }
  return nullptr;
}

void Analyzer::add_module(ModuleUnit m) {
  if (modules_.count(m.name) != 0) throw Error("module '" + m.name + "' is already loaded");
  order_.push_back(m.name);
  std::string name = m.name;
  modules_.emplace(std::move(name), std::move(m));
}

namespace {

Status status_of(const std::vector<Violation>& reasons) {
  Status s = Status::Functional;
  for (const auto& r : reasons) {
    Status k = r.kind == ViolationKind::ForeignCode || r.kind == ViolationKind::DynamicCode ? Status::Uncertifiable
                                                                                            : Status::Nonfunctional;
    s = std::max(s, k);
  }
  return s;
}

struct Graph {
  std::vector<std::string> nodes;  // qualified names
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> edges;
  std::vector<std::vector<Violation>> own;
};

/// Tarjan's algorithm; components come out callees-first.
std::vector<std::vector<std::size_t>> strongly_connected(const Graph& g) {
  std::size_t n = g.nodes.size();
  std::vector<int> index(n, -1);
  std::vector<int> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : g.edges[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) connect(v);
  }
  return out;
}

}  // namespace

AnalysisReport Analyzer::analyze() const {
  Graph g;
  for (const auto& mname : order_) {
    for (const auto& d : modules_.at(mname).definitions) {
      std::string q = qualified(mname, d.name);
      g.index[q] = g.nodes.size();
      g.nodes.push_back(q);
    }
  }
  g.edges.resize(g.nodes.size());
  g.own.resize(g.nodes.size());
  for (const auto& mname : order_) {
    const ModuleUnit& m = modules_.at(mname);
    for (const auto& d : m.definitions) {
      std::size_t v = g.index.at(qualified(mname, d.name));
      Resolved r = resolve_names(m, scan_function(d.function), modules_, table_);
      for (auto& viol : r.violations) viol.origin = d.name;
      std::sort(r.violations.begin(), r.violations.end());
      r.violations.erase(std::unique(r.violations.begin(), r.violations.end()), r.violations.end());
      g.own[v] = std::move(r.violations);
      for (const auto& c : r.callees) g.edges[v].push_back(g.index.at(c));
    }
  }

  std::vector<std::vector<Violation>> full(g.nodes.size());
  std::vector<std::size_t> component_of(g.nodes.size());
  auto comps = strongly_connected(g);
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    std::vector<Violation> merged;
    for (std::size_t v : comps[ci]) {
      component_of[v] = ci;
      merged.insert(merged.end(), g.own[v].begin(), g.own[v].end());
    }
    for (std::size_t v : comps[ci]) {
      for (std::size_t w : g.edges[v]) {
        if (std::find(comps[ci].begin(), comps[ci].end(), w) != comps[ci].end()) continue;
        merged.insert(merged.end(), full[w].begin(), full[w].end());
      }
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    for (std::size_t v : comps[ci]) full[v] = merged;
  }

  std::map<std::string, Verdict> verdicts;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    Verdict out;
    const std::string& q = g.nodes[v];
    out.function = q.substr(q.find("::") + 2);
    out.reasons = g.own[v];
    for (const auto& r : full[v]) {
      if (std::find(g.own[v].begin(), g.own[v].end(), r) == g.own[v].end()) out.reasons.push_back(r);
    }
    out.status = status_of(out.reasons);
    std::set<std::string> callees;
    std::set<std::string> via;
    for (std::size_t w : g.edges[v]) {
      std::string shown = g.nodes[w].substr(0, g.nodes[w].find("::")) == q.substr(0, q.find("::"))
                              ? g.nodes[w].substr(g.nodes[w].find("::") + 2)
                              : g.nodes[w];
      callees.insert(shown);
      if (w != v && !full[w].empty()) via.insert(shown);
    }
    out.callees.assign(callees.begin(), callees.end());
    out.via.assign(via.begin(), via.end());
    out.suggestions = suggest_remediation(out);
    verdicts[q] = std::move(out);
  }

  AnalysisReport report;
  for (const auto& mname : order_) {
    ModuleReport mr;
    mr.name = mname;
    for (const auto& d : modules_.at(mname).definitions) {
      Verdict& v = verdicts.at(qualified(mname, d.name));
      switch (v.status) {
        case Status::Functional: ++report.functional; break;
        case Status::Nonfunctional: ++report.nonfunctional; break;
        case Status::Uncertifiable: ++report.uncertifiable; break;
      }
      mr.functions.push_back(std::move(v));
    }
    report.modules.push_back(std::move(mr));
  }
  return report;
}

AnalysisReport Analyzer::analyze_module(std::string_view name) const {
  if (modules_.find(name) == modules_.end()) throw Error("module '" + std::string(name) + "' is not loaded");
  AnalysisReport all = analyze();
  AnalysisReport out;
  for (auto& m : all.modules) {
    if (m.name != name) continue;
    for (const auto& f : m.functions) {
      switch (f.status) {
        case Status::Functional: ++out.functional; break;
        case Status::Nonfunctional: ++out.nonfunctional; break;
        case Status::Uncertifiable: ++out.uncertifiable; break;
      }
    }
    out.modules.push_back(std::move(m));
  }
  return out;
}

// -- serialization ---------------------------------------------------------------

namespace {

std::string reason_detail(const Verdict& v, const Violation& r) {
  return r.origin == v.function ? r.detail : "in " + r.origin + ": " + r.detail;
}

}  // namespace

std::string to_json(const AnalysisReport& r) {
  nlohmann::json modules = nlohmann::json::array();
  for (const auto& m : r.modules) {
    nlohmann::json functions = nlohmann::json::array();
    for (const auto& f : m.functions) {
      nlohmann::json reasons = nlohmann::json::array();
      for (const auto& v : f.reasons) {
        reasons.push_back({{"kind", std::string(to_string(v.kind))},
                           {"line", v.site.line},
                           {"column", v.site.column},
                           {"detail", reason_detail(f, v)}});
      }
      functions.push_back({{"function", f.function},
                           {"status", std::string(to_string(f.status))},
                           {"reasons", reasons},
                           {"via", f.via},
                           {"suggestions", f.suggestions}});
    }
    modules.push_back({{"name", m.name}, {"functions", functions}});
  }
  nlohmann::json doc = {
      {"modules", modules},
      {"summary", {{"functional", r.functional}, {"nonfunctional", r.nonfunctional}, {"uncertifiable", r.uncertifiable}}}};
  return doc.dump(2) + "\n";
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream os;
  for (const auto& m : r.modules) {
    os << "module " << m.name << "\n";
    for (const auto& f : m.functions) {
      os << "  " << f.function << ": " << to_string(f.status);
      if (!f.via.empty()) {
        os << " (via ";
        for (std::size_t i = 0; i < f.via.size(); ++i) os << (i ? ", " : "") << f.via[i];
        os << ")";
      }
      os << "\n";
      for (const auto& v : f.reasons) {
        os << "    " << to_string(v.kind) << " at " << v.site.line << ":" << v.site.column << ": "
           << reason_detail(f, v) << "\n";
      }
      for (const auto& s : f.suggestions) os << "    suggestion: " << s << "\n";
    }
  }
  os << "summary: " << r.functional << " functional, " << r.nonfunctional << " nonfunctional, " << r.uncertifiable
     << " uncertifiable\n";
  return os.str();
}

}  // namespace mls::purity
