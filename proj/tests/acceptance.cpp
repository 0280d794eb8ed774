// Runs every acceptance criterion end to end and prints one PASS/FAIL line
// per criterion. Exit status is nonzero when any criterion fails.

#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/interpreter.hpp"
#include "mls/purity.hpp"
#include "mls/reader.hpp"
#include "mls/s4.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace mls;
using namespace mls::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

/// Interpreter with its console captured.
struct Session {
  std::ostringstream out;
  std::ostringstream err;
  Interpreter interp{out, err};

  Value eval(const std::string& source) { return interp.eval_source(source); }
};

std::string message_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.message();
  }
  return {};
}

// 1 -----------------------------------------------------------------------

Outcome locality() {
  std::mt19937_64 rng(20261016);
  const int programs = 200;
  for (int i = 0; i < programs; ++i) {
    PureProgram p = random_pure_program(rng);
    Session s;
    try {
      s.eval(p.definitions);
      Snapshot before = snapshot(s.interp);
      s.eval(p.call);
      if (std::string diff = compare(before); !diff.empty()) {
        return fail("program " + std::to_string(i) + ": " + diff + "\n" + p.definitions + p.call);
      }
    } catch (const Error& e) {
      return fail("program " + std::to_string(i) + " raised " + e.describe() + "\n" + p.definitions + p.call);
    }
  }
  return {true, std::to_string(programs) + "/" + std::to_string(programs) + " random programs left every "
                                                                           "pre-existing environment unchanged"};
}

// 2 -----------------------------------------------------------------------

Outcome laziness() {
  struct Fixed {
    std::string program;
    double expected;
  };
  const std::vector<Fixed> fixed = {
      {"g <- function(a, b) a\ng(1, stop(\"boom\"))", 1},
      {"h <- function(x, y = stop(\"default\")) x\nh(2)", 2},
      {"sg <- function(x, y) UseMethod(\"sg\")\nsg.default <- function(x, y) x\nsg(3, stop(\"no\"))", 3},
      {"setGeneric(\"lz\", function(x, y) standardGeneric(\"lz\"), signature = \"x\")\n"
       "setMethod(\"lz\", \"numeric\", function(x, y) x)\nlz(4, stop(\"no\"))",
       4},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\ntwice <- function(v) v + v\ntwice(bump())\nn", 1},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\nnever <- function(v) 0\nnever(bump())\nn", 0},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\nd <- function(x, y = x * 2) x + y + x\nd(bump())\nn", 1},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\ninner <- function(q) q + q\n"
       "outer <- function(p) inner(p) + p\nouter(bump())\nn",
       1},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\nsg <- function(x) UseMethod(\"sg\")\n"
       "sg.default <- function(x) x + x\nsg(bump())\nn",
       1},
      {"n <- 0\nbump <- function() { n <<- n + 1; n }\n"
       "setGeneric(\"sq\", function(x) standardGeneric(\"sq\"))\n"
       "setMethod(\"sq\", \"numeric\", function(x) x * x)\nsq(bump())\nn",
       1},
  };
  for (const auto& f : fixed) {
    Session s;
    try {
      double got = as_double_scalar(s.eval(f.program), "result");
      if (got != f.expected) return fail("expected " + std::to_string(f.expected) + " from:\n" + f.program);
    } catch (const Error& e) {
      return fail(e.describe() + " from:\n" + f.program);
    }
  }

  // Each formal is forced 0..3 times; its counter must end at min(1, forces).
  std::mt19937_64 rng(7);
  const int cases = 200;
  for (int c = 0; c < cases; ++c) {
    const int formals = 1 + static_cast<int>(rng() % 4);
    const int mode = static_cast<int>(rng() % 3);  // direct, wrapper, S3 dispatch
    std::string src;
    std::vector<std::string> names;
    std::vector<int> forces;
    std::string body = "0";
    for (int k = 1; k <= formals; ++k) {
      names.push_back("p" + std::to_string(k));
      forces.push_back(static_cast<int>(rng() % 4));
      src += "n" + std::to_string(k) + " <- 0\n";
      src += "tick" + std::to_string(k) + " <- function() { n" + std::to_string(k) + " <<- n" + std::to_string(k) +
             " + 1; " + std::to_string(k) + " }\n";
      for (int r = 0; r < forces.back(); ++r) body += " + " + names.back();
    }
    std::string formal_list;
    std::string args;
    for (int k = 0; k < formals; ++k) {
      formal_list += (k ? ", " : "") + names[static_cast<std::size_t>(k)];
      bool unforced = forces[static_cast<std::size_t>(k)] == 0 && !(mode == 2 && k == 0);
      args += std::string(k ? ", " : "") +
              (unforced && rng() % 2 ? "stop(\"never forced\")" : "tick" + std::to_string(k + 1) + "()");
    }
    if (mode == 2) {
      src += "f <- function(" + formal_list + ") UseMethod(\"f\")\n";
      src += "f.default <- function(" + formal_list + ") " + body + "\n";
    } else {
      src += "f <- function(" + formal_list + ") " + body + "\n";
    }
    std::string callee = "f";
    if (mode == 1) {
      src += "w <- function(" + formal_list + ") f(" + formal_list + ")\n";
      callee = "w";
    }
    src += callee + "(" + args + ")\n";
    Session s;
    try {
      s.eval(src);
      for (int k = 0; k < formals; ++k) {
        int expected = forces[static_cast<std::size_t>(k)] > 0 || (mode == 2 && k == 0) ? 1 : 0;
        double counted = as_double_scalar(s.eval("n" + std::to_string(k + 1)), "counter");
        if (counted != expected) {
          return fail("argument " + std::to_string(k + 1) + " forced " + std::to_string(counted) +
                      " times, expected " + std::to_string(expected) + ":\n" + src);
        }
      }
    } catch (const Error& e) {
      return fail(e.describe() + " from:\n" + src);
    }
  }
  return {true, std::to_string(fixed.size()) + " fixed cases and " + std::to_string(cases) +
                    " counter-instrumented calls forced each argument at most once"};
}

// 3 -----------------------------------------------------------------------

Outcome s3_dispatch() {
  std::mt19937_64 rng(3);
  const int cases = 500;
  for (int i = 0; i < cases; ++i) {
    S3Case c = random_s3_case(rng);
    std::optional<std::string> expected = s3_oracle(c);
    std::string program = s3_program(c);
    Session s;
    std::string got;
    try {
      got = as_string_scalar(s.eval(program), "result");
    } catch (const Error& e) {
      if (!expected && e.message().rfind("no applicable method for 'gen'", 0) == 0) continue;
      return fail("case " + std::to_string(i) + " raised " + e.describe() + "\n" + program);
    }
    if (!expected || got != *expected) {
      return fail("case " + std::to_string(i) + ": selected " + got + ", oracle " + expected.value_or("error") +
                  "\n" + program);
    }
  }

  // Instance-based dispatch: class vectors sharing an element agree or
  // diverge depending on which methods exist.
  struct Fixture {
    std::string methods;
    std::string ct_class;
    std::string lt_class;
    std::string ct_expected;
    std::string lt_expected;
  };
  const std::string ct = "c(\"POSIXct\", \"POSIXt\")";
  const std::string lt = "c(\"POSIXlt\", \"POSIXt\")";
  const std::string ct_prefix = "c(\"POSIXt\", \"POSIXct\")";
  const std::string lt_prefix = "c(\"POSIXt\", \"POSIXlt\")";
  const std::string m_t = "fmt.POSIXt <- function(x) \"POSIXt\"\n";
  const std::string m_ct = "fmt.POSIXct <- function(x) \"POSIXct\"\n";
  const std::string m_lt = "fmt.POSIXlt <- function(x) \"POSIXlt\"\n";
  const std::vector<Fixture> fixtures = {
      {m_t, ct, lt, "POSIXt", "POSIXt"},
      {m_t + m_ct + m_lt, ct, lt, "POSIXct", "POSIXlt"},
      {m_t + m_ct, ct, lt, "POSIXct", "POSIXt"},
      {m_ct + m_lt, ct_prefix, lt_prefix, "POSIXct", "POSIXlt"},
      {m_t + m_ct + m_lt, ct_prefix, lt_prefix, "POSIXt", "POSIXt"},
  };
  for (const auto& f : fixtures) {
    Session s;
    std::string program = "fmt <- function(x) UseMethod(\"fmt\")\n" + f.methods +
                          "a <- structure(list(sec = 0), class = " + f.ct_class + ")\n" +
                          "b <- structure(list(sec = 0), class = " + f.lt_class + ")\n";
    try {
      s.eval(program);
      std::string ga = as_string_scalar(s.eval("fmt(a)"), "result");
      std::string gb = as_string_scalar(s.eval("fmt(b)"), "result");
      if (ga != f.ct_expected || gb != f.lt_expected) {
        return fail("POSIXt fixture selected " + ga + "/" + gb + "\n" + program);
      }
    } catch (const Error& e) {
      return fail(e.describe() + "\n" + program);
    }
  }
  return {true, std::to_string(cases) + "/" + std::to_string(cases) + " oracle cases agree; " +
                    std::to_string(fixtures.size()) + " POSIXt fixtures reproduce instance-based dispatch"};
}

// 4 -----------------------------------------------------------------------

S4Outcome select_through_api(const S4Case& c) {
  s4::ClassRegistry registry;
  for (std::size_t i = 0; i < c.contains.size(); ++i) {
    std::vector<std::string> parents;
    for (int p : c.contains[i]) parents.push_back(s4_class_name(p));
    registry.set_class(s4_class_name(static_cast<int>(i)), {}, parents);
  }
  s4::GenericFunction g;
  g.name = "g";
  for (std::size_t a = 0; a < c.nargs; ++a) {
    g.formals.push_back({"x" + std::to_string(a + 1), nullptr});
    g.signature.push_back("x" + std::to_string(a + 1));
  }
  for (std::size_t m = 0; m < c.signatures.size(); ++m) g.set_method(c.signatures[m], Value::dbl(double(m)));
  try {
    s4::Selection sel = s4::select_method(g, c.actual, registry);
    return {S4Outcome::Kind::Selected, static_cast<std::size_t>(sel.method->implementation.doubles()[0])};
  } catch (const DispatchError& e) {
    return {e.reason() == DispatchError::Reason::Ambiguous ? S4Outcome::Kind::Ambiguous
                                                           : S4Outcome::Kind::NoMethod,
            0};
  }
}

S4Outcome select_through_language(const S4Case& c) {
  Session s;
  try {
    std::string label = as_string_scalar(s.eval(s4_program(c)), "result");
    return {S4Outcome::Kind::Selected, static_cast<std::size_t>(std::stoul(label.substr(1)))};
  } catch (const DispatchError& e) {
    return {e.reason() == DispatchError::Reason::Ambiguous ? S4Outcome::Kind::Ambiguous
                                                           : S4Outcome::Kind::NoMethod,
            0};
  }
}

Outcome s4_dispatch() {
  std::mt19937_64 rng(4);
  const int cases = 300;
  int ambiguous = 0;
  int none = 0;
  for (int i = 0; i < cases; ++i) {
    S4Case c = random_s4_case(rng);
    S4Outcome expected = s4_oracle(c);
    ambiguous += expected.kind == S4Outcome::Kind::Ambiguous;
    none += expected.kind == S4Outcome::Kind::NoMethod;
    S4Outcome api;
    S4Outcome lang;
    try {
      api = select_through_api(c);
      lang = select_through_language(c);
    } catch (const Error& e) {
      return fail("case " + std::to_string(i) + " raised " + e.describe() + ": " + describe(c));
    }
    if (!(api == expected) || !(lang == expected)) {
      return fail("case " + std::to_string(i) + ": oracle " + describe(expected) + ", select_method " +
                  describe(api) + ", language " + describe(lang) + ": " + describe(c));
    }
  }
  return {true, std::to_string(cases) + "/" + std::to_string(cases) + " hierarchies agree with the BFS oracle (" +
                    std::to_string(ambiguous) + " ambiguous, " + std::to_string(none) + " without a method)"};
}

// 5 -----------------------------------------------------------------------

const char* kRefPrelude = R"(
Acc <- setRefClass("Acc", fields = list(total = "numeric"),
  methods = list(add = function(x) {
    total <<- total + x
    invisible(.self)
  }))
Pop <- setRefClass("Pop", fields = list(birth = "numeric", size = "numeric"), read_only = "birth",
  methods = list(
    tweak = function() birth <<- 1,
    scratch = function() {
      v <- size
      v[1] <- 0
      v
    }))
Holder <- setRefClass("Holder", fields = list(inner = "Acc"))
)";

Outcome reference_semantics() {
  struct Case {
    std::string name;
    std::string program;
    std::string expected_error;  // empty when the program must succeed
  };
  const std::vector<Case> cases = {
      {"alias visibility",
       "a <- Acc$new(total = 0)\nb <- a\nb$add(5)\nstopifnot(a$total == 5)\n"
       "bump <- function(acc) {\n  acc$total <- acc$total + 1\n  0\n}\nbump(a)\nstopifnot(b$total == 6)\n"
       "a$total <- 10\nstopifnot(b$total == 10)\nq <- list(a)\nq[[1]]$add(1)\nstopifnot(b$total == 11)\n",
       ""},
      {"read-only field assignment", "p <- Pop$new(birth = 0.08, size = 100)\np$birth <- 1\n", "read-only"},
      {"read-only field from a method", "p <- Pop$new(birth = 0.08, size = 100)\np$tweak()\n", "read-only"},
      {"read-only value survives rejection",
       "p <- Pop$new(birth = 0.08, size = 100)\nr <- copy(p)\nstopifnot(p$birth == 0.08, r$birth == 0.08)\n", ""},
      {"read-only field of a copy", "p <- Pop$new(birth = 0.08, size = 100)\nr <- p$copy()\nr$birth <- 2\n",
       "read-only"},
      {"copy independence",
       "p <- Pop$new(birth = 0.08, size = 100)\nr <- copy(p)\np$size <- c(p$size, 5)\n"
       "stopifnot(length(r$size) == 1)\nr$size <- 0\nstopifnot(p$size[1] == 100)\n"
       "h <- Holder$new(inner = Acc$new(total = 1))\nh2 <- copy(h)\nh2$inner$add(10)\n"
       "stopifnot(h$inner$total == 1, h2$inner$total == 11)\n",
       ""},
      {"ordinary field values keep value semantics",
       "p <- Pop$new(birth = 0.08, size = c(100, 90))\ns <- p$size\ns[1] <- -1\n"
       "stopifnot(p$size[1] == 100)\nf <- function(v) {\n  v[1] <- 99\n  v\n}\nout <- f(p$size)\n"
       "stopifnot(out[1] == 99, p$size[1] == 100)\nw <- p$scratch()\nstopifnot(w[1] == 0, p$size[1] == 100)\n",
       ""},
  };
  for (const auto& c : cases) {
    Session s;
    std::string program = std::string(kRefPrelude) + c.program;
    std::string msg = message_of([&] { s.eval(program); });
    if (c.expected_error.empty() && !msg.empty()) return fail(c.name + ": " + msg);
    if (!c.expected_error.empty() && msg.find(c.expected_error) == std::string::npos) {
      return fail(c.name + ": expected an error mentioning '" + c.expected_error + "', got '" + msg + "'");
    }
  }
  return {true, std::to_string(cases.size()) + " dedicated reference-semantics cases pass"};
}

// 6 -----------------------------------------------------------------------

Outcome simplepop() {
  const std::string script = read_text(source_path("corpus/scripts/simplepop.mls"));
  auto trajectory = [&]() {
    Session s;
    s.interp.set_seed(42);
    s.interp.run_toplevel(parse_program(script), false);
    return s.eval("p$size").doubles();
  };
  std::vector<double> first;
  std::vector<double> second;
  try {
    first = trajectory();
    second = trajectory();
  } catch (const Error& e) {
    return fail(e.describe());
  }
  std::vector<double> expected = simplepop_oracle(42, 0.08, 0.1, 100, 50);
  if (first.size() != 51) return fail("trajectory has " + std::to_string(first.size()) + " values");
  if (first != second) return fail("two runs from seed 42 differ");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (first[i] != expected[i]) {
      return fail("generation " + std::to_string(i) + ": " + std::to_string(first[i]) + " vs oracle " +
                  std::to_string(expected[i]));
    }
  }
  std::ostringstream head;
  for (std::size_t i = 0; i < 5; ++i) head << (i ? " " : "") << first[i];
  return {true, "51-value trajectory identical across runs and equal to the oracle (" + head.str() + " ... " +
                    std::to_string(static_cast<long>(first.back())) + ")"};
}

// 7 -----------------------------------------------------------------------

Outcome analyzer_fixtures() {
  std::vector<FixtureModule> modules = load_fixtures();
  purity::Analyzer analyzer;
  for (const auto& m : modules) analyzer.add_source(m.name, m.source);
  purity::AnalysisReport report = analyzer.analyze();

  std::size_t labelled = 0;
  std::set<std::string> kinds_seen;
  bool functional_seen = false;
  for (const auto& m : modules) {
    for (const auto& e : m.expectations) {
      ++labelled;
      const purity::Verdict* v = report.find(e.module, e.function);
      if (v == nullptr) return fail("no verdict for " + e.module + "::" + e.function);
      std::set<std::string> kinds;
      for (const auto& r : v->reasons) kinds.insert(std::string(purity::to_string(r.kind)));
      if (std::string(purity::to_string(v->status)) != e.status || kinds != e.kinds) {
        return fail(e.module + "::" + e.function + " is " + std::string(purity::to_string(v->status)) +
                    ", labelled " + e.status);
      }
      kinds_seen.insert(e.kinds.begin(), e.kinds.end());
      functional_seen |= e.status == "Functional";
    }
  }
  std::size_t analyzed = report.functional + report.nonfunctional + report.uncertifiable;
  if (labelled != analyzed) return fail("only " + std::to_string(labelled) + " of " + std::to_string(analyzed) +
                                        " analyzed functions are labelled");
  if (labelled < 20) return fail("only " + std::to_string(labelled) + " labelled functions");
  if (kinds_seen.size() != 6 || !functional_seen) return fail("labels do not span every verdict kind");

  Session base;
  for (const auto& name : base.interp.base_env()->names()) {
    if (!analyzer.table().find(name)) return fail("builtin '" + name + "' is missing from the purity table");
  }

  // Differential check: every Functional function is probed twice from
  // snapshotted states with the generator and options perturbed between.
  std::mt19937_64 rng(11);
  std::size_t probed = 0;
  for (const auto& m : modules) {
    for (const auto& e : m.expectations) {
      if (e.status != "Functional") continue;
      bool covered = false;
      for (const auto& p : m.probes) covered |= p.rfind(e.function + "(", 0) == 0;
      if (!covered) return fail(e.module + "::" + e.function + " has no probe");
    }
    for (const auto& probe : m.probes) {
      for (int round = 0; round < 5; ++round) {
        std::string call = instantiate_probe(probe, rng);
        Session s;
        try {
          for (const auto& other : modules) {
            if (fs::path(other.path).parent_path().filename() == "pure") s.eval(runnable_source(other.source));
          }
          Snapshot before = snapshot(s.interp);
          Value first = s.eval(call);
          if (std::string diff = compare(before); !diff.empty()) return fail(call + ": " + diff);
          s.interp.set_seed(static_cast<std::int64_t>(rng() % 1000));
          s.interp.set_option("tol", Value::dbl(123.0));
          s.interp.set_option("digits", Value::dbl(2.0));
          Snapshot again = snapshot(s.interp);
          Value second = s.eval(call);
          if (std::string diff = compare(again); !diff.empty()) return fail(call + ": " + diff);
          if (!structurally_equal(first, second)) return fail(call + " returned different values");
        } catch (const Error& e) {
          return fail(call + " raised " + e.describe());
        }
        ++probed;
      }
    }
  }
  return {true, std::to_string(labelled) + " labelled functions match; " + std::to_string(probed) +
                    " differential probes confirm every Functional verdict"};
}

// 8 -----------------------------------------------------------------------

Outcome factorial() {
  Session s;
  try {
    s.eval(read_text(source_path("corpus/pure/factorial.mls")));
    s.eval(read_text(source_path("corpus/pure/parity.mls")));
    double f5 = as_double_scalar(s.eval("factorial(5)"), "factorial(5)");
    if (f5 != 120) return fail("factorial(5) = " + std::to_string(f5));
    if (!as_logical_scalar(s.eval("is_even(10)"), "is_even") || as_logical_scalar(s.eval("is_odd(10)"), "is_odd")) {
      return fail("parity functions disagree with arithmetic");
    }
  } catch (const Error& e) {
    return fail(e.describe());
  }
  purity::Analyzer analyzer;
  analyzer.add_source("factorial", read_text(source_path("corpus/pure/factorial.mls")));
  analyzer.add_source("parity", read_text(source_path("corpus/pure/parity.mls")));
  purity::AnalysisReport report = analyzer.analyze();
  for (const auto& [module, fn] : std::vector<std::pair<std::string, std::string>>{
           {"factorial", "factorial"}, {"parity", "is_even"}, {"parity", "is_odd"}}) {
    const purity::Verdict* v = report.find(module, fn);
    if (v == nullptr || v->status != purity::Status::Functional) return fail(module + "::" + fn + " not Functional");
  }
  ProcessResult run = run_mls("run \"" + source_path("corpus/scripts/factorial.mls") + "\"");
  if (run.exit_code != 0 || run.output.find("[1] 120") == std::string::npos) {
    return fail("script run did not print 120:\n" + run.output);
  }
  return {true, "factorial(5) = 120; factorial and the even/odd cycle certified Functional"};
}

// 9 -----------------------------------------------------------------------

Outcome determinism() {
  std::vector<fs::path> scripts;
  for (const auto& entry : fs::directory_iterator(source_path("corpus/scripts"))) {
    if (entry.path().extension() == ".mls") scripts.push_back(entry.path());
  }
  std::sort(scripts.begin(), scripts.end());
  if (scripts.empty()) return fail("no corpus scripts");
  for (const auto& script : scripts) {
    std::string args = "run --seed 7 \"" + script.string() + "\"";
    ProcessResult a = run_mls(args);
    ProcessResult b = run_mls(args);
    if (a.exit_code != 0) return fail(script.filename().string() + " exited " + std::to_string(a.exit_code));
    if (a.output != b.output || a.exit_code != b.exit_code) {
      return fail(script.filename().string() + " output differs between runs");
    }
  }
  std::string args = "analyze --format json \"" + source_path("corpus/pure") + "\" \"" +
                     source_path("corpus/impure") + "\" \"" + source_path("corpus/uncertifiable") + "\"";
  ProcessResult a = run_mls(args);
  ProcessResult b = run_mls(args);
  if (a.output.empty() || a.output != b.output || a.exit_code != b.exit_code) {
    return fail("analyze --format json output differs between runs");
  }
  return {true, std::to_string(scripts.size()) + " scripts and the JSON report are byte-identical across runs"};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, "locality", locality},
      {2, "laziness", laziness},
      {3, "S3 dispatch oracle", s3_dispatch},
      {4, "S4 dispatch oracle", s4_dispatch},
      {5, "reference semantics", reference_semantics},
      {6, "SimplePop reproduction", simplepop},
      {7, "analyzer fixtures", analyzer_fixtures},
      {8, "factorial", factorial},
      {9, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("unexpected exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << c.number << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
