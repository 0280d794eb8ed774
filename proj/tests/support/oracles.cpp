#include "oracles.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "mls/environment.hpp"

#ifndef MLS_SOURCE_DIR
#error "MLS_SOURCE_DIR must name the source tree"
#endif
#ifndef MLS_BINARY
#error "MLS_BINARY must name the built interpreter"
#endif

namespace mls::testing {

namespace fs = std::filesystem;

std::string source_path(const std::string& relative) { return std::string(MLS_SOURCE_DIR) + "/" + relative; }

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

int below(std::mt19937_64& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// -- generator oracle --------------------------------------------------------

RngOracle::RngOracle(std::int64_t seed) {
  std::uint64_t z = static_cast<std::uint64_t>(seed) + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  s_ = z == 0 ? 0x9E3779B97F4A7C15ULL : z;
}

double RngOracle::next() {
  s_ ^= s_ >> 12;
  s_ ^= s_ << 25;
  s_ ^= s_ >> 27;
  std::uint64_t word = s_ * 2685821657736338717ULL;
  return static_cast<double>(word >> 11) / 9007199254740992.0;
}

std::vector<double> RngOracle::draw(std::size_t n) {
  std::vector<double> out(n);
  for (auto& d : out) d = next();
  return out;
}

std::vector<double> simplepop_oracle(std::int64_t seed, double birth, double death, double size, int generations) {
  RngOracle rng(seed);
  std::vector<double> sizes{size};
  for (int g = 0; g < generations; ++g) {
    double n = sizes.back();
    auto count_below = [&](double rate) {
      double k = 0;
      for (double u : rng.draw(static_cast<std::size_t>(n))) k += u < rate ? 1 : 0;
      return k;
    };
    double births = count_below(birth);
    double deaths = count_below(death);
    sizes.push_back(std::max(n + births - deaths, 0.0));
  }
  return sizes;
}

// -- state snapshots ---------------------------------------------------------

Snapshot snapshot(const Interpreter& interp) {
  Snapshot snap;
  for (const auto& env : interp.live_environments()) {
    std::map<std::string, BindingImage> frame;
    for (const auto& [name, b] : env->frame()) {
      BindingImage img;
      img.slot = static_cast<int>(b.slot.index());
      img.read_only = b.read_only;
      if (const auto* v = std::get_if<Value>(&b.slot)) {
        img.value = deep_copy(*v);
      } else if (const auto* p = std::get_if<PromisePtr>(&b.slot)) {
        img.identity = p->get();
        img.forced = (*p)->forced;
        if (img.forced) img.value = deep_copy((*p)->value);
      } else if (const auto* a = std::get_if<ActiveBinding>(&b.slot)) {
        img.value = a->getter;
      }
      frame.emplace(name, std::move(img));
    }
    snap.envs.emplace_back(env, std::move(frame));
  }
  return snap;
}

std::string compare(const Snapshot& before) {
  for (const auto& [env, frame] : before.envs) {
    const std::string where = "environment '" + env->tag() + "'";
    if (env->frame().size() != frame.size()) {
      for (const auto& [name, b] : env->frame()) {
        if (!frame.contains(name)) return where + " gained binding '" + name + "'";
      }
      return where + " lost a binding";
    }
    for (const auto& [name, img] : frame) {
      const Binding* b = env->find_local(name);
      if (b == nullptr) return where + " lost binding '" + name + "'";
      if (static_cast<int>(b->slot.index()) != img.slot || b->read_only != img.read_only) {
        return where + " changed the kind of binding '" + name + "'";
      }
      if (const auto* v = std::get_if<Value>(&b->slot)) {
        if (!structurally_equal(*v, img.value)) return where + " changed the value of '" + name + "'";
      } else if (const auto* p = std::get_if<PromisePtr>(&b->slot)) {
        if (p->get() != img.identity || (*p)->forced != img.forced) {
          return where + " changed promise '" + name + "'";
        }
        if (img.forced && !structurally_equal((*p)->value, img.value)) {
          return where + " changed the value of promise '" + name + "'";
        }
      } else if (const auto* a = std::get_if<ActiveBinding>(&b->slot)) {
        if (!a->getter.same_storage(img.value)) return where + " replaced active binding '" + name + "'";
      }
    }
  }
  return {};
}

// -- locality programs -------------------------------------------------------

namespace {

class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::mt19937_64& rng) : rng_(rng) {}

  std::string literal() { return std::to_string(below(rng_, 10)); }

  std::string leaf() {
    static const std::array<const char*, 10> leaves = {"a[1]",   "b",         "t1",        "t2",     "g1[1]",
                                                       "sum(g2)", "length(a)", "sum(a)", "add3(b)", "a[length(a)]"};
    if (chance(rng_, 0.2)) return literal();
    return leaves[static_cast<std::size_t>(below(rng_, static_cast<int>(leaves.size())))];
  }

  std::string scalar(int depth, int fn) {
    if (depth == 0) return leaf();
    int d = depth - 1;
    switch (below(rng_, 9)) {
      case 0: return "(" + scalar(d, fn) + " + " + scalar(d, fn) + ")";
      case 1: return "(" + scalar(d, fn) + " - " + scalar(d, fn) + ")";
      case 2: return "(" + scalar(d, fn) + " * " + scalar(d, fn) + ")";
      case 3: return "max(" + scalar(d, fn) + ", " + scalar(d, fn) + ")";
      case 4:
        return "(if (" + scalar(d, fn) + " > " + scalar(d, fn) + ") " + scalar(d, fn) + " else " + scalar(d, fn) +
               ")";
      case 5:
        if (fn > 0 && calls_ < 2) {
          ++calls_;
          return "f" + std::to_string(below(rng_, fn)) + "(c(" + scalar(d, fn) + ", " + scalar(d, fn) + "), " +
                 scalar(d, fn) + ")";
        }
        return leaf();
      case 6: return "(function(z) z * " + scalar(d, fn) + ")(" + scalar(d, fn) + ")";
      case 7: return "sum(c(" + scalar(d, fn) + ", a))";
      default: return leaf();
    }
  }

  std::string statement(int depth, int fn) {
    const int n = depth > 0 ? 10 : 9;
    switch (below(rng_, n)) {
      case 0: return "t1 <- " + scalar(2, fn);
      case 1: return "t2 <- " + scalar(2, fn);
      case 2: return "a[1] <- " + scalar(2, fn);
      case 3: return "a[length(a)] <- " + scalar(2, fn);
      case 4: return "a <- c(a, " + scalar(1, fn) + ")";
      case 5: return "b <- " + scalar(2, fn);
      case 6: return "k <- 0\n  while (k < 3) {\n    k <- k + 1\n    t1 <- t1 + " + scalar(1, fn) + "\n  }";
      case 7:
        return "h <- function(z) {\n    t1 <- z * 2\n    a[1] <- z\n    sum(a) + t1\n  }\n  t2 <- h(" + scalar(1, fn) +
               ")";
      case 8: return "v <- a\n  v[1] <- " + scalar(1, fn) + "\n  t2 <- t2 + v[1]";
      default:
        return "if (" + scalar(1, fn) + " > " + scalar(1, fn) + ") {\n  " + statement(depth - 1, fn) +
               "\n  } else {\n  " + statement(depth - 1, fn) + "\n  }";
    }
  }

  std::string function(int fn, bool with_default) {
    calls_ = 0;
    std::string out = "f" + std::to_string(fn) + " <- function(a, b" + (with_default ? " = length(a)" : "") +
                      ") {\n  t1 <- 0\n  t2 <- 1\n";
    int statements = 2 + below(rng_, 4);
    for (int i = 0; i < statements; ++i) out += "  " + statement(1, fn) + "\n";
    out += "  sum(a) + t1 + t2 + b\n}\n";
    return out;
  }

 private:
  std::mt19937_64& rng_;
  int calls_ = 0;
};

}  // namespace

PureProgram random_pure_program(std::mt19937_64& rng) {
  ProgramGenerator gen(rng);
  PureProgram p;
  p.definitions =
      "g1 <- c(1, 2, 3)\ng2 <- c(4, 5)\ng3 <- 7\nmk <- function(v) function(w) v + w\nadd3 <- mk(3)\n";
  const int functions = 1 + below(rng, 5);
  std::vector<bool> defaults;
  for (int i = 0; i < functions; ++i) {
    defaults.push_back(chance(rng, 0.3));
    p.definitions += gen.function(i, defaults.back());
  }
  if (chance(rng, 0.5)) p.definitions += "warm <- f0(g1, 1)\n";
  const int target = below(rng, functions);
  const std::string f = "f" + std::to_string(target);
  switch (below(rng, 4)) {
    case 0: p.call = f + "(g1, " + gen.literal() + ")"; break;
    case 1: p.call = f + "(b = " + gen.literal() + ", a = g2)"; break;
    case 2: p.call = f + "(c(g3, 1), g3)"; break;
    default: p.call = defaults[static_cast<std::size_t>(target)] ? f + "(g1)" : f + "(g2, g3)"; break;
  }
  return p;
}

// -- S3 oracle ---------------------------------------------------------------

namespace {
const std::array<std::string, 6> kS3Alphabet = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
}

S3Case random_s3_case(std::mt19937_64& rng) {
  S3Case c;
  std::vector<std::string> pool(kS3Alphabet.begin(), kS3Alphabet.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  c.classes.assign(pool.begin(), pool.begin() + 1 + below(rng, 4));
  for (const auto& name : kS3Alphabet) {
    if (chance(rng, 0.35)) c.methods.insert(name);
  }
  c.has_default = chance(rng, 0.6);
  c.local_methods = chance(rng, 0.3);
  return c;
}

std::optional<std::string> s3_oracle(const S3Case& c) {
  for (const auto& cls : c.classes) {
    if (c.methods.contains(cls)) return cls;
  }
  if (c.has_default) return "default";
  return std::nullopt;
}

std::string s3_program(const S3Case& c) {
  std::vector<std::string> classes;
  for (const auto& cls : c.classes) classes.push_back(quoted(cls));
  std::string out = "obj <- structure(list(value = 1), class = c(" + join(classes, ", ") + "))\n";
  out += "gen <- function(x, unused) UseMethod(\"gen\")\n";
  // Names matching the pattern but bound to non-functions are not methods.
  for (const auto& name : kS3Alphabet) {
    if (!c.methods.contains(name)) out += "gen." + name + " <- \"not a method\"\n";
  }
  if (c.has_default) out += "gen.default <- function(x, unused) \"default\"\n";
  std::string defs;
  for (const auto& m : c.methods) defs += "gen." + m + " <- function(x, unused) \"" + m + "\"\n";
  if (c.local_methods) {
    out += "runner <- function(o) {\n" + defs + "gen(o, stop(\"forced\"))\n}\nrunner(obj)\n";
  } else {
    out += defs + "gen(obj, stop(\"forced\"))\n";
  }
  return out;
}

// -- S4 oracle ---------------------------------------------------------------

std::string s4_class_name(int i) { return "K" + std::to_string(i); }

S4Case random_s4_case(std::mt19937_64& rng) {
  S4Case c;
  const int classes = 2 + below(rng, 5);
  c.contains.resize(static_cast<std::size_t>(classes));
  for (int i = 1; i < classes; ++i) {
    int parents = std::min(i, below(rng, 3));
    std::vector<int> pool(static_cast<std::size_t>(i));
    for (int k = 0; k < i; ++k) pool[static_cast<std::size_t>(k)] = k;
    std::shuffle(pool.begin(), pool.end(), rng);
    c.contains[static_cast<std::size_t>(i)].assign(pool.begin(), pool.begin() + parents);
  }
  c.nargs = static_cast<std::size_t>(1 + below(rng, 3));
  const int methods = 1 + below(rng, 8);
  std::set<std::vector<std::string>> seen;
  for (int attempt = 0; attempt < 50 && static_cast<int>(c.signatures.size()) < methods; ++attempt) {
    std::vector<std::string> sig;
    for (std::size_t a = 0; a < c.nargs; ++a) {
      sig.push_back(chance(rng, 0.3) ? std::string("ANY") : s4_class_name(below(rng, classes)));
    }
    if (seen.insert(sig).second) c.signatures.push_back(sig);
  }
  for (std::size_t a = 0; a < c.nargs; ++a) c.actual.push_back(s4_class_name(below(rng, classes)));
  return c;
}

S4Outcome s4_oracle(const S4Case& c) {
  auto index_of = [](const std::string& name) { return std::stoi(name.substr(1)); };
  auto distances = [&](int from) {
    std::map<int, std::size_t> dist{{from, 0}};
    std::deque<int> queue{from};
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      for (int parent : c.contains[static_cast<std::size_t>(cur)]) {
        if (dist.emplace(parent, dist[cur] + 1).second) queue.push_back(parent);
      }
    }
    return dist;
  };

  using Key = std::pair<std::size_t, std::vector<std::size_t>>;
  std::vector<std::pair<Key, std::size_t>> admissible;
  for (std::size_t m = 0; m < c.signatures.size(); ++m) {
    Key key;
    bool ok = true;
    for (std::size_t a = 0; a < c.nargs && ok; ++a) {
      auto dist = distances(index_of(c.actual[a]));
      const std::string& declared = c.signatures[m][a];
      std::size_t d = 0;
      if (declared == "ANY") {
        d = dist.size();
      } else if (auto it = dist.find(index_of(declared)); it != dist.end()) {
        d = it->second;
      } else {
        ok = false;
      }
      key.first += d;
      key.second.push_back(d);
    }
    if (ok) admissible.emplace_back(std::move(key), m);
  }
  if (admissible.empty()) return {S4Outcome::Kind::NoMethod, 0};
  std::sort(admissible.begin(), admissible.end());
  if (admissible.size() > 1 && admissible[0].first == admissible[1].first) return {S4Outcome::Kind::Ambiguous, 0};
  return {S4Outcome::Kind::Selected, admissible[0].second};
}

std::string s4_program(const S4Case& c) {
  std::string out;
  for (std::size_t i = 0; i < c.contains.size(); ++i) {
    out += "setClass(\"" + s4_class_name(static_cast<int>(i)) + "\"";
    if (!c.contains[i].empty()) {
      std::vector<std::string> parents;
      for (int p : c.contains[i]) parents.push_back(quoted(s4_class_name(p)));
      out += ", contains = c(" + join(parents, ", ") + ")";
    }
    out += ")\n";
  }
  std::vector<std::string> formals;
  for (std::size_t a = 0; a < c.nargs; ++a) formals.push_back("x" + std::to_string(a + 1));
  const std::string formal_list = join(formals, ", ");
  out += "setGeneric(\"g\", function(" + formal_list + ") standardGeneric(\"g\"))\n";
  for (std::size_t m = 0; m < c.signatures.size(); ++m) {
    std::vector<std::string> sig;
    for (const auto& s : c.signatures[m]) sig.push_back(quoted(s));
    out += "setMethod(\"g\", signature(" + join(sig, ", ") + "), function(" + formal_list + ") \"m" +
           std::to_string(m) + "\")\n";
  }
  std::vector<std::string> args;
  for (const auto& a : c.actual) args.push_back("new(\"" + a + "\")");
  out += "g(" + join(args, ", ") + ")\n";
  return out;
}

std::string describe(const S4Case& c) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < c.contains.size(); ++i) {
    ss << s4_class_name(static_cast<int>(i)) << " <";
    for (int p : c.contains[i]) ss << " " << s4_class_name(p);
    ss << "; ";
  }
  ss << "methods:";
  for (const auto& sig : c.signatures) ss << " (" << join(sig, ",") << ")";
  ss << "; actual (" << join(c.actual, ",") << ")";
  return ss.str();
}

std::string describe(const S4Outcome& o) {
  switch (o.kind) {
    case S4Outcome::Kind::Selected: return "m" + std::to_string(o.method);
    case S4Outcome::Kind::NoMethod: return "no method";
    case S4Outcome::Kind::Ambiguous: return "ambiguous";
  }
  return "?";
}

// -- analyzer fixtures -------------------------------------------------------

std::vector<FixtureModule> load_fixtures() {
  static const std::regex expect_re(R"(^# expect: (\S+) (\S+)(?: (\S+))?\s*$)");
  static const std::regex probe_re(R"(^# probe: (.+?)\s*$)");
  std::vector<fs::path> files;
  for (const char* dir : {"corpus/pure", "corpus/impure", "corpus/uncertifiable"}) {
    for (const auto& entry : fs::directory_iterator(source_path(dir))) {
      if (entry.path().extension() == ".mls") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<FixtureModule> out;
  for (const auto& path : files) {
    FixtureModule m;
    m.name = path.stem().string();
    m.path = path.string();
    m.source = read_text(m.path);
    std::istringstream lines(m.source);
    std::string line;
    std::smatch match;
    while (std::getline(lines, line)) {
      if (std::regex_match(line, match, expect_re)) {
        Expectation e{m.name, match[1], match[2], {}};
        std::string kinds = match[3];
        std::istringstream ks(kinds);
        std::string kind;
        while (std::getline(ks, kind, ',')) {
          if (!kind.empty()) e.kinds.insert(kind);
        }
        m.expectations.push_back(std::move(e));
      } else if (std::regex_match(line, match, probe_re)) {
        m.probes.push_back(match[1]);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string runnable_source(const std::string& module_source) {
  std::istringstream lines(module_source);
  std::string line;
  std::string out;
  while (std::getline(lines, line)) {
    if (line.rfind("import ", 0) != 0) out += line;
    out += '\n';
  }
  return out;
}

std::string instantiate_probe(const std::string& probe, std::mt19937_64& rng) {
  std::string out;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    if (probe[i] == '$' && i + 1 < probe.size() && probe[i + 1] == 'n') {
      out += std::to_string(below(rng, 9));
      ++i;
    } else if (probe[i] == '$' && i + 1 < probe.size() && probe[i + 1] == 'x') {
      std::vector<std::string> elems;
      int len = 1 + below(rng, 5);
      for (int k = 0; k < len; ++k) elems.push_back(std::to_string(below(rng, 1001) - 500) + " / 100");
      out += "c(" + join(elems, ", ") + ")";
      ++i;
    } else {
      out += probe[i];
    }
  }
  return out;
}

// -- processes ---------------------------------------------------------------

ProcessResult run_mls(const std::string& args) {
  ProcessResult r;
  std::string cmd = std::string("\"") + MLS_BINARY + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace mls::testing
