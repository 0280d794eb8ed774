#include "mls/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mls/environment.hpp"
#include "mls/error.hpp"
#include "mls/interpreter.hpp"
#include "mls/purity.hpp"
#include "mls/reader.hpp"

namespace mls::cli {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) return std::nullopt;
  return ss.str();
}

std::vector<fs::path> module_files(const std::vector<std::string>& paths, std::ostream& err, bool& ok) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mls") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p, ec)) {
      out.emplace_back(p);
    } else {
      err << "Error: cannot read '" << p << "'\n";
      ok = false;
    }
  }
  return out;
}

}  // namespace

int run_file(const std::string& path, std::optional<std::int64_t> seed, std::ostream& out, std::ostream& err) {
  auto source = read_file(path);
  if (!source) {
    err << "Error: cannot read '" << path << "'\n";
    return kInputError;
  }
  std::vector<ExprPtr> program;
  try {
    program = parse_program(*source);
  } catch (const SyntaxError& e) {
    err << path << ": " << e.describe() << "\n";
    return kInputError;
  }
  Interpreter interp(out, err);
  try {
    if (seed) interp.set_seed(*seed);
    interp.run_toplevel(program, true);
  } catch (const Error& e) {
    out.flush();
    err << e.describe() << "\n";
    return kRuntimeError;
  } catch (const FrameReturn&) {
    err << "Error: no function to return from, jumping to top level\n";
    return kRuntimeError;
  }
  return kOk;
}

int repl(std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
  Interpreter interp(out, err);
  std::string pending;
  std::string line;
  for (;;) {
    if (prompt) out << (pending.empty() ? "> " : "+ ") << std::flush;
    if (!std::getline(in, line)) break;
    if (pending.empty()) {
      if (line == ":quit" || line == ":q") break;
      if (line == ":env") {
        for (const auto& name : interp.global_env()->names()) {
          if (name.empty() || name[0] == '.') continue;
          const Binding* b = interp.global_env()->find_local(name);
          std::string cls = b->is_immediate() ? implicit_class(std::get<Value>(b->slot)).front() : "promise";
          out << name << " <" << cls << ">\n";
        }
        continue;
      }
    }
    pending += line;
    pending += '\n';
    std::vector<ExprPtr> exprs;
    try {
      exprs = parse_program(pending);
    } catch (const SyntaxError& e) {
      if (e.at_end()) continue;
      err << e.describe() << "\n";
      pending.clear();
      continue;
    }
    pending.clear();
    try {
      interp.run_toplevel(exprs, true);
    } catch (const Error& e) {
      out.flush();
      err << e.describe() << "\n";
    } catch (const FrameReturn&) {
      err << "Error: no function to return from, jumping to top level\n";
    }
  }
  if (prompt) out << "\n";
  return kOk;
}

int analyze(const std::vector<std::string>& paths, ReportFormat format, std::ostream& out, std::ostream& err) {
  bool ok = true;
  auto files = module_files(paths, err, ok);
  if (!ok) return kInputError;
  if (files.empty()) {
    err << "Error: no .mls modules found\n";
    return kInputError;
  }
  purity::Analyzer analyzer;
  std::map<std::string, std::string> seen;
  for (const auto& f : files) {
    std::string name = f.stem().string();
    if (auto it = seen.find(name); it != seen.end()) {
      err << "Error: module '" << name << "' defined by both " << it->second << " and " << f.string() << "\n";
      return kInputError;
    }
    seen[name] = f.string();
    auto source = read_file(f.string());
    if (!source) {
      err << "Error: cannot read '" << f.string() << "'\n";
      return kInputError;
    }
    try {
      analyzer.add_source(name, *source);
    } catch (const Error& e) {
      err << f.string() << ": " << e.describe() << "\n";
      return kInputError;
    }
  }
  purity::AnalysisReport report = analyzer.analyze();
  out << (format == ReportFormat::Json ? purity::to_json(report) : purity::to_text(report));
  switch (report.worst()) {
    case purity::Status::Functional: return kOk;
    case purity::Status::Nonfunctional: return kNonfunctional;
    case purity::Status::Uncertifiable: return kUncertifiable;
  }
  return kOk;
}

int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
         bool interactive) {
  CLI::App app{"MLS interpreter and purity analyzer", "mls"};
  app.require_subcommand(1, 1);

  std::string script;
  std::optional<std::int64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a script");
  run_cmd->add_option("file", script, "Script to evaluate")->required();
  run_cmd->add_option("--seed", seed, "Seed the generator before evaluation");

  auto* repl_cmd = app.add_subcommand("repl", "Interactive session (:env lists bindings, :quit exits)");

  std::vector<std::string> paths;
  std::string format = "text";
  auto* analyze_cmd = app.add_subcommand("analyze", "Certify functions in modules");
  analyze_cmd->add_option("paths", paths, "Module files or directories")->required();
  analyze_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  try {
    if (run_cmd->parsed()) return run_file(script, seed, out, err);
    if (repl_cmd->parsed()) return repl(in, out, err, interactive);
    if (analyze_cmd->parsed()) {
      return analyze(paths, format == "json" ? ReportFormat::Json : ReportFormat::Text, out, err);
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kInputError;
}

}  // namespace mls::cli
