#include "mls/expr.hpp"

namespace mls {

std::optional<std::string> callee_name(const expr::Call& call) {
  if (const auto* s = call.callee->as<expr::Symbol>()) return s->name;
  return std::nullopt;
}

namespace {

bool exprs_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!expr_equal(a[i], b[i])) return false;
  }
  return true;
}

bool args_equal(const std::vector<CallArg>& a, const std::vector<CallArg>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !expr_equal(a[i].value, b[i].value)) return false;
  }
  return true;
}

bool formals_equal(const std::vector<Formal>& a, const std::vector<Formal>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !expr_equal(a[i].default_value, b[i].default_value)) return false;
  }
  return true;
}

struct EqualVisitor {
  const Node& other;

  bool operator()(const expr::Constant& x) const {
    return structurally_equal(x.value, std::get<expr::Constant>(other.data).value);
  }
  bool operator()(const expr::Symbol& x) const { return x.name == std::get<expr::Symbol>(other.data).name; }
  bool operator()(const expr::Call& x) const {
    const auto& y = std::get<expr::Call>(other.data);
    return expr_equal(x.callee, y.callee) && args_equal(x.args, y.args);
  }
  bool operator()(const expr::FunctionLiteral& x) const {
    const auto& y = std::get<expr::FunctionLiteral>(other.data);
    return formals_equal(x.formals, y.formals) && expr_equal(x.body, y.body);
  }
  bool operator()(const expr::Assign& x) const {
    const auto& y = std::get<expr::Assign>(other.data);
    return expr_equal(x.target, y.target) && expr_equal(x.value, y.value);
  }
  bool operator()(const expr::SuperAssign& x) const {
    const auto& y = std::get<expr::SuperAssign>(other.data);
    return expr_equal(x.target, y.target) && expr_equal(x.value, y.value);
  }
  bool operator()(const expr::Block& x) const { return exprs_equal(x.exprs, std::get<expr::Block>(other.data).exprs); }
  bool operator()(const expr::If& x) const {
    const auto& y = std::get<expr::If>(other.data);
    return expr_equal(x.cond, y.cond) && expr_equal(x.then_branch, y.then_branch) &&
           expr_equal(x.else_branch, y.else_branch);
  }
  bool operator()(const expr::While& x) const {
    const auto& y = std::get<expr::While>(other.data);
    return expr_equal(x.cond, y.cond) && expr_equal(x.body, y.body);
  }
  bool operator()(const expr::Index& x) const {
    const auto& y = std::get<expr::Index>(other.data);
    return x.element == y.element && expr_equal(x.object, y.object) && exprs_equal(x.indices, y.indices);
  }
  bool operator()(const expr::IndexAssign& x) const {
    const auto& y = std::get<expr::IndexAssign>(other.data);
    return x.element == y.element && x.super == y.super && expr_equal(x.object, y.object) &&
           exprs_equal(x.indices, y.indices) && expr_equal(x.value, y.value);
  }
  bool operator()(const expr::FieldAccess& x) const {
    const auto& y = std::get<expr::FieldAccess>(other.data);
    return x.name == y.name && expr_equal(x.object, y.object);
  }
  bool operator()(const expr::FieldAssign& x) const {
    const auto& y = std::get<expr::FieldAssign>(other.data);
    return x.name == y.name && x.super == y.super && expr_equal(x.object, y.object) &&
           expr_equal(x.value, y.value);
  }
};

ExprPtr call_of(std::string name, std::vector<CallArg> args, SourceLocation loc) {
  return make_node(expr::Call{make_symbol(std::move(name), loc), std::move(args)}, loc);
}

std::vector<CallArg> positional(std::vector<ExprPtr> exprs) {
  std::vector<CallArg> out;
  out.reserve(exprs.size());
  for (auto& e : exprs) out.push_back({std::nullopt, std::move(e)});
  return out;
}

ExprPtr index_call(const ExprPtr& object, const std::vector<ExprPtr>& indices, bool element, SourceLocation loc) {
  std::vector<ExprPtr> parts{object};
  parts.insert(parts.end(), indices.begin(), indices.end());
  return call_of(element ? "[[" : "[", positional(std::move(parts)), loc);
}

struct CanonicalVisitor {
  const ExprPtr& self;

  ExprPtr operator()(const expr::Constant&) const { return self; }
  ExprPtr operator()(const expr::Symbol&) const { return self; }
  ExprPtr operator()(const expr::Call&) const { return self; }
  ExprPtr operator()(const expr::FunctionLiteral& f) const {
    std::vector<CallArg> args;
    for (const auto& formal : f.formals) args.push_back({formal.name, formal.default_value});
    args.push_back({std::nullopt, f.body});
    return call_of("function", std::move(args), self->loc);
  }
  ExprPtr operator()(const expr::Assign& a) const {
    return call_of("<-", positional({a.target, a.value}), self->loc);
  }
  ExprPtr operator()(const expr::SuperAssign& a) const {
    return call_of("<<-", positional({a.target, a.value}), self->loc);
  }
  ExprPtr operator()(const expr::Block& b) const { return call_of("{", positional(b.exprs), self->loc); }
  ExprPtr operator()(const expr::If& i) const {
    std::vector<ExprPtr> parts{i.cond, i.then_branch};
    if (i.else_branch) parts.push_back(i.else_branch);
    return call_of("if", positional(std::move(parts)), self->loc);
  }
  ExprPtr operator()(const expr::While& w) const {
    return call_of("while", positional({w.cond, w.body}), self->loc);
  }
  ExprPtr operator()(const expr::Index& i) const { return index_call(i.object, i.indices, i.element, self->loc); }
  ExprPtr operator()(const expr::IndexAssign& i) const {
    ExprPtr target = index_call(i.object, i.indices, i.element, self->loc);
    return call_of(i.super ? "<<-" : "<-", positional({target, i.value}), self->loc);
  }
  ExprPtr operator()(const expr::FieldAccess& f) const {
    return call_of("$", positional({f.object, make_symbol(f.name, self->loc)}), self->loc);
  }
  ExprPtr operator()(const expr::FieldAssign& f) const {
    ExprPtr target = call_of("$", positional({f.object, make_symbol(f.name, self->loc)}), self->loc);
    return call_of(f.super ? "<<-" : "<-", positional({target, f.value}), self->loc);
  }
};

}  // namespace

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->data.index() != b->data.index()) return false;
  return std::visit(EqualVisitor{*b}, a->data);
}

ExprPtr canonical_call(const ExprPtr& e) { return std::visit(CanonicalVisitor{e}, e->data); }

}  // namespace mls
