#include "mls/reader.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "mls/error.hpp"

namespace mls {

namespace {

enum class Tok {
  Number,
  Integer,
  String,
  Ident,
  Op,
  Newline,
  Semicolon,
  End,
};

struct Token {
  Tok type;
  std::string text;
  SourceLocation loc;
  double number = 0.0;
  std::int64_t integer = 0;
  bool backquoted = false;
};

const std::set<std::string, std::less<>> kKeywords = {"if", "else", "while", "function", "TRUE",
                                                      "FALSE", "NULL", "Inf", "NaN"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '.'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      SourceLocation loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "<end of input>", loc});
        return out;
      }
      char c = src_[pos_];
      if (c == '\n') {
        advance();
        out.push_back({Tok::Newline, "\\n", loc});
      } else if (c == ';') {
        advance();
        out.push_back({Tok::Semicolon, ";", loc});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number(loc));
      } else if (ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), loc});
      } else if (c == '"' || c == '\'') {
        out.push_back(string_literal(loc));
      } else if (c == '`') {
        Token t = string_literal(loc);
        t.type = Tok::Ident;
        t.backquoted = true;
        out.push_back(std::move(t));
      } else {
        out.push_back(op(loc));
      }
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token number(SourceLocation loc) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    double value = std::strtod(text.c_str(), nullptr);
    if (pos_ < src_.size() && src_[pos_] == 'L') {
      advance();
      if (value != std::trunc(value) || std::abs(value) > 9.0e15) {
        throw SyntaxError("integer literal " + text + "L is not a whole number", loc, text + "L", false);
      }
      Token t{Tok::Integer, text + "L", loc};
      t.integer = static_cast<std::int64_t>(value);
      return t;
    }
    Token t{Tok::Number, text, loc};
    t.number = value;
    return t;
  }

  Token string_literal(SourceLocation loc) {
    char quote = src_[pos_];
    advance();
    std::string value;
    for (;;) {
      if (pos_ >= src_.size()) {
        throw SyntaxError("unterminated string", loc, std::string(1, quote), true);
      }
      char c = src_[pos_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw SyntaxError("unterminated string", loc, "\\", true);
        char e = src_[pos_];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          case '0': value += '\0'; break;
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '`': value += '`'; break;
          default:
            throw SyntaxError(std::string("unknown escape '\\") + e + "' in string", {line_, col_},
                              std::string("\\") + e, false);
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    return {Tok::String, value, loc};
  }

  Token op(SourceLocation loc) {
    auto rest = src_.substr(pos_);
    static const char* kOps[] = {"<<-", "<-", "<=", ">=", "==", "!=", "&&", "||", "[[", "+", "-",
                                 "*",   "/",  "^",  "<",  ">",  "!",  "&",  "|",  "=",  "$", ":",
                                 "(",   ")",  "[",  "]",  "{",  "}",  ","};
    if (rest[0] == '%') {
      auto end = rest.find('%', 1);
      if (end == std::string_view::npos || rest.substr(0, end).find('\n') != std::string_view::npos) {
        throw SyntaxError("unterminated %operator%", loc, "%", true);
      }
      std::string text(rest.substr(0, end + 1));
      for (std::size_t i = 0; i < text.size(); ++i) advance();
      return {Tok::Op, text, loc};
    }
    for (const char* o : kOps) {
      std::string_view ov(o);
      if (rest.substr(0, ov.size()) == ov) {
        for (std::size_t i = 0; i < ov.size(); ++i) advance();
        return {Tok::Op, std::string(ov), loc};
      }
    }
    throw SyntaxError(std::string("unexpected input '") + rest[0] + "'", loc, std::string(1, rest[0]),
                      false);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Binding powers, loosest first.
enum Prec : int {
  kLowest = 0,
  kAssign = 1,
  kOr = 2,
  kAnd = 3,
  kNot = 4,
  kCompare = 5,
  kAdd = 6,
  kMul = 7,
  kSpecial = 8,
  kRange = 9,
  kUnary = 10,
  kPower = 11,
  kPostfix = 12,
  kAtom = 13,
};

int binary_prec(const std::string& op) {
  if (op == "<-" || op == "<<-") return kAssign;
  if (op == "||" || op == "|") return kOr;
  if (op == "&&" || op == "&") return kAnd;
  if (op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=") return kCompare;
  if (op == "+" || op == "-") return kAdd;
  if (op == "*" || op == "/") return kMul;
  if (op.size() >= 2 && op.front() == '%' && op.back() == '%') return kSpecial;
  if (op == ":") return kRange;
  if (op == "^") return kPower;
  return -1;
}

bool right_assoc(int prec) { return prec == kAssign || prec == kPower; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ExprPtr> program() {
    std::vector<ExprPtr> out;
    newline_significant_.push_back(true);
    for (;;) {
      skip_separators();
      if (peek().type == Tok::End) break;
      out.push_back(expression(kLowest));
      const Token& t = peek();
      if (t.type == Tok::Newline || t.type == Tok::Semicolon) continue;
      if (t.type == Tok::End) break;
      unexpected(t);
    }
    return out;
  }

 private:
  // -- token access --------------------------------------------------------

  const Token& peek() {
    if (!newline_significant_.back()) {
      while (toks_[pos_].type == Tok::Newline) ++pos_;
    }
    return toks_[pos_];
  }

  Token next() {
    const Token& t = peek();
    Token copy = t;
    if (copy.type != Tok::End) ++pos_;
    return copy;
  }

  bool peek_op(std::string_view op) {
    const Token& t = peek();
    return t.type == Tok::Op && t.text == op;
  }

  void skip_newlines() {
    while (toks_[pos_].type == Tok::Newline) ++pos_;
  }

  void skip_separators() {
    while (toks_[pos_].type == Tok::Newline || toks_[pos_].type == Tok::Semicolon) ++pos_;
  }

  Token expect_op(std::string_view op) {
    const Token& t = peek();
    if (t.type != Tok::Op || t.text != op) {
      if (t.type == Tok::End) {
        throw SyntaxError("unexpected end of input; expected '" + std::string(op) + "'", t.loc,
                          t.text, true);
      }
      throw SyntaxError("unexpected " + describe(t) + "; expected '" + std::string(op) + "'", t.loc,
                        t.text, false);
    }
    return next();
  }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::Number:
      case Tok::Integer: return "numeric constant '" + t.text + "'";
      case Tok::String: return "string constant \"" + t.text + "\"";
      case Tok::Ident: return "symbol '" + t.text + "'";
      case Tok::Newline: return "newline";
      case Tok::Semicolon: return "';'";
      case Tok::End: return "end of input";
      case Tok::Op: return "'" + t.text + "'";
    }
    return "token";
  }

  [[noreturn]] void unexpected(const Token& t) {
    bool at_end = t.type == Tok::End;
    throw SyntaxError("unexpected " + describe(t), t.loc, t.text, at_end);
  }

  struct NewlineScope {
    Parser& p;
    NewlineScope(Parser& parser, bool significant) : p(parser) {
      p.newline_significant_.push_back(significant);
    }
    ~NewlineScope() { p.newline_significant_.pop_back(); }
  };

  bool is_keyword(const Token& t, std::string_view kw) const {
    return t.type == Tok::Ident && !t.backquoted && t.text == kw;
  }

  // -- expressions ----------------------------------------------------------

  ExprPtr expression(int min_prec) {
    ExprPtr lhs = prefix();
    for (;;) {
      const Token& t = peek();
      if (t.type != Tok::Op) break;
      int prec = binary_prec(t.text);
      if (prec < 0 || prec < min_prec) break;
      Token op = next();
      skip_newlines();
      if (prec == kAssign) {
        ExprPtr rhs = expression(kAssign);
        lhs = make_assignment(lhs, rhs, op.text == "<<-", op.loc);
        continue;
      }
      int next_min = right_assoc(prec) ? prec : prec + 1;
      ExprPtr rhs = expression(next_min);
      if (prec == kCompare) {
        const Token& after = peek();
        if (after.type == Tok::Op && binary_prec(after.text) == kCompare) unexpected(after);
      }
      lhs = make_node(expr::Call{make_symbol(op.text, op.loc), {{std::nullopt, lhs}, {std::nullopt, rhs}}},
                      op.loc);
    }
    return lhs;
  }

  ExprPtr make_assignment(const ExprPtr& target, const ExprPtr& value, bool super, SourceLocation loc) {
    if (target->is<expr::Symbol>()) {
      if (super) return make_node(expr::SuperAssign{target, value}, loc);
      return make_node(expr::Assign{target, value}, loc);
    }
    if (const auto* c = target->as<expr::Constant>()) {
      if (c->value.kind() == Kind::String && c->value.length() == 1) {
        ExprPtr sym = make_symbol(c->value.strings()[0], target->loc);
        if (super) return make_node(expr::SuperAssign{sym, value}, loc);
        return make_node(expr::Assign{sym, value}, loc);
      }
    }
    if (const auto* ix = target->as<expr::Index>()) {
      return make_node(expr::IndexAssign{ix->object, ix->indices, ix->element, value, super}, loc);
    }
    if (const auto* fa = target->as<expr::FieldAccess>()) {
      return make_node(expr::FieldAssign{fa->object, fa->name, value, super}, loc);
    }
    throw SyntaxError("invalid assignment target", target->loc, super ? "<<-" : "<-", false);
  }

  ExprPtr prefix() {
    const Token& t = peek();
    SourceLocation loc = t.loc;
    switch (t.type) {
      case Tok::Number: {
        Token n = next();
        return postfix(make_constant(Value::dbl(n.number), loc));
      }
      case Tok::Integer: {
        Token n = next();
        return postfix(make_constant(Value::integer(n.integer), loc));
      }
      case Tok::String: {
        Token s = next();
        return postfix(make_constant(Value::str(s.text), loc));
      }
      case Tok::Ident: {
        if (!t.backquoted) {
          if (t.text == "function") return function_literal();
          if (t.text == "if") return if_expr();
          if (t.text == "while") return while_expr();
          if (t.text == "TRUE") return next(), postfix(make_constant(Value::logical(true), loc));
          if (t.text == "FALSE") return next(), postfix(make_constant(Value::logical(false), loc));
          if (t.text == "NULL") return next(), postfix(make_constant(Value::null(), loc));
          if (t.text == "Inf") return next(), postfix(make_constant(Value::dbl(HUGE_VAL), loc));
          if (t.text == "NaN") return next(), postfix(make_constant(Value::dbl(std::nan("")), loc));
          if (t.text == "else") unexpected(t);
        }
        Token s = next();
        return postfix(make_symbol(s.text, loc));
      }
      case Tok::Op: {
        if (t.text == "-" || t.text == "+") {
          Token op = next();
          ExprPtr operand = expression(kUnary);
          return make_node(expr::Call{make_symbol(op.text, op.loc), {{std::nullopt, operand}}}, op.loc);
        }
        if (t.text == "!") {
          Token op = next();
          ExprPtr operand = expression(kNot);
          return make_node(expr::Call{make_symbol("!", op.loc), {{std::nullopt, operand}}}, op.loc);
        }
        if (t.text == "(") {
          next();
          ExprPtr inner;
          {
            NewlineScope scope(*this, false);
            inner = expression(kLowest);
            expect_op(")");
          }
          return postfix(inner);
        }
        if (t.text == "{") return postfix(block());
        unexpected(t);
      }
      default: unexpected(t);
    }
  }

  ExprPtr block() {
    Token open = next();
    NewlineScope scope(*this, true);
    std::vector<ExprPtr> exprs;
    for (;;) {
      skip_separators();
      if (peek_op("}")) break;
      if (peek().type == Tok::End) {
        throw SyntaxError("unexpected end of input; expected '}'", peek().loc, "", true);
      }
      exprs.push_back(expression(kLowest));
      const Token& t = peek();
      if (t.type == Tok::Newline || t.type == Tok::Semicolon) continue;
      if (t.type == Tok::Op && t.text == "}") break;
      unexpected(t);
    }
    next();
    return make_node(expr::Block{std::move(exprs)}, open.loc);
  }

  ExprPtr function_literal() {
    Token kw = next();
    std::vector<Formal> formals;
    {
      NewlineScope scope(*this, false);
      expect_op("(");
      if (!peek_op(")")) {
        for (;;) {
          const Token& name = peek();
          if (name.type != Tok::Ident || (!name.backquoted && kKeywords.count(name.text))) unexpected(name);
          Token n = next();
          for (const auto& f : formals) {
            if (f.name == n.text) {
              throw SyntaxError("repeated formal argument '" + n.text + "'", n.loc, n.text, false);
            }
          }
          ExprPtr def;
          if (peek_op("=")) {
            next();
            def = expression(kAssign);
          }
          formals.push_back({n.text, def});
          if (peek_op(",")) {
            next();
            continue;
          }
          break;
        }
      }
      expect_op(")");
    }
    skip_newlines();
    ExprPtr body = expression(kLowest);
    return make_node(expr::FunctionLiteral{std::move(formals), body}, kw.loc);
  }

  ExprPtr paren_condition() {
    NewlineScope scope(*this, false);
    expect_op("(");
    ExprPtr cond = expression(kLowest);
    expect_op(")");
    return cond;
  }

  ExprPtr if_expr() {
    Token kw = next();
    ExprPtr cond = paren_condition();
    skip_newlines();
    ExprPtr then_branch = expression(kLowest);
    ExprPtr else_branch;
    std::size_t save = pos_;
    skip_newlines();
    if (is_keyword(toks_[pos_], "else")) {
      ++pos_;
      skip_newlines();
      else_branch = expression(kLowest);
    } else {
      pos_ = save;
    }
    return make_node(expr::If{cond, then_branch, else_branch}, kw.loc);
  }

  ExprPtr while_expr() {
    Token kw = next();
    ExprPtr cond = paren_condition();
    skip_newlines();
    ExprPtr body = expression(kLowest);
    return make_node(expr::While{cond, body}, kw.loc);
  }

  std::vector<CallArg> call_args(std::string_view close) {
    std::vector<CallArg> args;
    if (peek_op(close)) return args;
    for (;;) {
      CallArg arg;
      const Token& t = peek();
      const Token& after = toks_[next_significant(pos_ + 1)];
      if ((t.type == Tok::Ident || t.type == Tok::String) && after.type == Tok::Op && after.text == "=" &&
          !(t.type == Tok::Ident && !t.backquoted && kKeywords.count(t.text))) {
        arg.name = t.text;
        next();
        next();
      }
      if (peek_op(",") || peek_op(close)) unexpected(peek());
      arg.value = expression(kLowest);
      args.push_back(std::move(arg));
      if (peek_op(",")) {
        next();
        continue;
      }
      break;
    }
    return args;
  }

  std::size_t next_significant(std::size_t i) const {
    while (toks_[i].type == Tok::Newline) ++i;
    return i;
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      const Token& t = toks_[pos_];  // postfix operators must be on the same line
      if (t.type != Tok::Op) return e;
      if (t.text == "(") {
        Token open = next();
        NewlineScope scope(*this, false);
        auto args = call_args(")");
        expect_op(")");
        e = make_node(expr::Call{e, std::move(args)}, open.loc);
      } else if (t.text == "[" || t.text == "[[") {
        Token open = next();
        bool element = open.text == "[[";
        NewlineScope scope(*this, false);
        auto args = call_args("]");
        expect_op("]");
        if (element) expect_op("]");
        std::vector<ExprPtr> indices;
        for (auto& a : args) {
          if (a.name) throw SyntaxError("named index arguments are not supported", open.loc, "=", false);
          indices.push_back(a.value);
        }
        if (indices.empty()) throw SyntaxError("empty index", open.loc, open.text, false);
        e = make_node(expr::Index{e, std::move(indices), element}, open.loc);
      } else if (t.text == "$") {
        Token dollar = next();
        const Token& name = toks_[pos_];
        if (name.type != Tok::Ident && name.type != Tok::String) unexpected(name);
        Token n = next();
        e = make_node(expr::FieldAccess{e, n.text}, dollar.loc);
      } else {
        return e;
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<bool> newline_significant_;
};

// -- deparse ---------------------------------------------------------------

std::string escape_string(const std::string& s, char quote) {
  std::string out(1, quote);
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == quote) out += '\\';
        out += c;
    }
  }
  out += quote;
  return out;
}

std::string quote_name(const std::string& name) {
  if (is_syntactic_name(name)) return name;
  return escape_string(name, '`');
}

std::string format_double_exact(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

bool negative_constant(const Value& v) {
  if (v.attributes().size() != 0 || v.length() != 1) return false;
  if (v.kind() == Kind::Double) return std::signbit(v.doubles()[0]) && !std::isnan(v.doubles()[0]);
  if (v.kind() == Kind::Integer) return v.integers()[0] < 0;
  return false;
}

int unary_prec(const std::string& op) {
  if (op == "-" || op == "+") return kUnary;
  if (op == "!") return kNot;
  return -1;
}

int node_prec(const ExprPtr& e) {
  if (!e) return kAtom;
  if (const auto* c = e->as<expr::Constant>()) {
    if (negative_constant(c->value)) return kUnary;
    if (c->value.length() != 1 || !c->value.attributes().empty()) return kPostfix;
    return kAtom;
  }
  if (e->is<expr::Symbol>() || e->is<expr::Block>()) return kAtom;
  if (const auto* call = e->as<expr::Call>()) {
    auto name = callee_name(*call);
    bool unnamed = std::all_of(call->args.begin(), call->args.end(), [](const CallArg& a) { return !a.name; });
    if (name && unnamed) {
      if (call->args.size() == 2 && binary_prec(*name) > kAssign) return binary_prec(*name);
      if (call->args.size() == 1 && unary_prec(*name) > 0) return unary_prec(*name);
    }
    return kPostfix;
  }
  if (e->is<expr::Index>() || e->is<expr::FieldAccess>()) return kPostfix;
  return kLowest;
}

class Deparser {
 public:
  std::string run(const ExprPtr& e) {
    emit(e);
    return out_.str();
  }

 private:
  void emit_with_parens(const ExprPtr& e, bool parens) {
    if (parens) out_ << '(';
    emit(e);
    if (parens) out_ << ')';
  }

  void newline() {
    out_ << '\n';
    for (int i = 0; i < indent_; ++i) out_ << "  ";
  }

  void emit_args(const std::vector<CallArg>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out_ << ", ";
      if (args[i].name) out_ << quote_name(*args[i].name) << " = ";
      emit(args[i].value);
    }
  }

  void emit(const ExprPtr& e) {
    std::visit([&](const auto& n) { emit_node(n, e); }, e->data);
  }

  void emit_node(const expr::Constant& c, const ExprPtr&) { out_ << deparse_value(c.value); }
  void emit_node(const expr::Symbol& s, const ExprPtr&) { out_ << quote_name(s.name); }

  void emit_node(const expr::Call& c, const ExprPtr& self) {
    auto name = callee_name(c);
    int prec = node_prec(self);
    if (name && prec != kPostfix) {
      if (c.args.size() == 2) {
        bool ra = right_assoc(prec);
        int lp = node_prec(c.args[0].value);
        int rp = node_prec(c.args[1].value);
        bool lparen = lp < prec || (lp == prec && (ra || prec == kCompare));
        bool rparen = rp < prec || (rp == prec && (!ra || prec == kCompare));
        emit_with_parens(c.args[0].value, lparen);
        if (prec == kRange || prec == kPower) {
          out_ << *name;
        } else {
          out_ << ' ' << *name << ' ';
        }
        emit_with_parens(c.args[1].value, rparen);
      } else {
        out_ << *name;
        emit_with_parens(c.args[0].value, node_prec(c.args[0].value) < prec);
      }
      return;
    }
    emit_with_parens(c.callee, node_prec(c.callee) < kPostfix);
    out_ << '(';
    emit_args(c.args);
    out_ << ')';
  }

  void emit_node(const expr::FunctionLiteral& f, const ExprPtr&) {
    out_ << "function(";
    for (std::size_t i = 0; i < f.formals.size(); ++i) {
      if (i) out_ << ", ";
      out_ << quote_name(f.formals[i].name);
      if (f.formals[i].default_value) {
        out_ << " = ";
        emit(f.formals[i].default_value);
      }
    }
    out_ << ") ";
    emit(f.body);
  }

  void emit_node(const expr::Assign& a, const ExprPtr&) {
    emit(a.target);
    out_ << " <- ";
    emit(a.value);
  }

  void emit_node(const expr::SuperAssign& a, const ExprPtr&) {
    emit(a.target);
    out_ << " <<- ";
    emit(a.value);
  }

  void emit_node(const expr::Block& b, const ExprPtr&) {
    out_ << '{';
    ++indent_;
    for (const auto& e : b.exprs) {
      newline();
      emit(e);
    }
    --indent_;
    newline();
    out_ << '}';
  }

  void emit_node(const expr::If& i, const ExprPtr&) {
    out_ << "if (";
    emit(i.cond);
    out_ << ") ";
    emit_with_parens(i.then_branch, i.else_branch && node_prec(i.then_branch) == kLowest);
    if (i.else_branch) {
      out_ << " else ";
      emit(i.else_branch);
    }
  }

  void emit_node(const expr::While& w, const ExprPtr&) {
    out_ << "while (";
    emit(w.cond);
    out_ << ") ";
    emit(w.body);
  }

  void emit_index(const ExprPtr& object, const std::vector<ExprPtr>& indices, bool element) {
    emit_with_parens(object, node_prec(object) < kPostfix);
    out_ << (element ? "[[" : "[");
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) out_ << ", ";
      emit(indices[i]);
    }
    out_ << (element ? "]]" : "]");
  }

  void emit_node(const expr::Index& i, const ExprPtr&) { emit_index(i.object, i.indices, i.element); }

  void emit_node(const expr::IndexAssign& i, const ExprPtr&) {
    emit_index(i.object, i.indices, i.element);
    out_ << (i.super ? " <<- " : " <- ");
    emit(i.value);
  }

  void emit_node(const expr::FieldAccess& f, const ExprPtr&) {
    emit_with_parens(f.object, node_prec(f.object) < kPostfix);
    out_ << '$' << quote_name(f.name);
  }

  void emit_node(const expr::FieldAssign& f, const ExprPtr&) {
    emit_with_parens(f.object, node_prec(f.object) < kPostfix);
    out_ << '$' << quote_name(f.name) << (f.super ? " <<- " : " <- ");
    emit(f.value);
  }

  std::ostringstream out_;
  int indent_ = 0;
};

template <class T, class F>
std::string join_elements(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

bool is_syntactic_name(std::string_view name) {
  if (name.empty() || !ident_start(name[0])) return false;
  if (name[0] == '.' && name.size() > 1 && std::isdigit(static_cast<unsigned char>(name[1]))) return false;
  for (char c : name) {
    if (!ident_char(c)) return false;
  }
  return kKeywords.count(name) == 0;
}

std::vector<ExprPtr> parse_program(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.program();
}

ExprPtr parse_expression(std::string_view source) {
  auto exprs = parse_program(source);
  if (exprs.size() != 1) {
    throw SyntaxError("expected exactly one expression, found " + std::to_string(exprs.size()), {1, 1}, "",
                      exprs.empty());
  }
  return exprs.front();
}

std::string deparse(const ExprPtr& e) { return Deparser().run(e); }

std::string deparse_value(const Value& v) {
  auto wrap = [&](const std::string& body, const char* empty_form) -> std::string {
    if (v.length() == 0) return empty_form;
    if (v.length() == 1) return body;
    return "c(" + body + ")";
  };
  std::string text;
  switch (v.kind()) {
    case Kind::Null: text = "NULL"; break;
    case Kind::Logical:
      text = wrap(join_elements(v.logicals(), [](bool b) { return std::string(b ? "TRUE" : "FALSE"); }),
                  "logical(0)");
      break;
    case Kind::Integer:
      text = wrap(join_elements(v.integers(), [](std::int64_t i) { return std::to_string(i) + "L"; }),
                  "integer(0)");
      break;
    case Kind::Double:
      text = wrap(join_elements(v.doubles(), format_double_exact), "numeric(0)");
      break;
    case Kind::String:
      text = wrap(join_elements(v.strings(), [](const std::string& s) { return escape_string(s, '"'); }),
                  "character(0)");
      break;
    case Kind::List: {
      auto names = v.names();
      std::string body;
      for (std::size_t i = 0; i < v.elements().size(); ++i) {
        if (i) body += ", ";
        if (!names.empty() && !names[i].empty()) body += quote_name(names[i]) + " = ";
        body += deparse_value(v.elements()[i]);
      }
      return "list(" + body + ")";
    }
    case Kind::Closure:
      return deparse_function(v.closure_data().formals, v.closure_data().body);
    case Kind::Builtin: return "<builtin: " + v.builtin_data().name + ">";
    case Kind::Expression: return "quote(" + deparse(v.expression_data()) + ")";
    case Kind::Environment: return "<environment>";
    case Kind::S4Instance: return "<S4 object of class \"" + v.s4_data().class_name + "\">";
    case Kind::RefInstance: return "<reference object of class \"" + v.ref_data().class_name + "\">";
  }
  if (v.is_atomic()) {
    auto names = v.names();
    if (!names.empty() && v.length() >= 1) {
      // c(a = 1, b = 2)
      std::string body;
      for (std::size_t i = 0; i < v.length(); ++i) {
        if (i) body += ", ";
        if (!names[i].empty()) body += quote_name(names[i]) + " = ";
        Value elem;
        switch (v.kind()) {
          case Kind::Logical: elem = Value::logical(static_cast<bool>(v.logicals()[i])); break;
          case Kind::Integer: elem = Value::integer(v.integers()[i]); break;
          case Kind::Double: elem = Value::dbl(v.doubles()[i]); break;
          default: elem = Value::str(v.strings()[i]); break;
        }
        body += deparse_value(elem);
      }
      return "c(" + body + ")";
    }
  }
  return text;
}

std::string deparse_function(const std::vector<Formal>& formals, const ExprPtr& body) {
  return deparse(make_node(expr::FunctionLiteral{formals, body}));
}

}  // namespace mls
