#include "mapple/dsl/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace mapple::dsl {

namespace {

enum class Tok { Ident, Int, Punct, Newline, Eof };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  SourceLoc loc;
  bool line_start = false;  // first token on its physical line
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Int: return "integer " + t.text;
    case Tok::Punct: return "'" + t.text + "'";
    case Tok::Newline: return "end of line";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  bool at_line_start = true;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, SourceLoc loc) {
    Token t{k, std::move(text), 0, loc, at_line_start};
    at_line_start = false;
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      if (depth == 0 && !out.empty() && out.back().kind != Tok::Newline)
        out.push_back({Tok::Newline, "", 0, {line, col}, false});
      ++line;
      col = 1;
      ++i;
      at_line_start = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, std::string(src.substr(i, j - i)), loc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, v);
      if (ec != std::errc()) throw SyntaxError(loc, "integer literal out of range");
      push(Tok::Int, std::string(src.substr(i, j - i)), loc);
      out.back().value = v;
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '=' && i + 1 < src.size() && src[i + 1] == '=') {
      push(Tok::Punct, "==", loc);
      i += 2;
      col += 2;
      continue;
    }
    static const std::string singles = "()[],:.*/%+-<>=?;";
    if (singles.find(c) == std::string::npos)
      throw SyntaxError(loc, std::string("unexpected character '") + c + "'");
    if (c == '(' || c == '[') ++depth;
    if ((c == ')' || c == ']') && depth > 0) --depth;
    push(Tok::Punct, std::string(1, c), loc);
    ++i;
    ++col;
  }
  if (!out.empty() && out.back().kind != Tok::Newline) out.push_back({Tok::Newline, "", 0, {line, col}, false});
  out.push_back({Tok::Eof, "", 0, {line, col}, false});
  return out;
}

const std::set<std::string, std::less<>> kKeywords = {"IndexTaskMap", "Task",         "Region", "Layout",
                                                      "GarbageCollect", "Backpressure", "def",    "return",
                                                      "for",          "in",           "Machine"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  MapperProgram run() {
    for (;;) {
      skip_newlines();
      if (peek().kind == Tok::Eof) break;
      top_level();
    }
    return std::move(prog_);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  MapperProgram prog_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool is_ident(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }
  bool accept(const char* p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().loc, "expected " + expected + ", found " + describe(peek()));
  }
  void expect(const char* p) {
    if (!accept(p)) fail(std::string("'") + p + "'");
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline || is_punct(";")) next();
  }
  void end_of_statement() {
    accept(";");
    if (peek().kind == Tok::Newline) {
      next();
      return;
    }
    if (peek().kind != Tok::Eof) fail("end of statement");
  }

  std::string name(const char* what) {
    if (peek().kind != Tok::Ident) fail(what);
    if (kKeywords.count(peek().text)) throw SyntaxError(peek().loc, "'" + peek().text + "' is reserved");
    return next().text;
  }
  std::int64_t integer(const char* what) {
    bool neg = accept("-");
    if (peek().kind != Tok::Int) fail(what);
    auto v = next().value;
    return neg ? -v : v;
  }

  void top_level() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("statement");
    const SourceLoc loc = t.loc;
    const std::string kw = t.text;
    if (kw == "def") {
      function_def();
      return;
    }
    if (kw == "IndexTaskMap") {
      next();
      IndexTaskMapStmt s;
      s.task = name("task name");
      s.func = name("function name");
      prog_.statements.push_back({s, loc});
    } else if (kw == "Task") {
      next();
      TaskMapStmt s;
      s.task = name("task name");
      s.procs.push_back(name("processor kind"));
      while (peek().kind == Tok::Ident) s.procs.push_back(name("processor kind"));
      prog_.statements.push_back({s, loc});
    } else if (kw == "Region") {
      next();
      DataMapStmt s;
      s.task = name("task name");
      s.region = name("region name");
      s.proc = name("processor kind");
      s.memories.push_back(name("memory kind"));
      while (peek().kind == Tok::Ident) s.memories.push_back(name("memory kind"));
      prog_.statements.push_back({s, loc});
    } else if (kw == "Layout") {
      next();
      DataLayoutStmt s;
      s.task = name("task name");
      s.region = name("region name");
      s.proc = name("processor kind");
      do {
        LayoutConstraint c;
        c.name = name("layout constraint");
        if (accept("==")) c.align = integer("alignment");
        s.constraints.push_back(std::move(c));
      } while (peek().kind == Tok::Ident);
      prog_.statements.push_back({s, loc});
    } else if (kw == "GarbageCollect") {
      next();
      GarbageCollectStmt s;
      s.task = name("task name");
      s.region = name("region name");
      prog_.statements.push_back({s, loc});
    } else if (kw == "Backpressure") {
      next();
      BackpressureStmt s;
      s.task = name("task name");
      s.depth = integer("integer depth");
      prog_.statements.push_back({s, loc});
    } else if (is_punct("=", 1)) {
      GlobalAssign g;
      g.name = name("variable name");
      g.loc = loc;
      next();
      g.value = expr();
      prog_.globals.push_back(std::move(g));
    } else {
      fail("statement");
    }
    end_of_statement();
  }

  void function_def() {
    const Token& def = next();
    const int def_col = def.loc.col;
    FuncDef f;
    f.loc = def.loc;
    const SourceLoc name_loc = peek().loc;
    f.name = name("function name");
    if (prog_.find_function(f.name))
      throw SyntaxError(name_loc, "duplicate function definition '" + f.name + "'", Errc::DuplicateFunction);
    expect("(");
    if (!is_punct(")")) {
      do {
        Param p;
        std::string first = name("parameter");
        if (peek().kind == Tok::Ident) {
          p.type = std::move(first);
          p.name = name("parameter");
        } else {
          p.name = std::move(first);
        }
        f.params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    expect(":");
    if (peek().kind == Tok::Newline) {
      next();
      const Token& first = peek();
      if (first.kind == Tok::Eof || first.loc.col <= def_col) fail("indented function body");
      const int body_col = first.loc.col;
      while (peek().kind != Tok::Eof && peek().loc.col > def_col) {
        if (peek().loc.col != body_col) throw SyntaxError(peek().loc, "inconsistent indentation");
        f.body.push_back(func_stmt());
        while (accept(";") && peek().kind != Tok::Newline && peek().kind != Tok::Eof) f.body.push_back(func_stmt());
        if (peek().kind == Tok::Newline) next();
        else if (peek().kind != Tok::Eof) fail("end of statement");
      }
    } else {
      // inline body: def f(a): x = a; return x
      f.body.push_back(func_stmt());
      while (accept(";") && peek().kind != Tok::Newline && peek().kind != Tok::Eof) f.body.push_back(func_stmt());
      end_of_statement();
    }
    prog_.statements.push_back({FuncDefStmt{f.name}, f.loc});
    prog_.functions.push_back(std::move(f));
  }

  FuncStmt func_stmt() {
    const SourceLoc loc = peek().loc;
    if (is_ident("return")) {
      next();
      return {ReturnStmt{expr()}, loc};
    }
    AssignStmt a;
    a.name = name("assignment or return");
    expect("=");
    a.value = expr();
    return {std::move(a), loc};
  }

  // ternary < comparison < additive < multiplicative < unary < postfix
  ExprPtr expr() {
    auto cond = comparison();
    if (!is_punct("?")) return cond;
    const SourceLoc loc = next().loc;
    auto a = expr();
    expect(":");
    auto b = expr();
    return make_expr(TernaryExpr{cond, a, b}, loc);
  }

  ExprPtr comparison() {
    auto lhs = additive();
    BinOp op;
    if (is_punct("==")) op = BinOp::Eq;
    else if (is_punct("<")) op = BinOp::Lt;
    else if (is_punct(">")) op = BinOp::Gt;
    else return lhs;
    const SourceLoc loc = next().loc;
    auto rhs = additive();
    return make_expr(BinaryExpr{op, lhs, rhs}, loc);
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      const Token& t = next();
      auto rhs = multiplicative();
      lhs = make_expr(BinaryExpr{t.text == "+" ? BinOp::Add : BinOp::Sub, lhs, rhs}, t.loc);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = unary();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      const Token& t = next();
      const BinOp op = t.text == "*" ? BinOp::Mul : t.text == "/" ? BinOp::Div : BinOp::Mod;
      auto rhs = unary();
      lhs = make_expr(BinaryExpr{op, lhs, rhs}, t.loc);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (is_punct("-")) {
      const SourceLoc loc = next().loc;
      auto operand = unary();
      if (auto* lit = std::get_if<IntLit>(&operand->node)) return make_expr(IntLit{-lit->value}, loc);
      return make_expr(NegExpr{operand}, loc);
    }
    return postfix(primary());
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    expect("(");
    if (!is_punct(")")) {
      do args.push_back(expr());
      while (accept(","));
    }
    expect(")");
    return args;
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      if (is_punct(".")) {
        const SourceLoc loc = next().loc;
        if (peek().kind != Tok::Ident) fail("member or primitive name");
        std::string member = next().text;
        if (is_punct("(")) {
          auto args = call_args();
          e = make_expr(PrimitiveCall{e, std::move(member), std::move(args)}, loc);
        } else {
          e = make_expr(MemberExpr{e, std::move(member)}, loc);
        }
      } else if (is_punct("[")) {
        const SourceLoc loc = next().loc;
        e = index_or_slice(e, loc);
      } else {
        return e;
      }
    }
  }

  ExprPtr index_or_slice(ExprPtr object, SourceLoc loc) {
    if (accept(":")) {
      ExprPtr hi = is_punct("]") ? nullptr : expr();
      expect("]");
      return make_expr(SliceExpr{object, nullptr, hi}, loc);
    }
    std::vector<ExprPtr> items;
    items.push_back(index_item());
    if (!std::holds_alternative<SplatExpr>(items[0]->node) && accept(":")) {
      ExprPtr hi = is_punct("]") ? nullptr : expr();
      expect("]");
      return make_expr(SliceExpr{object, items[0], hi}, loc);
    }
    while (accept(",")) items.push_back(index_item());
    expect("]");
    return make_expr(IndexExpr{object, std::move(items)}, loc);
  }

  ExprPtr index_item() {
    if (is_punct("*")) {
      const SourceLoc loc = next().loc;
      return make_expr(SplatExpr{unary()}, loc);
    }
    return expr();
  }

  ExprPtr primary() {
    const Token& t = peek();
    const SourceLoc loc = t.loc;
    if (t.kind == Tok::Int) {
      next();
      return make_expr(IntLit{t.value}, loc);
    }
    if (is_punct("(")) {
      next();
      auto first = expr();
      if (accept(")")) return first;
      std::vector<ExprPtr> elems{first};
      while (accept(",")) {
        if (is_punct(")")) break;  // (a,)
        elems.push_back(expr());
      }
      expect(")");
      return make_expr(TupleLit{std::move(elems)}, loc);
    }
    if (t.kind != Tok::Ident) fail("expression");
    if (t.text == "Machine") {
      next();
      expect("(");
      if (peek().kind != Tok::Ident) fail("processor kind");
      std::string proc = next().text;
      expect(")");
      return make_expr(MachineExpr{std::move(proc)}, loc);
    }
    if (t.text == "tuple" && is_punct("(", 1)) return comprehension();
    std::string id = name("expression");
    if (is_punct("(")) {
      auto args = call_args();
      return make_expr(CallExpr{std::move(id), std::move(args)}, loc);
    }
    return make_expr(VarExpr{std::move(id)}, loc);
  }

  ExprPtr comprehension() {
    const SourceLoc loc = next().loc;
    expect("(");
    auto body = expr();
    if (!is_ident("for")) fail("'for'");
    next();
    std::string var = name("loop variable");
    if (!is_ident("in")) fail("'in'");
    next();
    expect("(");
    std::vector<std::int64_t> domain;
    if (!is_punct(")")) {
      do {
        if (is_punct(")")) break;
        domain.push_back(integer("integer"));
      } while (accept(","));
    }
    expect(")");
    expect(")");
    return make_expr(ComprehensionExpr{body, std::move(var), std::move(domain)}, loc);
  }
};

}  // namespace

MapperProgram parse(std::string_view source) { return Parser(lex(source)).run(); }

}  // namespace mapple::dsl
