// Copyright 2026 The snapnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snapnet/parser.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace snapnet {
namespace {

enum class Tok { kIdent, kInt, kIp, kPrefix, kString, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  int line = 1;
  int col = 1;
};

class ParseError {
 public:
  ParseError(Span span, std::string msg) : span_(span), msg_(std::move(msg)) {}
  absl::Status ToStatus() const {
    return absl::InvalidArgumentError(
        absl::StrCat(span_.line, ":", span_.col, ": ", msg_));
  }

 private:
  Span span_;
  std::string msg_;
};

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](size_t off) -> char {
    return i + off < src.size() ? src[i + off] : '\0';
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && peek(1) == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    size_t start = i;
    if (IsIdentStart(c)) {
      size_t j = i;
      while (j < src.size()) {
        if (IsIdentChar(src[j])) {
          ++j;
        } else if (src[j] == '-' && j + 1 < src.size() &&
                   std::isalnum(static_cast<unsigned char>(src[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
      // A trailing dot belongs to no identifier.
      while (j > i + 1 && src[j - 1] == '.') --j;
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      size_t j = i + (c == '-' ? 1 : 0);
      int dots = 0;
      while (j < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[j])) ||
              (src[j] == '.' && j + 1 < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[j + 1]))))) {
        if (src[j] == '.') ++dots;
        ++j;
      }
      t.kind = dots > 0 ? Tok::kIp : Tok::kInt;
      if (dots > 0 && j < src.size() && src[j] == '/' &&
          j + 1 < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          ++j;
        }
        t.kind = Tok::kPrefix;
      }
      t.text = std::string(src.substr(start, j - start));
      advance(j - start);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::string s;
      advance(1);
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        s.push_back(src[i]);
        advance(1);
      }
      if (i >= src.size()) {
        throw ParseError({t.line, t.col}, "unterminated string literal");
      }
      advance(1);
      t.kind = Tok::kString;
      t.text = std::move(s);
      out.push_back(std::move(t));
      continue;
    }
    static constexpr std::string_view kTwo[] = {"<-", "++", "--"};
    bool matched = false;
    for (std::string_view op : kTwo) {
      if (src.substr(i, 2) == op) {
        t.kind = Tok::kPunct;
        t.text = std::string(op);
        advance(2);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()[]{};+|&!=,").find(c) != std::string_view::npos) {
      t.kind = Tok::kPunct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }
    throw ParseError({t.line, t.col},
                     absl::StrCat("unexpected character '", std::string(1, c),
                                  "'"));
  }
  Token end;
  end.kind = Tok::kEnd;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const absl::flat_hash_set<std::string>& Keywords() {
  static const auto* kw = new absl::flat_hash_set<std::string>{
      "field", "state", "const", "def",  "assume", "default", "if",
      "then",  "else",  "atomic", "id",  "drop",   "true",    "false",
      "True",  "False"};
  return *kw;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void InitDefaultSchema() {
    for (const std::string& f : DefaultFields()) fields_.insert(f);
  }

  void AdoptDeclarations(const Program& decls) {
    for (const std::string& f : decls.fields) fields_.insert(f);
    for (const StateDecl& s : decls.states) states_.push_back(s);
  }

  Program ParseProgram() {
    Program prog;
    while (true) {
      const Token& t = Peek();
      if (t.kind != Tok::kIdent) break;
      if (t.text == "field") {
        ParseFieldDecl();
      } else if (t.text == "state") {
        ParseStateDecl();
      } else if (t.text == "const") {
        ParseConstDecl();
      } else if (t.text == "def") {
        ParseDef();
      } else if (t.text == "assume") {
        Span span = SpanOf(Next());
        if (prog.assumption) throw ParseError(span, "duplicate assume block");
        Expect("{");
        PolicyPtr a = ParsePar();
        Expect("}");
        if (!IsPredicate(*a)) {
          throw ParseError(span, "assumption must be a predicate");
        }
        prog.assumption = a;
      } else {
        break;
      }
    }
    prog.body = ParsePar();
    if (Peek().kind != Tok::kEnd) {
      throw ParseError(SpanOf(Peek()),
                       absl::StrCat("unexpected '", Peek().text, "'"));
    }
    prog.fields.assign(fields_.begin(), fields_.end());
    std::sort(prog.fields.begin(), prog.fields.end());
    prog.states = states_;
    return prog;
  }

  PolicyPtr ParseBarePolicy() {
    PolicyPtr p = ParsePar();
    if (Peek().kind != Tok::kEnd) {
      throw ParseError(SpanOf(Peek()),
                       absl::StrCat("unexpected '", Peek().text, "'"));
    }
    return p;
  }

 private:
  const Token& Peek(size_t off = 0) const {
    return toks_[std::min(pos_ + off, toks_.size() - 1)];
  }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  static Span SpanOf(const Token& t) { return {t.line, t.col}; }

  bool IsPunct(std::string_view p, size_t off = 0) const {
    return Peek(off).kind == Tok::kPunct && Peek(off).text == p;
  }
  bool IsKeyword(std::string_view k) const {
    return Peek().kind == Tok::kIdent && Peek().text == k;
  }
  bool Accept(std::string_view p) {
    if (IsPunct(p)) {
      Next();
      return true;
    }
    return false;
  }
  void Expect(std::string_view p) {
    if (!Accept(p)) {
      throw ParseError(SpanOf(Peek()),
                       absl::StrCat("expected '", std::string(p), "' but found '",
                                    Describe(Peek()), "'"));
    }
  }
  void ExpectKeyword(std::string_view k) {
    if (!IsKeyword(k)) {
      throw ParseError(SpanOf(Peek()),
                       absl::StrCat("expected '", std::string(k), "' but found '",
                                    Describe(Peek()), "'"));
    }
    Next();
  }
  static std::string Describe(const Token& t) {
    return t.kind == Tok::kEnd ? "end of input" : t.text;
  }
  std::string ExpectIdent() {
    const Token& t = Peek();
    if (t.kind != Tok::kIdent || Keywords().contains(t.text)) {
      throw ParseError(SpanOf(t), absl::StrCat("expected identifier but found '",
                                               Describe(t), "'"));
    }
    return Next().text;
  }

  void ParseFieldDecl() {
    Next();
    do {
      fields_.insert(ExpectIdent());
    } while (Accept(","));
    Expect(";");
  }

  void ParseStateDecl() {
    Next();
    Span span = SpanOf(Peek());
    StateDecl d;
    d.name = ExpectIdent();
    if (FindState(d.name) != nullptr) {
      throw ParseError(span, absl::StrCat("duplicate state variable ", d.name));
    }
    Expect("[");
    const Token& n = Next();
    if (n.kind != Tok::kInt || n.text[0] == '-' || n.text == "0") {
      throw ParseError(SpanOf(n), "state arity must be a positive integer");
    }
    d.arity = std::stoi(n.text);
    Expect("]");
    ExpectKeyword("default");
    d.default_value = ParseValue();
    Expect(";");
    states_.push_back(std::move(d));
  }

  void ParseConstDecl() {
    Next();
    std::string name = ExpectIdent();
    Expect("=");
    consts_[name] = ParseValue();
    Expect(";");
  }

  void ParseDef() {
    Next();
    std::string name = ExpectIdent();
    Expect("{");
    PolicyPtr body = ParsePar();
    Expect("}");
    defs_[name] = body;
  }

  const StateDecl* FindState(const std::string& name) const {
    for (const StateDecl& d : states_) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  Value ParseValue() {
    const Token& t = Next();
    switch (t.kind) {
      case Tok::kInt: {
        int64_t v = 0;
        auto [ptr, ec] =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) throw ParseError(SpanOf(t), "integer out of range");
        return Value::Int(v);
      }
      case Tok::kIp: {
        auto ip = ParseIpv4(t.text);
        if (!ip) throw ParseError(SpanOf(t), "malformed IPv4 address");
        return Value::Ip(*ip);
      }
      case Tok::kPrefix: {
        size_t slash = t.text.find('/');
        auto ip = ParseIpv4(std::string_view(t.text).substr(0, slash));
        int len = std::stoi(t.text.substr(slash + 1));
        if (!ip || len < 0 || len > 32) {
          throw ParseError(SpanOf(t), "malformed IPv4 prefix");
        }
        return Value::MakePrefix(*ip, len);
      }
      case Tok::kString:
        return Value::Sym(t.text);
      case Tok::kIdent: {
        if (t.text == "true" || t.text == "True") return Value::Bool(true);
        if (t.text == "false" || t.text == "False") return Value::Bool(false);
        if (auto it = consts_.find(t.text); it != consts_.end()) {
          return it->second;
        }
        if (Keywords().contains(t.text)) break;
        return Value::Sym(t.text);
      }
      case Tok::kPunct:
        if (t.text == "(") {
          std::vector<Value> elems;
          do {
            elems.push_back(ParseValue());
          } while (Accept(","));
          Expect(")");
          if (elems.size() == 1) return elems[0];
          return Value::Tuple(std::move(elems));
        }
        break;
      case Tok::kEnd:
        break;
    }
    throw ParseError(SpanOf(t),
                     absl::StrCat("expected a value but found '", Describe(t), "'"));
  }

  Expr ParseExpr() {
    const Token& t = Peek();
    if (IsPunct("(")) {
      Next();
      std::vector<Expr> elems;
      do {
        elems.push_back(ParseExpr());
      } while (Accept(","));
      Expect(")");
      if (elems.size() == 1) return elems[0];
      return Expr::Tuple(std::move(elems));
    }
    if (t.kind == Tok::kIdent && fields_.contains(t.text) &&
        !consts_.contains(t.text)) {
      return Expr::Field(Next().text);
    }
    Value v = ParseValue();
    if (v.is_prefix()) {
      throw ParseError(SpanOf(t), "prefixes are only allowed in field tests");
    }
    return Expr::Lit(std::move(v));
  }

  static PolicyPtr At(PolicyPtr p, Span span) {
    std::const_pointer_cast<Policy>(p)->span = span;
    return p;
  }

  void RequirePredicate(const PolicyPtr& p, Span span, std::string_view what) {
    if (!IsPredicate(*p)) {
      throw ParseError(span, absl::StrCat(std::string(what), " must be a predicate"));
    }
  }

  PolicyPtr ParsePar() {
    Span span = SpanOf(Peek());
    PolicyPtr p = ParseSeq();
    while (IsPunct("+")) {
      Next();
      p = At(Par(p, ParseSeq()), span);
    }
    return p;
  }

  PolicyPtr ParseSeq() {
    Span span = SpanOf(Peek());
    PolicyPtr p = ParseOr();
    while (IsPunct(";")) {
      Next();
      p = At(Seq(p, ParseOr()), span);
    }
    return p;
  }

  PolicyPtr ParseOr() {
    Span span = SpanOf(Peek());
    PolicyPtr p = ParseAnd();
    while (IsPunct("|")) {
      Span op = SpanOf(Next());
      PolicyPtr q = ParseAnd();
      RequirePredicate(p, span, "operand of '|'");
      RequirePredicate(q, op, "operand of '|'");
      p = At(Or(p, q), span);
    }
    return p;
  }

  PolicyPtr ParseAnd() {
    Span span = SpanOf(Peek());
    PolicyPtr p = ParseUnary();
    while (IsPunct("&")) {
      Span op = SpanOf(Next());
      PolicyPtr q = ParseUnary();
      RequirePredicate(p, span, "operand of '&'");
      RequirePredicate(q, op, "operand of '&'");
      p = At(And(p, q), span);
    }
    return p;
  }

  PolicyPtr ParseUnary() {
    if (IsPunct("!")) {
      Span span = SpanOf(Next());
      PolicyPtr x = ParseUnary();
      RequirePredicate(x, span, "operand of '!'");
      return At(Neg(x), span);
    }
    return ParsePrimary();
  }

  PolicyPtr ParsePrimary() {
    const Token& t = Peek();
    Span span = SpanOf(t);
    if (IsPunct("(") || IsPunct("{")) {
      std::string close = IsPunct("(") ? ")" : "}";
      Next();
      PolicyPtr p = ParsePar();
      Expect(close);
      return p;
    }
    if (t.kind != Tok::kIdent) {
      throw ParseError(span, absl::StrCat("expected a policy but found '",
                                          Describe(t), "'"));
    }
    if (t.text == "id") {
      Next();
      return At(Id(), span);
    }
    if (t.text == "drop") {
      Next();
      return At(Drop(), span);
    }
    if (t.text == "if") {
      Next();
      PolicyPtr cond = ParsePar();
      RequirePredicate(cond, span, "if condition");
      ExpectKeyword("then");
      PolicyPtr p = ParseSeq();
      ExpectKeyword("else");
      PolicyPtr q = ParseSeq();
      return At(If(cond, p, q), span);
    }
    if (t.text == "atomic") {
      Next();
      std::string close = IsPunct("(") ? ")" : "}";
      if (!Accept("(")) Expect("{");
      ++atomic_depth_;
      if (atomic_depth_ > 1) throw ParseError(span, "nested atomic block");
      PolicyPtr p = ParsePar();
      --atomic_depth_;
      Expect(close);
      return At(Atomic(p), span);
    }
    if (Keywords().contains(t.text)) {
      throw ParseError(span, absl::StrCat("unexpected keyword '", t.text, "'"));
    }
    std::string name = Next().text;
    if (IsPunct("[")) return ParseStateOp(name, span);
    if (auto it = defs_.find(name); it != defs_.end()) {
      if (atomic_depth_ > 0 && ContainsAtomic(*it->second)) {
        throw ParseError(span, "nested atomic block");
      }
      return it->second;
    }
    if (!fields_.contains(name)) {
      if (IsPunct("=") || IsPunct("<-")) {
        throw ParseError(span, absl::StrCat("undeclared field ", name));
      }
      throw ParseError(span, absl::StrCat("unknown identifier ", name));
    }
    if (Accept("=")) {
      Value v = ParseValue();
      return At(Test(name, std::move(v)), span);
    }
    if (Accept("<-")) {
      Span vs = SpanOf(Peek());
      Value v = ParseValue();
      if (v.is_prefix()) {
        throw ParseError(vs, "cannot assign a prefix to a field");
      }
      return At(Mod(name, std::move(v)), span);
    }
    throw ParseError(SpanOf(Peek()),
                     absl::StrCat("expected '=' or '<-' after field ", name));
  }

  static bool ContainsAtomic(const Policy& p) {
    if (p.kind == PolicyKind::kAtomic) return true;
    for (const PolicyPtr& c : {p.a, p.b, p.c}) {
      if (c && ContainsAtomic(*c)) return true;
    }
    return false;
  }

  PolicyPtr ParseStateOp(const std::string& var, Span span) {
    const StateDecl* decl = FindState(var);
    if (decl == nullptr) {
      throw ParseError(span, absl::StrCat("undeclared state variable ", var));
    }
    std::vector<Expr> parts;
    while (Accept("[")) {
      parts.push_back(ParseExpr());
      Expect("]");
    }
    Expr index = parts.size() == 1 ? parts[0] : Expr::Tuple(std::move(parts));
    if (index.Arity() != decl->arity) {
      throw ParseError(span, absl::StrCat("state variable ", var, " has arity ",
                                          decl->arity, " but is indexed with ",
                                          index.Arity(), " component(s)"));
    }
    if (Accept("=")) return At(StateTest(var, index, ParseExpr()), span);
    if (Accept("<-")) return At(StateSet(var, index, ParseExpr()), span);
    if (Accept("++")) return At(Incr(var, index), span);
    if (Accept("--")) return At(Decr(var, index), span);
    return At(StateTest(var, index, Expr::Lit(Value::Bool(true))), span);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  absl::flat_hash_set<std::string> fields_;
  std::vector<StateDecl> states_;
  absl::flat_hash_map<std::string, Value> consts_;
  absl::flat_hash_map<std::string, PolicyPtr> defs_;
  int atomic_depth_ = 0;
};

// Binding strength used by the printer; larger binds tighter.
enum Level { kIfLevel = 0, kParLevel = 1, kSeqLevel, kOrLevel, kAndLevel,
             kNegLevel, kAtomLevel };

std::string IndexText(const Expr& index) {
  if (!index.is_tuple()) return absl::StrCat("[", index.ToString(), "]");
  std::string out;
  for (const Expr& e : index.elems) absl::StrAppend(&out, "[", e.ToString(), "]");
  return out;
}

void Print(const Policy& p, int ctx, std::string& out);

void PrintAt(const Policy& p, int own, int ctx, std::string& out,
             void (*body)(const Policy&, std::string&)) {
  bool parens = own < ctx;
  if (parens) out.push_back('(');
  body(p, out);
  if (parens) out.push_back(')');
}

void Print(const Policy& p, int ctx, std::string& out) {
  switch (p.kind) {
    case PolicyKind::kId:
      out += "id";
      return;
    case PolicyKind::kDrop:
      out += "drop";
      return;
    case PolicyKind::kTest:
      absl::StrAppend(&out, p.name, " = ", p.value.ToString());
      return;
    case PolicyKind::kMod:
      absl::StrAppend(&out, p.name, " <- ", p.value.ToString());
      return;
    case PolicyKind::kStateTest:
      absl::StrAppend(&out, p.name, IndexText(p.index), " = ", p.rhs.ToString());
      return;
    case PolicyKind::kStateSet:
      absl::StrAppend(&out, p.name, IndexText(p.index), " <- ",
                      p.rhs.ToString());
      return;
    case PolicyKind::kIncr:
      absl::StrAppend(&out, p.name, IndexText(p.index), "++");
      return;
    case PolicyKind::kDecr:
      absl::StrAppend(&out, p.name, IndexText(p.index), "--");
      return;
    case PolicyKind::kNeg:
      PrintAt(p, kNegLevel, ctx, out, [](const Policy& q, std::string& o) {
        o += "!";
        Print(*q.a, kNegLevel, o);
      });
      return;
    case PolicyKind::kAnd:
      PrintAt(p, kAndLevel, ctx, out, [](const Policy& q, std::string& o) {
        Print(*q.a, kAndLevel, o);
        o += " & ";
        Print(*q.b, kNegLevel, o);
      });
      return;
    case PolicyKind::kOr:
      PrintAt(p, kOrLevel, ctx, out, [](const Policy& q, std::string& o) {
        Print(*q.a, kOrLevel, o);
        o += " | ";
        Print(*q.b, kAndLevel, o);
      });
      return;
    case PolicyKind::kSeq:
      PrintAt(p, kSeqLevel, ctx, out, [](const Policy& q, std::string& o) {
        Print(*q.a, kSeqLevel, o);
        o += "; ";
        Print(*q.b, kOrLevel, o);
      });
      return;
    case PolicyKind::kPar:
      PrintAt(p, kParLevel, ctx, out, [](const Policy& q, std::string& o) {
        Print(*q.a, kParLevel, o);
        o += " + ";
        Print(*q.b, kSeqLevel, o);
      });
      return;
    case PolicyKind::kIf:
      PrintAt(p, kIfLevel, ctx, out, [](const Policy& q, std::string& o) {
        o += "if ";
        Print(*q.a, kParLevel, o);
        o += " then ";
        Print(*q.b, kSeqLevel, o);
        o += " else ";
        Print(*q.c, q.c->kind == PolicyKind::kIf ? kIfLevel : kSeqLevel, o);
      });
      return;
    case PolicyKind::kAtomic:
      out += "atomic { ";
      Print(*p.a, kIfLevel, out);
      out += " }";
      return;
  }
}

}  // namespace

absl::StatusOr<Program> Parse(std::string_view text) {
  try {
    Parser parser(Lex(text));
    parser.InitDefaultSchema();
    return parser.ParseProgram();
  } catch (const ParseError& e) {
    return e.ToStatus();
  }
}

absl::StatusOr<PolicyPtr> ParsePolicy(std::string_view text,
                                      const Program& decls) {
  try {
    Parser parser(Lex(text));
    parser.InitDefaultSchema();
    parser.AdoptDeclarations(decls);
    return parser.ParseBarePolicy();
  } catch (const ParseError& e) {
    return e.ToStatus();
  }
}

std::string Pretty(const Policy& policy) {
  std::string out;
  Print(policy, kIfLevel, out);
  return out;
}

std::string Pretty(const Program& program) {
  std::string out;
  std::vector<std::string> extra;
  for (const std::string& f : program.fields) {
    if (std::find(DefaultFields().begin(), DefaultFields().end(), f) ==
        DefaultFields().end()) {
      extra.push_back(f);
    }
  }
  if (!extra.empty()) absl::StrAppend(&out, "field ", absl::StrJoin(extra, ", "), ";\n");
  for (const StateDecl& s : program.states) {
    absl::StrAppend(&out, "state ", s.name, "[", s.arity, "] default ",
                    s.default_value.ToString(), ";\n");
  }
  if (program.assumption) {
    absl::StrAppend(&out, "assume { ", Pretty(*program.assumption), " }\n");
  }
  absl::StrAppend(&out, Pretty(*program.body), "\n");
  return out;
}

}  // namespace snapnet
