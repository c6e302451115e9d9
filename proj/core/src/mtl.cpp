#include "trajmine/mtl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(MtlValue v) {
  switch (v) {
    case MtlValue::False: return "False";
    case MtlValue::True: return "True";
    default: return "OutOfWindow";
  }
}

namespace {

using NodePtr = std::shared_ptr<const MtlNode>;

NodePtr make_node(MtlNode n) {
  return std::make_shared<const MtlNode>(std::move(n));
}

// ---- lexer ----------------------------------------------------------------

enum class Tok {
  lparen, rparen, lbracket, rbracket, comma,
  bang, amp, pipe, arrow, darrow,
  ident, number, end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::int64_t value = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    while (i_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[i_]))) {
      ++i_;
    }
    Token t;
    t.pos = i_;
    if (i_ >= text_.size()) return t;
    char c = text_[i_];
    switch (c) {
      case '(': ++i_; t.kind = Tok::lparen; return t;
      case ')': ++i_; t.kind = Tok::rparen; return t;
      case '[': ++i_; t.kind = Tok::lbracket; return t;
      case ']': ++i_; t.kind = Tok::rbracket; return t;
      case ',': ++i_; t.kind = Tok::comma; return t;
      case '!': ++i_; t.kind = Tok::bang; return t;
      case '&': ++i_; t.kind = Tok::amp; return t;
      case '|': ++i_; t.kind = Tok::pipe; return t;
      default: break;
    }
    if (c == '-') {
      if (i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
        i_ += 2;
        t.kind = Tok::arrow;
        return t;
      }
      return lex_number();
    }
    if (c == '<') {
      if (i_ + 2 < text_.size() && text_[i_ + 1] == '-' &&
          text_[i_ + 2] == '>') {
        i_ += 3;
        t.kind = Tok::darrow;
        return t;
      }
      throw SyntaxError("expected '<->'", i_);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) ||
              text_[i_] == '_')) {
        ++i_;
      }
      t.kind = Tok::ident;
      t.text = text_.substr(start, i_ - start);
      return t;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", i_);
  }

 private:
  Token lex_number() {
    Token t;
    t.pos = i_;
    std::size_t start = i_;
    if (i_ < text_.size() && text_[i_] == '-') ++i_;
    std::size_t digits = i_;
    while (i_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[i_]))) {
      ++i_;
    }
    if (i_ == digits) throw SyntaxError("expected integer", start);
    std::int64_t v = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + i_, v);
    if (ec != std::errc() || ptr != text_.data() + i_) {
      throw SyntaxError("integer out of range", start);
    }
    t.kind = Tok::number;
    t.value = v;
    return t;
  }

  const std::string& text_;
  std::size_t i_ = 0;
};

// ---- parser ---------------------------------------------------------------
//
// equivalence := implication ( '<->' implication )*        left-assoc
// implication := disjunction ( '->' implication )?         right-assoc
// disjunction := conjunction ( '|' conjunction )*
// conjunction := unary ( '&' unary )*
// unary       := '!' unary | 'G' '[' int ',' int ']' unary
//              | 'F' '[' int ',' int ']' unary | primary
// primary     := '(' equivalence ')' | ident

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { advance(); }

  NodePtr parse() {
    NodePtr n = equivalence();
    if (cur_.kind != Tok::end) {
      throw SyntaxError("trailing input after formula", cur_.pos);
    }
    return n;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw SyntaxError(what, cur_.pos);
    advance();
  }

  NodePtr equivalence() {
    NodePtr n = implication();
    while (cur_.kind == Tok::darrow) {
      advance();
      MtlNode out;
      out.op = MtlOp::equivalence;
      out.lhs = n;
      out.rhs = implication();
      n = make_node(std::move(out));
    }
    return n;
  }

  NodePtr implication() {
    NodePtr n = disjunction();
    if (cur_.kind == Tok::arrow) {
      advance();
      MtlNode out;
      out.op = MtlOp::implication;
      out.lhs = n;
      out.rhs = implication();
      n = make_node(std::move(out));
    }
    return n;
  }

  NodePtr disjunction() {
    NodePtr n = conjunction();
    while (cur_.kind == Tok::pipe) {
      advance();
      MtlNode out;
      out.op = MtlOp::disjunction;
      out.lhs = n;
      out.rhs = conjunction();
      n = make_node(std::move(out));
    }
    return n;
  }

  NodePtr conjunction() {
    NodePtr n = unary();
    while (cur_.kind == Tok::amp) {
      advance();
      MtlNode out;
      out.op = MtlOp::conjunction;
      out.lhs = n;
      out.rhs = unary();
      n = make_node(std::move(out));
    }
    return n;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::bang) {
      advance();
      MtlNode out;
      out.op = MtlOp::negation;
      out.lhs = unary();
      return make_node(std::move(out));
    }
    if (cur_.kind == Tok::ident && (cur_.text == "G" || cur_.text == "F")) {
      // G / F act as temporal operators only when a bracket follows;
      // otherwise they are ordinary atom names.
      bool always = cur_.text == "G";
      Token saved = cur_;
      advance();
      if (cur_.kind != Tok::lbracket) return atom_node(saved.text);
      advance();
      std::int64_t lo = interval_bound();
      expect(Tok::comma, "expected ',' in interval");
      std::int64_t hi = interval_bound();
      expect(Tok::rbracket, "expected ']' after interval");
      if (lo > hi) {
        std::ostringstream msg;
        msg << "interval [" << lo << "," << hi << "] has lo > hi";
        throw BadInterval(msg.str());
      }
      MtlNode out;
      out.op = always ? MtlOp::always : MtlOp::eventually;
      out.lo = lo;
      out.hi = hi;
      out.lhs = unary();
      return make_node(std::move(out));
    }
    return primary();
  }

  std::int64_t interval_bound() {
    if (cur_.kind != Tok::number) {
      throw SyntaxError("expected integer interval bound", cur_.pos);
    }
    std::int64_t v = cur_.value;
    advance();
    return v;
  }

  NodePtr primary() {
    if (cur_.kind == Tok::lparen) {
      advance();
      NodePtr n = equivalence();
      expect(Tok::rparen, "expected ')'");
      return n;
    }
    if (cur_.kind == Tok::ident) {
      std::string name = cur_.text;
      advance();
      return atom_node(name);
    }
    throw SyntaxError("expected atom, '!', 'G', 'F' or '('", cur_.pos);
  }

  NodePtr atom_node(std::string name) {
    MtlNode out;
    out.op = MtlOp::atom;
    out.atom = std::move(name);
    return make_node(std::move(out));
  }

  Lexer lex_;
  Token cur_;
};

// ---- printer --------------------------------------------------------------

// Precedence levels used when printing; a child is parenthesized when its
// level is below the minimum its context requires.
int prec_of(MtlOp op) {
  switch (op) {
    case MtlOp::equivalence: return 1;
    case MtlOp::implication: return 2;
    case MtlOp::disjunction: return 3;
    case MtlOp::conjunction: return 4;
    case MtlOp::negation:
    case MtlOp::always:
    case MtlOp::eventually: return 5;
    default: return 6;
  }
}

void print_node(const MtlNode& n, int min_prec, std::string& out) {
  int p = prec_of(n.op);
  bool wrap = p < min_prec;
  if (wrap) out += '(';
  switch (n.op) {
    case MtlOp::atom:
      out += n.atom;
      break;
    case MtlOp::negation:
      out += '!';
      print_node(*n.lhs, 5, out);
      break;
    case MtlOp::always:
    case MtlOp::eventually: {
      out += n.op == MtlOp::always ? 'G' : 'F';
      out += '[';
      out += std::to_string(n.lo);
      out += ',';
      out += std::to_string(n.hi);
      out += "](";
      print_node(*n.lhs, 0, out);
      out += ')';
      break;
    }
    case MtlOp::conjunction:
      print_node(*n.lhs, 4, out);
      out += " & ";
      print_node(*n.rhs, 5, out);
      break;
    case MtlOp::disjunction:
      print_node(*n.lhs, 3, out);
      out += " | ";
      print_node(*n.rhs, 4, out);
      break;
    case MtlOp::implication:
      // Right-associative: the right child may be another implication.
      print_node(*n.lhs, 3, out);
      out += " -> ";
      print_node(*n.rhs, 2, out);
      break;
    case MtlOp::equivalence:
      print_node(*n.lhs, 1, out);
      out += " <-> ";
      print_node(*n.rhs, 2, out);
      break;
  }
  if (wrap) out += ')';
}

// ---- evaluation -----------------------------------------------------------

MtlValue eval_node(const MtlNode& n, const std::vector<BoolTrace>& traces,
                   std::int64_t step) {
  switch (n.op) {
    case MtlOp::atom: {
      for (const BoolTrace& t : traces) {
        if (t.name != n.atom) continue;
        if (!t.covers(step)) return MtlValue::OutOfWindow;
        return t.at(step) ? MtlValue::True : MtlValue::False;
      }
      throw UnknownAtom("formula references unknown signal '" + n.atom + "'");
    }
    case MtlOp::negation: {
      MtlValue v = eval_node(*n.lhs, traces, step);
      if (v == MtlValue::OutOfWindow) return v;
      return v == MtlValue::True ? MtlValue::False : MtlValue::True;
    }
    case MtlOp::conjunction: {
      MtlValue a = eval_node(*n.lhs, traces, step);
      MtlValue b = eval_node(*n.rhs, traces, step);
      if (a == MtlValue::OutOfWindow || b == MtlValue::OutOfWindow) {
        return MtlValue::OutOfWindow;
      }
      return a == MtlValue::True && b == MtlValue::True ? MtlValue::True
                                                        : MtlValue::False;
    }
    case MtlOp::disjunction: {
      MtlValue a = eval_node(*n.lhs, traces, step);
      MtlValue b = eval_node(*n.rhs, traces, step);
      if (a == MtlValue::OutOfWindow || b == MtlValue::OutOfWindow) {
        return MtlValue::OutOfWindow;
      }
      return a == MtlValue::True || b == MtlValue::True ? MtlValue::True
                                                        : MtlValue::False;
    }
    case MtlOp::implication: {
      MtlValue a = eval_node(*n.lhs, traces, step);
      MtlValue b = eval_node(*n.rhs, traces, step);
      if (a == MtlValue::OutOfWindow || b == MtlValue::OutOfWindow) {
        return MtlValue::OutOfWindow;
      }
      return a == MtlValue::False || b == MtlValue::True ? MtlValue::True
                                                         : MtlValue::False;
    }
    case MtlOp::equivalence: {
      MtlValue a = eval_node(*n.lhs, traces, step);
      MtlValue b = eval_node(*n.rhs, traces, step);
      if (a == MtlValue::OutOfWindow || b == MtlValue::OutOfWindow) {
        return MtlValue::OutOfWindow;
      }
      return a == b ? MtlValue::True : MtlValue::False;
    }
    case MtlOp::always:
    case MtlOp::eventually: {
      // The whole window is inspected before deciding: OutOfWindow anywhere
      // in it wins over a truth value found elsewhere.
      bool any_true = false;
      bool any_false = false;
      for (std::int64_t j = step + n.lo; j <= step + n.hi; ++j) {
        MtlValue v = eval_node(*n.lhs, traces, j);
        if (v == MtlValue::OutOfWindow) return MtlValue::OutOfWindow;
        if (v == MtlValue::True) {
          any_true = true;
        } else {
          any_false = true;
        }
      }
      if (n.op == MtlOp::eventually) {
        return any_true ? MtlValue::True : MtlValue::False;
      }
      return any_false ? MtlValue::False : MtlValue::True;
    }
  }
  throw ContractViolation("unhandled formula node");
}

void collect_atoms(const MtlNode& n, std::set<std::string>& out) {
  if (n.op == MtlOp::atom) {
    out.insert(n.atom);
    return;
  }
  if (n.lhs) collect_atoms(*n.lhs, out);
  if (n.rhs) collect_atoms(*n.rhs, out);
}

}  // namespace

MtlFormula MtlFormula::parse(const std::string& text) {
  Parser p(text);
  return MtlFormula(p.parse());
}

std::string MtlFormula::str() const {
  std::string out;
  print_node(*root_, 0, out);
  return out;
}

std::vector<std::string> MtlFormula::atoms() const {
  std::set<std::string> names;
  collect_atoms(*root_, names);
  return std::vector<std::string>(names.begin(), names.end());
}

MtlValue eval_at(const MtlFormula& formula,
                 const std::vector<BoolTrace>& traces, std::int64_t step) {
  return eval_node(formula.root(), traces, step);
}

BoolTrace eval_all(const MtlFormula& formula,
                   const std::vector<BoolTrace>& traces) {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool any = false;
  for (const BoolTrace& t : traces) {
    std::int64_t end = t.offset + static_cast<std::int64_t>(t.values.size());
    if (!any) {
      lo = t.offset;
      hi = end;
      any = true;
    } else {
      lo = std::min(lo, t.offset);
      hi = std::max(hi, end);
    }
  }
  BoolTrace out;
  out.name = formula.str();
  bool started = false;
  for (std::int64_t step = lo; step < hi; ++step) {
    MtlValue v = eval_at(formula, traces, step);
    if (v == MtlValue::OutOfWindow) {
      // Defined steps form one contiguous run; once it ends we are done.
      if (started) break;
      continue;
    }
    if (!started) {
      out.offset = step;
      started = true;
    }
    out.values.push_back(v == MtlValue::True);
  }
  return out;
}

}  // namespace trajmine
