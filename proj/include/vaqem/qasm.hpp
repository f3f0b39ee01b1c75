// Copyright 2026 The VAQEM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vaqem/circuit.hpp"
#include "vaqem/common.hpp"

// Deterministic OpenQASM 2 subset.
//
//   program    := [ "OPENQASM" REAL ";" ] { include | qreg | creg | statement }
//   include    := "include" STRING ";"          (only "qelib1.inc")
//   qreg       := "qreg" ID "[" INT "]" ";"     (exactly one)
//   creg       := "creg" ID "[" INT "]" ";"
//   statement  := gate [ "(" angle ")" ] qarg { "," qarg } ";"
//               | "delay" "[" INT "]" qarg ";"
//               | "measure" qarg "->" carg ";"
//               | "barrier" qarg { "," qarg } ";"
//   gate       := id | x | y | z | h | rx | ry | rz | cx
//   angle      := ID | expr                      (a bare ID is a parameter slot)
//   expr       := term { ("+" | "-") term }
//   term       := unary { ("*" | "/") unary }
//   unary      := "-" unary | NUMBER | "pi" | "(" expr ")"
namespace vaqem::qasm {

using ParsedCircuit = Circuit;  // parameter slot order = first appearance

enum class StatementKind { Gate, Barrier };

struct Statement {
  StatementKind kind = StatementKind::Gate;
  Gate gate;                // Gate statements
  std::vector<int> qubits;  // Barrier statements
  int line = 0;
};

struct Program {
  std::string version = "2.0";
  std::string qreg = "q";
  int n_qubits = 0;
  std::vector<Statement> statements;
  std::vector<std::string> parameters;
};

namespace detail {

enum class Tok { Ident, Number, String, Symbol, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          t.text += take();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.kind = Tok::Number;
        lex_number(t);
      } else if (c == '"') {
        t.kind = Tok::String;
        take();
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') t.text += take();
        if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError("unterminated string", t.line, t.column);
        take();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        t.kind = Tok::Arrow;
        t.text = "->";
        take();
        take();
      } else if (std::string_view("[](),;+-*/").find(c) != std::string_view::npos) {
        t.kind = Tok::Symbol;
        t.text = std::string(1, take());
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char take() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += take();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      t.text += take();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      t.text += take();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) t.text += take();
      const auto before = t.text.size();
      digits();
      if (t.text.size() == before) throw ParseError("malformed exponent", t.line, t.column);
    }
    if (t.text == ".") throw ParseError("malformed number", t.line, t.column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program prog;
    if (is_ident("OPENQASM")) {
      next();
      const auto& v = expect(Tok::Number, "version number");
      prog.version = v.text;
      expect_symbol(";");
    }
    bool have_qreg = false;
    while (peek().kind != Tok::End) {
      const Token& head = peek();
      if (head.kind != Tok::Ident) throw error_at(head, "expected a statement");
      if (head.text == "include") {
        next();
        const auto& file = expect(Tok::String, "include file name");
        if (file.text != "qelib1.inc") throw error_at(file, "only qelib1.inc may be included");
        expect_symbol(";");
      } else if (head.text == "qreg") {
        if (have_qreg) throw error_at(head, "only one quantum register is supported");
        next();
        prog.qreg = expect(Tok::Ident, "register name").text;
        prog.n_qubits = bracket_int();
        if (prog.n_qubits <= 0) throw error_at(head, "register size must be positive");
        expect_symbol(";");
        have_qreg = true;
        qreg_ = prog.qreg;
        n_qubits_ = prog.n_qubits;
      } else if (head.text == "creg") {
        next();
        creg_ = expect(Tok::Ident, "register name").text;
        cbits_ = bracket_int();
        expect_symbol(";");
      } else {
        if (!have_qreg) throw error_at(head, "statement before qreg declaration");
        prog.statements.push_back(statement());
      }
    }
    if (!have_qreg) throw error_at(peek(), "missing qreg declaration");
    prog.parameters = params_;
    return prog;
  }

 private:
  using AngleValue = std::variant<double, std::string>;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  bool is_symbol(std::string_view s) const { return peek().kind == Tok::Symbol && peek().text == s; }

  static ParseError error_at(const Token& t, const std::string& msg) {
    return ParseError(msg, t.line, t.column);
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) throw error_at(peek(), "expected " + what);
    return next();
  }

  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) throw error_at(peek(), "expected '" + std::string(s) + "'");
    next();
  }

  int bracket_int() {
    expect_symbol("[");
    const auto& t = expect(Tok::Number, "integer");
    if (t.text.find_first_not_of("0123456789") != std::string::npos) throw error_at(t, "expected integer");
    expect_symbol("]");
    return std::stoi(t.text);
  }

  int qarg() {
    const auto& name = expect(Tok::Ident, "qubit argument");
    if (name.text != qreg_) throw error_at(name, "unknown register '" + name.text + "'");
    expect_symbol("[");
    const auto& idx = expect(Tok::Number, "qubit index");
    if (idx.text.find_first_not_of("0123456789") != std::string::npos) throw error_at(idx, "expected integer");
    const long v = std::stol(idx.text);
    if (v >= n_qubits_) {
      throw error_at(idx, "qubit index " + idx.text + " out of range for register of size " +
                              std::to_string(n_qubits_));
    }
    expect_symbol("]");
    return static_cast<int>(v);
  }

  Statement statement() {
    const Token head = next();
    Statement st;
    st.line = head.line;
    const auto& name = head.text;
    if (name == "barrier") {
      st.kind = StatementKind::Barrier;
      st.qubits.push_back(qarg());
      while (is_symbol(",")) {
        next();
        st.qubits.push_back(qarg());
      }
      expect_symbol(";");
      return st;
    }
    if (name == "measure") {
      st.gate = Gate::measure(qarg());
      if (peek().kind != Tok::Arrow) throw error_at(peek(), "expected '->'");
      next();
      const auto& c = expect(Tok::Ident, "classical register");
      if (c.text != creg_) throw error_at(c, "unknown classical register '" + c.text + "'");
      const int bit = bracket_int();
      if (bit >= cbits_) throw error_at(c, "classical bit out of range");
      expect_symbol(";");
      return st;
    }
    if (name == "delay") {
      const int d = bracket_int();
      st.gate = Gate::delay_for(qarg(), d);
      expect_symbol(";");
      return st;
    }

    static const std::pair<std::string_view, GateKind> kTable[] = {
        {"id", GateKind::I}, {"x", GateKind::X},   {"y", GateKind::Y},   {"z", GateKind::Z},  {"h", GateKind::H},
        {"rx", GateKind::RX}, {"ry", GateKind::RY}, {"rz", GateKind::RZ}, {"cx", GateKind::CX}};
    std::optional<GateKind> kind;
    for (const auto& [n, k] : kTable) {
      if (n == name) kind = k;
    }
    if (!kind) throw error_at(head, "unknown gate '" + name + "'");

    st.gate.kind = *kind;
    if (is_rotation(*kind)) {
      expect_symbol("(");
      st.gate.angle = angle();
      expect_symbol(")");
    }
    st.gate.qubits.push_back(qarg());
    if (*kind == GateKind::CX) {
      expect_symbol(",");
      const Token& second = peek();
      st.gate.qubits.push_back(qarg());
      if (st.gate.qubits[0] == st.gate.qubits[1]) throw error_at(second, "cx needs two distinct qubits");
    }
    expect_symbol(";");
    return st;
  }

  Angle angle() {
    // A bare identifier (other than pi) names a parameter slot.
    if (peek().kind == Tok::Ident && peek().text != "pi") {
      const auto& id = next();
      if (!is_symbol(")")) throw error_at(peek(), "symbolic parameters must appear alone");
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i] == id.text) return Angle::parameter(static_cast<int>(i));
      }
      params_.push_back(id.text);
      return Angle::parameter(static_cast<int>(params_.size() - 1));
    }
    const double v = expr();
    if (!std::isfinite(v)) throw error_at(peek(), "angle is not finite");
    return Angle::literal(v);
  }

  double expr() {
    double v = term();
    while (is_symbol("+") || is_symbol("-")) {
      const bool plus = next().text == "+";
      const double r = term();
      v = plus ? v + r : v - r;
    }
    return v;
  }

  double term() {
    double v = unary();
    while (is_symbol("*") || is_symbol("/")) {
      const bool mul = next().text == "*";
      const double r = unary();
      v = mul ? v * r : v / r;
    }
    return v;
  }

  double unary() {
    if (is_symbol("-")) {
      next();
      return -unary();
    }
    if (is_symbol("(")) {
      next();
      const double v = expr();
      expect_symbol(")");
      return v;
    }
    if (is_ident("pi")) {
      next();
      return kPi;
    }
    if (peek().kind == Tok::Ident) throw error_at(peek(), "symbolic parameters must appear alone");
    const auto& t = expect(Tok::Number, "number");
    return std::stod(t.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string qreg_;
  int n_qubits_ = 0;
  std::string creg_;
  int cbits_ = 0;
  std::vector<std::string> params_;
};

inline std::string format_angle(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace detail

inline Program parse_program(std::string_view text) {
  return detail::Parser(detail::Lexer(text).run()).run();
}

/// Parses QASM text into an unscheduled gate list. Barriers are dropped.
inline ParsedCircuit parse(std::string_view text) {
  Program prog = parse_program(text);
  ParsedCircuit out;
  out.n_qubits = prog.n_qubits;
  out.parameters = std::move(prog.parameters);
  for (auto& st : prog.statements) {
    if (st.kind == StatementKind::Gate) out.gates.push_back(std::move(st.gate));
  }
  return out;
}

/// Canonical text for a gate list: one statement per line, angles in fixed
/// notation with 12 fractional digits (trailing zeros trimmed). A classical
/// register is declared only when something is measured.
inline std::string emit(std::span<const Gate> gates, int n_qubits,
                        std::span<const std::string> parameters = {}) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  os << "qreg q[" << n_qubits << "];\n";
  const bool measures =
      std::any_of(gates.begin(), gates.end(), [](const Gate& g) { return g.kind == GateKind::MEASURE; });
  if (measures) os << "creg c[" << n_qubits << "];\n";
  for (const auto& g : gates) {
    if (g.kind == GateKind::DELAY) {
      os << "delay[" << g.delay << "] q[" << g.qubits.at(0) << "];\n";
      continue;
    }
    if (g.kind == GateKind::MEASURE) {
      os << "measure q[" << g.qubits.at(0) << "] -> c[" << g.qubits.at(0) << "];\n";
      continue;
    }
    os << gate_name(g.kind);
    if (is_rotation(g.kind)) {
      os << "(";
      if (g.angle.symbolic()) {
        const auto slot = static_cast<std::size_t>(g.angle.slot);
        os << (slot < parameters.size() ? parameters[slot] : "p" + std::to_string(slot));
      } else {
        os << detail::format_angle(g.angle.value);
      }
      os << ")";
    }
    os << " q[" << g.qubits.at(0) << "]";
    if (g.kind == GateKind::CX) os << ", q[" << g.qubits.at(1) << "]";
    os << ";\n";
  }
  return os.str();
}

inline std::string emit(const ParsedCircuit& c) { return emit(c.gates, c.n_qubits, c.parameters); }

}  // namespace vaqem::qasm
