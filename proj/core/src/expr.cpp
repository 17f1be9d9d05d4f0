#include "nlea/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace nlea {

namespace {

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  std::string excerpt_at(std::size_t at) const {
    std::size_t begin = at;
    while (begin > 0 && src[begin - 1] != '\n') --begin;
    std::size_t end = at;
    while (end < src.size() && src[end] != '\n') ++end;
    std::string line(src.substr(begin, end - begin));
    if (line.size() > 60) line = line.substr(0, 60) + "...";
    return line;
  }
  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(pos, expected, excerpt_at(std::min(pos, src.size())));
  }
};

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : lex_{src} {
    for (std::size_t i = 0; i < vars.size(); ++i) var_index_[vars[i]] = static_cast<int>(i);
    num_vars_ = static_cast<int>(vars.size());
    if (num_vars_ == 0) throw DimensionError("parse_poly: empty variable list");
  }

  Polynomial parse() {
    Polynomial p = parse_sum();
    if (!lex_.eof()) lex_.fail("end of input or operator");
    return p;
  }

 private:
  Polynomial parse_sum() {
    Polynomial acc = parse_term();
    while (true) {
      char c = lex_.peek();
      if (c == '+') {
        ++lex_.pos;
        acc = acc + parse_term();
      } else if (c == '-') {
        ++lex_.pos;
        acc = acc - parse_term();
      } else {
        return acc;
      }
    }
  }

  // A product: factors joined by '*', '/' (numeric divisor only), or
  // juxtaposition ("2 x1", "2(x1+x2)").
  Polynomial parse_term() {
    Polynomial acc = parse_signed_factor();
    while (true) {
      char c = lex_.peek();
      if (c == '*') {
        ++lex_.pos;
        acc = acc * parse_signed_factor();
      } else if (c == '/') {
        ++lex_.pos;
        acc = acc * Complex(1.0 / parse_number_literal(), 0.0);
      } else if (starts_factor(c)) {
        acc = acc * parse_power();
      } else {
        return acc;
      }
    }
  }

  static bool starts_factor(char c) {
    return c == '(' || std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
           std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  Polynomial parse_signed_factor() {
    int sign = 1;
    while (true) {
      char c = lex_.peek();
      if (c == '-') {
        sign = -sign;
        ++lex_.pos;
      } else if (c == '+') {
        ++lex_.pos;
      } else {
        break;
      }
    }
    Polynomial p = parse_power();
    return sign < 0 ? -p : p;
  }

  Polynomial parse_power() {
    Polynomial base = parse_atom();
    if (lex_.peek() == '^') {
      ++lex_.pos;
      const int k = parse_uint_literal();
      Polynomial acc = Polynomial::constant(num_vars_, 1.0);
      for (int j = 0; j < k; ++j) acc = acc * base;
      return acc;
    }
    return base;
  }

  Polynomial parse_atom() {
    char c = lex_.peek();
    if (c == '(') {
      ++lex_.pos;
      Polynomial p = parse_sum();
      if (lex_.peek() != ')') lex_.fail("')'");
      ++lex_.pos;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Polynomial::constant(num_vars_, Complex(parse_number_literal(), 0.0));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = lex_.pos;
      std::string name = parse_identifier();
      if (name == "i") return Polynomial::constant(num_vars_, Complex(0.0, 1.0));
      auto it = var_index_.find(name);
      if (it == var_index_.end()) {
        lex_.pos = start;
        lex_.fail("a declared variable name (got '" + name + "')");
      }
      return Polynomial::variable(num_vars_, it->second);
    }
    lex_.fail("a number, variable, 'i', or '('");
  }

  std::string parse_identifier() {
    lex_.skip_ws();
    std::size_t start = lex_.pos;
    while (lex_.pos < lex_.src.size()) {
      char c = lex_.src[lex_.pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
        ++lex_.pos;
      else
        break;
    }
    return std::string(lex_.src.substr(start, lex_.pos - start));
  }

  double parse_number_literal() {
    lex_.skip_ws();
    std::size_t start = lex_.pos;
    auto digits = [&] {
      std::size_t n = 0;
      while (lex_.pos < lex_.src.size() &&
             std::isdigit(static_cast<unsigned char>(lex_.src[lex_.pos]))) {
        ++lex_.pos;
        ++n;
      }
      return n;
    };
    std::size_t int_digits = digits();
    std::size_t frac_digits = 0;
    if (lex_.pos < lex_.src.size() && lex_.src[lex_.pos] == '.') {
      ++lex_.pos;
      frac_digits = digits();
    }
    if (int_digits + frac_digits == 0) {
      lex_.pos = start;
      lex_.fail("a numeric literal");
    }
    if (lex_.pos < lex_.src.size() && (lex_.src[lex_.pos] == 'e' || lex_.src[lex_.pos] == 'E')) {
      std::size_t mark = lex_.pos;
      ++lex_.pos;
      if (lex_.pos < lex_.src.size() && (lex_.src[lex_.pos] == '+' || lex_.src[lex_.pos] == '-'))
        ++lex_.pos;
      if (digits() == 0) lex_.pos = mark;  // not an exponent suffix after all
    }
    std::string text(lex_.src.substr(start, lex_.pos - start));
    return std::strtod(text.c_str(), nullptr);
  }

  int parse_uint_literal() {
    lex_.skip_ws();
    std::size_t start = lex_.pos;
    long v = 0;
    std::size_t n = 0;
    while (lex_.pos < lex_.src.size() &&
           std::isdigit(static_cast<unsigned char>(lex_.src[lex_.pos]))) {
      v = v * 10 + (lex_.src[lex_.pos] - '0');
      if (v > 1000) {
        lex_.pos = start;
        lex_.fail("an exponent <= 1000");
      }
      ++lex_.pos;
      ++n;
    }
    if (n == 0) lex_.fail("a non-negative integer exponent");
    return static_cast<int>(v);
  }

  Lexer lex_;
  std::map<std::string, int> var_index_;
  int num_vars_;
};

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Polynomial parse_poly(std::string_view src, const std::vector<std::string>& vars) {
  return Parser(src, vars).parse();
}

std::string to_expression_string(const Polynomial& p, const std::vector<std::string>& vars) {
  if (static_cast<int>(vars.size()) != p.num_vars())
    throw DimensionError("to_expression_string: name count != num_vars");
  if (p.is_zero()) return "0";

  std::string out;
  bool first = true;
  for (const auto& [mono, c] : p.terms()) {
    std::string vars_part;
    for (int i = 0; i < p.num_vars(); ++i) {
      if (mono[i] == 0) continue;
      if (!vars_part.empty()) vars_part += "*";
      vars_part += vars[i];
      if (mono[i] > 1) vars_part += "^" + std::to_string(mono[i]);
    }

    // Coefficient rendering: keep it negatable so terms join with +/-.
    bool negate = false;
    std::string coeff_part;
    if (c.imag() == 0.0) {
      double re = c.real();
      if (re < 0) {
        negate = true;
        re = -re;
      }
      if (re != 1.0 || vars_part.empty()) coeff_part = fmt_double(re);
    } else if (c.real() == 0.0) {
      double im = c.imag();
      if (im < 0) {
        negate = true;
        im = -im;
      }
      coeff_part = (im == 1.0) ? "i" : fmt_double(im) + "*i";
    } else {
      coeff_part = "(" + fmt_double(c.real()) +
                   (c.imag() < 0 ? " - " : " + ") + fmt_double(std::abs(c.imag())) + "*i)";
    }

    std::string term = coeff_part;
    if (!vars_part.empty()) {
      if (!term.empty()) term += "*";
      term += vars_part;
    }

    if (first) {
      out = negate ? "-" + term : term;
      first = false;
    } else {
      out += negate ? " - " : " + ";
      out += term;
    }
  }
  return out;
}

}  // namespace nlea
