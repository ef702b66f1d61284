// SPDX-License-Identifier: Apache-2.0

#include "cma/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

struct Expression::Node {
  enum class Kind { kNumber, kCoord, kAdd, kSub, kMul, kNeg, kSin, kCos, kExp };
  Kind kind = Kind::kNumber;
  double value = 0.0;
  int axis = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// c0 + sum_a c[a] x_a, when a subtree is affine in the coordinates.
struct Affine {
  double constant = 0.0;
  std::array<double, 4> coeff{};
};

std::optional<Affine> affine(const Node& n) {
  switch (n.kind) {
    case Node::Kind::kNumber:
      return Affine{n.value, {}};
    case Node::Kind::kCoord: {
      Affine a;
      a.coeff[n.axis] = 1.0;
      return a;
    }
    case Node::Kind::kNeg: {
      auto a = affine(*n.lhs);
      if (!a) return std::nullopt;
      a->constant = -a->constant;
      for (double& c : a->coeff) c = -c;
      return a;
    }
    case Node::Kind::kAdd:
    case Node::Kind::kSub: {
      auto a = affine(*n.lhs);
      auto b = affine(*n.rhs);
      if (!a || !b) return std::nullopt;
      const double s = n.kind == Node::Kind::kAdd ? 1.0 : -1.0;
      a->constant += s * b->constant;
      for (int i = 0; i < 4; ++i) a->coeff[i] += s * b->coeff[i];
      return a;
    }
    case Node::Kind::kMul: {
      auto a = affine(*n.lhs);
      auto b = affine(*n.rhs);
      if (!a || !b) return std::nullopt;
      const bool a_const = std::all_of(a->coeff.begin(), a->coeff.end(), [](double c) { return c == 0.0; });
      const bool b_const = std::all_of(b->coeff.begin(), b->coeff.end(), [](double c) { return c == 0.0; });
      if (!a_const && !b_const) return std::nullopt;
      const Affine& lin = a_const ? *b : *a;
      const double scale = a_const ? a->constant : b->constant;
      Affine out;
      out.constant = scale * lin.constant;
      for (int i = 0; i < 4; ++i) out.coeff[i] = scale * lin.coeff[i];
      return out;
    }
    default: {
      // Functions of constants are constants.
      return std::nullopt;
    }
  }
}

bool has_coordinate(const Node& n) {
  if (n.kind == Node::Kind::kCoord) return true;
  return (n.lhs && has_coordinate(*n.lhs)) || (n.rhs && has_coordinate(*n.rhs));
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  int max_axis() const { return max_axis_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("expression error at position " + std::to_string(pos_) + ": " + what + " in \"" + s_ +
                      "\"");
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::kAdd, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::kSub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (accept('*')) lhs = make(Node::Kind::kMul, lhs, unary());
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::kNeg, unary());
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string w = s_.substr(start, pos_ - start);
    if (w == "pi") {
      auto n = std::make_shared<Node>();
      n->value = std::numbers::pi;
      return n;
    }
    static const std::array<const char*, 4> coords{"x1", "y1", "x2", "y2"};
    for (int a = 0; a < 4; ++a) {
      if (w == coords[a]) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::kCoord;
        n->axis = a;
        max_axis_ = std::max(max_axis_, a);
        return n;
      }
    }
    Node::Kind kind;
    if (w == "sin") {
      kind = Node::Kind::kSin;
    } else if (w == "cos") {
      kind = Node::Kind::kCos;
    } else if (w == "exp") {
      kind = Node::Kind::kExp;
    } else {
      pos_ = start;
      fail("unknown name '" + w + "'");
    }
    if (!accept('(')) fail("expected '(' after " + w);
    const std::size_t arg_pos = pos_;
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    if (kind != Node::Kind::kExp && has_coordinate(*arg)) check_periodic(*arg, arg_pos);
    return make(kind, arg);
  }

  void check_periodic(const Node& arg, std::size_t arg_pos) {
    const auto a = affine(arg);
    const std::size_t saved = pos_;
    pos_ = arg_pos;
    if (!a) fail("sin/cos argument must be linear in the coordinates");
    for (double c : a->coeff) {
      const double k = c / kTwoPi;
      if (std::abs(k - std::round(k)) > 1e-9) fail("coordinate coefficient must be 2*pi times an integer");
    }
    pos_ = saved;
  }

  std::string s_;
  std::size_t pos_ = 0;
  int max_axis_ = -1;
};

// Bare coordinates outside sin/cos would break periodicity.
void check_coordinates_wrapped(const Node& n, bool inside_trig, const std::string& text) {
  if (n.kind == Node::Kind::kCoord && !inside_trig) {
    throw FormatError("expression error: coordinates may only appear inside sin or cos in \"" + text + "\"");
  }
  const bool trig = inside_trig || n.kind == Node::Kind::kSin || n.kind == Node::Kind::kCos;
  if (n.lhs) check_coordinates_wrapped(*n.lhs, trig, text);
  if (n.rhs) check_coordinates_wrapped(*n.rhs, trig, text);
}

double eval(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case Node::Kind::kNumber:
      return n.value;
    case Node::Kind::kCoord:
      return x[n.axis];
    case Node::Kind::kAdd:
      return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Node::Kind::kSub:
      return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Node::Kind::kMul:
      return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Node::Kind::kNeg:
      return -eval(*n.lhs, x);
    case Node::Kind::kSin:
      return std::sin(eval(*n.lhs, x));
    case Node::Kind::kCos:
      return std::cos(eval(*n.lhs, x));
    case Node::Kind::kExp:
      return std::exp(eval(*n.lhs, x));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser parser(text);
  Expression e;
  e.root_ = parser.parse();
  check_coordinates_wrapped(*e.root_, false, text);
  e.required_axes_ = parser.max_axis() < 0 ? 0 : (parser.max_axis() / 2 + 1) * 2;
  e.text_ = text;
  return e;
}

double Expression::evaluate(std::span<const double> coords) const {
  if (static_cast<int>(coords.size()) < required_axes_) {
    throw InvalidArgument("expression needs " + std::to_string(required_axes_) + " coordinates");
  }
  return eval(*root_, coords);
}

PeriodicScalarField Expression::sample(const Grid& grid) const {
  if (required_axes_ > grid.num_axes()) {
    throw InvalidArgument("expression \"" + text_ + "\" uses coordinates beyond n = " +
                          std::to_string(grid.complex_dim()));
  }
  return PeriodicScalarField::sample(grid, [this](std::span<const double> x) { return Complex(eval(*root_, x)); });
}

}  // namespace cma
