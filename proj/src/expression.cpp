#include "leafscope/expression.hpp"

#include <cctype>
#include <cmath>
#include <type_traits>

namespace leafscope {

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh, Atan, Acos };

struct Expression::Node {
  Op op = Op::Num;
  Fn fn = Fn::Sin;
  double value = 0.0;
  int index = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& vars) : s_(src), vars_(vars) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    auto n = product();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, product());
      else if (accept('-')) n = make(Op::Sub, n, product());
      else return n;
    }
  }
  NodePtr product() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  // right-associative; binds tighter than unary minus on its left operand
  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      auto n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Num;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == id) {
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Var;
          n->index = static_cast<int>(i);
          return n;
        }
      }
      if (id == "pi" || id == "e") {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Num;
        n->value = id == "pi" ? kPi : std::exp(1.0);
        return n;
      }
      static const std::pair<const char*, Fn> table[] = {
          {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},   {"exp", Fn::Exp},
          {"log", Fn::Log},   {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs},   {"sinh", Fn::Sinh},
          {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"atan", Fn::Atan}, {"acos", Fn::Acos}};
      for (const auto& [name, fn] : table) {
        if (id == name) {
          if (!accept('(')) fail("expected '(' after " + id);
          auto arg = sum();
          if (!accept(')')) fail("expected ')'");
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Func;
          n->fn = fn;
          n->lhs = arg;
          return n;
        }
      }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

template <class T>
T apply_fn(Fn fn, const T& a) {
  using std::abs, std::acos, std::atan, std::cos, std::cosh, std::exp, std::log, std::sin,
      std::sinh, std::sqrt, std::tan, std::tanh;
  switch (fn) {
    case Fn::Sin: return sin(a);
    case Fn::Cos: return cos(a);
    case Fn::Tan: return tan(a);
    case Fn::Exp: return exp(a);
    case Fn::Log: return log(a);
    case Fn::Sqrt: return sqrt(a);
    case Fn::Abs:
      if constexpr (std::is_same_v<T, cplx>) return cplx(std::abs(a), 0.0);
      else return abs(a);
    case Fn::Sinh: return sinh(a);
    case Fn::Cosh: return cosh(a);
    case Fn::Tanh: return tanh(a);
    case Fn::Atan: return atan(a);
    case Fn::Acos: return acos(a);
  }
  return a;
}

template <class T>
T evaluate(const Expression::Node& n, std::span<const T> vars) {
  using std::pow;
  switch (n.op) {
    case Op::Num: return T(n.value);
    case Op::Var: return vars[static_cast<std::size_t>(n.index)];
    case Op::Neg: return -evaluate(*n.lhs, vars);
    case Op::Add: return evaluate(*n.lhs, vars) + evaluate(*n.rhs, vars);
    case Op::Sub: return evaluate(*n.lhs, vars) - evaluate(*n.rhs, vars);
    case Op::Mul: return evaluate(*n.lhs, vars) * evaluate(*n.rhs, vars);
    case Op::Div: return evaluate(*n.lhs, vars) / evaluate(*n.rhs, vars);
    case Op::Pow: {
      // integer powers by repeated multiplication keep negative bases valid
      if (n.rhs->op == Op::Num && n.rhs->value == std::floor(n.rhs->value) &&
          std::abs(n.rhs->value) <= 16) {
        const T base = evaluate(*n.lhs, vars);
        const int k = static_cast<int>(n.rhs->value);
        T r(1.0);
        for (int i = 0; i < std::abs(k); ++i) r = r * base;
        return k < 0 ? T(1.0) / r : r;
      }
      return pow(evaluate(*n.lhs, vars), evaluate(*n.rhs, vars));
    }
    case Op::Func: return apply_fn(n.fn, evaluate(*n.lhs, vars));
  }
  return T(0.0);
}

}  // namespace

Expression::Expression(const std::string& source, std::vector<std::string> variables)
    : source_(source), variables_(std::move(variables)) {
  root_ = Parser(source_, variables_).parse();
}

Expression Expression::over_coordinates(const std::string& source, int n) {
  std::vector<std::string> vars;
  for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  return Expression(source, std::move(vars));
}

double Expression::eval(std::span<const double> vars) const { return evaluate(*root_, vars); }
Jet Expression::eval(std::span<const Jet> vars) const { return evaluate(*root_, vars); }
cplx Expression::eval(std::span<const cplx> vars) const { return evaluate(*root_, vars); }

}  // namespace leafscope
