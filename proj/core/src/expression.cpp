#include "cvapprox/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "cvapprox/error.hpp"

namespace cvapprox {

enum class Op { num, var, param_j, param_l, norm, neg, add, sub, mul, div, pow, exp, log, sqrt, sin, cos, abs, indicator };

struct Expression::Node {
  Op op = Op::num;
  double value = 0.0;
  std::size_t var = 0;
  std::vector<std::shared_ptr<const Node>> args;
  bool has_x = false;  // depends on the evaluation point
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, std::size_t var = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->has_x = op == Op::var || op == Op::norm || op == Op::indicator;
  for (const auto& a : args) n->has_x = n->has_x || a->has_x;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  Parser(std::string_view s, std::size_t dim) : s_(s), dim_(dim) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::parse, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
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
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make(Op::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make(Op::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Op::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::pow, {base, unary()});
    return base;
  }

  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (c == '|') {
      ++pos_;
      const std::size_t save = pos_;
      skip();
      if (pos_ < s_.size() && s_[pos_] == 'x') {
        ++pos_;
        skip();
        if (pos_ < s_.size() && s_[pos_] == '|') {
          ++pos_;
          return make(Op::norm);
        }
      }
      pos_ = save;
      NodePtr n = expr();
      expect('|');
      return make(Op::abs, {n});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.data() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::num, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string id = ident();
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') return call(id);
      if (id == "pi") return make(Op::num, {}, std::numbers::pi);
      if (id == "j") return make(Op::param_j);
      if (id == "l") return make(Op::param_l);
      if (id == "x") {
        if (dim_ != 1) fail("bare 'x' is only allowed in one dimension");
        return make(Op::var, {}, 0.0, 0);
      }
      if (id.size() >= 2 && id[0] == 'x') {
        std::size_t k = 0;
        for (std::size_t i = 1; i < id.size(); ++i) {
          if (!std::isdigit(static_cast<unsigned char>(id[i]))) fail("unknown identifier '" + id + "'");
          k = k * 10 + static_cast<std::size_t>(id[i] - '0');
        }
        if (k < 1 || k > dim_) fail("coordinate '" + id + "' out of range");
        return make(Op::var, {}, 0.0, k - 1);
      }
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr call(const std::string& name) {
    expect('(');
    std::vector<NodePtr> args;
    if (!accept(')')) {
      do {
        args.push_back(expr());
      } while (accept(','));
      expect(')');
    }
    auto unary_fn = [&](Op op) {
      if (args.size() != 1) fail(name + " takes one argument");
      return make(op, std::move(args));
    };
    if (name == "exp") return unary_fn(Op::exp);
    if (name == "log") return unary_fn(Op::log);
    if (name == "sqrt") return unary_fn(Op::sqrt);
    if (name == "sin") return unary_fn(Op::sin);
    if (name == "cos") return unary_fn(Op::cos);
    if (name == "abs") return unary_fn(Op::abs);
    if (name == "indicator") {
      if (args.size() != 2 * dim_) fail("indicator takes lo,hi per axis");
      for (const auto& a : args) {
        if (a->has_x) fail("indicator bounds must not depend on x");
      }
      return make(Op::indicator, std::move(args));
    }
    fail("unknown function '" + name + "'");
  }

  std::string_view s_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

struct DoubleCtx {
  std::span<const double> x;
  const Expression::Params& p;
  double var(std::size_t i) const { return x[i]; }
  double constant(double v) const { return v; }
};

struct JetCtx {
  std::span<const double> x;
  const Expression::Params& p;
  const JetLayout& layout;
  Jet var(std::size_t i) const { return Jet::variable(layout, x[i], i); }
  Jet constant(double v) const { return Jet(layout, v); }
};

double eval_const(const Expression::Node& n, std::span<const double> x, const Expression::Params& p);

template <class T, class Ctx>
T eval_node(const Expression::Node& n, const Ctx& ctx) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  switch (n.op) {
    case Op::num: return ctx.constant(n.value);
    case Op::param_j: return ctx.constant(ctx.p.j);
    case Op::param_l: return ctx.constant(ctx.p.l);
    case Op::var: return ctx.var(n.var);
    case Op::norm: {
      T s = ctx.constant(0.0);
      for (std::size_t i = 0; i < ctx.x.size(); ++i) s = s + ctx.var(i) * ctx.var(i);
      return sqrt(s);
    }
    case Op::neg: return -eval_node<T>(*n.args[0], ctx);
    case Op::add: return eval_node<T>(*n.args[0], ctx) + eval_node<T>(*n.args[1], ctx);
    case Op::sub: return eval_node<T>(*n.args[0], ctx) - eval_node<T>(*n.args[1], ctx);
    case Op::mul: return eval_node<T>(*n.args[0], ctx) * eval_node<T>(*n.args[1], ctx);
    case Op::div: return eval_node<T>(*n.args[0], ctx) / eval_node<T>(*n.args[1], ctx);
    case Op::pow: {
      const auto& base = *n.args[0];
      const auto& ex = *n.args[1];
      if (!ex.has_x) {
        const double p = eval_const(ex, ctx.x, ctx.p);
        if (base.op == Op::norm) {
          // |x|^p evaluated through the squared norm so even powers stay smooth at 0
          T s = ctx.constant(0.0);
          for (std::size_t i = 0; i < ctx.x.size(); ++i) s = s + ctx.var(i) * ctx.var(i);
          return pow(s, 0.5 * p);
        }
        return pow(eval_node<T>(base, ctx), p);
      }
      return pow(eval_node<T>(base, ctx), eval_node<T>(ex, ctx));
    }
    case Op::exp: return exp(eval_node<T>(*n.args[0], ctx));
    case Op::log: return log(eval_node<T>(*n.args[0], ctx));
    case Op::sqrt: return sqrt(eval_node<T>(*n.args[0], ctx));
    case Op::sin: return sin(eval_node<T>(*n.args[0], ctx));
    case Op::cos: return cos(eval_node<T>(*n.args[0], ctx));
    case Op::abs: {
      using std::abs;
      using cvapprox::abs;
      return abs(eval_node<T>(*n.args[0], ctx));
    }
    case Op::indicator: {
      for (std::size_t a = 0; a < ctx.x.size(); ++a) {
        const double lo = eval_const(*n.args[2 * a], ctx.x, ctx.p);
        const double hi = eval_const(*n.args[2 * a + 1], ctx.x, ctx.p);
        if (ctx.x[a] < lo || ctx.x[a] > hi) return ctx.constant(0.0);
      }
      return ctx.constant(1.0);
    }
  }
  return ctx.constant(0.0);
}

double eval_const(const Expression::Node& n, std::span<const double> x, const Expression::Params& p) {
  return eval_node<double>(n, DoubleCtx{x, p});
}

}  // namespace

Expression Expression::parse(std::string_view text, std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::parse, "expression dimension must be positive");
  Expression e;
  e.root_ = Parser(text, dim).parse();
  e.text_ = std::string(text);
  e.dim_ = dim;
  return e;
}

double Expression::eval(std::span<const double> x, const Params& p) const {
  return eval_node<double>(*root_, DoubleCtx{x, p});
}

Jet Expression::eval(std::span<const double> x, const JetLayout& layout, const Params& p) const {
  return eval_node<Jet>(*root_, JetCtx{x, p, layout});
}

}  // namespace cvapprox
