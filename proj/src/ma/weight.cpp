#include "convexkit/ma/weight.hpp"

#include "convexkit/core/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace convexkit::ma {

namespace {

struct Env {
  const Vec2& p;
  double z;
  const Vec2& x;
};

struct Expr {
  virtual ~Expr() = default;
  virtual double eval(const Env& env) const = 0;
};
using ExprPtr = std::shared_ptr<const Expr>;

struct Number : Expr {
  double value;
  explicit Number(double v) : value(v) {}
  double eval(const Env&) const override { return value; }
};

enum class Var { P1, P2, Z, X1, X2 };

struct Variable : Expr {
  Var var;
  explicit Variable(Var v) : var(v) {}
  double eval(const Env& env) const override {
    switch (var) {
      case Var::P1: return env.p.x();
      case Var::P2: return env.p.y();
      case Var::Z: return env.z;
      case Var::X1: return env.x.x();
      case Var::X2: return env.x.y();
    }
    return 0.0;
  }
};

struct Unary : Expr {
  double (*fn)(double);
  ExprPtr arg;
  Unary(double (*f)(double), ExprPtr a) : fn(f), arg(std::move(a)) {}
  double eval(const Env& env) const override { return fn(arg->eval(env)); }
};

struct Binary : Expr {
  char op;
  ExprPtr lhs, rhs;
  Binary(char o, ExprPtr l, ExprPtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
  double eval(const Env& env) const override {
    const double a = lhs->eval(env), b = rhs->eval(env);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      case '/': return a / b;
      case '^': return std::pow(a, b);
      case 'm': return std::min(a, b);
      case 'M': return std::max(a, b);
    }
    return 0.0;
  }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  ExprPtr parse() {
    ExprPtr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  bool uses_p = false, uses_z = false, uses_x = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("weight expression: " + msg + " at column " + std::to_string(pos_ + 1), pos_ + 1, "theta");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  ExprPtr sum() {
    ExprPtr e = product();
    for (;;) {
      if (eat('+')) e = std::make_shared<Binary>('+', e, product());
      else if (eat('-')) e = std::make_shared<Binary>('-', e, product());
      else return e;
    }
  }
  ExprPtr product() {
    ExprPtr e = unary();
    for (;;) {
      if (eat('*')) e = std::make_shared<Binary>('*', e, unary());
      else if (eat('/')) e = std::make_shared<Binary>('/', e, unary());
      else return e;
    }
  }
  ExprPtr unary() {
    if (eat('-')) return std::make_shared<Binary>('-', std::make_shared<Number>(0.0), unary());
    if (eat('+')) return unary();
    return power();
  }
  // Right associative; binds tighter than unary minus on its left.
  ExprPtr power() {
    ExprPtr base = atom();
    if (eat('^')) return std::make_shared<Binary>('^', base, unary());
    return base;
  }
  ExprPtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (eat('(')) {
      ExprPtr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return std::make_shared<Number>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') return call(name, start);
      return name_ref(name, start);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  ExprPtr name_ref(const std::string& name, std::size_t start) {
    if (name == "pi") return std::make_shared<Number>(kPi);
    if (name == "e") return std::make_shared<Number>(std::exp(1.0));
    if (name == "p1" || name == "p2") {
      uses_p = true;
      return std::make_shared<Variable>(name == "p1" ? Var::P1 : Var::P2);
    }
    if (name == "z") {
      uses_z = true;
      return std::make_shared<Variable>(Var::Z);
    }
    if (name == "x1" || name == "x" || name == "x2" || name == "y") {
      uses_x = true;
      return std::make_shared<Variable>(name == "x1" || name == "x" ? Var::X1 : Var::X2);
    }
    pos_ = start;
    fail("unknown name '" + name + "'");
  }
  ExprPtr call(const std::string& name, std::size_t start) {
    expect('(');
    std::vector<ExprPtr> args{sum()};
    while (eat(',')) args.push_back(sum());
    expect(')');
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        pos_ = start;
        fail(name + " takes " + std::to_string(n) + " argument(s)");
      }
    };
    struct Fn {
      const char* name;
      double (*fn)(double);
    };
    static const Fn unary_fns[] = {{"sqrt", [](double v) { return std::sqrt(v); }},
                                   {"exp", [](double v) { return std::exp(v); }},
                                   {"log", [](double v) { return std::log(v); }},
                                   {"sin", [](double v) { return std::sin(v); }},
                                   {"cos", [](double v) { return std::cos(v); }},
                                   {"tan", [](double v) { return std::tan(v); }},
                                   {"abs", [](double v) { return std::abs(v); }}};
    for (const Fn& f : unary_fns)
      if (name == f.name) {
        arity(1);
        return std::make_shared<Unary>(f.fn, args[0]);
      }
    if (name == "pow" || name == "min" || name == "max") {
      arity(2);
      const char op = name == "pow" ? '^' : name == "min" ? 'm' : 'M';
      return std::make_shared<Binary>(op, args[0], args[1]);
    }
    pos_ = start;
    fail("unknown function '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Weight::Weight() : eval_([](const Vec2&, double, const Vec2&) { return 1.0; }), text_("1") {}

Weight Weight::constant(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("constant weight must be finite");
  Weight w;
  w.eval_ = [value](const Vec2&, double, const Vec2&) { return value; };
  std::ostringstream os;
  os.precision(17);
  os << value;
  w.text_ = os.str();
  return w;
}

Weight Weight::parse(const std::string& expression) {
  Parser parser(expression);
  ExprPtr root = parser.parse();
  Weight w;
  w.eval_ = [root](const Vec2& p, double z, const Vec2& x) { return root->eval(Env{p, z, x}); };
  w.uses_p_ = parser.uses_p;
  w.uses_z_ = parser.uses_z;
  w.uses_x_ = parser.uses_x;
  w.text_ = expression;
  return w;
}

Weight Weight::from_function(Function f, bool uses_p, bool uses_z, bool uses_x, std::string label) {
  Weight w;
  w.eval_ = std::move(f);
  w.uses_p_ = uses_p;
  w.uses_z_ = uses_z;
  w.uses_x_ = uses_x;
  w.text_ = std::move(label);
  return w;
}

}  // namespace convexkit::ma
