#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace hopfmean::expr {

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  int dim;
  const std::vector<std::string>& params;
  std::vector<Node>& nodes;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) { ++pos; return true; }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw SyntaxError(std::string("expected '") + c + "'", pos);
  }

  int add(Node n) {
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  // expr := term (('+'|'-') term)*
  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos;
      int rhs = parse_term();
      lhs = add({c == '+' ? NodeKind::Add : NodeKind::Sub, {}, 0, 0, lhs, rhs});
    }
  }

  // term := factor (('*'|'/') factor)*
  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos;
      int rhs = parse_factor();
      lhs = add({c == '*' ? NodeKind::Mul : NodeKind::Div, {}, 0, 0, lhs, rhs});
    }
  }

  // factor := '-' factor | power
  int parse_factor() {
    if (accept('-')) {
      int child = parse_factor();
      return add({NodeKind::Neg, {}, 0, 0, child, -1});
    }
    return parse_power();
  }

  // power := atom ('^' factor)?   right-associative, exponent may carry a sign
  int parse_power() {
    int base = parse_atom();
    if (accept('^')) {
      int exp = parse_factor();
      return add({NodeKind::Pow, {}, 0, 0, base, exp});
    }
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos >= src.size())
      throw SyntaxError("unexpected end of expression", pos);
    char c = src[pos];
    if (c == '(') {
      ++pos;
      int e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
  }

  int parse_number() {
    const char* begin = src.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError("malformed number", pos);
    pos += static_cast<std::size_t>(end - begin);
    return add({NodeKind::Constant, {}, v, 0, -1, -1});
  }

  int parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string_view name = src.substr(start, pos - start);

    static const std::pair<std::string_view, Func> funcs[] = {
        {"exp", Func::Exp}, {"log", Func::Log},   {"sin", Func::Sin},
        {"cos", Func::Cos}, {"tanh", Func::Tanh}, {"sqrt", Func::Sqrt},
        {"abs", Func::Abs}};
    for (auto& [fname, f] : funcs) {
      if (name == fname) {
        if (!accept('('))
          throw SyntaxError("function '" + std::string(name) + "' requires an argument list",
                            start);
        int arg = parse_expr();
        if (peek() == ',')
          throw SyntaxError("function '" + std::string(name) + "' takes exactly one argument",
                            pos);
        expect(')');
        return add({NodeKind::Call, f, 0, 0, arg, -1});
      }
    }

    // state variable x1..xn
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        int idx = std::atoi(std::string(name.substr(1)).c_str());
        if (idx < 1 || idx > dim)
          throw SyntaxError("state variable '" + std::string(name) +
                                "' out of range for dimension " + std::to_string(dim),
                            start);
        return add({NodeKind::StateVar, {}, 0, idx - 1, -1, -1});
      }
    }

    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == name)
        return add({NodeKind::Param, {}, 0, static_cast<int>(i), -1, -1});

    throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
  }
};

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

double apply(Func f, double x) {
  switch (f) {
    case Func::Exp: return std::exp(x);
    case Func::Log: return std::log(x);
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Tanh: return std::tanh(x);
    case Func::Sqrt: return std::sqrt(x);
    case Func::Abs: return std::abs(x);
  }
  return 0;
}

}  // namespace

Ast Ast::parse(std::string_view source, int dimension,
               const std::vector<std::string>& parameter_names) {
  if (source.empty()) throw SyntaxError("empty expression", 0);
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  for (std::size_t i = 0; i < parameter_names.size(); ++i)
    for (std::size_t j = i + 1; j < parameter_names.size(); ++j)
      if (parameter_names[i] == parameter_names[j])
        throw std::invalid_argument("duplicate parameter name: " + parameter_names[i]);

  Ast ast;
  ast.dim_ = dimension;
  ast.params_ = parameter_names;
  Parser p{source, 0, dimension, ast.params_, ast.nodes_};
  ast.root_ = p.parse_expr();
  p.skip_ws();
  if (p.pos != source.size())
    throw SyntaxError("trailing input", p.pos);
  return ast;
}

double Ast::eval(std::span<const double> state, std::span<const double> params) const {
  // nodes_ is in postorder (children precede parents), so one linear pass works
  thread_local std::vector<double> vals;
  vals.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: vals[i] = n.value; break;
      case NodeKind::StateVar: vals[i] = state[static_cast<std::size_t>(n.index)]; break;
      case NodeKind::Param:    vals[i] = params[static_cast<std::size_t>(n.index)]; break;
      case NodeKind::Neg:      vals[i] = -vals[static_cast<std::size_t>(n.lhs)]; break;
      case NodeKind::Add:
        vals[i] = vals[static_cast<std::size_t>(n.lhs)] + vals[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::Sub:
        vals[i] = vals[static_cast<std::size_t>(n.lhs)] - vals[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::Mul:
        vals[i] = vals[static_cast<std::size_t>(n.lhs)] * vals[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::Div:
        vals[i] = vals[static_cast<std::size_t>(n.lhs)] / vals[static_cast<std::size_t>(n.rhs)];
        break;
      case NodeKind::Pow:
        vals[i] = std::pow(vals[static_cast<std::size_t>(n.lhs)],
                           vals[static_cast<std::size_t>(n.rhs)]);
        break;
      case NodeKind::Call:
        vals[i] = apply(n.func, vals[static_cast<std::size_t>(n.lhs)]);
        break;
    }
  }
  return vals[static_cast<std::size_t>(root_)];
}

double Ast::eval(std::span<const double> state,
                 const std::map<std::string, double>& params) const {
  std::vector<double> vals(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto it = params.find(params_[i]);
    if (it == params.end()) throw MissingParameter(params_[i]);
    vals[i] = it->second;
  }
  return eval(state, vals);
}

std::string Ast::str() const {
  std::vector<std::string> out(nodes_.size());
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    auto l = [&] { return out[static_cast<std::size_t>(n.lhs)]; };
    auto r = [&] { return out[static_cast<std::size_t>(n.rhs)]; };
    switch (n.kind) {
      case NodeKind::Constant: out[i] = fmt(n.value); break;
      case NodeKind::StateVar: out[i] = "x" + std::to_string(n.index + 1); break;
      case NodeKind::Param:    out[i] = params_[static_cast<std::size_t>(n.index)]; break;
      case NodeKind::Neg:      out[i] = "(-" + l() + ")"; break;
      case NodeKind::Add:      out[i] = "(" + l() + "+" + r() + ")"; break;
      case NodeKind::Sub:      out[i] = "(" + l() + "-" + r() + ")"; break;
      case NodeKind::Mul:      out[i] = "(" + l() + "*" + r() + ")"; break;
      case NodeKind::Div:      out[i] = "(" + l() + "/" + r() + ")"; break;
      case NodeKind::Pow:      out[i] = "(" + l() + "^" + r() + ")"; break;
      case NodeKind::Call:
        out[i] = std::string(func_name(n.func)) + "(" + l() + ")";
        break;
    }
  }
  return out[static_cast<std::size_t>(root_)];
}

bool Ast::structurally_equal(const Ast& other) const {
  if (dim_ != other.dim_) return false;
  // compare trees node-by-node from the roots; arena order may differ
  auto eq = [&](auto&& self, int a, int b) -> bool {
    if (a < 0 || b < 0) return a == b;
    const Node& na = nodes_[static_cast<std::size_t>(a)];
    const Node& nb = other.nodes_[static_cast<std::size_t>(b)];
    if (na.kind != nb.kind) return false;
    switch (na.kind) {
      case NodeKind::Constant: return na.value == nb.value;
      case NodeKind::StateVar: return na.index == nb.index;
      case NodeKind::Param:
        return params_[static_cast<std::size_t>(na.index)] ==
               other.params_[static_cast<std::size_t>(nb.index)];
      case NodeKind::Call:
        if (na.func != nb.func) return false;
        return self(self, na.lhs, nb.lhs);
      case NodeKind::Neg:
        return self(self, na.lhs, nb.lhs);
      default:
        return self(self, na.lhs, nb.lhs) && self(self, na.rhs, nb.rhs);
    }
  };
  return eq(eq, root_, other.root_);
}

}  // namespace hopfmean::expr
