#include "feketelab/mapexpr.hpp"

#include <cctype>
#include <utility>

namespace feketelab {

namespace {

using Node = std::shared_ptr<MapExpression>;
using PolyG = std::vector<GaussQ>;  // ascending powers of z

Node make_const(GaussQ v) {
  auto n = std::make_shared<MapExpression>();
  n->kind = MapExpression::Kind::Const;
  n->constant = std::move(v);
  return n;
}

// ---- tokenizer ----

struct Token {
  enum class Type { Number, I, Z, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type;
  mpq_class number;       // Type::Number
  bool imaginary = false; // "0.4i": number immediately followed by i
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    cur_.pos = i_;
    if (i_ >= s_.size()) {
      cur_.type = Token::Type::End;
      return;
    }
    char c = s_[i_];
    switch (c) {
      case '+': cur_.type = Token::Type::Plus; ++i_; return;
      case '-': cur_.type = Token::Type::Minus; ++i_; return;
      case '*': cur_.type = Token::Type::Star; ++i_; return;
      case '/': cur_.type = Token::Type::Slash; ++i_; return;
      case '^': cur_.type = Token::Type::Caret; ++i_; return;
      case '(': cur_.type = Token::Type::LParen; ++i_; return;
      case ')': cur_.type = Token::Type::RParen; ++i_; return;
      default: break;
    }
    if (c == 'i' || c == 'I') {
      cur_.type = Token::Type::I;
      ++i_;
      return;
    }
    if (c == 'z' || c == 'Z') {
      cur_.type = Token::Type::Z;
      ++i_;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      cur_.type = Token::Type::Number;
      cur_.number = scan_number();
      cur_.imaginary = false;
      if (i_ < s_.size() && (s_[i_] == 'i' || s_[i_] == 'I')) {
        cur_.imaginary = true;
        ++i_;
      }
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  // Decimal literal with optional fraction and exponent, converted exactly:
  // "12.34e-2" -> 1234/100 * 10^-2.
  mpq_class scan_number() {
    std::string digits;
    long frac = 0;
    bool any = false;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      digits += s_[i_++];
      any = true;
    }
    if (i_ < s_.size() && s_[i_] == '.') {
      ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        digits += s_[i_++];
        ++frac;
        any = true;
      }
    }
    if (!any) throw ParseError("malformed number", i_);
    long exp10 = 0;
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t save = i_;
      ++i_;
      bool neg = false;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) neg = (s_[i_++] == '-');
      std::string ed;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ed += s_[i_++];
      if (ed.empty()) {
        i_ = save;  // not an exponent; leave 'e' for the caller to reject
      } else {
        exp10 = std::stol(ed);
        if (neg) exp10 = -exp10;
      }
    }
    mpz_class num(digits.empty() ? std::string("0") : digits, 10);
    mpz_class den = 1;
    long down = frac - exp10;
    mpz_class ten = 10;
    if (down > 0)
      mpz_pow_ui(den.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(down));
    else if (down < 0) {
      mpz_class up;
      mpz_pow_ui(up.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(-down));
      num *= up;
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token cur_;
};

// ---- parser with constant folding ----

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  Node parse() {
    Node e = expr();
    if (lex_.peek().type != Token::Type::End)
      throw ParseError("trailing input", lex_.peek().pos);
    return e;
  }

 private:
  static bool is_const(const Node& n) { return n->kind == MapExpression::Kind::Const; }

  Node binary(MapExpression::Kind kind, Node a, Node b, std::size_t pos) {
    if (is_const(a) && is_const(b)) {
      switch (kind) {
        case MapExpression::Kind::Add: return make_const(a->constant + b->constant);
        case MapExpression::Kind::Sub: return make_const(a->constant - b->constant);
        case MapExpression::Kind::Mul: return make_const(a->constant * b->constant);
        case MapExpression::Kind::Div:
          if (b->constant.is_zero()) throw ParseError("division by zero", pos);
          return make_const(a->constant / b->constant);
        default: break;
      }
    }
    auto n = std::make_shared<MapExpression>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  Node expr() {
    Node a = term();
    while (true) {
      auto t = lex_.peek().type;
      if (t == Token::Type::Plus || t == Token::Type::Minus) {
        std::size_t pos = lex_.take().pos;
        Node b = term();
        a = binary(t == Token::Type::Plus ? MapExpression::Kind::Add : MapExpression::Kind::Sub,
                   std::move(a), std::move(b), pos);
      } else {
        return a;
      }
    }
  }

  Node term() {
    Node a = unary();
    while (true) {
      auto t = lex_.peek().type;
      if (t == Token::Type::Star || t == Token::Type::Slash) {
        std::size_t pos = lex_.take().pos;
        Node b = unary();
        a = binary(t == Token::Type::Star ? MapExpression::Kind::Mul : MapExpression::Kind::Div,
                   std::move(a), std::move(b), pos);
      } else {
        return a;
      }
    }
  }

  Node unary() {
    if (lex_.peek().type == Token::Type::Minus) {
      lex_.take();
      Node a = unary();
      if (is_const(a)) return make_const(-a->constant);
      auto n = std::make_shared<MapExpression>();
      n->kind = MapExpression::Kind::Neg;
      n->lhs = std::move(a);
      return n;
    }
    return power();
  }

  Node power() {
    Node base = atom();
    if (lex_.peek().type != Token::Type::Caret) return base;
    std::size_t pos = lex_.take().pos;
    // integer exponents only; a chain a^b^c folds right over the integers
    std::vector<long> chain = {exponent_literal()};
    while (lex_.peek().type == Token::Type::Caret) {
      lex_.take();
      chain.push_back(exponent_literal());
    }
    long e = chain.back();
    for (std::size_t i = chain.size() - 1; i-- > 0;) {
      if (e < 0 || e > 64 || chain[i] > 64)
        throw ParseError("exponent tower out of range", pos);
      long folded = 1;
      for (long j = 0; j < e; ++j) {
        folded *= chain[i];
        if (std::abs(folded) > (1L << 20)) throw ParseError("exponent tower out of range", pos);
      }
      e = folded;
    }
    if (e < -64 || e > 64) throw ParseError("exponent out of range (|e| <= 64)", pos);
    if (is_const(base)) {
      GaussQ v(mpq_class(1));
      GaussQ b = base->constant;
      long a = e < 0 ? -e : e;
      for (long j = 0; j < a; ++j) v = v * b;
      if (e < 0) {
        if (v.is_zero()) throw ParseError("zero to a negative power", pos);
        v = GaussQ(mpq_class(1)) / v;
      }
      return make_const(v);
    }
    auto n = std::make_shared<MapExpression>();
    n->kind = MapExpression::Kind::Pow;
    n->lhs = std::move(base);
    n->exponent = e;
    return n;
  }

  long exponent_literal() {
    bool neg = false;
    if (lex_.peek().type == Token::Type::Minus) {
      lex_.take();
      neg = true;
    }
    Token t = lex_.peek();
    if (t.type != Token::Type::Number || t.imaginary || t.number.get_den() != 1)
      throw ParseError("integer exponent expected", t.pos);
    lex_.take();
    long e = static_cast<long>(t.number.get_num().get_si());
    return neg ? -e : e;
  }

  Node atom() {
    Token t = lex_.peek();
    switch (t.type) {
      case Token::Type::Number:
        lex_.take();
        if (t.imaginary) return make_const(GaussQ(mpq_class(0), t.number));
        return make_const(GaussQ(t.number));
      case Token::Type::I:
        lex_.take();
        return make_const(GaussQ(mpq_class(0), mpq_class(1)));
      case Token::Type::Z: {
        lex_.take();
        auto n = std::make_shared<MapExpression>();
        n->kind = MapExpression::Kind::Var;
        return n;
      }
      case Token::Type::LParen: {
        lex_.take();
        Node e = expr();
        if (lex_.peek().type != Token::Type::RParen)
          throw ParseError("expected ')'", lex_.peek().pos);
        lex_.take();
        return e;
      }
      default:
        throw ParseError("expected a value", t.pos);
    }
  }

  Lexer lex_;
};

// ---- rational-function arithmetic over Q(i) ----

void strip(PolyG& p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
  if (p.empty()) p.push_back(GaussQ());
}

PolyG poly_mul(const PolyG& a, const PolyG& b) {
  PolyG r(a.size() + b.size() - 1, GaussQ());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  strip(r);
  return r;
}

PolyG poly_add(PolyG a, const PolyG& b) {
  if (b.size() > a.size()) a.resize(b.size(), GaussQ());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  strip(a);
  return a;
}

PolyG poly_neg(PolyG a) {
  for (auto& c : a) c = -c;
  return a;
}

bool poly_zero(const PolyG& p) { return p.size() == 1 && p[0].is_zero(); }

PolyG poly_mod(PolyG a, const PolyG& b) {
  while (!poly_zero(a) && a.size() >= b.size()) {
    GaussQ f = a.back() / b.back();
    std::size_t off = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[off + i] = a[off + i] - f * b[i];
    a.pop_back();
    strip(a);  // re-establishes the canonical zero when everything cancels
  }
  return a;
}

PolyG poly_divexact(PolyG a, const PolyG& b) {
  PolyG q(a.size() >= b.size() ? a.size() - b.size() + 1 : 1, GaussQ());
  while (!poly_zero(a) && a.size() >= b.size()) {
    GaussQ f = a.back() / b.back();
    q[a.size() - b.size()] = f;
    std::size_t off = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[off + i] = a[off + i] - f * b[i];
    a.pop_back();
    strip(a);
  }
  strip(q);
  return q;
}

PolyG poly_monic(PolyG a) {
  if (poly_zero(a)) return a;
  GaussQ lead = a.back();
  for (auto& c : a) c = c / lead;
  return a;
}

PolyG poly_gcd(PolyG a, PolyG b) {
  strip(a);
  strip(b);
  while (!poly_zero(b)) {
    PolyG r = poly_mod(a, b);
    a = std::move(b);
    b = poly_monic(std::move(r));
  }
  return poly_monic(std::move(a));
}

struct RatF {
  PolyG num, den;
};

constexpr std::size_t kInterDegreeCap = 256;

RatF check_size(RatF f) {
  if (f.num.size() > kInterDegreeCap || f.den.size() > kInterDegreeCap)
    throw ParseError("intermediate degree exceeds cap", 0);
  return f;
}

RatF eval_tree(const MapExpression& e) {
  switch (e.kind) {
    case MapExpression::Kind::Const:
      return {{e.constant}, {GaussQ(mpq_class(1))}};
    case MapExpression::Kind::Var:
      return {{GaussQ(), GaussQ(mpq_class(1))}, {GaussQ(mpq_class(1))}};
    case MapExpression::Kind::Neg: {
      RatF a = eval_tree(*e.lhs);
      return {poly_neg(a.num), a.den};
    }
    case MapExpression::Kind::Add:
    case MapExpression::Kind::Sub: {
      RatF a = eval_tree(*e.lhs), b = eval_tree(*e.rhs);
      PolyG bn = (e.kind == MapExpression::Kind::Sub) ? poly_neg(b.num) : b.num;
      return check_size(
          {poly_add(poly_mul(a.num, b.den), poly_mul(bn, a.den)), poly_mul(a.den, b.den)});
    }
    case MapExpression::Kind::Mul: {
      RatF a = eval_tree(*e.lhs), b = eval_tree(*e.rhs);
      return check_size({poly_mul(a.num, b.num), poly_mul(a.den, b.den)});
    }
    case MapExpression::Kind::Div: {
      RatF a = eval_tree(*e.lhs), b = eval_tree(*e.rhs);
      if (poly_zero(b.num)) throw ParseError("division by the zero function", 0);
      return check_size({poly_mul(a.num, b.den), poly_mul(a.den, b.num)});
    }
    case MapExpression::Kind::Pow: {
      RatF a = eval_tree(*e.lhs);
      long n = e.exponent;
      if (n < 0) {
        if (poly_zero(a.num)) throw ParseError("zero to a negative power", 0);
        std::swap(a.num, a.den);
        n = -n;
      }
      RatF r = {{GaussQ(mpq_class(1))}, {GaussQ(mpq_class(1))}};
      for (long j = 0; j < n; ++j)
        r = check_size({poly_mul(r.num, a.num), poly_mul(r.den, a.den)});
      return r;
    }
  }
  throw std::logic_error("eval_tree: unhandled node");
}

std::string format_q(const mpq_class& q) { return mpq_to_string(q); }

// A printed constant re-parses (with folding) to the identical node exactly
// when any operator-bearing form is parenthesized, so only bare nonnegative
// literals and "i" stay unwrapped.
std::string format_const(const GaussQ& v) {
  std::string s;
  if (v.im == 0) {
    s = format_q(v.re);
  } else if (v.re == 0) {
    if (v.im == 1)
      s = "i";
    else if (v.im == -1)
      s = "-i";
    else
      s = format_q(v.im) + "*i";
  } else {
    if (v.im == 1)
      s = format_q(v.re) + "+i";
    else if (v.im == -1)
      s = format_q(v.re) + "-i";
    else if (v.im > 0)
      s = format_q(v.re) + "+" + format_q(v.im) + "*i";
    else
      s = format_q(v.re) + format_q(v.im) + "*i";
  }
  bool bare = (s == "i") && true;
  if (!bare) {
    bare = !s.empty();
    for (char c : s)
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) {
        bare = false;
        break;
      }
  }
  return bare ? s : "(" + s + ")";
}

int precedence(MapExpression::Kind k) {
  switch (k) {
    case MapExpression::Kind::Add:
    case MapExpression::Kind::Sub: return 1;
    case MapExpression::Kind::Mul:
    case MapExpression::Kind::Div: return 2;
    case MapExpression::Kind::Neg: return 3;
    case MapExpression::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string print_node(const MapExpression& e, int parent_prec) {
  int prec = precedence(e.kind);
  std::string s;
  switch (e.kind) {
    case MapExpression::Kind::Const: s = format_const(e.constant); break;
    case MapExpression::Kind::Var: s = "z"; break;
    case MapExpression::Kind::Neg: s = "-" + print_node(*e.lhs, prec); break;
    case MapExpression::Kind::Add:
      s = print_node(*e.lhs, prec) + "+" + print_node(*e.rhs, prec + 1);
      break;
    case MapExpression::Kind::Sub:
      s = print_node(*e.lhs, prec) + "-" + print_node(*e.rhs, prec + 1);
      break;
    case MapExpression::Kind::Mul:
      s = print_node(*e.lhs, prec) + "*" + print_node(*e.rhs, prec + 1);
      break;
    case MapExpression::Kind::Div:
      s = print_node(*e.lhs, prec) + "/" + print_node(*e.rhs, prec + 1);
      break;
    case MapExpression::Kind::Pow:
      s = print_node(*e.lhs, prec + 1) + "^" + std::to_string(e.exponent);
      break;
  }
  if (prec < parent_prec && e.kind != MapExpression::Kind::Const &&
      e.kind != MapExpression::Kind::Var)
    return "(" + s + ")";
  return s;
}

}  // namespace

std::string MapExpression::pretty_print() const { return print_node(*this, 0); }

bool MapExpression::same_tree(const MapExpression& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Const: return constant == o.constant;
    case Kind::Var: return true;
    case Kind::Neg: return lhs->same_tree(*o.lhs);
    case Kind::Pow: return exponent == o.exponent && lhs->same_tree(*o.lhs);
    default: return lhs->same_tree(*o.lhs) && rhs->same_tree(*o.rhs);
  }
}

std::shared_ptr<MapExpression> parse_map_expression(const std::string& text) {
  if (text.empty()) throw ParseError("empty expression", 0);
  return Parser(text).parse();
}

HomLift expression_to_lift(const MapExpression& expr) {
  RatF f = eval_tree(expr);
  PolyG g = poly_gcd(f.num, f.den);
  if (g.size() > 1) {
    f.num = poly_divexact(f.num, g);
    f.den = poly_divexact(f.den, g);
  }
  int dn = static_cast<int>(f.num.size()) - 1;
  int dd = static_cast<int>(f.den.size()) - 1;
  int d = std::max(dn, dd);
  if (d < 2) throw std::invalid_argument("map degree must be >= 2 after reduction");
  if (d > 24) throw std::invalid_argument("map degree exceeds 24");

  // homogenize: coefficient of z^i lands at descending-X index d - i
  ExactForm P(d + 1, GaussQ()), Q(d + 1, GaussQ());
  for (int i = 0; i <= dn; ++i) P[d - i] = f.num[i];
  for (int i = 0; i <= dd; ++i) Q[d - i] = f.den[i];
  return HomLift(std::move(P), std::move(Q));
}

HomLift parse_map(const std::string& text) {
  return expression_to_lift(*parse_map_expression(text));
}

}  // namespace feketelab
