#include "qfrac/functions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace qfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

struct FunctionSpec::Node {
  Kind kind;
  double a = 0.0;
  double b = 0.0;
  std::vector<Knot> knots;
  std::vector<FunctionSpec> children;
};

namespace {

using Node = FunctionSpec::Node;
using Kind = FunctionSpec::Kind;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidParameter(std::string(what) + " must be finite");
  }
}

Monotonicity flip(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return Monotonicity::decreasing;
    case Monotonicity::decreasing: return Monotonicity::increasing;
    default: return m;
  }
}

Monotonicity classify_sequence(const std::vector<double>& values) {
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) up = false;
    if (values[i] > values[i - 1]) down = false;
  }
  if (up && down) return Monotonicity::constant;
  if (up) return Monotonicity::increasing;
  if (down) return Monotonicity::decreasing;
  return Monotonicity::none;
}

// 0 * inf is taken as 0: an exactly-zero factor annihilates an unbounded one.
double safe_mul(double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  return x * y;
}

Interval mul(Interval p, Interval r) {
  const double c[4] = {safe_mul(p.lo, r.lo), safe_mul(p.lo, r.hi),
                       safe_mul(p.hi, r.lo), safe_mul(p.hi, r.hi)};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

double eval_pwl(const std::vector<Knot>& knots, double t) {
  if (t <= knots.front().x) return knots.front().y;
  if (t >= knots.back().x) return knots.back().y;
  auto it = std::upper_bound(knots.begin(), knots.end(), t,
                             [](double v, const Knot& k) { return v < k.x; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  const double w = (t - lo.x) / (hi.x - lo.x);
  return lo.y + w * (hi.y - lo.y);
}

double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case Kind::constant: return n.a;
    case Kind::power: return n.a == 0.0 ? 1.0 : std::pow(t, n.a);
    case Kind::affine: return n.a * t + n.b;
    case Kind::piecewise_linear: return eval_pwl(n.knots, t);
    case Kind::product: return n.children[0].eval(t) * n.children[1].eval(t);
    case Kind::sum: return n.children[0].eval(t) + n.children[1].eval(t);
    case Kind::scale: return n.a * n.children[0].eval(t);
  }
  return 0.0;
}

// Sample points of a piecewise-linear function on [lo, hi] that attain its
// extrema: the endpoints and every knot strictly inside.
std::vector<double> pwl_points(const std::vector<Knot>& knots, double lo,
                               double hi) {
  std::vector<double> pts{lo};
  for (const Knot& k : knots) {
    if (k.x > lo && k.x < hi) pts.push_back(k.x);
  }
  if (std::isfinite(hi)) {
    pts.push_back(hi);
  } else if (knots.back().x > lo) {
    pts.push_back(knots.back().x);
  }
  return pts;
}

Interval enclose_node(const Node& n, double lo, double hi) {
  switch (n.kind) {
    case Kind::constant: return {n.a, n.a};
    case Kind::power:
      if (n.a == 0.0) return {1.0, 1.0};
      return {std::pow(lo, n.a), std::isfinite(hi) ? std::pow(hi, n.a) : kInf};
    case Kind::affine: {
      if (n.a == 0.0) return {n.b, n.b};
      const double at_lo = n.a * lo + n.b;
      if (!std::isfinite(hi)) {
        return n.a > 0.0 ? Interval{at_lo, kInf} : Interval{-kInf, at_lo};
      }
      const double at_hi = n.a * hi + n.b;
      return {std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
    }
    case Kind::piecewise_linear: {
      Interval out{kInf, -kInf};
      for (double x : pwl_points(n.knots, lo, hi)) {
        const double v = eval_pwl(n.knots, x);
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
      }
      return out;
    }
    case Kind::product:
      return mul(n.children[0].enclose(lo, hi), n.children[1].enclose(lo, hi));
    case Kind::sum: {
      const Interval p = n.children[0].enclose(lo, hi);
      const Interval r = n.children[1].enclose(lo, hi);
      return {p.lo + r.lo, p.hi + r.hi};
    }
    case Kind::scale: {
      const Interval p = n.children[0].enclose(lo, hi);
      return mul({n.a, n.a}, p);
    }
  }
  return {-kInf, kInf};
}

int sign_of(Interval iv) {
  if (iv.lo >= 0.0) return 1;
  if (iv.hi <= 0.0) return -1;
  return 0;
}

Monotonicity monotone_node(const Node& n, double T) {
  switch (n.kind) {
    case Kind::constant: return Monotonicity::constant;
    case Kind::power:
      return n.a == 0.0 ? Monotonicity::constant : Monotonicity::increasing;
    case Kind::affine:
      if (n.a > 0.0) return Monotonicity::increasing;
      if (n.a < 0.0) return Monotonicity::decreasing;
      return Monotonicity::constant;
    case Kind::piecewise_linear: {
      std::vector<double> values;
      for (double x : pwl_points(n.knots, 0.0, T)) values.push_back(eval_pwl(n.knots, x));
      return classify_sequence(values);
    }
    case Kind::scale: {
      const Monotonicity m = n.children[0].monotonicity_on(T);
      if (n.a > 0.0) return m;
      if (n.a < 0.0) return flip(m);
      return Monotonicity::constant;
    }
    case Kind::sum: {
      const Monotonicity m1 = n.children[0].monotonicity_on(T);
      const Monotonicity m2 = n.children[1].monotonicity_on(T);
      if (m1 == Monotonicity::constant) return m2;
      if (m2 == Monotonicity::constant) return m1;
      return m1 == m2 ? m1 : Monotonicity::none;
    }
    case Kind::product: {
      const FunctionSpec& f = n.children[0];
      const FunctionSpec& g = n.children[1];
      const Monotonicity m1 = f.monotonicity_on(T);
      const Monotonicity m2 = g.monotonicity_on(T);
      const Interval i1 = f.enclose(0.0, T);
      const Interval i2 = g.enclose(0.0, T);
      auto scaled = [](Interval c, Monotonicity m) {
        const int s = sign_of(c);
        if (c.lo == 0.0 && c.hi == 0.0) return Monotonicity::constant;
        if (s > 0) return m;
        if (s < 0) return flip(m);
        return Monotonicity::none;
      };
      if (m1 == Monotonicity::constant) return scaled(i1, m2);
      if (m2 == Monotonicity::constant) return scaled(i2, m1);
      if (m1 == Monotonicity::none || m2 == Monotonicity::none) return Monotonicity::none;
      const int s1 = sign_of(i1);
      const int s2 = sign_of(i2);
      if (s1 == 0 || s2 == 0) return Monotonicity::none;
      // Reduce to a product of nonnegative factors.
      const Monotonicity n1 = s1 > 0 ? m1 : flip(m1);
      const Monotonicity n2 = s2 > 0 ? m2 : flip(m2);
      if (n1 != n2) return Monotonicity::none;
      return s1 * s2 > 0 ? n1 : flip(n1);
    }
  }
  return Monotonicity::none;
}

double c_lambda_node(const Node& n) {
  switch (n.kind) {
    case Kind::constant: return n.a != 0.0 ? 0.0 : kInf;
    case Kind::power: return n.a;
    case Kind::affine:
      if (n.b != 0.0) return 0.0;
      return n.a != 0.0 ? 1.0 : kInf;
    case Kind::piecewise_linear: {
      if (eval_pwl(n.knots, 0.0) != 0.0) return 0.0;
      // Zero at the origin: linear vanishing unless the first piece is flat.
      const double probe = n.knots.front().x > 0.0
                               ? n.knots.front().x * 0.5
                               : (n.knots.size() > 1 ? n.knots[1].x * 0.5 : 1.0);
      return eval_pwl(n.knots, probe) != 0.0 ? 1.0 : kInf;
    }
    case Kind::product:
      return n.children[0].metadata().c_lambda_exponent +
             n.children[1].metadata().c_lambda_exponent;
    case Kind::sum:
      return std::min(n.children[0].metadata().c_lambda_exponent,
                      n.children[1].metadata().c_lambda_exponent);
    case Kind::scale:
      return n.a != 0.0 ? n.children[0].metadata().c_lambda_exponent : kInf;
  }
  return 0.0;
}

void write_sexpr(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::constant:
      out += "(const " + format_number(n.a) + ")";
      return;
    case Kind::power:
      out += "(power " + format_number(n.a) + ")";
      return;
    case Kind::affine:
      out += "(affine " + format_number(n.a) + " " + format_number(n.b) + ")";
      return;
    case Kind::piecewise_linear:
      out += "(piecewise_linear";
      for (const Knot& k : n.knots) {
        out += " (" + format_number(k.x) + " " + format_number(k.y) + ")";
      }
      out += ")";
      return;
    case Kind::product:
    case Kind::sum:
      out += n.kind == Kind::product ? "(product " : "(sum ";
      out += n.children[0].to_string();
      out += " ";
      out += n.children[1].to_string();
      out += ")";
      return;
    case Kind::scale:
      out += "(scale " + format_number(n.a) + " " + n.children[0].to_string() + ")";
      return;
  }
}

// Recursive-descent parser over the s-expression text.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FunctionSpec parse_all() {
    FunctionSpec out = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    std::ostringstream os;
    os << "malformed function spec at offset " << pos_ << ": " << why;
    throw ParseError(os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::string_view atom() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           text_[pos_] != ' ' && text_[pos_] != '\t' && text_[pos_] != '\n' &&
           text_[pos_] != '\r') {
      ++pos_;
    }
    if (start == pos_) fail("expected atom");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    const std::string_view tok = atom();
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      fail("invalid number '" + std::string(tok) + "'");
    }
    return v;
  }

  FunctionSpec parse_expr() {
    expect('(');
    const std::string head(atom());
    try {
      FunctionSpec out = parse_body(head);
      expect(')');
      return out;
    } catch (const InvalidParameter& e) {
      fail(e.what());
    }
  }

  FunctionSpec parse_body(const std::string& head) {
    if (head == "const") return FunctionSpec::constant(number());
    if (head == "power") return FunctionSpec::power(number());
    if (head == "affine") {
      const double a = number();
      const double b = number();
      return FunctionSpec::affine(a, b);
    }
    if (head == "piecewise_linear") {
      std::vector<Knot> knots;
      while (peek('(')) {
        expect('(');
        const double x = number();
        const double y = number();
        expect(')');
        knots.push_back({x, y});
      }
      return FunctionSpec::piecewise_linear(std::move(knots));
    }
    if (head == "product" || head == "sum") {
      FunctionSpec a = parse_expr();
      FunctionSpec b = parse_expr();
      return head == "product" ? FunctionSpec::product(a, b) : FunctionSpec::sum(a, b);
    }
    if (head == "scale") {
      const double c = number();
      return FunctionSpec::scale(c, parse_expr());
    }
    fail("unknown head '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::constant: return "constant";
    case Monotonicity::none: return "none";
  }
  return "none";
}

std::string_view to_string(SyncClass c) {
  switch (c) {
    case SyncClass::synchronous: return "synchronous";
    case SyncClass::asynchronous: return "asynchronous";
    case SyncClass::neither: return "neither";
  }
  return "neither";
}

FunctionSpec::FunctionSpec(std::shared_ptr<const Node> node, double domain)
    : node_(std::move(node)) {
  meta_.domain_hint = domain;
  meta_.monotonicity = monotone_node(*node_, domain);
  meta_.c_lambda_exponent = c_lambda_node(*node_);
}

FunctionSpec FunctionSpec::constant(double c) {
  require_finite(c, "const value");
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->a = c;
  return FunctionSpec(std::move(n), kInf);
}

FunctionSpec FunctionSpec::power(double p) {
  require_finite(p, "power exponent");
  if (p < 0.0) throw InvalidParameter("power exponent must be >= 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::power;
  n->a = p;
  return FunctionSpec(std::move(n), kInf);
}

FunctionSpec FunctionSpec::affine(double slope, double intercept) {
  require_finite(slope, "affine slope");
  require_finite(intercept, "affine intercept");
  auto n = std::make_shared<Node>();
  n->kind = Kind::affine;
  n->a = slope;
  n->b = intercept;
  return FunctionSpec(std::move(n), kInf);
}

FunctionSpec FunctionSpec::piecewise_linear(std::vector<Knot> knots) {
  if (knots.empty()) throw InvalidParameter("piecewise_linear needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i].x, "knot abscissa");
    require_finite(knots[i].y, "knot value");
    if (knots[i].x < 0.0) throw InvalidParameter("knot abscissae must be >= 0");
    if (i > 0 && !(knots[i].x > knots[i - 1].x)) {
      throw InvalidParameter("knot abscissae must be strictly increasing");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::piecewise_linear;
  n->knots = std::move(knots);
  return FunctionSpec(std::move(n), kInf);
}

FunctionSpec FunctionSpec::product(const FunctionSpec& a, const FunctionSpec& b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->children = {a, b};
  return FunctionSpec(std::move(n), std::min(a.meta_.domain_hint, b.meta_.domain_hint));
}

FunctionSpec FunctionSpec::sum(const FunctionSpec& a, const FunctionSpec& b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->children = {a, b};
  return FunctionSpec(std::move(n), std::min(a.meta_.domain_hint, b.meta_.domain_hint));
}

FunctionSpec FunctionSpec::scale(double c, const FunctionSpec& e) {
  require_finite(c, "scale factor");
  auto n = std::make_shared<Node>();
  n->kind = Kind::scale;
  n->a = c;
  n->children = {e};
  return FunctionSpec(std::move(n), e.meta_.domain_hint);
}

FunctionSpec FunctionSpec::parse(std::string_view text) {
  return Parser(text).parse_all();
}

std::string FunctionSpec::to_string() const {
  std::string out;
  write_sexpr(*node_, out);
  return out;
}

double FunctionSpec::eval(double t) const {
  if (!(t >= 0.0)) {
    throw DomainError("function evaluated at t < 0 (t=" + format_number(t) + ")");
  }
  return eval_node(*node_, t);
}

FunctionSpec::Kind FunctionSpec::kind() const noexcept { return node_->kind; }

FunctionSpec FunctionSpec::with_domain(double T) const {
  if (!(T > 0.0)) throw InvalidParameter("domain end T must be positive");
  return FunctionSpec(node_, T);
}

Interval FunctionSpec::enclose(double lo, double hi) const {
  return enclose_node(*node_, lo, hi);
}

Monotonicity FunctionSpec::monotonicity_on(double T) const {
  return monotone_node(*node_, T);
}

double FunctionSpec::param_a() const noexcept { return node_->a; }
double FunctionSpec::param_b() const noexcept { return node_->b; }
std::span<const Knot> FunctionSpec::knots() const noexcept { return node_->knots; }
const FunctionSpec& FunctionSpec::left() const noexcept { return node_->children.front(); }
const FunctionSpec& FunctionSpec::right() const noexcept { return node_->children.back(); }

bool check_c_lambda(const FunctionSpec& spec) {
  const double p = spec.metadata().c_lambda_exponent;
  double first = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double t = std::ldexp(1.0, -k);
    const double f = spec.eval(t);
    if (!std::isfinite(p)) {
      if (f != 0.0) return false;
      continue;
    }
    const double scaled = std::abs(f) * std::pow(t, -p);
    if (k == 1) first = std::max(scaled, 1.0);
    if (!(scaled <= 1e6 * first)) return false;
  }
  return true;
}

SyncResult check_synchronous(const FunctionSpec& f, const FunctionSpec& g,
                             std::span<const double> grid) {
  if (grid.empty()) throw InvalidParameter("synchronicity grid must be nonempty");
  const double top = *std::max_element(grid.begin(), grid.end());
  const Monotonicity mf = f.monotonicity_on(top);
  const Monotonicity mg = g.monotonicity_on(top);
  SyncResult out;
  if (mf != Monotonicity::none && mg != Monotonicity::none) {
    out.certified = true;
    if (mf == Monotonicity::constant || mg == Monotonicity::constant || mf == mg) {
      out.classification = SyncClass::synchronous;
    } else {
      out.classification = SyncClass::asynchronous;
    }
    return out;
  }

  std::vector<double> fv(grid.size());
  std::vector<double> gv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fv[i] = f.eval(grid[i]);
    gv[i] = g.eval(grid[i]);
  }
  bool sync = true;
  bool async = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double prod = (fv[i] - fv[j]) * (gv[i] - gv[j]);
      if (prod < -kSyncTolerance) {
        sync = false;
        if (prod < worst) {
          worst = prod;
          out.witness = std::make_pair(grid[i], grid[j]);
        }
      }
      if (prod > kSyncTolerance) async = false;
    }
  }
  if (sync) {
    out.classification = SyncClass::synchronous;
    out.witness.reset();
  } else if (async) {
    out.classification = SyncClass::asynchronous;
    out.witness.reset();
  } else {
    out.classification = SyncClass::neither;
  }
  return out;
}

Bounds extract_bounds(const FunctionSpec& spec, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("bounds need finite T > 0");
  const Monotonicity m = spec.monotonicity_on(T);
  const double at0 = spec.eval(0.0);
  const double atT = spec.eval(T);
  switch (m) {
    case Monotonicity::increasing: return {at0, atT, true};
    case Monotonicity::decreasing: return {atT, at0, true};
    case Monotonicity::constant: return {at0, at0, true};
    case Monotonicity::none: break;
  }
  if (spec.kind() == FunctionSpec::Kind::piecewise_linear) {
    const Interval iv = spec.enclose(0.0, T);
    return {iv.lo, iv.hi, true};
  }
  Bounds out{kInf, -kInf, false, kBoundsGridPoints};
  for (int i = 0; i < kBoundsGridPoints; ++i) {
    const double x = T * static_cast<double>(i) / (kBoundsGridPoints - 1);
    const double v = spec.eval(x);
    out.lower = std::min(out.lower, v);
    out.upper = std::max(out.upper, v);
  }
  return out;
}

double extract_lipschitz(const FunctionSpec& spec, double T) {
  if (!(T > 0.0)) throw InvalidParameter("Lipschitz extraction needs T > 0");
  switch (spec.kind()) {
    case Kind::constant: return 0.0;
    case Kind::power: {
      const double p = spec.param_a();
      if (p == 0.0) return 0.0;
      if (p < 1.0) {
        throw NotLipschitz("power(" + format_number(p) +
                           ") has an unbounded difference quotient at 0");
      }
      if (p == 1.0) return 1.0;
      if (!std::isfinite(T)) throw NotLipschitz("power(p > 1) on an unbounded domain");
      return p * std::pow(T, p - 1.0);
    }
    case Kind::affine: return std::abs(spec.param_a());
    case Kind::piecewise_linear: {
      double L = 0.0;
      const auto k = spec.knots();
      for (std::size_t i = 1; i < k.size(); ++i) {
        L = std::max(L, std::abs((k[i].y - k[i - 1].y) / (k[i].x - k[i - 1].x)));
      }
      return L;
    }
    case Kind::sum:
      return extract_lipschitz(spec.left(), T) + extract_lipschitz(spec.right(), T);
    case Kind::scale:
      return std::abs(spec.param_a()) * extract_lipschitz(spec.left(), T);
    case Kind::product: {
      const FunctionSpec& f = spec.left();
      const FunctionSpec& g = spec.right();
      const Interval fi = f.enclose(0.0, T);
      const Interval gi = g.enclose(0.0, T);
      const double sup_f = std::max(std::abs(fi.lo), std::abs(fi.hi));
      const double sup_g = std::max(std::abs(gi.lo), std::abs(gi.hi));
      const double Lf = extract_lipschitz(f, T);
      const double Lg = extract_lipschitz(g, T);
      if (!std::isfinite(sup_f) || !std::isfinite(sup_g)) {
        if ((Lf == 0.0 || sup_g == 0.0) && (Lg == 0.0 || sup_f == 0.0)) return 0.0;
        throw NotLipschitz("product of unbounded factors on an unbounded domain");
      }
      return safe_mul(Lf, sup_g) + safe_mul(Lg, sup_f);
    }
  }
  return 0.0;
}

}  // namespace qfrac
