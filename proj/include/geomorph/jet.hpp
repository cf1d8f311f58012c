#pragma once

// Dense truncated multivariate Taylor arithmetic ("jets").
//
// A Jet stores the Taylor coefficients c_alpha = d^alpha f / alpha! of a
// scalar function at a point, for every multi-index alpha with
// |alpha| <= order. Arithmetic on jets propagates derivatives exactly
// (up to roundoff), so every derivative the library consumes comes from
// jet arithmetic rather than finite differences; finite differences are
// reserved for cross checks and for scalars that are extracted pointwise.
//
// Multi-indices are enumerated in graded lexicographic order, so the
// enumeration for a lower order is a prefix of the enumeration for a
// higher one; truncation and differentiation rely on that.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "geomorph/errors.hpp"

namespace geomorph {

inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetOrder = 3;

namespace detail {

using Exponents = std::array<std::uint8_t, kMaxJetDim>;

struct MulTriple {
  std::uint16_t lhs, rhs, out;
};

// Precomputed combinatorics for one (dim, order) pair.
struct JetTable {
  int dim = 0;
  int order = 0;
  std::vector<Exponents> exps;        // multi-index per coefficient slot
  std::vector<int> degree;            // |alpha| per slot
  std::vector<double> factorial;      // alpha! per slot
  std::vector<int> count_by_order;    // slots with |alpha| <= k, k = 0..order
  std::vector<std::array<int, kMaxJetDim>> shift;  // slot of alpha + e_i, -1 if above order
  std::vector<MulTriple> mul;         // all (i, j, k) with exp_i + exp_j = exp_k
};

inline JetTable build_jet_table(int dim, int order) {
  JetTable t;
  t.dim = dim;
  t.order = order;
  std::map<Exponents, int> index_of;
  auto push = [&](const Exponents& e) {
    index_of[e] = static_cast<int>(t.exps.size());
    t.exps.push_back(e);
  };
  Exponents zero{};
  push(zero);
  for (int deg = 1; deg <= order; ++deg) {
    // Degree-d multi-indices as nondecreasing variable tuples, lex order.
    std::vector<int> vars(deg, 0);
    while (true) {
      Exponents e{};
      for (int v : vars) e[static_cast<std::size_t>(v)]++;
      push(e);
      int pos = deg - 1;
      while (pos >= 0 && vars[static_cast<std::size_t>(pos)] == dim - 1) --pos;
      if (pos < 0) break;
      int next = vars[static_cast<std::size_t>(pos)] + 1;
      for (int q = pos; q < deg; ++q) vars[static_cast<std::size_t>(q)] = next;
    }
  }
  const int n = static_cast<int>(t.exps.size());
  t.degree.resize(static_cast<std::size_t>(n));
  t.factorial.resize(static_cast<std::size_t>(n));
  t.count_by_order.assign(static_cast<std::size_t>(order) + 1, 0);
  t.shift.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    int deg = 0;
    double fact = 1.0;
    for (int v = 0; v < dim; ++v) {
      const int e = t.exps[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
      deg += e;
      for (int q = 2; q <= e; ++q) fact *= q;
    }
    t.degree[static_cast<std::size_t>(i)] = deg;
    t.factorial[static_cast<std::size_t>(i)] = fact;
    for (int k = deg; k <= order; ++k) t.count_by_order[static_cast<std::size_t>(k)]++;
    for (int v = 0; v < kMaxJetDim; ++v) t.shift[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] = -1;
    for (int v = 0; v < dim; ++v) {
      if (deg + 1 > order) continue;
      Exponents up = t.exps[static_cast<std::size_t>(i)];
      up[static_cast<std::size_t>(v)]++;
      t.shift[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] = index_of.at(up);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (t.degree[static_cast<std::size_t>(i)] + t.degree[static_cast<std::size_t>(j)] > order) continue;
      Exponents sum{};
      for (int v = 0; v < dim; ++v)
        sum[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
            t.exps[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] +
            t.exps[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]);
      t.mul.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                       static_cast<std::uint16_t>(index_of.at(sum))});
    }
  }
  return t;
}

inline const JetTable& jet_table(int dim, int order) {
  static const auto tables = [] {
    auto all = std::make_unique<std::array<std::array<JetTable, kMaxJetOrder + 1>, kMaxJetDim + 1>>();
    for (int d = 1; d <= kMaxJetDim; ++d)
      for (int o = 0; o <= kMaxJetOrder; ++o)
        (*all)[static_cast<std::size_t>(d)][static_cast<std::size_t>(o)] = build_jet_table(d, o);
    return all;
  }();
  return (*tables)[static_cast<std::size_t>(dim)][static_cast<std::size_t>(order)];
}

}  // namespace detail

class Jet {
 public:
  Jet() = default;

  static Jet constant(double v, int dim, int order) {
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
  }

  // Seed for the coordinate function x_var at value v.
  static Jet variable(double v, int var, int dim, int order) {
    Jet j(dim, order);
    j.c_[0] = v;
    if (var < 0 || var >= dim) throw ShapeError("jet variable index out of range");
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + var)] = 1.0;
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  bool valid() const { return dim_ > 0; }

  double value() const { return c_.empty() ? 0.0 : c_[0]; }

  // Derivative accessors (coefficients rescaled by alpha!).
  double partial(int i) const {
    require_order(1);
    check_var(i);
    return c_[static_cast<std::size_t>(1 + i)];
  }
  double partial(int i, int j) const {
    require_order(2);
    check_var(i);
    check_var(j);
    const auto& t = table();
    const int idx = t.shift[static_cast<std::size_t>(1 + i)][static_cast<std::size_t>(j)];
    return c_[static_cast<std::size_t>(idx)] * t.factorial[static_cast<std::size_t>(idx)];
  }
  double partial(int i, int j, int k) const {
    require_order(3);
    check_var(i);
    check_var(j);
    check_var(k);
    const auto& t = table();
    int idx = t.shift[static_cast<std::size_t>(1 + i)][static_cast<std::size_t>(j)];
    idx = t.shift[static_cast<std::size_t>(idx)][static_cast<std::size_t>(k)];
    return c_[static_cast<std::size_t>(idx)] * t.factorial[static_cast<std::size_t>(idx)];
  }

  std::size_t coefficient_count() const { return c_.size(); }
  double coefficient(std::size_t idx) const { return c_.at(idx); }

  // Jet of the partial derivative d/dx_i, one order lower.
  Jet derivative(int i) const {
    require_order(1);
    check_var(i);
    Jet out(dim_, order_ - 1);
    const auto& t = table();
    for (std::size_t s = 0; s < out.c_.size(); ++s) {
      const int up = t.shift[s][static_cast<std::size_t>(i)];
      out.c_[s] = c_[static_cast<std::size_t>(up)] *
                  (t.exps[s][static_cast<std::size_t>(i)] + 1);
    }
    return out;
  }

  // Same coefficients, truncated to a lower order.
  Jet truncated(int order) const {
    if (order > order_) throw ShapeError("jet truncation cannot raise order");
    Jet out(dim_, order);
    for (std::size_t s = 0; s < out.c_.size(); ++s) out.c_[s] = c_[s];
    return out;
  }

  Jet operator-() const {
    Jet out = *this;
    for (double& v : out.c_) v = -v;
    return out;
  }

  Jet& operator+=(const Jet& o) {
    match(o);
    for (std::size_t s = 0; s < c_.size(); ++s) c_[s] += o.c_[s];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    match(o);
    for (std::size_t s = 0; s < c_.size(); ++s) c_[s] -= o.c_[s];
    return *this;
  }
  Jet& operator+=(double v) {
    ensure_valid();
    c_[0] += v;
    return *this;
  }
  Jet& operator-=(double v) {
    ensure_valid();
    c_[0] -= v;
    return *this;
  }
  Jet& operator*=(double v) {
    ensure_valid();
    for (double& c : c_) c *= v;
    return *this;
  }
  Jet& operator/=(double v) {
    ensure_valid();
    for (double& c : c_) c /= v;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { return -b + a; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(Jet a, double b) { return a /= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.match(b);
    Jet out(a.dim_, a.order_);
    const auto& t = a.table();
    for (const auto& m : t.mul)
      out.c_[m.out] += a.c_[m.lhs] * b.c_[m.rhs];
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    a.match(b);
    const double v = b.value();
    if (v == 0.0) throw DomainError("jet division by zero value part");
    std::array<double, kMaxJetOrder + 1> d{};
    double pw = 1.0 / v;
    for (int k = 0; k <= b.order_; ++k) {
      d[static_cast<std::size_t>(k)] = (k % 2 == 0 ? pw : -pw);
      pw /= v;
    }
    return a * b.composed(d);
  }

  friend Jet operator/(double a, const Jet& b) {
    return Jet::constant(a, b.dim_, b.order_) / b;
  }

  // f(u) for a scalar function with Taylor coefficients d[k] = f^(k)(u0)/k!.
  Jet composed(const std::array<double, kMaxJetOrder + 1>& d) const {
    ensure_valid();
    Jet w = *this;
    w.c_[0] = 0.0;
    Jet acc = Jet::constant(d[static_cast<std::size_t>(order_)], dim_, order_);
    for (int k = order_ - 1; k >= 0; --k) {
      acc = acc * w;
      acc.c_[0] += d[static_cast<std::size_t>(k)];
    }
    return acc;
  }

 private:
  Jet(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1 || dim > kMaxJetDim) throw ConfigError("jet dimension must be in 1..8");
    if (order < 0 || order > kMaxJetOrder) throw ConfigError("jet order must be in 0..3");
    c_.assign(static_cast<std::size_t>(
                  detail::jet_table(dim, order).count_by_order[static_cast<std::size_t>(order)]),
              0.0);
  }

  const detail::JetTable& table() const { return detail::jet_table(dim_, order_); }

  void ensure_valid() const {
    if (dim_ == 0) throw ShapeError("operation on default-constructed jet");
  }
  void match(const Jet& o) const {
    ensure_valid();
    o.ensure_valid();
    if (dim_ != o.dim_ || order_ != o.order_)
      throw ShapeError("jet dimension/order mismatch in arithmetic");
  }
  void require_order(int k) const {
    ensure_valid();
    if (order_ < k) throw ShapeError("jet order too low for requested derivative");
  }
  void check_var(int i) const {
    if (i < 0 || i >= dim_) throw ShapeError("jet partial index out of range");
  }

  int dim_ = 0;
  int order_ = 0;
  std::vector<double> c_;

  friend Jet sqrt(const Jet&);
  friend Jet exp(const Jet&);
  friend Jet log(const Jet&);
  friend Jet sin(const Jet&);
  friend Jet cos(const Jet&);
  friend Jet pow(const Jet&, double);
};

inline Jet sqrt(const Jet& u) {
  const double v = u.value();
  if (v <= 0.0) throw DomainError("jet sqrt requires positive value part");
  const double s = std::sqrt(v);
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = s;
  if (u.order() >= 1) d[1] = 0.5 / s;
  if (u.order() >= 2) d[2] = -0.125 / (s * v);
  if (u.order() >= 3) d[3] = 0.0625 / (s * v * v);
  return u.composed(d);
}

inline Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  std::array<double, kMaxJetOrder + 1> d{};
  double f = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    if (k > 0) f *= k;
    d[static_cast<std::size_t>(k)] = e / f;
  }
  return u.composed(d);
}

inline Jet log(const Jet& u) {
  const double v = u.value();
  if (v <= 0.0) throw DomainError("jet log requires positive value part");
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(v);
  if (u.order() >= 1) d[1] = 1.0 / v;
  if (u.order() >= 2) d[2] = -0.5 / (v * v);
  if (u.order() >= 3) d[3] = 1.0 / (3.0 * v * v * v);
  return u.composed(d);
}

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = s;
  if (u.order() >= 1) d[1] = c;
  if (u.order() >= 2) d[2] = -s / 2.0;
  if (u.order() >= 3) d[3] = -c / 6.0;
  return u.composed(d);
}

inline Jet cos(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = c;
  if (u.order() >= 1) d[1] = -s;
  if (u.order() >= 2) d[2] = -c / 2.0;
  if (u.order() >= 3) d[3] = s / 6.0;
  return u.composed(d);
}

// u^e for real exponent; value part must be positive.
inline Jet pow(const Jet& u, double e) {
  const double v = u.value();
  if (v <= 0.0) throw DomainError("jet pow requires positive value part");
  std::array<double, kMaxJetOrder + 1> d{};
  double binom = 1.0;
  double pw = std::pow(v, e);
  for (int k = 0; k <= u.order(); ++k) {
    d[static_cast<std::size_t>(k)] = binom * pw;
    binom *= (e - k) / (k + 1);
    pw /= v;
  }
  return u.composed(d);
}

}  // namespace geomorph
