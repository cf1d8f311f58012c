#pragma once

// Charts, points and jet-evaluable fields.
//
// A field is a chart dimension plus a component function written in jet
// arithmetic; evaluating it at a point seeds coordinate jets and calls the
// component function, so the same formula yields values and derivatives to
// any supported order. Fields on an n-chart may be fed jets living over a
// larger variable space (a metric on the target evaluated along a map, the
// horizontal block of a bundle metric, ...), which is why component
// functions receive a vector of jets rather than a Point.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/errors.hpp"
#include "geomorph/jet.hpp"

namespace geomorph {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using JetVec = std::vector<Jet>;

struct Point {
  Vector coords;
  std::string chart_id;
};

inline Point point(Vector coords, std::string chart_id = {}) {
  return Point{std::move(coords), std::move(chart_id)};
}

// Dense matrix over the jet ring. Dimensions are tiny (<= 8).
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Jet& operator()(int r, int c) { return a_[idx(r, c)]; }
  const Jet& operator()(int r, int c) const { return a_[idx(r, c)]; }

  Matrix values() const {
    Matrix m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).value();
    return m;
  }

  JetMatrix operator*(const JetMatrix& o) const {
    if (cols_ != o.rows_) throw ShapeError("jet matrix product shape mismatch");
    JetMatrix out(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < o.cols_; ++c) {
        Jet s = (*this)(r, 0) * o(0, c);
        for (int k = 1; k < cols_; ++k) s += (*this)(r, k) * o(k, c);
        out(r, c) = s;
      }
    return out;
  }

 private:
  std::size_t idx(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw ShapeError("jet matrix index out of range");
    return static_cast<std::size_t>(r * cols_ + c);
  }
  int rows_ = 0, cols_ = 0;
  std::vector<Jet> a_;
};

using DomainPredicate = std::function<bool(const Vector&, double)>;

inline DomainPredicate whole_chart() {
  return [](const Vector&, double) { return true; };
}

struct ScalarField {
  int dim = 0;
  std::string name;
  std::function<Jet(const JetVec&)> components;
  DomainPredicate domain_ok = whole_chart();
};

struct VectorField {
  int dim = 0;
  std::string name;
  std::function<JetVec(const JetVec&)> components;
  DomainPredicate domain_ok = whole_chart();
};

struct OneFormField {
  int dim = 0;
  std::string name;
  std::function<JetVec(const JetVec&)> components;
  DomainPredicate domain_ok = whole_chart();
};

struct MetricField {
  int dim = 0;
  std::string name;
  std::function<JetMatrix(const JetVec&)> components;
  // Declared sectional curvature when the chart is a space form.
  std::optional<double> constant_curvature;
  DomainPredicate domain_ok = whole_chart();
};

struct SmoothMap {
  int domain_dim = 0;
  int target_dim = 0;
  std::string name;
  std::function<JetVec(const JetVec&)> components;
  DomainPredicate domain_ok = whole_chart();
};

namespace detail {

// Laplace expansion determinant over the jet ring (dimensions <= 7).
inline Jet jet_det(const JetMatrix& A) {
  const int n = A.rows();
  if (n != A.cols() || n == 0) throw ShapeError("jet determinant needs a square matrix");
  if (n == 1) return A(0, 0);
  Jet out;
  for (int c = 0; c < n; ++c) {
    JetMatrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int k = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, cc++) = A(r, k);
      }
    }
    Jet term = A(0, c) * jet_det(minor);
    if (c % 2 == 1) term = -term;
    out = out.valid() ? out + term : term;
  }
  return out;
}

inline void check_order(int order) {
  if (order < 1 || order > kMaxJetOrder) throw ConfigError("jet order must be 1, 2 or 3");
}

inline void check_point(const Vector& p, int dim, const char* what) {
  if (static_cast<int>(p.size()) != dim)
    throw DimensionError(std::string(what) + ": point dimension does not match chart dimension");
  for (int i = 0; i < p.size(); ++i)
    if (!std::isfinite(p[i])) throw DomainError(std::string(what) + ": point has non-finite coordinate");
}

}  // namespace detail

// Coordinate jets of the chart identity at p.
inline JetVec seed_point(const Vector& p, int order) {
  detail::check_order(order);
  if (p.size() < 1 || p.size() > kMaxJetDim) throw ConfigError("chart dimension must be in 1..8");
  JetVec xs;
  xs.reserve(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i)
    xs.push_back(Jet::variable(p[i], i, static_cast<int>(p.size()), order));
  return xs;
}

// True when xs is exactly the seed of some point (identity coordinates).
inline bool is_standard_seed(const JetVec& xs) {
  if (xs.empty()) return false;
  const int dim = xs[0].dim();
  if (static_cast<int>(xs.size()) != dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (!xs[static_cast<std::size_t>(i)].valid()) return false;
    if (xs[static_cast<std::size_t>(i)].dim() != dim) return false;
    if (xs[static_cast<std::size_t>(i)].order() != xs[0].order()) return false;
    for (std::size_t s = 1; s < xs[static_cast<std::size_t>(i)].coefficient_count(); ++s) {
      const double expect = (s == static_cast<std::size_t>(1 + i)) ? 1.0 : 0.0;
      if (xs[static_cast<std::size_t>(i)].coefficient(s) != expect) return false;
    }
  }
  return true;
}

inline Vector seed_values(const JetVec& xs) {
  Vector p(static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) p[static_cast<int>(i)] = xs[i].value();
  return p;
}

inline Jet jet_evaluate(const ScalarField& f, const Point& p, int order) {
  detail::check_order(order);
  detail::check_point(p.coords, f.dim, f.name.empty() ? "scalar field" : f.name.c_str());
  if (!f.domain_ok(p.coords, 0.0)) throw DomainError("point outside domain of field " + f.name);
  return f.components(seed_point(p.coords, order));
}

inline JetVec jet_evaluate(const VectorField& v, const Point& p, int order) {
  detail::check_order(order);
  detail::check_point(p.coords, v.dim, v.name.empty() ? "vector field" : v.name.c_str());
  if (!v.domain_ok(p.coords, 0.0)) throw DomainError("point outside domain of field " + v.name);
  JetVec out = v.components(seed_point(p.coords, order));
  if (static_cast<int>(out.size()) != v.dim) throw ShapeError("vector field component count mismatch");
  return out;
}

inline JetVec jet_evaluate(const OneFormField& a, const Point& p, int order) {
  detail::check_order(order);
  detail::check_point(p.coords, a.dim, a.name.empty() ? "one-form field" : a.name.c_str());
  if (!a.domain_ok(p.coords, 0.0)) throw DomainError("point outside domain of field " + a.name);
  JetVec out = a.components(seed_point(p.coords, order));
  if (static_cast<int>(out.size()) != a.dim) throw ShapeError("one-form field component count mismatch");
  return out;
}

inline JetMatrix jet_evaluate(const MetricField& g, const Point& p, int order) {
  detail::check_order(order);
  detail::check_point(p.coords, g.dim, g.name.empty() ? "metric field" : g.name.c_str());
  if (!g.domain_ok(p.coords, 0.0)) throw DomainError("point outside domain of metric " + g.name);
  JetMatrix out = g.components(seed_point(p.coords, order));
  if (out.rows() != g.dim || out.cols() != g.dim) throw ShapeError("metric component shape mismatch");
  const Matrix v = out.values();
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + v.cwiseAbs().maxCoeff()))
    throw ShapeError("metric components are not symmetric at evaluation point");
  return out;
}

inline JetVec jet_evaluate(const SmoothMap& m, const Point& p, int order) {
  detail::check_order(order);
  detail::check_point(p.coords, m.domain_dim, m.name.empty() ? "map" : m.name.c_str());
  if (!m.domain_ok(p.coords, 0.0)) throw DomainError("point outside domain of map " + m.name);
  JetVec out = m.components(seed_point(p.coords, order));
  if (static_cast<int>(out.size()) != m.target_dim) throw ShapeError("map component count mismatch");
  return out;
}

inline Vector map_value(const SmoothMap& m, const Vector& p) {
  JetVec ys = m.components(seed_point(p, 1));
  Vector out(m.target_dim);
  for (int i = 0; i < m.target_dim; ++i) out[i] = ys[static_cast<std::size_t>(i)].value();
  return out;
}

// Metric component values with positive definiteness enforced.
inline Matrix metric_values(const MetricField& g, const Vector& p) {
  detail::check_point(p, g.dim, "metric");
  const Matrix v = g.components(seed_point(p, 1)).values();
  Eigen::LLT<Matrix> llt(v);
  if (llt.info() != Eigen::Success)
    throw SingularMetricError("metric " + g.name + " is not positive definite at evaluation point");
  return v;
}

inline Matrix metric_inverse_values(const MetricField& g, const Vector& p) {
  const Matrix v = metric_values(g, p);
  return v.llt().solve(Matrix::Identity(v.rows(), v.cols()));
}

// Inverse over the jet ring via the terminating Neumann series
// (V + N)^{-1} = sum_k (-V^{-1} N)^k V^{-1}, N the zero-value part.
inline JetMatrix jet_matrix_inverse(const JetMatrix& G) {
  if (G.rows() != G.cols() || G.rows() == 0) throw ShapeError("jet matrix inverse needs a square matrix");
  const int n = G.rows();
  const int dim = G(0, 0).dim();
  const int order = G(0, 0).order();
  const Matrix v = G.values();
  Eigen::PartialPivLU<Matrix> lu(v);
  const Matrix vinv = lu.inverse();
  if (!vinv.allFinite() || (v * vinv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw SingularMetricError("matrix value part is singular; cannot invert jets");
  JetMatrix W(n, n), A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) W(r, c) = Jet::constant(vinv(r, c), dim, order);
  // A = V^{-1} N = V^{-1} G - I.
  A = W * G;
  for (int r = 0; r < n; ++r) A(r, r) -= 1.0;
  JetMatrix out = W;
  JetMatrix term = W;
  for (int k = 1; k <= order; ++k) {
    term = A * term;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out(r, c) += (k % 2 == 1 ? -term(r, c) : term(r, c));
  }
  return out;
}

// Wrap a formula that needs extra derivative headroom (it differentiates
// its own inputs) as an ordinary field. The wrapped function receives
// seeds of order + extra and its result is truncated back. Only standard
// coordinate seeds are supported, which covers every kernel operation.
inline ScalarField make_reseeded_scalar_field(int dim, std::string name, int extra,
                                              std::function<Jet(const JetVec&)> high_order_fn) {
  ScalarField f;
  f.dim = dim;
  f.name = std::move(name);
  f.components = [extra, fn = std::move(high_order_fn)](const JetVec& xs) {
    if (!is_standard_seed(xs))
      throw PreconditionError("derived field can only be evaluated at coordinate seeds");
    const int order = xs[0].order();
    if (order + extra > kMaxJetOrder)
      throw ConfigError("derived field evaluation exceeds maximum jet order");
    const Jet hi = fn(seed_point(seed_values(xs), order + extra));
    return hi.truncated(order);
  };
  return f;
}

inline OneFormField make_reseeded_oneform_field(int dim, std::string name, int extra,
                                                std::function<JetVec(const JetVec&)> high_order_fn) {
  OneFormField f;
  f.dim = dim;
  f.name = std::move(name);
  f.components = [dim, extra, fn = std::move(high_order_fn)](const JetVec& xs) {
    if (!is_standard_seed(xs))
      throw PreconditionError("derived field can only be evaluated at coordinate seeds");
    const int order = xs[0].order();
    if (order + extra > kMaxJetOrder)
      throw ConfigError("derived field evaluation exceeds maximum jet order");
    JetVec hi = fn(seed_point(seed_values(xs), order + extra));
    JetVec out;
    out.reserve(static_cast<std::size_t>(dim));
    for (const Jet& j : hi) out.push_back(j.truncated(order));
    return out;
  };
  return f;
}

}  // namespace geomorph
