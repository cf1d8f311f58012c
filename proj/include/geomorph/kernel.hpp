#pragma once

// Chart-level differential geometry operators.
//
// Sign conventions, fixed across the library:
//   * Laplacian:  Δf = -g^{ab}(∂_a∂_b f - Γ^c_ab ∂_c f)   (flat, f = x²  →  Δf = -2)
//   * Curvature:  R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb,
//     lowered with the metric on the first slot. With this choice the
//     orthonormal-frame components of a space form satisfy
//     R_abcd = K (δ_ac δ_bd - δ_ad δ_bc).

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "geomorph/errors.hpp"
#include "geomorph/fields.hpp"
#include "geomorph/jet.hpp"

namespace geomorph {

template <class T>
class Tensor3T {
 public:
  Tensor3T() = default;
  explicit Tensor3T(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim * dim * dim)) {}
  int dim() const { return dim_; }
  T& operator()(int i, int j, int k) { return a_[idx(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }

 private:
  std::size_t idx(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= dim_ || j >= dim_ || k >= dim_)
      throw ShapeError("rank-3 tensor index out of range");
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }
  int dim_ = 0;
  std::vector<T> a_;
};

using Tensor3 = Tensor3T<double>;
using JetTensor3 = Tensor3T<Jet>;

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  int dim() const { return dim_; }
  double& operator()(int a, int b, int c, int d) { return a_[idx(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return a_[idx(a, b, c, d)]; }

 private:
  std::size_t idx(int a, int b, int c, int d) const {
    if (a < 0 || b < 0 || c < 0 || d < 0 || a >= dim_ || b >= dim_ || c >= dim_ || d >= dim_)
      throw ShapeError("rank-4 tensor index out of range");
    return static_cast<std::size_t>(((a * dim_ + b) * dim_ + c) * dim_ + d);
  }
  int dim_ = 0;
  std::vector<double> a_;
};

// Christoffel symbols Γ^a_bc as jets of the requested order.
// Γ^a_bc = ½ g^{ad} (∂_b g_dc + ∂_c g_db - ∂_d g_bc)
inline JetTensor3 christoffel_jets(const MetricField& g, const Vector& p, int order) {
  if (order < 0 || order + 1 > kMaxJetOrder)
    throw ConfigError("christoffel jets support orders 0..2");
  const int n = g.dim;
  detail::check_point(p, n, "christoffel");
  if (!g.domain_ok(p, 0.0)) throw DomainError("point outside domain of metric " + g.name);
  const JetMatrix G = g.components(seed_point(p, order + 1));
  if (G.rows() != n || G.cols() != n) throw ShapeError("metric component shape mismatch");
  // ∂ g as jets one order lower.
  std::vector<JetMatrix> dG(static_cast<std::size_t>(n), JetMatrix(n, n));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dG[static_cast<std::size_t>(c)](a, b) = G(a, b).derivative(c);
  JetMatrix Gt(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) Gt(a, b) = G(a, b).truncated(order);
  const Matrix v = Gt.values();
  if (Eigen::LLT<Matrix>(v).info() != Eigen::Success)
    throw SingularMetricError("metric " + g.name + " is not positive definite at evaluation point");
  const JetMatrix Ginv = jet_matrix_inverse(Gt);
  JetTensor3 gamma(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        Jet s = Ginv(a, 0) * (dG[static_cast<std::size_t>(b)](0, c) + dG[static_cast<std::size_t>(c)](0, b) -
                              dG[0](b, c));
        for (int d = 1; d < n; ++d)
          s += Ginv(a, d) * (dG[static_cast<std::size_t>(b)](d, c) + dG[static_cast<std::size_t>(c)](d, b) -
                             dG[static_cast<std::size_t>(d)](b, c));
        s *= 0.5;
        gamma(a, b, c) = s;
        gamma(a, c, b) = s;
      }
  return gamma;
}

inline Tensor3 christoffel(const MetricField& g, const Point& p) {
  const JetTensor3 jets = christoffel_jets(g, p.coords, 0);
  const int n = g.dim;
  Tensor3 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out(a, b, c) = jets(a, b, c).value();
  return out;
}

struct CurvatureData {
  Tensor4 riemann;  // all indices lowered
  Matrix metric;

  // Sectional curvature of span{u, v}.
  double sectional(const Vector& u, const Vector& v) const {
    const int n = riemann.dim();
    if (u.size() != n || v.size() != n) throw ShapeError("sectional curvature vector dimension mismatch");
    double num = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) num += riemann(a, b, c, d) * u[a] * v[b] * u[c] * v[d];
    const double uu = u.dot(metric * u);
    const double vv = v.dot(metric * v);
    const double uv = u.dot(metric * v);
    const double den = uu * vv - uv * uv;
    if (den <= 1e-14 * (1.0 + uu * vv)) throw PreconditionError("sectional curvature of a degenerate 2-plane");
    return num / den;
  }
};

inline CurvatureData riemann_and_sectional(const MetricField& g, const Point& p) {
  const int n = g.dim;
  const JetTensor3 gamma = christoffel_jets(g, p.coords, 1);
  const Matrix gv = metric_values(g, p.coords);
  Tensor4 R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double up = gamma(a, d, b).partial(c) - gamma(a, c, b).partial(d);
          for (int e = 0; e < n; ++e)
            up += gamma(a, c, e).value() * gamma(e, d, b).value() -
                  gamma(a, d, e).value() * gamma(e, c, b).value();
          R(a, b, c, d) = up;
        }
  Tensor4 lowered(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) s += gv(a, e) * R(e, b, c, d);
          lowered(a, b, c, d) = s;
        }
  return CurvatureData{std::move(lowered), gv};
}

// (L_X g)_ab = X^c ∂_c g_ab + g_cb ∂_a X^c + g_ac ∂_b X^c
inline Matrix lie_derivative(const VectorField& X, const MetricField& g, const Point& p) {
  if (X.dim != g.dim) throw DimensionError("lie_derivative: vector field and metric live on different charts");
  const int n = g.dim;
  const JetVec xj = jet_evaluate(X, p, 1);
  const JetMatrix gj = jet_evaluate(g, p, 1);
  Matrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) {
        s += xj[static_cast<std::size_t>(c)].value() * gj(a, b).partial(c);
        s += gj(c, b).value() * xj[static_cast<std::size_t>(c)].partial(a);
        s += gj(a, c).value() * xj[static_cast<std::size_t>(c)].partial(b);
      }
      out(a, b) = s;
    }
  return out;
}

// (L_X α)_a = X^c ∂_c α_a + α_c ∂_a X^c
inline Vector lie_derivative(const VectorField& X, const OneFormField& alpha, const Point& p) {
  if (X.dim != alpha.dim) throw DimensionError("lie_derivative: vector field and one-form live on different charts");
  const int n = X.dim;
  const JetVec xj = jet_evaluate(X, p, 1);
  const JetVec aj = jet_evaluate(alpha, p, 1);
  Vector out(n);
  for (int a = 0; a < n; ++a) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) {
      s += xj[static_cast<std::size_t>(c)].value() * aj[static_cast<std::size_t>(a)].partial(c);
      s += aj[static_cast<std::size_t>(c)].value() * xj[static_cast<std::size_t>(c)].partial(a);
    }
    out[a] = s;
  }
  return out;
}

// (dα)_ab = ∂_a α_b - ∂_b α_a
inline Matrix exterior_derivative_1form(const OneFormField& alpha, const Point& p) {
  const int n = alpha.dim;
  const JetVec aj = jet_evaluate(alpha, p, 1);
  Matrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a, b) = aj[static_cast<std::size_t>(b)].partial(a) - aj[static_cast<std::size_t>(a)].partial(b);
  return out;
}

inline Vector musical_flat(const MetricField& g, const Point& p, const Vector& v) {
  if (v.size() != g.dim) throw ShapeError("musical_flat: vector dimension mismatch");
  return metric_values(g, p.coords) * v;
}

inline Vector musical_sharp(const MetricField& g, const Point& p, const Vector& alpha) {
  if (alpha.size() != g.dim) throw ShapeError("musical_sharp: covector dimension mismatch");
  return metric_inverse_values(g, p.coords) * alpha;
}

struct AdaptedFrame {
  // Columns are the frame vectors e_0 .. e_{dim-1}; e_0 is the supplied
  // unit vector, the rest complete it g-orthonormally.
  Matrix frame;
  Matrix metric;

  int dim() const { return static_cast<int>(frame.rows()); }
  Vector vec(int i) const { return frame.col(i); }
  double inner(const Vector& a, const Vector& b) const { return a.dot(metric * b); }
};

// Gram-Schmidt against g, seeded with u then the coordinate basis in index
// order; candidates whose residual g-norm falls below 1e-8 are skipped.
inline AdaptedFrame adapted_frame(const MetricField& g, const Point& p, const Vector& u) {
  const int n = g.dim;
  if (u.size() != n) throw ShapeError("adapted_frame: vector dimension mismatch");
  const Matrix gv = metric_values(g, p.coords);
  const double unit = u.dot(gv * u);
  if (std::abs(unit - 1.0) > 1e-9) throw PreconditionError("adapted_frame requires a g-unit vector");
  Matrix E(n, n);
  int have = 0;
  auto try_add = [&](Vector w) {
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < have; ++k) w -= (E.col(k).dot(gv * w)) * E.col(k);
    const double norm = std::sqrt(std::max(0.0, w.dot(gv * w)));
    if (norm < 1e-8) return false;
    E.col(have++) = w / norm;
    return true;
  };
  try_add(u);
  for (int i = 0; i < n && have < n; ++i) try_add(Vector::Unit(n, i));
  if (have < n) throw FrameError("adapted_frame: candidate vectors exhausted before completing the frame");
  return AdaptedFrame{std::move(E), gv};
}

// Δf = -g^{ab}(∂_a ∂_b f - Γ^c_ab ∂_c f)
inline double laplace_beltrami(const MetricField& g, const ScalarField& f, const Point& p) {
  if (f.dim != g.dim) throw DimensionError("laplace_beltrami: scalar field and metric live on different charts");
  const int n = g.dim;
  const Jet fj = jet_evaluate(f, p, 2);
  const Tensor3 gamma = christoffel(g, p);
  const Matrix ginv = metric_inverse_values(g, p.coords);
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double term = fj.partial(a, b);
      for (int c = 0; c < n; ++c) term -= gamma(c, a, b) * fj.partial(c);
      sum += ginv(a, b) * term;
    }
  return -sum;
}

// D(a, b) = (∇_b u)^a = ∂_b u^a + Γ^a_bc u^c
inline Matrix covariant_derivative_matrix(const VectorField& u, const MetricField& g, const Point& p) {
  if (u.dim != g.dim) throw DimensionError("covariant derivative: field and metric live on different charts");
  const int n = g.dim;
  const JetVec uj = jet_evaluate(u, p, 1);
  const Tensor3 gamma = christoffel(g, p);
  Matrix out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = uj[static_cast<std::size_t>(a)].partial(b);
      for (int c = 0; c < n; ++c) s += gamma(a, b, c) * uj[static_cast<std::size_t>(c)].value();
      out(a, b) = s;
    }
  return out;
}

}  // namespace geomorph
