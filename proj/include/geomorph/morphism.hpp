#pragma once

// Residual checks for horizontally conformal and harmonic maps between
// metric charts. Everything here is pointwise: evaluate jets, contract,
// return numbers the caller can aggregate over sample sets.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "geomorph/errors.hpp"
#include "geomorph/fields.hpp"
#include "geomorph/kernel.hpp"

namespace geomorph {

// Conformal factors below this are treated as degenerate (constant maps
// satisfy the equations trivially and are flagged rather than failed).
inline constexpr double kDegenerateConformalFactor = 1e-12;

namespace detail {

inline void check_bundle_dims(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                              const char* what) {
  if (g.dim != phi.domain_dim)
    throw DimensionError(std::string(what) + ": domain metric chart does not match map domain");
  if (h.dim != phi.target_dim)
    throw DimensionError(std::string(what) + ": target metric chart does not match map target");
}

inline Matrix jacobian_values(const JetVec& yj, int n, int m) {
  Matrix F(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) F(i, a) = yj[static_cast<std::size_t>(i)].partial(a);
  return F;
}

inline Vector values_of(const JetVec& yj) {
  Vector v(static_cast<int>(yj.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = yj[static_cast<std::size_t>(i)].value();
  return v;
}

inline void check_target_point(const MetricField& h, const Vector& q, const std::string& map_name) {
  detail::check_point(q, h.dim, "map image");
  if (!h.domain_ok(q, 0.0))
    throw DomainError("image of map " + map_name + " lies outside domain of metric " + h.name);
}

}  // namespace detail

// Jacobian ∂_a φ^i as an n x m matrix (target index first).
inline Matrix differential(const SmoothMap& phi, const Point& p) {
  const JetVec yj = jet_evaluate(phi, p, 1);
  return detail::jacobian_values(yj, phi.target_dim, phi.domain_dim);
}

// (φ*h)_ab = h_ij(φ(p)) ∂_a φ^i ∂_b φ^j
inline Matrix pullback_metric(const SmoothMap& phi, const MetricField& h, const Point& p) {
  if (h.dim != phi.target_dim) throw DimensionError("pullback_metric: metric chart does not match map target");
  const JetVec yj = jet_evaluate(phi, p, 1);
  const Vector q = detail::values_of(yj);
  detail::check_target_point(h, q, phi.name);
  const Matrix F = detail::jacobian_values(yj, phi.target_dim, phi.domain_dim);
  const Matrix hv = metric_values(h, q);
  return F.transpose() * hv * F;
}

// e(φ) = g^{ab} h_ij ∂_a φ^i ∂_b φ^j (twice the usual energy density).
inline double energy_density(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                             const Point& p) {
  detail::check_bundle_dims(phi, g, h, "energy_density");
  const Matrix ginv = metric_inverse_values(g, p.coords);
  return (ginv * pullback_metric(phi, h, p)).trace();
}

// Conformal-factor matrix M^i_j = g^{ab} ∂_a φ^i ∂_b φ^k h_kj and its
// trace-free defect; the map is horizontally weakly conformal at p exactly
// when the defect vanishes.
struct HwcData {
  Matrix defect;
  double conformal_factor = 0.0;  // R = trace(M)/n
  bool degenerate = false;
};

inline HwcData hwc_residual(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                            const Point& p) {
  detail::check_bundle_dims(phi, g, h, "hwc_residual");
  const int n = phi.target_dim;
  const JetVec yj = jet_evaluate(phi, p, 1);
  const Vector q = detail::values_of(yj);
  detail::check_target_point(h, q, phi.name);
  const Matrix F = detail::jacobian_values(yj, n, phi.domain_dim);
  const Matrix ginv = metric_inverse_values(g, p.coords);
  const Matrix hv = metric_values(h, q);
  const Matrix M = F * ginv * F.transpose() * hv;
  const double R = M.trace() / n;
  HwcData out;
  out.conformal_factor = R;
  out.defect = M - R * Matrix::Identity(n, n);
  out.degenerate = R < kDegenerateConformalFactor;
  return out;
}

inline double dilation(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                       const Point& p) {
  const double e = energy_density(phi, g, h, p);
  return std::sqrt(std::max(0.0, e / phi.target_dim));
}

// τ^i = g^{ab}(∂_a∂_b φ^i - Γ(g)^c_ab ∂_c φ^i + Γ(h)^i_jk(φ(p)) ∂_a φ^j ∂_b φ^k)
inline Vector tension_field(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                            const Point& p) {
  detail::check_bundle_dims(phi, g, h, "tension_field");
  const int m = phi.domain_dim;
  const int n = phi.target_dim;
  const JetVec yj = jet_evaluate(phi, p, 2);
  const Vector q = detail::values_of(yj);
  detail::check_target_point(h, q, phi.name);
  const Matrix ginv = metric_inverse_values(g, p.coords);
  const Tensor3 gam_g = christoffel(g, p);
  const Tensor3 gam_h = christoffel(h, point(q));
  Vector tau = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double term = yj[static_cast<std::size_t>(i)].partial(a, b);
        for (int c = 0; c < m; ++c) term -= gam_g(c, a, b) * yj[static_cast<std::size_t>(i)].partial(c);
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            term += gam_h(i, j, k) * yj[static_cast<std::size_t>(j)].partial(a) *
                    yj[static_cast<std::size_t>(k)].partial(b);
        s += ginv(a, b) * term;
      }
    tau[i] = s;
  }
  return tau;
}

struct MorphismResidual {
  double tension_norm = 0.0;     // |τ|_h at the point
  double hwc_defect = 0.0;       // Frobenius norm of the conformal defect
  double conformal_factor = 0.0;
  bool degenerate = false;
  Vector tension;
  Matrix hwc_matrix;
};

inline MorphismResidual harmonic_morphism_residual(const SmoothMap& phi, const MetricField& g,
                                                   const MetricField& h, const Point& p) {
  detail::check_bundle_dims(phi, g, h, "harmonic_morphism_residual");
  MorphismResidual out;
  const HwcData hwc = hwc_residual(phi, g, h, p);
  out.hwc_matrix = hwc.defect;
  out.hwc_defect = hwc.defect.norm();
  out.conformal_factor = hwc.conformal_factor;
  out.degenerate = hwc.degenerate;
  out.tension = tension_field(phi, g, h, p);
  const Vector q = map_value(phi, p.coords);
  const Matrix hv = metric_values(h, q);
  out.tension_norm = std::sqrt(std::max(0.0, out.tension.dot(hv * out.tension)));
  return out;
}

}  // namespace geomorph
