#pragma once

// Frame analysis of unit vector fields whose integral curves are the
// fibers of a horizontally conformal submersion.
//
// With e_0 = u and e_1..e_n completing a g-orthonormal frame, set
// M_ij = <∇_{e_j} u, e_i>. The invariants extracted here are
//   r_0 = -trace(M)/n          (conformal expansion rate of the leaves)
//   a   = antisym(M)           (integrability obstruction of the horizontal spaces)
//   defect = sym(M) + r_0 I    (zero iff the foliation is conformal)
//   H_i = <∇_u u, e_i>         (fiber mean curvature),  r_i = -H_i/(n-2)
// Scalars derived from these (r_0, the log-scale covector ρ) are
// differentiated by central finite differences of the pointwise
// extraction, never by pushing jets through the orthonormalization.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/errors.hpp"
#include "geomorph/fields.hpp"
#include "geomorph/kernel.hpp"
#include "geomorph/morphism.hpp"

namespace geomorph {

inline constexpr double kDefaultClassifyTolerance = 1e-6;

namespace detail {

inline double fd_step(double coord) { return 1e-5 * std::max(1.0, std::abs(coord)); }

}  // namespace detail

// Unit spanning field of ker(dφ) for a corank-1 submersion, as a
// jet-evaluable field. The kernel vector is assembled from signed maximal
// minors of the Jacobian, normalized against g, and oriented so that the
// largest-magnitude component is positive (or to match sign_ref if given).
inline VectorField vertical_unit_field(const SmoothMap& phi, const MetricField& g,
                                       std::optional<Vector> sign_ref = std::nullopt) {
  if (g.dim != phi.domain_dim)
    throw DimensionError("vertical_unit_field: metric chart does not match map domain");
  if (phi.domain_dim != phi.target_dim + 1)
    throw DimensionError("vertical_unit_field requires a corank-1 map");
  VectorField u;
  u.dim = g.dim;
  u.name = "vertical_unit(" + phi.name + ")";
  u.domain_ok = phi.domain_ok;
  u.components = [phi, g, sign_ref](const JetVec& xs) {
    if (!is_standard_seed(xs))
      throw PreconditionError("vertical_unit_field can only be evaluated at coordinate seeds");
    const int m = phi.domain_dim;
    const int n = phi.target_dim;
    const int order = xs[0].order();
    if (order + 1 > kMaxJetOrder)
      throw ConfigError("vertical_unit_field evaluation exceeds maximum jet order");
    const JetVec ys = phi.components(seed_point(seed_values(xs), order + 1));
    // Jacobian as jets, one order lower.
    JetMatrix J(n, m);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) J(i, a) = ys[static_cast<std::size_t>(i)].derivative(a);
    {
      Eigen::JacobiSVD<Matrix> svd(J.values());
      const auto& sv = svd.singularValues();
      if (sv(n - 1) <= 1e-10 * std::max(1.0, sv(0)))
        throw SubmersionError("differential of " + phi.name + " is rank deficient at evaluation point");
    }
    JetVec v(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      JetMatrix minor(n, n);
      for (int i = 0; i < n; ++i) {
        int cc = 0;
        for (int b = 0; b < m; ++b) {
          if (b == a) continue;
          minor(i, cc++) = J(i, b);
        }
      }
      Jet d = detail::jet_det(minor);
      if (a % 2 == 1) d = -d;
      v[static_cast<std::size_t>(a)] = d;
    }
    const JetMatrix G = g.components(xs);
    Jet norm2;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const Jet t = G(a, b) * v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
        norm2 = norm2.valid() ? norm2 + t : t;
      }
    if (norm2.value() <= 1e-24)
      throw SubmersionError("kernel vector of " + phi.name + " degenerates at evaluation point");
    const Jet inv_norm = 1.0 / sqrt(norm2);
    for (auto& c : v) c = c * inv_norm;
    double orient = 1.0;
    if (sign_ref) {
      double dot = 0.0;
      for (int a = 0; a < m; ++a) dot += v[static_cast<std::size_t>(a)].value() * (*sign_ref)[a];
      if (dot < 0.0) orient = -1.0;
    } else {
      int best = 0;
      for (int a = 1; a < m; ++a)
        if (std::abs(v[static_cast<std::size_t>(a)].value()) >
            std::abs(v[static_cast<std::size_t>(best)].value()))
          best = a;
      if (v[static_cast<std::size_t>(best)].value() < 0.0) orient = -1.0;
    }
    if (orient < 0.0)
      for (auto& c : v) c = -c;
    return v;
  };
  return u;
}

// Field access with submersion validation at a base point.
inline VectorField vertical_unit_field(const SmoothMap& phi, const MetricField& g, const Point& p) {
  VectorField u = vertical_unit_field(phi, g);
  jet_evaluate(u, p, 1);
  return u;
}

// Wrap a unit field so evaluations near a base point stay on the smooth
// branch containing ref (flips the whole jet when the value part points
// away from ref).
inline VectorField anchored_unit_field(const VectorField& u, Vector ref) {
  VectorField out = u;
  out.name = u.name + "[anchored]";
  out.components = [inner = u.components, ref = std::move(ref)](const JetVec& xs) {
    JetVec v = inner(xs);
    double dot = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) dot += v[a].value() * ref[static_cast<int>(a)];
    if (dot < 0.0)
      for (auto& c : v) c = -c;
    return v;
  };
  return out;
}

// g-normalization of a nonvanishing field, as a field.
inline VectorField unit_field(const VectorField& X, const MetricField& g) {
  if (X.dim != g.dim) throw DimensionError("unit_field: field and metric live on different charts");
  VectorField out;
  out.dim = X.dim;
  out.name = "unit(" + X.name + ")";
  out.domain_ok = X.domain_ok;
  out.components = [X, g](const JetVec& xs) {
    JetVec w = X.components(xs);
    const JetMatrix G = g.components(xs);
    const int d = G.rows();
    Jet n2 = Jet::constant(0.0, xs[0].dim(), xs[0].order());
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) n2 += G(a, b) * w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)];
    if (n2.value() <= 0.0) throw ZeroLocusError("unit_field: field vanishes at evaluation point");
    const Jet inv = 1.0 / sqrt(n2);
    for (Jet& c : w) c = c * inv;
    return w;
  };
  return out;
}

struct FrameInvariants {
  double r0 = 0.0;
  Vector r;                    // r_i = -H_i/(n-2)
  Matrix a;                    // antisymmetric part of M
  Matrix conformality_defect;  // sym(M) + r0 I
  Matrix M;                    // M_ij = <∇_{e_j} u, e_i>
  Vector H;                    // H_i = <∇_u u, e_i>
  AdaptedFrame frame;
};

inline FrameInvariants frame_invariants(const VectorField& u, const MetricField& g, const Point& p) {
  if (u.dim != g.dim) throw DimensionError("frame_invariants: field and metric live on different charts");
  const int n = g.dim - 1;
  if (n < 3) throw DimensionError("frame_invariants requires horizontal dimension >= 3");
  const JetVec uj = jet_evaluate(u, p, 1);
  Vector uv(g.dim);
  for (int i = 0; i < g.dim; ++i) uv[i] = uj[static_cast<std::size_t>(i)].value();
  AdaptedFrame frame = adapted_frame(g, p, uv);
  const Matrix D = covariant_derivative_matrix(u, g, p);
  const Matrix& gv = frame.metric;
  FrameInvariants out;
  out.M.resize(n, n);
  out.H.resize(n);
  const Vector du_u = D * frame.vec(0);
  for (int i = 1; i <= n; ++i) {
    out.H[i - 1] = frame.vec(i).dot(gv * du_u);
    for (int j = 1; j <= n; ++j) out.M(i - 1, j - 1) = frame.vec(i).dot(gv * (D * frame.vec(j)));
  }
  out.r0 = -out.M.trace() / n;
  out.a = 0.5 * (out.M - out.M.transpose());
  out.conformality_defect = 0.5 * (out.M + out.M.transpose()) + out.r0 * Matrix::Identity(n, n);
  out.r = -out.H / (n - 2);
  out.frame = std::move(frame);
  return out;
}

// Horizontal part of the metric as a jet-evaluable field:
// g' = g - ω₀ ⊗ ω₀ with ω₀ the g-dual of the (normalized) field u.
inline MetricField horizontal_metric_field(const VectorField& u, const MetricField& g) {
  MetricField out;
  out.dim = g.dim;
  out.name = "horizontal(" + g.name + ")";
  out.domain_ok = g.domain_ok;
  out.components = [u, g](const JetVec& xs) {
    const JetMatrix G = g.components(xs);
    const JetVec uj = u.components(xs);
    const int d = G.rows();
    JetVec w(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      Jet s = G(a, 0) * uj[0];
      for (int b = 1; b < d; ++b) s += G(a, b) * uj[static_cast<std::size_t>(b)];
      w[static_cast<std::size_t>(a)] = s;
    }
    Jet n2 = uj[0] * w[0];
    for (int a = 1; a < d; ++a) n2 += uj[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(a)];
    const Jet inv = 1.0 / n2;
    JetMatrix out_m(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out_m(a, b) = G(a, b) - w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)] * inv;
    return out_m;
  };
  return out;
}

// g-dual of u, normalized, as a jet-evaluable one-form field.
inline OneFormField unit_dual_field(const VectorField& u, const MetricField& g) {
  OneFormField out;
  out.dim = g.dim;
  out.name = "dual(" + u.name + ")";
  out.domain_ok = g.domain_ok;
  out.components = [u, g](const JetVec& xs) {
    const JetMatrix G = g.components(xs);
    const JetVec uj = u.components(xs);
    const int d = G.rows();
    JetVec w(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      Jet s = G(a, 0) * uj[0];
      for (int b = 1; b < d; ++b) s += G(a, b) * uj[static_cast<std::size_t>(b)];
      w[static_cast<std::size_t>(a)] = s;
    }
    Jet n2 = uj[0] * w[0];
    for (int a = 1; a < d; ++a) n2 += uj[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(a)];
    const Jet inv = 1.0 / sqrt(n2);
    for (auto& c : w) c = c * inv;
    return w;
  };
  return out;
}

// Frobenius norm of sym(M) + r0 I; zero iff u's horizontal distribution
// is conformally contracted at the point.
inline double conformality_residual(const VectorField& u, const MetricField& g, const Point& p) {
  return frame_invariants(u, g, p).conformality_defect.norm();
}

// Same defect measured through the Lie derivative of the horizontal
// metric; the two routes agree identically, so this is the cross check.
inline double lie_conformality_residual(const VectorField& u, const MetricField& g, const Point& p) {
  const FrameInvariants fi = frame_invariants(u, g, p);
  const MetricField gp = horizontal_metric_field(u, g);
  const Matrix lie = lie_derivative(u, gp, p);
  const Matrix gpv = gp.components(seed_point(p.coords, 1)).values();
  const Matrix T = lie + 2.0 * fi.r0 * gpv;
  const Matrix& E = fi.frame.frame;
  // Frame components carry a factor 2 relative to the defect.
  return 0.5 * (E.transpose() * T * E).norm();
}

// ρ = r0 ω₀ + ρ' with L_u ω₀ = (n-2) ρ'; the log-scale one-form of the
// conformal foliation, evaluated pointwise.
inline Vector rho_covector(const VectorField& u, const MetricField& g, const Point& p) {
  const int n = g.dim - 1;
  const FrameInvariants fi = frame_invariants(u, g, p);
  const OneFormField omega0 = unit_dual_field(u, g);
  const Vector om = [&] {
    const JetVec oj = jet_evaluate(omega0, p, 1);
    Vector v(g.dim);
    for (int a = 0; a < g.dim; ++a) v[a] = oj[static_cast<std::size_t>(a)].value();
    return v;
  }();
  const Vector rho_prime = lie_derivative(u, omega0, p) / (n - 2);
  return fi.r0 * om + rho_prime;
}

struct RhoReport {
  Vector rho;
  Matrix drho;        // central finite differences of the pointwise ρ
  double closedness;  // Frobenius norm of dρ
};

inline RhoReport rho_and_closedness(const VectorField& u, const MetricField& g, const Point& p) {
  const int d = g.dim;
  RhoReport out;
  out.rho = rho_covector(u, g, p);
  out.drho.resize(d, d);
  std::vector<Vector> plus(static_cast<std::size_t>(d)), minus(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double h = detail::fd_step(p.coords[a]);
    Vector xp = p.coords, xm = p.coords;
    xp[a] += h;
    xm[a] -= h;
    plus[static_cast<std::size_t>(a)] = rho_covector(u, g, point(xp, p.chart_id));
    minus[static_cast<std::size_t>(a)] = rho_covector(u, g, point(xm, p.chart_id));
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double ha = detail::fd_step(p.coords[a]);
      const double hb = detail::fd_step(p.coords[b]);
      const double da_rb = (plus[static_cast<std::size_t>(a)][b] - minus[static_cast<std::size_t>(a)][b]) / (2 * ha);
      const double db_ra = (plus[static_cast<std::size_t>(b)][a] - minus[static_cast<std::size_t>(b)][a]) / (2 * hb);
      out.drho(a, b) = da_rb - db_ra;
    }
  out.closedness = out.drho.norm();
  return out;
}

enum class FoliationType { Type1, Type2, Both, Neither };

inline const char* to_string(FoliationType t) {
  switch (t) {
    case FoliationType::Type1: return "type1";
    case FoliationType::Type2: return "type2";
    case FoliationType::Both: return "both";
    case FoliationType::Neither: return "neither";
  }
  return "neither";
}

struct TypeReport {
  FoliationType verdict = FoliationType::Neither;
  double type1_residual = 0.0;  // max(|r_i|, |a_ij|, |dr0 - (r0²+K)ω₀|)
  double type2_residual = 0.0;  // max(|r0|, |dρ|)
  double r0 = 0.0;
  double dr0_residual = 0.0;
  double drho_norm = 0.0;
  double r_max = 0.0;
  double a_max = 0.0;
};

// Worst deviation of the orthonormal-frame curvature components from the
// constant-curvature pattern K(δ_ac δ_bd - δ_ad δ_bc).
inline double space_form_residual(const MetricField& g, const Point& p, double K) {
  const CurvatureData cur = riemann_and_sectional(g, p);
  const int d = g.dim;
  Vector first = Vector::Unit(d, 0);
  const Matrix gv = cur.metric;
  first /= std::sqrt(first.dot(gv * first));
  const AdaptedFrame frame = adapted_frame(g, p, first);
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double rabce = 0.0;
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                  rabce += cur.riemann(i, j, k, l) * frame.frame(i, a) * frame.frame(j, b) *
                           frame.frame(k, c) * frame.frame(l, e);
          const double expect = K * ((a == c ? 1.0 : 0.0) * (b == e ? 1.0 : 0.0) -
                                     (a == e ? 1.0 : 0.0) * (b == c ? 1.0 : 0.0));
          worst = std::max(worst, std::abs(rabce - expect));
        }
  return worst;
}

// Verify the chart is a space form of curvature K at p.
inline void verify_space_form(const MetricField& g, const Point& p, double K, double tol = 1e-7) {
  if (space_form_residual(g, p, K) > tol * (1.0 + std::abs(K)))
    throw PreconditionError("metric " + g.name + " is not a space form of the declared curvature");
}

inline TypeReport classify_type(const VectorField& u, const MetricField& g, double K, const Point& p,
                                double tol = kDefaultClassifyTolerance) {
  const int d = g.dim;
  const int n = d - 1;
  if (n < 3) throw DimensionError("classify_type requires horizontal dimension >= 3");
  verify_space_form(g, p, K);
  const FrameInvariants fi = frame_invariants(u, g, p);

  // dr0 by central differences of the pointwise extraction, on the branch
  // through u(p).
  Vector uref(d);
  {
    const JetVec uj = jet_evaluate(u, p, 1);
    for (int a = 0; a < d; ++a) uref[a] = uj[static_cast<std::size_t>(a)].value();
  }
  const VectorField ua = anchored_unit_field(u, uref);
  Vector dr0(d);
  for (int a = 0; a < d; ++a) {
    const double h = detail::fd_step(p.coords[a]);
    Vector xp = p.coords, xm = p.coords;
    xp[a] += h;
    xm[a] -= h;
    dr0[a] = (frame_invariants(ua, g, point(xp, p.chart_id)).r0 -
              frame_invariants(ua, g, point(xm, p.chart_id)).r0) /
             (2 * h);
  }
  const Matrix gv = metric_values(g, p.coords);
  const Vector omega0 = gv * uref;
  const Vector gap = dr0 - (fi.r0 * fi.r0 + K) * omega0;
  const Matrix ginv = gv.llt().solve(Matrix::Identity(d, d));
  const double dr0_res = std::sqrt(std::max(0.0, gap.dot(ginv * gap)));

  const RhoReport rho = rho_and_closedness(u, g, p);

  TypeReport out;
  out.r0 = fi.r0;
  out.dr0_residual = dr0_res;
  out.drho_norm = rho.closedness;
  out.r_max = fi.r.cwiseAbs().maxCoeff();
  out.a_max = fi.a.cwiseAbs().maxCoeff();
  out.type1_residual = std::max({out.r_max, out.a_max, dr0_res});
  out.type2_residual = std::max(std::abs(fi.r0), rho.closedness);
  const bool t1 = out.type1_residual < tol;
  const bool t2 = out.type2_residual < tol;
  out.verdict = t1 ? (t2 ? FoliationType::Both : FoliationType::Type1)
                   : (t2 ? FoliationType::Type2 : FoliationType::Neither);
  return out;
}

// Frobenius norm of (L_X g)_ab; zero iff X is Killing at p.
inline double killing_residual(const VectorField& X, const MetricField& g, const Point& p) {
  return lie_derivative(X, g, p).norm();
}

// g-norm of the horizontal part of ∇_u u; zero iff the fibers are
// geodesic (minimal for one-dimensional fibers). Valid in any dimension.
inline double fiber_minimality_residual(const VectorField& u, const MetricField& g, const Point& p) {
  if (u.dim != g.dim) throw DimensionError("fiber_minimality_residual: chart mismatch");
  const JetVec uj = jet_evaluate(u, p, 1);
  Vector uv(g.dim);
  for (int a = 0; a < g.dim; ++a) uv[a] = uj[static_cast<std::size_t>(a)].value();
  const Matrix gv = metric_values(g, p.coords);
  const double unit = uv.dot(gv * uv);
  if (std::abs(unit - 1.0) > 1e-9) throw PreconditionError("fiber_minimality_residual requires a g-unit field");
  const Matrix D = covariant_derivative_matrix(u, g, p);
  Vector w = D * uv;
  w -= (uv.dot(gv * w)) * uv;
  return std::sqrt(std::max(0.0, w.dot(gv * w)));
}

// Tension of a horizontally conformal map computed through the adapted
// frame: the frame components are -r((n-2) r_i + H_i) with r the dilation
// and r_i the frame components of d(log r); they are pushed to target
// coordinates through dφ for comparison with tension_field.
inline Vector tension_via_frames(const SmoothMap& phi, const MetricField& g, const MetricField& h,
                                 const Point& p) {
  detail::check_bundle_dims(phi, g, h, "tension_via_frames");
  const int n = phi.target_dim;
  if (n < 3) throw DimensionError("tension_via_frames requires target dimension >= 3");
  const HwcData hwc = hwc_residual(phi, g, h, p);
  if (hwc.defect.norm() > 1e-6 * std::max(1.0, std::abs(hwc.conformal_factor)))
    throw PreconditionError("tension_via_frames requires a horizontally conformal map at the point");
  const VectorField u = vertical_unit_field(phi, g);
  const FrameInvariants fi = frame_invariants(u, g, p);
  // d(log r) by central differences of the pointwise dilation.
  const int d = g.dim;
  Vector dlogr(d);
  for (int a = 0; a < d; ++a) {
    const double hstep = detail::fd_step(p.coords[a]);
    Vector xp = p.coords, xm = p.coords;
    xp[a] += hstep;
    xm[a] -= hstep;
    dlogr[a] = (std::log(dilation(phi, g, h, point(xp, p.chart_id))) -
                std::log(dilation(phi, g, h, point(xm, p.chart_id)))) /
               (2 * hstep);
  }
  const Matrix F = differential(phi, p);
  const double r = dilation(phi, g, h, p);
  Vector tau = Vector::Zero(n);
  for (int i = 1; i <= n; ++i) {
    const Vector ei = fi.frame.vec(i);
    const double ri = dlogr.dot(ei);
    const double coeff = -r * ((n - 2) * ri + fi.H[i - 1]);
    tau += (coeff / r) * (F * ei);
  }
  return tau;
}

// Harmonicity residual of the fibration of u against a candidate dilation
// given by its log; ‖ -r((n-2) r_i + H_i) ‖ over the horizontal frame.
inline double frame_harmonicity_residual(const VectorField& u, const MetricField& g,
                                         const std::function<double(const Vector&)>& log_scale,
                                         const Point& p) {
  const int n = g.dim - 1;
  if (n < 3) throw DimensionError("frame_harmonicity_residual requires horizontal dimension >= 3");
  const FrameInvariants fi = frame_invariants(u, g, p);
  const int d = g.dim;
  Vector dlogr(d);
  for (int a = 0; a < d; ++a) {
    const double h = detail::fd_step(p.coords[a]);
    Vector xp = p.coords, xm = p.coords;
    xp[a] += h;
    xm[a] -= h;
    dlogr[a] = (log_scale(xp) - log_scale(xm)) / (2 * h);
  }
  const double r = std::exp(log_scale(p.coords));
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ri = dlogr.dot(fi.frame.vec(i));
    const double c = -r * ((n - 2) * ri + fi.H[i - 1]);
    sum += c * c;
  }
  return std::sqrt(sum);
}

// Algebraic torsion tensor of a conformal foliation with invariants
// (p, a) in horizontal dimension n:
//   (n-2) S_ijk = (n-1)(p_j a_ki - p_k a_ji - 2 p_i a_jk)
//                 - 3(δ_ij q_k - δ_ik q_j),   q_k = p_l a_kl
// Identities S_ijk = -S_ikj and S_iik = 0 hold for every input.
inline Tensor3 torsion_S(const Vector& pvec, const Matrix& a, int n) {
  if (n < 3) throw DimensionError("torsion_S requires n >= 3");
  if (pvec.size() != n || a.rows() != n || a.cols() != n)
    throw ShapeError("torsion_S: input sizes do not match n");
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
    throw PreconditionError("torsion_S requires an antisymmetric a");
  Vector q(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += pvec[l] * a(k, l);
    q[k] = s;
  }
  Tensor3 S(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = (n - 1) * (pvec[j] * a(k, i) - pvec[k] * a(j, i) - 2.0 * pvec[i] * a(j, k));
        v -= 3.0 * ((i == j ? q[k] : 0.0) - (i == k ? q[j] : 0.0));
        S(i, j, k) = v / (n - 2);
      }
  return S;
}

// The p-vector entering the torsion tensor, from the raw invariants.
inline Vector torsion_p(const Vector& s, double r0, const Vector& r, int n) {
  if (s.size() != r.size()) throw ShapeError("torsion_p: input sizes differ");
  return s - (n - 2) * r0 * r;
}

// r(p) = exp ∫₀¹ ρ(base + t(p-base)) · (p-base) dt, with a 64-node
// composite Gauss-Legendre rule (8 panels x 8 nodes); r(base) = 1.
inline double reconstruct_scale(const VectorField& u, const MetricField& g, const Point& base,
                                const Point& p) {
  if (base.coords.size() != p.coords.size()) throw ShapeError("reconstruct_scale: point dimension mismatch");
  static constexpr std::array<double, 4> nodes = {0.1834346424956498, 0.5255324099163290,
                                                  0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> weights = {0.3626837833783620, 0.3137066458778873,
                                                    0.2223810344533745, 0.1012285362903763};
  const Vector d = p.coords - base.coords;
  double integral = 0.0;
  const int panels = 8;
  for (int panel = 0; panel < panels; ++panel) {
    const double t0 = static_cast<double>(panel) / panels;
    const double t1 = static_cast<double>(panel + 1) / panels;
    const double mid = 0.5 * (t0 + t1);
    const double half = 0.5 * (t1 - t0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      for (double sgn : {-1.0, 1.0}) {
        const double t = mid + sgn * half * nodes[k];
        const Vector x = base.coords + t * d;
        const Vector rho = rho_covector(u, g, point(x, p.chart_id));
        integral += weights[k] * half * rho.dot(d);
      }
    }
  }
  return std::exp(integral);
}

}  // namespace geomorph
