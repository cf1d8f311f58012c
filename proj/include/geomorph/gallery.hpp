#pragma once

// Closed-form bundles with known classification, used as ground truth by
// the test suites and the verification CLI. Each bundle packages a domain
// metric, a target metric, the map between their charts, an admissible
// sampling region and the expected classification.
//
// Sphere charts are stereographic with the projection pole on the last
// ambient axis; hyperbolic space is the upper half-space model.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/fields.hpp"
#include "geomorph/foliation.hpp"
#include "geomorph/sampling.hpp"

namespace geomorph {

enum class ExpectedType { Type1, Type2, Both, NotApplicable };

inline const char* to_string(ExpectedType t) {
  switch (t) {
    case ExpectedType::Type1: return "type1";
    case ExpectedType::Type2: return "type2";
    case ExpectedType::Both: return "both";
    case ExpectedType::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

struct MorphismBundle {
  std::string name;
  MetricField g;
  MetricField h;
  SmoothMap map;
  SampleRegion region;
  ExpectedType expected = ExpectedType::NotApplicable;
  std::optional<double> curvature_K;        // domain space-form curvature
  std::optional<double> constant_dilation;  // known constant dilation, if any
  bool minimal_fibers = false;              // fibers are geodesics of g
  std::optional<VectorField> vertical;      // closed-form unit vertical field
  std::optional<VectorField> killing;       // Killing field spanning the fibers

  int n() const { return map.target_dim; }
};

namespace detail {

inline Jet jet_norm2(const JetVec& xs, int from, int to) {
  Jet s = xs[static_cast<std::size_t>(from)] * xs[static_cast<std::size_t>(from)];
  for (int i = from + 1; i < to; ++i) s += xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];
  return s;
}

// Inverse stereographic chart into the unit sphere, pole on the last axis:
// v in R^k  ->  y in S^k c R^{k+1},  y_i = 2 v_i/(1+|v|²), y_k = (|v|²-1)/(1+|v|²).
inline JetVec inverse_stereographic(const JetVec& v) {
  const int k = static_cast<int>(v.size());
  const Jet denom = 1.0 + jet_norm2(v, 0, k);
  JetVec y;
  y.reserve(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) y.push_back(2.0 * v[static_cast<std::size_t>(i)] / denom);
  y.push_back((denom - 2.0) / denom);
  return y;
}

// Stereographic chart of the unit sphere, pole on the last axis:
// y in S^k  ->  (y_0..y_{k-1})/(1 - y_k).
inline JetVec stereographic(const JetVec& y) {
  const int k = static_cast<int>(y.size()) - 1;
  const Jet denom = 1.0 - y[static_cast<std::size_t>(k)];
  JetVec out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(y[static_cast<std::size_t>(i)] / denom);
  return out;
}

}  // namespace detail

inline MetricField flat_metric(int dim, std::string name = {}) {
  MetricField g;
  g.dim = dim;
  g.name = name.empty() ? "flat_r" + std::to_string(dim) : std::move(name);
  g.constant_curvature = 0.0;
  g.components = [dim](const JetVec& xs) {
    JetMatrix out(dim, dim);
    const Jet zero = Jet::constant(0.0, xs[0].dim(), xs[0].order());
    const Jet one = Jet::constant(1.0, xs[0].dim(), xs[0].order());
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out(a, b) = (a == b) ? one : zero;
    return out;
  };
  return g;
}

// Round metric of the unit sphere in its stereographic chart:
// g = 4 (1+|u|²)^{-2} δ, sectional curvature +1.
inline MetricField sphere_chart_metric(int dim, std::string name = {}) {
  MetricField g;
  g.dim = dim;
  g.name = name.empty() ? "round_sphere_chart_s" + std::to_string(dim) : std::move(name);
  g.constant_curvature = 1.0;
  g.components = [dim](const JetVec& xs) {
    const Jet denom = 1.0 + detail::jet_norm2(xs, 0, dim);
    const Jet factor = 4.0 / (denom * denom);
    const Jet zero = Jet::constant(0.0, xs[0].dim(), xs[0].order());
    JetMatrix out(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out(a, b) = (a == b) ? factor : zero;
    return out;
  };
  return g;
}

// Upper half-space model: g = y^{-2} δ with y the last coordinate,
// sectional curvature -1.
inline MetricField halfspace_metric(int dim, std::string name = {}) {
  MetricField g;
  g.dim = dim;
  g.name = name.empty() ? "hyperbolic_halfspace_" + std::to_string(dim) : std::move(name);
  g.constant_curvature = -1.0;
  g.domain_ok = [dim](const Vector& x, double margin) { return x[dim - 1] > margin; };
  g.components = [dim](const JetVec& xs) {
    const Jet y = xs[static_cast<std::size_t>(dim - 1)];
    if (y.value() <= 0.0) throw DomainError("half-space metric evaluated at nonpositive height");
    const Jet factor = 1.0 / (y * y);
    const Jet zero = Jet::constant(0.0, xs[0].dim(), xs[0].order());
    JetMatrix out(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out(a, b) = (a == b) ? factor : zero;
    return out;
  };
  return g;
}

// Flat R^{n+1} -> flat R^n, drop the last coordinate. Fibers are parallel
// lines; expected verdict: both families.
inline MorphismBundle euclidean_projection(int n = 3) {
  const int m = n + 1;
  MorphismBundle b;
  b.name = "euclidean_projection";
  b.g = flat_metric(m);
  b.h = flat_metric(n);
  b.map.domain_dim = m;
  b.map.target_dim = n;
  b.map.name = b.name;
  b.map.components = [n](const JetVec& xs) { return JetVec(xs.begin(), xs.begin() + n); };
  b.region.lo = Vector::Constant(m, -1.5);
  b.region.hi = Vector::Constant(m, 1.5);
  b.expected = ExpectedType::Both;
  b.curvature_K = 0.0;
  b.minimal_fibers = true;
  VectorField u;
  u.dim = m;
  u.name = "vertical_axis";
  u.components = [m](const JetVec& xs) {
    JetVec out(static_cast<std::size_t>(m), Jet::constant(0.0, xs[0].dim(), xs[0].order()));
    out[static_cast<std::size_t>(m - 1)] = Jet::constant(1.0, xs[0].dim(), xs[0].order());
    return out;
  };
  b.vertical = std::move(u);
  return b;
}

// Flat R^{n+1} minus a ball, projected along rays onto the unit sphere and
// read in the stereographic chart. Fibers are radial rays; umbilic family.
inline MorphismBundle radial_projection(int n = 3) {
  const int m = n + 1;
  MorphismBundle b;
  b.name = "radial_projection";
  b.g = flat_metric(m);
  b.h = sphere_chart_metric(n);
  auto admissible = [m](const Vector& x, double margin) {
    const double r = x.norm();
    if (r <= 0.1 + margin) return false;
    return r - x[m - 1] > (0.2 + margin) * r;  // stay away from the projection pole ray
  };
  b.map.domain_dim = m;
  b.map.target_dim = n;
  b.map.name = b.name;
  b.map.domain_ok = admissible;
  b.map.components = [n, m](const JetVec& xs) {
    const Jet r = sqrt(detail::jet_norm2(xs, 0, m));
    const Jet denom = r - xs[static_cast<std::size_t>(m - 1)];
    JetVec out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(xs[static_cast<std::size_t>(i)] / denom);
    return out;
  };
  b.region.lo = Vector::Constant(m, -2.0);
  b.region.hi = Vector::Constant(m, 2.0);
  b.region.keep_if.push_back({"admissible", admissible});
  b.expected = ExpectedType::Type1;
  b.curvature_K = 0.0;
  b.minimal_fibers = true;
  VectorField u;
  u.dim = m;
  u.name = "radial_unit";
  u.domain_ok = admissible;
  u.components = [m](const JetVec& xs) {
    const Jet inv_r = 1.0 / sqrt(detail::jet_norm2(xs, 0, m));
    JetVec out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.push_back(xs[static_cast<std::size_t>(i)] * inv_r);
    return out;
  };
  b.vertical = std::move(u);
  return b;
}

// Unit 4-sphere fibered over its equatorial 3-sphere by parallel
// hyperspheres, both read in stereographic charts; umbilic family with
// curvature +1.
inline MorphismBundle sphere_umbilic() {
  const int n = 3;
  const int m = 4;
  MorphismBundle b;
  b.name = "sphere_umbilic";
  b.g = sphere_chart_metric(m);
  b.h = sphere_chart_metric(n);
  auto ambient = [](const Vector& v) {
    const double s = v.squaredNorm();
    Vector y(5);
    for (int i = 0; i < 4; ++i) y[i] = 2.0 * v[i] / (1.0 + s);
    y[4] = (s - 1.0) / (1.0 + s);
    return y;
  };
  auto admissible = [ambient](const Vector& v, double margin) {
    const Vector y = ambient(v);
    const double equatorial2 = 1.0 - y[4] * y[4];
    if (equatorial2 <= 0.1 + margin) return false;  // near a chart pole of the domain sphere
    const double w3 = y[3] / std::sqrt(equatorial2);
    return 1.0 - w3 > 0.15 + margin;  // near the target chart pole
  };
  b.map.domain_dim = m;
  b.map.target_dim = n;
  b.map.name = b.name;
  b.map.domain_ok = admissible;
  b.map.components = [](const JetVec& v) {
    const JetVec y = detail::inverse_stereographic(v);
    const Jet scale = 1.0 / sqrt(1.0 - y[4] * y[4]);
    JetVec w;
    w.reserve(4);
    for (int i = 0; i < 4; ++i) w.push_back(y[static_cast<std::size_t>(i)] * scale);
    return detail::stereographic(w);
  };
  b.region.lo = Vector::Constant(m, -1.5);
  b.region.hi = Vector::Constant(m, 1.5);
  b.region.keep_if.push_back({"admissible", admissible});
  b.expected = ExpectedType::Type1;
  b.curvature_K = 1.0;
  b.minimal_fibers = true;
  return b;
}

// Hyperbolic upper half-space projected along the height coordinate onto
// flat R^n; umbilic family with curvature -1.
inline MorphismBundle halfspace_projection(int n = 3) {
  const int m = n + 1;
  MorphismBundle b;
  b.name = "halfspace_projection";
  b.g = halfspace_metric(m);
  b.h = flat_metric(n);
  b.map.domain_dim = m;
  b.map.target_dim = n;
  b.map.name = b.name;
  b.map.domain_ok = b.g.domain_ok;
  b.map.components = [n](const JetVec& xs) { return JetVec(xs.begin(), xs.begin() + n); };
  b.region.lo = Vector::Constant(m, -2.0);
  b.region.hi = Vector::Constant(m, 2.0);
  b.region.lo[m - 1] = 0.2;
  b.region.hi[m - 1] = 3.0;
  b.expected = ExpectedType::Type1;
  b.curvature_K = -1.0;
  b.minimal_fibers = true;
  VectorField u;
  u.dim = m;
  u.name = "height_unit";
  u.domain_ok = b.g.domain_ok;
  u.components = [m](const JetVec& xs) {
    JetVec out(static_cast<std::size_t>(m), Jet::constant(0.0, xs[0].dim(), xs[0].order()));
    out[static_cast<std::size_t>(m - 1)] = xs[static_cast<std::size_t>(m - 1)];
    return out;
  };
  b.vertical = std::move(u);
  return b;
}

// The quadratic map R^4 -> R^3 whose fibers are orbits of a double
// rotation; Killing family.
inline MorphismBundle quadratic_r4_r3() {
  MorphismBundle b;
  b.name = "quadratic_r4_r3";
  b.g = flat_metric(4);
  b.h = flat_metric(3);
  auto admissible = [](const Vector& x, double margin) { return x.norm() > 0.1 + margin; };
  b.map.domain_dim = 4;
  b.map.target_dim = 3;
  b.map.name = b.name;
  b.map.domain_ok = admissible;
  b.map.components = [](const JetVec& x) {
    JetVec y;
    y.reserve(3);
    y.push_back(0.5 * (x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]));
    y.push_back(x[0] * x[3] - x[1] * x[2]);
    y.push_back(x[0] * x[2] + x[1] * x[3]);
    return y;
  };
  b.region.lo = Vector::Constant(4, -1.5);
  b.region.hi = Vector::Constant(4, 1.5);
  b.region.keep_if.push_back({"outside_origin_ball", admissible});
  b.expected = ExpectedType::Type2;
  b.curvature_K = 0.0;
  VectorField X;
  X.dim = 4;
  X.name = "double_rotation";
  X.components = [](const JetVec& x) {
    JetVec out;
    out.reserve(4);
    out.push_back(-x[1]);
    out.push_back(x[0]);
    out.push_back(-x[3]);
    out.push_back(x[2]);
    return out;
  };
  b.killing = X;
  VectorField u;
  u.dim = 4;
  u.name = "double_rotation_unit";
  u.domain_ok = admissible;
  u.components = [](const JetVec& x) {
    const Jet inv = 1.0 / sqrt(detail::jet_norm2(x, 0, 4));
    JetVec out;
    out.reserve(4);
    out.push_back(-x[1] * inv);
    out.push_back(x[0] * inv);
    out.push_back(-x[3] * inv);
    out.push_back(x[2] * inv);
    return out;
  };
  b.vertical = std::move(u);
  return b;
}

// The circle fibration of the unit 3-sphere over the unit 2-sphere in
// stereographic charts. Target dimension 2: the dichotomy machinery does
// not apply, but harmonicity, conformality and fiber minimality do; the
// dilation is the constant 2.
inline MorphismBundle hopf() {
  MorphismBundle b;
  b.name = "hopf_fibration";
  b.g = sphere_chart_metric(3);
  b.h = sphere_chart_metric(2);
  auto target_w = [](const Vector& u) {
    const double s = u.squaredNorm();
    Vector y(4);
    for (int i = 0; i < 3; ++i) y[i] = 2.0 * u[i] / (1.0 + s);
    y[3] = (s - 1.0) / (1.0 + s);
    Vector w(3);
    w[0] = y[0] * y[0] + y[1] * y[1] - y[2] * y[2] - y[3] * y[3];
    w[1] = 2.0 * (y[0] * y[2] + y[1] * y[3]);
    w[2] = 2.0 * (y[1] * y[2] - y[0] * y[3]);
    return w;
  };
  auto admissible = [target_w](const Vector& u, double margin) {
    return 1.0 - target_w(u)[2] > 0.15 + margin;
  };
  b.map.domain_dim = 3;
  b.map.target_dim = 2;
  b.map.name = b.name;
  b.map.domain_ok = admissible;
  b.map.components = [](const JetVec& u) {
    const JetVec y = detail::inverse_stereographic(u);
    JetVec w;
    w.reserve(3);
    w.push_back(y[0] * y[0] + y[1] * y[1] - y[2] * y[2] - y[3] * y[3]);
    w.push_back(2.0 * (y[0] * y[2] + y[1] * y[3]));
    w.push_back(2.0 * (y[1] * y[2] - y[0] * y[3]));
    return detail::stereographic(w);
  };
  b.region.lo = Vector::Constant(3, -2.0);
  b.region.hi = Vector::Constant(3, 2.0);
  b.region.keep_if.push_back({"away_from_target_pole", admissible});
  b.expected = ExpectedType::NotApplicable;
  b.curvature_K = 1.0;
  b.constant_dilation = 2.0;
  b.minimal_fibers = true;
  VectorField u;
  u.dim = 3;
  u.name = "hopf_circle_unit";
  u.components = [](const JetVec& x) {
    const Jet s = detail::jet_norm2(x, 0, 3);
    JetVec out;
    out.reserve(3);
    out.push_back(x[0] * x[2] - x[1]);
    out.push_back(x[1] * x[2] + x[0]);
    out.push_back(0.5 * (1.0 - s) + x[2] * x[2]);
    return out;
  };
  b.vertical = std::move(u);
  return b;
}

inline std::vector<MorphismBundle> standard_gallery() {
  std::vector<MorphismBundle> out;
  out.push_back(euclidean_projection());
  out.push_back(halfspace_projection());
  out.push_back(hopf());
  out.push_back(quadratic_r4_r3());
  out.push_back(radial_projection());
  out.push_back(sphere_umbilic());
  return out;
}

struct KillingEntry {
  std::string name;
  VectorField X;
  MetricField g;
  SampleRegion region;
};

// Isometry generators used by the killing suite and the quotient-scale
// checks: plane rotations and screw motions of flat space, and a rotation
// generator of the round sphere that moves the chart pole.
inline std::vector<KillingEntry> killing_fields_catalog() {
  std::vector<KillingEntry> out;

  auto flat_region = [](int dim) {
    SampleRegion r;
    r.lo = Vector::Constant(dim, -1.5);
    r.hi = Vector::Constant(dim, 1.5);
    return r;
  };
  auto away_from_axis = [](const Vector& x, double margin) {
    return x[1] * x[1] + x[2] * x[2] > (0.3 + margin) * (0.3 + margin);
  };

  {
    KillingEntry e;
    e.name = "double_rotation_flat4";
    e.g = flat_metric(4);
    e.X.dim = 4;
    e.X.name = e.name;
    e.X.components = [](const JetVec& x) {
      JetVec out;
      out.reserve(4);
      out.push_back(-x[1]);
      out.push_back(x[0]);
      out.push_back(-x[3]);
      out.push_back(x[2]);
      return out;
    };
    e.region = flat_region(4);
    e.region.keep_if.push_back(
        {"outside_origin_ball", [](const Vector& x, double margin) { return x.norm() > 0.3 + margin; }});
    out.push_back(std::move(e));
  }

  {
    KillingEntry e;
    e.name = "rotation_xy_flat4";
    e.g = flat_metric(4);
    e.X.dim = 4;
    e.X.name = e.name;
    e.X.components = [](const JetVec& x) {
      JetVec out(4, Jet::constant(0.0, x[0].dim(), x[0].order()));
      out[0] = -x[1];
      out[1] = x[0];
      return out;
    };
    e.region = flat_region(4);
    e.region.keep_if.push_back({"away_from_axis", [](const Vector& x, double margin) {
                                  return x[0] * x[0] + x[1] * x[1] > (0.3 + margin) * (0.3 + margin);
                                }});
    out.push_back(std::move(e));
  }

  for (double m1 : {1.0, 2.0}) {
    KillingEntry e;
    e.name = "screw_m" + std::to_string(static_cast<int>(m1)) + "_flat4";
    e.g = flat_metric(4);
    e.X.dim = 4;
    e.X.name = e.name;
    e.X.components = [m1](const JetVec& x) {
      JetVec out(4, Jet::constant(0.0, x[0].dim(), x[0].order()));
      out[0] = Jet::constant(1.0, x[0].dim(), x[0].order());
      out[1] = -m1 * x[2];
      out[2] = m1 * x[1];
      return out;
    };
    e.region = flat_region(4);
    e.region.keep_if.push_back({"away_from_screw_axis", away_from_axis});
    out.push_back(std::move(e));
  }

  {
    KillingEntry e;
    e.name = "sphere_chart_rotation_s3";
    e.g = sphere_chart_metric(3);
    e.X.dim = 3;
    e.X.name = e.name;
    // Pushforward of the ambient (x_1, x_4)-plane rotation through the
    // stereographic chart.
    e.X.components = [](const JetVec& u) {
      const Jet s = detail::jet_norm2(u, 0, 3);
      JetVec out;
      out.reserve(3);
      out.push_back(0.5 * (1.0 - s) + u[0] * u[0]);
      out.push_back(u[1] * u[0]);
      out.push_back(u[2] * u[0]);
      return out;
    };
    e.region.lo = Vector::Constant(3, -2.0);
    e.region.hi = Vector::Constant(3, 2.0);
    out.push_back(std::move(e));
  }

  return out;
}

struct SpaceFormChart {
  std::string name;
  MetricField g;
  SampleRegion region;
  double K = 0.0;
};

inline std::vector<SpaceFormChart> space_form_charts() {
  std::vector<SpaceFormChart> out;
  {
    SpaceFormChart c;
    c.g = flat_metric(4);
    c.name = c.g.name;
    c.K = 0.0;
    c.region.lo = Vector::Constant(4, -1.5);
    c.region.hi = Vector::Constant(4, 1.5);
    out.push_back(std::move(c));
  }
  {
    SpaceFormChart c;
    c.g = sphere_chart_metric(3);
    c.name = c.g.name;
    c.K = 1.0;
    c.region.lo = Vector::Constant(3, -2.0);
    c.region.hi = Vector::Constant(3, 2.0);
    out.push_back(std::move(c));
  }
  {
    SpaceFormChart c;
    c.g = sphere_chart_metric(4);
    c.name = c.g.name;
    c.K = 1.0;
    c.region.lo = Vector::Constant(4, -1.5);
    c.region.hi = Vector::Constant(4, 1.5);
    out.push_back(std::move(c));
  }
  {
    SpaceFormChart c;
    c.g = halfspace_metric(4);
    c.name = c.g.name;
    c.K = -1.0;
    c.region.lo = Vector::Constant(4, -2.0);
    c.region.hi = Vector::Constant(4, 2.0);
    c.region.lo[3] = 0.2;
    c.region.hi[3] = 3.0;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace geomorph
