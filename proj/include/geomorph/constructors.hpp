#pragma once

// Constructors for bundle metrics whose coordinate projection is a
// harmonic morphism by design.
//
// Corank 1: on a chart (x_1..x_n, t),
//     g = r^{-2} π*(h) + r^{2n-4} ψ ∘ ψ,       ψ = dt + ψ₀(x),
// with h a metric on the x-chart, ψ₀ a 1-form on the x-chart and r any
// positive scale on the whole chart. The projection (x, t) ↦ x is then a
// harmonic morphism with dilation r.
//
// Corank p: on (x_1..x_n, x_{n+1}..x_{n+p}),
//     g = R^{-p} h_ij dx_i∘dx_j + R^{n-2} gF_αβ (dx_α + P_αi dx_i)∘(dx_β + P_βj dx_j)
// subject to det(gF) = 1 and Σ_α ∂P_αi/∂x_α = 0. For p = 1 and gF = (1)
// this reduces to the corank-1 form with r = R^{1/2}, ψ₀ = P.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geomorph/errors.hpp"
#include "geomorph/fields.hpp"
#include "geomorph/foliation.hpp"
#include "geomorph/kernel.hpp"
#include "geomorph/sampling.hpp"

namespace geomorph {

struct NormalFormData {
  int n = 0;          // horizontal dimension (>= 3)
  MetricField h;      // metric on the n-chart
  OneFormField psi0;  // connection 1-form on the n-chart
  ScalarField r;      // positive scale on the (n+1)-chart
};

struct NormalFormBundle {
  MetricField g;
  SmoothMap projection;
  MetricField h;
};

namespace detail {

inline SmoothMap coordinate_projection(int m, int n, const std::string& name) {
  SmoothMap phi;
  phi.domain_dim = m;
  phi.target_dim = n;
  phi.name = name;
  phi.components = [n](const JetVec& xs) {
    JetVec ys(xs.begin(), xs.begin() + n);
    return ys;
  };
  return phi;
}

}  // namespace detail

// Assemble g = r^{-2} π*(h) + r^{2n-4} ψ ∘ ψ for an arbitrary connection
// form ψ on the total chart. Used by build_metric_corank1 (ψ = dt + ψ₀)
// and by round-trip rebuilds where ψ was extracted numerically.
inline MetricField assemble_normal_form(const MetricField& h, const OneFormField& psi_full,
                                        const ScalarField& r, int n, const std::string& name) {
  const int m = n + 1;
  if (n < 3) throw DimensionError("normal form requires horizontal dimension >= 3");
  if (h.dim != n) throw DimensionError("normal form: h must live on the n-chart");
  if (psi_full.dim != m) throw DimensionError("normal form: ψ must live on the (n+1)-chart");
  if (r.dim != m) throw DimensionError("normal form: r must live on the (n+1)-chart");
  MetricField g;
  g.dim = m;
  g.name = name;
  g.components = [h, psi_full, r, n, m](const JetVec& xs) {
    const JetVec xh(xs.begin(), xs.begin() + n);
    const JetMatrix H = h.components(xh);
    const JetVec psi = psi_full.components(xs);
    const Jet rv = r.components(xs);
    if (rv.value() <= 0.0) throw DomainError("normal-form scale r must be positive at evaluation point");
    const Jet horiz = pow(rv, -2.0);
    const Jet fiber = pow(rv, 2.0 * n - 4.0);
    JetMatrix out(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        Jet v = fiber * psi[static_cast<std::size_t>(a)] * psi[static_cast<std::size_t>(b)];
        if (a < n && b < n) v += horiz * H(a, b);
        out(a, b) = v;
      }
    return out;
  };
  return g;
}

inline NormalFormBundle build_metric_corank1(const NormalFormData& data) {
  const int n = data.n;
  if (n < 3) throw DimensionError("build_metric_corank1 requires n >= 3");
  if (static_cast<std::size_t>(n) + 1 > kMaxJetDim)
    throw DimensionError("build_metric_corank1: chart dimension exceeds jet limit");
  if (data.h.dim != n || data.psi0.dim != n) throw DimensionError("build_metric_corank1: h and ψ₀ must live on the n-chart");
  if (data.r.dim != n + 1) throw DimensionError("build_metric_corank1: r must live on the (n+1)-chart");
  OneFormField psi_full;
  psi_full.dim = n + 1;
  psi_full.name = "psi(" + data.psi0.name + ")";
  psi_full.components = [psi0 = data.psi0, n](const JetVec& xs) {
    const JetVec xh(xs.begin(), xs.begin() + n);
    JetVec psi = psi0.components(xh);
    const Jet one = Jet::constant(1.0, xs[0].dim(), xs[0].order());
    psi.push_back(one);
    return psi;
  };
  NormalFormBundle out;
  out.g = assemble_normal_form(data.h, psi_full, data.r, n, "normal_form(" + data.h.name + ")");
  out.projection = detail::coordinate_projection(n + 1, n, "bundle_projection");
  out.h = data.h;
  return out;
}

struct CorankPData {
  int n = 0;  // horizontal dimension
  int p = 0;  // fiber dimension
  MetricField h;  // metric on the n-chart, functions of x_1..x_n only
  ScalarField R;  // positive scale on the (n+p)-chart
  // P_αi: p x n matrix of connection coefficients on the (n+p)-chart,
  // divergence free in the fiber directions: Σ_α ∂P_αi/∂x_{n+α} = 0.
  std::function<JetMatrix(const JetVec&)> P;
  // Fiber metric gF_αβ, unimodular: det(gF) = 1.
  std::function<JetMatrix(const JetVec&)> g_fiber;
};

struct CorankPBundle {
  MetricField g;
  SmoothMap projection;
  MetricField h;
};

// Build the corank-p metric, validating the unimodularity and
// divergence-free constraints at the supplied probe points.
inline CorankPBundle build_metric_corank_p(const CorankPData& data,
                                           const std::vector<Vector>& probe_points) {
  const int n = data.n;
  const int p = data.p;
  const int m = n + p;
  if (n < 3) throw DimensionError("build_metric_corank_p requires n >= 3");
  if (p < 1) throw DimensionError("build_metric_corank_p requires p >= 1");
  if (m > kMaxJetDim) throw DimensionError("build_metric_corank_p: chart dimension exceeds jet limit");
  if (data.h.dim != n) throw DimensionError("build_metric_corank_p: h must live on the n-chart");
  if (data.R.dim != m) throw DimensionError("build_metric_corank_p: R must live on the (n+p)-chart");
  if (probe_points.empty()) throw ConfigError("build_metric_corank_p needs at least one probe point");

  double worst_det = 0.0, worst_div = 0.0;
  Vector worst_det_pt, worst_div_pt;
  for (const Vector& x : probe_points) {
    if (static_cast<int>(x.size()) != m) throw ShapeError("corank-p probe point has wrong dimension");
    const JetVec xs = seed_point(x, 1);
    const JetMatrix gf = data.g_fiber(xs);
    if (gf.rows() != p || gf.cols() != p) throw ShapeError("g_fiber must be a p x p matrix");
    const double det_gap = std::abs(detail::jet_det(gf).value() - 1.0);
    if (det_gap > worst_det) {
      worst_det = det_gap;
      worst_det_pt = x;
    }
    const JetMatrix P = data.P(xs);
    if (P.rows() != p || P.cols() != n) throw ShapeError("P must be a p x n matrix");
    for (int i = 0; i < n; ++i) {
      double div = 0.0;
      for (int a = 0; a < p; ++a) div += P(a, i).partial(n + a);
      if (std::abs(div) > worst_div) {
        worst_div = std::abs(div);
        worst_div_pt = x;
      }
    }
  }
  auto format_point = [](const Vector& x) {
    std::string s = "(";
    for (int i = 0; i < x.size(); ++i) s += (i ? ", " : "") + std::to_string(x[i]);
    return s + ")";
  };
  if (worst_det > 1e-10)
    throw ValidationError("corank-p constraint violated: fiber metric is not unimodular (det gap " +
                          std::to_string(worst_det) + " at " + format_point(worst_det_pt) + ")");
  if (worst_div > 1e-8)
    throw ValidationError("corank-p constraint violated: connection P is not divergence free (worst " +
                          std::to_string(worst_div) + " at " + format_point(worst_div_pt) + ")");

  MetricField g;
  g.dim = m;
  g.name = "corank_p_form(" + data.h.name + ")";
  g.components = [data, n, p, m](const JetVec& xs) {
    const JetVec xh(xs.begin(), xs.begin() + n);
    const JetMatrix H = data.h.components(xh);
    const JetMatrix gf = data.g_fiber(xs);
    const JetMatrix P = data.P(xs);
    const Jet Rv = data.R.components(xs);
    if (Rv.value() <= 0.0) throw DomainError("corank-p scale R must be positive at evaluation point");
    const Jet horiz = pow(Rv, -static_cast<double>(p));
    const Jet fiber = pow(Rv, static_cast<double>(n - 2));
    JetMatrix out(m, m);
    // Horizontal block.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet v = horiz * H(i, j);
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) v += fiber * gf(a, b) * P(a, i) * P(b, j);
        out(i, j) = v;
      }
    // Cross block.
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a) {
        Jet v;
        for (int b = 0; b < p; ++b) {
          const Jet t = fiber * gf(a, b) * P(b, i);
          v = v.valid() ? v + t : t;
        }
        out(n + a, i) = v;
        out(i, n + a) = v;
      }
    // Fiber block.
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) out(n + a, n + b) = fiber * gf(a, b);
    return out;
  };

  CorankPBundle out;
  out.g = std::move(g);
  out.projection = detail::coordinate_projection(m, n, "bundle_projection");
  out.h = data.h;
  return out;
}

struct KillingQuotient {
  double r = 0.0;          // |X|^{1/(n-2)}
  Matrix quotient_metric;  // r² (g - ω̂₀ ∘ ω̂₀); the local pullback of the quotient metric
};

// Scale and quotient metric induced by a nonvanishing Killing field whose
// orbits are the fibers. Verifies the Killing property on a small
// neighborhood sample before trusting the formula.
inline KillingQuotient killing_quotient_scale(const VectorField& X, const MetricField& g,
                                              const Point& p) {
  if (X.dim != g.dim) throw DimensionError("killing_quotient_scale: chart mismatch");
  const int d = g.dim;
  const int n = d - 1;
  if (n < 3) throw DimensionError("killing_quotient_scale requires horizontal dimension >= 3");
  const JetVec xj = jet_evaluate(X, p, 1);
  Vector Xv(d);
  for (int a = 0; a < d; ++a) Xv[a] = xj[static_cast<std::size_t>(a)].value();
  const Matrix gv = metric_values(g, p.coords);
  const double norm = std::sqrt(std::max(0.0, Xv.dot(gv * Xv)));
  if (norm < 1e-10) throw ZeroLocusError("killing_quotient_scale: field vanishes at the point");
  std::vector<Vector> probes{p.coords};
  for (int a = 0; a < d; ++a) {
    for (double sgn : {-1.0, 1.0}) {
      Vector x = p.coords;
      x[a] += sgn * 0.01;
      if (g.domain_ok(x, 0.0) && X.domain_ok(x, 0.0)) probes.push_back(std::move(x));
    }
  }
  for (const Vector& x : probes)
    if (killing_residual(X, g, point(x, p.chart_id)) > 1e-8)
      throw PreconditionError("killing_quotient_scale: field is not Killing near the point");
  KillingQuotient out;
  out.r = std::pow(norm, 1.0 / (n - 2));
  const Vector omega = (gv * Xv) / norm;
  out.quotient_metric = (out.r * out.r) * (gv - omega * omega.transpose());
  return out;
}

// Seeded random normal-form data: h = flat + trig/quadratic perturbation,
// ψ₀ a polynomial 1-form, r = exp of a small quadratic. Coefficients are
// uniform in [-0.3, 0.3]; the perturbation sizes keep h positive definite
// on [-1, 1]^n.
inline NormalFormData random_normal_form_data(std::uint64_t seed, int n = 3) {
  if (n < 3 || n + 1 > kMaxJetDim) throw DimensionError("random_normal_form_data requires 3 <= n <= 7");
  SplitMix64 rng = stream_rng(seed, "normal_form_instance");
  auto coeff = [&rng] { return rng.uniform(-0.3, 0.3); };
  auto index = [&rng, n] { return static_cast<int>(rng.next() % static_cast<std::uint64_t>(n)); };

  struct Entry {
    double c1, c2, c3;
    int u, v, w, z;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) entries.push_back({coeff(), coeff(), coeff(), index(), index(), index(), index()});

  MetricField h;
  h.dim = n;
  h.name = "random_h";
  h.components = [entries, n](const JetVec& xs) {
    JetMatrix H(n, n);
    const Jet one = Jet::constant(1.0, xs[0].dim(), xs[0].order());
    std::size_t e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++e) {
        const Entry& en = entries[e];
        Jet v = en.c1 * sin(xs[static_cast<std::size_t>(en.u)]) +
                en.c2 * cos(xs[static_cast<std::size_t>(en.v)]) +
                en.c3 * xs[static_cast<std::size_t>(en.w)] * xs[static_cast<std::size_t>(en.z)];
        v = 0.1 * v;
        if (i == j) v += one;
        H(i, j) = v;
        H(j, i) = v;
      }
    return H;
  };

  struct FormEntry {
    double c0, c1, c2;
    int a, b, c;
  };
  std::vector<FormEntry> form;
  for (int i = 0; i < n; ++i) form.push_back({coeff(), coeff(), coeff(), index(), index(), index()});
  OneFormField psi0;
  psi0.dim = n;
  psi0.name = "random_psi0";
  psi0.components = [form, n](const JetVec& xs) {
    JetVec out;
    out.reserve(static_cast<std::size_t>(n));
    for (const FormEntry& f : form)
      out.push_back(Jet::constant(f.c0, xs[0].dim(), xs[0].order()) +
                    f.c1 * xs[static_cast<std::size_t>(f.a)] +
                    f.c2 * xs[static_cast<std::size_t>(f.b)] * xs[static_cast<std::size_t>(f.c)]);
    return out;
  };

  const int m = n + 1;
  std::vector<double> lin;
  for (int a = 0; a < m; ++a) lin.push_back(coeff());
  std::vector<double> quad;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) quad.push_back(coeff());
  const double q0 = coeff();
  ScalarField r;
  r.dim = m;
  r.name = "random_r";
  r.components = [lin, quad, q0, m](const JetVec& xs) {
    Jet q = Jet::constant(q0, xs[0].dim(), xs[0].order());
    for (int a = 0; a < m; ++a) q += lin[static_cast<std::size_t>(a)] * xs[static_cast<std::size_t>(a)];
    std::size_t e = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b, ++e)
        q += quad[e] * xs[static_cast<std::size_t>(a)] * xs[static_cast<std::size_t>(b)];
    return exp(0.2 * q);
  };

  NormalFormData out;
  out.n = n;
  out.h = std::move(h);
  out.psi0 = std::move(psi0);
  out.r = std::move(r);
  return out;
}

}  // namespace geomorph
