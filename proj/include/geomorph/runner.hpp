#pragma once

// Check suites behind the verification CLI. Every check samples points
// deterministically (seed + named stream), reports max/mean residuals and
// passes iff the max clears its gate.
//
// Detection checks (perturbation_detection, torsion_branch,
// killing_exponent_minus) invert the logic: a perturbed or deliberately
// wrong input must produce a residual ABOVE a floor. They report the
// relative shortfall max(0, 1 - observed/floor), so pass still means
// "residual below gate".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "geomorph/constructors.hpp"
#include "geomorph/foliation.hpp"
#include "geomorph/gallery.hpp"
#include "geomorph/kernel.hpp"
#include "geomorph/morphism.hpp"
#include "geomorph/report.hpp"
#include "geomorph/sampling.hpp"

namespace geomorph {

// Detection floors.
inline constexpr double kPerturbationFloor = 1e-3;
inline constexpr double kTorsionBranchFloor = 1e-10;
inline constexpr double kWrongExponentFloor = 1e-2;

// Pinned gates for checks whose accuracy is set by the construction
// rather than by the run's tolerance knobs.
inline constexpr double kTorsionIdentityGate = 1e-10;
inline constexpr double kRoundTripGate = 1e-10;
inline constexpr double kCorankAgreeGate = 1e-9;
inline constexpr double kQuotientPullbackGate = 1e-10;
inline constexpr double kJetFdGate = 1e-5;

namespace detail {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Accumulator {
  int n = 0;
  double max = 0.0;
  double sum = 0.0;
  Vector worst;
  void add(const Vector& p, double r) {
    ++n;
    sum += r;
    if (n == 1 || r > max) {
      max = r;
      worst = p;
    }
  }
};

inline ResidualReport finish(const std::string& check, const std::string& bundle,
                             const Accumulator& acc, double gate, std::uint64_t seed,
                             const Timer& t, bool extra_ok = true) {
  ResidualReport r;
  r.check = check;
  r.bundle = bundle;
  r.n_points = acc.n;
  r.max_residual = acc.max;
  r.mean_residual = acc.n > 0 ? acc.sum / acc.n : 0.0;
  r.worst_point.assign(acc.worst.data(), acc.worst.data() + acc.worst.size());
  r.pass = extra_ok && acc.max < gate;
  r.seed = seed;
  r.wall_time_ms = t.ms();
  return r;
}

inline SmoothMap perturb_first_component(const SmoothMap& phi, double eps) {
  SmoothMap out = phi;
  out.name = phi.name + "_perturbed";
  out.components = [inner = phi.components, eps](const JetVec& xs) {
    JetVec ys = inner(xs);
    ys[0] = ys[0] + eps * sin(xs[0]);
    return ys;
  };
  return out;
}

inline FoliationType to_foliation(ExpectedType e) {
  switch (e) {
    case ExpectedType::Type1: return FoliationType::Type1;
    case ExpectedType::Type2: return FoliationType::Type2;
    case ExpectedType::Both: return FoliationType::Both;
    case ExpectedType::NotApplicable: return FoliationType::Neither;
  }
  return FoliationType::Neither;
}

inline double morphism_point_residual(const MorphismResidual& r) {
  return std::max(r.tension_norm, r.degenerate ? 0.0 : r.hwc_defect);
}

inline void run_morphism(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  for (const MorphismBundle& b : standard_gallery()) {
    const std::vector<Vector> pts =
        sample_points(b.region, cfg.samples, cfg.seed, "morphism/" + b.name, cfg.margin);
    {
      Timer t;
      Accumulator acc;
      for (const Vector& x : pts)
        acc.add(x, morphism_point_residual(harmonic_morphism_residual(b.map, b.g, b.h, point(x))));
      out.push_back(finish("harmonic_morphism", b.name, acc, cfg.tolerance, cfg.seed, t));
    }
    {
      Timer t;
      const SmoothMap pm = perturb_first_component(b.map, 0.05);
      double observed = 0.0;
      Vector worst = pts.front();
      for (const Vector& x : pts) {
        const double v = morphism_point_residual(harmonic_morphism_residual(pm, b.g, b.h, point(x)));
        if (v > observed) {
          observed = v;
          worst = x;
        }
      }
      Accumulator acc;
      acc.add(worst, std::max(0.0, 1.0 - observed / kPerturbationFloor));
      acc.n = static_cast<int>(pts.size());
      out.push_back(finish("perturbation_detection", b.name, acc, cfg.tolerance, cfg.seed, t));
    }
    if (b.map.target_dim >= 3) {
      Timer t;
      Accumulator acc;
      for (const Vector& x : pts) {
        const Vector tau1 = tension_field(b.map, b.g, b.h, point(x));
        const Vector tau2 = tension_via_frames(b.map, b.g, b.h, point(x));
        const Matrix hv = metric_values(b.h, map_value(b.map, x));
        const Vector d = tau1 - tau2;
        acc.add(x, std::sqrt(std::max(0.0, d.dot(hv * d))));
      }
      out.push_back(finish("tension_routes", b.name, acc, cfg.fd_tolerance, cfg.seed, t));
    }
    if (b.minimal_fibers) {
      Timer t;
      Accumulator acc;
      const VectorField u = b.vertical ? *b.vertical : vertical_unit_field(b.map, b.g);
      for (const Vector& x : pts) acc.add(x, fiber_minimality_residual(u, b.g, point(x)));
      out.push_back(finish("fiber_minimality", b.name, acc, cfg.tolerance, cfg.seed, t));
    }
    if (b.constant_dilation) {
      Timer t;
      Accumulator acc;
      for (const Vector& x : pts)
        acc.add(x, std::abs(dilation(b.map, b.g, b.h, point(x)) - *b.constant_dilation));
      out.push_back(finish("dilation_spread", b.name, acc, cfg.tolerance, cfg.seed, t));
    }
  }
}

inline void run_classify(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  for (const MorphismBundle& b : standard_gallery()) {
    if (b.expected == ExpectedType::NotApplicable || b.map.target_dim < 3 || !b.curvature_K)
      continue;
    const std::vector<Vector> pts =
        sample_points(b.region, cfg.samples, cfg.seed, "classify/" + b.name, cfg.margin);
    Timer t;
    Accumulator acc;
    bool verdicts_ok = true;
    const VectorField u = b.vertical ? *b.vertical : vertical_unit_field(b.map, b.g);
    const FoliationType want = to_foliation(b.expected);
    for (const Vector& x : pts) {
      const TypeReport rep = classify_type(u, b.g, *b.curvature_K, point(x), cfg.fd_tolerance);
      double res = 0.0;
      switch (b.expected) {
        case ExpectedType::Type1: res = rep.type1_residual; break;
        case ExpectedType::Type2: res = rep.type2_residual; break;
        default: res = std::max(rep.type1_residual, rep.type2_residual); break;
      }
      if (rep.verdict != want) verdicts_ok = false;
      acc.add(x, res);
    }
    out.push_back(finish("classify", b.name, acc, cfg.fd_tolerance, cfg.seed, t, verdicts_ok));
  }
}

inline void run_curvature(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  for (const SpaceFormChart& c : space_form_charts()) {
    const std::vector<Vector> pts =
        sample_points(c.region, cfg.samples, cfg.seed, "curvature/" + c.name, cfg.margin);
    {
      Timer t;
      Accumulator acc;
      for (const Vector& x : pts) acc.add(x, space_form_residual(c.g, point(x), c.K));
      out.push_back(finish("space_form", c.name, acc, cfg.tolerance, cfg.seed, t));
    }
    {
      Timer t;
      Accumulator acc;
      const int d = c.g.dim;
      for (const Vector& x : pts) {
        const JetMatrix J = c.g.components(seed_point(x, 2));
        auto values_at = [&c](const Vector& y) { return c.g.components(seed_point(y, 1)).values(); };
        double worst = 0.0;
        for (int i = 0; i < d; ++i) {
          const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
          Vector xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          const Matrix fd = (values_at(xp) - values_at(xm)) / (2 * h);
          for (int a = 0; a < d; ++a)
            for (int bb = 0; bb < d; ++bb) {
              const double rel = std::abs(fd(a, bb) - J(a, bb).partial(i)) /
                                 std::max(1.0, std::abs(fd(a, bb)));
              worst = std::max(worst, rel);
            }
        }
        if (cfg.jet_order >= 2)
        for (int i = 0; i < d; ++i)
          for (int j = i; j < d; ++j) {
            const double hi = 1e-4 * std::max(1.0, std::abs(x[i]));
            const double hj = 1e-4 * std::max(1.0, std::abs(x[j]));
            Vector xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += hi;
            xpp[j] += hj;
            xpm[i] += hi;
            xpm[j] -= hj;
            xmp[i] -= hi;
            xmp[j] += hj;
            xmm[i] -= hi;
            xmm[j] -= hj;
            const Matrix fd =
                (values_at(xpp) - values_at(xpm) - values_at(xmp) + values_at(xmm)) / (4 * hi * hj);
            for (int a = 0; a < d; ++a)
              for (int bb = 0; bb < d; ++bb) {
                const double rel = std::abs(fd(a, bb) - J(a, bb).partial(i, j)) /
                                   std::max(1.0, std::abs(fd(a, bb)));
                worst = std::max(worst, rel);
              }
          }
        if (cfg.jet_order >= 3) {
          // third order: finite differences of exact second-order jet
          // coefficients at displaced points
          const JetMatrix J3 = c.g.components(seed_point(x, 3));
          for (int k = 0; k < d; ++k) {
            const double h = 1e-4 * std::max(1.0, std::abs(x[k]));
            Vector xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const JetMatrix Jp = c.g.components(seed_point(xp, 2));
            const JetMatrix Jm = c.g.components(seed_point(xm, 2));
            for (int i = 0; i < d; ++i)
              for (int j = i; j < d; ++j)
                for (int a = 0; a < d; ++a)
                  for (int bb = 0; bb < d; ++bb) {
                    const double fd = (Jp(a, bb).partial(i, j) - Jm(a, bb).partial(i, j)) / (2 * h);
                    const double rel = std::abs(fd - J3(a, bb).partial(i, j, k)) /
                                       std::max(1.0, std::abs(fd));
                    worst = std::max(worst, rel);
                  }
          }
        }
        acc.add(x, worst);
      }
      out.push_back(finish("jet_fd_agreement", c.name, acc, kJetFdGate, cfg.seed, t));
    }
  }
}

inline void run_torsion(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  {
    Timer t;
    Accumulator acc;
    SplitMix64 rng = stream_rng(cfg.seed, "torsion/identities");
    for (int k = 0; k < cfg.samples; ++k) {
      const int n = 3 + k % 3;
      Vector p(n);
      for (int i = 0; i < n; ++i) p[i] = rng.uniform(-1.0, 1.0);
      Matrix a = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          a(i, j) = rng.uniform(-1.0, 1.0);
          a(j, i) = -a(i, j);
        }
      const Tensor3 S = torsion_S(p, a, n);
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) worst = std::max(worst, std::abs(S(i, j, l) + S(i, l, j)));
      for (int l = 0; l < n; ++l) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += S(i, i, l);
        worst = std::max(worst, std::abs(tr));
      }
      // both branch loci must produce exactly zero torsion
      const Tensor3 Sp0 = torsion_S(Vector::Zero(n), a, n);
      const Tensor3 Sa0 = torsion_S(p, Matrix::Zero(n, n), n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            worst = std::max({worst, std::abs(Sp0(i, j, l)), std::abs(Sa0(i, j, l))});
      acc.add(p, worst);
    }
    out.push_back(finish("torsion_identities", "algebraic", acc, kTorsionIdentityGate, cfg.seed, t));
  }
  {
    Timer t;
    Accumulator acc;
    SplitMix64 rng = stream_rng(cfg.seed, "torsion/branch");
    for (int k = 0; k < cfg.samples; ++k) {
      const int n = 3 + k % 3;
      Vector p(n);
      do {
        for (int i = 0; i < n; ++i) p[i] = rng.uniform(-1.0, 1.0);
      } while (p.norm() < 0.2);
      Matrix a = Matrix::Zero(n, n);
      do {
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            a(i, j) = rng.uniform(-1.0, 1.0);
            a(j, i) = -a(i, j);
          }
      } while (a.norm() < 0.2);
      const Tensor3 S = torsion_S(p, a, n);
      double smax = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) smax = std::max(smax, std::abs(S(i, j, l)));
      acc.add(p, std::max(0.0, 1.0 - smax / kTorsionBranchFloor));
    }
    out.push_back(finish("torsion_branch", "algebraic", acc, cfg.tolerance, cfg.seed, t));
  }
}

// Extract (r, ψ) from a fibered bundle numerically and rebuild the metric:
// r is the dilation of the projection, ψ = r^{2-n} ω₀ with ω₀ the unit
// dual of the supplied vertical field.
inline MetricField roundtrip_rebuild(const MorphismBundle& b) {
  if (!b.vertical) throw PreconditionError("roundtrip_rebuild needs a closed-form vertical field");
  const int n = b.map.target_dim;
  const int m = n + 1;
  auto dilation_jet = [phi = b.map, g = b.g, h = b.h, n, m](const JetVec& xs_hi) -> Jet {
    const int order = xs_hi[0].order() - 1;
    const JetVec y_hi = phi.components(xs_hi);
    JetVec xs;
    xs.reserve(static_cast<std::size_t>(m));
    for (const Jet& j : xs_hi) xs.push_back(j.truncated(order));
    JetMatrix F(n, m);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) F(i, a) = y_hi[static_cast<std::size_t>(i)].derivative(a);
    const JetMatrix W = jet_matrix_inverse(g.components(xs));
    JetVec q;
    q.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) q.push_back(y_hi[static_cast<std::size_t>(i)].truncated(order));
    const JetMatrix H = h.components(q);
    JetMatrix Ft(m, n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) Ft(a, i) = F(i, a);
    const JetMatrix M = F * W * Ft * H;
    Jet R = M(0, 0);
    for (int i = 1; i < n; ++i) R += M(i, i);
    return sqrt(R / static_cast<double>(n));
  };
  ScalarField rfield = make_reseeded_scalar_field(m, "extracted_scale", 1, dilation_jet);
  auto psi_fn = [u = *b.vertical, g = b.g, dilation_jet, n, m](const JetVec& xs_hi) -> JetVec {
    const int order = xs_hi[0].order() - 1;
    JetVec xs;
    xs.reserve(static_cast<std::size_t>(m));
    for (const Jet& j : xs_hi) xs.push_back(j.truncated(order));
    const JetVec uj = u.components(xs);
    const JetMatrix G = g.components(xs);
    JetVec w;
    w.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      Jet s = G(a, 0) * uj[0];
      for (int bb = 1; bb < m; ++bb) s += G(a, bb) * uj[static_cast<std::size_t>(bb)];
      w.push_back(s);
    }
    Jet n2 = w[0] * uj[0];
    for (int a = 1; a < m; ++a) n2 += w[static_cast<std::size_t>(a)] * uj[static_cast<std::size_t>(a)];
    const Jet inv = 1.0 / sqrt(n2);
    const Jet fac = pow(dilation_jet(xs_hi), 2.0 - n) * inv;
    for (Jet& c : w) c = c * fac;
    return w;
  };
  OneFormField psi = make_reseeded_oneform_field(m, "extracted_connection", 1, psi_fn);
  return assemble_normal_form(b.h, psi, rfield, n, "roundtrip(" + b.name + ")");
}

inline void run_theorem1(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  SampleRegion box;
  box.lo = Vector::Constant(4, -1.0);
  box.hi = Vector::Constant(4, 1.0);

  for (int k = 0; k < 20; ++k) {
    char nb[32];
    std::snprintf(nb, sizeof nb, "normal_form_s%02d", k);
    const NormalFormData data = random_normal_form_data(static_cast<std::uint64_t>(k));
    const NormalFormBundle nf = build_metric_corank1(data);
    const std::vector<Vector> pts =
        sample_points(box, cfg.samples, cfg.seed, std::string("theorem1/") + nb, cfg.margin);
    Timer t;
    Accumulator acc;
    for (const Vector& x : pts) {
      const MorphismResidual r = harmonic_morphism_residual(nf.projection, nf.g, nf.h, point(x));
      const double rbuilt = data.r.components(seed_point(x, 1)).value();
      double res = std::max(r.tension_norm, r.hwc_defect);
      res = std::max(res, std::abs(std::sqrt(std::max(0.0, r.conformal_factor)) - rbuilt));
      acc.add(x, res);
    }
    out.push_back(finish("theorem1_random", nb, acc, cfg.tolerance, cfg.seed, t));
  }

  {
    const MorphismBundle hp = halfspace_projection(3);
    Timer t;
    Accumulator acc;
    const MetricField rebuilt = roundtrip_rebuild(hp);
    const std::vector<Vector> pts =
        sample_points(hp.region, cfg.samples, cfg.seed, "theorem1/roundtrip", cfg.margin);
    for (const Vector& x : pts) {
      const Matrix a = hp.g.components(seed_point(x, 1)).values();
      const Matrix bb = rebuilt.components(seed_point(x, 1)).values();
      acc.add(x, (a - bb).cwiseAbs().maxCoeff());
    }
    out.push_back(finish("theorem1_roundtrip", hp.name, acc, kRoundTripGate, cfg.seed, t));
  }

  {
    const NormalFormData data = random_normal_form_data(7);
    const NormalFormBundle b1 = build_metric_corank1(data);
    CorankPData cp;
    cp.n = 3;
    cp.p = 1;
    cp.h = data.h;
    cp.R.dim = 4;
    cp.R.name = "scale_squared";
    cp.R.components = [r = data.r](const JetVec& xs) {
      const Jet v = r.components(xs);
      return v * v;
    };
    cp.P = [psi0 = data.psi0](const JetVec& xs) {
      const JetVec xh(xs.begin(), xs.begin() + 3);
      const JetVec row = psi0.components(xh);
      JetMatrix P(1, 3);
      for (int i = 0; i < 3; ++i) P(0, i) = row[static_cast<std::size_t>(i)];
      return P;
    };
    cp.g_fiber = [](const JetVec& xs) {
      JetMatrix m(1, 1);
      m(0, 0) = Jet::constant(1.0, xs[0].dim(), xs[0].order());
      return m;
    };
    const std::vector<Vector> pts =
        sample_points(box, cfg.samples, cfg.seed, "theorem1/corank_p", cfg.margin);
    const std::vector<Vector> probes(pts.begin(),
                                     pts.begin() + std::min<std::size_t>(8, pts.size()));
    {
      Timer t;
      Accumulator acc;
      const CorankPBundle bp = build_metric_corank_p(cp, probes);
      for (const Vector& x : pts) {
        const Matrix a = b1.g.components(seed_point(x, 1)).values();
        const Matrix bb = bp.g.components(seed_point(x, 1)).values();
        acc.add(x, (a - bb).cwiseAbs().maxCoeff());
      }
      out.push_back(finish("corank_p_agree", "normal_form_s07", acc, kCorankAgreeGate, cfg.seed, t));
    }
    {
      Timer t;
      double bad = 0.0;
      CorankPData bad_fiber = cp;
      bad_fiber.g_fiber = [](const JetVec& xs) {
        JetMatrix m(1, 1);
        m(0, 0) = exp(0.2 + 0.1 * xs[0]);
        return m;
      };
      try {
        build_metric_corank_p(bad_fiber, probes);
        bad += 1.0;
      } catch (const ValidationError& e) {
        if (std::string(e.what()).find("unimodular") == std::string::npos) bad += 1.0;
      }
      CorankPData bad_conn = cp;
      bad_conn.P = [base = cp.P](const JetVec& xs) {
        JetMatrix P = base(xs);
        P(0, 0) = P(0, 0) + 0.3 * xs[3];
        return P;
      };
      try {
        build_metric_corank_p(bad_conn, probes);
        bad += 1.0;
      } catch (const ValidationError& e) {
        if (std::string(e.what()).find("divergence") == std::string::npos) bad += 1.0;
      }
      Accumulator acc;
      acc.add(Vector(), bad);
      acc.n = 2;
      out.push_back(finish("corank_p_reject", "normal_form_s07", acc, cfg.tolerance, cfg.seed, t));
    }
  }

  {
    Timer t;
    Accumulator acc;
    const int per = std::max(1, cfg.samples / 20);
    for (int k = 0; k < 10; ++k) {
      const NormalFormBundle nf = build_metric_corank1(random_normal_form_data(100 + k));
      const std::vector<Vector> pts = sample_points(
          box, per, cfg.seed, "theorem1/routes_s" + std::to_string(100 + k), cfg.margin);
      for (const Vector& x : pts) {
        const Vector tau1 = tension_field(nf.projection, nf.g, nf.h, point(x));
        const Vector tau2 = tension_via_frames(nf.projection, nf.g, nf.h, point(x));
        const Matrix hv = metric_values(nf.h, map_value(nf.projection, x));
        const Vector d = tau1 - tau2;
        acc.add(x, std::sqrt(std::max(0.0, d.dot(hv * d))));
      }
    }
    out.push_back(finish("theorem1_routes", "normal_form_batch", acc, cfg.fd_tolerance, cfg.seed, t));
  }
}

inline void run_killing(const CheckConfig& cfg, std::vector<ResidualReport>& out) {
  for (const KillingEntry& e : killing_fields_catalog()) {
    const std::vector<Vector> pts =
        sample_points(e.region, cfg.samples, cfg.seed, "killing/" + e.name, cfg.margin);
    {
      Timer t;
      Accumulator acc;
      for (const Vector& x : pts) acc.add(x, killing_residual(e.X, e.g, point(x)));
      out.push_back(finish("killing_residual", e.name, acc, cfg.tolerance, cfg.seed, t));
    }
    if (e.g.dim >= 4) {
      const VectorField u = unit_field(e.X, e.g);
      const int n = e.g.dim - 1;
      auto log_norm = [X = e.X, g = e.g](const Vector& x) {
        const JetVec xj = X.components(seed_point(x, 1));
        Vector v(g.dim);
        for (int a = 0; a < g.dim; ++a) v[a] = xj[static_cast<std::size_t>(a)].value();
        const Matrix gv = metric_values(g, x);
        return 0.5 * std::log(v.dot(gv * v));
      };
      {
        Timer t;
        Accumulator acc;
        for (const Vector& x : pts)
          acc.add(x, frame_harmonicity_residual(
                         u, e.g, [&](const Vector& y) { return log_norm(y) / (n - 2); }, point(x)));
        out.push_back(finish("killing_exponent_plus", e.name, acc, cfg.tolerance, cfg.seed, t));
      }
      {
        Timer t;
        Accumulator acc;
        for (const Vector& x : pts) {
          const double obs = frame_harmonicity_residual(
              u, e.g, [&](const Vector& y) { return -log_norm(y) / (n - 2); }, point(x));
          acc.add(x, std::max(0.0, 1.0 - obs / kWrongExponentFloor));
        }
        out.push_back(finish("killing_exponent_minus", e.name, acc, cfg.tolerance, cfg.seed, t));
      }
    }
  }
  {
    const MorphismBundle qb = quadratic_r4_r3();
    Timer t;
    Accumulator acc;
    const std::vector<Vector> pts =
        sample_points(qb.region, cfg.samples, cfg.seed, "killing/quotient_pullback", cfg.margin);
    for (const Vector& x : pts) {
      const KillingQuotient q = killing_quotient_scale(*qb.killing, qb.g, point(x));
      const Matrix pb = pullback_metric(qb.map, qb.h, point(x));
      acc.add(x, (q.quotient_metric - pb).cwiseAbs().maxCoeff());
    }
    out.push_back(finish("quotient_pullback", qb.name, acc, kQuotientPullbackGate, cfg.seed, t));
  }
}

}  // namespace detail

inline const std::vector<std::string>& canonical_suites() {
  static const std::vector<std::string> s{"morphism", "classify", "curvature",
                                          "torsion",  "theorem1", "killing"};
  return s;
}

inline std::vector<std::string> resolve_suites(const std::vector<std::string>& requested) {
  const std::vector<std::string>& canon = canonical_suites();
  for (const std::string& r : requested) {
    if (r == "all") continue;
    if (std::find(canon.begin(), canon.end(), r) == canon.end()) {
      std::string msg = "unknown suite '" + r + "'; valid suites: all";
      for (const std::string& c : canon) msg += ", " + c;
      throw UsageError(msg);
    }
  }
  const bool all =
      requested.empty() || std::find(requested.begin(), requested.end(), "all") != requested.end();
  std::vector<std::string> out;
  for (const std::string& c : canon)
    if (all || std::find(requested.begin(), requested.end(), c) != requested.end())
      out.push_back(c);
  return out;
}

inline std::vector<ResidualReport> run_checks(const CheckConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> suites = resolve_suites(cfg.suites);
  std::vector<ResidualReport> out;
  for (const std::string& s : suites) {
    const std::size_t begin = out.size();
    if (s == "morphism") detail::run_morphism(cfg, out);
    else if (s == "classify") detail::run_classify(cfg, out);
    else if (s == "curvature") detail::run_curvature(cfg, out);
    else if (s == "torsion") detail::run_torsion(cfg, out);
    else if (s == "theorem1") detail::run_theorem1(cfg, out);
    else if (s == "killing") detail::run_killing(cfg, out);
    std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end(),
                     [](const ResidualReport& a, const ResidualReport& b) {
                       return std::tie(a.bundle, a.check) < std::tie(b.bundle, b.check);
                     });
  }
  return out;
}

}  // namespace geomorph
