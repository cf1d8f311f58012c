#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "geomorph/geomorph.hpp"

namespace geomorph {
namespace {

Point pt4(double a, double b, double c, double d) {
  return point((Vector(4) << a, b, c, d).finished());
}

OneFormField zero_form(int dim, const std::string& name) {
  OneFormField z;
  z.dim = dim;
  z.name = name;
  z.components = [dim](const JetVec& xs) {
    return JetVec(static_cast<std::size_t>(dim),
                  Jet::constant(0.0, xs[0].dim(), xs[0].order()));
  };
  return z;
}

ScalarField unit_scale(int dim) {
  ScalarField r;
  r.dim = dim;
  r.name = "unit_scale";
  r.components = [](const JetVec& xs) { return Jet::constant(1.0, xs[0].dim(), xs[0].order()); };
  return r;
}

TEST(Constructors, TrivialDataAssemblesFlatMetric) {
  NormalFormData data;
  data.n = 3;
  data.h = flat_metric(3);
  data.psi0 = zero_form(3, "zero");
  data.r = unit_scale(4);
  const NormalFormBundle b = build_metric_corank1(data);
  const Point p = pt4(0.3, -0.8, 0.2, 1.4);
  EXPECT_LT((metric_values(b.g, p.coords) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
  const MorphismResidual res = harmonic_morphism_residual(b.projection, b.g, b.h, p);
  EXPECT_LT(res.tension_norm, 1e-13);
  EXPECT_LT(res.hwc_defect, 1e-13);
}

TEST(Constructors, ConstantConnectionFormEntersFiberRow) {
  // With r = 1, h flat and ψ₀ = c dx₀ the metric is I₃ ⊕ 0 + ψψᵀ.
  const double c = 0.4;
  NormalFormData data;
  data.n = 3;
  data.h = flat_metric(3);
  OneFormField psi0;
  psi0.dim = 3;
  psi0.name = "c_dx0";
  psi0.components = [c](const JetVec& xs) {
    const Jet zero = Jet::constant(0.0, xs[0].dim(), xs[0].order());
    return JetVec{zero + c, zero, zero};
  };
  data.psi0 = psi0;
  data.r = unit_scale(4);
  const Matrix gv = metric_values(build_metric_corank1(data).g, pt4(0.1, 0.2, 0.3, 0.4).coords);
  EXPECT_NEAR(gv(0, 0), 1.0 + c * c, 1e-14);
  EXPECT_NEAR(gv(0, 3), c, 1e-14);
  EXPECT_NEAR(gv(3, 0), c, 1e-14);
  EXPECT_NEAR(gv(3, 3), 1.0, 1e-14);
  EXPECT_NEAR(gv(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(gv(1, 3), 0.0, 1e-14);
}

TEST(Constructors, SeededInstancesAreHarmonicMorphisms) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const NormalFormBundle b = build_metric_corank1(random_normal_form_data(seed));
    SampleRegion box;
    box.lo = Vector::Constant(4, -1.0);
    box.hi = Vector::Constant(4, 1.0);
    for (const Vector& x : sample_points(box, 4, seed, "test/seeded_normal_form", 0.05)) {
      const MorphismResidual res = harmonic_morphism_residual(b.projection, b.g, b.h, point(x));
      EXPECT_LT(res.tension_norm, 1e-12) << "seed " << seed;
      EXPECT_LT(res.hwc_defect, 1e-12) << "seed " << seed;
      EXPECT_FALSE(res.degenerate);
    }
  }
}

TEST(Constructors, DimensionGuards) {
  NormalFormData data;
  data.n = 2;
  data.h = flat_metric(2);
  data.psi0 = zero_form(2, "zero");
  data.r = unit_scale(3);
  EXPECT_THROW(build_metric_corank1(data), DimensionError);

  data.n = 3;
  data.h = flat_metric(3);
  data.psi0 = zero_form(3, "zero");
  data.r = unit_scale(3);  // must live on the 4-chart
  EXPECT_THROW(build_metric_corank1(data), DimensionError);
}

TEST(Constructors, NegativeScaleIsRejectedAtEvaluation) {
  NormalFormData data;
  data.n = 3;
  data.h = flat_metric(3);
  data.psi0 = zero_form(3, "zero");
  ScalarField r;
  r.dim = 4;
  r.name = "linear_scale";
  r.components = [](const JetVec& xs) { return xs[0]; };  // vanishes at x0 = 0
  data.r = r;
  const NormalFormBundle b = build_metric_corank1(data);
  EXPECT_THROW(metric_values(b.g, pt4(-0.5, 0, 0, 0).coords), DomainError);
  EXPECT_NO_THROW(metric_values(b.g, pt4(0.5, 0, 0, 0).coords));
}

CorankPData corank_one_data(std::uint64_t seed) {
  const NormalFormData nf = random_normal_form_data(seed);
  CorankPData data;
  data.n = nf.n;
  data.p = 1;
  data.h = nf.h;
  ScalarField R;
  R.dim = nf.n + 1;
  R.name = "R(" + nf.r.name + ")";
  R.components = [r = nf.r](const JetVec& xs) {
    const Jet rv = r.components(xs);
    return rv * rv;
  };
  data.R = R;
  data.P = [psi0 = nf.psi0, n = nf.n](const JetVec& xs) {
    const JetVec xh(xs.begin(), xs.begin() + n);
    const JetVec row = psi0.components(xh);
    JetMatrix P(1, n);
    for (int i = 0; i < n; ++i) P(0, i) = row[static_cast<std::size_t>(i)];
    return P;
  };
  data.g_fiber = [](const JetVec& xs) {
    JetMatrix gf(1, 1);
    gf(0, 0) = Jet::constant(1.0, xs[0].dim(), xs[0].order());
    return gf;
  };
  return data;
}

TEST(Constructors, CorankOneSpecializationMatchesNormalForm) {
  const std::uint64_t seed = 7;
  const NormalFormBundle nf = build_metric_corank1(random_normal_form_data(seed));
  SampleRegion box;
  box.lo = Vector::Constant(4, -1.0);
  box.hi = Vector::Constant(4, 1.0);
  const auto probes = sample_points(box, 5, seed, "test/corank_probes", 0.05);
  const CorankPBundle cp = build_metric_corank_p(corank_one_data(seed), probes);
  for (const Vector& x : probes) {
    const Matrix a = metric_values(nf.g, x);
    const Matrix b = metric_values(cp.g, x);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Constructors, CorankValidationRejectsBadData) {
  SampleRegion box;
  box.lo = Vector::Constant(4, -1.0);
  box.hi = Vector::Constant(4, 1.0);
  const auto probes = sample_points(box, 4, 3, "test/corank_reject", 0.05);

  CorankPData bad_det = corank_one_data(7);
  bad_det.g_fiber = [](const JetVec& xs) {
    JetMatrix gf(1, 1);
    gf(0, 0) = exp(Jet::constant(0.2, xs[0].dim(), xs[0].order()) + 0.1 * xs[0]);
    return gf;
  };
  try {
    build_metric_corank_p(bad_det, probes);
    FAIL() << "non-unimodular fiber metric was accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unimodular"), std::string::npos) << e.what();
  }

  CorankPData bad_div = corank_one_data(7);
  bad_div.P = [inner = bad_div.P](const JetVec& xs) {
    JetMatrix P = inner(xs);
    P(0, 0) += 0.3 * xs[3];  // fiber-coordinate dependence breaks the constraint
    return P;
  };
  try {
    build_metric_corank_p(bad_div, probes);
    FAIL() << "fiber-divergent connection was accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("divergence"), std::string::npos) << e.what();
  }
}

TEST(Constructors, KillingQuotientScrewHandValue) {
  // Screw field X = ∂_0 + rotation in the (1,2)-plane: at (0,1,0,0),
  // |X|² = 2 and the fiber dilation is |X|^{1/(n-2)} = √2 for n = 3.
  VectorField X;
  X.dim = 4;
  X.name = "screw";
  X.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{Jet::constant(1.0, 4, order), -xs[2], xs[1], Jet::constant(0.0, 4, order)};
  };
  const KillingQuotient q = killing_quotient_scale(X, flat_metric(4), pt4(0.0, 1.0, 0.0, 0.0));
  EXPECT_NEAR(q.r, std::sqrt(2.0), 1e-12);
}

TEST(Constructors, QuotientMetricEqualsPullbackForQuadraticBundle) {
  const MorphismBundle b = quadratic_r4_r3();
  for (const Vector& x : sample_points(b.region, 5, 13, "test/quotient_pullback", 0.1)) {
    const KillingQuotient q = killing_quotient_scale(*b.killing, b.g, point(x));
    const Matrix pb = pullback_metric(b.map, b.h, point(x));
    EXPECT_LT((q.quotient_metric - pb).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Constructors, KillingQuotientGuards) {
  VectorField dil;
  dil.dim = 4;
  dil.name = "dilation";
  dil.components = [](const JetVec& xs) { return JetVec{xs[0], xs[1], xs[2], xs[3]}; };
  EXPECT_THROW(killing_quotient_scale(dil, flat_metric(4), pt4(1, 0, 0, 0)), PreconditionError);

  VectorField rot;
  rot.dim = 4;
  rot.name = "rotation_xy";
  rot.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{-xs[1], xs[0], Jet::constant(0.0, 4, order), Jet::constant(0.0, 4, order)};
  };
  EXPECT_THROW(killing_quotient_scale(rot, flat_metric(4), pt4(0.0, 0.0, 0.7, 0.2)),
               ZeroLocusError);
}

TEST(Constructors, SeededDataIsDeterministic) {
  const NormalFormBundle a = build_metric_corank1(random_normal_form_data(42));
  const NormalFormBundle b = build_metric_corank1(random_normal_form_data(42));
  const NormalFormBundle c = build_metric_corank1(random_normal_form_data(43));
  const Vector x = pt4(0.2, -0.4, 0.6, 0.1).coords;
  EXPECT_EQ((metric_values(a.g, x) - metric_values(b.g, x)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT((metric_values(a.g, x) - metric_values(c.g, x)).cwiseAbs().maxCoeff(), 1e-4);
}

}  // namespace
}  // namespace geomorph
