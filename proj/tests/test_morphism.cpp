#include <gtest/gtest.h>

#include <cmath>

#include "geomorph/geomorph.hpp"
#include "oracles.hpp"

namespace geomorph {
namespace {

Point pt3(double a, double b, double c) { return point((Vector(3) << a, b, c).finished()); }
Point pt4(double a, double b, double c, double d) {
  return point((Vector(4) << a, b, c, d).finished());
}

// φ(x, y, z) = (x, 2y): harmonic but not horizontally weakly conformal.
SmoothMap stretch_map() {
  SmoothMap phi;
  phi.domain_dim = 3;
  phi.target_dim = 2;
  phi.name = "stretch";
  phi.components = [](const JetVec& xs) { return JetVec{xs[0], 2.0 * xs[1]}; };
  return phi;
}

TEST(Morphism, DifferentialAndPullback) {
  const SmoothMap phi = stretch_map();
  const Point p = pt3(0.3, -0.7, 1.2);
  const Matrix F = differential(phi, p);
  Matrix want(2, 3);
  want << 1, 0, 0, 0, 2, 0;
  EXPECT_TRUE(F.isApprox(want));

  const Matrix pb = pullback_metric(phi, flat_metric(2), p);
  Matrix pwant = Matrix::Zero(3, 3);
  pwant(0, 0) = 1.0;
  pwant(1, 1) = 4.0;
  EXPECT_TRUE(pb.isApprox(pwant));
  EXPECT_NEAR(energy_density(phi, flat_metric(3), flat_metric(2), p), 5.0, 1e-13);
}

TEST(Morphism, ConformalDefectHandValues) {
  // M = dφ g^{-1} dφ^T = diag(1, 4), R = 5/2, defect = diag(-3/2, 3/2).
  const HwcData hwc = hwc_residual(stretch_map(), flat_metric(3), flat_metric(2),
                                   pt3(0.1, 0.2, 0.3));
  EXPECT_FALSE(hwc.degenerate);
  EXPECT_NEAR(hwc.conformal_factor, 2.5, 1e-13);
  EXPECT_NEAR(hwc.defect(0, 0), -1.5, 1e-13);
  EXPECT_NEAR(hwc.defect(1, 1), 1.5, 1e-13);
  EXPECT_NEAR(hwc.defect(0, 1), 0.0, 1e-13);

  const MorphismResidual res =
      harmonic_morphism_residual(stretch_map(), flat_metric(3), flat_metric(2), pt3(1, 1, 1));
  EXPECT_NEAR(res.tension_norm, 0.0, 1e-12);
  EXPECT_NEAR(res.hwc_defect, 1.5 * std::sqrt(2.0), 1e-12);
}

TEST(Morphism, TensionIsMinusLaplacianForFlatTargets) {
  SmoothMap phi;
  phi.domain_dim = 3;
  phi.target_dim = 2;
  phi.name = "quadratic_pair";
  phi.components = [](const JetVec& xs) {
    return JetVec{xs[0] * xs[0], xs[1] * xs[2]};
  };
  ScalarField f0;
  f0.dim = 3;
  f0.name = "c0";
  f0.components = [](const JetVec& xs) { return xs[0] * xs[0]; };

  const Point p = pt3(0.4, -0.2, 0.9);
  const Vector tau = tension_field(phi, flat_metric(3), flat_metric(2), p);
  EXPECT_NEAR(tau[0], 2.0, 1e-13);
  EXPECT_NEAR(tau[1], 0.0, 1e-13);
  EXPECT_NEAR(tau[0], -laplace_beltrami(flat_metric(3), f0, p), 1e-13);
}

TEST(Morphism, EnergyDensityEqualsDimensionTimesConformalFactor) {
  // For a horizontally weakly conformal map, |dφ|² = n R.
  const MorphismBundle b = quadratic_r4_r3();
  const Point p = pt4(1.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(energy_density(b.map, b.g, b.h, p), 3.0, 1e-12);
  const HwcData hwc = hwc_residual(b.map, b.g, b.h, p);
  EXPECT_NEAR(hwc.conformal_factor, 1.0, 1e-12);  // R = |x|²
  const Point q = pt4(1.2, 0.0, 0.5, 0.0);
  EXPECT_NEAR(dilation(b.map, b.g, b.h, q), std::sqrt(1.44 + 0.25), 1e-12);
}

TEST(Morphism, TensionMatchesFiniteDifferenceOracle) {
  // Cross-check the jet route against an all-FD reimplementation on a
  // nonlinear flat-to-flat bundle and on a curved-to-curved one.
  for (const char* name : {"radial_projection", "sphere_umbilic"}) {
    MorphismBundle bundle;
    for (MorphismBundle& b : standard_gallery())
      if (b.name == name) bundle = std::move(b);
    ASSERT_EQ(bundle.name, name);
    const auto pts = sample_points(bundle.region, 6, 11, "test/tension_oracle", 0.1);
    for (const Vector& x : pts) {
      const Vector got = tension_field(bundle.map, bundle.g, bundle.h, point(x));
      const Vector want = oracle::fd_tension(bundle.map, bundle.g, bundle.h, x, 1e-4);
      EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-5)
          << bundle.name << " at " << x.transpose();
    }
  }
}

TEST(Morphism, GalleryBundlesHaveSmallResiduals) {
  for (const MorphismBundle& b : standard_gallery()) {
    const auto pts = sample_points(b.region, 5, 3, "test/gallery_residual", 0.1);
    for (const Vector& x : pts) {
      const MorphismResidual res = harmonic_morphism_residual(b.map, b.g, b.h, point(x));
      EXPECT_LT(res.tension_norm, 1e-9) << b.name;
      EXPECT_LT(res.hwc_defect, 1e-9) << b.name;
      EXPECT_FALSE(res.degenerate) << b.name;
      EXPECT_GT(res.conformal_factor, 0.0) << b.name;
    }
  }
}

TEST(Morphism, PerturbedMapHasDetectableResidual) {
  // Adding 0.05 sin(x0) to one component must push the residual above 1e-3.
  MorphismBundle b = euclidean_projection(3);
  SmoothMap broken = b.map;
  broken.components = [inner = b.map.components](const JetVec& xs) {
    JetVec ys = inner(xs);
    ys[0] += 0.05 * sin(xs[0]);
    return ys;
  };
  double worst = 0.0;
  for (const Vector& x : sample_points(b.region, 25, 5, "test/perturbed", 0.05)) {
    const MorphismResidual res = harmonic_morphism_residual(broken, b.g, b.h, point(x));
    worst = std::max(worst, std::max(res.tension_norm, res.hwc_defect));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Morphism, ConstantMapIsDegenerate) {
  SmoothMap c;
  c.domain_dim = 3;
  c.target_dim = 2;
  c.name = "constant";
  c.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{Jet::constant(0.5, 3, order), Jet::constant(-0.25, 3, order)};
  };
  const MorphismResidual res =
      harmonic_morphism_residual(c, flat_metric(3), flat_metric(2), pt3(1, 2, 3));
  EXPECT_TRUE(res.degenerate);
  EXPECT_NEAR(res.tension_norm, 0.0, 1e-14);
  EXPECT_NEAR(res.hwc_defect, 0.0, 1e-14);
}

TEST(Morphism, HomothetyHasConstantDilation) {
  SmoothMap dbl;
  dbl.domain_dim = 3;
  dbl.target_dim = 3;
  dbl.name = "doubling";
  dbl.components = [](const JetVec& xs) {
    return JetVec{2.0 * xs[0], 2.0 * xs[1], 2.0 * xs[2]};
  };
  const MorphismResidual res =
      harmonic_morphism_residual(dbl, flat_metric(3), flat_metric(3), pt3(0.3, 0.4, -0.1));
  EXPECT_NEAR(res.tension_norm, 0.0, 1e-14);
  EXPECT_NEAR(res.hwc_defect, 0.0, 1e-14);
  EXPECT_NEAR(dilation(dbl, flat_metric(3), flat_metric(3), pt3(1, 0, 0)), 2.0, 1e-14);
}

TEST(Morphism, GuardsRejectBadInput) {
  // Domain metric of the wrong dimension.
  EXPECT_THROW(
      harmonic_morphism_residual(stretch_map(), flat_metric(4), flat_metric(2), pt4(0, 0, 0, 0)),
      DimensionError);
  // Map image outside the target chart.
  SmoothMap sink;
  sink.domain_dim = 2;
  sink.target_dim = 2;
  sink.name = "below_boundary";
  sink.components = [](const JetVec& xs) {
    return JetVec{xs[0], Jet::constant(-1.0, 2, xs[0].order())};
  };
  EXPECT_THROW(pullback_metric(sink, halfspace_metric(2), point(Vector::Zero(2))), DomainError);
}

}  // namespace
}  // namespace geomorph
