#include <gtest/gtest.h>

#include <cmath>

#include "geomorph/geomorph.hpp"

namespace geomorph {
namespace {

Point pt4(double a, double b, double c, double d) {
  return point((Vector(4) << a, b, c, d).finished());
}

VectorField radial_unit(int dim) {
  VectorField u;
  u.dim = dim;
  u.name = "radial_unit";
  u.components = [dim](const JetVec& xs) {
    Jet n2 = xs[0] * xs[0];
    for (int i = 1; i < dim; ++i) n2 += xs[i] * xs[i];
    const Jet r = sqrt(n2);
    JetVec out;
    for (int i = 0; i < dim; ++i) out.push_back(xs[i] / r);
    return out;
  };
  return u;
}

VectorField height_unit(int dim) {
  // u = y ∂_y on the upper half space, a g-unit field.
  VectorField u;
  u.dim = dim;
  u.name = "height_unit";
  u.components = [dim](const JetVec& xs) {
    JetVec out(static_cast<std::size_t>(dim), Jet::constant(0.0, dim, xs[0].order()));
    out[static_cast<std::size_t>(dim - 1)] = xs[static_cast<std::size_t>(dim - 1)];
    return out;
  };
  return u;
}

TEST(Foliation, RadialFrameInvariants) {
  // Flat chart, u = x/|x| at |x| = rho: mean curvature r0 = -1/rho, no
  // rotation, no conformal defect, geodesic fibers.
  const MetricField g = flat_metric(4);
  const Point p = pt4(0.9, -0.6, 0.3, 0.9);
  const double rho = p.coords.norm();
  const FrameInvariants fi = frame_invariants(radial_unit(4), g, p);
  EXPECT_NEAR(fi.r0, -1.0 / rho, 1e-10);
  EXPECT_LT(fi.a.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fi.conformality_defect.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fi.H.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fi.r.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(fiber_minimality_residual(radial_unit(4), g, p), 0.0, 1e-10);
}

TEST(Foliation, HalfSpaceVerticalInvariants) {
  const MetricField g = halfspace_metric(4);
  const Point p = pt4(0.4, -0.2, 0.3, 0.7);
  const FrameInvariants fi = frame_invariants(height_unit(4), g, p);
  EXPECT_NEAR(fi.r0, 1.0, 1e-10);
  EXPECT_LT(fi.a.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fi.conformality_defect.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fi.H.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(conformality_residual(height_unit(4), g, p), 0.0, 1e-10);
  EXPECT_NEAR(fiber_minimality_residual(height_unit(4), g, p), 0.0, 1e-10);
}

TEST(Foliation, ConformalityRoutesAgree) {
  // A deliberately non-conformal unit field: both routes must report the
  // same defect magnitude.
  const MetricField g = flat_metric(4);
  VectorField X;
  X.dim = 4;
  X.name = "skew_stream";
  X.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{Jet::constant(1.0, 4, order), 0.4 * xs[0] * xs[0],
                  0.2 * xs[1], Jet::constant(0.5, 4, order)};
  };
  const VectorField u = unit_field(X, g);
  const Point p = pt4(0.5, -0.3, 0.2, 0.4);
  const double via_frames = conformality_residual(u, g, p);
  const double via_lie = lie_conformality_residual(u, g, p);
  ASSERT_GT(via_frames, 1e-2);
  EXPECT_NEAR(via_frames, via_lie, 1e-8);
}

TEST(Foliation, VerticalUnitFieldMatchesKnownDirection) {
  const MorphismBundle b = radial_projection(3);
  const Point p = pt4(1.2, 0.4, -0.5, 0.8);
  const VectorField u = vertical_unit_field(b.map, b.g, p);
  const JetVec uj = jet_evaluate(u, p, 1);
  const Vector want = p.coords / p.coords.norm();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(uj[static_cast<std::size_t>(i)].value(), want[i], 1e-10);

  SmoothMap defective;
  defective.domain_dim = 3;
  defective.target_dim = 2;
  defective.name = "rank_one";
  defective.components = [](const JetVec& xs) { return JetVec{xs[0], xs[0]}; };
  EXPECT_THROW(
      vertical_unit_field(defective, flat_metric(3), point((Vector(3) << 1, 2, 3).finished())),
      SubmersionError);
}

TEST(Foliation, UnitFieldNormalizesAgainstMetric) {
  const MetricField g = halfspace_metric(4);
  VectorField X;
  X.dim = 4;
  X.name = "slant";
  X.components = [](const JetVec& xs) {
    return JetVec{xs[3], Jet::constant(0.0, 4, xs[0].order()),
                  Jet::constant(0.0, 4, xs[0].order()), 0.5 * xs[3]};
  };
  const VectorField u = unit_field(X, g);
  const Point p = pt4(0.2, 0.1, -0.3, 0.8);
  const JetVec uj = jet_evaluate(u, p, 1);
  Vector uv(4);
  for (int i = 0; i < 4; ++i) uv[i] = uj[static_cast<std::size_t>(i)].value();
  EXPECT_NEAR(uv.dot(metric_values(g, p.coords) * uv), 1.0, 1e-12);

  VectorField rot;
  rot.dim = 4;
  rot.name = "rotation_xy";
  rot.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{-xs[1], xs[0], Jet::constant(0.0, 4, order), Jet::constant(0.0, 4, order)};
  };
  const VectorField ru = unit_field(rot, flat_metric(4));
  EXPECT_THROW(jet_evaluate(ru, pt4(0.0, 0.0, 0.5, 0.5), 1), ZeroLocusError);
}

TEST(Foliation, AnchoredFieldFollowsReference) {
  const VectorField u = radial_unit(4);
  const Point p = pt4(1.0, 0.0, 0.0, 0.0);
  Vector against = -Vector::Unit(4, 0);
  const VectorField flipped = anchored_unit_field(u, against);
  const JetVec fj = jet_evaluate(flipped, p, 1);
  EXPECT_NEAR(fj[0].value(), -1.0, 1e-12);
  const VectorField kept = anchored_unit_field(u, Vector::Unit(4, 0));
  EXPECT_NEAR(jet_evaluate(kept, p, 1)[0].value(), 1.0, 1e-12);
}

TEST(Foliation, HorizontalProjectorAndDualForm) {
  const MetricField g = flat_metric(4);
  const VectorField u = radial_unit(4);
  const Point p = pt4(2.0, 0.0, 0.0, 0.0);
  // The horizontal metric is degenerate along u, so read it through the
  // jet channel rather than the positive-definite accessor.
  const JetMatrix hj = jet_evaluate(horizontal_metric_field(u, g), p, 1);
  Matrix want = Matrix::Identity(4, 4);
  want(0, 0) = 0.0;  // radial direction removed at (2,0,0,0)
  EXPECT_LT((hj.values() - want).cwiseAbs().maxCoeff(), 1e-12);

  const JetVec oj = jet_evaluate(unit_dual_field(u, g), p, 1);
  EXPECT_NEAR(oj[0].value(), 1.0, 1e-12);
  EXPECT_NEAR(oj[1].value(), 0.0, 1e-12);
}

TEST(Foliation, RhoIsOrientationInvariant) {
  const MetricField g = flat_metric(4);
  const VectorField u = radial_unit(4);
  const Point p = pt4(0.8, 0.5, -0.4, 0.2);
  const Vector rho_plus = rho_covector(u, g, p);
  const Vector rho_minus = rho_covector(anchored_unit_field(u, -p.coords), g, p);
  EXPECT_LT((rho_plus - rho_minus).cwiseAbs().maxCoeff(), 1e-9);
  // For the radial foliation ρ = -d log|x|.
  const Vector want = -p.coords / p.coords.squaredNorm();
  EXPECT_LT((rho_plus - want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Foliation, ClassifyKnownFoliations) {
  {
    const TypeReport rep = classify_type(radial_unit(4), flat_metric(4), 0.0,
                                         pt4(0.9, -0.3, 0.5, 0.7));
    EXPECT_EQ(rep.verdict, FoliationType::Type1);
    EXPECT_LT(rep.type1_residual, 1e-6);
    EXPECT_GT(std::abs(rep.r0), 0.5);  // genuinely curved mean curvature
  }
  {
    const MorphismBundle b = halfspace_projection(3);
    const TypeReport rep = classify_type(height_unit(4), b.g, -1.0, pt4(0.1, 0.6, -0.2, 0.8));
    EXPECT_EQ(rep.verdict, FoliationType::Type1);
    EXPECT_LT(rep.dr0_residual, 1e-7);
  }
  {
    const MorphismBundle b = euclidean_projection(3);
    const VectorField u = vertical_unit_field(b.map, b.g, pt4(0, 0, 0, 1));
    const TypeReport rep = classify_type(u, b.g, 0.0, pt4(0.3, -0.4, 0.2, 0.6));
    EXPECT_EQ(rep.verdict, FoliationType::Both);
  }
  {
    const MorphismBundle b = quadratic_r4_r3();
    const TypeReport rep = classify_type(*b.vertical, b.g, 0.0, pt4(1.0, 0.3, -0.2, 0.5));
    EXPECT_EQ(rep.verdict, FoliationType::Type2);
    EXPECT_LT(std::abs(rep.r0), 1e-9);
    EXPECT_LT(rep.drho_norm, 1e-6);
    EXPECT_GT(rep.a_max, 1e-2);  // the fibers genuinely rotate
  }
}

TEST(Foliation, ClassifyGuards) {
  EXPECT_THROW(classify_type(radial_unit(3), flat_metric(3), 0.0,
                             point((Vector(3) << 1, 0, 0).finished())),
               DimensionError);
  // Declared curvature must match the chart.
  EXPECT_THROW(classify_type(radial_unit(4), flat_metric(4), 1.0, pt4(1, 0, 0, 0)),
               PreconditionError);
}

TEST(Foliation, SpaceFormResidualDetectsWrongCurvature) {
  const Point p = point((Vector(3) << 0.2, -0.1, 0.3).finished());
  EXPECT_LT(space_form_residual(sphere_chart_metric(3), p, 1.0), 1e-10);
  EXPECT_NEAR(space_form_residual(sphere_chart_metric(3), p, 0.0), 1.0, 1e-10);
  EXPECT_NO_THROW(verify_space_form(sphere_chart_metric(3), p, 1.0));
  EXPECT_THROW(verify_space_form(sphere_chart_metric(3), p, -1.0), PreconditionError);
}

TEST(Foliation, KillingResidualHandValues) {
  VectorField rot;
  rot.dim = 4;
  rot.name = "rotation_xy";
  rot.components = [](const JetVec& xs) {
    const int order = xs[0].order();
    return JetVec{-xs[1], xs[0], Jet::constant(0.0, 4, order), Jet::constant(0.0, 4, order)};
  };
  EXPECT_NEAR(killing_residual(rot, flat_metric(4), pt4(0.3, 0.7, -0.2, 0.5)), 0.0, 1e-13);

  VectorField dil;
  dil.dim = 4;
  dil.name = "dilation";
  dil.components = [](const JetVec& xs) { return JetVec{xs[0], xs[1], xs[2], xs[3]}; };
  // L_X g = 2 g = 2 I, Frobenius norm 4.
  EXPECT_NEAR(killing_residual(dil, flat_metric(4), pt4(1, 2, 3, 4)), 4.0, 1e-12);
}

TEST(Foliation, CircleFibersHaveCurvatureOneOverRadius) {
  const MorphismBundle b = quadratic_r4_r3();
  EXPECT_NEAR(fiber_minimality_residual(*b.vertical, b.g, pt4(1.0, 0.0, 0.0, 0.0)), 1.0, 1e-10);
  EXPECT_NEAR(fiber_minimality_residual(*b.vertical, b.g, pt4(0.0, 2.0, 0.0, 0.0)), 0.5, 1e-10);
  // Non-unit input is rejected.
  EXPECT_THROW(fiber_minimality_residual(*b.killing, b.g, pt4(1.0, 1.0, 0.0, 0.0)),
               PreconditionError);
}

TEST(Foliation, TorsionHandValue) {
  Vector p = Vector::Zero(3);
  p[0] = 1.0;
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  const Tensor3 S = torsion_S(p, a, 3);
  EXPECT_NEAR(S(0, 0, 1), -3.0, 1e-13);
  EXPECT_NEAR(S(0, 1, 0), 3.0, 1e-13);
  // Antisymmetry in the last pair and tracelessness, on this instance.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(S(i, j, k), -S(i, k, j), 1e-13);
      double tr = 0.0;
      for (int k = 0; k < 3; ++k) tr += S(k, k, j);
      EXPECT_NEAR(tr, 0.0, 1e-13);
    }
}

TEST(Foliation, TorsionVanishingBranches) {
  Vector p = (Vector(4) << 0.3, -0.2, 0.5, 0.1).finished();
  Matrix a = Matrix::Zero(4, 4);
  a(0, 2) = 0.7;
  a(2, 0) = -0.7;
  a(1, 3) = -0.4;
  a(3, 1) = 0.4;
  const Tensor3 S_nop = torsion_S(Vector::Zero(4), a, 4);
  const Tensor3 S_noa = torsion_S(p, Matrix::Zero(4, 4), 4);
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  const Tensor3 S_full = torsion_S(p, a, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        m1 = std::max(m1, std::abs(S_nop(i, j, k)));
        m2 = std::max(m2, std::abs(S_noa(i, j, k)));
        m3 = std::max(m3, std::abs(S_full(i, j, k)));
      }
  EXPECT_EQ(m1, 0.0);
  EXPECT_EQ(m2, 0.0);
  EXPECT_GT(m3, 0.1);  // both invariants present leaves a visible torsion

  EXPECT_THROW(torsion_S(p, Matrix::Identity(4, 4), 4), PreconditionError);
  EXPECT_THROW(torsion_S(Vector::Zero(2), Matrix::Zero(2, 2), 2), DimensionError);
  EXPECT_THROW(torsion_S(Vector::Zero(3), Matrix::Zero(4, 4), 4), ShapeError);
}

TEST(Foliation, TorsionPVector) {
  const Vector s = (Vector(3) << 0.5, -0.1, 0.2).finished();
  const Vector r = (Vector(3) << 1.0, 2.0, -1.0).finished();
  const Vector p = torsion_p(s, 0.25, r, 3);
  EXPECT_NEAR(p[0], 0.5 - 0.25, 1e-14);
  EXPECT_NEAR(p[1], -0.1 - 0.5, 1e-14);
  EXPECT_NEAR(p[2], 0.2 + 0.25, 1e-14);
  EXPECT_THROW(torsion_p(s, 0.25, Vector::Zero(4), 3), ShapeError);
}

TEST(Foliation, ReconstructScaleAlongRadialFoliation) {
  // ρ = -d log|x| integrates to r(p) = |base|/|p|.
  const MetricField g = flat_metric(4);
  const VectorField u = radial_unit(4);
  const Point base = pt4(1.0, 0.0, 0.0, 0.0);
  const Point p = pt4(0.0, 2.0, 0.0, 0.0);
  EXPECT_NEAR(reconstruct_scale(u, g, base, p), 0.5, 1e-10);

  // Multiplicative path consistency through an intermediate point.
  const Point mid = pt4(0.5, 1.2, 0.4, -0.3);
  const double via_mid = reconstruct_scale(u, g, base, mid) * reconstruct_scale(u, g, mid, p);
  EXPECT_NEAR(via_mid, reconstruct_scale(u, g, base, p), 1e-9);
}

TEST(Foliation, TensionRoutesAgreeOffShell) {
  // A fibration metric with the wrong fiber exponent is horizontally
  // conformal but not harmonic; both tension routes must agree on the
  // nonzero value.
  const int n = 3;
  auto scale = [](const JetVec& xs) { return exp(0.2 * xs[0] + 0.1 * xs[1]); };
  MetricField bad;
  bad.dim = 4;
  bad.name = "wrong_fiber_exponent";
  bad.components = [scale, n](const JetVec& xs) {
    const Jet r = scale(xs);
    const Jet r2 = r * r;
    const Jet fiber = r2 * r2 * r2;  // r^6 instead of r^{2n-4} = r^2
    JetMatrix G(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) G(i, j) = Jet::constant(0.0, 4, xs[0].order());
    for (int i = 0; i < n; ++i) G(i, i) = 1.0 / r2;
    G(3, 3) = fiber;
    return G;
  };
  const SmoothMap proj = detail::coordinate_projection(4, n, "wrong_exponent_projection");
  const MetricField h = flat_metric(n);
  const Point p = pt4(0.3, -0.2, 0.5, 0.1);

  const HwcData hwc = hwc_residual(proj, bad, h, p);
  EXPECT_LT(hwc.defect.norm(), 1e-12);  // still horizontally conformal

  const Vector direct = tension_field(proj, bad, h, p);
  const Vector frames = tension_via_frames(proj, bad, h, p);
  ASSERT_GT(direct.norm(), 1e-3);  // genuinely non-harmonic
  EXPECT_LT((direct - frames).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Foliation, TensionViaFramesGuards) {
  SmoothMap squash;
  squash.domain_dim = 4;
  squash.target_dim = 3;
  squash.name = "squash";
  squash.components = [](const JetVec& xs) { return JetVec{xs[0], 2.0 * xs[1], xs[2]}; };
  EXPECT_THROW(tension_via_frames(squash, flat_metric(4), flat_metric(3), pt4(0, 0, 0, 1)),
               PreconditionError);

  SmoothMap low;
  low.domain_dim = 3;
  low.target_dim = 2;
  low.name = "low_target";
  low.components = [](const JetVec& xs) { return JetVec{xs[0], xs[1]}; };
  EXPECT_THROW(
      tension_via_frames(low, flat_metric(3), flat_metric(2), point((Vector(3) << 1, 0, 0).finished())),
      DimensionError);
}

TEST(Foliation, KillingScaleExponentIsSharp) {
  // For fibers of a Killing field the dilation is |X|^{1/(n-2)}; the
  // opposite exponent leaves a visible harmonicity defect.
  const MorphismBundle b = quadratic_r4_r3();
  const Point p = pt4(0.8, 0.4, -0.3, 0.6);
  auto log_norm = [](const Vector& x) { return std::log(x.norm()); };  // |X| = |x| here
  const double right = frame_harmonicity_residual(*b.vertical, b.g, log_norm, p);
  const double wrong = frame_harmonicity_residual(
      *b.vertical, b.g, [&log_norm](const Vector& x) { return -log_norm(x); }, p);
  EXPECT_LT(right, 1e-9);
  EXPECT_GT(wrong, 1e-2);
}

}  // namespace
}  // namespace geomorph
