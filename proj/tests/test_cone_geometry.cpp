#include <doctest.h>

#include <cmath>

#include "conestab/body.hpp"
#include "conestab/rng.hpp"

using namespace conestab;

namespace {

Vec v2(double x, double y) { return Vec2(x, y); }

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

SectorBody quarter_disk() { return SectorBody::sector(ConvexCone::orthant(2)); }

}  // namespace

TEST_CASE("support of the unit ball is 1 in every direction") {
  const SectorBody B = SectorBody::sector(ConvexCone::whole_space(2));
  for (double a : {0.0, 0.7, 2.0, 4.5}) CHECK(support_value(B, v2(std::cos(a), std::sin(a))) == doctest::Approx(1.0));
  const SectorBody B3 = SectorBody::sector(ConvexCone::whole_space(3));
  CHECK(support_value(B3, v3(0, 0.6, 0.8)) == doctest::Approx(1.0));
}

TEST_CASE("support of the quarter disk") {
  const SectorBody K = quarter_disk();
  CHECK(support_value(K, v2(-1, 0)) == doctest::Approx(0.0));
  CHECK(support_value(K, v2(1, 1).normalized()) == doctest::Approx(1.0));
  CHECK(support_value(K, v2(1, -1).normalized()) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(support_value(K, v2(2, 0)), GeometryError);
}

TEST_CASE("support is positively homogeneous in the body") {
  const ConvexCone C = ConvexCone::planar(1.2);
  const SectorBody K = SectorBody::sector(C), K3 = SectorBody::sector(C, 3.0);
  CounterRng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vec nu = rng.unit_vector(2);
    CHECK(support_value(K3, nu) == doctest::Approx(3.0 * support_value(K, nu)).epsilon(1e-12));
  }
}

TEST_CASE("polytope support is the best vertex") {
  Mat A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  const SectorBody P = SectorBody::polytope(A, Vec::Ones(4));
  CHECK(support_value(P, v2(1, 1).normalized()) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("minkowski gauge") {
  const SectorBody K0 = SectorBody::sector(ConvexCone::orthant(2), 1.0, v2(-0.3, -0.3));
  SUBCASE("boundary points have gauge 1") {
    for (double a : {0.2, 0.8, 1.3}) CHECK(minkowski_gauge(K0, v2(-0.3 + std::cos(a), -0.3 + std::sin(a))) ==
                                           doctest::Approx(1.0).epsilon(1e-9));
    CHECK(minkowski_gauge(K0, v2(-0.3, 0.1)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("zero and homogeneity") {
    CHECK(minkowski_gauge(K0, Vec::Zero(2)) == 0.0);
    CounterRng rng(11);
    for (int i = 0; i < 10; ++i) {
      const Vec z = rng.normal_vector(2);
      CHECK(minkowski_gauge(K0, 2.0 * z) == doctest::Approx(2.0 * minkowski_gauge(K0, z)).epsilon(1e-9));
    }
  }
  SUBCASE("triangle inequality") {
    CounterRng rng(12);
    for (int i = 0; i < 50; ++i) {
      const Vec a = rng.normal_vector(2), b = rng.normal_vector(2);
      CHECK(minkowski_gauge(K0, a + b) <= minkowski_gauge(K0, a) + minkowski_gauge(K0, b) + 1e-9);
    }
  }
  SUBCASE("origin on the boundary is rejected") {
    CHECK_THROWS_WITH_AS(minkowski_gauge(quarter_disk(), v2(0.5, 0.5)), doctest::Contains("gauge undefined"),
                         GeometryError);
  }
}

TEST_CASE("gauge bounds of balls") {
  const GaugeBounds b1 = gauge_bounds(SectorBody::sector(ConvexCone::whole_space(2)));
  CHECK(b1.m == doctest::Approx(1.0));
  CHECK(b1.M == doctest::Approx(1.0));
  const GaugeBounds b2 = gauge_bounds(SectorBody::sector(ConvexCone::whole_space(3), 2.0));
  CHECK(b2.m == doctest::Approx(2.0));
  CHECK(b2.M == doctest::Approx(2.0));
}

TEST_CASE("gauge and support bounds of a recentred sector") {
  const SectorBody K = quarter_disk();
  const Recentring rc = optimal_recentring(K);
  const SectorBody K0 = K.translated(rc.x0);
  const GaugeBounds gb = gauge_bounds(K0);
  CHECK(gb.m > 0.0);
  CHECK(gb.m <= gb.M);
  CounterRng rng(21);
  for (int i = 0; i < 200; ++i) {
    const Vec x = rng.normal_vector(2);
    const double g = minkowski_gauge(K0, x);
    CHECK(x.norm() / gb.M <= g + 1e-9);
    CHECK(g <= x.norm() / gb.m + 1e-9);
    const Vec y = rng.unit_vector(2);
    CHECK(support_value(K0, y) <= gb.ratio() * support_value(K0, -y) + 1e-9);
  }
}

TEST_CASE("optimal recentring") {
  SUBCASE("the ball needs no recentring") {
    const Recentring r = optimal_recentring(SectorBody::sector(ConvexCone::whole_space(2)));
    CHECK(r.x0.norm() == doctest::Approx(0.0).scale(1.0));
    CHECK(r.ratio == doctest::Approx(1.0));
  }
  SUBCASE("the half disk recentres on its axis") {
    const Recentring r = optimal_recentring(SectorBody::sector(ConvexCone::half_space(v2(0, 1))));
    CHECK(std::abs(r.x0[0]) < 1e-9);
    CHECK(r.x0[1] < 0.0);
    CHECK(r.x0[1] > -1.0);
  }
  SUBCASE("no worse than the centroid of -K") {
    const SectorBody K = quarter_disk();
    const Recentring r = optimal_recentring(K);
    const double c = -4.0 / (3.0 * kPi);
    CHECK(r.ratio <= gauge_bounds(K.translated(v2(c, c))).ratio() + 1e-12);
  }
}

TEST_CASE("boundary height constant") {
  CHECK(boundary_height_constant(ConvexCone::planar(kPi / 2)) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
  for (double phi : {0.3, kPi / 4, 1.2})
    CHECK(boundary_height_constant(ConvexCone::circular(v3(0, 0, 1), phi)) ==
          doctest::Approx(std::cos(phi) / 2.0).epsilon(1e-8));
  CHECK_THROWS_WITH_AS(boundary_height_constant(ConvexCone::whole_space(2)), doctest::Contains("not pointed"),
                       GeometryError);
}

TEST_CASE("the planar normal form has a half space as a degenerate pointed factor") {
  // {y > 0}: the pointed factor is one dimensional, its boundary is {0}.
  const ConvexCone H = ConvexCone::half_space(v2(0, 1));
  CHECK(H.lineality_dim() == 1);
  CHECK(boundary_height_constant(H) == doctest::Approx(0.5));
  // A pointed factor whose boundary meets {x_n = 0} away from 0 is rejected.
  Mat N(1, 2);
  N << 0, 1;
  CHECK_THROWS_AS(pointed_height_constant(N, v2(1, 0)), GeometryError);
}

TEST_CASE("reduced wedge of the right-angle cone") {
  const ConvexCone C = ConvexCone::planar(kPi / 2);
  const ReducedWedge w = reduced_wedge(C);
  CHECK(w.gamma == doctest::Approx(std::sqrt(2.0)));
  CHECK(w.M == 2);
  CHECK(w.b_tilde == doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))));
  CounterRng rng(3);
  int inside = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec x = rng.uniform_in_box(v2(-0.5, -0.5), v2(0.5, 0.5));
    if (!w.contains(x)) continue;
    ++inside;
    CHECK(x.norm() <= 0.5 + 1e-12);
    CHECK(C.contains_closure(x, 1e-12));
  }
  CHECK(inside > 0);
}

TEST_CASE("cone projection split") {
  const ConvexCone Q = ConvexCone::orthant(2);
  SUBCASE("axis projection") {
    const ProjectionSplit s = cone_projection_split(v2(-1, 2), Q);
    CHECK((s.yc - v2(0, 2)).norm() < 1e-12);
    CHECK((s.yp - v2(-1, 0)).norm() < 1e-12);
  }
  SUBCASE("boundary points split trivially") {
    const ProjectionSplit s = cone_projection_split(v2(0, 1), Q);
    CHECK((s.yc - v2(0, 1)).norm() < 1e-12);
    CHECK(s.yp.norm() < 1e-12);
  }
  SUBCASE("interior points are rejected") {
    CHECK_THROWS_WITH_AS(cone_projection_split(v2(1, 1), Q), doctest::Contains("no split needed"), GeometryError);
  }
  SUBCASE("random polyhedral cone") {
    Mat N(4, 3);
    N << 1, 0, 0.3, 0, 1, 0.2, -1, 0.1, 0.8, 0.2, -1, 0.9;
    const ConvexCone C = ConvexCone::polyhedral(N);
    CounterRng rng(8);
    int tested = 0;
    for (int i = 0; i < 200 && tested < 30; ++i) {
      Vec y = rng.normal_vector(3);
      if (C.contains(y)) continue;
      ProjectionSplit s;
      try {
        s = cone_projection_split(y, C);
      } catch (const GeometryError&) {
        continue;  // outside the half space of the split's hypothesis
      }
      ++tested;
      CHECK(s.yp == y - s.yc);
      CHECK((s.yc + s.yp - y).norm() < 1e-15);
      CHECK(std::abs(s.yc.dot(s.yp)) < 1e-10);
    }
    CHECK(tested > 10);
  }
}

TEST_CASE("cone construction") {
  CHECK(ConvexCone::orthant(3).lineality_dim() == 0);
  CHECK(ConvexCone::whole_space(2).lineality_dim() == 2);
  Mat N(1, 3);
  N << 0, 0, 1;
  CHECK(ConvexCone::polyhedral(N).lineality_dim() == 2);
  CHECK_THROWS_AS(ConvexCone::planar(4.0), GeometryError);
  CHECK_THROWS_AS(ConvexCone::circular(v3(0, 0, 1), 2.0), GeometryError);
  Mat bad(2, 2);
  bad << 1, 0, -1, 0;
  CHECK_THROWS_AS(ConvexCone::polyhedral(bad), GeometryError);
}

TEST_CASE("solid angles") {
  CHECK(ConvexCone::planar(1.3).solid_angle().value == doctest::Approx(1.3));
  CHECK(ConvexCone::orthant(3).solid_angle().value == doctest::Approx(4.0 * kPi / 8.0));
  CHECK(ConvexCone::circular(v3(0, 0, 1), kPi / 4).solid_angle().value ==
        doctest::Approx(2.0 * kPi * (1.0 - std::cos(kPi / 4))));
}
