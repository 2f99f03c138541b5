#include <doctest.h>

#include <cmath>

#include "conestab/experiments.hpp"
#include "conestab/rng.hpp"

using namespace conestab;

namespace {

Vec v2(double x, double y) { return Vec2(x, y); }

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

Region unit_square() { return Region::box(v2(0, 0), v2(1, 1)); }

Region quarter_disk() { return Region::spherical_sector(ConvexCone::orthant(2), 1.0, Vec::Zero(2)); }

}  // namespace

TEST_CASE("volumes in closed form") {
  CHECK(volume(quarter_disk()).value == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(volume(quarter_disk()).exact);
  CHECK(volume(unit_square()).value == doctest::Approx(1.0));
  for (double theta : {0.5, 1.5, 3.0})
    CHECK(volume(Region::spherical_sector(ConvexCone::planar(theta), 1.0, Vec::Zero(2))).value ==
          doctest::Approx(theta / 2).epsilon(1e-12));
  CHECK(volume(Region::box(Vec::Zero(3), Vec::Ones(3))).value == doctest::Approx(1.0));
  const ConvexCone C3 = ConvexCone::circular(v3(0, 0, 1), kPi / 4);
  CHECK(volume(Region::spherical_sector(C3, 1.0, Vec::Zero(3))).value ==
        doctest::Approx(2.0 * kPi * (1.0 - std::cos(kPi / 4)) / 3.0).epsilon(1e-9));
}

TEST_CASE("relative perimeter counts only the boundary inside the cone") {
  for (double theta : {0.7, kPi / 2, 2.5})
    for (double s : {0.5, 2.0}) {
      const ConvexCone C = ConvexCone::planar(theta);
      CHECK(relative_perimeter(Region::spherical_sector(C, s, Vec::Zero(2)), C).value ==
            doctest::Approx(s * theta).epsilon(1e-12));
    }
  SUBCASE("half ball on an edge") {
    for (double theta : {1.0, kPi / 2, 3.0}) {
      const ConvexCone C = ConvexCone::planar(theta);
      CHECK(relative_perimeter(edge_half_ball(C), C).value == doctest::Approx(kPi).epsilon(1e-12));
    }
  }
  SUBCASE("square away from the boundary") {
    CHECK(relative_perimeter(Region::box(v2(1, 1), v2(2, 2)), ConvexCone::orthant(2)).value == doctest::Approx(4.0));
  }
  SUBCASE("cube at the apex of the orthant") {
    CHECK(relative_perimeter(Region::box(Vec::Zero(3), Vec::Ones(3)), ConvexCone::orthant(3)).value ==
          doctest::Approx(3.0));
  }
}

TEST_CASE("symmetric difference volume") {
  const Region S = unit_square();
  CHECK(symmetric_difference_volume(S, S).value == doctest::Approx(0.0).scale(1.0));
  for (double t : {0.1, 0.5, 1.0})
    CHECK(symmetric_difference_volume(S, S.translated(v2(t, 0))).value == doctest::Approx(2 * t).epsilon(1e-12));
  const Region D = Region::ball(v2(5, 5), 1.0);
  CHECK(symmetric_difference_volume(S, D).value == doctest::Approx(1.0 + kPi).epsilon(1e-9));
}

TEST_CASE("symmetric difference satisfies the triangle inequality") {
  const ConvexCone Q = ConvexCone::orthant(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Region A = random_polytope(Q, 3 * seed), B = random_polytope(Q, 3 * seed + 1),
                 C = random_polytope(Q, 3 * seed + 2);
    const Estimate ac = symmetric_difference_volume(A, C), ab = symmetric_difference_volume(A, B),
                   bc = symmetric_difference_volume(B, C);
    CHECK(ac.value <= ab.value + bc.value + 3.0 * std::hypot(ac.std_error, ab.std_error, bc.std_error) + 1e-12);
  }
}

TEST_CASE("interior sampling") {
  SUBCASE("uniform on the square") {
    const InteriorSample s = sample_interior(unit_square(), 1000, 42);
    Vec mean = Vec::Zero(2);
    for (const Vec& p : s.points) mean += p;
    mean /= 1000.0;
    const double sigma = std::sqrt(1.0 / 12.0 / 1000.0);
    CHECK(std::abs(mean[0] - 0.5) < 3 * sigma);
    CHECK(std::abs(mean[1] - 0.5) < 3 * sigma);
    CHECK(s.acceptance == doctest::Approx(1.0));
  }
  SUBCASE("deterministic in the seed") {
    const InteriorSample a = sample_interior(quarter_disk(), 500, 9), b = sample_interior(quarter_disk(), 500, 9);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
  }
  SUBCASE("count must be positive") { CHECK_THROWS_AS(sample_interior(unit_square(), 0, 1), GeometryError); }
  SUBCASE("a tiny region in a large box is degenerate") {
    const Region R = Region::unite(Region::ball(v2(0, 0), 1e-3), Region::ball(v2(100, 100), 1e-3));
    CHECK_THROWS_WITH_AS(sample_interior(R, 10, 1), doctest::Contains("degenerate region"), GeometryError);
  }
}

TEST_CASE("boundary sampling") {
  const ConvexCone Q = ConvexCone::orthant(2);
  SUBCASE("quarter disk splits into arc and radii") {
    const SurfaceSample s = sample_boundary(quarter_disk(), Q, 4000, 3);
    CHECK(s.total_weight(false) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(s.total_weight(true) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("square inside the quadrant has nothing on the cone") {
    const SurfaceSample s = sample_boundary(Region::box(v2(1, 1), v2(2, 2)), Q, 1000, 3);
    CHECK(s.total_weight(true) == 0.0);
    CHECK(s.total_weight(false) == doctest::Approx(4.0).epsilon(1e-6));
  }
  SUBCASE("weights and normals") {
    const ConvexCone C3 = ConvexCone::orthant(3);
    const SurfaceSample s = sample_boundary(random_polytope(C3, 5), C3, 2000, 4);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s.weights[i] > 0.0);
      CHECK(s.normals[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
      if (s.on_cone[i]) CHECK(C3.on_boundary(s.points[i], 1e-9));
    }
  }
}

TEST_CASE("scaling laws") {
  const ConvexCone W = ConvexCone::planar(kPi / 2), C3 = ConvexCone::orthant(3);
  for (const auto& [E, C] : {std::pair{random_polytope(W, 17), W}, std::pair{random_polytope(C3, 18), C3},
                             std::pair{edge_half_ball(W), W}}) {
    const int n = E.dim();
    for (double lambda : {0.5, 2.0}) {
      const Region L = E.scaled(lambda);
      CHECK(volume(L).value == doctest::Approx(std::pow(lambda, n) * volume(E).value).epsilon(1e-9));
      CHECK(relative_perimeter(L, C).value ==
            doctest::Approx(std::pow(lambda, n - 1) * relative_perimeter(E, C).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("relative isoperimetric inequality on generated regions") {
  for (const ConvexCone& C : {ConvexCone::orthant(2), ConvexCone::planar(2.2), ConvexCone::orthant(3)}) {
    const int n = C.dim();
    const double K = C.unit_sector_volume().value;
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
      const Region E = random_polytope(C, seed);
      const Estimate V = volume(E), P = relative_perimeter(E, C);
      const double lhs = n * std::pow(K, 1.0 / n) * std::pow(V.value, (n - 1.0) / n);
      CHECK(lhs <= P.value + 1e-9 + 3.0 * P.std_error);
    }
  }
}

TEST_CASE("the sector arc has measure n |K|") {
  for (const ConvexCone& C : {ConvexCone::planar(1.1), ConvexCone::orthant(3), ConvexCone::circular(v3(0, 0, 1), 0.6)}) {
    const Region K = Region::spherical_sector(C, 1.0, Vec::Zero(C.dim()));
    CHECK(relative_perimeter(K, C).value == doctest::Approx(C.dim() * volume(K).value).epsilon(1e-9));
  }
}

TEST_CASE("regions must stay inside their cone") {
  CHECK_THROWS_AS(validate_in_cone(Region::box(v2(-1, 0), v2(1, 1)), ConvexCone::orthant(2)), GeometryError);
  CHECK_NOTHROW(validate_in_cone(unit_square(), ConvexCone::orthant(2)));
}

TEST_CASE("boolean regions") {
  const Region S = unit_square();
  const Region U = Region::unite(S, S.translated(v2(0.5, 0)));
  CHECK(volume(U).value == doctest::Approx(1.5));
  CHECK(volume(Region::intersect(S, S.translated(v2(0.5, 0.5)))).value == doctest::Approx(0.25));
  CHECK(volume(Region::subtract(S, Region::box(v2(0, 0), v2(0.5, 1)))).value == doctest::Approx(0.5));
}
