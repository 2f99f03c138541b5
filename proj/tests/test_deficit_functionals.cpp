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

const ConvexCone kQuadrant = ConvexCone::orthant(2);

}  // namespace

TEST_CASE("anisotropic perimeter") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  SUBCASE("of K itself is n |K|") {
    CHECK(anisotropic_perimeter(K.to_region(), K, kQuadrant).value == doctest::Approx(kPi / 2).epsilon(1e-12));
  }
  SUBCASE("the ball gives the Euclidean perimeter") {
    const ConvexCone R2 = ConvexCone::whole_space(2);
    const SectorBody B = SectorBody::sector(R2);
    CHECK(anisotropic_perimeter(Region::box(v2(0, 0), v2(1, 1)), B, R2).value == doctest::Approx(4.0));
  }
  SUBCASE("invariant under translating the body") {
    CounterRng rng(31);
    for (const ConvexCone& C : {kQuadrant, ConvexCone::planar(2.0), ConvexCone::orthant(3)}) {
      const SectorBody KC = SectorBody::sector(C);
      const Region E = random_polytope(C, 77);
      const double base = anisotropic_perimeter(E, KC, C).value;
      for (int i = 0; i < 10; ++i) {
        const Vec z0 = rng.normal_vector(C.dim());
        CHECK(anisotropic_perimeter(E, KC.translated(z0), C).value == doctest::Approx(base).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("relative deficit") {
  SUBCASE("sectors are equality cases") {
    for (const ConvexCone& C : {kQuadrant, ConvexCone::planar(1.0), ConvexCone::planar(2.9)})
      for (double s : {0.5, 1.0, 2.0})
        CHECK(std::abs(relative_deficit(SectorBody::sector(C, s).to_region(), C).mu.value) <= 1e-12);
  }
  SUBCASE("half ball on the edge of the right-angle cone") {
    const ConvexCone C = ConvexCone::planar(kPi / 2);
    CHECK(relative_deficit(edge_half_ball(C), C).mu.value == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  }
  SUBCASE("half ball on the boundary of a half plane") {
    const ConvexCone H = ConvexCone::planar(kPi);
    const Region E = Region::half_ball(v2(10, 0), 1.0, v2(0, 1));
    CHECK(std::abs(relative_deficit(E, H).mu.value) <= 1e-12);
    CHECK(std::abs(theta_closed_form_mu(kPi)) <= 1e-15);
  }
  SUBCASE("both forms agree") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const RelativeDeficit d = relative_deficit(random_polytope(kQuadrant, seed), kQuadrant);
      CHECK(d.mu_sector.value == doctest::Approx(d.mu.value).epsilon(1e-9));
    }
  }
  SUBCASE("zero volume is rejected") {
    CHECK_THROWS_AS(relative_deficit(Region::box(v2(1, 1), v2(2, 1)), kQuadrant), GeometryError);
  }
}

TEST_CASE("anisotropic deficit") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  CHECK(std::abs(anisotropic_deficit(K.to_region(), K, kQuadrant).value) <= 1e-12);
  const ConvexCone R2 = ConvexCone::whole_space(2);
  const Region S = Region::box(v2(0, 0), v2(1, 1));
  CHECK(anisotropic_deficit(S, SectorBody::sector(R2), R2).value ==
        doctest::Approx(2.0 / std::sqrt(kPi) - 1.0).epsilon(1e-12));
  const Region E = random_polytope(kQuadrant, 4);
  CHECK(anisotropic_deficit(E.scaled(3.0), K, kQuadrant).value ==
        doctest::Approx(anisotropic_deficit(E, K, kQuadrant).value).epsilon(1e-9));
  CHECK(relative_deficit(E.scaled(3.0), kQuadrant).mu.value ==
        doctest::Approx(relative_deficit(E, kQuadrant).mu.value).epsilon(1e-9));
}

TEST_CASE("anisotropic deficit never exceeds the relative deficit") {
  for (const ConvexCone& C : {kQuadrant, ConvexCone::planar(kPi / 2), ConvexCone::planar(1.0)}) {
    const SectorBody K = SectorBody::sector(C);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Region E = random_polytope(C, seed);
      CHECK(anisotropic_deficit(E, K, C).value <= relative_deficit(E, C).mu.value + 1e-9);
    }
  }
}

TEST_CASE("asymmetry index") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  SUBCASE("translated dilates of K fit exactly") {
    CounterRng rng(2);
    for (int i = 0; i < 3; ++i) {
      const double r = rng.uniform(0.5, 2.0);
      const Vec x0 = rng.normal_vector(2);
      const AsymmetryResult a = asymmetry_index(K.to_region().scaled(r).translated(x0), K);
      CHECK(a.value <= 2e-6);
      CHECK(a.r == doctest::Approx(r).epsilon(1e-9));
    }
  }
  SUBCASE("the edge half ball is disjoint from the sector of equal volume") {
    const ConvexCone C = ConvexCone::planar(kPi / 2);
    const SectorBody KC = SectorBody::sector(C);
    const Region E = edge_half_ball(C);
    CHECK(constrained_asymmetry(E, KC, C, 0).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(asymmetry_index(E, KC).value <= 2.0);
  }
}

TEST_CASE("constrained asymmetry") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  SUBCASE("no lineality means no translation") {
    CHECK(constrained_asymmetry(SectorBody::sector(kQuadrant, 1.7).to_region(), K, kQuadrant, 0).value <= 1e-9);
  }
  SUBCASE("lineality shifts are absorbed") {
    const ConvexCone H = ConvexCone::half_space(v2(0, 1));
    const SectorBody KH = SectorBody::sector(H);
    const Region E = KH.to_region().scaled(1.3).translated(v2(2.5, 0));
    const AsymmetryResult a = constrained_asymmetry(E, KH, H, 1);
    CHECK(a.value <= 2e-6);
    CHECK(a.argmin[0] == doctest::Approx(2.5).epsilon(1e-4));
  }
  SUBCASE("restricting the translation cannot help") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Region E = random_polytope(kQuadrant, seed);
      CHECK(constrained_asymmetry(E, K, kQuadrant, 0).value >= asymmetry_index(E, K).value - 1e-6);
    }
  }
  SUBCASE("k beyond the lineality is rejected") {
    CHECK_THROWS_AS(constrained_asymmetry(K.to_region(), K, kQuadrant, 1), GeometryError);
  }
}

TEST_CASE("stability ratio") {
  CHECK_THROWS_WITH_AS(stability_ratio(SectorBody::sector(kQuadrant, 2.0).to_region(), kQuadrant),
                       doctest::Contains("equality case; ratio undefined"), GeometryError);
  const ConvexCone C = ConvexCone::planar(3.1);
  CHECK(stability_ratio(edge_half_ball(C), C) > 10.0);
}

TEST_CASE("lineality translations leave the deficit unchanged") {
  Mat N(2, 3);
  N << 0, 1, 0, 0, 0, 1;  // R x quadrant
  const ConvexCone C = ConvexCone::polyhedral(N);
  CHECK(C.lineality_dim() == 1);
  const Region E = Region::box(v3(0, 0, 0), v3(1, 2, 0.5));
  const double mu = relative_deficit(E, C).mu.value;
  for (double v : {-3.0, 0.4, 7.0})
    CHECK(relative_deficit(E.translated(v3(v, 0, 0)), C).mu.value == doctest::Approx(mu).epsilon(1e-9));
}

TEST_CASE("deficit report invariants") {
  for (const ConvexCone& C : {kQuadrant, ConvexCone::planar(2.5)}) {
    const SectorBody K = SectorBody::sector(C);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const DeficitReport r = deficit_report(random_polytope(C, seed), C, K);
      CHECK(r.mu.value >= -1e-12);
      CHECK(r.delta_K.value >= -1e-12);
      CHECK(r.delta_K.value <= r.mu.value + 1e-9);
      CHECK(r.asymmetry >= 0.0);
      CHECK(r.asymmetry <= r.constrained_asymmetry + 1e-6);
      CHECK(r.constrained_asymmetry <= 2.0 + 1e-9);
      CHECK(r.s == std::pow(r.volume.value / C.unit_sector_volume().value, 0.5));
      CHECK(r.n_K == doctest::Approx(2.0 * C.unit_sector_volume().value));
      CHECK(r.best_translation.norm() == 0.0);
    }
  }
}
