#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conestab/experiments.hpp"
#include "conestab/rng.hpp"
#include "conestab/transport.hpp"

using namespace conestab;

namespace {

Vec v2(double x, double y) { return Vec2(x, y); }

const ConvexCone kQuadrant = ConvexCone::orthant(2);

Mat random_cloud(int count, std::uint64_t seed) {
  CounterRng rng(seed);
  Mat X(count, 2);
  for (int i = 0; i < count; ++i) X.row(i) = rng.normal_vector(2).transpose();
  return X;
}

// The displacement mean is the difference of the two cloud means, so its error
// is the sampling error of those means.
double mean_displacement_error(const TransportPlan& p) {
  auto spread = [](const Mat& X) { return (X.rowwise() - X.colwise().mean()).squaredNorm() / X.rows(); };
  return std::sqrt((spread(p.source_points) + spread(p.target_points)) / p.count());
}

}  // namespace

TEST_CASE("exact assignment matches brute force") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Mat X = random_cloud(7, seed), Y = random_cloud(7, seed + 100);
    std::vector<int> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do best = std::min(best, assignment_cost(X, Y, perm));
    while (std::next_permutation(perm.begin(), perm.end()));
    const Assignment a = solve_assignment(X, Y);
    CHECK(a.cost == doctest::Approx(best).epsilon(1e-12));
    CHECK(a.gap() == doctest::Approx(0.0).scale(1.0 + best));
    std::vector<int> seen = a.col_for_row;
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < 7; ++i) CHECK(seen[i] == i);
  }
}

TEST_CASE("entropic assignment is a bijection with a valid bound") {
  const Mat X = random_cloud(300, 7), Y = random_cloud(300, 8);
  const Assignment exact = solve_assignment(X, Y);
  const Assignment ent = solve_entropic(X, Y);
  std::vector<int> seen = ent.col_for_row;
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < 300; ++i) CHECK(seen[i] == i);
  CHECK_FALSE(ent.exact);
  CHECK(ent.cost >= exact.cost - 1e-9);
  CHECK(ent.dual_bound <= exact.cost + 1e-9);
  CHECK(ent.gap() >= 0.0);
}

TEST_CASE("transport of K onto itself") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  double previous = std::numeric_limits<double>::infinity();
  for (int count : {250, 500, 1000}) {
    const TransportPlan p = solve_transport(K.to_region(), K, count, 3);
    CHECK(p.displacement_mean.norm() <= 3.0 * mean_displacement_error(p) + 1e-12);
    CHECK(p.scale == doctest::Approx(1.0));
    CHECK(p.cost / count < previous);
    previous = p.cost / count;
  }
}

TEST_CASE("a translation is transported back") {
  const ConvexCone H = ConvexCone::half_space(v2(0, 1));
  const SectorBody K = SectorBody::sector(H);
  const Vec v = v2(1.5, 0);
  const TransportPlan p = solve_transport(K.to_region().translated(v), K, 2000, 5);
  CHECK((p.displacement_mean + v).norm() <= 0.05);
  CHECK(p.displacement_variance < 0.05 * v.squaredNorm());
  SUBCASE("equivariance against the untranslated plan") {
    const TransportPlan q = solve_transport(K.to_region(), K, 2000, 5);
    const double sigma = std::hypot(mean_displacement_error(p), mean_displacement_error(q));
    CHECK((p.displacement_mean - q.displacement_mean + v).norm() <= 3.0 * sigma + 1e-12);
  }
}

TEST_CASE("the plan beats the sorted pairing") {
  const ConvexCone C = ConvexCone::planar(kPi / 2);
  const TransportPlan p = solve_transport(edge_half_ball(C), SectorBody::sector(C), 800, 9);
  std::vector<int> src(p.count()), dst(p.count());
  std::iota(src.begin(), src.end(), 0);
  std::iota(dst.begin(), dst.end(), 0);
  auto lex = [](const Mat& M) {
    return [&M](int a, int b) { return lex_less(M.row(a).transpose(), M.row(b).transpose()); };
  };
  std::sort(src.begin(), src.end(), lex(p.source_points));
  std::sort(dst.begin(), dst.end(), lex(p.target_points));
  double sorted_cost = 0.0;
  for (int i = 0; i < p.count(); ++i)
    sorted_cost += (p.source_points.row(src[i]) - p.target_points.row(dst[i])).squaredNorm();
  CHECK(p.cost <= sorted_cost + 1e-9);
  CHECK(p.exact);
}

TEST_CASE("transport is deterministic and bounded in size") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  const TransportPlan a = solve_transport(K.to_region(), K, 300, 12), b = solve_transport(K.to_region(), K, 300, 12);
  CHECK(a.assignment == b.assignment);
  CHECK(a.source_points == b.source_points);
  CHECK_THROWS_AS(solve_transport(K.to_region(), K, 5001, 1), NumericalError);
}

TEST_CASE("inequality chain") {
  const ConvexCone C = ConvexCone::planar(kPi / 2);
  const SectorBody K = SectorBody::sector(C);
  SUBCASE("equality case: every term is n |K|") {
    const TransportPlan p = solve_transport(K.to_region(), K, 2000, kDefaultSeed);
    const GromovChainReport g = gromov_chain_report(K.to_region(), C, K, p);
    for (const Estimate& t : {g.n_vol, g.boundary_transport_integral, g.aniso_perimeter, g.rel_perimeter})
      CHECK(std::abs(t.value - kPi / 2) <= 0.03 * kPi / 2);
    CHECK(g.monotone());
  }
  SUBCASE("half ball: increasing, final gap matches the deficit") {
    const Region E = edge_half_ball(C);
    const TransportPlan p = solve_transport(E, K, 2000, kDefaultSeed);
    const GromovChainReport g = gromov_chain_report(E, C, K, p);
    CHECK(g.monotone());
    CHECK(g.margins[2].value > 0.0);
    const double n_K = 2.0 * K.volume().value;
    const double mu = relative_deficit(E, C).mu.value;
    CHECK(g.rel_perimeter.value - g.n_vol.value == doctest::Approx(mu * n_K).epsilon(0.1));
    // T lands in the closed cone, so T . nu <= 0 on the flat side.
    CHECK(g.cone_part.value <= 3.0 * g.cone_part.std_error);
  }
  SUBCASE("a plan solved on another region is rejected") {
    const TransportPlan p = solve_transport(K.to_region(), K, 200, 1);
    CHECK_THROWS_AS(gromov_chain_report(edge_half_ball(C), C, K, p), GeometryError);
  }
}

TEST_CASE("trace integral of sectors") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  const TransportPlan p = solve_transport(K.to_region(), K, 500, 2);
  CHECK(trace_integral(K.to_region(), kQuadrant, p, Vec::Zero(2)).centred.value == doctest::Approx(0.0).scale(1e-6));
  const Region K2 = K.to_region().scaled(2.0);
  const TransportPlan p2 = solve_transport(K2, K, 500, 2);
  CHECK(trace_integral(K2, kQuadrant, p2, Vec::Zero(2)).centred.value == doctest::Approx(kPi).epsilon(1e-9));
}

TEST_CASE("alpha candidates") {
  const SectorBody K = SectorBody::sector(kQuadrant);
  for (const Vec& w : {Vec(Vec::Zero(2)), v2(0.2, 0.1)}) {
    const Region E = K.to_region().translated(w);
    const TransportPlan p = solve_transport(E, K, 2000, 4);
    const AlphaCandidates a = estimate_alpha(E, K, p);
    CHECK((a.ot - w).norm() <= 0.05);
    CHECK((a.fit - w).norm() <= 0.05);
    CHECK(a.fit_value <= a.ot_value + 2e-6);
  }
}

TEST_CASE("arithmetic-geometric mean gap") {
  const Region S = Region::box(v2(0, 0), v2(1, 1));
  SUBCASE("affine maps") {
    CHECK(am_gm_gap(AffineMap{Mat::Identity(2, 2), Vec::Zero(2)}, S).value == doctest::Approx(0.0).scale(1.0));
    Mat L = Mat::Zero(2, 2);
    L.diagonal() << 2.0, 0.5;
    CHECK(am_gm_gap(AffineMap{L, v2(1, 1)}, S).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(am_gm_gap(AffineMap{3.0 * Mat::Identity(2, 2), Vec::Zero(2)}, S).value ==
          doctest::Approx(0.0).scale(1.0));
    Mat bad = Mat::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_WITH_AS(am_gm_gap(AffineMap{bad, Vec::Zero(2)}, S), doctest::Contains("not positive definite"),
                         GeometryError);
  }
  SUBCASE("radial maps") {
    const Region K = SectorBody::sector(kQuadrant).to_region();
    const RadialMap id{[](double r) { return r; }, [](double) { return 1.0; }};
    CHECK(std::abs(am_gm_gap(id, K).value) <= 1e-9);
    const RadialMap sq{[](double r) { return r * r; }, [](double r) { return 2.0 * r; }};
    // div T = 3r, det^{1/2} = sqrt(2) r: gap = (3 - 2 sqrt 2) int_K r.
    const double expected = (3.0 - 2.0 * std::sqrt(2.0)) * (kPi / 2) / 3.0;
    CHECK(am_gm_gap(sq, K).value == doctest::Approx(expected).epsilon(1e-8));
    CHECK(am_gm_gap(sq, S).value >= 0.0);
  }
}
