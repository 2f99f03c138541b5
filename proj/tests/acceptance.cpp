// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "conestab/experiments.hpp"
#include "conestab/transport.hpp"

using namespace conestab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

const std::vector<double> kThetas{kPi / 3, kPi / 2, 2 * kPi / 3, 2.8, 3.1};

Outcome theta_family() {
  const FamilyResult f = theta_cone_family(kThetas);
  double worst = 0.0;
  bool increasing = true;
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    worst = std::max(worst, std::abs(f.members[i].mu.value - f.members[i].mu_closed));
    if (i > 0 && !(f.members[i].stability_ratio > f.members[i - 1].stability_ratio)) increasing = false;
  }
  const double last = f.members.back().stability_ratio;
  return {worst <= 1e-6 && increasing && last > 10.0,
          fmt("max |mu - closed form| = %.3g, ratios increasing = %d, ratio(3.1) = %.4g", worst, increasing, last)};
}

Outcome equality_cases() {
  double worst2 = 0.0, worst3 = 0.0;
  for (double s : {0.5, 1.0, 2.0}) {
    for (const ConvexCone& C : {ConvexCone::orthant(2), ConvexCone::planar(kPi / 2)})
      worst2 = std::max(worst2, std::abs(relative_deficit(SectorBody::sector(C, s).to_region(), C).mu.value));
    const ConvexCone C3 = ConvexCone::circular(v3(0, 0, 1), kPi / 4);
    worst3 = std::max(worst3, std::abs(relative_deficit(SectorBody::sector(C3, s).to_region(), C3).mu.value));
  }
  return {worst2 <= 1e-12 && worst3 <= 1e-9, fmt("max |mu| planar = %.3g, circular = %.3g", worst2, worst3)};
}

Outcome anisotropic_below_relative() {
  MeasureOptions mo;
  mo.boundary_samples = 2000;
  std::string detail;
  bool pass = true;
  const std::pair<const char*, ConvexCone> cones[] = {{"quadrant", ConvexCone::orthant(2)},
                                                      {"planar(pi/2)", ConvexCone::planar(kPi / 2)},
                                                      {"orthant(3)", ConvexCone::orthant(3)}};
  for (const auto& [name, C] : cones) {
    const SectorBody K = SectorBody::sector(C);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Region E = random_polytope(C, 1000 + seed);
      const double gap = anisotropic_deficit(E, K, C, mo).value - relative_deficit(E, C, mo).mu.value;
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++violations;
    }
    pass = pass && violations == 0;
    detail += fmt("%s: %d violations, max delta_K - mu = %.3g; ", name, violations, worst);
  }
  return {pass, detail};
}

Outcome ellipse_family() {
  std::vector<int> hs;
  for (int h = 2; h <= 64; ++h) hs.push_back(h);
  const FamilyResult f = ellipsoid_family(hs, ConvexCone::orthant(2));
  double worst = 0.0;
  for (const FamilyMember& m : f.members) worst = std::max(worst, m.identity_residual);
  if (!f.fit) return {false, fmt("max identity residual = %.3g, no fit", worst)};
  return {worst <= 1e-6 && std::abs(f.fit->slope - 0.5) <= 0.1,
          fmt("max identity residual = %.3g, slope = %.4f on %d points", worst, f.fit->slope, f.fit->points)};
}

Outcome gromov_chain() {
  const ConvexCone C = ConvexCone::planar(kPi / 2);
  const SectorBody K = SectorBody::sector(C);
  const std::pair<const char*, Region> regions[] = {
      {"K", K.to_region()}, {"edge half ball", edge_half_ball(C)}, {"random polytope", random_polytope(C, 7)}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, E] : regions) {
    const TransportPlan p = solve_transport(E, K, 2000, kDefaultSeed);
    const GromovChainReport g = gromov_chain_report(E, C, K, p);
    pass = pass && g.monotone();
    detail += fmt("%s: monotone = %d, margins %.4g %.4g %.4g; ", name, g.monotone(), g.margins[0].value,
                  g.margins[1].value, g.margins[2].value);
    if (std::string(name) == "K") {
      double worst = 0.0;
      for (const Estimate& t : {g.n_vol, g.boundary_transport_integral, g.aniso_perimeter, g.rel_perimeter})
        worst = std::max(worst, std::abs(t.value - kPi / 2) / (kPi / 2));
      pass = pass && worst <= 0.03;
      detail += fmt("max relative miss from pi/2 = %.3g; ", worst);
    }
  }
  return {pass, detail};
}

Outcome trace_bound() {
  bool pass = true;
  std::string detail;
  for (double theta : kThetas) {
    const ConvexCone C = ConvexCone::planar(theta);
    const SectorBody K = SectorBody::sector(C);
    const Region E = edge_half_ball(C);
    const TransportPlan p = solve_transport(E, K, 2000, kDefaultSeed);
    const TraceIntegral t = trace_integral(E, C, p, Vec::Zero(2));
    const bool ok = t.transport.value <= t.bound + 3.0 * t.transport.std_error;
    pass = pass && ok;
    detail += fmt("theta %.3g: %.4g <= %.4g (sigma %.2g); ", theta, t.transport.value, t.bound, t.transport.std_error);
  }
  return {pass, detail};
}

Outcome translation_lemmas() {
  const Region S = Region::box(Vec2(0, 0), Vec2(1, 1));
  std::vector<double> ts;
  for (int i = 1; i <= 10; ++i) ts.push_back(0.1 * i);
  double worst = 0.0;
  for (const TranslationRow& r : translation_upper_scan(S, {Vec2(1, 0)}, ts).rows)
    worst = std::max(worst, std::abs(r.f - 2.0 * r.t));
  const LowerBoundScan lower = translation_lower_scan(S, 64, 64);
  return {worst <= 1e-9 && lower.violations == 0,
          fmt("max |f - 2t| = %.3g, min-formula violations = %d (c = %.4g, C = %.4g)", worst, lower.violations,
              lower.c, lower.C)};
}

Outcome wedge_identities() {
  const ConvexCone W = ConvexCone::planar(kPi / 2);
  const ConvexCone C3 = ConvexCone::circular(v3(0, 0, 1), kPi / 4);
  std::vector<Vec> y2, y3;
  for (int i = 1; i <= 5; ++i) {
    y2.push_back(Vec2(0, 0.02 * i));
    y2.push_back(Vec2(0, -0.02 * i));
    y3.push_back(v3(0, 0, 0.02 * i));
    y3.push_back(v3(0, 0, -0.02 * i));
  }
  const long w2 = wedge_identity_check(W, y2, 100'000, kDefaultSeed).total_witnesses();
  const long w3 = wedge_identity_check(C3, y3, 100'000, kDefaultSeed).total_witnesses();
  return {w2 == 0 && w3 == 0, fmt("witnesses planar = %ld, circular = %ld", w2, w3)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const fs::path root = fs::absolute("acceptance_cli");
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "cone.json") << R"({"type": "planar", "opening": 1.5707963267948966})";
  std::ofstream(root / "region.json") << R"({"type": "box", "lo": [0.2, 0.3], "hi": [0.6, 0.5]})";
  const std::string files = " --cone " + (root / "cone.json").string() + " --region " + (root / "region.json").string();
  const std::string small = " --samples 20000 --boundary-samples 2000";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"deficit", "deficit" + files + small},
      {"transport", "transport --count 300" + files + small},
      {"sharpness-theta", "sharpness-theta --thetas 1.0 2.0" + small},
      {"sharpness-ellipsoid", "sharpness-ellipsoid --h-min 2 --h-max 8" + small},
      {"constant", "constant --trials 3 --thetas 2.0 2.5" + small},
      {"lemmas", "lemmas --directions 8 --radii 8" + small},
      {"wedge", "wedge" + small},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [name, args] : commands) {
    std::vector<fs::path> dirs;
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / (name + "_" + std::to_string(run));
      dirs.push_back(out);
      const std::string cmd = std::string(CONESTAB_CLI) + " " + args + " --out-dir " + out.string() + " > " +
                              (root / (name + ".log")).string() + " 2>&1";
      const int status = std::system(cmd.c_str());
      ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
    int csvs = 0;
    bool same = ran;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (!ran || entry.path().extension() != ".csv") continue;
      ++csvs;
      const fs::path twin = dirs[1] / entry.path().filename();
      same = same && fs::exists(twin) && slurp(entry.path()) == slurp(twin);
    }
    same = same && csvs > 0;
    pass = pass && same;
    detail += fmt("%s %s (%d csv); ", name.c_str(), same ? "identical" : ran ? "differs" : "failed", csvs);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 cone family closed form and growing ratio", theta_family},
      {"2 sectors are equality cases", equality_cases},
      {"3 anisotropic deficit below relative deficit", anisotropic_below_relative},
      {"4 ellipse family identities and exponent", ellipse_family},
      {"5 inequality chain is monotone", gromov_chain},
      {"6 trace transport bound", trace_bound},
      {"7 translation lemmas on the unit square", translation_lemmas},
      {"8 wedge identities have no witnesses", wedge_identities},
      {"9 CLI output is deterministic", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %s: %s | %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
