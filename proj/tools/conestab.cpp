#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conestab/io.hpp"

namespace fs = std::filesystem;
using namespace conestab;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

const std::vector<double> kDefaultThetas = {1.0, 1.5, 2.0, 2.5, 2.8, 3.0, 3.1};
const std::vector<double> kDefaultGrowthThetas = {2.0, 2.5, 3.0};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<long> samples;
  std::optional<long> boundary_samples;
  std::optional<std::string> cone;
  std::optional<std::string> region;
  std::optional<std::string> body;
  std::optional<int> count;
  std::optional<std::string> out;
  std::vector<double> thetas;
  std::optional<int> h_min, h_max, trials, directions, radii;
  std::vector<double> ys;  // flattened, rows of the cone dimension
  std::optional<double> distance, tolerance;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError({"file not found: " + p.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The config file, then command-line overrides, validated in one pass.
RunConfig resolve(const std::string& command, const Flags& f) {
  Json j = Json::object();
  if (!f.config.empty()) {
    const fs::path path(f.config);
    j = config_to_json(parse_config(slurp(path), path.parent_path().empty() ? fs::path(".") : path.parent_path()));
    if (j.contains("command") && j["command"] != command)
      throw ConfigError({"config is for command \"" + j["command"].get<std::string>() + "\", not \"" + command + "\""});
  }
  j["command"] = command;
  auto file_ref = [&](const char* inline_key, const char* file_key, const std::optional<std::string>& path) {
    if (!path) return;
    j.erase(inline_key);
    j[file_key] = *path;
  };
  file_ref("cone", "cone_file", f.cone);
  file_ref("region", "region_file", f.region);
  if (f.body) {
    try {
      j["body"] = Json::parse(slurp(*f.body));
    } catch (const Json::parse_error& e) {
      throw ConfigError({*f.body + ": JSON syntax error at byte " + std::to_string(e.byte)});
    }
  }
  if (f.seed) j["seed"] = *f.seed;
  if (f.out_dir) j["out_dir"] = *f.out_dir;
  if (f.samples) j["samples"] = *f.samples;
  if (f.boundary_samples) j["boundary_samples"] = *f.boundary_samples;
  if (f.count) j["count"] = *f.count;
  if (!f.thetas.empty()) j["thetas"] = f.thetas;
  if (f.h_min) j["h_min"] = *f.h_min;
  if (f.h_max) j["h_max"] = *f.h_max;
  if (f.trials) j["trials"] = *f.trials;
  if (f.directions) j["directions"] = *f.directions;
  if (f.radii) j["radii"] = *f.radii;
  if (f.distance) j["distance"] = *f.distance;
  if (f.tolerance) j["tolerance"] = *f.tolerance;
  if (!f.ys.empty()) {
    Json ys = Json::array();
    const int n = j.contains("cone") ? cone_from_json(j["cone"]).dim() : 2;
    if (f.ys.size() % n != 0) throw ConfigError({"--y needs a multiple of " + std::to_string(n) + " numbers"});
    for (std::size_t i = 0; i < f.ys.size(); i += n) ys.push_back(std::vector<double>(f.ys.begin() + i, f.ys.begin() + i + n));
    j["ys"] = ys;
  }
  return parse_config(j.dump(), ".");
}

DeficitOptions deficit_options(const RunConfig& c) {
  DeficitOptions o;
  o.measure.seed = c.seed;
  o.measure.interior_samples = c.samples;
  o.measure.boundary_samples = c.boundary_samples;
  return o;
}

ExperimentOptions experiment_options(const RunConfig& c) {
  ExperimentOptions o;
  o.deficit = deficit_options(c);
  o.distance = c.distance;
  o.tolerance = c.tolerance;
  return o;
}

ConvexCone require_cone(const RunConfig& c) {
  if (!c.cone) throw ConfigError({"command \"" + c.command + "\" needs a cone (--cone or \"cone\")"});
  return cone_from_json(*c.cone);
}

ConvexCone cone_or(const RunConfig& c, const ConvexCone& fallback) { return c.cone ? cone_from_json(*c.cone) : fallback; }

SectorBody body_for(const RunConfig& c, const ConvexCone& cone) {
  return c.body ? body_from_json(*c.body, cone) : SectorBody::sector(cone);
}

void emit(const RunConfig& c, const std::string& stem, const Table& table, const Json& extra,
          const std::optional<PlotSeries>& plot) {
  const fs::path dir(c.out_dir);
  write_csv(dir / (stem + ".csv"), table);
  Json j;
  j["metadata"] = run_metadata(c);
  j["config"] = config_to_json(c);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["table"] = to_json(table);
  write_json(dir / (stem + ".json"), j);
  if (plot) write_text(dir / (stem + ".svg"), loglog_svg(*plot));
  write_json(dir / "metadata.json", run_metadata(c));
}

PlotSeries family_plot(const FamilyResult& f) {
  PlotSeries p;
  for (const auto& m : f.members) {
    p.x.push_back(m.mu.value);
    p.y.push_back(m.constrained_asymmetry);
  }
  p.fit = f.fit;
  return p;
}

int run_deficit(const RunConfig& c) {
  const ConvexCone cone = require_cone(c);
  if (!c.region) throw ConfigError({"command \"deficit\" needs a region (--region or \"region\")"});
  const Region E = region_from_json(*c.region, cone);
  const DeficitReport r = deficit_report(E, cone, body_for(c, cone), deficit_options(c));
  emit(c, "deficit", deficit_table(r), Json::object(), std::nullopt);
  return 0;
}

int run_transport(const RunConfig& c, const std::optional<std::string>& out) {
  const ConvexCone cone = require_cone(c);
  if (!c.region) throw ConfigError({"command \"transport\" needs a region (--region or \"region\")"});
  const Region E = region_from_json(*c.region, cone);
  const SectorBody K = body_for(c, cone);
  TransportOptions to;
  to.entropic = c.count > 5000;
  const TransportPlan plan = solve_transport(E, K, c.count, c.seed, to);
  ChainOptions co;
  co.measure = deficit_options(c).measure;
  const GromovChainReport chain = gromov_chain_report(E, cone, K, plan, co);
  const AlphaCandidates alpha = estimate_alpha(E, K, plan, deficit_options(c));
  const TraceIntegral trace = trace_integral(E, cone, plan, alpha.fit, co);

  Json extra;
  extra["monotone_3sigma"] = chain.monotone();
  Json a;
  a["ot"] = std::vector<double>(alpha.ot.data(), alpha.ot.data() + alpha.ot.size());
  a["fit"] = std::vector<double>(alpha.fit.data(), alpha.fit.data() + alpha.fit.size());
  a["ot_value"] = alpha.ot_value;
  a["fit_value"] = alpha.fit_value;
  extra["alpha"] = a;
  Json t;
  t["centred"] = trace.centred.value;
  t["centred_std_error"] = trace.centred.std_error;
  t["transport"] = trace.transport.value;
  t["transport_std_error"] = trace.transport.std_error;
  t["bound"] = trace.bound;
  t["mu"] = trace.mu;
  extra["trace_integral"] = t;
  emit(c, "transport", chain_table(chain), extra, std::nullopt);
  write_csv(fs::path(c.out_dir) / "plan.csv", plan_table(plan));
  Json pj;
  pj["metadata"] = run_metadata(c);
  pj["plan"] = plan_to_json(plan);
  write_json(out ? fs::path(*out) : fs::path(c.out_dir) / "plan.json", pj);
  return 0;
}

int run_theta(const RunConfig& c) {
  FamilyResult f = theta_cone_family(c.thetas.empty() ? kDefaultThetas : c.thetas, experiment_options(c));
  try {
    FitOptions fo;
    fo.seed = c.seed;
    f.fit = exponent_fit(f, fo);
  } catch (const GeometryError&) {
    f.fit.reset();  // too few members in the fit window
  }
  Json extra;
  extra["fit"] = fit_to_json(f.fit);
  emit(c, "sharpness-theta", family_table(f), extra, family_plot(f));
  return 0;
}

int run_ellipsoid(const RunConfig& c) {
  std::vector<int> hs;
  for (int h = c.h_min; h <= c.h_max; ++h) hs.push_back(h);
  const ConvexCone cone = cone_or(c, ConvexCone::orthant(2));
  FamilyResult f = ellipsoid_family(hs, cone, experiment_options(c));
  if (f.fit) {
    FitOptions fo;
    fo.seed = c.seed;
    f.fit = exponent_fit(f, fo);
  }
  Json extra;
  extra["fit"] = fit_to_json(f.fit);
  emit(c, "sharpness-ellipsoid", family_table(f), extra, family_plot(f));
  return 0;
}

int run_constant(const RunConfig& c) {
  const ConvexCone cone = cone_or(c, ConvexCone::orthant(2));
  const ExperimentOptions eo = experiment_options(c);
  const ConstantEstimate e = constant_estimator(cone, c.trials, c.seed, eo);
  const std::vector<ThetaConstant> growth =
      theta_constant_growth(c.thetas.empty() ? kDefaultGrowthThetas : c.thetas, c.trials, c.seed, eo);
  Json extra;
  extra["estimate"] = e.estimate;
  extra["argmax"] = e.argmax;
  PlotSeries p;
  p.x = e.mus;
  p.y = e.asymmetries;
  p.y_label = "constrained asymmetry";
  emit(c, "constant", constant_table(e, growth), extra, p);
  return 0;
}

int run_lemmas(const RunConfig& c) {
  Region A = Region::box(Vec::Zero(2), Vec::Ones(2));
  if (c.region) A = region_from_json(*c.region, c.cone ? std::optional<ConvexCone>(cone_from_json(*c.cone)) : std::nullopt);
  MeasureOptions mo = deficit_options(c).measure;
  const LowerBoundScan lower = translation_lower_scan(A, c.directions, c.radii, mo);
  std::vector<double> ts;
  for (int j = 1; j <= c.radii; ++j) ts.push_back(lower.diam * j / c.radii);
  const TranslationScan upper = translation_upper_scan(A, scan_directions(A.dim(), c.directions, c.seed), ts, mo);
  Json extra;
  extra["upper_sup"] = upper.sup;
  extra["upper_argsup"] = upper.argsup;
  extra["lower_c"] = lower.c;
  extra["lower_C"] = lower.C;
  extra["lower_s"] = lower.s;
  extra["diam"] = lower.diam;
  extra["violations"] = lower.violations;
  PlotSeries p;
  for (const auto& r : lower.rows) {
    p.x.push_back(r.t);
    p.y.push_back(r.f);
  }
  p.x_label = "|y|";
  p.y_label = "|(y + A) delta A|";
  emit(c, "lemmas", scan_table(upper, lower), extra, p);
  return 0;
}

int run_wedge(const RunConfig& c) {
  const ConvexCone cone = cone_or(c, ConvexCone::planar(kPi / 2));
  std::vector<Vec> ys = c.ys;
  if (ys.empty()) {
    for (double h : {0.0, 0.1, -0.1, 0.5, -0.5}) {
      Vec y = Vec::Zero(cone.dim());
      y += h * cone.frame().row(cone.dim() - 1).transpose();
      ys.push_back(y);
    }
  }
  const WedgeReport w = wedge_identity_check(cone, ys, c.samples, c.seed);
  Json extra;
  extra["b_tilde"] = w.b_tilde;
  extra["total_witnesses"] = w.total_witnesses();
  PlotSeries p;
  for (const auto& r : w.rows) {
    p.x.push_back(r.y.norm());
    p.y.push_back(r.measure.value);
  }
  p.x_label = "|y|";
  p.y_label = "measure of left side";
  emit(c, "wedge", wedge_table(w), extra, p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability of the relative isoperimetric inequality in convex cones"};
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "64-bit seed");
  app.add_option("--out-dir", f.out_dir, "output directory");
  app.add_option("--samples", f.samples, "interior Monte Carlo samples");
  app.add_option("--boundary-samples", f.boundary_samples, "boundary Monte Carlo samples");

  auto geometry = [&](CLI::App* s) {
    s->add_option("--cone", f.cone, "cone JSON file");
    s->add_option("--region", f.region, "region JSON file");
    s->add_option("--body", f.body, "body K JSON file (unit sector by default)");
  };
  auto* deficit = app.add_subcommand("deficit", "deficits, asymmetry and perimeters of one region");
  geometry(deficit);
  auto* transport = app.add_subcommand("transport", "discrete transport plan and the inequality chain");
  geometry(transport);
  transport->add_option("--count", f.count, "points per cloud");
  transport->add_option("--out", f.out, "plan JSON path");
  auto* theta = app.add_subcommand("sharpness-theta", "half balls on the edge of planar cones");
  theta->add_option("--thetas", f.thetas, "cone openings in (0, pi)");
  auto* ellipsoid = app.add_subcommand("sharpness-ellipsoid", "ellipsoid family in the orthant");
  ellipsoid->add_option("--cone", f.cone, "orthant cone JSON file");
  ellipsoid->add_option("--h-min", f.h_min);
  ellipsoid->add_option("--h-max", f.h_max);
  auto* constant = app.add_subcommand("constant", "empirical stability constant");
  constant->add_option("--cone", f.cone, "cone JSON file");
  constant->add_option("--trials", f.trials);
  constant->add_option("--thetas", f.thetas, "openings for the growth scan");
  auto* lemmas = app.add_subcommand("lemmas", "translation scans of a bounded region");
  lemmas->add_option("--region", f.region, "region JSON file (unit square by default)");
  lemmas->add_option("--cone", f.cone, "cone JSON file, for cone-dependent regions");
  lemmas->add_option("--directions", f.directions);
  lemmas->add_option("--radii", f.radii);
  auto* wedge = app.add_subcommand("wedge", "set identities for the reduced wedge");
  wedge->add_option("--cone", f.cone, "cone JSON file");
  wedge->add_option("--y", f.ys, "translation, repeatable, dim numbers each");
  for (auto* s : {theta, ellipsoid, constant}) {
    s->add_option("--distance", f.distance, "edge half ball distance from the apex");
    s->add_option("--tolerance", f.tolerance, "closed form agreement");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig c = resolve(command, f);
    if (command == "deficit") return run_deficit(c);
    if (command == "transport") return run_transport(c, f.out);
    if (command == "sharpness-theta") return run_theta(c);
    if (command == "sharpness-ellipsoid") return run_ellipsoid(c);
    if (command == "constant") return run_constant(c);
    if (command == "lemmas") return run_lemmas(c);
    return run_wedge(c);
  } catch (const ConfigError& e) {
    for (const auto& m : e.errors()) std::cerr << "error: " << m << "\n";
    return kExitValidation;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
