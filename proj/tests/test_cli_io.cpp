#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conestab/io.hpp"

using namespace conestab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("conestab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> errors_of(const std::string& text, const fs::path& base = ".") {
  try {
    parse_config(text, base);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& errors, const std::string& needle) {
  for (const std::string& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONESTAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

FamilyResult family_of(int n) {
  FamilyResult f;
  f.name = "test";
  for (int i = 0; i < n; ++i) {
    FamilyMember m;
    m.parameter = 1.0 + i;
    m.mu = Estimate{0.1 / (i + 1), 0.0, true};
    m.mu_closed = std::nan("");
    f.members.push_back(m);
  }
  return f;
}

}  // namespace

TEST_CASE("configuration defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.seed == 1729);
  CHECK(c.samples == 1'000'000);
  CHECK(c.count == 2000);
  CHECK(c.h_min == 2);
  CHECK(c.h_max == 64);
  CHECK_FALSE(c.cone.has_value());
}

TEST_CASE("configuration errors are all reported") {
  SUBCASE("unknown keys are named") {
    CHECK(any_contains(errors_of(R"({"conee": {"type": "orthant", "dim": 2}})"), "\"conee\""));
    CHECK(any_contains(errors_of(R"({"cone": {"type": "orthant", "dim": 2, "open": 1}})"), "\"open\""));
  }
  SUBCASE("several problems at once") {
    const auto e = errors_of(R"({"seed": -1, "bogus": 1, "cone_file": "nowhere.json", "h_min": 9, "h_max": 3})");
    CHECK(e.size() >= 4);
    CHECK(any_contains(e, "seed"));
    CHECK(any_contains(e, "\"bogus\""));
    CHECK(any_contains(e, "nowhere.json"));
    CHECK(any_contains(e, "must not exceed"));
  }
  SUBCASE("malformed JSON gives line and column") {
    const auto e = errors_of("{\n  \"seed\": 3,\n  ]\n}");
    REQUIRE(e.size() == 1);
    CHECK(e[0].find("line 3") != std::string::npos);
    CHECK(e[0].find("column") != std::string::npos);
  }
  SUBCASE("geometry is validated") {
    CHECK(any_contains(errors_of(R"({"cone": {"type": "planar", "opening": 4}})"), "cone"));
    CHECK(any_contains(errors_of(R"({"region": {"type": "sector"}})"), "needs a cone"));
    CHECK(any_contains(errors_of(R"({"body": {"type": "sector", "radius": 1}})"), "needs a cone"));
    CHECK(any_contains(errors_of(R"({"command": "sharpen"})"), "command"));
  }
}

TEST_CASE("file references resolve against the base directory") {
  const fs::path d = scratch_dir("refs");
  put(d / "cone.json", R"({"type": "planar", "opening": 2.0})");
  const RunConfig c = parse_config(R"({"cone_file": "cone.json"})", d);
  REQUIRE(c.cone.has_value());
  CHECK(cone_from_json(*c.cone).solid_angle().value == doctest::Approx(2.0));
  CHECK(any_contains(errors_of(R"({"cone_file": "cone.json", "cone": {"type": "orthant", "dim": 2}})", d), "cone"));
}

TEST_CASE("configuration round trip") {
  const std::string text = R"({
    "command": "wedge",
    "cone": {"type": "circular", "axis": [0, 0, 1], "half_angle": 0.7},
    "region": {"type": "box", "lo": [0, 0, 0], "hi": [1, 1, 1]},
    "seed": 99, "samples": 5000, "boundary_samples": 700, "count": 50,
    "thetas": [1.0, 2.5], "h_min": 3, "h_max": 9, "trials": 4,
    "directions": 8, "radii": 6, "ys": [[0, 0, 0.1], [0, 0, -0.2]],
    "distance": 5, "tolerance": 1e-7, "out_dir": "elsewhere"
  })";
  const RunConfig a = parse_config(text);
  const RunConfig b = parse_config(config_to_json(a).dump());
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(b.seed == 99);
  CHECK(b.ys.size() == 2);
  CHECK(b.ys[1][2] == -0.2);
  RunConfig c = a;
  c.seed = 100;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("cone JSON round trip") {
  for (const char* spec : {R"({"type": "orthant", "dim": 3})", R"({"type": "planar", "opening": 1.3})",
                           R"({"type": "circular", "axis": [0, 0, 1], "half_angle": 0.5})",
                           R"({"type": "half_space", "normal": [0, 1]})"}) {
    const ConvexCone c = cone_from_json(Json::parse(spec));
    const ConvexCone d = cone_from_json(cone_to_json(c));
    CHECK(d.dim() == c.dim());
    CHECK(d.lineality_dim() == c.lineality_dim());
    CHECK(d.solid_angle().value == doctest::Approx(c.solid_angle().value).epsilon(1e-9));
  }
}

TEST_CASE("tables") {
  SUBCASE("an empty family has only a header") {
    const std::string csv = to_csv(family_table(family_of(0)));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    CHECK(csv.rfind("parameter,mu,", 0) == 0);
  }
  SUBCASE("one row per member") {
    const std::string csv = to_csv(family_table(family_of(3)));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(to_json(family_table(family_of(3)))["rows"].size() == 3);
  }
  SUBCASE("doubles keep every digit") {
    Table t{{"x", "name"}, {{Cell{0.1}, Cell{std::string("a,b")}}, {Cell{1.0 / 3.0}, Cell{std::string("q\"")}}}};
    const std::string csv = to_csv(t);
    CHECK(csv == "x,name\n0.10000000000000001,\"a,b\"\n0.33333333333333331,\"q\"\"\"\n");
    CHECK(to_csv(t) == csv);
  }
  SUBCASE("non-finite values") {
    Table t{{"x"}, {{Cell{std::nan("")}}}};
    CHECK(to_csv(t) == "x\nnan\n");
    CHECK(to_json(t)["rows"][0]["x"].is_null());
  }
}

TEST_CASE("metadata") {
  RunConfig c = parse_config(R"({"command": "deficit", "seed": 7})");
  const Json m = run_metadata(c);
  CHECK(m["tool"] == "conestab");
  CHECK(m["version"] == kToolVersion);
  CHECK(m["command"] == "deficit");
  CHECK(m["seed"] == 7);
  CHECK(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("fit and plot output") {
  CHECK(fit_to_json(std::nullopt).is_null());
  ExponentFit fit;
  fit.slope = 0.5;
  const Json j = fit_to_json(fit);
  CHECK(j["beta"] == 2.0);
  PlotSeries s;
  s.x = {1e-3, 1e-2, 0.0};
  s.y = {0.03, 0.1, 1.0};
  s.fit = fit;
  const std::string svg = loglog_svg(s);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("command line") {
  const fs::path d = scratch_dir("cli");
  put(d / "cone.json", R"({"type": "planar", "opening": 1.5707963267948966})");
  put(d / "bad_cone.json", R"({"type": "planar", "opening": 4})");
  put(d / "region.json", R"({"type": "box", "lo": [0.2, 0.3], "hi": [0.6, 0.5]})");
  put(d / "config.json", "{\n  \"seed\": 3,\n  \"wat\": 1\n}");
  const std::string out = " --out-dir " + (d / "out").string();
  const std::string files = " --cone " + (d / "cone.json").string() + " --region " + (d / "region.json").string();

  CHECK(run_cli("deficit --samples 20000 --boundary-samples 2000" + files + out) == 0);
  CHECK(fs::exists(d / "out" / "deficit.csv"));
  CHECK(fs::exists(d / "out" / "deficit.json"));
  const Json meta = Json::parse(slurp(d / "out" / "metadata.json"));
  CHECK(meta["command"] == "deficit");

  CHECK(run_cli("deficit --cone " + (d / "bad_cone.json").string() + " --region " + (d / "region.json").string() +
                out) == 1);
  CHECK(run_cli("--config " + (d / "config.json").string() + " deficit" + files + out) == 1);
  CHECK(run_cli("no-such-command") != 0);
  CHECK(run_cli("lemmas --directions 0" + out) == 1);
  // A closed form that cannot be met is a numerical failure.
  CHECK(run_cli("sharpness-theta --thetas 1.0 --tolerance 1e-300 --samples 1000 --boundary-samples 500" + out) == 2);
}
