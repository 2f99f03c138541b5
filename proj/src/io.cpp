#include "conestab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace conestab {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Validation helpers collect messages instead of throwing.
struct Collector {
  std::vector<std::string> errors;
  void add(std::string e) { errors.push_back(std::move(e)); }
};

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where, Collector& c) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) c.add("unknown key \"" + it.key() + "\" in " + where);
}

Vec vec_from(const Json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw ConfigError({"\"" + name + "\" must be a nonempty array of numbers"});
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError({"\"" + name + "\" must be a nonempty array of numbers"});
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Mat mat_from(const Json& j, const std::string& name) {
  const std::string msg = "\"" + name + "\" must be an array of equal-length numeric rows";
  if (!j.is_array()) throw ConfigError({msg});
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError({msg});
  Mat M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError({msg});
    M.row(static_cast<Eigen::Index>(i)) = vec_from(j[i], name).transpose();
  }
  return M;
}

double num_from(const Json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError({"\"" + key + "\" must be a number"});
  return j.at(key).get<double>();
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError({"missing key \"" + key + "\" in " + where});
  return j.at(key);
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Mat& M) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(vec_json(M.row(i).transpose()));
  return a;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Line and column (1-based) of a byte offset.
std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError({what + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                       std::to_string(col)});
  }
}

const std::set<std::string> kCommands = {"deficit", "transport", "sharpness-theta", "sharpness-ellipsoid",
                                         "constant", "lemmas", "wedge"};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors, "; ")), errors_(std::move(errors)) {}

ConvexCone cone_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError({"cone must be an object"});
  const std::string type = need(j, "type", "cone").is_string() ? j.at("type").get<std::string>() : "";
  Collector c;
  if (type == "orthant" || type == "whole_space") {
    check_keys(j, {"type", "dim"}, "cone", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    const Json& d = need(j, "dim", "cone");
    if (!d.is_number_integer() || d.get<int>() < 1) throw ConfigError({"cone \"dim\" must be a positive integer"});
    return type == "orthant" ? ConvexCone::orthant(d.get<int>()) : ConvexCone::whole_space(d.get<int>());
  }
  if (type == "planar") {
    check_keys(j, {"type", "opening"}, "cone", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return ConvexCone::planar(num_from(j, "opening", kPi / 2));
  }
  if (type == "polyhedral") {
    check_keys(j, {"type", "normals", "axis", "dim"}, "cone", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    const Mat N = mat_from(need(j, "normals", "cone"), "normals");
    if (N.rows() == 0) {
      const Json& d = need(j, "dim", "cone");
      if (!d.is_number_integer() || d.get<int>() < 1) throw ConfigError({"cone \"dim\" must be a positive integer"});
      return ConvexCone::whole_space(d.get<int>());
    }
    std::optional<Vec> axis;
    if (j.contains("axis")) axis = vec_from(j.at("axis"), "axis");
    return ConvexCone::polyhedral(N, axis);
  }
  if (type == "circular") {
    check_keys(j, {"type", "axis", "half_angle"}, "cone", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return ConvexCone::circular(vec_from(need(j, "axis", "cone"), "axis"), num_from(j, "half_angle", kPi / 4));
  }
  if (type == "half_space") {
    check_keys(j, {"type", "normal"}, "cone", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return ConvexCone::half_space(vec_from(need(j, "normal", "cone"), "normal"));
  }
  throw ConfigError({"unknown cone type \"" + type + "\""});
}

Json cone_to_json(const ConvexCone& cone) {
  Json j;
  if (cone.kind() == ConvexCone::Kind::Circular) {
    j["type"] = "circular";
    j["axis"] = vec_json(cone.axis());
    j["half_angle"] = cone.half_angle();
    return j;
  }
  j["type"] = "polyhedral";
  j["normals"] = mat_json(cone.normals());
  if (cone.has_user_axis()) j["axis"] = vec_json(cone.axis());
  j["dim"] = cone.dim();
  return j;
}

Region region_from_json(const Json& j, const std::optional<ConvexCone>& cone) {
  if (!j.is_object()) throw ConfigError({"region must be an object"});
  const Json& t = need(j, "type", "region");
  if (!t.is_string()) throw ConfigError({"region \"type\" must be a string"});
  const std::string type = t.get<std::string>();
  const std::set<std::string> common = {"type", "scale", "translate", "clip"};
  auto allowed = [&](std::initializer_list<std::string> extra) {
    std::set<std::string> s = common;
    s.insert(extra.begin(), extra.end());
    Collector c;
    check_keys(j, s, "region \"" + type + "\"", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
  };
  auto need_cone = [&]() -> const ConvexCone& {
    if (!cone) throw ConfigError({"region \"" + type + "\" needs a cone"});
    return *cone;
  };

  std::optional<Region> r;
  if (type == "polytope") {
    allowed({"A", "b"});
    r = Region::polytope(mat_from(need(j, "A", "region"), "A"), vec_from(need(j, "b", "region"), "b"));
  } else if (type == "box") {
    allowed({"lo", "hi"});
    r = Region::box(vec_from(need(j, "lo", "region"), "lo"), vec_from(need(j, "hi", "region"), "hi"));
  } else if (type == "ball") {
    allowed({"center", "radius"});
    r = Region::ball(vec_from(need(j, "center", "region"), "center"), num_from(j, "radius", 1.0));
  } else if (type == "ellipsoid") {
    allowed({"center", "shape"});
    r = Region::ellipsoid(vec_from(need(j, "center", "region"), "center"), mat_from(need(j, "shape", "region"), "shape"));
  } else if (type == "half_ball") {
    allowed({"center", "radius", "inward"});
    r = Region::half_ball(vec_from(need(j, "center", "region"), "center"), num_from(j, "radius", 1.0),
                          vec_from(need(j, "inward", "region"), "inward"));
  } else if (type == "sector") {
    allowed({"radius", "center"});
    const ConvexCone& C = need_cone();
    const Vec center = j.contains("center") ? vec_from(j.at("center"), "center") : Vec::Zero(C.dim());
    r = Region::spherical_sector(C, num_from(j, "radius", 1.0), center);
  } else if (type == "ellipsoid_sector") {
    allowed({"center", "shape"});
    const ConvexCone& C = need_cone();
    const Vec center = j.contains("center") ? vec_from(j.at("center"), "center") : Vec::Zero(C.dim());
    r = Region::ellipsoid_sector(C, center, mat_from(need(j, "shape", "region"), "shape"));
  } else if (type == "edge_half_ball") {
    allowed({"distance", "radius"});
    r = edge_half_ball(need_cone(), num_from(j, "distance", 10.0), num_from(j, "radius", 1.0));
  } else if (type == "random_polytope") {
    allowed({"seed"});
    const Json& s = need(j, "seed", "region");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError({"region \"seed\" must be a nonnegative integer"});
    r = random_polytope(need_cone(), s.get<std::uint64_t>());
  } else if (type == "union" || type == "intersection" || type == "difference") {
    allowed({"operands"});
    const Json& ops = need(j, "operands", "region");
    if (!ops.is_array() || ops.size() < 2 || (type == "difference" && ops.size() != 2))
      throw ConfigError({"\"operands\" of " + type + " must list two regions" +
                         (type == "difference" ? std::string() : std::string(" or more"))});
    r = region_from_json(ops[0], cone);
    for (std::size_t i = 1; i < ops.size(); ++i) {
      const Region b = region_from_json(ops[i], cone);
      r = type == "union" ? Region::unite(*r, b)
                          : type == "intersection" ? Region::intersect(*r, b) : Region::subtract(*r, b);
    }
  } else {
    throw ConfigError({"unknown region type \"" + type + "\""});
  }
  if (j.contains("scale")) r = r->scaled(num_from(j, "scale", 1.0));
  if (j.contains("translate")) r = r->translated(vec_from(j.at("translate"), "translate"));
  if (j.contains("clip")) {
    if (!j.at("clip").is_boolean()) throw ConfigError({"\"clip\" must be true or false"});
    if (j.at("clip").get<bool>()) r = r->clipped_to(need_cone());
  }
  return *r;
}

SectorBody body_from_json(const Json& j, const ConvexCone& cone) {
  if (!j.is_object()) throw ConfigError({"body must be an object"});
  const Json& t = need(j, "type", "body");
  if (!t.is_string()) throw ConfigError({"body \"type\" must be a string"});
  const std::string type = t.get<std::string>();
  Collector c;
  auto center = [&] { return j.contains("center") ? vec_from(j.at("center"), "center") : Vec::Zero(cone.dim()); };
  if (type == "sector") {
    check_keys(j, {"type", "radius", "center"}, "body", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return SectorBody::sector(cone, num_from(j, "radius", 1.0), center());
  }
  if (type == "polytope") {
    check_keys(j, {"type", "A", "b"}, "body", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return SectorBody::polytope(mat_from(need(j, "A", "body"), "A"), vec_from(need(j, "b", "body"), "b"));
  }
  if (type == "clipped_sector") {
    check_keys(j, {"type", "radius", "center", "A", "b"}, "body", c);
    if (!c.errors.empty()) throw ConfigError(c.errors);
    return SectorBody::clipped_sector(cone, num_from(j, "radius", 1.0), center(),
                                      mat_from(need(j, "A", "body"), "A"), vec_from(need(j, "b", "body"), "b"));
  }
  throw ConfigError({"unknown body type \"" + type + "\""});
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const Json j = parse_json(text, "config");
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
  Collector c;
  check_keys(j,
             {"command", "cone", "cone_file", "region", "region_file", "body", "seed", "samples", "boundary_samples",
              "count", "thetas", "h_min", "h_max", "trials", "directions", "radii", "ys", "distance", "tolerance",
              "out_dir"},
             "config", c);
  RunConfig cfg;

  auto get_int = [&](const char* key, auto& dst, long long lo) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < lo) {
      c.add("\"" + std::string(key) + "\" must be an integer >= " + std::to_string(lo));
      return;
    }
    dst = static_cast<std::remove_reference_t<decltype(dst)>>(v.get<long long>());
  };
  auto get_num = [&](const char* key, double& dst, bool positive) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    if (!v.is_number() || (positive && !(v.get<double>() > 0.0))) {
      c.add("\"" + std::string(key) + "\" must be a " + (positive ? "positive " : "") + "number");
      return;
    }
    dst = v.get<double>();
  };

  if (j.contains("command")) {
    if (!j.at("command").is_string() || !kCommands.count(j.at("command").get<std::string>()))
      c.add("\"command\" must be one of deficit, transport, sharpness-theta, sharpness-ellipsoid, constant, lemmas, "
            "wedge");
    else
      cfg.command = j.at("command").get<std::string>();
  }
  if (j.contains("seed")) {
    const Json& v = j.at("seed");
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
      cfg.seed = v.get<std::uint64_t>();
    else
      c.add("\"seed\" must be a nonnegative integer");
  }
  get_int("samples", cfg.samples, 1);
  get_int("boundary_samples", cfg.boundary_samples, 1);
  get_int("count", cfg.count, 1);
  get_int("h_min", cfg.h_min, 1);
  get_int("h_max", cfg.h_max, 1);
  get_int("trials", cfg.trials, 1);
  get_int("directions", cfg.directions, 1);
  get_int("radii", cfg.radii, 1);
  get_num("distance", cfg.distance, true);
  get_num("tolerance", cfg.tolerance, true);
  if (cfg.h_min > cfg.h_max) c.add("\"h_min\" must not exceed \"h_max\"");
  if (j.contains("out_dir")) {
    if (j.at("out_dir").is_string())
      cfg.out_dir = j.at("out_dir").get<std::string>();
    else
      c.add("\"out_dir\" must be a string");
  }
  if (j.contains("thetas")) {
    const Json& v = j.at("thetas");
    bool ok = v.is_array();
    if (ok)
      for (const Json& t : v) ok = ok && t.is_number();
    if (ok)
      for (const Json& t : v) cfg.thetas.push_back(t.get<double>());
    else
      c.add("\"thetas\" must be an array of numbers");
  }
  if (j.contains("ys")) {
    try {
      const Mat Y = mat_from(j.at("ys"), "ys");
      for (Eigen::Index i = 0; i < Y.rows(); ++i) cfg.ys.push_back(Y.row(i).transpose());
    } catch (const ConfigError& e) {
      for (const auto& m : e.errors()) c.add(m);
    }
  }

  auto load_ref = [&](const char* inline_key, const char* file_key, std::optional<Json>& dst,
                      std::optional<std::string>& path_out) {
    if (j.contains(inline_key) && j.contains(file_key)) {
      c.add("give either \"" + std::string(inline_key) + "\" or \"" + file_key + "\", not both");
      return;
    }
    if (j.contains(inline_key)) {
      const Json& v = j.at(inline_key);
      if (v.is_object()) {
        dst = v;
      } else if (v.is_string()) {
        c.add("\"" + std::string(inline_key) + "\" must be an object; use \"" + file_key + "\" for a path");
      } else {
        c.add("\"" + std::string(inline_key) + "\" must be an object");
      }
    }
    if (j.contains(file_key)) {
      if (!j.at(file_key).is_string()) {
        c.add("\"" + std::string(file_key) + "\" must be a path string");
        return;
      }
      const std::string rel = j.at(file_key).get<std::string>();
      const std::filesystem::path p = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : base_dir / rel;
      if (!std::filesystem::exists(p)) {
        c.add("file not found: " + p.string());
        return;
      }
      path_out = rel;
      try {
        dst = parse_json(read_file(p), p.string());
      } catch (const ConfigError& e) {
        for (const auto& m : e.errors()) c.add(m);
      }
    }
  };
  load_ref("cone", "cone_file", cfg.cone, cfg.cone_file);
  load_ref("region", "region_file", cfg.region, cfg.region_file);
  if (j.contains("body")) {
    if (j.at("body").is_object())
      cfg.body = j.at("body");
    else
      c.add("\"body\" must be an object");
  }

  // Build the geometry once so that bad specs are reported at parse time.
  std::optional<ConvexCone> cone;
  if (cfg.cone) {
    try {
      cone = cone_from_json(*cfg.cone);
    } catch (const ConfigError& e) {
      for (const auto& m : e.errors()) c.add(m);
    } catch (const GeometryError& e) {
      c.add(std::string("cone: ") + e.what());
    }
  }
  auto report = [&](const char* what, auto&& build) {
    try {
      build();
    } catch (const ConfigError& e) {
      for (const auto& m : e.errors()) c.add(m);
    } catch (const GeometryError& e) {
      c.add(std::string(what) + ": " + e.what());
    }
  };
  if (cfg.region && !(cfg.cone && !cone)) report("region", [&] { region_from_json(*cfg.region, cone); });
  if (cfg.body) {
    if (cone)
      report("body", [&] { body_from_json(*cfg.body, *cone); });
    else if (!cfg.cone)
      c.add("\"body\" needs a cone");
  }
  if (!c.errors.empty()) throw ConfigError(c.errors);
  return cfg;
}

Json config_to_json(const RunConfig& cfg) {
  Json j;
  if (!cfg.command.empty()) j["command"] = cfg.command;
  if (cfg.cone) j["cone"] = *cfg.cone;
  if (cfg.region) j["region"] = *cfg.region;
  if (cfg.body) j["body"] = *cfg.body;
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["boundary_samples"] = cfg.boundary_samples;
  j["count"] = cfg.count;
  if (!cfg.thetas.empty()) j["thetas"] = cfg.thetas;
  j["h_min"] = cfg.h_min;
  j["h_max"] = cfg.h_max;
  j["trials"] = cfg.trials;
  j["directions"] = cfg.directions;
  j["radii"] = cfg.radii;
  if (!cfg.ys.empty()) {
    Json ys = Json::array();
    for (const Vec& y : cfg.ys) ys.push_back(vec_json(y));
    j["ys"] = ys;
  }
  j["distance"] = cfg.distance;
  j["tolerance"] = cfg.tolerance;
  j["out_dir"] = cfg.out_dir;
  return j;
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string s = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_csv(const Table& table) {
  std::string out = join(table.columns, ",") + "\n";
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const Cell& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        cells.push_back(format_double(*d));
      } else if (const long long* i = std::get_if<long long>(&cell)) {
        cells.push_back(std::to_string(*i));
      } else {
        const std::string& s = std::get<std::string>(cell);
        if (s.find_first_of(",\"\n") == std::string::npos) {
          cells.push_back(s);
        } else {
          std::string q = "\"";
          for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          cells.push_back(q + "\"");
        }
      }
    }
    out += join(cells, ",") + "\n";
  }
  return out;
}

Json to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      const Cell& cell = row[i];
      if (const double* d = std::get_if<double>(&cell)) {
        if (std::isfinite(*d))
          r[table.columns[i]] = *d;
        else
          r[table.columns[i]] = nullptr;
      } else if (const long long* v = std::get_if<long long>(&cell)) {
        r[table.columns[i]] = *v;
      } else {
        r[table.columns[i]] = std::get<std::string>(cell);
      }
    }
    rows.push_back(r);
  }
  Json j;
  j["columns"] = table.columns;
  j["rows"] = rows;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_csv(const std::filesystem::path& path, const Table& table) { write_text(path, to_csv(table)); }

void write_json(const std::filesystem::path& path, const Json& json) { write_text(path, json.dump(2) + "\n"); }

std::string loglog_svg(const PlotSeries& s) {
  const double W = 640, H = 480, L = 70, R = 20, T = 20, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
    if (s.x[i] > 0.0 && s.y[i] > 0.0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
      pts.emplace_back(std::log10(s.x[i]), std::log10(s.y[i]));
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  double x0 = -1, x1 = 0, y0 = -1, y1 = 0;
  if (!pts.empty()) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -x0;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  x0 = std::floor(x0);
  x1 = std::max(std::ceil(x1), x0 + 1);
  y0 = std::floor(y0);
  y1 = std::max(std::ceil(y1), y0 + 1);
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  o << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
    << "\" height=\"" << H - T - B << "\"/></g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (double e = x0; e <= x1 + 1e-9; e += 1.0)
    o << "<text x=\"" << format_short(px(e)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">1e"
      << static_cast<int>(e) << "</text>\n";
  for (double e = y0; e <= y1 + 1e-9; e += 1.0)
    o << "<text x=\"" << L - 6 << "\" y=\"" << format_short(py(e) + 4) << "\" text-anchor=\"end\">1e"
      << static_cast<int>(e) << "</text>\n";
  o << "<text x=\"" << format_short(L + (W - L - R) / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << s.x_label << "</text>\n";
  o << "<text x=\"16\" y=\"" << format_short(T + (H - T - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << format_short(T + (H - T - B) / 2) << ")\">" << s.y_label << "</text>\n</g>\n";
  o << "<g fill=\"steelblue\">\n";
  for (const auto& [x, y] : pts)
    o << "<circle cx=\"" << format_short(px(x)) << "\" cy=\"" << format_short(py(y)) << "\" r=\"3\"/>\n";
  o << "</g>\n";
  if (s.fit) {
    // log10 A = slope log10 mu + intercept / ln 10
    const double c = s.fit->intercept / std::log(10.0);
    o << "<line x1=\"" << format_short(px(x0)) << "\" y1=\"" << format_short(py(s.fit->slope * x0 + c)) << "\" x2=\""
      << format_short(px(x1)) << "\" y2=\"" << format_short(py(s.fit->slope * x1 + c))
      << "\" stroke=\"firebrick\" stroke-width=\"1.5\" clip-path=\"inset(0)\"/>\n";
    o << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 << "\" font-family=\"sans-serif\" font-size=\"12\">slope "
      << format_short(s.fit->slope) << " [" << format_short(s.fit->ci_low) << ", " << format_short(s.fit->ci_high)
      << "]</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

Json run_metadata(const RunConfig& config) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  Json j;
  j["tool"] = "conestab";
  j["version"] = kToolVersion;
  j["command"] = config.command;
  j["seed"] = config.seed;
  j["config_hash"] = std::string("fnv1a64:") + hash;
  return j;
}

Table family_table(const FamilyResult& f) {
  Table t;
  t.columns = {"parameter", "mu",       "mu_std_error",          "mu_closed",       "delta_K",
               "asymmetry", "constrained_asymmetry", "stability_ratio", "identity_residual"};
  for (const FamilyMember& m : f.members)
    t.rows.push_back({m.parameter, m.mu.value, m.mu.std_error, m.mu_closed, m.delta_K.value, m.asymmetry,
                      m.constrained_asymmetry, m.stability_ratio, m.identity_residual});
  return t;
}

Table deficit_table(const DeficitReport& r) {
  Table t;
  t.columns = {"volume", "rel_perimeter", "aniso_perimeter", "mu", "mu_std_error", "mu_sector", "delta_K",
               "delta_K_std_error", "s", "asymmetry", "constrained_asymmetry", "isoperimetric_margin", "n_K",
               "exact"};
  const int n = static_cast<int>(r.asymmetry_argmin.size());
  for (int i = 0; i < n; ++i) t.columns.push_back("asymmetry_argmin_" + std::to_string(i));
  for (int i = 0; i < n; ++i) t.columns.push_back("best_translation_" + std::to_string(i));
  std::vector<Cell> row = {r.volume.value,
                           r.rel_perimeter.value,
                           r.aniso_perimeter.value,
                           r.mu.value,
                           r.mu.std_error,
                           r.mu_sector.value,
                           r.delta_K.value,
                           r.delta_K.std_error,
                           r.s,
                           r.asymmetry,
                           r.constrained_asymmetry,
                           r.isoperimetric_margin,
                           r.n_K,
                           static_cast<long long>(r.exact)};
  for (int i = 0; i < n; ++i) row.push_back(r.asymmetry_argmin[i]);
  for (int i = 0; i < n; ++i) row.push_back(r.best_translation[i]);
  t.rows.push_back(std::move(row));
  return t;
}

Table chain_table(const GromovChainReport& r) {
  Table t;
  t.columns = {"term", "value", "std_error"};
  auto add = [&](const std::string& name, const Estimate& e) { t.rows.push_back({name, e.value, e.std_error}); };
  add("n_vol", r.n_vol);
  add("boundary_transport_integral", r.boundary_transport_integral);
  add("aniso_perimeter", r.aniso_perimeter);
  add("rel_perimeter", r.rel_perimeter);
  add("margin_transport", r.margins[0]);
  add("margin_aniso", r.margins[1]);
  add("margin_perimeter", r.margins[2]);
  add("cone_part", r.cone_part);
  t.rows.push_back({std::string("cone_sign_max"), r.cone_sign_max, 0.0});
  t.rows.push_back({std::string("boundary_bias"), r.boundary_bias, 0.0});
  t.rows.push_back({std::string("bandwidth"), r.bandwidth, 0.0});
  t.rows.push_back({std::string("scale"), r.scale, 0.0});
  t.rows.push_back({std::string("monotone_3sigma"), r.monotone() ? 1.0 : 0.0, 0.0});
  return t;
}

Table plan_table(const TransportPlan& p) {
  Table t;
  const int n = p.dim();
  t.columns = {"index", "target_index"};
  for (int i = 0; i < n; ++i) t.columns.push_back("source_" + std::to_string(i));
  for (int i = 0; i < n; ++i) t.columns.push_back("target_" + std::to_string(i));
  for (int k = 0; k < p.count(); ++k) {
    std::vector<Cell> row = {static_cast<long long>(k), static_cast<long long>(p.assignment[k])};
    for (int i = 0; i < n; ++i) row.push_back(p.source_points(k, i));
    for (int i = 0; i < n; ++i) row.push_back(p.target_points(p.assignment[k], i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table constant_table(const ConstantEstimate& e, const std::vector<ThetaConstant>& growth) {
  Table t;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  t.columns = {"series", "index", "parameter", "mu", "constrained_asymmetry", "ratio"};
  for (std::size_t i = 0; i < e.ratios.size(); ++i)
    t.rows.push_back({e.kinds[i], static_cast<long long>(i), nan, e.mus[i], e.asymmetries[i], e.ratios[i]});
  t.rows.push_back({std::string("estimate"), static_cast<long long>(e.argmax), nan, nan, nan, e.estimate});
  for (std::size_t i = 0; i < growth.size(); ++i)
    t.rows.push_back({std::string("theta_growth"), static_cast<long long>(i), growth[i].theta, nan, nan,
                      growth[i].estimate});
  return t;
}

Table scan_table(const TranslationScan& upper, const LowerBoundScan& lower) {
  Table t;
  int n = 0;
  if (!upper.rows.empty()) n = static_cast<int>(upper.rows.front().direction.size());
  if (!lower.rows.empty()) n = static_cast<int>(lower.rows.front().direction.size());
  t.columns = {"scan"};
  for (int i = 0; i < n; ++i) t.columns.push_back("direction_" + std::to_string(i));
  for (const char* c : {"t", "f", "ratio"}) t.columns.push_back(c);
  auto add = [&](const std::string& name, const TranslationRow& r) {
    std::vector<Cell> row = {name};
    for (int i = 0; i < n; ++i) row.push_back(r.direction[i]);
    row.push_back(r.t);
    row.push_back(r.f);
    row.push_back(r.ratio);
    t.rows.push_back(std::move(row));
  };
  for (const auto& r : upper.rows) add("upper", r);
  for (const auto& r : lower.rows) add("lower", r);
  return t;
}

Table wedge_table(const WedgeReport& w) {
  Table t;
  const int n = w.rows.empty() ? 0 : static_cast<int>(w.rows.front().y.size());
  for (int i = 0; i < n; ++i) t.columns.push_back("y_" + std::to_string(i));
  for (const char* c : {"identity", "samples", "witnesses", "measure", "measure_std_error"}) t.columns.push_back(c);
  for (const WedgeRow& r : w.rows) {
    std::vector<Cell> row;
    for (int i = 0; i < n; ++i) row.push_back(r.y[i]);
    row.push_back(std::string(r.upward ? "upward" : "downward"));
    row.push_back(static_cast<long long>(r.samples));
    row.push_back(static_cast<long long>(r.witnesses));
    row.push_back(r.measure.value);
    row.push_back(r.measure.std_error);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Json plan_to_json(const TransportPlan& p) {
  Json j;
  j["count"] = p.count();
  j["dim"] = p.dim();
  j["seed"] = p.seed;
  j["exact"] = p.exact;
  j["cost"] = p.cost;
  j["duality_gap"] = p.duality_gap;
  j["displacement_mean"] = vec_json(p.displacement_mean);
  j["displacement_variance"] = p.displacement_variance;
  j["scale"] = p.scale;
  j["region_volume"] = p.region_volume;
  j["target_volume"] = p.target_volume;
  j["x0"] = vec_json(p.x0);
  j["source_points"] = mat_json(p.source_points);
  j["target_points"] = mat_json(p.target_points);
  j["assignment"] = p.assignment;
  return j;
}

Json fit_to_json(const std::optional<ExponentFit>& fit) {
  if (!fit) return nullptr;
  Json j;
  j["slope"] = fit->slope;
  j["beta"] = fit->beta();
  j["intercept"] = fit->intercept;
  j["ci_low"] = fit->ci_low;
  j["ci_high"] = fit->ci_high;
  j["points"] = fit->points;
  return j;
}

}  // namespace conestab
