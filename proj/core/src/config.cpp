#include "grushin/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace grushin {

namespace {

using nlohmann::json;

json space_json(double gamma, int m, int k) { return {{"gamma", gamma}, {"m", m}, {"k", k}}; }

json make_schema() {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["space"] = space_json(1.0, 1, 1);
  j["coefficients"] = {
      {"family", "example"},
      {"lambda", 0.5},
      {"Lambda", 1.0},
      {"example", {{"f0", 0.1}, {"f1", 0.0}, {"g0", 0.1}, {"g1", 0.0}, {"h0", 0.1}, {"h1", 0.0}}},
      {"violating_c", 1.0}};
  j["expect"] = "pass";
  j["seed"] = 1;
  j["threads"] = 1;
  j["suites"] = json::array({"identities"});
  j["identities"] = {
      {"ladder_spaces", json::array({space_json(1.0, 1, 1)})},
      {"ladder_points", 200},
      {"ladder_tolerance", 1e-6},
      {"identity_points", 100},
      {"identity_tolerance", 1e-8},
      {"rellich", {{"grids", {32, 64, 128, 256}}, {"r_in", 0.1}, {"r_out", 0.9}, {"min_order", 2.0}, {"max_final", 1e-3}}},
      {"scaling", {{"radii", {1.0, 0.5, 0.25}}, {"tolerance", 0.05}, {"n_z", 64}}}};
  j["bounds"] = {{"hypothesis_points", 2000},
                    {"cloud", 20000},
                    {"rho_min", 0.01},
                    {"rho_max", 1.0},
                    {"psi_min", 1e-3},
                    {"growth_tolerance", 0.1},
                    {"crosscheck_points", 100}};
  j["carleman"] = {{"kinds", {"est1", "df", "f10", "har1"}},
                   {"parameters", {20.0, 40.0, 80.0, 160.0}},
                   {"epsilon", 0.5},
                   {"R", 0.5},
                   {"df_K", 10.0},
                   {"f10_q", 1.5},
                   {"f10_c", 1.0},
                   {"grid", {{"gauss", 8}, {"radial_panels", 16}, {"angle_panels", 12}, {"sphere_points", 16}}},
                   {"growth_tolerance", 0.1},
                   {"substitution_tolerance", 0.01},
                   {"reproduce_tolerance", 0.1}};
  j["ucp"] = {{"spaces", json::array({{{"gamma", 1.0}, {"m", 1}, {"k", 1}, {"grids", {17, 33, 65, 129}}},
                                      {{"gamma", 0.5}, {"m", 2}, {"k", 1}, {"grids", {9, 17, 33, 65}}}})},
              {"annulus_inner", 0.25},
              {"potential_K", 10.0},
              {"sublinear_q", 1.5},
              {"sublinear_c", 0.5},
              {"sublinear_grid", 65},
              {"K", {1.0, 10.0, 100.0, 1000.0}},
              {"sweep_grid", 65},
              {"radii", {0.5, 0.4, 0.3, 0.2, 0.15, 0.1}},
              {"hardy_inner", 0.05},
              {"hardy_C", 10.0},
              {"solver_tol", 1e-12},
              {"max_iter", 20000},
              {"min_order", 1.8},
              {"max_exponent", 1.0}};
  j["output"] = {{"dir", "out"}, {"baseline", ""}};
  return j;
}

std::string type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

bool type_matches(const json& schema, const json& v) {
  if (schema.is_number_integer()) return v.is_number_integer();
  if (schema.is_number()) return v.is_number();
  return type_name(schema) == type_name(v);
}

json merge_required(const json& schema, const json& v, const std::string& path);

// Returns schema defaults overlaid with v, checking keys and types.
json merge(const json& schema, const json& v, const std::string& path) {
  if (!type_matches(schema, v))
    throw ConfigError(path + ": expected " + type_name(schema) + ", got " + type_name(v));
  if (schema.is_object()) {
    json out = schema;
    for (const auto& [k, x] : v.items()) {
      if (!schema.contains(k)) throw ConfigError(path + ": unknown key '" + k + "'");
      out[k] = merge(schema[k], x, path + "." + k);
    }
    return out;
  }
  if (schema.is_array()) {
    if (schema.empty()) return v;
    json out = json::array();
    const json& elem = schema.front();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      out.push_back(elem.is_object() ? merge_required(elem, v[i], p) : merge(elem, v[i], p));
    }
    return out;
  }
  return v.is_number() && schema.is_number_float() ? json(v.get<double>()) : v;
}

// Array-of-object elements must spell out every key.
json merge_required(const json& schema, const json& v, const std::string& path) {
  if (v.is_object())
    for (const auto& [k, x] : schema.items())
      if (!v.contains(k)) throw ConfigError(path + ": missing key '" + k + "'");
  return merge(schema, v, path);
}

json yaml_to_json(const YAML::Node& n, const std::string& path) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (o.contains(key)) throw ConfigError(path + ": duplicate key '" + key + "'");
        o[key] = yaml_to_json(kv.second, path + "." + key);
      }
      return o;
    }
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (std::size_t i = 0; i < n.size(); ++i) a.push_back(yaml_to_json(n[i], path + "[" + std::to_string(i) + "]"));
      return a;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      if (s == "true" || s == "false") return s == "true";
      long long i;
      double d;
      if (YAML::convert<long long>::decode(n, i) && s.find_first_of(".eE") == std::string::npos) return i;
      if (YAML::convert<double>::decode(n, d)) return d;
      return s;
    }
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
  }
  return nullptr;
}

template <class T>
T get(const json& j, const char* key) {
  return j.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

int positive_int(const json& j, const char* key, const std::string& path) {
  const long long v = j.at(key).get<long long>();
  require(v > 0 && v <= std::numeric_limits<int>::max(), path + "." + key + " must be a positive integer");
  return int(v);
}

double positive(const json& j, const char* key, const std::string& path) {
  const double v = j.at(key).get<double>();
  require(v > 0, path + "." + key + " must be positive");
  return v;
}

SuiteSelection parse_suite(const std::string& s) {
  SuiteSelection sel;
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  if (head == "identities") sel.kind = SuiteKind::identities;
  else if (head == "bounds") sel.kind = SuiteKind::bounds;
  else if (head == "carleman") sel.kind = SuiteKind::carleman;
  else if (head == "ucp") sel.kind = SuiteKind::ucp;
  else throw ConfigError("suites: unknown suite '" + s + "'");
  if (colon != std::string::npos) {
    require(sel.kind == SuiteKind::carleman, "suites: only carleman takes a kind list ('" + s + "')");
    std::string list = s.substr(colon + 1);
    if (list.size() >= 2 && list.front() == '{' && list.back() == '}') list = list.substr(1, list.size() - 2);
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      try {
        sel.kinds.push_back(carleman_kind_from_string(item));
      } catch (const Error&) {
        throw ConfigError("suites: unknown carleman kind '" + item + "'");
      }
    }
    require(!sel.kinds.empty(), "suites: empty carleman kind list");
  }
  return sel;
}

GrushinSpace parse_space(const json& j) {
  return GrushinSpace(int(j.at("m").get<long long>()), int(j.at("k").get<long long>()), j.at("gamma").get<double>());
}

}  // namespace

const char* to_string(SuiteKind k) {
  switch (k) {
    case SuiteKind::identities: return "identities";
    case SuiteKind::bounds: return "bounds";
    case SuiteKind::carleman: return "carleman";
    case SuiteKind::ucp: return "ucp";
  }
  return "?";
}

const json& config_schema() {
  static const json s = make_schema();
  return s;
}

CoefficientPtr ExperimentConfig::coefficients(const GrushinSpace& s) const {
  if (family == "identity") return std::make_shared<IdentityCoefficients>(s);
  if (family == "example") return std::make_shared<ExampleCoefficients>(s, example, lambda, Lambda);
  return std::make_shared<ViolatingCoefficients>(s, violating_c, lambda, Lambda);
}

void ExperimentConfig::override_seed(std::uint64_t s) {
  seed = s;
  document["seed"] = s;
  // Fixed offsets keep the per-suite clouds distinct while following the one seed.
  ladder.seed = s + 18;
  identities.seed = s + 40;
  hypothesis_samples.seed = s;
  bounds.samples.seed = s;
}

void ExperimentConfig::override_threads(int t) {
  if (t < 1) throw ConfigError("threads must be at least 1");
  threads = t;
  document["threads"] = t;
  ladder.threads = rellich.threads = bounds.threads = ucp.threads = t;
  scaling.grid.threads = t;
  carleman.settings.threads = t;
}

ExperimentConfig parse_config(const json& in, const std::string& base_dir) {
  require(in.is_object(), "config must be a mapping");
  require(in.contains("schema_version"), "config: missing schema_version");
  require(in["schema_version"].is_number_integer() && in["schema_version"].get<long long>() == kConfigSchemaVersion,
          "config: unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.document = merge(config_schema(), in, "config");
  const json& d = c.document;
  try {
    c.space = parse_space(d["space"]);

    const json& co = d["coefficients"];
    c.family = get<std::string>(co, "family");
    require(c.family == "identity" || c.family == "example" || c.family == "violating",
            "coefficients.family must be identity, example or violating");
    c.lambda = get<double>(co, "lambda");
    c.Lambda = get<double>(co, "Lambda");
    require(c.lambda > 0 && c.lambda <= 1, "coefficients.lambda must lie in (0, 1]");
    require(c.Lambda >= 0, "coefficients.Lambda must be non-negative");
    const json& ex = co["example"];
    c.example = {get<double>(ex, "f0"), get<double>(ex, "f1"), get<double>(ex, "g0"),
                 get<double>(ex, "g1"), get<double>(ex, "h0"), get<double>(ex, "h1")};
    c.violating_c = get<double>(co, "violating_c");

    const std::string expect = get<std::string>(d, "expect");
    require(expect == "pass" || expect == "fail", "expect must be pass or fail");
    c.expect_fail = expect == "fail";

    require(d["seed"].get<long long>() >= 0, "seed must be non-negative");
    const auto seed = d["seed"].get<std::uint64_t>();

    require(!d["suites"].empty(), "suites must not be empty");
    for (const auto& s : d["suites"]) c.suites.push_back(parse_suite(s.get<std::string>()));

    const json& id = d["identities"];
    for (const auto& s : id["ladder_spaces"]) c.ladder_spaces.push_back(parse_space(s));
    require(!c.ladder_spaces.empty(), "identities.ladder_spaces must not be empty");
    c.ladder.points = std::size_t(positive_int(id, "ladder_points", "identities"));
    c.ladder.rel_tol = positive(id, "ladder_tolerance", "identities");
    c.identities.points = std::size_t(positive_int(id, "identity_points", "identities"));
    c.identities.rel_tol = positive(id, "identity_tolerance", "identities");
    const json& re = id["rellich"];
    c.rellich.grids = re["grids"].get<std::vector<int>>();
    require(c.rellich.grids.size() >= 2, "identities.rellich.grids needs at least two grids");
    for (int g : c.rellich.grids) require(g >= 4 && g % 2 == 0, "identities.rellich.grids must be even and ≥ 4");
    c.rellich.domain = {get<double>(re, "r_in"), get<double>(re, "r_out")};
    c.rellich.domain.validate();
    c.rellich.min_order = get<double>(re, "min_order");
    c.rellich.max_final = positive(re, "max_final", "identities.rellich");
    const json& sc = id["scaling"];
    c.scaling.radii = sc["radii"].get<std::vector<double>>();
    require(c.scaling.radii.size() >= 2, "identities.scaling.radii needs at least two radii");
    for (double r : c.scaling.radii) require(r > 0, "identities.scaling.radii must be positive");
    c.scaling.tolerance = positive(sc, "tolerance", "identities.scaling");
    c.scaling.grid.n_z = positive_int(sc, "n_z", "identities.scaling");
    c.scaling.grid.validate();

    const json& th = d["bounds"];
    c.hypothesis_samples.count = std::size_t(positive_int(th, "hypothesis_points", "bounds"));
    c.bounds.samples.count = std::size_t(positive_int(th, "cloud", "bounds"));
    require(c.bounds.samples.count >= 2, "bounds.cloud must be at least 2");
    for (SampleSpec* sp : {&c.hypothesis_samples, &c.bounds.samples}) {
      sp->rho_min = positive(th, "rho_min", "bounds");
      sp->rho_max = positive(th, "rho_max", "bounds");
      sp->psi_min = positive(th, "psi_min", "bounds");
      require(sp->rho_min < sp->rho_max, "bounds: rho_min must be below rho_max");
      require(sp->psi_min < 1, "bounds.psi_min must be below 1");
    }
    c.bounds.growth_tolerance = positive(th, "growth_tolerance", "bounds");
    c.bounds.fd_crosscheck_points = std::size_t(th["crosscheck_points"].get<long long>());

    const json& ca = d["carleman"];
    c.carleman.kinds.clear();
    for (const auto& k : ca["kinds"]) {
      try {
        c.carleman.kinds.push_back(carleman_kind_from_string(k.get<std::string>()));
      } catch (const Error&) {
        throw ConfigError("carleman.kinds: unknown kind '" + k.get<std::string>() + "'");
      }
    }
    require(!c.carleman.kinds.empty(), "carleman.kinds must not be empty");
    c.carleman.parameters = ca["parameters"].get<std::vector<double>>();
    require(c.carleman.parameters.size() >= 2, "carleman.parameters needs at least two values");
    for (double p : c.carleman.parameters) require(p > 0, "carleman.parameters must be positive");
    auto& st = c.carleman.settings;
    st.epsilon = positive(ca, "epsilon", "carleman");
    st.R = positive(ca, "R", "carleman");
    st.df_potential = PotentialSpec::modulated(PotentialSpec::Kind::c1, get<double>(ca, "df_K"));
    const double q = get<double>(ca, "f10_q");
    require(q > 1 && q < 2, "carleman.f10_q must lie in (1, 2)");
    st.sublinearity = PotentialSpec::sublinear(q, positive(ca, "f10_c", "carleman"));
    const json& gr = ca["grid"];
    st.grid.gauss = positive_int(gr, "gauss", "carleman.grid");
    st.grid.radial_panels = positive_int(gr, "radial_panels", "carleman.grid");
    st.grid.angle_panels = positive_int(gr, "angle_panels", "carleman.grid");
    st.grid.sphere_points = positive_int(gr, "sphere_points", "carleman.grid");
    st.grid.validate();
    c.carleman.growth_tolerance = positive(ca, "growth_tolerance", "carleman");
    c.carleman.substitution_tolerance = positive(ca, "substitution_tolerance", "carleman");
    c.carleman.reproduce_tolerance = positive(ca, "reproduce_tolerance", "carleman");

    const json& u = d["ucp"];
    c.ucp.spaces.clear();
    for (const auto& s : u["spaces"]) {
      UcpSpace us;
      us.gamma = get<double>(s, "gamma");
      us.m = int(get<long long>(s, "m"));
      us.k = int(get<long long>(s, "k"));
      us.grids = s["grids"].get<std::vector<int>>();
      c.ucp.spaces.push_back(us);
    }
    c.ucp.annulus_inner = get<double>(u, "annulus_inner");
    c.ucp.potential_K = get<double>(u, "potential_K");
    c.ucp.sublinear_q = get<double>(u, "sublinear_q");
    c.ucp.sublinear_c = get<double>(u, "sublinear_c");
    c.ucp.sublinear_grid = int(get<long long>(u, "sublinear_grid"));
    c.ucp.K = u["K"].get<std::vector<double>>();
    c.ucp.sweep_grid = int(get<long long>(u, "sweep_grid"));
    c.ucp.radii = u["radii"].get<std::vector<double>>();
    c.ucp.hardy_inner = get<double>(u, "hardy_inner");
    c.ucp.hardy_C = get<double>(u, "hardy_C");
    c.ucp.solver.tol = get<double>(u, "solver_tol");
    c.ucp.solver.max_iter = positive_int(u, "max_iter", "ucp");
    c.ucp.min_order = get<double>(u, "min_order");
    c.ucp.max_exponent = get<double>(u, "max_exponent");
    c.ucp.validate();

    c.out_dir = get<std::string>(d["output"], "dir");
    require(!c.out_dir.empty(), "output.dir must not be empty");
    c.baseline_path = get<std::string>(d["output"], "baseline");

    c.override_seed(seed);
    c.override_threads(int(d["threads"].get<long long>()));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

json read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (std::filesystem::path(path).extension() == ".json") {
    try {
      return json::parse(buf.str());
    } catch (const json::exception& e) {
      throw ConfigError("malformed JSON config " + path + ": " + e.what());
    }
  }
  try {
    return yaml_to_json(YAML::Load(buf.str()), "config");
  } catch (const YAML::Exception& e) {
    throw ConfigError("malformed YAML config " + path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(read_config_document(path), dir.empty() ? "." : dir.string());
}

}  // namespace grushin
