#include "steklov/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace steklov {

namespace {

// Reads the members of one JSON object, remembering which keys were consumed
// so that leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const Json& doc, std::string prefix) : doc_(doc), prefix_(std::move(prefix)) {
    if (!doc_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(path(key), "must be finite");
    }
  }
  void read(const std::string& key, int& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(path(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      static_cast<void>(value);
      if (!seen_.contains(key)) throw ConfigError(path(key), "unknown field");
    }
  }

 private:
  const Json& doc_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

Json to_json(const RunConfig& c) {
  return Json{{"schema_version", c.schema_version},
              {"name", c.name},
              {"domain",
               {{"kind", c.domain.kind},
                {"radius", c.domain.radius},
                {"amplitude", c.domain.amplitude},
                {"lobes", c.domain.lobes}}},
              {"h", c.h},
              {"boundary_h", c.boundary_h},
              {"coefficients", c.coefficients},
              {"potential",
               {{"kind", c.potential.kind},
                {"value", c.potential.value},
                {"seed", c.potential.seed},
                {"amplitude", c.potential.amplitude}}},
              {"sweeps",
               {{"t_lo", c.sweeps.t_lo},
                {"t_hi", c.sweeps.t_hi},
                {"per_decade", c.sweeps.per_decade},
                {"time_floor", c.sweeps.time_floor},
                {"decay_lo", c.sweeps.decay_lo},
                {"decay_hi", c.sweeps.decay_hi},
                {"decay_boundary_h", c.sweeps.decay_boundary_h},
                {"theta_deg", c.sweeps.theta_deg},
                {"rays", c.sweeps.rays},
                {"max_pairs", c.sweeps.max_pairs},
                {"seed", c.sweeps.seed},
                {"holomorphy_points", c.sweeps.holomorphy_points},
                {"semigroup_pairs", c.sweeps.semigroup_pairs}}},
              {"parabolic",
               {{"r", c.parabolic.r},
                {"p", c.parabolic.p},
                {"tau", c.parabolic.tau},
                {"steps", c.parabolic.steps},
                {"forcings", c.parabolic.forcings},
                {"seed", c.parabolic.seed}}},
              {"output_dir", c.output_dir}};
}

RunConfig config_from_json(const Json& doc) {
  RunConfig c;
  ObjectReader root(doc, "");
  root.read("schema_version", c.schema_version);
  root.read("name", c.name);
  if (const Json* d = root.find("domain")) {
    ObjectReader r(*d, "domain");
    r.read("kind", c.domain.kind);
    r.read("radius", c.domain.radius);
    r.read("amplitude", c.domain.amplitude);
    r.read("lobes", c.domain.lobes);
    r.finish();
  }
  root.read("h", c.h);
  root.read("boundary_h", c.boundary_h);
  root.read("coefficients", c.coefficients);
  if (const Json* d = root.find("potential")) {
    ObjectReader r(*d, "potential");
    r.read("kind", c.potential.kind);
    r.read("value", c.potential.value);
    r.read("seed", c.potential.seed);
    r.read("amplitude", c.potential.amplitude);
    r.finish();
  }
  if (const Json* d = root.find("sweeps")) {
    ObjectReader r(*d, "sweeps");
    r.read("t_lo", c.sweeps.t_lo);
    r.read("t_hi", c.sweeps.t_hi);
    r.read("per_decade", c.sweeps.per_decade);
    r.read("time_floor", c.sweeps.time_floor);
    r.read("decay_lo", c.sweeps.decay_lo);
    r.read("decay_hi", c.sweeps.decay_hi);
    r.read("decay_boundary_h", c.sweeps.decay_boundary_h);
    r.read("theta_deg", c.sweeps.theta_deg);
    r.read("rays", c.sweeps.rays);
    r.read("max_pairs", c.sweeps.max_pairs);
    r.read("seed", c.sweeps.seed);
    r.read("holomorphy_points", c.sweeps.holomorphy_points);
    r.read("semigroup_pairs", c.sweeps.semigroup_pairs);
    r.finish();
  }
  if (const Json* d = root.find("parabolic")) {
    ObjectReader r(*d, "parabolic");
    r.read("r", c.parabolic.r);
    r.read("p", c.parabolic.p);
    r.read("tau", c.parabolic.tau);
    r.read("steps", c.parabolic.steps);
    r.read("forcings", c.parabolic.forcings);
    r.read("seed", c.parabolic.seed);
    r.finish();
  }
  root.read("output_dir", c.output_dir);
  root.finish();
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  require(c.schema_version == 1, "schema_version", "unsupported version (expected 1)");
  require(c.domain.kind == "disk" || c.domain.kind == "star", "domain.kind", "expected 'disk' or 'star'");
  require(c.domain.radius > 0.0, "domain.radius", "must be positive");
  require(c.domain.amplitude >= 0.0 && c.domain.amplitude < 1.0, "domain.amplitude", "must lie in [0, 1)");
  require(c.domain.lobes >= 0, "domain.lobes", "must be non-negative");
  require(c.h > 0.0, "h", "must be positive");
  require(c.boundary_h >= 0.0 && c.boundary_h <= c.h, "boundary_h", "must lie in [0, h]");
  require(c.coefficients == "identity" || c.coefficients == "variable", "coefficients",
          "expected 'identity' or 'variable'");
  require(c.potential.kind == "none" || c.potential.kind == "constant" || c.potential.kind == "random",
          "potential.kind", "expected 'none', 'constant' or 'random'");
  require(c.potential.amplitude >= 0.0, "potential.amplitude", "must be non-negative");
  require(c.sweeps.time_floor > 0.0, "sweeps.time_floor", "must be positive");
  require(c.sweeps.t_lo >= c.sweeps.time_floor, "sweeps.t_lo", "must respect the time floor");
  require(c.sweeps.t_hi >= c.sweeps.t_lo, "sweeps.t_hi", "must not be below t_lo");
  require(c.sweeps.per_decade > 0, "sweeps.per_decade", "must be positive");
  require(c.sweeps.decay_lo >= c.sweeps.time_floor, "sweeps.decay_lo", "must respect the time floor");
  require(c.sweeps.decay_hi > c.sweeps.decay_lo, "sweeps.decay_hi", "must exceed decay_lo");
  require(c.sweeps.decay_boundary_h >= 0.0, "sweeps.decay_boundary_h", "must be non-negative");
  require(c.sweeps.theta_deg > 0.0 && c.sweeps.theta_deg < 90.0, "sweeps.theta_deg", "must lie in (0, 90)");
  require(c.sweeps.rays >= 1, "sweeps.rays", "must be at least 1");
  require(c.sweeps.max_pairs >= 1, "sweeps.max_pairs", "must be positive");
  require(c.sweeps.holomorphy_points >= 1, "sweeps.holomorphy_points", "must be positive");
  require(c.sweeps.semigroup_pairs >= 1, "sweeps.semigroup_pairs", "must be positive");
  require(c.parabolic.r > 1.0, "parabolic.r", "must exceed 1");
  require(c.parabolic.p > 1.0, "parabolic.p", "must exceed 1");
  require(c.parabolic.tau > 0.0, "parabolic.tau", "must be positive");
  require(c.parabolic.steps >= 1, "parabolic.steps", "must be positive");
  require(c.parabolic.forcings >= 1, "parabolic.forcings", "must be positive");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("<file>", "cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(doc);
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::vector<std::string> preset_names() {
  return {"disk-laplace-V0", "disk-laplace-V1", "star-variable-c", "disk-negative-V"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.output_dir = "steklov-out/" + name;
  if (name == "disk-laplace-V0") return c;
  if (name == "disk-laplace-V1") {
    c.potential.kind = "constant";
    c.potential.value = 1.0;
    return c;
  }
  if (name == "star-variable-c") {
    c.domain.kind = "star";
    c.coefficients = "variable";
    return c;
  }
  if (name == "disk-negative-V") {
    // between the first two Dirichlet eigenvalues of the unit disk (about 5.78 and 14.68)
    c.potential.kind = "constant";
    c.potential.value = -10.0;
    return c;
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

SmoothDomain make_domain(const DomainSpec& spec) {
  if (spec.kind == "disk") return make_disk(spec.radius);
  if (spec.kind == "star") return make_smooth_star(spec.radius, spec.amplitude, spec.lobes);
  throw ConfigError("domain.kind", "expected 'disk' or 'star'");
}

CoefficientField make_reference_coefficients(const RunConfig& config) {
  if (config.coefficients == "identity") return identity_coefficients();
  if (config.coefficients == "variable") return variable_coefficients();
  throw ConfigError("coefficients", "expected 'identity' or 'variable'");
}

CoefficientField make_coefficients(const RunConfig& config) {
  CoefficientField base = make_reference_coefficients(config);
  const PotentialSpec& v = config.potential;
  if (v.kind == "none") return base;
  if (v.kind == "constant") return with_constant_potential(std::move(base), v.value);
  if (v.kind == "random") return with_random_potential(std::move(base), static_cast<unsigned>(v.seed), v.amplitude);
  throw ConfigError("potential.kind", "expected 'none', 'constant' or 'random'");
}

PotentialSpec parse_potential_id(const std::string& id) {
  PotentialSpec spec;
  if (id == "none" || id == "0") return spec;
  if (id.rfind("random", 0) == 0) {
    spec.kind = "random";
    if (id.size() > 6) {
      if (id[6] != ':') throw ConfigError("potential", "expected random or random:<seed>");
      try {
        spec.seed = std::stoull(id.substr(7));
      } catch (const std::exception&) {
        throw ConfigError("potential", "bad seed in '" + id + "'");
      }
    }
    return spec;
  }
  try {
    std::size_t used = 0;
    spec.value = std::stod(id, &used);
    if (used != id.size()) throw std::invalid_argument(id);
  } catch (const std::exception&) {
    throw ConfigError("potential", "expected none, a number, random or random:<seed>; got '" + id + "'");
  }
  spec.kind = "constant";
  return spec;
}

}  // namespace steklov
