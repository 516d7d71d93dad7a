#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/io.hpp"

namespace steklov {

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct DomainSpec {
  std::string kind = "disk";  ///< disk | star
  double radius = 1.0;        ///< disk radius, star base radius
  double amplitude = 0.2;     ///< star only
  int lobes = 3;              ///< star only
  bool operator==(const DomainSpec&) const = default;
};

struct PotentialSpec {
  std::string kind = "none";  ///< none | constant | random
  double value = 0.0;         ///< constant value
  std::uint64_t seed = 7;     ///< random only
  double amplitude = 2.0;     ///< random only: max |V|
  bool operator==(const PotentialSpec&) const = default;
};

struct SweepSpec {
  double t_lo = 1e-2;
  double t_hi = 10.0;
  int per_decade = 24;
  double time_floor = 1e-6;
  /// On-diagonal decay fit window and the boundary spacing of the graded
  /// mesh it is evaluated on (0: use the main mesh).
  double decay_lo = 1e-3;
  double decay_hi = 1e-1;
  double decay_boundary_h = 0.005;
  double theta_deg = 60.0;
  int rays = 5;
  std::uint64_t max_pairs = 100000;
  std::uint64_t seed = 1;
  int holomorphy_points = 20;
  int semigroup_pairs = 50;
  bool operator==(const SweepSpec&) const = default;
};

struct ParabolicSpec {
  double r = 2.0;
  double p = 2.0;
  double tau = 1.0;
  int steps = 400;
  int forcings = 6;
  std::uint64_t seed = 1;
  bool operator==(const ParabolicSpec&) const = default;
};

/// Everything a `run` needs; round-trips through JSON unchanged.
struct RunConfig {
  int schema_version = 1;
  std::string name = "custom";
  DomainSpec domain;
  double h = 0.04;
  double boundary_h = 0.0;  ///< boundary spacing of a graded mesh (0: same as h)
  std::string coefficients = "identity";  ///< identity | variable
  PotentialSpec potential;
  SweepSpec sweeps;
  ParabolicSpec parabolic;
  std::string output_dir = "steklov-out";
  bool operator==(const RunConfig&) const = default;
};

inline constexpr int kReportSchemaVersion = 1;

Json to_json(const RunConfig& config);
/// Strict parse: unknown fields, wrong types and out-of-range values raise ConfigError.
RunConfig config_from_json(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Semantic checks shared by the parser and programmatic callers.
void validate(const RunConfig& config);

/// FNV-1a (64 bit) of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::vector<std::string> preset_names();
/// disk-laplace-V0 | disk-laplace-V1 | star-variable-c | disk-negative-V
RunConfig preset(const std::string& name);

SmoothDomain make_domain(const DomainSpec& spec);
/// Coefficients including the potential.
CoefficientField make_coefficients(const RunConfig& config);
/// Same conductivity without the potential.
CoefficientField make_reference_coefficients(const RunConfig& config);

/// Parses the CLI potential id: "0"/"none", a number (constant V), "random" or "random:<seed>".
PotentialSpec parse_potential_id(const std::string& id);

}  // namespace steklov
