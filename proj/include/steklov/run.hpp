#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "steklov/config.hpp"
#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/io.hpp"

namespace steklov {

/// Mesh, forms and DtN operator built from a configuration.
struct Pipeline {
  Mesh mesh;
  DiscreteForms forms;
  WellposednessReport wellposedness;
  DtnOperator op;
  /// Same mesh and conductivity without the potential; set when the
  /// configuration has a potential and the operator was requested.
  std::shared_ptr<const DiscreteForms> reference_forms;
  std::shared_ptr<const DtnOperator> reference_op;
};

/// Meshes, assembles and checks well-posedness; throws std::runtime_error with
/// the module name prefixed when a stage fails. The DtN operators are built
/// only when `with_operator` is set.
Pipeline build_pipeline(const RunConfig& config, bool with_operator = true);

/// One acceptance-threshold check of a run.
struct Gate {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Outcome of one named check: a JSON section, its threshold gates, and the
/// text artifacts (file name -> content) it contributes to the output directory.
struct CheckResult {
  Json report;
  std::vector<Gate> gates;
  std::map<std::string, std::string> files;
};

/// Check names in run order: spectrum, stochasticity, poisson-real,
/// poisson-sector, continuity, perturbation, commutator, schwartz, holomorphy,
/// imaginary-powers, max-regularity, schedule.
const std::vector<std::string>& check_names();

/// Whether `run` includes the check for this configuration (e.g. the
/// perturbation identity only with a potential, stochasticity only without).
bool check_applies(const std::string& name, const RunConfig& config);

/// Runs a single named check; throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name, const Pipeline& pipe, const RunConfig& config);

struct RunResult {
  Json report;
  std::vector<Gate> gates;
  bool all_pass() const;
};

/// Runs every applicable check. When `write_files` is set, writes config.json,
/// report.json, CSV tables, gnuplot data files and a plot script template into
/// config.output_dir (atomically, file by file). No timestamps are recorded, so
/// equal configurations give byte-identical reports.
RunResult run(const RunConfig& config, bool write_files = true);

/// Log-spaced time grid of the long-time sweeps.
std::vector<double> sweep_grid(const RunConfig& config);

/// Gnuplot script template plotting the emitted .dat files.
std::string gnuplot_template();

/// Writes `files` into `dir` with atomic_write.
void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

}  // namespace steklov
