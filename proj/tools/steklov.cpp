// Command-line entry point: meshing, assembly, DtN construction, verification
// sweeps, boundary evolutions and full reproducible runs.
//
// Exit codes: 0 success, 1 threshold failure (with --strict) or solver error,
// 2 usage or configuration error. Thread count: STEKLOV_NUM_THREADS.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "steklov/config.hpp"
#include "steklov/dtn.hpp"
#include "steklov/io.hpp"
#include "steklov/parabolic.hpp"
#include "steklov/run.hpp"
#include "steklov/semigroup.hpp"

namespace {

using namespace steklov;
namespace fs = std::filesystem;

/// Thrown for command-line values that parse but make no sense; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Options shared by every subcommand: they start from a config file or a
/// preset and override individual fields.
struct ProblemArgs {
  std::string config_path;
  std::string preset_name;
  std::optional<std::string> domain;
  std::optional<double> h;
  std::optional<double> boundary_h;
  std::optional<std::string> coeff;
  std::optional<std::string> potential;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--preset", preset_name, "named configuration")
        ->check(CLI::IsMember(preset_names()))
        ->excludes(app->get_option("--config"));
    app->add_option("--domain", domain, "domain shape")->check(CLI::IsMember({"disk", "star"}));
    app->add_option("--h", h, "target mesh size")->check(CLI::PositiveNumber);
    app->add_option("--boundary-h", boundary_h, "boundary spacing of a graded mesh (0: same as h)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--coeff", coeff, "conductivity: const (identity) or variable")
        ->check(CLI::IsMember({"const", "variable"}));
    app->add_option("--V", potential, "potential id: 0, <number>, random or random:<seed>");
    app->add_option("--out", out, "output directory");
  }

  RunConfig resolve() const {
    RunConfig c = !config_path.empty() ? load_config(config_path)
                  : !preset_name.empty() ? preset(preset_name)
                                         : RunConfig{};
    if (domain) c.domain.kind = *domain;
    if (h) c.h = *h;
    if (boundary_h) c.boundary_h = *boundary_h;
    if (coeff) c.coefficients = *coeff == "const" ? "identity" : "variable";
    if (potential) c.potential = parse_potential_id(*potential);
    if (out) c.output_dir = *out;
    validate(c);
    return c;
  }
};

void print(const Json& doc) { std::cout << doc.dump(2) << '\n'; }

int report_gates(const std::vector<Gate>& gates, bool strict) {
  bool all = true;
  for (const Gate& g : gates) {
    std::cerr << (g.pass ? "[PASS] " : "[FAIL] ") << g.name << ": " << g.detail << '\n';
    all = all && g.pass;
  }
  return (strict && !all) ? 1 : 0;
}

int cmd_mesh(const ProblemArgs& args) {
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c, false);
  const fs::path dir(c.output_dir);
  atomic_write(dir / "mesh.json", mesh_to_json(pipe.mesh).dump() + "\n");
  print({{"vertices", pipe.mesh.vertices.size()},
         {"triangles", pipe.mesh.triangles.size()},
         {"boundary_dof", pipe.mesh.boundary_size()},
         {"h", pipe.mesh.h},
         {"area", pipe.mesh.total_area()},
         {"file", (dir / "mesh.json").string()}});
  return 0;
}

int cmd_assemble(const ProblemArgs& args) {
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c, false);
  const fs::path dir(c.output_dir);
  atomic_write(dir / "stiffness.mtx", matrix_market(pipe.forms.stiffness));
  atomic_write(dir / "potential.mtx", matrix_market(pipe.forms.potential));
  atomic_write(dir / "mass.mtx", matrix_market(pipe.forms.mass));
  atomic_write(dir / "boundary_mass.mtx", matrix_market(pipe.forms.boundary_mass));
  Json doc{{"vertices", pipe.forms.vertex_count()},
           {"boundary_dof", pipe.forms.boundary_size()},
           {"interior_dof", pipe.forms.interior_size()},
           {"wellposedness", to_json(pipe.wellposedness)}};
  print(doc);
  return 0;
}

int cmd_dtn(const ProblemArgs& args) {
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c);
  const fs::path dir(c.output_dir);
  write_dense_binary(dir / "dtn_schur.bin", pipe.op.schur());
  write_dense_binary(dir / "boundary_mass.bin", pipe.op.boundary_mass());
  write_dense_binary(dir / "dtn_eigenvectors.bin", pipe.op.eigenvectors());
  atomic_write(dir / "spectrum.csv", spectrum_csv(pipe.op, pipe.op.size()));
  print({{"boundary_dof", pipe.op.size()},
         {"lambda1", pipe.op.lambda1()},
         {"lambda_max", pipe.op.eigenvalues()[pipe.op.size() - 1]}});
  return 0;
}

int cmd_spectrum(const ProblemArgs& args, int count) {
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c);
  const Eigen::Index n = count > 0 ? std::min<Eigen::Index>(count, pipe.op.size()) : pipe.op.size();
  const std::string csv = spectrum_csv(pipe.op, n);
  atomic_write(fs::path(c.output_dir) / "spectrum.csv", csv);
  std::cout << csv;
  return 0;
}

Complex parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("--z expects <re>,<im>, got '" + text + "'");
  }
}

int cmd_kernel(const ProblemArgs& args, const std::string& z_text, const std::string& format) {
  const Complex z = parse_complex(z_text);
  if (!(z.real() > 0.0)) throw UsageError("--z must have a positive real part");
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c);
  const KernelMatrix k = kernel(pipe.op, z);
  const fs::path dir(c.output_dir);
  if (format == "csv") {
    atomic_write(dir / "kernel.csv", kernel_csv(k));
  } else {
    write_dense_binary(dir / "kernel_re.bin", k.values.real());
    write_dense_binary(dir / "kernel_im.bin", k.values.imag());
  }
  print({{"re_z", z.real()},
         {"im_z", z.imag()},
         {"boundary_dof", pipe.op.size()},
         {"max_abs", k.values.cwiseAbs().maxCoeff()},
         {"format", format}});
  return 0;
}

int cmd_verify(const ProblemArgs& args, const std::string& check, std::optional<double> theta_deg, bool strict) {
  RunConfig c = args.resolve();
  if (theta_deg) {
    if (!(*theta_deg > 0.0 && *theta_deg < 90.0)) throw UsageError("--theta must lie in (0, 90) degrees");
    c.sweeps.theta_deg = *theta_deg;
  }
  const Pipeline pipe = build_pipeline(c);
  CheckResult result = run_check(check, pipe, c);
  Json doc = result.report;
  doc["check"] = check;
  doc["config_hash"] = config_hash(c);
  const fs::path dir(c.output_dir);
  write_files(dir, result.files);
  atomic_write(dir / (check + ".json"), doc.dump(2) + "\n");
  print(doc);
  return report_gates(result.gates, strict);
}

int cmd_parabolic(const ProblemArgs& args, double r, double p, double tau, int steps, const std::string& forcing,
                  std::uint64_t seed) {
  const RunConfig c = args.resolve();
  const Pipeline pipe = build_pipeline(c);
  const DtnOperator& op = pipe.op;

  EvolutionProblem problem;
  problem.op = &op;
  problem.tau = tau;
  problem.r = r;
  problem.p = p;
  problem.initial = Eigen::VectorXd::Zero(op.size());
  std::optional<Eigen::Index> mode;
  if (forcing == "random") {
    problem.forcing = random_forcing(op, seed, tau, steps);
  } else if (forcing.rfind("mode:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(forcing.substr(5));
    } catch (const std::exception&) {
      throw UsageError("--forcing mode:<n> expects an integer mode index");
    }
    if (n < 1 || n > op.size()) throw UsageError("--forcing mode index must lie in [1, " + std::to_string(op.size()) + "]");
    mode = n - 1;
    // Constant forcing lambda_n phi_n (phi_n when lambda_n = 0), solved in closed form below.
    const double lambda = op.eigenvalues()[*mode];
    const Eigen::VectorXd f = (lambda != 0.0 ? lambda : 1.0) * op.eigenvectors().col(*mode);
    problem.forcing = f.replicate(1, steps + 1);
  } else {
    throw UsageError("--forcing expects random or mode:<n>");
  }

  const Trajectory traj = solve(problem);
  Json doc{{"r", r},
           {"p", p},
           {"tau", tau},
           {"steps", steps},
           {"forcing", forcing},
           {"norms",
            {{"derivative", traj.norms.derivative},
             {"dtn", traj.norms.dtn},
             {"forcing", traj.norms.forcing},
             {"initial_surrogate", traj.norms.initial_surrogate},
             {"residual", traj.norms.residual},
             {"relative_residual", traj.norms.relative_residual}}},
           {"ratio", (traj.norms.derivative + traj.norms.dtn) / traj.norms.forcing}};
  if (mode) {
    const double lambda = op.eigenvalues()[*mode];
    const Eigen::VectorXd phi = op.eigenvectors().col(*mode);
    double err = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double t = traj.times[k];
      const double amplitude = lambda != 0.0 ? -std::expm1(-lambda * t) : t;
      err = std::max(err, (traj.values.col(static_cast<Eigen::Index>(k)) - amplitude * phi).cwiseAbs().maxCoeff());
    }
    doc["closed_form_error"] = err;
  }
  const fs::path dir(c.output_dir);
  atomic_write(dir / "trajectory.csv", trajectory_csv(traj));
  atomic_write(dir / "parabolic.json", doc.dump(2) + "\n");
  print(doc);
  return 0;
}

int cmd_run(const ProblemArgs& args, bool strict) {
  const RunConfig c = args.resolve();
  const RunResult result = run(c);
  std::cout << "config " << config_hash(c) << " -> " << (fs::path(c.output_dir) / "report.json").string() << '\n';
  for (const Gate& g : result.gates)
    std::cout << (g.pass ? "[PASS] " : "[FAIL] ") << g.name << ": " << g.detail << '\n';
  return (strict && !result.all_pass()) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steklov semigroup toolkit: Dirichlet-to-Neumann operators, Poisson bounds and boundary evolutions"};
  // "--h" is the mesh size, so help is long-form only.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  ProblemArgs args;

  auto* mesh = app.add_subcommand("mesh", "triangulate the domain and write mesh.json");
  args.attach(mesh);

  auto* assemble_cmd = app.add_subcommand("assemble", "assemble the discrete forms as MatrixMarket files");
  args.attach(assemble_cmd);

  auto* dtn = app.add_subcommand("dtn", "build the DtN operator and write dense binary matrices");
  args.attach(dtn);

  int count = 20;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "print the lowest DtN eigenvalues as CSV");
  args.attach(spectrum_cmd);
  spectrum_cmd->add_option("--count", count, "number of eigenvalues (0: all)")->check(CLI::NonNegativeNumber);

  std::string z_text;
  std::string kernel_format = "csv";
  auto* kernel_cmd = app.add_subcommand("kernel", "dump the semigroup kernel K_z");
  args.attach(kernel_cmd);
  kernel_cmd->add_option("--z", z_text, "complex time <re>,<im>")->required();
  kernel_cmd->add_option("--format", kernel_format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

  std::string check;
  std::optional<double> theta_deg;
  bool verify_strict = false;
  auto* verify = app.add_subcommand("verify", "run one verification check");
  args.attach(verify);
  verify->add_option("check", check, "check name")->required()->check(CLI::IsMember(check_names()));
  verify->add_option("--theta", theta_deg, "sector half-angle in degrees (poisson-sector)");
  verify->add_flag("--strict", verify_strict, "exit 1 when a threshold is violated");

  double r = 2.0, p = 2.0, tau = 1.0;
  int steps = 400;
  std::string forcing = "random";
  std::uint64_t seed = 1;
  auto* parabolic = app.add_subcommand("parabolic", "solve the boundary evolution and export the trajectory");
  args.attach(parabolic);
  parabolic->add_option("--r", r, "time Lebesgue exponent")->check(CLI::Range(1.0, 1e6));
  parabolic->add_option("--p", p, "space Lebesgue exponent")->check(CLI::Range(1.0, 1e6));
  parabolic->add_option("--tau", tau, "time horizon")->check(CLI::PositiveNumber);
  parabolic->add_option("--steps", steps, "time steps")->check(CLI::PositiveNumber);
  parabolic->add_option("--forcing", forcing, "random or mode:<n>");
  parabolic->add_option("--seed", seed, "forcing seed");

  bool run_strict = false;
  auto* run_cmd = app.add_subcommand("run", "run every applicable check and write a reproducible report");
  args.attach(run_cmd);
  run_cmd->add_flag("--strict", run_strict, "exit 1 when any acceptance threshold is violated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*mesh) return cmd_mesh(args);
    if (*assemble_cmd) return cmd_assemble(args);
    if (*dtn) return cmd_dtn(args);
    if (*spectrum_cmd) return cmd_spectrum(args, count);
    if (*kernel_cmd) return cmd_kernel(args, z_text, kernel_format);
    if (*verify) return cmd_verify(args, check, theta_deg, verify_strict);
    if (*parabolic) {
      if (r <= 1.0 || p <= 1.0) throw UsageError("--r and --p must exceed 1");
      return cmd_parabolic(args, r, p, tau, steps, forcing, seed);
    }
    if (*run_cmd) return cmd_run(args, run_strict);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
