#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "steklov/config.hpp"
#include "steklov/io.hpp"
#include "steklov/run.hpp"
#include "support.hpp"

namespace steklov {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("steklov-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string field_of(const Json& doc) {
  try {
    validate(config_from_json(doc));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Config, JsonRoundTrip) {
  for (const std::string& name : preset_names()) {
    const RunConfig config = preset(name);
    EXPECT_EQ(config_from_json(to_json(config)), config) << name;
  }
}

TEST(Config, FileRoundTrip) {
  const fs::path dir = scratch_dir("config");
  RunConfig config = preset("star-variable-c");
  config.h = 0.07;
  config.sweeps.seed = 42;
  atomic_write(dir / "config.json", to_json(config).dump(2));
  EXPECT_EQ(load_config(dir / "config.json"), config);
}

TEST(Config, UnknownFieldIsNamed) {
  Json doc = to_json(RunConfig{});
  doc["domian"] = "disk";
  EXPECT_EQ(field_of(doc), "domian");
}

TEST(Config, WrongTypeIsNamed) {
  Json doc = to_json(RunConfig{});
  doc["h"] = "small";
  EXPECT_EQ(field_of(doc), "h");
}

TEST(Config, OutOfRangeIsNamed) {
  Json doc = to_json(RunConfig{});
  doc["h"] = -0.1;
  EXPECT_EQ(field_of(doc), "h");
  doc = to_json(RunConfig{});
  doc["boundary_h"] = 1.0;
  EXPECT_EQ(field_of(doc), "boundary_h");
  doc = to_json(RunConfig{});
  doc["coefficients"] = "anisotropic";
  EXPECT_EQ(field_of(doc), "coefficients");
}

TEST(Config, MalformedJsonFile) {
  const fs::path dir = scratch_dir("malformed");
  atomic_write(dir / "bad.json", "{ \"h\": 0.1,, }");
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Config, HashStableAndSensitive) {
  const RunConfig a = preset("disk-laplace-V0");
  EXPECT_EQ(config_hash(a), config_hash(preset("disk-laplace-V0")));
  RunConfig b = a;
  b.sweeps.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, PresetsAreValid) {
  const auto names = preset_names();
  EXPECT_GE(names.size(), 4u);
  for (const std::string& name : names) EXPECT_NO_THROW(validate(preset(name))) << name;
  EXPECT_THROW(preset("no-such-preset"), ConfigError);
}

TEST(Config, ParsePotentialId) {
  EXPECT_EQ(parse_potential_id("0").kind, "none");
  const PotentialSpec c = parse_potential_id("-10");
  EXPECT_EQ(c.kind, "constant");
  EXPECT_EQ(c.value, -10.0);
  EXPECT_EQ(parse_potential_id("random").kind, "random");
  EXPECT_THROW(parse_potential_id("banana"), ConfigError);
}

TEST(Io, MatrixMarketRoundTrip) {
  const testing::Discretization& s = testing::disk_laplace(0.2);
  const SparseMatrix back = parse_matrix_market(matrix_market(s.forms.stiffness));
  EXPECT_EQ(Eigen::MatrixXd(back - s.forms.stiffness).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Io, DenseBinaryRoundTrip) {
  const fs::path dir = scratch_dir("binary");
  Eigen::MatrixXd a(3, 4);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, -1e300;
  write_dense_binary(dir / "a.bin", a);
  EXPECT_EQ(read_dense_binary(dir / "a.bin"), a);
}

TEST(Io, AtomicWriteReplacesContent) {
  const fs::path dir = scratch_dir("atomic");
  atomic_write(dir / "f.txt", "first");
  atomic_write(dir / "f.txt", "second");
  EXPECT_EQ(read_file(dir / "f.txt"), "second");
  std::size_t count = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir)) ++count;
  EXPECT_EQ(count, 1u);
}

TEST(Io, MeshJsonRoundTrip) {
  const Mesh mesh = triangulate(make_smooth_star(1.0, 0.2, 3), 0.2);
  const Mesh back = mesh_from_json(mesh_to_json(mesh));
  EXPECT_EQ(back.triangles, mesh.triangles);
  EXPECT_EQ(back.boundary_ring, mesh.boundary_ring);
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
  EXPECT_EQ(back.boundary_weights, mesh.boundary_weights);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e12}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Run, CheckRegistry) {
  const auto names = check_names();
  for (const char* name : {"spectrum", "stochasticity", "poisson-real", "poisson-sector", "continuity", "perturbation",
                           "commutator", "schwartz", "holomorphy", "imaginary-powers", "max-regularity", "schedule"})
    EXPECT_NE(std::find(names.begin(), names.end(), name), names.end()) << name;
  EXPECT_FALSE(check_applies("perturbation", preset("disk-laplace-V0")));
  EXPECT_TRUE(check_applies("perturbation", preset("disk-laplace-V1")));
  EXPECT_FALSE(check_applies("stochasticity", preset("disk-laplace-V1")));
}

TEST(Run, UnknownCheckThrows) {
  RunConfig config = preset("disk-laplace-V0");
  config.h = 0.2;
  const Pipeline pipe = build_pipeline(config);
  EXPECT_THROW(run_check("no-such-check", pipe, config), std::invalid_argument);
  const CheckResult r = run_check("schedule", pipe, config);
  EXPECT_FALSE(r.gates.empty());
  for (const Gate& g : r.gates) EXPECT_TRUE(g.pass) << g.name << ": " << g.detail;
}

TEST(Run, GnuplotTemplateMentionsDataFiles) {
  const std::string gp = gnuplot_template();
  for (const char* file : {"spectrum.dat", "poisson_real.dat", "on_diagonal.dat"})
    EXPECT_NE(gp.find(file), std::string::npos) << file;
}

}  // namespace
}  // namespace steklov
