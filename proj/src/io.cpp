#include "steklov/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace steklov {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

Json mesh_to_json(const Mesh& mesh) {
  Json vertices = Json::array(), triangles = Json::array();
  for (const Point& v : mesh.vertices) vertices.push_back({v.x(), v.y()});
  for (const auto& t : mesh.triangles) triangles.push_back({t[0], t[1], t[2]});
  return Json{{"vertices", vertices},
              {"triangles", triangles},
              {"boundary_ring", mesh.boundary_ring},
              {"boundary_params", mesh.boundary_params},
              {"segment_lengths", mesh.segment_lengths},
              {"boundary_weights", mesh.boundary_weights},
              {"h", mesh.h}};
}

Mesh mesh_from_json(const Json& doc) {
  Mesh mesh;
  for (const auto& v : doc.at("vertices")) mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  for (const auto& t : doc.at("triangles"))
    mesh.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  mesh.boundary_ring = doc.at("boundary_ring").get<std::vector<int>>();
  mesh.boundary_params = doc.at("boundary_params").get<std::vector<double>>();
  mesh.segment_lengths = doc.at("segment_lengths").get<std::vector<double>>();
  mesh.boundary_weights = doc.at("boundary_weights").get<std::vector<double>>();
  mesh.h = doc.at("h").get<double>();
  return mesh;
}

std::string matrix_market(const SparseMatrix& a) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
  return out.str();
}

SparseMatrix parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
    throw std::invalid_argument("MatrixMarket: unsupported header");
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream size_line(line);
  Eigen::Index rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz)) throw std::invalid_argument("MatrixMarket: bad size line");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (Eigen::Index k = 0; k < nnz; ++k) {
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::invalid_argument("MatrixMarket: truncated entries");
    if (i < 1 || i > rows || j < 1 || j > cols) throw std::invalid_argument("MatrixMarket: index out of range");
    triplets.emplace_back(i - 1, j - 1, v);
  }
  SparseMatrix a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

void write_dense_binary(const fs::path& path, const Eigen::MatrixXd& a) {
  static_assert(std::endian::native == std::endian::little, "dense export assumes a little-endian host");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = a;
  std::string bytes(reinterpret_cast<const char*>(row_major.data()),
                    static_cast<std::size_t>(row_major.size()) * sizeof(double));
  atomic_write(path, bytes);
  const Json sidecar{{"rows", a.rows()},
                     {"cols", a.cols()},
                     {"dtype", "float64"},
                     {"order", "row-major"},
                     {"endianness", "little"}};
  fs::path side = path;
  side += ".json";
  atomic_write(side, sidecar.dump(2) + "\n");
}

Eigen::MatrixXd read_dense_binary(const fs::path& path) {
  fs::path side = path;
  side += ".json";
  const Json sidecar = Json::parse(read_file(side));
  const auto rows = sidecar.at("rows").get<Eigen::Index>();
  const auto cols = sidecar.at("cols").get<Eigen::Index>();
  if (sidecar.at("dtype") != "float64" || sidecar.at("order") != "row-major")
    throw std::invalid_argument("dense binary: unsupported layout");
  const std::string bytes = read_file(path);
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double))
    throw std::invalid_argument("dense binary: size does not match sidecar");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
  std::memcpy(row_major.data(), bytes.data(), bytes.size());
  return row_major;
}

std::string spectrum_csv(const DtnOperator& op, Eigen::Index count) {
  std::ostringstream out;
  out << "index,eigenvalue\n";
  const auto pairs = spectrum(op, count);
  for (std::size_t k = 0; k < pairs.size(); ++k) out << k + 1 << ',' << format_double(pairs[k].first) << '\n';
  return out.str();
}

std::string kernel_csv(const KernelMatrix& k) {
  std::ostringstream out;
  out << "i,j,re,im\n";
  for (Eigen::Index i = 0; i < k.values.rows(); ++i)
    for (Eigen::Index j = 0; j < k.values.cols(); ++j)
      out << i << ',' << j << ',' << format_double(k.values(i, j).real()) << ','
          << format_double(k.values(i, j).imag()) << '\n';
  return out.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,vertex,value\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    for (Eigen::Index i = 0; i < traj.values.rows(); ++i)
      out << format_double(traj.times[k]) << ',' << i << ','
          << format_double(traj.values(i, static_cast<Eigen::Index>(k))) << '\n';
  return out.str();
}

std::string ratio_table_csv(const BoundReport& report) {
  std::ostringstream out;
  out << "re_z,im_z,abs_z,arg_z,max_ratio,i,j,kernel_abs,bound\n";
  for (const auto& row : report.rows)
    out << format_double(row.z.real()) << ',' << format_double(row.z.imag()) << ',' << format_double(std::abs(row.z))
        << ',' << format_double(std::arg(row.z)) << ',' << format_double(row.max_ratio) << ',' << row.i << ','
        << row.j << ',' << format_double(row.kernel_abs) << ',' << format_double(row.bound) << '\n';
  return out.str();
}

Json to_json(const BoundReport& report) {
  Json decay = Json::object();
  for (const auto& [key, value] : report.fitted_decay) decay[key] = value;
  Json rays = Json::array();
  for (const auto& ray : report.rays) rays.push_back({{"arg", ray.arg}, {"fitted_c", ray.fitted_c}});
  Json doc{{"bound_id", report.bound_id},
           {"fit_mode", report.fit_mode},
           {"fitted_c", report.fitted_c},
           {"fitted_decay", decay},
           {"lambda1_used", report.lambda1_used},
           {"violation_fraction", report.violation_fraction},
           {"max_ratio", report.max_ratio},
           {"slack", report.slack},
           {"time_floor", report.time_floor},
           {"pair_count", report.pair_count},
           {"grid_points", report.rows.size()}};
  if (report.theta > 0.0) {
    doc["theta"] = report.theta;
    doc["rays"] = rays;
    doc["monotone_in_arg"] = report.monotone_in_arg;
  }
  return doc;
}

Json to_json(const ContinuityReport& report) {
  Json curves = Json::array();
  for (const auto& c : report.curves)
    curves.push_back({{"name", c.name},
                      {"slope", c.identically_zero ? Json(nullptr) : Json(c.slope)},
                      {"identically_zero", c.identically_zero},
                      {"max_error", c.errors.empty() ? 0.0 : *std::max_element(c.errors.begin(), c.errors.end())}});
  return Json{{"curves", curves}, {"min_slope", std::isfinite(report.min_slope) ? Json(report.min_slope) : Json()}};
}

Json to_json(const DuhamelRate& rate) {
  return Json{{"constant", rate.constant}, {"slope", rate.slope}, {"grid_points", rate.times.size()}};
}

Json to_json(const PerturbationReport& report) {
  return Json{{"residual", report.residual}, {"q_norm", report.q_norm}, {"schur_norm", report.schur_norm}};
}

Json to_json(const CommutatorReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name},
                       {"lipschitz", e.lipschitz},
                       {"norm_l2", e.norm_l2},
                       {"norm_linf", e.norm_linf},
                       {"ratio_l2", e.ratio_l2},
                       {"ratio_linf", e.ratio_linf},
                       {"constant", e.constant}});
  return Json{{"entries", entries},
              {"c_l2", report.c_l2},
              {"c_linf", report.c_linf},
              {"constant_defect", report.constant_defect}};
}

Json to_json(const SectorSchedule& schedule) {
  Json steps = Json::array();
  for (const auto& s : schedule.steps)
    steps.push_back({{"n", s.n},
                     {"theta", s.theta},
                     {"theta_next", s.theta_next},
                     {"z2_bound", s.z2_bound},
                     {"alpha", s.alpha},
                     {"z1_arg", s.z1_arg},
                     {"z2_arg", s.z2_arg}});
  return Json{{"dimension", schedule.dimension},
              {"theta_target", schedule.theta_target},
              {"thetas", schedule.thetas},
              {"steps", steps},
              {"predicted_steps", schedule.predicted_steps}};
}

Json to_json(const HolomorphyReport& report) {
  Json points = Json::array();
  for (const auto& p : report.points)
    points.push_back({{"re_z", p.z.real()},
                      {"im_z", p.z.imag()},
                      {"residual_coarse", p.residual_coarse},
                      {"residual_fine", p.residual_fine},
                      {"order", p.order}});
  return Json{{"points", points}, {"min_order", report.min_order}};
}

Json to_json(const ImaginaryPowerReport& report) {
  return Json{{"shift", report.shift},
              {"s_values", report.s_values},
              {"norms_l2", report.norms_l2},
              {"norms_linf", report.norms_linf},
              {"nu", report.nu}};
}

Json to_json(const MaxRegularityReport& report) {
  return Json{{"r", report.r},
              {"p", report.p},
              {"tau", report.tau},
              {"ratios", report.ratios},
              {"c_emp", report.c_emp},
              {"max_relative_residual", report.max_relative_residual}};
}

Json to_json(const WellposednessReport& report) {
  return Json{{"sigma_min", report.sigma_min},
              {"sigma_max", report.sigma_max},
              {"tolerance", report.tolerance},
              {"well_posed", report.well_posed},
              {"near_singular", report.near_singular}};
}

}  // namespace steklov
