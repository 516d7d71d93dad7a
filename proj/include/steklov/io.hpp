#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "steklov/dtn.hpp"
#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/parabolic.hpp"
#include "steklov/semigroup.hpp"
#include "steklov/verify.hpp"

namespace steklov {

using Json = nlohmann::ordered_json;

/// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Mesh document: vertices, triangles, boundary ring, params, weights, h.
Json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const Json& doc);

// MatrixMarket coordinate real general, 1-based indices.
std::string matrix_market(const SparseMatrix& a);
SparseMatrix parse_matrix_market(const std::string& text);

/// Dense matrix as raw little-endian float64 in row-major order plus a JSON
/// sidecar {rows, cols, dtype, order, endianness} at `<path>.json`.
void write_dense_binary(const std::filesystem::path& path, const Eigen::MatrixXd& a);
Eigen::MatrixXd read_dense_binary(const std::filesystem::path& path);

/// "index,eigenvalue" rows, index starting at 1.
std::string spectrum_csv(const DtnOperator& op, Eigen::Index count);

/// "i,j,re,im" rows over all boundary pairs.
std::string kernel_csv(const KernelMatrix& k);

/// "t,vertex,value" rows.
std::string trajectory_csv(const Trajectory& traj);

/// Worst ratio per grid point: "re_z,im_z,abs_z,arg_z,max_ratio,i,j,kernel_abs,bound".
std::string ratio_table_csv(const BoundReport& report);

Json to_json(const BoundReport& report);
Json to_json(const ContinuityReport& report);
Json to_json(const DuhamelRate& rate);
Json to_json(const PerturbationReport& report);
Json to_json(const CommutatorReport& report);
Json to_json(const SectorSchedule& schedule);
Json to_json(const HolomorphyReport& report);
Json to_json(const ImaginaryPowerReport& report);
Json to_json(const MaxRegularityReport& report);
Json to_json(const WellposednessReport& report);

/// Full-precision number formatting shared by every CSV writer.
std::string format_double(double x);

}  // namespace steklov
