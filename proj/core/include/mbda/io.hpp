#pragma once

#include "mbda/classify.hpp"
#include "mbda/discriminant.hpp"
#include "mbda/geometric.hpp"
#include "mbda/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace mbda {

// Little-endian binary primitives shared by the file formats below.
namespace io {
void write_u32(std::ostream& out, std::uint32_t value);
void write_f64(std::ostream& out, double value);
void write_string(std::ostream& out, const std::string& value);  // u32 length + bytes
std::uint32_t read_u32(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);  // rows, cols, row-major f64
Matrix read_matrix(std::istream& in);
}  // namespace io

/// Tensor file: magic "MBT1", order, extents (u32 LE), then values as f64 LE
/// in canonical layout.
void save_tensor(std::ostream& out, const Tensor& tensor);
Tensor load_tensor(std::istream& in);
void save_tensor(const std::string& path, const Tensor& tensor);
Tensor load_tensor(const std::string& path);

/// Subspace file: magic "MBSS", order, per-mode (input, output) extents,
/// matrices row-major f64 LE, the objective trace, and a free-form config
/// echo string.
void save_subspace(std::ostream& out, const Subspace& subspace, const std::string& echo = "");
Subspace load_subspace(std::istream& in, std::string* echo = nullptr);
void save_subspace(const std::string& path, const Subspace& subspace, const std::string& echo = "");
Subspace load_subspace(const std::string& path, std::string* echo = nullptr);

void save_svm(std::ostream& out, const SvmModel& model);
SvmModel load_svm(std::istream& in);

/// Binary 8-bit PGM (P5). Values are scaled from [0,1]; loading maps back to
/// [0,1].
void save_pgm(const std::string& path, const Matrix& image);
Matrix load_pgm(const std::string& path);

/// Track CSV: header "frame,point_id,x,y", one row per point per frame,
/// frames 1-based, rows grouped by frame.
void save_track(const std::string& path, const LandmarkTrack& track);
LandmarkTrack load_track(const std::string& path);

}  // namespace mbda
