#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptychodd/solver.hpp"

namespace ptychodd {

/// Malformed or truncated on-disk data; `offset` is the byte position of the
/// first inconsistency.
struct FormatError : std::runtime_error {
  uint64_t offset;
  explicit FormatError(const std::string& msg, uint64_t offset = 0)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset) + ")"),
        offset(offset) {}
};

// PTYA array container: "PTYA" magic, u16 version, u16 dtype (1 = f64,
// 2 = c128), u16 ndim, u64 dims, little-endian row-major payload. All writes
// are atomic (temp file + rename).

void write_array(const std::filesystem::path& path, const RealField2D& field);
void write_array(const std::filesystem::path& path, const ComplexField2D& field);
void write_frames(const std::filesystem::path& path, const std::vector<RealField2D>& frames);

RealField2D read_real_array(const std::filesystem::path& path);
ComplexField2D read_complex_array(const std::filesystem::path& path);
std::vector<RealField2D> read_frames(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

nlohmann::json geometry_to_json(const ScanGeometry& geometry);
ScanGeometry geometry_from_json(const nlohmann::json& j);

/// One row per iteration: iter, rf, re, lagrangian (empty when absent),
/// t_sub_0..t_sub_{D-1}_ms, t_virtual_ms, t_actual_ms.
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRecord>& records);

/// 8-bit grayscale PNG with the window [lo, hi] mapped to [0, 255].
void write_png_gray(const std::filesystem::path& path, const RealField2D& img, double lo,
                    double hi);

}  // namespace ptychodd
