#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "repkl/dna.hpp"
#include "repkl/image.hpp"

namespace repkl {

/// Serializes a double with 17 significant digits ("%.17g" semantics via
/// std::to_chars), locale-independent, so round-trips are lossless.
std::string format_double(double value);

/// Parses a double with std::from_chars; accepts "inf"/"nan" spellings.
double parse_double(const std::string& text);

/// Time-series trace, columns: n,H_q,H_cross,D_kl,V,dV,S_n,w1,w2.
/// Rows n = 0..N; the final row carries only n, V, w1, w2 (stepwise cells
/// empty). Numbers use 17 significant digits.
void write_timeseries_csv(const std::filesystem::path& path,
                          const TrajectoryRecord& trace);
TrajectoryRecord read_timeseries_csv(const std::filesystem::path& path);

/// Image trace, columns: n,H_q,H_cross,D_kl,V,mass_defect. Rows n = 0..N;
/// the final row carries only n and V.
void write_image_csv(const std::filesystem::path& path,
                     const TrajectoryRecord& trace);
TrajectoryRecord read_image_csv(const std::filesystem::path& path);

/// Landscape grid, columns: x,y,V. Rows iterate y outer, x inner.
void write_landscape_csv(const std::filesystem::path& path,
                         const LandscapeGrid& grid);

/// Binary PGM (P5, 8-bit), rows top to bottom. Pixels are scaled by
/// max-normalization: byte = round(255 * v / max). Returns the scale (max)
/// so the sidecar can record it.
double write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& values);

/// `key = value` lines; '#' starts a comment; keys may not repeat.
/// Returned in file order.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path);

}  // namespace repkl
