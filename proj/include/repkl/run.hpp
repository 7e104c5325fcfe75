#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repkl/dna.hpp"
#include "repkl/image.hpp"
#include "repkl/io.hpp"
#include "repkl/verify.hpp"

namespace repkl {

enum class Experiment { dna_timeseries, dna_landscape, image_replicate, verify };

std::string experiment_name(Experiment e);

/// Fully resolved experiment configuration. Defaults equal the shipped
/// presets (configs/fig1.cfg, fig2.cfg, fig3.cfg).
struct RunConfig {
  Experiment experiment = Experiment::verify;
  std::filesystem::path out = ".";
  std::optional<LogBase> base;  // per-experiment default when unset

  // dna-timeseries / dna-landscape
  DnaParams dna = preset_symmetric_gc();
  Vector p0 = (Vector(4) << 0.6, 0.1, 0.2, 0.1).finished();
  int steps = 50;
  std::optional<double> temperature_kelvin;
  int grid_size = 101;
  Eigen::Vector2d weights{0.5, 0.5};
  bool heatmap = false;

  // image-replicate
  ImageConfig image;

  // verify
  VerifyOptions verify;
};

/// Builds a RunConfig for `experiment` from an optional config file plus
/// override key/value pairs (later entries win; overrides win over the
/// file). Unknown or malformed keys throw std::invalid_argument naming the key.
RunConfig make_run_config(Experiment experiment,
                          const std::optional<std::filesystem::path>& config_file,
                          const std::vector<std::pair<std::string, std::string>>& overrides);

struct TimeseriesResult {
  TrajectoryRecord trace;
  Distribution pi1;
  Distribution pi2;
  double final_potential = 0.0;
  double cumulative = 0.0;
  std::filesystem::path csv;
};

struct LandscapeResult {
  LandscapeGrid grid;
  std::filesystem::path csv;
  std::optional<std::filesystem::path> pgm;
};

struct ImageResult {
  TrajectoryRecord trace;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> snapshot_files;
  std::filesystem::path scales_file;
};

TimeseriesResult run_dna_timeseries(const RunConfig& cfg);
LandscapeResult run_dna_landscape(const RunConfig& cfg);
ImageResult run_image_replicate(const RunConfig& cfg);
VerifyReport run_verify(const RunConfig& cfg);

}  // namespace repkl
