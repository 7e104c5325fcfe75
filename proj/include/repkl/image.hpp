#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "repkl/potential.hpp"

namespace repkl {

/// A 2D probability mass function over pixels: nonnegative values with
/// total mass one within kSimplexTolerance. values(y, x) with y the row.
class GridPMF {
 public:
  explicit GridPMF(Eigen::ArrayXXd values);

  /// Rescales a nonnegative array to total mass one; throws when the total
  /// is not positive (an all-zero draw is an error, never resampled).
  static GridPMF normalized(Eigen::ArrayXXd values);

  Eigen::Index height() const noexcept { return values_.rows(); }
  Eigen::Index width() const noexcept { return values_.cols(); }
  const Eigen::ArrayXXd& values() const noexcept { return values_; }

 private:
  Eigen::ArrayXXd values_;
};

/// Regular tiling of the image into blocks_x * blocks_y rectangles.
/// Dimensions must divide exactly; non-divisible configurations are
/// rejected rather than padded.
struct BlockGrid {
  int blocks_x = 4;
  int blocks_y = 4;

  void validate_for(Eigen::Index width, Eigen::Index height) const;
  int num_tiles() const { return blocks_x * blocks_y; }
};

enum class BlurMode { ergodic, blockwise };

struct ImageConfig {
  Eigen::Index width = 256;
  Eigen::Index height = 256;
  double sigma = 1.5;
  int steps = 50;
  BlockGrid blocks{4, 4};
  double p_even = 0.8;  // Bernoulli success in even (i+j) tiles
  double p_odd = 0.2;   // and in odd (i+j) tiles
  std::uint64_t seed = 7;
  BlurMode mode = BlurMode::blockwise;
  std::vector<int> snapshot_steps{0, 10, 20, 30, 40, 50};

  /// Throws std::invalid_argument on bad dimensions/rates; returns true
  /// when sigma exceeds a quarter of the smallest tile edge (boundary
  /// effects may dominate — callers should warn, not stop).
  bool validate() const;
};

/// Sampled Gaussian, truncated at radius ceil(truncate * sigma) and
/// renormalized to sum one; symmetric, length 2*radius + 1.
Eigen::ArrayXd gaussian_kernel_1d(double sigma, double truncate = 4.0);

/// Separable Gaussian blur over the whole grid with reflect boundaries
/// (half-sample symmetric: d c b a | a b c d | d c b a), then renormalized
/// to total mass one. The pre-normalization defect is written to
/// renorm_defect when given.
GridPMF blur_global(const GridPMF& p, double sigma, double* renorm_defect = nullptr);

/// The same blur applied independently inside each tile (reflect at tile
/// edges), so no mass crosses tile boundaries; each tile's mass is
/// restored exactly after the pass. renorm_defect receives the summed
/// per-tile defects.
GridPMF blur_blockwise(const GridPMF& p, double sigma, const BlockGrid& blocks,
                       double* renorm_defect = nullptr);

/// Binary i.i.d. Bernoulli draw with checkerboard success probability
/// (even (i+j) tiles use p_even, odd use p_odd), normalized to a pmf.
/// Stream: Rng(seed), one uniform per pixel, rows top to bottom and pixels
/// left to right within a row.
GridPMF init_checkerboard(const ImageConfig& config);

/// Mass inside each tile, tiles ordered row-major (iy * blocks_x + ix).
Vector tile_masses(const GridPMF& p, const BlockGrid& blocks);

/// KL potential of the image (default bits): ergodic mode measures
/// D_KL(p || uniform); blockwise mode measures the mass-weighted KL of
/// per-tile conditionals to per-tile uniforms.
double image_potential(const GridPMF& p, BlurMode mode, const BlockGrid& blocks,
                       LogBase base = LogBase::bits);

struct ImageSimulation {
  TrajectoryRecord trace;
  std::vector<std::pair<int, GridPMF>> snapshots;  // (step, state)
};

/// Iterates p_{n+1} = blur(p_n), recording H(q_n), H(p_n,q_n),
/// D_KL(p_n||q_n), V(p_n) (default bits) and per-step mass defects;
/// snapshots are stored at the configured steps. block_masses rows hold
/// the tile masses. Deterministic: identical configs give identical output.
ImageSimulation simulate_image(const ImageConfig& config, LogBase base = LogBase::bits);

}  // namespace repkl
