#pragma once

#include <Eigen/Dense>

#include <vector>

#include "repkl/info_metrics.hpp"

namespace repkl {

/// Row sums of a stochastic kernel must equal one within this tolerance.
inline constexpr double kRowSumTolerance = 1e-12;

/// Kernels are constructed, not measured, so cross-block entries beyond
/// this are treated as genuine leaks.
inline constexpr double kBlockInvarianceTolerance = 1e-14;

/// Block masses at or below this floor count as empty blocks.
inline constexpr double kZeroBlockMassFloor = 1e-300;

/// Residual ||pi T - pi||_1 accepted from the stationary solver.
inline constexpr double kStationaryResidualTolerance = 1e-12;

/// A disjoint cover of the alphabet {0..S-1} by nonempty index sets.
/// Indices inside each block are kept sorted ascending.
class BlockPartition {
 public:
  BlockPartition(Eigen::Index alphabet_size,
                 std::vector<std::vector<Eigen::Index>> blocks);

  /// The trivial one-block partition (ergodic case).
  static BlockPartition single(Eigen::Index alphabet_size);

  Eigen::Index alphabet_size() const noexcept { return alphabet_size_; }
  int num_blocks() const noexcept { return static_cast<int>(blocks_.size()); }
  const std::vector<Eigen::Index>& block(int j) const { return blocks_.at(j); }
  int block_of(Eigen::Index x) const { return block_of_.at(x); }

 private:
  Eigen::Index alphabet_size_;
  std::vector<std::vector<Eigen::Index>> blocks_;
  std::vector<int> block_of_;
};

/// Row-stochastic square matrix; entry (x, y) is the one-step probability
/// of moving from state x to state y.
class StochasticKernel {
 public:
  explicit StochasticKernel(Matrix matrix);

  static StochasticKernel identity(Eigen::Index n) {
    return StochasticKernel(Matrix::Identity(n, n));
  }

  const Matrix& matrix() const noexcept { return matrix_; }
  Eigen::Index size() const noexcept { return matrix_.rows(); }

 private:
  Matrix matrix_;
};

/// q = p T (row vector times matrix). The result is renormalized to total
/// one; the pre-normalization defect |sum - 1| is written to renorm_defect
/// when given, so drift over long runs stays auditable.
Distribution apply_kernel(const Distribution& p, const StochasticKernel& kernel,
                          double* renorm_defect = nullptr);

/// True iff every row's mass stays inside its own block
/// (per-entry tolerance kBlockInvarianceTolerance).
bool check_block_invariance(const StochasticKernel& kernel,
                            const BlockPartition& partition);

/// w_j(p) = total probability inside block j, for every block.
Vector block_masses(const Distribution& p, const BlockPartition& partition);

/// p restricted to block j and renormalized; throws ZeroBlockMassError when
/// the block carries no mass.
Distribution conditional_distribution(const Distribution& p,
                                      const BlockPartition& partition,
                                      int block_index);

/// The block kernel T_j: the sub-matrix of rows/columns in block j. Only
/// meaningful for block-invariant kernels (rows must still be stochastic).
StochasticKernel restrict_to_block(const StochasticKernel& kernel,
                                   const BlockPartition& partition,
                                   int block_index);

/// Stationary distribution pi with pi T = pi, ||pi T - pi||_1 within
/// kStationaryResidualTolerance. 2x2 kernels use the closed form
/// (b/(a+b), a/(a+b)); sizes up to 64 solve the linear system
/// [T^t - I with one row replaced by ones]; larger kernels fall back to
/// power iteration (tolerance 1e-13, at most 10^6 iterations). Throws
/// NonUniqueInvariantError when the stationary direction is not unique.
Distribution block_invariant_distribution(const StochasticKernel& block_kernel);

/// True iff some power T^k, k <= (s-1)^2 + 1, is entrywise positive
/// (Wielandt bound for primitivity).
bool is_primitive(const StochasticKernel& block_kernel);

}  // namespace repkl
