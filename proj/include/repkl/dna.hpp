#pragma once

#include <utility>

#include "repkl/potential.hpp"

namespace repkl {

/// Per-step substitution (flip) probabilities of one channel, indexed by
/// direction: at = P(A->T), ta = P(T->A), cg = P(C->G), gc = P(G->C).
struct SubstitutionRates {
  double at = 0.0;
  double ta = 0.0;
  double cg = 0.0;
  double gc = 0.0;
};

/// Four-state substitution model on (A, T, C, G) with blocks {A,T} | {C,G}:
/// an extension channel mixed with a proofreading/repair channel invoked
/// with probability repair_mix after extension.
struct DnaParams {
  SubstitutionRates extension;
  SubstitutionRates repair;
  double repair_mix = 0.0;

  /// All rates strictly inside (0,1), repair_mix in [0,1];
  /// throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Convex mixture (1 - repair_mix) * extension + repair_mix * repair.
  SubstitutionRates effective() const;
};

/// Time-series preset: symmetric GC rates, so pi_2* = (1/2, 1/2).
DnaParams preset_symmetric_gc();

/// Landscape preset: asymmetric GC rates placing pi_2*(C) at 0.60.
DnaParams preset_asymmetric_gc();

/// State order (A, T, C, G); blocks {A,T} | {C,G}.
BlockPartition dna_partition();

/// The effective one-step kernel: 4x4, block-diagonal over the partition.
StochasticKernel effective_kernel(const DnaParams& params);

/// Closed-form block invariants (pi_1*, pi_2*) of the effective kernel:
/// for a 2x2 block [[1-a, a], [b, 1-b]] the invariant is (b/(a+b), a/(a+b)).
std::pair<Distribution, Distribution> dna_invariants(const DnaParams& params);

/// Reachable steady set for these dynamics and start, using the
/// closed-form invariants.
SteadySpec dna_steady_spec(const DnaParams& params, const Distribution& p0);

/// Iterates p_{n+1} = p_n T for `steps` steps, recording V(p_n) for every n
/// and H(q_n), H(p_n,q_n), D_KL(p_n||q_n), dV_n, S_n for n < steps. Values
/// are converted to `base` once at recording time. Steps whose divergence
/// hits the +infinity convention are recorded as infinite, not dropped.
TrajectoryRecord simulate_timeseries(const DnaParams& params, const Distribution& p0,
                                     int steps, LogBase base = LogBase::nats,
                                     std::optional<double> temperature_kelvin = std::nullopt);

/// Probability mass escaping block `block_index` in one step of `kernel`,
/// averaged under the conditional of p on that block. Throws
/// ZeroBlockMassError when the block is empty.
double block_error_rate(const Distribution& p, const StochasticKernel& kernel,
                        int block_index);

/// (e_AT, e_GC): both block error rates; requires both block masses positive.
std::pair<double, double> block_error_rates(const Distribution& p,
                                            const StochasticKernel& kernel);

/// Coarse channel on the alphabet {AT, GC} induced by the block error rates.
struct CoarseChannel {
  double error_at = 0.0;
  double error_gc = 0.0;
  Eigen::Vector2d weights{0.5, 0.5};

  Eigen::Matrix2d matrix() const;
  void validate() const;
};

/// Block-level mutual information of the coarse channel, in bits.
double coarse_mutual_information(const CoarseChannel& channel);

/// The potential surface V(x, y) = w_1 KL([x,1-x] || pi_1*)
///                               + w_2 KL([y,1-y] || pi_2*)  (nats),
/// sampled on a uniform grid over [0,1]^2; x is the A fraction of the AT
/// block, y the C fraction of the GC block. values(iy, ix) holds the node
/// (x = ix * pitch, y = iy * pitch).
struct LandscapeGrid {
  Eigen::ArrayXXd values;
  double min_x = 0.0;  // analytic minimum: pi_1*(A)
  double min_y = 0.0;  // analytic minimum: pi_2*(C)

  int grid_size() const { return static_cast<int>(values.rows()); }
  double pitch() const { return 1.0 / static_cast<double>(grid_size() - 1); }
};

LandscapeGrid potential_landscape(const DnaParams& params,
                                  const Eigen::Vector2d& weights,
                                  int grid_size = 101);

/// Quadratic coefficients (c_x, c_y) of the basin around the minimum,
/// estimated by a 5-point central second difference at the grid node
/// nearest (min_x, min_y); c = V''/2 in nats.
std::pair<double, double> landscape_curvature(const LandscapeGrid& grid);

/// The dimensionless chemical affinity (delta mu / k_B T) implied by a
/// proofreading-to-base rate-ratio change, read as an exact inversion:
/// log(proofread_ratio / base_ratio).
double implied_affinity(double base_ratio, double proofread_ratio);

}  // namespace repkl
