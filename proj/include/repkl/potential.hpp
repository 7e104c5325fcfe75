#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repkl/markov.hpp"

namespace repkl {

/// Boltzmann constant, exact SI value (J/K).
inline constexpr double kBoltzmann = 1.380649e-23;

/// Block masses along a trajectory may drift at most this far from the
/// conserved initial masses before potential_V refuses to evaluate.
inline constexpr double kMassDriftTolerance = 1e-9;

/// Slack allowed when checking the telescoping identity
/// sum S_n = sum D_n + V(p_0) - V(p_N).
inline constexpr double kTelescopingTolerance = 1e-10;

/// The reachable steady set for given dynamics: the block partition, the
/// conserved block masses w_j(p_0), and one invariant distribution per
/// block. With unique block invariants the potential V(p) reduces to
/// sum_j w_j(p_0) D_KL(p^(j) || pi_j*).
struct SteadySpec {
  BlockPartition partition;
  Vector weights;                       // w_j(p_0), sums to one
  std::vector<Distribution> invariants; // pi_j*, one per block

  SteadySpec(BlockPartition partition_, Vector weights_,
             std::vector<Distribution> invariants_);

  /// Builds the spec from dynamics: conserved masses from p0, block
  /// invariants from the generic stationary solver.
  static SteadySpec from_kernel(const StochasticKernel& kernel,
                                const BlockPartition& partition,
                                const Distribution& p0);

  /// The mixture sum_j w_j pi_j as a full-alphabet distribution.
  Distribution assembled() const;
};

/// Per-step bookkeeping: S_n = D_n + dV_n, all in nats;
/// production_joules = k_B T S_n when a temperature was supplied.
struct StepProduction {
  double step_divergence = 0.0;   // D_n = D_KL(p_n || q_n)
  double potential_drop = 0.0;    // dV_n = V(p_n) - V(p_{n+1})
  double production = 0.0;        // S_n = D_n + dV_n
  std::optional<double> production_joules;
};

/// Step result used by trajectory drivers: the production bookkeeping, the
/// renormalized next state, and the renormalization defect. When the step
/// divergence hits the +infinity convention (support mismatch between p_n
/// and q_n) the step is flagged rather than dropped.
struct StepOutcome {
  StepProduction production;
  Distribution next;
  double renorm_defect = 0.0;
  bool divergence_finite = true;
};

/// Per-step trajectory table. potential has N+1 entries (V is recorded
/// before the step-dependent quantities); all stepwise columns have N.
struct TrajectoryRecord {
  LogBase base = LogBase::nats;
  std::vector<double> potential;       // V(p_n), n = 0..N
  std::vector<Vector> block_masses;    // w(p_n), n = 0..N
  std::vector<double> entropy;         // H(q_n), n < N
  std::vector<double> cross_entropy;   // H(p_n, q_n)
  std::vector<double> step_divergence; // D_KL(p_n || q_n)
  std::vector<double> potential_drop;  // dV_n
  std::vector<double> production;      // S_n
  std::vector<double> mass_defect;     // renormalization defect per step
  std::vector<double> error_rate_at;   // optional per-step block error rates
  std::vector<double> error_rate_gc;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> parameters;

  std::size_t steps() const noexcept { return step_divergence.size(); }
};

/// KL potential V(p) = sum_j w_j(p_0) D_KL(p^(j) || pi_j*), in nats.
/// Requires p's block masses to match spec.weights within
/// kMassDriftTolerance (throws MassDriftError otherwise, the signature of
/// a non-block-invariant kernel having been applied).
double potential_V(const Distribution& p, const SteadySpec& spec);

/// Blockwise split of D_KL(p || sum_j w_j pi_j):
/// total = sum_j w_j(p) D_KL(p^(j) || pi_j)  +  sum_j w_j(p) log(w_j(p)/w_j).
struct BlockKlDecomposition {
  Vector within_blocks;      // w_j(p) D_KL(p^(j) || pi_j) per block
  double mass_mismatch = 0;  // sum_j w_j(p) log(w_j(p) / w_j)
  double total = 0;          // sum of the above
};

/// Decomposes D_KL(p || mixture.assembled()). All mixture weights must be
/// positive; blocks where w_j(p) = 0 contribute zero to both sums.
BlockKlDecomposition kl_block_decomposition(const Distribution& p,
                                            const SteadySpec& mixture);

/// Advances one step q = p T and assembles the production bookkeeping.
/// The kernel must be block-invariant for spec.partition.
StepOutcome advance_step(const Distribution& p, const StochasticKernel& kernel,
                         const SteadySpec& spec,
                         std::optional<double> temperature_kelvin = std::nullopt);

/// advance_step without the state; propagates SupportMismatchError when
/// D_n is the +infinity case.
StepProduction step_production(const Distribution& p, const StochasticKernel& kernel,
                               const SteadySpec& spec,
                               std::optional<double> temperature_kelvin = std::nullopt);

/// Sum of S_n over the recorded steps. Verifies the telescoping identity
/// sum S_n = sum D_n + V(p_0) - V(p_N) within kTelescopingTolerance and
/// throws Error if the record is inconsistent.
double cumulative_production(const TrajectoryRecord& trace);

/// k_B * T * S: dimensionless production (nats) to joules.
double to_physical_units(double production_nats, double temperature_kelvin);

}  // namespace repkl
