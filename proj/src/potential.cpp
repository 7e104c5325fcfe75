#include "repkl/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace repkl {

SteadySpec::SteadySpec(BlockPartition partition_, Vector weights_,
                       std::vector<Distribution> invariants_)
    : partition(std::move(partition_)), weights(std::move(weights_)),
      invariants(std::move(invariants_)) {
  if (weights.size() != partition.num_blocks())
    throw std::invalid_argument("SteadySpec: one weight per block required");
  if (static_cast<int>(invariants.size()) != partition.num_blocks())
    throw std::invalid_argument("SteadySpec: one invariant per block required");
  detail::require_pmf(weights, "SteadySpec::weights");
  for (int j = 0; j < partition.num_blocks(); ++j) {
    if (invariants[static_cast<std::size_t>(j)].size() !=
        static_cast<Eigen::Index>(partition.block(j).size()))
      throw std::invalid_argument("SteadySpec: invariant size does not match block");
  }
}

SteadySpec SteadySpec::from_kernel(const StochasticKernel& kernel,
                                   const BlockPartition& partition,
                                   const Distribution& p0) {
  if (!check_block_invariance(kernel, partition))
    throw std::invalid_argument("SteadySpec::from_kernel: kernel is not block-invariant");
  std::vector<Distribution> invariants;
  invariants.reserve(static_cast<std::size_t>(partition.num_blocks()));
  for (int j = 0; j < partition.num_blocks(); ++j)
    invariants.push_back(
        block_invariant_distribution(restrict_to_block(kernel, partition, j)));
  return SteadySpec(partition, block_masses(p0, partition), std::move(invariants));
}

Distribution SteadySpec::assembled() const {
  Vector full = Vector::Zero(partition.alphabet_size());
  for (int j = 0; j < partition.num_blocks(); ++j) {
    const auto& block = partition.block(j);
    const auto& pi = invariants[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < block.size(); ++k)
      full(block[k]) = weights(j) * pi(static_cast<Eigen::Index>(k));
  }
  return Distribution(std::move(full));
}

double potential_V(const Distribution& p, const SteadySpec& spec) {
  const Vector w = block_masses(p, spec.partition);
  for (int j = 0; j < spec.partition.num_blocks(); ++j) {
    if (std::abs(w(j) - spec.weights(j)) > kMassDriftTolerance) {
      std::ostringstream msg;
      msg << "potential_V: block " << j << " mass " << w(j)
          << " drifted from conserved " << spec.weights(j)
          << " (non-block-invariant kernel?)";
      throw MassDriftError(msg.str());
    }
  }
  double v = 0.0;
  for (int j = 0; j < spec.partition.num_blocks(); ++j) {
    if (spec.weights(j) <= kZeroBlockMassFloor) continue;  // empty block stays empty
    const Distribution cond = conditional_distribution(p, spec.partition, j);
    v += spec.weights(j) *
         kl_divergence(cond, spec.invariants[static_cast<std::size_t>(j)]);
  }
  return v;
}

BlockKlDecomposition kl_block_decomposition(const Distribution& p,
                                            const SteadySpec& mixture) {
  for (int j = 0; j < mixture.partition.num_blocks(); ++j) {
    if (!(mixture.weights(j) > 0.0))
      throw std::invalid_argument(
          "kl_block_decomposition: mixture weights must be positive");
  }
  const Vector w = block_masses(p, mixture.partition);
  BlockKlDecomposition out;
  out.within_blocks = Vector::Zero(mixture.partition.num_blocks());
  for (int j = 0; j < mixture.partition.num_blocks(); ++j) {
    if (w(j) <= kZeroBlockMassFloor) continue;  // 0 log(0/w) = 0
    const Distribution cond = conditional_distribution(p, mixture.partition, j);
    out.within_blocks(j) =
        w(j) * kl_divergence(cond, mixture.invariants[static_cast<std::size_t>(j)]);
    out.mass_mismatch += w(j) * std::log(w(j) / mixture.weights(j));
  }
  out.total = out.within_blocks.sum() + out.mass_mismatch;
  return out;
}

StepOutcome advance_step(const Distribution& p, const StochasticKernel& kernel,
                         const SteadySpec& spec,
                         std::optional<double> temperature_kelvin) {
  if (!check_block_invariance(kernel, spec.partition))
    throw std::invalid_argument("advance_step: kernel is not block-invariant");
  double defect = 0.0;
  Distribution q = apply_kernel(p, kernel, &defect);

  StepOutcome outcome{StepProduction{}, std::move(q), defect, true};
  try {
    outcome.production.step_divergence = kl_divergence(p, outcome.next);
  } catch (const SupportMismatchError&) {
    outcome.production.step_divergence = std::numeric_limits<double>::infinity();
    outcome.divergence_finite = false;
  }
  outcome.production.potential_drop =
      potential_V(p, spec) - potential_V(outcome.next, spec);
  outcome.production.production =
      outcome.production.step_divergence + outcome.production.potential_drop;
  if (temperature_kelvin)
    outcome.production.production_joules =
        to_physical_units(outcome.production.production, *temperature_kelvin);
  return outcome;
}

StepProduction step_production(const Distribution& p, const StochasticKernel& kernel,
                               const SteadySpec& spec,
                               std::optional<double> temperature_kelvin) {
  StepOutcome outcome = advance_step(p, kernel, spec, temperature_kelvin);
  if (!outcome.divergence_finite)
    throw SupportMismatchError(
        "step_production: D_KL(p_n || q_n) is infinite (support mismatch)");
  return outcome.production;
}

double cumulative_production(const TrajectoryRecord& trace) {
  if (trace.potential.size() != trace.steps() + 1)
    throw std::invalid_argument(
        "cumulative_production: potential column must have one extra row");
  double total = 0.0, divergence_sum = 0.0;
  bool finite = true;
  for (std::size_t n = 0; n < trace.steps(); ++n) {
    total += trace.production[n];
    divergence_sum += trace.step_divergence[n];
    finite = finite && std::isfinite(trace.production[n]);
  }
  const double telescoped =
      divergence_sum + trace.potential.front() - trace.potential.back();
  if (finite) {
    if (std::abs(total - telescoped) > kTelescopingTolerance) {
      std::ostringstream msg;
      msg << "cumulative_production: telescoping identity violated ("
          << total << " vs " << telescoped << ")";
      throw Error(msg.str());
    }
  } else if (std::isfinite(telescoped)) {
    throw Error("cumulative_production: infinite steps but finite divergence sum");
  }
  return total;
}

double to_physical_units(double production_nats, double temperature_kelvin) {
  if (!(temperature_kelvin > 0.0))
    throw std::invalid_argument("to_physical_units: temperature must be positive");
  return kBoltzmann * temperature_kelvin * production_nats;
}

}  // namespace repkl
