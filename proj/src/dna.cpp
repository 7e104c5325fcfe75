#include "repkl/dna.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace repkl {

namespace {

void require_rate(double value, const char* field) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream msg;
    msg << "DnaParams: " << field << " = " << value
        << " must lie strictly inside (0, 1)";
    throw std::invalid_argument(msg.str());
  }
}

double convert(double nats, LogBase base) {
  return detail::convert_from_nats(nats, base);
}

}  // namespace

void DnaParams::validate() const {
  require_rate(extension.at, "rate_at");
  require_rate(extension.ta, "rate_ta");
  require_rate(extension.cg, "rate_cg");
  require_rate(extension.gc, "rate_gc");
  require_rate(repair.at, "repair_at");
  require_rate(repair.ta, "repair_ta");
  require_rate(repair.cg, "repair_cg");
  require_rate(repair.gc, "repair_gc");
  if (!(repair_mix >= 0.0 && repair_mix <= 1.0)) {
    std::ostringstream msg;
    msg << "DnaParams: repair_mix = " << repair_mix << " must lie in [0, 1]";
    throw std::invalid_argument(msg.str());
  }
  const SubstitutionRates eff = effective();
  require_rate(eff.at, "effective at");
  require_rate(eff.ta, "effective ta");
  require_rate(eff.cg, "effective cg");
  require_rate(eff.gc, "effective gc");
}

SubstitutionRates DnaParams::effective() const {
  const double keep = 1.0 - repair_mix;
  return SubstitutionRates{
      keep * extension.at + repair_mix * repair.at,
      keep * extension.ta + repair_mix * repair.ta,
      keep * extension.cg + repair_mix * repair.cg,
      keep * extension.gc + repair_mix * repair.gc,
  };
}

DnaParams preset_symmetric_gc() {
  return DnaParams{{0.020, 0.010, 0.015, 0.015}, {0.005, 0.003, 0.004, 0.004}, 0.30};
}

DnaParams preset_asymmetric_gc() {
  return DnaParams{{0.020, 0.010, 0.014, 0.021}, {0.005, 0.003, 0.004, 0.006}, 0.30};
}

BlockPartition dna_partition() { return BlockPartition(4, {{0, 1}, {2, 3}}); }

StochasticKernel effective_kernel(const DnaParams& params) {
  params.validate();
  const SubstitutionRates e = params.effective();
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0 - e.at; m(0, 1) = e.at;
  m(1, 0) = e.ta;       m(1, 1) = 1.0 - e.ta;
  m(2, 2) = 1.0 - e.cg; m(2, 3) = e.cg;
  m(3, 2) = e.gc;       m(3, 3) = 1.0 - e.gc;
  return StochasticKernel(std::move(m));
}

std::pair<Distribution, Distribution> dna_invariants(const DnaParams& params) {
  params.validate();
  const SubstitutionRates e = params.effective();
  Vector pi1(2), pi2(2);
  pi1 << e.ta / (e.at + e.ta), e.at / (e.at + e.ta);
  pi2 << e.gc / (e.cg + e.gc), e.cg / (e.cg + e.gc);
  return {Distribution(std::move(pi1)), Distribution(std::move(pi2))};
}

SteadySpec dna_steady_spec(const DnaParams& params, const Distribution& p0) {
  auto [pi1, pi2] = dna_invariants(params);
  BlockPartition partition = dna_partition();
  Vector weights = block_masses(p0, partition);
  return SteadySpec(std::move(partition), std::move(weights),
                    {std::move(pi1), std::move(pi2)});
}

TrajectoryRecord simulate_timeseries(const DnaParams& params, const Distribution& p0,
                                     int steps, LogBase base,
                                     std::optional<double> temperature_kelvin) {
  if (steps < 0)
    throw std::invalid_argument("simulate_timeseries: steps must be nonnegative");
  const StochasticKernel kernel = effective_kernel(params);
  const BlockPartition partition = dna_partition();
  const SteadySpec spec = dna_steady_spec(params, p0);

  const auto error_rate_or_nan = [&](const Distribution& p, int block) {
    try {
      return block_error_rate(p, kernel, block);
    } catch (const ZeroBlockMassError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  TrajectoryRecord rec;
  rec.base = base;
  rec.parameters = {{"rate_at", std::to_string(params.extension.at)},
                    {"rate_ta", std::to_string(params.extension.ta)},
                    {"rate_cg", std::to_string(params.extension.cg)},
                    {"rate_gc", std::to_string(params.extension.gc)},
                    {"repair_at", std::to_string(params.repair.at)},
                    {"repair_ta", std::to_string(params.repair.ta)},
                    {"repair_cg", std::to_string(params.repair.cg)},
                    {"repair_gc", std::to_string(params.repair.gc)},
                    {"repair_mix", std::to_string(params.repair_mix)},
                    {"steps", std::to_string(steps)}};
  Distribution p = p0;
  for (int n = 0; n <= steps; ++n) {
    // V(p_n) first, then the step-dependent quantities.
    rec.potential.push_back(convert(potential_V(p, spec), base));
    rec.block_masses.push_back(block_masses(p, partition));
    rec.error_rate_at.push_back(error_rate_or_nan(p, 0));
    rec.error_rate_gc.push_back(error_rate_or_nan(p, 1));
    if (n == steps) break;

    const StepOutcome outcome = advance_step(p, kernel, spec, temperature_kelvin);
    rec.entropy.push_back(shannon_entropy(outcome.next, base));
    rec.cross_entropy.push_back(cross_entropy(p, outcome.next, base));
    rec.step_divergence.push_back(convert(outcome.production.step_divergence, base));
    rec.potential_drop.push_back(convert(outcome.production.potential_drop, base));
    rec.production.push_back(convert(outcome.production.production, base));
    rec.mass_defect.push_back(outcome.renorm_defect);
    p = outcome.next;
  }
  return rec;
}

double block_error_rate(const Distribution& p, const StochasticKernel& kernel,
                        int block_index) {
  const BlockPartition partition = dna_partition();
  if (p.size() != 4 || kernel.size() != 4)
    throw std::invalid_argument("block_error_rate: four-state model required");
  const auto& block = partition.block(block_index);
  double mass = 0.0;
  for (Eigen::Index x : block) mass += p(x);
  if (mass <= kZeroBlockMassFloor) {
    std::ostringstream msg;
    msg << "block_error_rate: block " << block_index << " has no mass";
    throw ZeroBlockMassError(msg.str());
  }
  double rate = 0.0;
  for (Eigen::Index x : block) {
    double escape = 0.0;
    for (Eigen::Index y = 0; y < 4; ++y)
      if (partition.block_of(y) != block_index) escape += kernel.matrix()(x, y);
    rate += (p(x) / mass) * escape;
  }
  return rate;
}

std::pair<double, double> block_error_rates(const Distribution& p,
                                            const StochasticKernel& kernel) {
  return {block_error_rate(p, kernel, 0), block_error_rate(p, kernel, 1)};
}

Eigen::Matrix2d CoarseChannel::matrix() const {
  Eigen::Matrix2d m;
  m << 1.0 - error_at, error_at, error_gc, 1.0 - error_gc;
  return m;
}

void CoarseChannel::validate() const {
  if (!(error_at >= 0.0 && error_at <= 1.0))
    throw std::invalid_argument("CoarseChannel: error_at outside [0, 1]");
  if (!(error_gc >= 0.0 && error_gc <= 1.0))
    throw std::invalid_argument("CoarseChannel: error_gc outside [0, 1]");
  detail::require_pmf(weights, "CoarseChannel::weights");
}

double coarse_mutual_information(const CoarseChannel& channel) {
  channel.validate();
  return channel_mutual_information(channel.weights, channel.matrix());
}

LandscapeGrid potential_landscape(const DnaParams& params,
                                  const Eigen::Vector2d& weights,
                                  int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument("potential_landscape: grid_size must be at least 2");
  detail::require_pmf(weights, "potential_landscape(weights)");
  auto [pi1, pi2] = dna_invariants(params);

  LandscapeGrid grid;
  grid.min_x = pi1(0);
  grid.min_y = pi2(0);
  grid.values.resize(grid_size, grid_size);
  const double pitch = 1.0 / static_cast<double>(grid_size - 1);
  for (int iy = 0; iy < grid_size; ++iy) {
    const double y = static_cast<double>(iy) * pitch;
    for (int ix = 0; ix < grid_size; ++ix) {
      const double x = static_cast<double>(ix) * pitch;
      grid.values(iy, ix) = weights(0) * bernoulli_kl(x, grid.min_x) +
                            weights(1) * bernoulli_kl(y, grid.min_y);
    }
  }
  return grid;
}

std::pair<double, double> landscape_curvature(const LandscapeGrid& grid) {
  const int g = grid.grid_size();
  const double pitch = grid.pitch();
  const int ix = static_cast<int>(std::lround(grid.min_x / pitch));
  const int iy = static_cast<int>(std::lround(grid.min_y / pitch));
  if (ix < 2 || ix > g - 3 || iy < 2 || iy > g - 3)
    throw std::invalid_argument(
        "landscape_curvature: minimum too close to the grid boundary");
  const auto second = [&](auto value) {
    return (-value(-2) + 16.0 * value(-1) - 30.0 * value(0) + 16.0 * value(1) -
            value(2)) /
           (12.0 * pitch * pitch);
  };
  const double d2x = second([&](int o) { return grid.values(iy, ix + o); });
  const double d2y = second([&](int o) { return grid.values(iy + o, ix); });
  return {d2x / 2.0, d2y / 2.0};
}

double implied_affinity(double base_ratio, double proofread_ratio) {
  if (!(base_ratio > 0.0) || !(proofread_ratio > 0.0))
    throw std::invalid_argument("implied_affinity: ratios must be positive");
  return std::log(proofread_ratio / base_ratio);
}

}  // namespace repkl
