#include "repkl/verify.hpp"

#include <algorithm>
#include <cmath>

#include "repkl/dna.hpp"
#include "repkl/rng.hpp"

namespace repkl {

namespace {

Distribution random_distribution(Rng& rng, Eigen::Index n) {
  Vector v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform01();
  } while (!(v.sum() > 0.0));
  return Distribution::normalized(std::move(v));
}

/// Entries bounded away from zero, for use as reference measures.
Distribution random_positive_distribution(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 0.05 + rng.uniform01();
  return Distribution::normalized(std::move(v));
}

BlockPartition random_partition(Rng& rng, Eigen::Index alphabet, int num_blocks) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(alphabet));
  for (Eigen::Index i = 0; i < alphabet; ++i)
    order[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = alphabet - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  // One state per block up front, the rest assigned at random.
  std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(num_blocks));
  for (int j = 0; j < num_blocks; ++j)
    blocks[static_cast<std::size_t>(j)].push_back(order[static_cast<std::size_t>(j)]);
  for (Eigen::Index i = num_blocks; i < alphabet; ++i)
    blocks[rng.below(static_cast<std::uint64_t>(num_blocks))].push_back(
        order[static_cast<std::size_t>(i)]);
  return BlockPartition(alphabet, std::move(blocks));
}

/// Block-diagonal kernel with strictly positive within-block rows, so every
/// block kernel is primitive.
StochasticKernel random_block_kernel(Rng& rng, const BlockPartition& partition) {
  Matrix m = Matrix::Zero(partition.alphabet_size(), partition.alphabet_size());
  for (int j = 0; j < partition.num_blocks(); ++j) {
    const auto& block = partition.block(j);
    for (Eigen::Index x : block) {
      double total = 0.0;
      for (Eigen::Index y : block) {
        m(x, y) = 0.05 + rng.uniform01();
        total += m(x, y);
      }
      for (Eigen::Index y : block) m(x, y) /= total;
    }
  }
  return StochasticKernel(std::move(m));
}

/// Moves `leak` from row 0's in-block mass to the first out-of-block column.
StochasticKernel inject_cross_block_leak(const StochasticKernel& kernel,
                                         const BlockPartition& partition,
                                         double leak) {
  Matrix m = kernel.matrix();
  const int home = partition.block_of(0);
  for (Eigen::Index y = 0; y < m.cols(); ++y) {
    if (partition.block_of(y) != home) {
      Eigen::Index donor = 0;
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (partition.block_of(c) == home && m(0, c) > m(0, donor)) donor = c;
      m(0, donor) -= leak;
      m(0, y) += leak;
      break;
    }
  }
  return StochasticKernel(std::move(m));
}

struct Checker {
  VerifyReport report;

  void add(const std::string& name, double max_violation, double tolerance) {
    report.checks.push_back(
        {name, max_violation, tolerance, max_violation <= tolerance});
  }
};

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verification(const VerifyOptions& options) {
  Rng rng(options.seed);
  Checker out;
  const DnaParams preset = preset_symmetric_gc();
  const Distribution p0_preset =
      Distribution((Vector(4) << 0.6, 0.1, 0.2, 0.1).finished());

  // Block-mass conservation under block-invariant kernels. The injected
  // leak (negative control) must break exactly this check.
  {
    double violation = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index alphabet = 4 + static_cast<Eigen::Index>(rng.below(5));
      const int num_blocks = 2 + static_cast<int>(rng.below(2));
      const BlockPartition partition = random_partition(rng, alphabet, num_blocks);
      StochasticKernel kernel = random_block_kernel(rng, partition);
      if (options.inject_leak != 0.0)
        kernel = inject_cross_block_leak(kernel, partition, options.inject_leak);
      const Distribution p = random_distribution(rng, alphabet);
      const Vector before = block_masses(p, partition);
      const Vector after = block_masses(apply_kernel(p, kernel), partition);
      violation = std::max(violation, (after - before).cwiseAbs().maxCoeff());
    }
    {
      StochasticKernel kernel = effective_kernel(preset);
      const BlockPartition partition = dna_partition();
      if (options.inject_leak != 0.0)
        kernel = inject_cross_block_leak(kernel, partition, options.inject_leak);
      const Vector before = block_masses(p0_preset, partition);
      const Vector after = block_masses(apply_kernel(p0_preset, kernel), partition);
      violation = std::max(violation, (after - before).cwiseAbs().maxCoeff());
    }
    out.add("lemma1_block_mass_conservation", violation, 1e-12);
  }

  // Conditional evolution: (pT)^(j) = p^(j) T_j.
  {
    double violation = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index alphabet = 4 + static_cast<Eigen::Index>(rng.below(5));
      const int num_blocks = 2 + static_cast<int>(rng.below(2));
      const BlockPartition partition = random_partition(rng, alphabet, num_blocks);
      const StochasticKernel kernel = random_block_kernel(rng, partition);
      const Distribution p = random_distribution(rng, alphabet);
      const Distribution next = apply_kernel(p, kernel);
      for (int j = 0; j < partition.num_blocks(); ++j) {
        const Distribution lhs = conditional_distribution(next, partition, j);
        const Distribution rhs = apply_kernel(
            conditional_distribution(p, partition, j),
            restrict_to_block(kernel, partition, j));
        violation = std::max(
            violation, (lhs.probs() - rhs.probs()).cwiseAbs().maxCoeff());
      }
    }
    out.add("lemma1_conditional_evolution", violation, 1e-12);
  }

  // Blockwise KL decomposition equals the direct divergence.
  {
    double violation = 0.0;
    for (int trial = 0; trial < options.draws; ++trial) {
      const BlockPartition partition = random_partition(rng, 4, 2);
      Vector weights(2);
      weights << 0.05 + rng.uniform01(), 0.05 + rng.uniform01();
      weights /= weights.sum();
      std::vector<Distribution> invariants;
      for (int j = 0; j < 2; ++j)
        invariants.push_back(random_positive_distribution(
            rng, static_cast<Eigen::Index>(partition.block(j).size())));
      const SteadySpec mixture(partition, weights, invariants);
      const Distribution p = random_distribution(rng, 4);
      const BlockKlDecomposition decomp = kl_block_decomposition(p, mixture);
      violation = std::max(
          violation,
          std::abs(decomp.total - kl_divergence(p, mixture.assembled())));
    }
    out.add("lemma2_block_decomposition", violation, 1e-10);
  }

  // KL contraction under a kernel with stationary reference.
  {
    double violation = 0.0;
    for (int trial = 0; trial < options.draws; ++trial) {
      const double a = rng.uniform(0.01, 0.99);
      const double b = rng.uniform(0.01, 0.99);
      Matrix m(2, 2);
      m << 1.0 - a, a, b, 1.0 - b;
      const StochasticKernel kernel(m);
      const Distribution pi = block_invariant_distribution(kernel);
      const Distribution r = random_distribution(rng, 2);
      violation = std::max(violation,
                           kl_divergence(apply_kernel(r, kernel), pi) -
                               kl_divergence(r, pi));
    }
    out.add("dpi_contraction", violation, 1e-12);
  }

  // One-step inequality against assembled steady mixtures.
  {
    double violation = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index alphabet = 4 + static_cast<Eigen::Index>(rng.below(5));
      const int num_blocks = 2 + static_cast<int>(rng.below(2));
      const BlockPartition partition = random_partition(rng, alphabet, num_blocks);
      const StochasticKernel kernel = random_block_kernel(rng, partition);
      const Distribution p = random_distribution(rng, alphabet);
      const SteadySpec spec = SteadySpec::from_kernel(kernel, partition, p);
      const Distribution pi = spec.assembled();
      violation = std::max(violation,
                           kl_divergence(apply_kernel(p, kernel), pi) -
                               kl_divergence(p, pi));
    }
    out.add("one_step_inequality", violation, 1e-12);
  }

  // Potential monotonicity over long runs (preset and random parameters).
  {
    double violation = 0.0;
    const auto run = [&](const DnaParams& params, const Distribution& p0, int steps) {
      const TrajectoryRecord trace = simulate_timeseries(params, p0, steps);
      for (std::size_t n = 0; n + 1 < trace.potential.size(); ++n)
        violation = std::max(violation, trace.potential[n + 1] - trace.potential[n]);
      return trace;
    };
    run(preset, p0_preset, 220);
    for (int trial = 0; trial < 20; ++trial) {
      DnaParams params{{rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.2),
                        rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.2)},
                       {rng.uniform(0.001, 0.01), rng.uniform(0.001, 0.01),
                        rng.uniform(0.001, 0.01), rng.uniform(0.001, 0.01)},
                       rng.uniform(0.0, 1.0)};
      run(params, random_distribution(rng, 4), 200);
    }
    out.add("theorem1_monotonicity", violation, 1e-10);
  }

  // Convergence of the potential when all blocks are primitive.
  {
    const TrajectoryRecord trace = simulate_timeseries(preset, p0_preset, 2000);
    out.add("theorem1_convergence", std::max(trace.potential.back(), 0.0), 1e-8);
  }

  // Step production and potential drop nonnegativity (second law).
  {
    double production_violation = 0.0;
    double drop_violation = 0.0;
    const auto scan = [&](const TrajectoryRecord& trace) {
      for (std::size_t n = 0; n < trace.steps(); ++n) {
        production_violation = std::max(production_violation, -trace.production[n]);
        drop_violation = std::max(drop_violation, -trace.potential_drop[n]);
      }
    };
    scan(simulate_timeseries(preset, p0_preset, 200));
    for (int trial = 0; trial < 20; ++trial) {
      DnaParams params{{rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.2),
                        rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.2)},
                       {rng.uniform(0.001, 0.01), rng.uniform(0.001, 0.01),
                        rng.uniform(0.001, 0.01), rng.uniform(0.001, 0.01)},
                       rng.uniform(0.0, 1.0)};
      scan(simulate_timeseries(params, random_distribution(rng, 4), 100));
    }
    // Equality case: a steady mixture start produces nothing.
    const SteadySpec spec = dna_steady_spec(preset, p0_preset);
    const StepProduction steady =
        step_production(spec.assembled(), effective_kernel(preset), spec);
    production_violation =
        std::max(production_violation, std::abs(steady.production));
    out.add("theorem2_step_production", production_violation, 1e-10);
    out.add("corollary_potential_drop", drop_violation, 1e-10);
  }

  // Closed-form block invariants agree with the generic stationary solver.
  {
    double violation = 0.0;
    for (int trial = 0; trial < options.draws; ++trial) {
      DnaParams params{{rng.uniform(0.001, 0.5), rng.uniform(0.001, 0.5),
                        rng.uniform(0.001, 0.5), rng.uniform(0.001, 0.5)},
                       {rng.uniform(0.001, 0.5), rng.uniform(0.001, 0.5),
                        rng.uniform(0.001, 0.5), rng.uniform(0.001, 0.5)},
                       rng.uniform(0.0, 1.0)};
      const auto [pi1, pi2] = dna_invariants(params);
      const StochasticKernel kernel = effective_kernel(params);
      const BlockPartition partition = dna_partition();
      const Distribution solved1 =
          block_invariant_distribution(restrict_to_block(kernel, partition, 0));
      const Distribution solved2 =
          block_invariant_distribution(restrict_to_block(kernel, partition, 1));
      violation = std::max(
          {violation, (pi1.probs() - solved1.probs()).cwiseAbs().maxCoeff(),
           (pi2.probs() - solved2.probs()).cwiseAbs().maxCoeff()});
    }
    out.add("stationary_solver_agreement", violation, 1e-12);
  }

  return out.report;
}

}  // namespace repkl
