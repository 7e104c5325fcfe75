#include "repkl/markov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace repkl {

BlockPartition::BlockPartition(Eigen::Index alphabet_size,
                               std::vector<std::vector<Eigen::Index>> blocks)
    : alphabet_size_(alphabet_size), blocks_(std::move(blocks)),
      block_of_(static_cast<std::size_t>(alphabet_size), -1) {
  if (alphabet_size <= 0)
    throw std::invalid_argument("BlockPartition: alphabet size must be positive");
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    auto& block = blocks_[j];
    if (block.empty())
      throw std::invalid_argument("BlockPartition: empty block");
    std::sort(block.begin(), block.end());
    for (Eigen::Index x : block) {
      if (x < 0 || x >= alphabet_size)
        throw std::invalid_argument("BlockPartition: index outside alphabet");
      if (block_of_[static_cast<std::size_t>(x)] != -1)
        throw std::invalid_argument("BlockPartition: blocks are not disjoint");
      block_of_[static_cast<std::size_t>(x)] = static_cast<int>(j);
    }
  }
  for (Eigen::Index x = 0; x < alphabet_size; ++x) {
    if (block_of_[static_cast<std::size_t>(x)] == -1) {
      std::ostringstream msg;
      msg << "BlockPartition: state " << x << " is not covered";
      throw std::invalid_argument(msg.str());
    }
  }
}

BlockPartition BlockPartition::single(Eigen::Index alphabet_size) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(alphabet_size));
  for (Eigen::Index x = 0; x < alphabet_size; ++x)
    all[static_cast<std::size_t>(x)] = x;
  return BlockPartition(alphabet_size, {std::move(all)});
}

StochasticKernel::StochasticKernel(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw std::invalid_argument("StochasticKernel: matrix must be square and nonempty");
  for (Eigen::Index x = 0; x < matrix_.rows(); ++x) {
    if ((matrix_.row(x).array() < 0.0).any()) {
      std::ostringstream msg;
      msg << "StochasticKernel: negative entry in row " << x;
      throw std::invalid_argument(msg.str());
    }
    const double row_sum = matrix_.row(x).sum();
    if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "StochasticKernel: row " << x << " sums to " << row_sum;
      throw std::invalid_argument(msg.str());
    }
  }
}

Distribution apply_kernel(const Distribution& p, const StochasticKernel& kernel,
                          double* renorm_defect) {
  if (p.size() != kernel.size())
    throw std::invalid_argument("apply_kernel: dimension mismatch");
  Vector q = kernel.matrix().transpose() * p.probs();
  const double total = detail::stable_sum(q);
  if (renorm_defect) *renorm_defect = std::abs(total - 1.0);
  q /= total;
  return Distribution(std::move(q));
}

bool check_block_invariance(const StochasticKernel& kernel,
                            const BlockPartition& partition) {
  if (kernel.size() != partition.alphabet_size())
    throw std::invalid_argument("check_block_invariance: dimension mismatch");
  const Matrix& m = kernel.matrix();
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const int j = partition.block_of(x);
    for (Eigen::Index y = 0; y < m.cols(); ++y) {
      if (partition.block_of(y) != j && std::abs(m(x, y)) > kBlockInvarianceTolerance)
        return false;
    }
  }
  return true;
}

Vector block_masses(const Distribution& p, const BlockPartition& partition) {
  if (p.size() != partition.alphabet_size())
    throw std::invalid_argument("block_masses: dimension mismatch");
  Vector w = Vector::Zero(partition.num_blocks());
  for (int j = 0; j < partition.num_blocks(); ++j) {
    double mass = 0.0;
    for (Eigen::Index x : partition.block(j)) mass += p(x);
    w(j) = mass;
  }
  return w;
}

Distribution conditional_distribution(const Distribution& p,
                                      const BlockPartition& partition,
                                      int block_index) {
  const auto& block = partition.block(block_index);
  Vector restricted(static_cast<Eigen::Index>(block.size()));
  for (std::size_t k = 0; k < block.size(); ++k)
    restricted(static_cast<Eigen::Index>(k)) = p(block[k]);
  const double mass = restricted.sum();
  if (mass <= kZeroBlockMassFloor) {
    std::ostringstream msg;
    msg << "conditional_distribution: block " << block_index << " has mass " << mass;
    throw ZeroBlockMassError(msg.str());
  }
  return Distribution(restricted / mass);
}

StochasticKernel restrict_to_block(const StochasticKernel& kernel,
                                   const BlockPartition& partition,
                                   int block_index) {
  const auto& block = partition.block(block_index);
  const Eigen::Index s = static_cast<Eigen::Index>(block.size());
  Matrix sub(s, s);
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c)
      sub(r, c) = kernel.matrix()(block[static_cast<std::size_t>(r)],
                                  block[static_cast<std::size_t>(c)]);
  return StochasticKernel(std::move(sub));
}

namespace {

double stationary_residual(const Vector& pi, const Matrix& m) {
  return (m.transpose() * pi - pi).lpNorm<1>();
}

Distribution finish_stationary(Vector pi, const Matrix& m) {
  // The solver can leave eps-scale negatives; anything larger means the
  // stationary direction is not a distribution.
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi(i) < -1e-12)
      throw NonUniqueInvariantError(
          "block_invariant_distribution: stationary direction has negative mass");
    if (pi(i) < 0.0) pi(i) = 0.0;
  }
  pi /= pi.sum();
  if (stationary_residual(pi, m) > kStationaryResidualTolerance)
    throw NonUniqueInvariantError(
        "block_invariant_distribution: residual exceeds tolerance");
  return Distribution(std::move(pi));
}

}  // namespace

Distribution block_invariant_distribution(const StochasticKernel& block_kernel) {
  const Matrix& m = block_kernel.matrix();
  const Eigen::Index s = m.rows();

  if (s == 1) return Distribution(Vector::Ones(1));

  if (s == 2) {
    const double a = m(0, 1);
    const double b = m(1, 0);
    if (a + b <= 0.0)
      throw NonUniqueInvariantError(
          "block_invariant_distribution: 2x2 kernel is the identity");
    Vector pi(2);
    pi << b / (a + b), a / (a + b);
    return finish_stationary(std::move(pi), m);
  }

  if (s <= 64) {
    // Stationary linear system: (T^t - I) pi = 0 with the last row swapped
    // for the normalization sum(pi) = 1.
    Matrix system = m.transpose() - Matrix::Identity(s, s);
    system.row(s - 1).setOnes();
    Vector rhs = Vector::Zero(s);
    rhs(s - 1) = 1.0;
    Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible())
      throw NonUniqueInvariantError(
          "block_invariant_distribution: stationary direction is not unique");
    return finish_stationary(lu.solve(rhs), m);
  }

  // Power iteration on the lazy chain (T + I)/2, which shares the
  // stationary set but is aperiodic.
  Vector pi = Vector::Constant(s, 1.0 / static_cast<double>(s));
  constexpr double kTol = 1e-13;
  constexpr long kMaxIters = 1000000;
  for (long it = 0; it < kMaxIters; ++it) {
    Vector next = 0.5 * (m.transpose() * pi + pi);
    next /= next.sum();
    const double delta = (next - pi).lpNorm<1>();
    pi = std::move(next);
    if (delta <= kTol) return finish_stationary(std::move(pi), m);
  }
  throw NonUniqueInvariantError(
      "block_invariant_distribution: power iteration did not converge");
}

bool is_primitive(const StochasticKernel& block_kernel) {
  const Eigen::Index s = block_kernel.size();
  const long bound = static_cast<long>((s - 1) * (s - 1) + 1);
  const Matrix pattern =
      (block_kernel.matrix().array() > 0.0).cast<double>().matrix();
  Matrix power = pattern;
  for (long k = 1; k <= bound; ++k) {
    if ((power.array() > 0.0).all()) return true;
    power = (power * pattern).array().min(1.0).matrix();
  }
  return false;
}

}  // namespace repkl
