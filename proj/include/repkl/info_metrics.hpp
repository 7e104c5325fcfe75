#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "repkl/errors.hpp"

namespace repkl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class LogBase { nats, bits };

/// Entries must be nonnegative and sum to one within this tolerance.
inline constexpr double kSimplexTolerance = 1e-12;

/// Clipping bound used by bernoulli_kl (landscape evaluation on [0,1]^2).
inline constexpr double kClipEpsilon = 1e-12;

namespace detail {

/// Compensated (Kahan) sum in ascending linear index order. Fixed order
/// keeps results reproducible; compensation keeps 10^5-term image sums
/// well inside the simplex tolerance.
template <typename Derived>
double stable_sum(const Eigen::DenseBase<Derived>& a) {
  const auto flat = a.reshaped();
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double y = static_cast<double>(flat(i)) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <typename Derived>
void require_pmf(const Eigen::DenseBase<Derived>& p, const char* who) {
  const auto flat = p.reshaped();
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    if (!(static_cast<double>(flat(i)) >= 0.0)) {
      std::ostringstream msg;
      msg << who << ": entry " << i << " is negative or NaN ("
          << static_cast<double>(flat(i)) << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  const double total = stable_sum(p);
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << who << ": entries sum to " << total << ", not 1 within "
        << kSimplexTolerance;
    throw std::invalid_argument(msg.str());
  }
}

inline double convert_from_nats(double nats, LogBase base) {
  return base == LogBase::bits ? nats / M_LN2 : nats;
}

}  // namespace detail

/// A probability distribution over a finite alphabet: nonnegative entries
/// summing to one within kSimplexTolerance. Validated on construction,
/// immutable afterwards.
class Distribution {
 public:
  explicit Distribution(Vector probs) : probs_(std::move(probs)) {
    detail::require_pmf(probs_, "Distribution");
  }

  static Distribution uniform(Eigen::Index n) {
    return Distribution(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  }

  /// Rescales a nonnegative mass vector to total one.
  static Distribution normalized(Vector mass) {
    const double total = detail::stable_sum(mass);
    if (!(total > 0.0))
      throw std::invalid_argument("Distribution::normalized: total mass is not positive");
    return Distribution(std::move(mass /= total));
  }

  const Vector& probs() const noexcept { return probs_; }
  Eigen::Index size() const noexcept { return probs_.size(); }
  double operator()(Eigen::Index i) const { return probs_(i); }

 private:
  Vector probs_;
};

/// H(p) = -sum p log p, with 0 log 0 = 0. Accepts any dense Eigen
/// expression holding a pmf (vector or 2D array); accumulation runs in
/// ascending linear index order.
template <typename Derived>
double shannon_entropy(const Eigen::DenseBase<Derived>& p,
                       LogBase base = LogBase::nats) {
  detail::require_pmf(p, "shannon_entropy");
  const auto flat = p.reshaped();
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double v = static_cast<double>(flat(i));
    if (v == 0.0) continue;
    const double y = -v * std::log(v) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return detail::convert_from_nats(sum, base);
}

/// H(p, q) = -sum p log q over the support of p. Throws
/// SupportMismatchError where p > 0 but q = 0.
template <typename DerivedP, typename DerivedQ>
double cross_entropy(const Eigen::DenseBase<DerivedP>& p,
                     const Eigen::DenseBase<DerivedQ>& q,
                     LogBase base = LogBase::nats) {
  if (p.size() != q.size())
    throw std::invalid_argument("cross_entropy: size mismatch");
  detail::require_pmf(p, "cross_entropy(p)");
  detail::require_pmf(q, "cross_entropy(q)");
  const auto pf = p.reshaped();
  const auto qf = q.reshaped();
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < pf.size(); ++i) {
    const double pv = static_cast<double>(pf(i));
    if (pv == 0.0) continue;
    const double qv = static_cast<double>(qf(i));
    if (qv <= 0.0) {
      std::ostringstream msg;
      msg << "cross_entropy: p(" << i << ") = " << pv << " but q(" << i << ") = 0";
      throw SupportMismatchError(msg.str());
    }
    const double y = -pv * std::log(qv) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return detail::convert_from_nats(sum, base);
}

/// D_KL(p || q) = sum p log(p/q), with 0 log(0/q) = 0. The +infinity case
/// (p > 0 where q = 0) surfaces as SupportMismatchError.
template <typename DerivedP, typename DerivedQ>
double kl_divergence(const Eigen::DenseBase<DerivedP>& p,
                     const Eigen::DenseBase<DerivedQ>& q,
                     LogBase base = LogBase::nats) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: size mismatch");
  detail::require_pmf(p, "kl_divergence(p)");
  detail::require_pmf(q, "kl_divergence(q)");
  const auto pf = p.reshaped();
  const auto qf = q.reshaped();
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < pf.size(); ++i) {
    const double pv = static_cast<double>(pf(i));
    if (pv == 0.0) continue;
    const double qv = static_cast<double>(qf(i));
    if (qv <= 0.0) {
      std::ostringstream msg;
      msg << "kl_divergence: p(" << i << ") = " << pv << " but q(" << i << ") = 0";
      throw SupportMismatchError(msg.str());
    }
    const double y = pv * std::log(pv / qv) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return detail::convert_from_nats(sum, base);
}

inline double shannon_entropy(const Distribution& p, LogBase base = LogBase::nats) {
  return shannon_entropy(p.probs(), base);
}
inline double cross_entropy(const Distribution& p, const Distribution& q,
                            LogBase base = LogBase::nats) {
  return cross_entropy(p.probs(), q.probs(), base);
}
inline double kl_divergence(const Distribution& p, const Distribution& q,
                            LogBase base = LogBase::nats) {
  return kl_divergence(p.probs(), q.probs(), base);
}

/// KL divergence between the two-point laws [p, 1-p] and [q, 1-q], in nats.
/// Both arguments are clipped into [kClipEpsilon, 1 - kClipEpsilon] so the
/// closed square [0,1]^2 is evaluable without log(0).
inline double bernoulli_kl(double p, double q) {
  const double lo = kClipEpsilon, hi = 1.0 - kClipEpsilon;
  p = std::min(std::max(p, lo), hi);
  q = std::min(std::max(q, lo), hi);
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

/// Binary entropy h_b(eps) in bits; h_b(0) = h_b(1) = 0, h_b(1/2) = 1.
inline double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  double h = 0.0;
  if (eps > 0.0) h -= eps * std::log2(eps);
  if (eps < 1.0) h -= (1.0 - eps) * std::log2(1.0 - eps);
  return h;
}

/// Mutual information (bits) of a binary channel: input weights w and a
/// 2x2 row-stochastic matrix P(y|x).
inline double channel_mutual_information(const Eigen::Vector2d& weights,
                                         const Eigen::Matrix2d& channel) {
  detail::require_pmf(weights, "channel_mutual_information(weights)");
  for (int r = 0; r < 2; ++r) {
    if (channel(r, 0) < 0.0 || channel(r, 1) < 0.0 ||
        std::abs(channel.row(r).sum() - 1.0) > kSimplexTolerance) {
      std::ostringstream msg;
      msg << "channel_mutual_information: row " << r << " is not stochastic";
      throw std::invalid_argument(msg.str());
    }
  }
  double mi = 0.0;
  for (int y = 0; y < 2; ++y) {
    const double marginal = weights(0) * channel(0, y) + weights(1) * channel(1, y);
    for (int x = 0; x < 2; ++x) {
      const double joint = weights(x) * channel(x, y);
      if (joint == 0.0) continue;
      mi += joint * std::log2(channel(x, y) / marginal);
    }
  }
  return mi;
}

}  // namespace repkl
