#include "repkl/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "repkl/rng.hpp"

namespace repkl {

GridPMF::GridPMF(Eigen::ArrayXXd values) : values_(std::move(values)) {
  if (values_.size() == 0)
    throw std::invalid_argument("GridPMF: empty grid");
  detail::require_pmf(values_, "GridPMF");
}

GridPMF GridPMF::normalized(Eigen::ArrayXXd values) {
  const double total = detail::stable_sum(values);
  if (!(total > 0.0))
    throw std::invalid_argument("GridPMF::normalized: total mass is not positive");
  values /= total;
  return GridPMF(std::move(values));
}

void BlockGrid::validate_for(Eigen::Index width, Eigen::Index height) const {
  if (blocks_x <= 0 || blocks_y <= 0)
    throw std::invalid_argument("BlockGrid: block counts must be positive");
  if (width % blocks_x != 0 || height % blocks_y != 0) {
    std::ostringstream msg;
    msg << "BlockGrid: " << width << "x" << height
        << " image is not divisible into " << blocks_x << "x" << blocks_y
        << " tiles";
    throw std::invalid_argument(msg.str());
  }
}

bool ImageConfig::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("ImageConfig: dimensions must be positive");
  if (!(sigma > 0.0))
    throw std::invalid_argument("ImageConfig: sigma must be positive");
  if (steps < 0)
    throw std::invalid_argument("ImageConfig: steps must be nonnegative");
  if (!(p_even >= 0.0 && p_even <= 1.0) || !(p_odd >= 0.0 && p_odd <= 1.0))
    throw std::invalid_argument("ImageConfig: tile probabilities must lie in [0, 1]");
  blocks.validate_for(width, height);
  const double min_edge = static_cast<double>(
      std::min(width / blocks.blocks_x, height / blocks.blocks_y));
  return sigma > min_edge / 4.0;
}

Eigen::ArrayXd gaussian_kernel_1d(double sigma, double truncate) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("gaussian_kernel_1d: sigma must be positive");
  const Eigen::Index radius =
      static_cast<Eigen::Index>(std::ceil(truncate * sigma));
  Eigen::ArrayXd weights(2 * radius + 1);
  for (Eigen::Index u = -radius; u <= radius; ++u)
    weights(u + radius) =
        std::exp(-static_cast<double>(u * u) / (2.0 * sigma * sigma));
  weights /= weights.sum();
  return weights;
}

namespace {

// Half-sample symmetric index fold: ... d c b a | a b c d | d c b a ...
// Valid for any offset (the pattern has period 2n).
inline Eigen::Index fold_reflect(Eigen::Index j, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  j %= period;
  if (j < 0) j += period;
  return j < n ? j : period - 1 - j;
}

// Separable convolution with reflect boundaries, x pass then y pass.
Eigen::ArrayXXd convolve_reflect(const Eigen::ArrayXXd& in,
                                 const Eigen::ArrayXd& kernel) {
  const Eigen::Index h = in.rows(), w = in.cols();
  const Eigen::Index radius = (kernel.size() - 1) / 2;

  Eigen::ArrayXXd mid(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index u = -radius; u <= radius; ++u)
        acc += kernel(u + radius) * in(y, fold_reflect(x + u, w));
      mid(y, x) = acc;
    }
  }
  Eigen::ArrayXXd out(h, w);
  for (Eigen::Index x = 0; x < w; ++x) {
    for (Eigen::Index y = 0; y < h; ++y) {
      double acc = 0.0;
      for (Eigen::Index u = -radius; u <= radius; ++u)
        acc += kernel(u + radius) * mid(fold_reflect(y + u, h), x);
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

GridPMF blur_global(const GridPMF& p, double sigma, double* renorm_defect) {
  const Eigen::ArrayXd kernel = gaussian_kernel_1d(sigma);
  Eigen::ArrayXXd out = convolve_reflect(p.values(), kernel);
  const double total = detail::stable_sum(out);
  if (renorm_defect) *renorm_defect = std::abs(total - 1.0);
  out /= total;
  return GridPMF(std::move(out));
}

GridPMF blur_blockwise(const GridPMF& p, double sigma, const BlockGrid& blocks,
                       double* renorm_defect) {
  blocks.validate_for(p.width(), p.height());
  const Eigen::ArrayXd kernel = gaussian_kernel_1d(sigma);
  const Eigen::Index tile_w = p.width() / blocks.blocks_x;
  const Eigen::Index tile_h = p.height() / blocks.blocks_y;

  Eigen::ArrayXXd out(p.height(), p.width());
  double defect = 0.0;
  for (int iy = 0; iy < blocks.blocks_y; ++iy) {
    for (int ix = 0; ix < blocks.blocks_x; ++ix) {
      const Eigen::ArrayXXd tile =
          p.values().block(iy * tile_h, ix * tile_w, tile_h, tile_w);
      const double mass_in = detail::stable_sum(tile);
      Eigen::ArrayXXd blurred = convolve_reflect(tile, kernel);
      const double mass_out = detail::stable_sum(blurred);
      defect += std::abs(mass_out - mass_in);
      if (mass_out > 0.0) blurred *= mass_in / mass_out;
      out.block(iy * tile_h, ix * tile_w, tile_h, tile_w) = blurred;
    }
  }
  if (renorm_defect) *renorm_defect = defect;
  return GridPMF(std::move(out));
}

GridPMF init_checkerboard(const ImageConfig& config) {
  config.validate();
  const Eigen::Index tile_w = config.width / config.blocks.blocks_x;
  const Eigen::Index tile_h = config.height / config.blocks.blocks_y;
  Rng rng(config.seed);
  Eigen::ArrayXXd values(config.height, config.width);
  for (Eigen::Index y = 0; y < config.height; ++y) {
    for (Eigen::Index x = 0; x < config.width; ++x) {
      const Eigen::Index i = x / tile_w, j = y / tile_h;
      const double success = ((i + j) % 2 == 0) ? config.p_even : config.p_odd;
      values(y, x) = rng.uniform01() < success ? 1.0 : 0.0;
    }
  }
  return GridPMF::normalized(std::move(values));
}

Vector tile_masses(const GridPMF& p, const BlockGrid& blocks) {
  blocks.validate_for(p.width(), p.height());
  const Eigen::Index tile_w = p.width() / blocks.blocks_x;
  const Eigen::Index tile_h = p.height() / blocks.blocks_y;
  Vector masses(blocks.num_tiles());
  for (int iy = 0; iy < blocks.blocks_y; ++iy)
    for (int ix = 0; ix < blocks.blocks_x; ++ix)
      masses(iy * blocks.blocks_x + ix) = detail::stable_sum(
          p.values().block(iy * tile_h, ix * tile_w, tile_h, tile_w));
  return masses;
}

double image_potential(const GridPMF& p, BlurMode mode, const BlockGrid& blocks,
                       LogBase base) {
  if (mode == BlurMode::ergodic) {
    const double uniform = 1.0 / static_cast<double>(p.width() * p.height());
    return kl_divergence(
        p.values(),
        Eigen::ArrayXXd::Constant(p.height(), p.width(), uniform), base);
  }
  blocks.validate_for(p.width(), p.height());
  const Eigen::Index tile_w = p.width() / blocks.blocks_x;
  const Eigen::Index tile_h = p.height() / blocks.blocks_y;
  const double tile_uniform = 1.0 / static_cast<double>(tile_w * tile_h);
  double v = 0.0;
  for (int iy = 0; iy < blocks.blocks_y; ++iy) {
    for (int ix = 0; ix < blocks.blocks_x; ++ix) {
      const Eigen::ArrayXXd tile =
          p.values().block(iy * tile_h, ix * tile_w, tile_h, tile_w);
      const double mass = detail::stable_sum(tile);
      if (mass <= kZeroBlockMassFloor) continue;
      v += mass * kl_divergence(
                      tile / mass,
                      Eigen::ArrayXXd::Constant(tile_h, tile_w, tile_uniform),
                      base);
    }
  }
  return v;
}

ImageSimulation simulate_image(const ImageConfig& config, LogBase base) {
  config.validate();
  ImageSimulation sim;
  sim.trace.base = base;
  sim.trace.seed = config.seed;
  sim.trace.parameters = {
      {"width", std::to_string(config.width)},
      {"height", std::to_string(config.height)},
      {"sigma", std::to_string(config.sigma)},
      {"steps", std::to_string(config.steps)},
      {"blocks_x", std::to_string(config.blocks.blocks_x)},
      {"blocks_y", std::to_string(config.blocks.blocks_y)},
      {"p_even", std::to_string(config.p_even)},
      {"p_odd", std::to_string(config.p_odd)},
      {"mode", config.mode == BlurMode::blockwise ? "blockwise" : "ergodic"}};

  GridPMF p = init_checkerboard(config);
  for (int n = 0; n <= config.steps; ++n) {
    sim.trace.potential.push_back(image_potential(p, config.mode, config.blocks, base));
    sim.trace.block_masses.push_back(tile_masses(p, config.blocks));
    if (std::find(config.snapshot_steps.begin(), config.snapshot_steps.end(), n) !=
        config.snapshot_steps.end())
      sim.snapshots.emplace_back(n, p);
    if (n == config.steps) break;

    double defect = 0.0;
    GridPMF q = config.mode == BlurMode::blockwise
                    ? blur_blockwise(p, config.sigma, config.blocks, &defect)
                    : blur_global(p, config.sigma, &defect);
    sim.trace.entropy.push_back(shannon_entropy(q.values(), base));
    sim.trace.cross_entropy.push_back(cross_entropy(p.values(), q.values(), base));
    sim.trace.step_divergence.push_back(kl_divergence(p.values(), q.values(), base));
    sim.trace.mass_defect.push_back(defect);
    p = std::move(q);
  }
  // Derived columns, so the production bookkeeping is available here too.
  for (int n = 0; n < config.steps; ++n) {
    const double drop = sim.trace.potential[n] - sim.trace.potential[n + 1];
    sim.trace.potential_drop.push_back(drop);
    sim.trace.production.push_back(sim.trace.step_divergence[n] + drop);
  }
  return sim;
}

}  // namespace repkl
