#include "repkl/run.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace repkl {

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: " + value);
  }
}

long to_long(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    throw std::invalid_argument("config key '" + key + "': not an integer: " + value);
  return n;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: " + value);
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

LogBase to_base(const std::string& key, const std::string& value) {
  if (value == "nats") return LogBase::nats;
  if (value == "bits") return LogBase::bits;
  throw std::invalid_argument("config key '" + key + "': expected nats or bits");
}

bool is_dna(Experiment e) {
  return e == Experiment::dna_timeseries || e == Experiment::dna_landscape;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Experiment e = cfg.experiment;
  if (key == "experiment") {
    if (value != experiment_name(e))
      throw std::invalid_argument("config is for experiment '" + value +
                                  "', not '" + experiment_name(e) + "'");
    return;
  }
  if (key == "out") { cfg.out = value; return; }
  if (key == "base") { cfg.base = to_base(key, value); return; }
  if (key == "seed") {
    const long seed = to_long(key, value);
    if (seed < 0) throw std::invalid_argument("config key 'seed': must be nonnegative");
    if (e == Experiment::image_replicate)
      cfg.image.seed = static_cast<std::uint64_t>(seed);
    else if (e == Experiment::verify)
      cfg.verify.seed = static_cast<std::uint64_t>(seed);
    // dna experiments are deterministic; the seed is accepted and unused
    return;
  }

  if (is_dna(e)) {
    if (key == "rate_at") { cfg.dna.extension.at = to_double(key, value); return; }
    if (key == "rate_ta") { cfg.dna.extension.ta = to_double(key, value); return; }
    if (key == "rate_cg") { cfg.dna.extension.cg = to_double(key, value); return; }
    if (key == "rate_gc") { cfg.dna.extension.gc = to_double(key, value); return; }
    if (key == "repair_at") { cfg.dna.repair.at = to_double(key, value); return; }
    if (key == "repair_ta") { cfg.dna.repair.ta = to_double(key, value); return; }
    if (key == "repair_cg") { cfg.dna.repair.cg = to_double(key, value); return; }
    if (key == "repair_gc") { cfg.dna.repair.gc = to_double(key, value); return; }
    if (key == "repair_mix") { cfg.dna.repair_mix = to_double(key, value); return; }
  }
  if (e == Experiment::dna_timeseries) {
    if (key == "steps") { cfg.steps = static_cast<int>(to_long(key, value)); return; }
    if (key == "temperature") { cfg.temperature_kelvin = to_double(key, value); return; }
    if (key == "p0") {
      const auto list = to_list(key, value);
      if (list.size() != 4)
        throw std::invalid_argument("config key 'p0': expected four entries");
      cfg.p0 = Eigen::Map<const Vector>(list.data(), 4);
      return;
    }
  }
  if (e == Experiment::dna_landscape) {
    if (key == "grid_size") { cfg.grid_size = static_cast<int>(to_long(key, value)); return; }
    if (key == "heatmap") { cfg.heatmap = to_bool(key, value); return; }
    if (key == "weights") {
      const auto list = to_list(key, value);
      if (list.size() != 2)
        throw std::invalid_argument("config key 'weights': expected two entries");
      cfg.weights << list[0], list[1];
      return;
    }
  }
  if (e == Experiment::image_replicate) {
    if (key == "width") { cfg.image.width = to_long(key, value); return; }
    if (key == "height") { cfg.image.height = to_long(key, value); return; }
    if (key == "sigma") { cfg.image.sigma = to_double(key, value); return; }
    if (key == "steps") { cfg.image.steps = static_cast<int>(to_long(key, value)); return; }
    if (key == "blocks_x") { cfg.image.blocks.blocks_x = static_cast<int>(to_long(key, value)); return; }
    if (key == "blocks_y") { cfg.image.blocks.blocks_y = static_cast<int>(to_long(key, value)); return; }
    if (key == "p_even") { cfg.image.p_even = to_double(key, value); return; }
    if (key == "p_odd") { cfg.image.p_odd = to_double(key, value); return; }
    if (key == "mode") {
      if (value == "ergodic") cfg.image.mode = BlurMode::ergodic;
      else if (value == "blockwise") cfg.image.mode = BlurMode::blockwise;
      else throw std::invalid_argument("config key 'mode': expected ergodic or blockwise");
      return;
    }
    if (key == "snapshots") {
      cfg.image.snapshot_steps.clear();
      for (double v : to_list(key, value))
        cfg.image.snapshot_steps.push_back(static_cast<int>(v));
      return;
    }
  }
  if (e == Experiment::verify) {
    if (key == "draws") { cfg.verify.draws = static_cast<int>(to_long(key, value)); return; }
  }
  throw std::invalid_argument("unknown config key '" + key + "' for experiment " +
                              experiment_name(e));
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::dna_timeseries: return "dna-timeseries";
    case Experiment::dna_landscape: return "dna-landscape";
    case Experiment::image_replicate: return "image-replicate";
    case Experiment::verify: return "verify";
  }
  return "?";
}

RunConfig make_run_config(Experiment experiment,
                          const std::optional<std::filesystem::path>& config_file,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  cfg.experiment = experiment;
  if (experiment == Experiment::dna_landscape) cfg.dna = preset_asymmetric_gc();
  if (config_file)
    for (const auto& [key, value] : parse_config_file(*config_file))
      apply_key(cfg, key, value);
  for (const auto& [key, value] : overrides) apply_key(cfg, key, value);
  return cfg;
}

TimeseriesResult run_dna_timeseries(const RunConfig& cfg) {
  const Distribution p0 = Distribution::normalized(cfg.p0);
  const LogBase base = cfg.base.value_or(LogBase::nats);
  TrajectoryRecord trace =
      simulate_timeseries(cfg.dna, p0, cfg.steps, base, cfg.temperature_kelvin);

  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path csv = cfg.out / "timeseries.csv";
  write_timeseries_csv(csv, trace);

  auto [pi1, pi2] = dna_invariants(cfg.dna);
  TimeseriesResult result{std::move(trace), std::move(pi1), std::move(pi2),
                          0.0, 0.0, csv};
  result.final_potential = result.trace.potential.back();
  result.cumulative = cumulative_production(result.trace);
  return result;
}

LandscapeResult run_dna_landscape(const RunConfig& cfg) {
  LandscapeGrid grid = potential_landscape(cfg.dna, cfg.weights, cfg.grid_size);
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path csv = cfg.out / "landscape.csv";
  write_landscape_csv(csv, grid);

  LandscapeResult result{std::move(grid), csv, std::nullopt};
  if (cfg.heatmap) {
    const std::filesystem::path pgm = cfg.out / "landscape.pgm";
    const double scale = write_pgm(pgm, result.grid.values);
    std::ofstream sidecar(cfg.out / "landscape_scale.txt");
    sidecar << pgm.filename().string() << " max=" << format_double(scale) << "\n";
    result.pgm = pgm;
  }
  return result;
}

ImageResult run_image_replicate(const RunConfig& cfg) {
  if (cfg.image.validate()) {
    const double min_edge = static_cast<double>(
        std::min(cfg.image.width / cfg.image.blocks.blocks_x,
                 cfg.image.height / cfg.image.blocks.blocks_y));
    std::cerr << "warning: sigma = " << cfg.image.sigma
              << " exceeds a quarter of the smallest tile edge (" << min_edge
              << " px); boundary effects may dominate\n";
  }
  const LogBase base = cfg.base.value_or(LogBase::bits);
  ImageSimulation sim = simulate_image(cfg.image, base);

  std::filesystem::create_directories(cfg.out);
  ImageResult result;
  result.csv = cfg.out / "trace.csv";
  write_image_csv(result.csv, sim.trace);

  result.scales_file = cfg.out / "snapshot_scales.txt";
  std::ofstream scales(result.scales_file);
  for (const auto& [step, state] : sim.snapshots) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(3) << std::setfill('0') << step << ".pgm";
    const std::filesystem::path pgm = cfg.out / name.str();
    const double scale = write_pgm(pgm, state.values());
    scales << name.str() << " max=" << format_double(scale) << "\n";
    result.snapshot_files.push_back(pgm);
  }
  result.trace = std::move(sim.trace);
  return result;
}

VerifyReport run_verify(const RunConfig& cfg) { return run_verification(cfg.verify); }

}  // namespace repkl
