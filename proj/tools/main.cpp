#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "repkl/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalidInput = 2;

struct CommonArgs {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> sets;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::optional<std::string> base;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "configuration file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", args.sets, "override a config key, e.g. --set steps=10")
      ->take_all();
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "random seed override");
  cmd->add_option("--base", args.base, "log base for recorded metrics")
      ->check(CLI::IsMember({"nats", "bits"}));
}

std::vector<std::pair<std::string, std::string>> collect_overrides(
    const CommonArgs& args) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& entry : args.sets) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + entry);
    overrides.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  // Dedicated flags win over --set and over the file.
  if (args.out) overrides.emplace_back("out", *args.out);
  if (args.seed) overrides.emplace_back("seed", std::to_string(*args.seed));
  if (args.base) overrides.emplace_back("base", *args.base);
  return overrides;
}

repkl::RunConfig build_config(repkl::Experiment experiment, const CommonArgs& args) {
  return repkl::make_run_config(experiment, args.config, collect_overrides(args));
}

std::string fmt(double v) { return repkl::format_double(v); }

int do_dna_timeseries(const CommonArgs& args) {
  const auto cfg = build_config(repkl::Experiment::dna_timeseries, args);
  const auto result = repkl::run_dna_timeseries(cfg);
  std::cout << "pi1* = (" << fmt(result.pi1(0)) << ", " << fmt(result.pi1(1)) << ")\n"
            << "pi2* = (" << fmt(result.pi2(0)) << ", " << fmt(result.pi2(1)) << ")\n"
            << "final V = " << fmt(result.final_potential) << '\n'
            << "cumulative S = " << fmt(result.cumulative) << '\n';
  if (cfg.temperature_kelvin)
    std::cout << "cumulative production = "
              << fmt(repkl::to_physical_units(result.cumulative, *cfg.temperature_kelvin))
              << " J at " << fmt(*cfg.temperature_kelvin) << " K\n";
  std::cout << "wrote " << result.csv.string() << '\n';
  return kExitOk;
}

int do_dna_landscape(const CommonArgs& args) {
  const auto cfg = build_config(repkl::Experiment::dna_landscape, args);
  const auto result = repkl::run_dna_landscape(cfg);
  std::cout << "minimum (x*, y*) = (" << fmt(result.grid.min_x) << ", "
            << fmt(result.grid.min_y) << ")\n"
            << "wrote " << result.csv.string() << '\n';
  if (result.pgm) std::cout << "wrote " << result.pgm->string() << '\n';
  return kExitOk;
}

int do_image_replicate(const CommonArgs& args) {
  const auto cfg = build_config(repkl::Experiment::image_replicate, args);
  const auto result = repkl::run_image_replicate(cfg);
  std::cout << "final V = " << fmt(result.trace.potential.back()) << '\n'
            << "wrote " << result.csv.string() << " and "
            << result.snapshot_files.size() << " snapshots\n";
  return kExitOk;
}

int do_verify(const CommonArgs& args, double inject_leak) {
  auto cfg = build_config(repkl::Experiment::verify, args);
  cfg.verify.inject_leak = inject_leak;
  const auto report = repkl::run_verify(cfg);
  for (const auto& check : report.checks)
    std::printf("%-34s max violation %-12.3e tol %-9.0e %s\n", check.name.c_str(),
                check.max_violation, check.tolerance,
                check.passed ? "PASS" : "FAIL");
  std::cout << (report.all_passed() ? "all checks passed\n" : "verification FAILED\n");
  return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-invariant replication dynamics and their KL potential"};
  app.require_subcommand(1);

  CommonArgs ts_args, ls_args, im_args, vf_args;
  double inject_leak = 0.0;

  auto* ts = app.add_subcommand("dna-timeseries",
                                "four-state substitution time series");
  add_common(ts, ts_args);
  auto* ls = app.add_subcommand("dna-landscape", "potential surface over [0,1]^2");
  add_common(ls, ls_args);
  auto* im = app.add_subcommand("image-replicate",
                                "iterated Gaussian copying of an image pmf");
  add_common(im, im_args);
  auto* vf = app.add_subcommand("verify", "run the invariant suite");
  add_common(vf, vf_args);
  vf->add_option("--inject-leak", inject_leak,
                 "test hook: cross-block leak for the negative control")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (ts->parsed()) return do_dna_timeseries(ts_args);
    if (ls->parsed()) return do_dna_landscape(ls_args);
    if (im->parsed()) return do_image_replicate(im_args);
    if (vf->parsed()) return do_verify(vf_args, inject_leak);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
