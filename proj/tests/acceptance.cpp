// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Optional argv[1] is the CLI binary, used for the end-to-end negative
// control; without it that criterion falls back to the in-process check.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "repkl/rng.hpp"
#include "repkl/run.hpp"

using namespace repkl;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;
fs::path g_workdir;

struct Criterion {
  std::string name;
  double time_limit_seconds;
  std::function<void(std::ostringstream&)> body;  // writes failures
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<missing:" + p.string() + ">";
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void expect(std::ostringstream& fail, bool ok, const std::string& what) {
  if (!ok) fail << "  ! " << what << "\n";
}

Distribution canonical_p0() {
  return Distribution((Vector(4) << 0.6, 0.1, 0.2, 0.1).finished());
}

RunConfig preset_config(Experiment e, const std::string& subdir) {
  return make_run_config(e, std::nullopt, {{"out", (g_workdir / subdir).string()}});
}

void criterion_effective_rates(std::ostringstream& fail) {
  const SubstitutionRates e = preset_symmetric_gc().effective();
  expect(fail, std::abs(e.at - 0.0155) <= 1e-17, "effective at != 0.0155");
  expect(fail, std::abs(e.ta - 0.0079) <= 1e-17, "effective ta != 0.0079");
  expect(fail, std::abs(e.cg - 0.0117) <= 1e-17, "effective cg != 0.0117");
  expect(fail, std::abs(e.gc - 0.0117) <= 1e-17, "effective gc != 0.0117");
}

void criterion_invariants(std::ostringstream& fail) {
  const auto [pi1, pi2] = dna_invariants(preset_symmetric_gc());
  expect(fail, std::abs(pi1(0) - 0.3376) < 5e-5, "pi1(A) not within 5e-5 of 0.3376");
  expect(fail, std::abs(pi1(1) - 0.6624) < 5e-5, "pi1(T) not within 5e-5 of 0.6624");
  expect(fail, std::abs(pi2(0) - 0.5) < 1e-12, "pi2(C) not within 1e-12 of 0.5");
  expect(fail, std::abs(pi2(1) - 0.5) < 1e-12, "pi2(G) not within 1e-12 of 0.5");
  const auto [g1, g2] = dna_invariants(preset_asymmetric_gc());
  (void)g1;
  expect(fail, std::abs(g2(0) - 0.60) < 1e-12, "asymmetric pi2(C) != 0.60");
  expect(fail, std::abs(g2(1) - 0.40) < 1e-12, "asymmetric pi2(G) != 0.40");
}

void criterion_theorem1(std::ostringstream& fail) {
  const TrajectoryRecord fig = simulate_timeseries(preset_symmetric_gc(), canonical_p0(), 50);
  for (std::size_t n = 0; n + 1 < fig.potential.size(); ++n)
    expect(fail, fig.potential[n + 1] <= fig.potential[n] + 1e-10,
           "V increased at step " + std::to_string(n));
  const TrajectoryRecord extended =
      simulate_timeseries(preset_symmetric_gc(), canonical_p0(), 2000);
  expect(fail, extended.potential.back() < 1e-8,
         "V(p_2000) = " + format_double(extended.potential.back()) + " >= 1e-8");
}

void criterion_theorem2(std::ostringstream& fail) {
  const TrajectoryRecord trace =
      simulate_timeseries(preset_symmetric_gc(), canonical_p0(), 50);
  double production_sum = 0.0, divergence_sum = 0.0;
  for (std::size_t n = 0; n < trace.steps(); ++n) {
    expect(fail, trace.production[n] >= -1e-10,
           "S_" + std::to_string(n) + " below -1e-10");
    production_sum += trace.production[n];
    divergence_sum += trace.step_divergence[n];
  }
  const double telescoped =
      divergence_sum + trace.potential.front() - trace.potential.back();
  expect(fail, std::abs(production_sum - telescoped) <= 1e-10,
         "cumulative identity violated by " +
             format_double(std::abs(production_sum - telescoped)));
}

void criterion_lemma2(std::ostringstream& fail) {
  Rng rng(1009);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vector w(2);
    w << 0.05 + rng.uniform01(), 0.05 + rng.uniform01();
    w /= w.sum();
    Vector a(2), b(2), pv(4);
    a << 0.05 + rng.uniform01(), 0.05 + rng.uniform01();
    b << 0.05 + rng.uniform01(), 0.05 + rng.uniform01();
    for (int i = 0; i < 4; ++i) pv(i) = rng.uniform01();
    const SteadySpec mixture(dna_partition(), w,
                             {Distribution::normalized(a), Distribution::normalized(b)});
    const Distribution p = Distribution::normalized(pv);
    const BlockKlDecomposition d = kl_block_decomposition(p, mixture);
    worst = std::max(worst,
                     std::abs(d.total - kl_divergence(p, mixture.assembled())));
  }
  expect(fail, worst <= 1e-10,
         "worst decomposition mismatch " + format_double(worst));
}

void criterion_dpi(std::ostringstream& fail) {
  Rng rng(2027);
  double worst = -1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix m(2, 2);
    const double a = rng.uniform(0.01, 0.99), b = rng.uniform(0.01, 0.99);
    m << 1.0 - a, a, b, 1.0 - b;
    const StochasticKernel t(m);
    if (!is_primitive(t)) continue;
    const Distribution pi = block_invariant_distribution(t);
    Vector rv(2);
    rv << rng.uniform01(), rng.uniform01();
    const Distribution r = Distribution::normalized(rv);
    worst = std::max(worst, kl_divergence(apply_kernel(r, t), pi) -
                                kl_divergence(r, pi));
  }
  expect(fail, worst <= 1e-12, "worst contraction excess " + format_double(worst));
}

void criterion_landscape(std::ostringstream& fail) {
  const LandscapeGrid grid =
      potential_landscape(preset_asymmetric_gc(), {0.5, 0.5}, 101);
  expect(fail, std::abs(grid.min_x - 0.338) < 5e-4, "x* not within 5e-4 of 0.338");
  expect(fail, std::abs(grid.min_y - 0.600) < 5e-4, "y* not within 5e-4 of 0.600");
  const auto [cx, cy] = landscape_curvature(grid);
  expect(fail, std::abs(cx - 1.12) / 1.12 < 0.02,
         "x curvature " + format_double(cx) + " not within 2% of 1.12");
  expect(fail, std::abs(cy - 1.04) / 1.04 < 0.02,
         "y curvature " + format_double(cy) + " not within 2% of 1.04");
}

void criterion_coarse_channel(std::ostringstream& fail) {
  for (double eps : {0.0, 0.1, 0.5}) {
    const CoarseChannel channel{eps, eps, {0.5, 0.5}};
    const double mi = coarse_mutual_information(channel);
    expect(fail, std::abs(mi - (1.0 - binary_entropy(eps))) < 1e-12,
           "I != 1 - h_b at eps = " + format_double(eps));
  }
}

void criterion_image(std::ostringstream& fail) {
  ImageConfig cfg;  // canonical 256x256, sigma 1.5, 4x4 tiles, 50 steps
  const ImageSimulation blockwise = simulate_image(cfg);
  const Vector& w0 = blockwise.trace.block_masses.front();
  for (const Vector& w : blockwise.trace.block_masses)
    expect(fail, (w - w0).cwiseAbs().maxCoeff() < 1e-12,
           "tile masses drifted beyond 1e-12");
  for (std::size_t n = 0; n + 1 < blockwise.trace.potential.size(); ++n)
    expect(fail,
           blockwise.trace.potential[n + 1] <= blockwise.trace.potential[n] + 1e-10,
           "blockwise V increased at step " + std::to_string(n));
  // H(p_n) nondecreasing: H(p_0) then the recorded H(q_n) = H(p_{n+1}).
  double previous = shannon_entropy(blockwise.snapshots.front().second.values(),
                                    LogBase::bits);
  for (std::size_t n = 0; n < blockwise.trace.steps(); ++n) {
    expect(fail, blockwise.trace.entropy[n] >= previous - 1e-10,
           "H decreased at step " + std::to_string(n));
    previous = blockwise.trace.entropy[n];
  }

  cfg.mode = BlurMode::ergodic;
  const ImageSimulation ergodic = simulate_image(cfg);
  for (std::size_t n = 0; n + 1 < ergodic.trace.potential.size(); ++n)
    expect(fail,
           ergodic.trace.potential[n + 1] <= ergodic.trace.potential[n] + 1e-10,
           "ergodic V increased at step " + std::to_string(n));
}

void criterion_determinism(std::ostringstream& fail) {
  const auto compare_dir = [&](const fs::path& a, const fs::path& b) {
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(a))
      names.push_back(entry.path().filename());
    expect(fail, !names.empty(), "no outputs under " + a.string());
    for (const auto& name : names)
      expect(fail, slurp(a / name) == slurp(b / name),
             "outputs differ between runs: " + name.string());
  };

  for (const char* tag : {"d1", "d2"})
    run_dna_timeseries(preset_config(Experiment::dna_timeseries,
                                     std::string("ts_") + tag));
  compare_dir(g_workdir / "ts_d1", g_workdir / "ts_d2");

  for (const char* tag : {"d1", "d2"}) {
    RunConfig cfg = make_run_config(
        Experiment::dna_landscape, std::nullopt,
        {{"out", (g_workdir / (std::string("ls_") + tag)).string()},
         {"heatmap", "true"}});
    run_dna_landscape(cfg);
  }
  compare_dir(g_workdir / "ls_d1", g_workdir / "ls_d2");

  for (const char* tag : {"d1", "d2"})
    run_image_replicate(preset_config(Experiment::image_replicate,
                                      std::string("im_") + tag));
  compare_dir(g_workdir / "im_d1", g_workdir / "im_d2");
}

void criterion_negative_control(std::ostringstream& fail) {
  VerifyOptions options;
  options.draws = 200;
  options.inject_leak = 1e-3;
  const VerifyReport report = run_verification(options);
  expect(fail, !report.all_passed(), "verification passed despite the leak");
  bool lemma1_failed = false;
  for (const auto& check : report.checks)
    if (check.name == "lemma1_block_mass_conservation" && !check.passed)
      lemma1_failed = true;
  expect(fail, lemma1_failed, "Lemma 1 mass-conservation check did not fail");

  if (!g_cli_path.empty()) {
    const std::string cmd = "'" + g_cli_path +
                            "' verify --set draws=200 --inject-leak 1e-3 > " +
                            (g_workdir / "verify_leak.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    expect(fail, status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 1,
           "CLI verify with injected leak did not exit with status 1");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];
  g_workdir = fs::temp_directory_path() /
              ("repkl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(g_workdir);

  const std::vector<Criterion> criteria{
      {"1 effective rates (machine precision)", 1e-3, criterion_effective_rates},
      {"2 block invariants", 1e-3, criterion_invariants},
      {"3 potential monotone + convergent", 0.1, criterion_theorem1},
      {"4 step production >= 0 + cumulative identity", 0.1, criterion_theorem2},
      {"5 blockwise KL decomposition (1000 draws)", 1.0, criterion_lemma2},
      {"6 KL contraction (1000 kernels)", 1.0, criterion_dpi},
      {"7 landscape minimum + curvature", 0.1, criterion_landscape},
      {"8 coarse channel symmetric identity", 1e-3, criterion_coarse_channel},
      {"9 image run properties (both modes)", 30.0, criterion_image},
      {"10 byte-identical preset reruns", 120.0, criterion_determinism},
      {"11 negative control (injected leak)", 60.0, criterion_negative_control},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::ostringstream fail;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(fail);
    } catch (const std::exception& e) {
      fail << "  ! exception: " << e.what() << "\n";
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > criterion.time_limit_seconds)
      fail << "  ! runtime " << elapsed << " s exceeds "
           << criterion.time_limit_seconds << " s\n";
    const bool ok = fail.str().empty();
    failures += ok ? 0 : 1;
    std::printf("[%s] criterion %-48s (%8.3f ms)\n", ok ? "PASS" : "FAIL",
                criterion.name.c_str(), elapsed * 1e3);
    if (!ok) std::cout << fail.str();
  }
  fs::remove_all(g_workdir);
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
