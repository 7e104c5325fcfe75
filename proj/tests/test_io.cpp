#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "repkl/io.hpp"
#include "repkl/run.hpp"

using namespace repkl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("repkl_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("format_double round-trips 64-bit values") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.0221408e23, -0.0, 0.6999999999999999}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(std::isinf(parse_double("inf")));
  CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
}

TEST_CASE("timeseries CSV writes, reads back, and re-verifies") {
  TempDir tmp;
  const Distribution p0((Vector(4) << 0.6, 0.1, 0.2, 0.1).finished());
  const TrajectoryRecord trace = simulate_timeseries(preset_symmetric_gc(), p0, 12);
  const fs::path csv = tmp.path / "trace.csv";
  write_timeseries_csv(csv, trace);

  const TrajectoryRecord back = read_timeseries_csv(csv);
  REQUIRE(back.potential.size() == trace.potential.size());
  REQUIRE(back.steps() == trace.steps());
  for (std::size_t n = 0; n < trace.potential.size(); ++n)
    CHECK(back.potential[n] == trace.potential[n]);  // lossless at 17 digits
  for (std::size_t n = 0; n < trace.steps(); ++n) {
    CHECK(back.production[n] == trace.production[n]);
    CHECK(back.block_masses[n](0) == trace.block_masses[n](0));
  }
  // Recompute the cumulative production from the parsed file.
  CHECK(std::abs(cumulative_production(back) - cumulative_production(trace)) < 1e-10);

  SUBCASE("zero-step trace has a single row") {
    const TrajectoryRecord flat = simulate_timeseries(preset_symmetric_gc(), p0, 0);
    const fs::path single = tmp.path / "single.csv";
    write_timeseries_csv(single, flat);
    std::ifstream in(single);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2);  // header + one V row
    CHECK(read_timeseries_csv(single).steps() == 0);
  }
}

TEST_CASE("image CSV round-trip") {
  TempDir tmp;
  ImageConfig cfg;
  cfg.width = cfg.height = 32;
  cfg.blocks = {2, 2};
  cfg.steps = 5;
  cfg.snapshot_steps = {0};
  const ImageSimulation sim = simulate_image(cfg);
  const fs::path csv = tmp.path / "image.csv";
  write_image_csv(csv, sim.trace);
  const TrajectoryRecord back = read_image_csv(csv);
  REQUIRE(back.steps() == sim.trace.steps());
  for (std::size_t n = 0; n < back.potential.size(); ++n)
    CHECK(back.potential[n] == sim.trace.potential[n]);
  CHECK(std::abs(cumulative_production(back) -
                 cumulative_production(sim.trace)) < 1e-10);
}

TEST_CASE("landscape CSV") {
  TempDir tmp;
  const LandscapeGrid grid =
      potential_landscape(preset_asymmetric_gc(), {0.5, 0.5}, 2);
  const fs::path csv = tmp.path / "landscape.csv";
  write_landscape_csv(csv, grid);
  std::ifstream in(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);  // header + 4 corners
  CHECK(rows[0] == "x,y,V");
  CHECK(rows[1].rfind("0,0,", 0) == 0);
  CHECK(rows[4].rfind("1,1,", 0) == 0);
}

TEST_CASE("PGM writer") {
  TempDir tmp;
  Eigen::ArrayXXd values(2, 3);
  values << 0.0, 0.1, 0.2, 0.3, 0.4, 0.5;
  const fs::path pgm = tmp.path / "test.pgm";
  const double scale = write_pgm(pgm, values);
  CHECK(scale == 0.5);
  const std::string bytes = slurp(pgm);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(bytes[header.size()]) == 0);      // 0.0
  CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 102);  // 0.2/0.5
  CHECK(static_cast<unsigned char>(bytes[header.size() + 5]) == 255);  // max
}

TEST_CASE("config file parsing") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "test.cfg";
  {
    std::ofstream out(cfg);
    out << "# comment\n"
        << "experiment = dna-timeseries\n"
        << "steps = 10   # trailing comment\n"
        << "p0 = 0.6, 0.1, 0.2, 0.1\n";
  }
  const auto entries = parse_config_file(cfg);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<std::string, std::string>{"experiment", "dna-timeseries"});
  CHECK(entries[1].second == "10");

  SUBCASE("duplicate keys are rejected") {
    std::ofstream out(cfg, std::ios::app);
    out << "steps = 20\n";
    out.close();
    CHECK_THROWS_AS(parse_config_file(cfg), std::invalid_argument);
  }
}

TEST_CASE("make_run_config") {
  SUBCASE("defaults match the canonical settings") {
    const RunConfig cfg = make_run_config(Experiment::dna_timeseries, std::nullopt, {});
    CHECK(cfg.steps == 50);
    CHECK(cfg.dna.extension.at == 0.020);
    CHECK(cfg.p0(0) == 0.6);
    const RunConfig img = make_run_config(Experiment::image_replicate, std::nullopt, {});
    CHECK(img.image.width == 256);
    CHECK(img.image.sigma == 1.5);
    CHECK(img.image.seed == 7);
    const RunConfig land = make_run_config(Experiment::dna_landscape, std::nullopt, {});
    CHECK(land.grid_size == 101);
    CHECK(land.dna.extension.cg == 0.014);  // asymmetric GC preset
  }
  SUBCASE("overrides win over the file") {
    TempDir tmp;
    const fs::path file = tmp.path / "cfg";
    std::ofstream(file) << "experiment = dna-timeseries\nsteps = 10\n";
    const RunConfig cfg = make_run_config(Experiment::dna_timeseries, file,
                                          {{"steps", "25"}});
    CHECK(cfg.steps == 25);
  }
  SUBCASE("unknown keys are rejected with the key name") {
    CHECK_THROWS_WITH_AS(
        make_run_config(Experiment::dna_timeseries, std::nullopt, {{"bogus", "1"}}),
        doctest::Contains("bogus"), std::invalid_argument);
  }
  SUBCASE("experiment mismatch is rejected") {
    TempDir tmp;
    const fs::path file = tmp.path / "cfg";
    std::ofstream(file) << "experiment = image-replicate\n";
    CHECK_THROWS_AS(make_run_config(Experiment::dna_timeseries, file, {}),
                    std::invalid_argument);
  }
  SUBCASE("seed routes to the experiment that owns it") {
    const RunConfig img = make_run_config(Experiment::image_replicate, std::nullopt,
                                          {{"seed", "99"}});
    CHECK(img.image.seed == 99);
    const RunConfig ver = make_run_config(Experiment::verify, std::nullopt,
                                          {{"seed", "99"}});
    CHECK(ver.verify.seed == 99);
  }
}

TEST_CASE("runners write the documented files") {
  TempDir tmp;

  SUBCASE("dna-timeseries") {
    RunConfig cfg = make_run_config(Experiment::dna_timeseries, std::nullopt,
                                    {{"out", (tmp.path / "ts").string()}});
    const TimeseriesResult result = run_dna_timeseries(cfg);
    CHECK(fs::exists(result.csv));
    CHECK(std::abs(result.pi1(0) - 0.3376) < 5e-5);
    CHECK(result.cumulative > 0.0);
  }
  SUBCASE("dna-landscape with heatmap") {
    RunConfig cfg = make_run_config(
        Experiment::dna_landscape, std::nullopt,
        {{"out", (tmp.path / "ls").string()}, {"heatmap", "true"}, {"grid_size", "21"}});
    const LandscapeResult result = run_dna_landscape(cfg);
    CHECK(fs::exists(result.csv));
    REQUIRE(result.pgm.has_value());
    CHECK(fs::exists(*result.pgm));
    CHECK(fs::exists(tmp.path / "ls" / "landscape_scale.txt"));
  }
  SUBCASE("image-replicate") {
    RunConfig cfg = make_run_config(
        Experiment::image_replicate, std::nullopt,
        {{"out", (tmp.path / "im").string()},
         {"width", "32"}, {"height", "32"},
         {"blocks_x", "2"}, {"blocks_y", "2"},
         {"steps", "4"}, {"snapshots", "0,4"}});
    const ImageResult result = run_image_replicate(cfg);
    CHECK(fs::exists(result.csv));
    REQUIRE(result.snapshot_files.size() == 2);
    CHECK(result.snapshot_files[0].filename() == "snapshot_000.pgm");
    CHECK(result.snapshot_files[1].filename() == "snapshot_004.pgm");
    CHECK(fs::exists(result.scales_file));
  }
  SUBCASE("byte-identical reruns") {
    for (const char* sub : {"a", "b"}) {
      RunConfig cfg = make_run_config(Experiment::dna_timeseries, std::nullopt,
                                      {{"out", (tmp.path / sub).string()},
                                       {"steps", "10"}});
      run_dna_timeseries(cfg);
    }
    CHECK(slurp(tmp.path / "a" / "timeseries.csv") ==
          slurp(tmp.path / "b" / "timeseries.csv"));
  }
}
