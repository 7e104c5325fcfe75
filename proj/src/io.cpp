#include "repkl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace repkl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out)
    throw Error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open for reading: " + path.string());
  return in;
}

void expect_header(const std::string& got, const std::string& want,
                   const std::filesystem::path& path) {
  if (trim(got) != want)
    throw Error("unexpected CSV header in " + path.string() + ": " + got);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

void write_timeseries_csv(const std::filesystem::path& path,
                          const TrajectoryRecord& trace) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  out << "n,H_q,H_cross,D_kl,V,dV,S_n,w1,w2\n";
  const std::size_t steps = trace.steps();
  for (std::size_t n = 0; n <= steps; ++n) {
    out << n << ',';
    if (n < steps)
      out << format_double(trace.entropy[n]) << ','
          << format_double(trace.cross_entropy[n]) << ','
          << format_double(trace.step_divergence[n]) << ',';
    else
      out << ",,,";
    out << format_double(trace.potential[n]) << ',';
    if (n < steps)
      out << format_double(trace.potential_drop[n]) << ','
          << format_double(trace.production[n]) << ',';
    else
      out << ",,";
    out << format_double(trace.block_masses[n](0)) << ','
        << format_double(trace.block_masses[n](1)) << '\n';
  }
}

TrajectoryRecord read_timeseries_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path.string());
  expect_header(line, "n,H_q,H_cross,D_kl,V,dV,S_n,w1,w2", path);
  TrajectoryRecord trace;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 9)
      throw Error("malformed CSV row in " + path.string() + ": " + line);
    trace.potential.push_back(parse_double(cells[4]));
    Vector w(2);
    w << parse_double(cells[7]), parse_double(cells[8]);
    trace.block_masses.push_back(std::move(w));
    if (!trim(cells[1]).empty()) {
      trace.entropy.push_back(parse_double(cells[1]));
      trace.cross_entropy.push_back(parse_double(cells[2]));
      trace.step_divergence.push_back(parse_double(cells[3]));
      trace.potential_drop.push_back(parse_double(cells[5]));
      trace.production.push_back(parse_double(cells[6]));
    }
  }
  if (trace.potential.size() != trace.steps() + 1)
    throw Error("inconsistent row counts in " + path.string());
  return trace;
}

void write_image_csv(const std::filesystem::path& path,
                     const TrajectoryRecord& trace) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  out << "n,H_q,H_cross,D_kl,V,mass_defect\n";
  const std::size_t steps = trace.steps();
  for (std::size_t n = 0; n <= steps; ++n) {
    out << n << ',';
    if (n < steps)
      out << format_double(trace.entropy[n]) << ','
          << format_double(trace.cross_entropy[n]) << ','
          << format_double(trace.step_divergence[n]) << ',';
    else
      out << ",,,";
    out << format_double(trace.potential[n]) << ',';
    if (n < steps) out << format_double(trace.mass_defect[n]);
    out << '\n';
  }
}

TrajectoryRecord read_image_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV: " + path.string());
  expect_header(line, "n,H_q,H_cross,D_kl,V,mass_defect", path);
  TrajectoryRecord trace;
  trace.base = LogBase::bits;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 6)
      throw Error("malformed CSV row in " + path.string() + ": " + line);
    trace.potential.push_back(parse_double(cells[4]));
    if (!trim(cells[1]).empty()) {
      trace.entropy.push_back(parse_double(cells[1]));
      trace.cross_entropy.push_back(parse_double(cells[2]));
      trace.step_divergence.push_back(parse_double(cells[3]));
      trace.mass_defect.push_back(parse_double(cells[5]));
    }
  }
  if (trace.potential.size() != trace.steps() + 1)
    throw Error("inconsistent row counts in " + path.string());
  for (std::size_t n = 0; n < trace.steps(); ++n) {
    const double drop = trace.potential[n] - trace.potential[n + 1];
    trace.potential_drop.push_back(drop);
    trace.production.push_back(trace.step_divergence[n] + drop);
  }
  return trace;
}

void write_landscape_csv(const std::filesystem::path& path,
                         const LandscapeGrid& grid) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  out << "x,y,V\n";
  const int g = grid.grid_size();
  const double pitch = grid.pitch();
  for (int iy = 0; iy < g; ++iy)
    for (int ix = 0; ix < g; ++ix)
      out << format_double(ix * pitch) << ',' << format_double(iy * pitch)
          << ',' << format_double(grid.values(iy, ix)) << '\n';
}

double write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& values) {
  const double scale = values.maxCoeff();
  auto out = open_out(path, std::ios::out | std::ios::trunc | std::ios::binary);
  out << "P5\n" << values.cols() << ' ' << values.rows() << "\n255\n";
  std::string row(static_cast<std::size_t>(values.cols()), '\0');
  for (Eigen::Index y = 0; y < values.rows(); ++y) {
    for (Eigen::Index x = 0; x < values.cols(); ++x) {
      const double v = scale > 0.0 ? values(y, x) / scale : 0.0;
      row[static_cast<std::size_t>(x)] =
          static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  return scale;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected 'key = value'";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": empty key";
      throw std::invalid_argument(msg.str());
    }
    for (const auto& [seen, _] : entries) {
      if (seen == key) {
        std::ostringstream msg;
        msg << path.string() << ":" << lineno << ": duplicate key '" << key << "'";
        throw std::invalid_argument(msg.str());
      }
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

}  // namespace repkl
