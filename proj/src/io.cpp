#include "nlfkpp/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace nlfkpp::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  return os;
}

void check_written(const std::ofstream& os, const std::filesystem::path& path) {
  if (!os) throw Error("write to " + path.string() + " failed: " + std::strerror(errno));
}

std::size_t closest_snapshot(const std::vector<Field>& snapshots, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < snapshots.size(); ++i)
    if (std::abs(snapshots[i].time() - t) < std::abs(snapshots[best].time() - t)) best = i;
  return best;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_snapshots_ndjson(std::ostream& os, const std::vector<Field>& snapshots) {
  for (const Field& f : snapshots) {
    os << "{\"t\":" << format_double(f.time()) << ",\"values\":[";
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) os << ',';
      os << format_double(f[i]);
    }
    os << "]}\n";
  }
}

void write_snapshots_ndjson(const std::filesystem::path& path, const std::vector<Field>& snapshots) {
  std::ofstream os = open_out(path);
  write_snapshots_ndjson(os, snapshots);
  check_written(os, path);
}

std::vector<Field> read_snapshots_ndjson(const std::filesystem::path& path, const Grid1D& grid) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::vector<Field> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(grid, j.at("values").get<std::vector<double>>(), j.at("t").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<HistoryPoint>& history) {
  std::ofstream os = open_out(path);
  os << "t,sup_u,inf_u,dt\n";
  for (const auto& h : history)
    os << format_double(h.t) << ',' << format_double(h.sup_u) << ',' << format_double(h.inf_u) << ','
       << format_double(h.dt) << '\n';
  check_written(os, path);
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<Field>& snapshots,
                       const std::vector<double>& display_times) {
  if (snapshots.empty()) throw Error("no snapshots to write");
  std::vector<std::size_t> picks;
  for (double t : display_times) picks.push_back(closest_snapshot(snapshots, t));
  std::ofstream os = open_out(path);
  os << 'x';
  for (std::size_t p : picks) os << ",u_t=" << format_double(snapshots[p].time());
  os << '\n';
  const Grid1D& grid = snapshots.front().grid();
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    os << format_double(grid.x(i));
    for (std::size_t p : picks) os << ',' << format_double(snapshots[p][i]);
    os << '\n';
  }
  check_written(os, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
  check_written(os, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace nlfkpp::io
