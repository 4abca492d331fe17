#pragma once

// Plain-text outputs. Every floating-point value is written with 17
// significant digits so files round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlfkpp/core_model.hpp"
#include "nlfkpp/solver.hpp"

namespace nlfkpp::io {

/// printf("%.17g"), with non-finite values spelled nan / inf / -inf.
std::string format_double(double x);

void write_snapshots_ndjson(std::ostream& os, const std::vector<Field>& snapshots);
void write_snapshots_ndjson(const std::filesystem::path& path, const std::vector<Field>& snapshots);

/// Parses {"t":..., "values":[...]} lines back onto `grid`.
std::vector<Field> read_snapshots_ndjson(const std::filesystem::path& path, const Grid1D& grid);

/// Header t,sup_u,inf_u,dt.
void write_summary_csv(const std::filesystem::path& path, const std::vector<HistoryPoint>& history);

/// Header x,u_t=<t1>,u_t=<t2>,...: the snapshots closest to each display time.
void write_profile_csv(const std::filesystem::path& path, const std::vector<Field>& snapshots,
                       const std::vector<double>& display_times);

/// Writes `text` to `path`, creating parent directories; errors carry the OS message.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace nlfkpp::io
