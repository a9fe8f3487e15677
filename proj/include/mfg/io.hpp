#pragma once

#include "mfg/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mfg {

/// 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

/// One value per grid node, one per line; a trailing column wins when a line
/// holds "x,value". Blank lines and lines starting with '#' are skipped.
Profile read_profile_csv(const std::filesystem::path& path, const Grid& grid);

/// Header "t,x_0,...,x_{nx+1}", then one row per time level.
void write_field_csv(const std::filesystem::path& path, const Field& f);
Field read_field_csv(const std::filesystem::path& path, const Grid& grid, Unit unit, bool dirichlet_left);

struct Traces {
    std::vector<double> t, eta, aggregate, pbar;
};
void write_traces_csv(const std::filesystem::path& path, const Traces& tr);
Traces read_traces_csv(const std::filesystem::path& path);

/// Generic table writer: header row plus numeric rows.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// gnuplot script for traces.csv and profiles.csv (x, u(0), u(T), m(0), m(T)) in the same directory.
std::string gnuplot_script(const std::string& label);

} // namespace mfg
