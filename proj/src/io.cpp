#include "mfg/io.hpp"

#include "mfg/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mfg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::parameter, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::parameter, "cannot read " + path.string());
    return in;
}

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    const char* b = s.data();
    while (b < s.data() + s.size() && (*b == ' ' || *b == '\t')) ++b;
    const char* e = s.data() + s.size();
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
        throw Error(ErrorKind::parameter, path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

Profile read_profile_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in = open_in(path);
    Profile out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        out.push_back(parse_number(cells.back(), path, lineno));
    }
    if (out.size() != grid.nodes()) {
        throw Error(ErrorKind::dimension, path.string() + ": expected " + std::to_string(grid.nodes()) +
                                              " values, found " + std::to_string(out.size()));
    }
    return out;
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
    std::ofstream out = open_out(path);
    const Grid& g = f.grid();
    out << 't';
    for (std::size_t i = 0; i < f.cols(); ++i) out << ',' << format_number(g.x(i));
    out << '\n';
    for (std::size_t n = 0; n < f.levels(); ++n) {
        out << format_number(g.t(n));
        for (double v : f.row(n)) out << ',' << format_number(v);
        out << '\n';
    }
}

Field read_field_csv(const std::filesystem::path& path, const Grid& grid, Unit unit, bool dirichlet_left) {
    std::ifstream in = open_in(path);
    Field f(grid, unit, false);
    std::string line;
    std::size_t lineno = 0;
    std::size_t level = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) continue;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != grid.nodes() + 1 || level > grid.nt) {
            throw Error(ErrorKind::dimension, path.string() + ":" + std::to_string(lineno) + ": row does not match grid");
        }
        for (std::size_t i = 0; i < grid.nodes(); ++i) f.at(level, i) = parse_number(cells[i + 1], path, lineno);
        ++level;
    }
    if (level != grid.nt + 1) throw Error(ErrorKind::dimension, path.string() + ": wrong number of time levels");
    if (!dirichlet_left) return f;
    // keep the stored values verbatim; only the flag changes
    Field out(grid, unit, true);
    for (std::size_t n = 0; n <= grid.nt; ++n) {
        for (std::size_t i = 0; i < grid.nodes(); ++i) out.at(n, i) = f.at(n, i);
    }
    return out;
}

void write_traces_csv(const std::filesystem::path& path, const Traces& tr) {
    std::ofstream out = open_out(path);
    out << "t,eta,aggregate,pbar\n";
    for (std::size_t n = 0; n < tr.t.size(); ++n) {
        out << format_number(tr.t[n]) << ',' << format_number(tr.eta[n]) << ',' << format_number(tr.aggregate[n])
            << ',' << format_number(tr.pbar[n]) << '\n';
    }
}

Traces read_traces_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    Traces tr;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 4) throw Error(ErrorKind::dimension, path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
        tr.t.push_back(parse_number(c[0], path, lineno));
        tr.eta.push_back(parse_number(c[1], path, lineno));
        tr.aggregate.push_back(parse_number(c[2], path, lineno));
        tr.pbar.push_back(parse_number(c[3], path, lineno));
    }
    return tr;
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
        out << '\n';
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string gnuplot_script(const std::string& label) {
    std::ostringstream os;
    os << "# gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set multiplot layout 2,2 title '" << label << "'\n"
       << "set title 'mass eta(t)'\nset xlabel 't'\n"
       << "plot 'traces.csv' using 1:2 with lines\n"
       << "set title 'aggregate'\n"
       << "plot 'traces.csv' using 1:3 with lines\n"
       << "set title 'u at t = 0 and t = T'\nset xlabel 'x'\n"
       << "plot 'profiles.csv' using 1:2 with lines, '' using 1:3 with lines\n"
       << "set title 'm at t = 0 and t = T'\n"
       << "plot 'profiles.csv' using 1:4 with lines, '' using 1:5 with lines\n"
       << "unset multiplot\n";
    return os.str();
}

} // namespace mfg
