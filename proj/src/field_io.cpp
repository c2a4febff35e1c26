#include "flowlab/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "flowlab/errors.hpp"

namespace flowlab {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& s, const std::string& path, std::size_t line) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw IoError(path + ":" + std::to_string(line) + ": invalid number '" + s + "'");
    return v;
}

struct Table {
    std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    // Skip a UTF-8 byte-order mark and blank lines before the header.
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!trim(line).empty()) break;
    }
    if (split(line) != header) {
        std::string want;
        for (std::size_t k = 0; k < header.size(); ++k) want += (k ? "," : "") + header[k];
        throw IoError(path + ": expected header '" + want + "'");
    }
    Table t;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(header.size()) + " columns");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_number(c, path, lineno));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Distinct coordinate values, checked for uniform spacing.
std::vector<double> axis_values(const Table& t, int col, const std::string& path, const char* axis) {
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(r[col]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() < 2) throw IoError(path + ": need at least 2 distinct " + axis + " values");
    const double h = (v.back() - v.front()) / static_cast<double>(v.size() - 1);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::abs(v[k] - (v.front() + k * h)) > 1e-9 * (v.back() - v.front()))
            throw IoError(path + ": " + axis + " values are not uniformly spaced");
    }
    return v;
}

template <typename T, typename Make>
std::pair<Grid2D, std::vector<T>> grid_from_table(const Table& t, const std::string& path, Make make) {
    const auto xs = axis_values(t, 0, path, "x");
    const auto ys = axis_values(t, 1, path, "y");
    Grid2D grid(xs.front(), xs.back(), ys.front(), ys.back(), static_cast<int>(xs.size()),
                static_cast<int>(ys.size()));
    if (t.rows.size() != grid.size())
        throw IoError(path + ": " + std::to_string(t.rows.size()) + " rows for a " +
                      std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()) + " grid");
    std::vector<T> values(grid.size());
    std::vector<bool> seen(grid.size(), false);
    for (const auto& r : t.rows) {
        const int i = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), r[0]) - xs.begin());
        const int j = static_cast<int>(std::lower_bound(ys.begin(), ys.end(), r[1]) - ys.begin());
        const auto k = grid.index(i, j);
        if (seen[k])
            throw IoError(path + ": duplicate node (" + format_double(r[0]) + ", " +
                          format_double(r[1]) + ")");
        seen[k] = true;
        values[k] = make(r);
    }
    return {grid, std::move(values)};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

}  // namespace

VectorField load_vector_csv(const std::string& path, std::string name) {
    const Table t = read_table(path, {"x", "y", "u", "v"});
    auto [grid, values] = grid_from_table<Vec2>(
        t, path, [](const std::vector<double>& r) { return Vec2{r[2], r[3]}; });
    if (name.empty()) name = path;
    return VectorField::sampled(grid, std::move(values), std::move(name));
}

ScalarField load_scalar_csv(const std::string& path, std::string name) {
    const Table t = read_table(path, {"x", "y", "f"});
    auto [grid, values] =
        grid_from_table<double>(t, path, [](const std::vector<double>& r) { return r[2]; });
    if (name.empty()) name = path;
    return ScalarField::sampled(grid, std::move(values), std::move(name));
}

void write_vector_csv(const std::string& path, const VectorField& X, const Grid2D& grid) {
    auto out = open_out(path);
    out << "x,y,u,v\n";
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const Point2 p = grid.node(i, j);
            const Vec2 v = X(p);
            out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(v.x)
                << ',' << format_double(v.y) << '\n';
        }
}

void write_scalar_csv(const std::string& path, const ScalarField& f, const Grid2D& grid) {
    auto out = open_out(path);
    out << "x,y,f\n";
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const Point2 p = grid.node(i, j);
            out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(f(p))
                << '\n';
        }
}

}  // namespace flowlab
