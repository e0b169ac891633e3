#include "parcs/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "parcs/errors.hpp"

namespace parcs::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_field(std::string_view field, std::size_t row, std::size_t col) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw Error("csv: row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                    ": '" + std::string(field) + "' is not a number");
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

CsvTable parse_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = pos + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw Error("csv: missing header row");

    CsvTable t;
    for (std::string_view h : split(lines[0], ','))
        t.header.emplace_back(h);
    const std::size_t cols = t.header.size();
    const std::size_t rows = lines.size() - 1;
    t.values = Matrix(rows, cols);
    t.missing = Matrix(rows, cols);

    for (std::size_t r = 0; r < rows; ++r) {
        const auto fields = split(lines[r + 1], ',');
        if (fields.size() != cols)
            throw Error("csv: row " + std::to_string(r + 1) + " has " +
                        std::to_string(fields.size()) + " fields, header has " +
                        std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            if (fields[c].empty()) {
                t.values(r, c) = std::numeric_limits<double>::quiet_NaN();
                t.missing(r, c) = 1.0;
                t.any_missing = true;
            } else {
                t.values(r, c) = parse_field(fields[c], r + 1, c);
            }
        }
    }
    return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string to_csv(std::span<const std::string> header, const Matrix& values,
                   const Matrix* missing) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            if (missing && (*missing)(r, c) != 0.0) continue; // empty field
            out += format_double(values(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, std::span<const std::string> header,
               const Matrix& values, const Matrix* missing) {
    write_file(path, to_csv(header, values, missing));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure on '" + path + "'");
}

} // namespace parcs::io
