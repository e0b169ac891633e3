#pragma once

#include <span>
#include <string>
#include <vector>

#include "parcs/matrix.hpp"

namespace parcs::io {

// Shortest decimal form that round-trips to the same double ("0.1", "2.06",
// "1e-30"); used for every number the engine writes.
std::string format_double(double v);

// CSV dialect used throughout: comma separator, '.' decimal point, LF line
// ends, mandatory header row, missing values as empty fields.
struct CsvTable {
    std::vector<std::string> header;
    Matrix values;        // missing cells hold NaN
    Matrix missing;       // 0/1 flags aligned with values
    bool any_missing = false;
};

CsvTable parse_csv(std::string_view text);          // Error on ragged/invalid rows
CsvTable read_csv(const std::string& path);         // IoError when unreadable

std::string to_csv(std::span<const std::string> header, const Matrix& values,
                   const Matrix* missing = nullptr);
void write_csv(const std::string& path, std::span<const std::string> header,
               const Matrix& values, const Matrix* missing = nullptr);

std::string read_file(const std::string& path);     // IoError when unreadable
void write_file(const std::string& path, std::string_view content);

} // namespace parcs::io
