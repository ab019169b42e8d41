#ifndef DHYPER_IO_HPP
#define DHYPER_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace dhyper {

/// Round-trip-safe decimal rendering (17 significant digits, '.' decimal
/// point regardless of locale). Infinities and NaN come out as "inf",
/// "-inf", "nan".
std::string format_double(double value);

/// CSV serialization: one header line, then one line per row, LF line
/// endings, no quoting (callers must not put commas or newlines in cells).
/// Throws std::invalid_argument on a row whose width differs from the
/// header's.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

/// Writes to `<path>.tmp` in the same directory and renames over `path`,
/// so readers never observe a partial file. Throws std::runtime_error on
/// I/O failure.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

/// Sidecar path for a result file: `<path>.meta.json`.
std::filesystem::path meta_path(const std::filesystem::path& path);

}  // namespace dhyper

#endif  // DHYPER_IO_HPP
