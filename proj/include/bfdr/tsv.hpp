#pragma once

// Tab-separated input and output. A header line is mandatory, blank lines
// and lines starting with '#' are skipped.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfdr::tsv {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct Table {
    std::string source;
    std::size_t header_line = 0;
    std::vector<std::string> header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(const std::string& name) const;
    /// Throws ParseError at the header line when the column is missing.
    std::size_t require(const std::string& name) const;
    bool has(const std::string& name) const { return column(name).has_value(); }
};

Table read(std::istream& in, const std::string& source);
Table read_file(const std::filesystem::path& path);

/// Strict full-field double parse; accepts "inf".
double parse_double(const Table& table, const Row& row, std::size_t column);

/// Whitespace-separated numeric matrix, one row per line; '#' lines skipped.
std::vector<std::vector<double>> read_matrix_file(const std::filesystem::path& path);

/// Round-trip precision for machine-readable files.
std::string format_full(double x);
/// Six significant digits for human-readable tables.
std::string format_human(double x);

/// Writes to a sibling temporary file and renames it into place on commit().
/// An uncommitted writer removes its temporary file.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path target);
    ~AtomicFile();
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ostream& stream() { return out_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

} // namespace bfdr::tsv
