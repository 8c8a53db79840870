#include "bfdr/tsv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <system_error>

namespace bfdr::tsv {

namespace {

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
            break;
        start = tab + 1;
    }
    return out;
}

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

bool skippable(const std::string& line)
{
    return line.empty() || line.front() == '#' || line.find_first_not_of(" \t") == std::string::npos;
}

std::optional<double> to_double(const std::string& s)
{
    if (s == "inf" || s == "Inf" || s == "+inf")
        return HUGE_VAL;
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (b != e && *b == '+')
        ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e)
        return std::nullopt;
    return v;
}

} // namespace

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line)
{
}

std::optional<std::size_t> Table::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    return std::nullopt;
}

std::size_t Table::require(const std::string& name) const
{
    if (auto c = column(name))
        return *c;
    throw ParseError(source, header_line, "missing column '" + name + "'");
}

Table read(std::istream& in, const std::string& source)
{
    Table t;
    t.source = source;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skippable(line))
            continue;
        if (t.header.empty()) {
            t.header = split_tabs(line);
            t.header_line = lineno;
            continue;
        }
        Row row{lineno, split_tabs(line)};
        if (row.fields.size() != t.header.size())
            throw ParseError(source, lineno,
                             "expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(row.fields.size()));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty())
        throw ParseError(source, lineno, "missing header line");
    return t;
}

Table read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path.string(), 0, "cannot open file");
    return read(in, path.string());
}

double parse_double(const Table& table, const Row& row, std::size_t column)
{
    const std::string& field = row.fields.at(column);
    if (auto v = to_double(field))
        return *v;
    throw ParseError(table.source, row.line, "column '" + table.header.at(column) + "': not a number: '" + field + "'");
}

std::vector<std::vector<double>> read_matrix_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path.string(), 0, "cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skippable(line))
            continue;
        std::istringstream fields(line);
        std::string tok;
        std::vector<double> row;
        while (fields >> tok) {
            auto v = to_double(tok);
            if (!v || !std::isfinite(*v))
                throw ParseError(path.string(), lineno, "not a finite number: '" + tok + "'");
            row.push_back(*v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path.string(), lineno, "ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(path.string(), lineno, "no data");
    return rows;
}

std::string format_full(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_human(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

AtomicFile::AtomicFile(std::filesystem::path target) : target_(std::move(target))
{
    temp_ = target_;
    temp_ += ".partial";
    out_.open(temp_, std::ios::out | std::ios::trunc);
    if (!out_)
        throw std::runtime_error("cannot write " + temp_.string());
}

AtomicFile::~AtomicFile()
{
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicFile::commit()
{
    out_.flush();
    if (!out_)
        throw std::runtime_error("write failed for " + temp_.string());
    out_.close();
    std::filesystem::rename(temp_, target_);
    committed_ = true;
}

} // namespace bfdr::tsv
