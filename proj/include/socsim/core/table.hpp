#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socsim::core {

// Tabular readout container. Cells are stored as text with stable numeric
// formatting so that written tables round-trip and digests are reproducible.
class Table {
public:
    Table() = default;
    Table(std::string name, std::vector<std::string> columns)
        : name(std::move(name)), columns(std::move(columns)) {}

    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    std::size_t col_index(const std::string& column) const;

    const std::string& cell(std::size_t row, const std::string& column) const;
    double num(std::size_t row, const std::string& column) const;
    std::int64_t integer(std::size_t row, const std::string& column) const;

    void write_tsv(const std::filesystem::path& path) const;
    static Table read_tsv(const std::filesystem::path& path);

    std::string to_tsv() const;
    std::string digest_hex() const;

    bool operator==(const Table&) const = default;

    // Stable cell formatting (shortest round-trip form for doubles).
    static std::string fmt(double v);
    static std::string fmt(std::int64_t v);
    static std::string fmt(std::uint64_t v);
    static std::string fmt(int v) { return fmt(std::int64_t(v)); }
};

} // namespace socsim::core
