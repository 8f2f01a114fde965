#include "socsim/core/table.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "socsim/core/error.hpp"
#include "socsim/core/hash.hpp"

namespace socsim::core {

namespace {

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size()) {
        raise(Errc::InvalidParams,
              "row width " + std::to_string(cells.size()) + " != " + std::to_string(columns.size()) +
                  " in table " + name);
    }
    for (auto& c : cells) c = sanitize(std::move(c));
    rows.push_back(std::move(cells));
}

std::size_t Table::col_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) return i;
    }
    raise(Errc::UnknownAttribute, "no column '" + column + "' in table " + name);
}

const std::string& Table::cell(std::size_t row, const std::string& column) const {
    return rows.at(row).at(col_index(column));
}

double Table::num(std::size_t row, const std::string& column) const {
    return std::strtod(cell(row, column).c_str(), nullptr);
}

std::int64_t Table::integer(std::size_t row, const std::string& column) const {
    return std::strtoll(cell(row, column).c_str(), nullptr, 10);
}

std::string Table::to_tsv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << '\t';
        out << columns[i];
    }
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << '\t';
            out << r[i];
        }
        out << '\n';
    }
    return out.str();
}

void Table::write_tsv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(Errc::Io, "cannot write " + path.string());
    }
    out << to_tsv();
}

Table Table::read_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::Io, "cannot read " + path.string());
    }
    Table t;
    t.name = path.stem().string();
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (header) {
            t.columns = std::move(cells);
            header = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

std::string Table::digest_hex() const {
    return sha256_hex(to_tsv());
}

std::string Table::fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string Table::fmt(std::int64_t v) {
    return std::to_string(v);
}

std::string Table::fmt(std::uint64_t v) {
    return std::to_string(v);
}

} // namespace socsim::core
