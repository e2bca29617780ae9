#include "mvsne/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mvsne::csv {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

Table read_table(const std::string& path, const ReadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line, opts.delimiter);
        if (first && opts.header) {
            table.header = std::move(cells);
        } else {
            table.rows.push_back(std::move(cells));
        }
        first = false;
    }
    if (table.rows.empty()) throw DataError("empty file: " + path);
    const std::size_t width = table.rows.front().size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != width) {
            throw DataError(path + ": row " + std::to_string(i + 1) + " has " +
                            std::to_string(table.rows[i].size()) + " cells, expected " +
                            std::to_string(width));
        }
    }
    return table;
}

Mat to_matrix(const Table& table, const std::string& source_name) {
    const std::size_t n = table.rows.size();
    const std::size_t p = table.rows.front().size();
    Mat m(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const std::string& cell = table.rows[i][j];
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE ||
                !std::isfinite(v)) {
                throw DataError(source_name + ": non-numeric or non-finite cell at row " +
                                std::to_string(i + 1) + ", column " + std::to_string(j + 1) +
                                ": '" + cell + "'");
            }
            m(i, j) = v;
        }
    }
    return m;
}

std::string escape_field(const std::string& field, char delimiter) {
    if (field.find(delimiter) == std::string::npos && field.find('"') == std::string::npos &&
        field.find('\n') == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[40];
    // shortest representation that round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw DataError("rename failed: " + tmp + " -> " + path);
    }
}

}  // namespace mvsne::csv
