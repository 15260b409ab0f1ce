#include "ppc/csv.hpp"

#include <fstream>
#include <sstream>

namespace ppc {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    std::string t = strip(s);
    if (t.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(t, &pos);
    } catch (...) {
        return false;
    }
    return pos == t.size();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = strip(line);
        if (!t.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw DataError("empty data file: " + path);
    return lines;
}

}  // namespace

std::vector<double> read_single_column_csv(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<double> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        double v;
        if (!parse_double(lines[i], v)) {
            if (i == 0) continue;  // header
            throw DataError(path + ": non-numeric value on line " + std::to_string(i + 1));
        }
        out.push_back(v);
    }
    if (out.empty()) throw DataError(path + ": no numeric rows");
    return out;
}

int Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

Table read_table_csv(const std::string& path) {
    auto lines = read_lines(path);
    Table t;
    for (const auto& name : split(lines[0])) t.columns.push_back(strip(name));
    const std::size_t cols = t.columns.size();
    t.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split(lines[r]);
        if (fields.size() != cols)
            throw DataError(path + ": line " + std::to_string(r + 1) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            double v;
            if (!parse_double(fields[c], v))
                throw DataError(path + ": non-numeric value in column " + t.columns[c] +
                                ", line " + std::to_string(r + 1));
            t.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return t;
}

RecaptureData read_recapture_csv(const std::string& path) {
    auto lines = read_lines(path);
    RecaptureData data;
    const std::size_t header_fields = split(lines[0]).size();
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split(lines[r]);
        if (fields.size() != header_fields)
            throw DataError(path + ": ragged recapture row on line " + std::to_string(r + 1));
        double released;
        if (!parse_double(fields[1], released))
            throw DataError(path + ": bad release count on line " + std::to_string(r + 1));
        data.releases.push_back(static_cast<long>(released));
        std::vector<long> row;
        for (std::size_t c = 2; c < fields.size(); ++c) {
            double v;
            bool present = parse_double(fields[c], v);
            if (!present) {
                if (!row.empty())
                    throw DataError(path + ": blank cell inside the triangle, line " +
                                    std::to_string(r + 1));
                continue;  // structurally-missing leading cell
            }
            row.push_back(static_cast<long>(v));
        }
        data.recaptures.push_back(std::move(row));
    }
    data.validate();
    return data;
}

void write_recapture_csv(const RecaptureData& data, const std::string& path,
                         int first_release_year) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    const long t = data.occasions();
    out << "release_year,released";
    for (long j = 2; j <= t; ++j) out << "," << first_release_year + j - 1;
    out << "\n";
    for (long i = 1; i <= data.release_years(); ++i) {
        out << first_release_year + i - 1 << "," << data.releases[i - 1];
        for (long j = 2; j <= t; ++j) {
            out << ",";
            if (j > i) out << data.recaptures[i - 1][j - i - 1];
        }
        out << "\n";
    }
}

}  // namespace ppc
