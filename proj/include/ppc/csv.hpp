#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ppc/recapture.hpp"

namespace ppc {

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Single-column CSV of observations; a leading non-numeric line is treated
// as a header.
std::vector<double> read_single_column_csv(const std::string& path);

struct Table {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;

    int column_index(const std::string& name) const;  // -1 when absent
};

// Numeric CSV with a header row.
Table read_table_csv(const std::string& path);

// Two-part recapture CSV: header row, then one row per release year with
// the release total followed by the triangular counts (structurally missing
// cells blank).
RecaptureData read_recapture_csv(const std::string& path);

void write_recapture_csv(const RecaptureData& data, const std::string& path,
                         int first_release_year = 1981);

}  // namespace ppc
