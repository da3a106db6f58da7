#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "causal/errors.hpp"

namespace causal {

enum class Role { Independent, Dependent };

struct Column {
    std::string name;
    Role role = Role::Independent;
};

struct CleaningReport {
    std::vector<std::string> dropped_non_numeric;
    std::vector<std::string> dropped_constant;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

// A cleaned numeric table. Invariants: at least 10 rows, at least 2 columns,
// no constant column, unique column names.
struct Table {
    std::string name;
    std::vector<Column> columns;
    Eigen::MatrixXd values;  // rows x columns
    std::string provenance;
    CleaningReport cleaning;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return columns.size(); }
    std::vector<std::string> column_names() const;
    int column_index(const std::string& name) const;  // -1 when absent
};

struct SufficientStats {
    Eigen::MatrixXd corr;  // Pearson correlation, unit diagonal
    long n = 0;
    std::vector<std::string> names;
};

// Loads a CSV (header row, comma separated), keeping only fully numeric
// columns. Rows with missing entries are dropped, constant columns are
// dropped with a warning, and a perfectly collinear column pair is rejected.
// Columns named in dependent_names are tagged as outcomes; everything else is
// an input. Throws DataError (CollinearColumnsError for the collinear case).
Table load_table(const std::filesystem::path& csv_path,
                 const std::set<std::string>& dependent_names = {});

// Same cleaning pipeline applied to in-memory rows; `source` feeds provenance.
Table make_table(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows,
                 const std::set<std::string>& dependent_names, const std::string& source);

SufficientStats sufficient_stats(const Table& t);

// ceil(fraction * rows) rows drawn without replacement; the selected row
// indices are emitted in their original order, so fraction 1.0 reproduces the
// table unchanged. Throws DegenerateSubsampleError when the draw violates the
// table invariants (e.g. a column went constant).
Table subsample(const Table& t, double fraction, std::uint64_t seed);

// Restricts both tables to their shared column names, in the column order of
// `a`. Throws AlignmentError when fewer than two names are shared.
std::pair<Table, Table> align_columns(const Table& a, const Table& b);

std::string table_to_csv(const Table& t);

}  // namespace causal
