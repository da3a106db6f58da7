#include "causal/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "causal/rng.hpp"

namespace causal {

std::vector<std::string> Table::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

int Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
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
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool is_missing(const std::string& field) {
    if (field.empty()) return true;
    std::string low;
    low.reserve(field.size());
    for (char c : field) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return low == "na" || low == "nan" || low == "n/a" || low == "?";
}

bool parse_number(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading plus
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string shortest_repr(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

Table make_table(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows,
                 const std::set<std::string>& dependent_names, const std::string& source) {
    const std::size_t w = header.size();
    if (w == 0) throw DataError(source + ": empty header");
    for (const auto& row : rows)
        if (row.size() != w)
            throw DataError(source + ": non-rectangular rows (header has " + std::to_string(w) +
                            " fields, a row has " + std::to_string(row.size()) + ")");
    {
        std::set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second) throw DataError(source + ": duplicate column name '" + h + "'");
    }

    CleaningReport report;

    // A column is numeric when every non-missing cell parses as a finite
    // number; missing cells are decided later, per row.
    std::vector<int> numeric_cols;
    for (std::size_t c = 0; c < w; ++c) {
        bool numeric = true;
        for (const auto& row : rows) {
            if (is_missing(row[c])) continue;
            double v;
            if (!parse_number(row[c], v)) {
                numeric = false;
                break;
            }
        }
        if (numeric) numeric_cols.push_back(static_cast<int>(c));
        else report.dropped_non_numeric.push_back(header[c]);
    }
    for (const auto& n : report.dropped_non_numeric)
        report.warnings.push_back("dropped non-numeric column '" + n + "'");

    std::vector<std::vector<double>> kept_rows;
    for (const auto& row : rows) {
        std::vector<double> vals;
        vals.reserve(numeric_cols.size());
        bool missing = false;
        for (int c : numeric_cols) {
            if (is_missing(row[c])) {
                missing = true;
                break;
            }
            double v;
            parse_number(row[c], v);
            vals.push_back(v);
        }
        if (missing) ++report.dropped_rows;
        else kept_rows.push_back(std::move(vals));
    }
    if (report.dropped_rows > 0)
        report.warnings.push_back("dropped " + std::to_string(report.dropped_rows) +
                                  " rows with missing entries");

    // Constant columns carry no signal and break correlation; drop them.
    std::vector<int> live;
    for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
        bool constant = !kept_rows.empty();
        for (const auto& row : kept_rows)
            if (row[k] != kept_rows.front()[k]) {
                constant = false;
                break;
            }
        if (constant) {
            report.dropped_constant.push_back(header[numeric_cols[k]]);
            report.warnings.push_back("dropped constant column '" + header[numeric_cols[k]] + "'");
        } else {
            live.push_back(static_cast<int>(k));
        }
    }

    if (kept_rows.size() < 10)
        throw DataError(source + ": only " + std::to_string(kept_rows.size()) +
                        " usable rows, need at least 10");
    if (live.size() < 2)
        throw DataError(source + ": only " + std::to_string(live.size()) +
                        " usable columns, need at least 2");

    Table t;
    t.name = name;
    t.provenance = source;
    t.cleaning = std::move(report);
    for (int k : live) {
        const std::string& col = header[numeric_cols[k]];
        t.columns.push_back(Column{col, dependent_names.count(col) ? Role::Dependent
                                                                   : Role::Independent});
    }
    t.values.resize(static_cast<long>(kept_rows.size()), static_cast<long>(live.size()));
    for (std::size_t r = 0; r < kept_rows.size(); ++r)
        for (std::size_t c = 0; c < live.size(); ++c)
            t.values(static_cast<long>(r), static_cast<long>(c)) = kept_rows[r][live[c]];

    // Perfect collinearity makes the correlation matrix unusable downstream;
    // refuse it up front with the offending pair named.
    const SufficientStats s = sufficient_stats(t);
    for (long i = 0; i < s.corr.rows(); ++i)
        for (long j = i + 1; j < s.corr.cols(); ++j)
            if (std::abs(s.corr(i, j)) >= 1.0 - 1e-12)
                throw CollinearColumnsError(source + ": columns '" + t.columns[i].name + "' and '" +
                                            t.columns[j].name + "' are perfectly collinear");
    return t;
}

Table load_table(const std::filesystem::path& csv_path,
                 const std::set<std::string>& dependent_names) {
    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open " + csv_path.string());

    std::vector<std::vector<std::string>> raw;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && raw.empty()) continue;
        raw.push_back(split_csv_line(line));
    }
    while (!raw.empty() && raw.back().size() == 1 && raw.back()[0].empty()) raw.pop_back();
    if (raw.empty()) throw DataError(csv_path.string() + ": empty file");

    std::vector<std::string> header = raw.front();
    raw.erase(raw.begin());
    return make_table(csv_path.stem().string(), header, raw, dependent_names, csv_path.string());
}

SufficientStats sufficient_stats(const Table& t) {
    const long n = t.values.rows();
    const long p = t.values.cols();
    SufficientStats s;
    s.n = n;
    s.names = t.column_names();

    Eigen::MatrixXd centered = t.values.rowwise() - t.values.colwise().mean();
    Eigen::VectorXd norms(p);
    for (long c = 0; c < p; ++c) norms(c) = centered.col(c).norm();

    s.corr.resize(p, p);
    for (long i = 0; i < p; ++i) {
        s.corr(i, i) = 1.0;
        for (long j = i + 1; j < p; ++j) {
            double r = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            r = std::clamp(r, -1.0, 1.0);
            s.corr(i, j) = r;
            s.corr(j, i) = r;
        }
    }
    return s;
}

Table subsample(const Table& t, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("subsample fraction must lie in (0, 1]");
    const std::size_t n = t.rows();
    const std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (k < 10)
        throw DegenerateSubsampleError(t.name + ": subsample of " + std::to_string(k) +
                                       " rows is below the 10-row minimum");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng::Xoshiro256 g(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng::bounded(g, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());

    Table out;
    out.name = t.name;
    out.columns = t.columns;
    out.provenance = t.provenance + " [subsample " + shortest_repr(fraction) + " seed " +
                     std::to_string(seed) + "]";
    out.values.resize(static_cast<long>(k), t.values.cols());
    for (std::size_t r = 0; r < k; ++r) out.values.row(static_cast<long>(r)) = t.values.row(static_cast<long>(idx[r]));

    for (long c = 0; c < out.values.cols(); ++c) {
        const double first = out.values(0, c);
        if ((out.values.col(c).array() == first).all())
            throw DegenerateSubsampleError(t.name + ": column '" + out.columns[c].name +
                                           "' is constant in the subsample");
    }
    return out;
}

std::pair<Table, Table> align_columns(const Table& a, const Table& b) {
    std::vector<std::string> shared;
    for (const auto& col : a.columns)
        if (b.column_index(col.name) >= 0) shared.push_back(col.name);
    if (shared.size() < 2)
        throw AlignmentError("tables " + a.name + " and " + b.name + " share only " +
                             std::to_string(shared.size()) + " columns, need at least 2");

    auto restrict = [&shared](const Table& t) {
        Table out;
        out.name = t.name;
        out.provenance = t.provenance + " [aligned]";
        out.values.resize(t.values.rows(), static_cast<long>(shared.size()));
        for (std::size_t c = 0; c < shared.size(); ++c) {
            const int src = t.column_index(shared[c]);
            out.columns.push_back(t.columns[src]);
            out.values.col(static_cast<long>(c)) = t.values.col(src);
        }
        return out;
    };
    return {restrict(a), restrict(b)};
}

std::string table_to_csv(const Table& t) {
    std::ostringstream out;
    for (std::size_t c = 0; c < t.cols(); ++c) {
        if (c) out << ',';
        out << t.columns[c].name;
    }
    out << '\n';
    for (long r = 0; r < t.values.rows(); ++r) {
        for (long c = 0; c < t.values.cols(); ++c) {
            if (c) out << ',';
            out << shortest_repr(t.values(r, c));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace causal
