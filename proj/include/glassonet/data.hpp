#pragma once

#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "common.hpp"

namespace glassonet {

enum class Divisor { n_minus_1, n };

inline double divisor_value(Divisor d, Index n) {
    return d == Divisor::n_minus_1 ? static_cast<double>(n - 1) : static_cast<double>(n);
}

inline std::string to_string(Divisor d) { return d == Divisor::n_minus_1 ? "n-1" : "n"; }

inline Divisor parse_divisor(std::string_view s) {
    if (s == "n-1" || s == "n_minus_1") return Divisor::n_minus_1;
    if (s == "n") return Divisor::n;
    throw ValidationError("divisor must be 'n-1' or 'n', got '" + std::string(s) + "'");
}

struct RawDataset {
    Matrix values;  // n x p
    std::vector<std::string> variable_names;
    std::vector<std::string> domain_labels;  // empty or size p

    Index n() const { return values.rows(); }
    Index p() const { return values.cols(); }

    void validate() const {
        if (n() < 2) throw ValidationError("dataset needs at least 2 rows, got " + std::to_string(n()));
        if (p() < 2) throw ValidationError("dataset needs at least 2 columns, got " + std::to_string(p()));
        if (static_cast<Index>(variable_names.size()) != p())
            throw ValidationError("variable name count does not match column count");
        if (!domain_labels.empty() && static_cast<Index>(domain_labels.size()) != p())
            throw ValidationError("domain label count does not match column count");
        std::unordered_set<std::string> seen;
        for (const auto& name : variable_names)
            if (!seen.insert(name).second) throw ValidationError("duplicate variable name '" + name + "'");
        if (!values.allFinite()) throw ValidationError("dataset contains non-finite values");
    }

    /// Subset of rows, in the given order (duplicates allowed).
    RawDataset rows(const std::vector<Index>& idx) const {
        RawDataset out{Matrix(static_cast<Index>(idx.size()), p()), variable_names, domain_labels};
        for (std::size_t r = 0; r < idx.size(); ++r) out.values.row(static_cast<Index>(r)) = values.row(idx[r]);
        return out;
    }
};

struct StandardizedMatrix {
    Matrix X;
    Vector column_means;
    Vector column_sds;
    Divisor divisor = Divisor::n_minus_1;
};

struct CovarianceMatrix {
    Matrix S;
    double ridge_epsilon = 0.0;
    double condition_number = std::numeric_limits<double>::infinity();
    Divisor divisor_convention = Divisor::n_minus_1;

    Index p() const { return S.rows(); }
};

// ---------------------------------------------------------------------------
// CSV input

enum class DomainRow { auto_detect, present, absent };

struct CsvOptions {
    char delimiter = ',';
    bool header = true;
    DomainRow domain_row = DomainRow::auto_detect;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses delimited text. Row numbers in error messages are 1-based file
/// lines, so the header is row 1.
inline RawDataset parse_csv(std::istream& in, const CsvOptions& opt = {}) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        lines.push_back(detail::split_csv_line(line, opt.delimiter));
        line_numbers.push_back(lineno);
    }
    if (lines.empty()) throw ValidationError("CSV input is empty");

    RawDataset ds;
    std::size_t first = 0;
    const std::size_t p = lines.front().size();
    if (opt.header) {
        ds.variable_names = lines.front();
        first = 1;
    } else {
        for (std::size_t j = 0; j < p; ++j) ds.variable_names.push_back("V" + std::to_string(j + 1));
    }

    if (first < lines.size() && opt.domain_row != DomainRow::absent) {
        const auto& row = lines[first];
        bool all_text = row.size() == p;
        for (const auto& cell : row) all_text = all_text && !detail::parse_number(cell).has_value();
        if (opt.domain_row == DomainRow::present || all_text) {
            if (row.size() != p)
                throw ValidationError("domain row (row " + std::to_string(line_numbers[first]) + ") has " +
                                      std::to_string(row.size()) + " fields, expected " + std::to_string(p));
            ds.domain_labels = row;
            ++first;
        }
    }

    const std::size_t n = lines.size() - first;
    ds.values.resize(static_cast<Index>(n), static_cast<Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = lines[first + r];
        const auto file_row = std::to_string(line_numbers[first + r]);
        if (row.size() != p)
            throw ValidationError("parse error at row " + file_row + ": expected " + std::to_string(p) +
                                  " fields, got " + std::to_string(row.size()));
        for (std::size_t j = 0; j < p; ++j) {
            const auto v = detail::parse_number(row[j]);
            if (!v) {
                const auto what = row[j].empty() ? std::string("missing value") : "non-numeric value '" + row[j] + "'";
                throw ValidationError("parse error at row " + file_row + ", column \"" + ds.variable_names[j] +
                                      "\": " + what);
            }
            ds.values(static_cast<Index>(r), static_cast<Index>(j)) = *v;
        }
    }
    ds.validate();
    return ds;
}

inline RawDataset load_csv(const std::string& path, const CsvOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return parse_csv(in, opt);
}

/// Sidecar file with lines `variable,domain`. An optional header line
/// `variable,domain` is skipped. Every dataset variable must be mapped.
inline void apply_domains(RawDataset& ds, std::istream& in, char delim = ',') {
    std::unordered_map<std::string, std::string> map;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
        auto cells = detail::split_csv_line(line, delim);
        if (cells.size() != 2) throw ValidationError("domain file: expected 'variable,domain' in line '" + line + "'");
        if (cells[0] == "variable" && cells[1] == "domain") continue;
        map[cells[0]] = cells[1];
    }
    std::vector<std::string> labels;
    for (const auto& name : ds.variable_names) {
        auto it = map.find(name);
        if (it == map.end()) throw ValidationError("domain file has no entry for variable '" + name + "'");
        labels.push_back(it->second);
    }
    ds.domain_labels = std::move(labels);
}

inline void load_domains(RawDataset& ds, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open domain file '" + path + "'");
    apply_domains(ds, in);
}

// ---------------------------------------------------------------------------
// Standardization and covariance

inline StandardizedMatrix standardize(const Matrix& values, const std::vector<std::string>& names,
                                      Divisor divisor = Divisor::n_minus_1) {
    const Index n = values.rows();
    const Index p = values.cols();
    if (n < 2) throw ValidationError("standardize needs at least 2 rows");
    StandardizedMatrix out;
    out.divisor = divisor;
    out.column_means = values.colwise().mean().transpose();
    out.X = values.rowwise() - out.column_means.transpose();
    out.column_sds.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double sd = std::sqrt(out.X.col(j).squaredNorm() / divisor_value(divisor, n));
        // Relative check catches columns that are constant up to rounding.
        const double scale = std::max(1.0, values.col(j).cwiseAbs().maxCoeff());
        if (!(sd > 1e-12 * scale)) {
            const auto name = j < static_cast<Index>(names.size()) ? names[j] : "#" + std::to_string(j);
            throw NumericalError("column \"" + name + "\" has zero variance");
        }
        out.column_sds(j) = sd;
        out.X.col(j) /= sd;
    }
    return out;
}

inline StandardizedMatrix standardize(const RawDataset& raw, Divisor divisor = Divisor::n_minus_1) {
    return standardize(raw.values, raw.variable_names, divisor);
}

/// Ratio of extreme eigenvalues; +inf when the smallest is not positive.
inline double condition_number(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

/// Covariance of already-centred columns: XᵀX / divisor, symmetrized.
inline Matrix crossproduct(const Matrix& X, double divisor) {
    Matrix S = X.transpose() * X / divisor;
    return symmetrized(S);
}

inline CovarianceMatrix sample_covariance(const StandardizedMatrix& X) {
    CovarianceMatrix out;
    out.S = crossproduct(X.X, divisor_value(X.divisor, X.X.rows()));
    out.divisor_convention = X.divisor;
    out.ridge_epsilon = 0.0;
    out.condition_number = condition_number(out.S);
    return out;
}

/// Adds the smallest εI that brings the condition number to at most
/// kappa_max. ε solves (λmax + ε)/(λmin + ε) = kappa_max in closed form.
inline CovarianceMatrix ridge_condition(const CovarianceMatrix& cov, double kappa_max) {
    if (!(kappa_max >= 1.0) || !std::isfinite(kappa_max))
        throw ValidationError("kappa_max must be a finite value >= 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov.S, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0)) throw NumericalError("covariance matrix has no positive eigenvalue");

    double eps = 0.0;
    auto cond = [&](double e) { return (lo + e) > 0.0 ? (hi + e) / (lo + e) : std::numeric_limits<double>::infinity(); };
    if (cond(0.0) > kappa_max) {
        if (kappa_max == 1.0) throw ValidationError("kappa_max = 1 is unattainable for a non-scalar matrix");
        eps = std::max(0.0, (hi - kappa_max * lo) / (kappa_max - 1.0));
        // Rounding can leave the ratio a few ulps above the bound.
        while (cond(eps) > kappa_max) eps = std::nextafter(eps, std::numeric_limits<double>::infinity()) * (1.0 + 1e-15);
    }

    CovarianceMatrix out = cov;
    out.S.diagonal().array() += eps;
    out.ridge_epsilon = cov.ridge_epsilon + eps;
    out.condition_number = cond(eps);
    return out;
}

}  // namespace glassonet
