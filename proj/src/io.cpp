#include "fcsv/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace fcsv {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

// non-blank lines, split into cells
std::vector<std::vector<std::string>> read_rows(std::istream& in)
{
    if (!in) {
        throw IoError("input stream is not readable");
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        rows.push_back(split_row(line));
    }
    if (in.bad()) {
        throw IoError("read error");
    }
    return rows;
}

std::string where(std::size_t row)
{
    return "line " + std::to_string(row + 1);
}

std::string sanitize(std::string s)
{
    for (auto& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = (c == ',') ? ';' : ' ';
        }
    }
    return s;
}

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s)
{
    const std::string t = trim(s);
    double x = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, x);
    if (t.empty() || res.ec != std::errc() || res.ptr != last) {
        throw IoError("not a number: '" + t + "'");
    }
    return x;
}

bool is_iso_date(const std::string& s)
{
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    const int month = std::stoi(s.substr(5, 2));
    const int day = std::stoi(s.substr(8, 2));
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

MarketData read_market_csv(std::istream& in)
{
    const auto rows = read_rows(in);
    if (rows.size() < 2) {
        throw IoError("market data needs a header and at least one row");
    }
    MarketData out;
    const auto& header = rows.front();
    if (header.size() < 2) {
        throw IoError("market data needs a date column and at least one asset");
    }
    out.names.assign(header.begin() + 1, header.end());
    const auto d = static_cast<Eigen::Index>(out.names.size());
    out.values.resize(static_cast<Eigen::Index>(rows.size() - 1), d);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (static_cast<Eigen::Index>(row.size()) != d + 1) {
            throw IoError(where(r) + ": expected " + std::to_string(d + 1) + " fields");
        }
        if (!is_iso_date(row[0])) {
            throw IoError(where(r) + ": '" + row[0] + "' is not an ISO date");
        }
        if (!out.dates.empty() && !(out.dates.back() < row[0])) {
            throw IoError(where(r) + ": dates must be strictly increasing");
        }
        out.dates.push_back(row[0]);
        for (Eigen::Index j = 0; j < d; ++j) {
            try {
                out.values(static_cast<Eigen::Index>(r - 1), j) =
                    parse_double(row[static_cast<std::size_t>(j) + 1]);
            } catch (const IoError& e) {
                throw IoError(where(r) + ": " + e.what());
            }
        }
    }
    return out;
}

void write_market_csv(std::ostream& out, const MarketData& data)
{
    out << "date";
    for (const auto& n : data.names) {
        out << ',' << n;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < data.values.rows(); ++t) {
        out << data.dates[static_cast<std::size_t>(t)];
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
            out << ',' << format_double(data.values(t, j));
        }
        out << '\n';
    }
}

MarketData log_returns_from_prices(const MarketData& prices)
{
    if (prices.values.rows() < 2) {
        throw std::invalid_argument("need at least two price rows");
    }
    if (!(prices.values.array() > 0.0).all() || !prices.values.allFinite()) {
        throw std::invalid_argument("prices must be finite and positive");
    }
    const Eigen::Index n = prices.values.rows() - 1;
    MarketData out;
    out.names = prices.names;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.values = (prices.values.bottomRows(n).array() / prices.values.topRows(n).array()).log();
    return out;
}

NamedMatrix read_matrix_csv(std::istream& in)
{
    const auto rows = read_rows(in);
    if (rows.size() < 2) {
        throw IoError("matrix data needs a header and at least one row");
    }
    NamedMatrix out;
    out.names = rows.front();
    const auto d = static_cast<Eigen::Index>(out.names.size());
    out.values.resize(static_cast<Eigen::Index>(rows.size() - 1), d);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != d) {
            throw IoError(where(r) + ": expected " + std::to_string(d) + " fields");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            try {
                out.values(static_cast<Eigen::Index>(r - 1), j) =
                    parse_double(rows[r][static_cast<std::size_t>(j)]);
            } catch (const IoError& e) {
                throw IoError(where(r) + ": " + e.what());
            }
        }
    }
    return out;
}

std::vector<std::string> numbered_names(const std::string& prefix, Eigen::Index d)
{
    std::vector<std::string> out;
    for (Eigen::Index j = 1; j <= d; ++j) {
        out.push_back(prefix + std::to_string(j));
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      std::span<const std::string> names)
{
    const auto fallback = numbered_names("x", m.cols());
    if (names.empty()) {
        names = fallback;
    }
    if (static_cast<Eigen::Index>(names.size()) != m.cols()) {
        throw std::invalid_argument("column names do not match the matrix width");
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << (j ? "," : "") << names[j];
    }
    out << '\n';
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? "," : "") << format_double(m(t, j));
        }
        out << '\n';
    }
}

std::string level_tag(double level)
{
    return format_double(std::round(level * 1e6) / 1e4);
}

void write_var_series_csv(std::ostream& out, const VarSeries& series)
{
    series.validate();
    out << "date,realized";
    for (double p : series.levels) {
        out << ",var_" << level_tag(p);
    }
    for (double p : series.levels) {
        out << ",violation_" << level_tag(p);
    }
    out << ",status\n";
    for (std::size_t i = 0; i < series.n_days(); ++i) {
        const auto t = static_cast<Eigen::Index>(i);
        out << series.dates[i] << ',' << format_double(series.realized[t]);
        for (Eigen::Index k = 0; k < series.var.cols(); ++k) {
            out << ',' << format_double(series.var(t, k));
        }
        for (Eigen::Index k = 0; k < series.var.cols(); ++k) {
            const bool hit = std::isfinite(series.var(t, k)) && series.realized[t] < series.var(t, k);
            out << ',' << (hit ? 1 : 0);
        }
        out << ',' << (series.failures[i].empty() ? "ok" : sanitize(series.failures[i])) << '\n';
    }
}

VarSeries read_var_series_csv(std::istream& in)
{
    const auto rows = read_rows(in);
    if (rows.empty()) {
        throw IoError("empty VaR series");
    }
    const auto& header = rows.front();
    if (header.size() < 5 || (header.size() - 3) % 2 != 0 || header[0] != "date" ||
        header[1] != "realized" || header.back() != "status") {
        throw IoError("unexpected VaR series header");
    }
    const std::size_t n_levels = (header.size() - 3) / 2;
    VarSeries out;
    for (std::size_t k = 0; k < n_levels; ++k) {
        const std::string& col = header[2 + k];
        if (col.rfind("var_", 0) != 0) {
            throw IoError("unexpected VaR column '" + col + "'");
        }
        out.levels.push_back(parse_double(col.substr(4)) / 100.0);
    }
    const auto n = static_cast<Eigen::Index>(rows.size() - 1);
    out.var.resize(n, static_cast<Eigen::Index>(n_levels));
    out.realized.resize(n);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw IoError(where(r) + ": expected " + std::to_string(header.size()) + " fields");
        }
        const auto t = static_cast<Eigen::Index>(r - 1);
        out.dates.push_back(row[0]);
        out.realized[t] = parse_double(row[1]);
        for (std::size_t k = 0; k < n_levels; ++k) {
            out.var(t, static_cast<Eigen::Index>(k)) = parse_double(row[2 + k]);
        }
        out.failures.push_back(row.back() == "ok" ? std::string() : row.back());
    }
    out.validate();
    return out;
}

TruthTable truth_from_copula(const Vec& tau, std::span<const CopulaFamily> families)
{
    if (static_cast<Eigen::Index>(families.size()) != tau.size()) {
        throw std::invalid_argument("tau and family lengths differ");
    }
    TruthTable out;
    for (Eigen::Index j = 0; j < tau.size(); ++j) {
        out.emplace_back("tau_" + std::to_string(j + 1), format_double(tau[j]));
    }
    for (std::size_t j = 0; j < families.size(); ++j) {
        out.emplace_back("m_" + std::to_string(j + 1), std::string(family_name(families[j])));
    }
    return out;
}

TruthTable truth_from_params(const JointParams& params)
{
    params.validate();
    TruthTable out;
    auto add = [&](const std::string& name, const Vec& x) {
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            out.emplace_back(name + "_" + std::to_string(j + 1), format_double(x[j]));
        }
    };
    add("mu", params.mu);
    add("phi", params.phi);
    add("sigma", params.sigma);
    const TruthTable cop = truth_from_copula(params.tau, params.families);
    out.insert(out.end(), cop.begin(), cop.end());
    return out;
}

void write_truth_csv(std::ostream& out, const TruthTable& truth)
{
    out << "parameter,value\n";
    for (const auto& [k, v] : truth) {
        out << k << ',' << v << '\n';
    }
}

TruthTable read_truth_csv(std::istream& in)
{
    const auto rows = read_rows(in);
    if (rows.empty() || rows.front().size() != 2 || rows.front()[0] != "parameter") {
        throw IoError("unexpected truth header");
    }
    TruthTable out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) {
            throw IoError(where(r) + ": expected 2 fields");
        }
        out.emplace_back(rows[r][0], rows[r][1]);
    }
    return out;
}

}  // namespace fcsv
