#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcsv/forecast.hpp"
#include "fcsv/joint_sampler.hpp"

// CSV readers and writers for market data, numeric matrices, VaR series and truths.

namespace fcsv {

/// Malformed or unreadable input.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Headered table with an ISO date (YYYY-MM-DD) in the first column.
struct MarketData {
    std::vector<std::string> dates;
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

bool is_iso_date(const std::string& s);

MarketData read_market_csv(std::istream& in);
void write_market_csv(std::ostream& out, const MarketData& data);

/// ln(P_t / P_{t-1}); the first date is dropped.
MarketData log_returns_from_prices(const MarketData& prices);

/// Header row followed by numeric rows.
struct NamedMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

NamedMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      std::span<const std::string> names = {});

/// Default column names prefix1..prefixd.
std::vector<std::string> numbered_names(const std::string& prefix, Eigen::Index d);

/// date, realized, var_<pct>... , violation_<pct>..., status
void write_var_series_csv(std::ostream& out, const VarSeries& series);
VarSeries read_var_series_csv(std::istream& in);

/// parameter,value rows; families are written by name.
using TruthTable = std::vector<std::pair<std::string, std::string>>;

TruthTable truth_from_params(const JointParams& params);
TruthTable truth_from_copula(const Vec& tau, std::span<const CopulaFamily> families);
void write_truth_csv(std::ostream& out, const TruthTable& truth);
TruthTable read_truth_csv(std::istream& in);

/// Column name for a VaR level, e.g. 0.95 -> "95", 0.975 -> "97.5".
std::string level_tag(double level);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& s);

}  // namespace fcsv
