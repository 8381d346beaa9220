#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Run configuration and the command implementations behind the command-line tool.

namespace fcsv::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kNumerical = 3,
    kIo = 4,
};

/// Bad configuration or input values.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::optional<std::string> scenario;
    std::optional<int> iters;
    std::optional<int> burn;
    std::string families = "base";
    std::vector<double> levels{0.90, 0.95};
    int window = 100;
    int refresh_iters = 300;
    int refresh_burn = 100;
    int per_draw = 10;
    int train_len = 1000;
    std::string out_dir = ".";
    int threads = 1;
    std::string input;
    std::string input_kind = "returns";  ///< prices | returns
    std::string model = "joint";         ///< joint | copula (fit on copula-scale data)
    std::string draws;                   ///< posterior draw CSV for forecast
    std::optional<int> n_obs;
    std::optional<int> replicates;
    bool full_scale = false;
    bool two_step = false;
    double eps_dependence = 0.2;
    int lmax_dependence = 40;
    double eps_margin = 0.1;
    int lmax_margin = 30;
    int checkgrad_points = 100;

    void validate() const;
};

/// Keys accepted in configuration files.
const std::vector<std::string>& config_keys();

/// Applies one key/value pair; unknown keys and unparsable values throw ValidationError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat "key = value" text with '#' comments.
void apply_config_text(RunConfig& cfg, std::istream& in);

/// Files produced by a command, written only after the computation finished.
class OutputBundle {
public:
    void add(std::string name, std::string content);
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    /// Creates out_dir if needed and writes every file (each through a temporary + rename).
    void commit(const std::string& out_dir) const;
    /// Exit status to report once the files are written (kNumerical for failed self-checks).
    ExitCode status() const { return status_; }
    void set_status(ExitCode s) { status_ = s; }

private:
    std::vector<std::pair<std::string, std::string>> files_;
    ExitCode status_ = kOk;
};

OutputBundle cmd_simulate(const RunConfig& cfg);
OutputBundle cmd_fit(const RunConfig& cfg);
OutputBundle cmd_forecast(const RunConfig& cfg);
OutputBundle cmd_backtest(const RunConfig& cfg);
OutputBundle cmd_replicate(const RunConfig& cfg);
/// Status kNumerical when any case fails.
OutputBundle cmd_checkgrad(const RunConfig& cfg, std::ostream& log);

/// Runs cfg.command, commits its files and maps failures to exit codes; messages go to err.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace fcsv::cli
