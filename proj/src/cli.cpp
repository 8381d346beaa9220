#include "fcsv/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fcsv/diagnostics.hpp"
#include "fcsv/forecast.hpp"
#include "fcsv/gradcheck.hpp"
#include "fcsv/io.hpp"
#include "fcsv/replication.hpp"
#include "fcsv/special.hpp"

namespace fcsv::cli {

namespace {

constexpr const char* kBacktestPreset = "backtest6";

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    T x{};
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ValidationError("invalid value for " + key + ": '" + text + "'");
    }
    return x;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ValidationError("invalid boolean for " + key + ": '" + text + "'");
}

std::vector<double> parse_levels(const std::string& text)
{
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_number<double>("levels", item));
    }
    return out;
}

FamilySet family_set_of(const std::string& spec)
{
    if (spec == "base") {
        return FamilySet::base();
    }
    if (spec == "survival" || spec == "all") {
        return FamilySet::with_survival();
    }
    try {
        return FamilySet(parse_family_list(spec));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

bool is_joint_command(const std::string& c)
{
    return c == "fit" || c == "forecast" || c == "backtest";
}

FitConfig fit_config_of(const RunConfig& cfg)
{
    FitConfig f;
    f.n_iter = cfg.iters.value_or(2500);
    f.n_burn = cfg.burn.value_or(500);
    f.family_set = family_set_of(cfg.families);
    f.dependence_settings = HmcSettings{cfg.eps_dependence, cfg.lmax_dependence, {}};
    f.margin_settings = HmcSettings{cfg.eps_margin, cfg.lmax_margin, {}};
    f.seed = cfg.seed;
    f.threads = cfg.threads;
    return f;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct InputData {
    std::vector<std::string> dates;
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

// Market CSV when the first header cell is "date", plain matrix otherwise.
InputData load_input(const RunConfig& cfg)
{
    const std::string text = slurp(cfg.input);
    std::istringstream in(text);
    InputData out;
    const std::string first = trim(text.substr(0, text.find_first_of(",\n")));
    MarketData md;
    if (first == "date") {
        md = read_market_csv(in);
    } else {
        NamedMatrix m = read_matrix_csv(in);
        md.names = std::move(m.names);
        md.values = std::move(m.values);
    }
    if (cfg.input_kind == "prices") {
        if (md.dates.empty()) {
            for (Eigen::Index t = 0; t < md.values.rows(); ++t) {
                md.dates.push_back(std::to_string(t + 1));
            }
        }
        try {
            md = log_returns_from_prices(md);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }
    if (!md.values.allFinite()) {
        throw ValidationError("input contains non-finite values");
    }
    out.dates = std::move(md.dates);
    out.names = std::move(md.names);
    out.values = std::move(md.values);
    return out;
}

template <class Fn>
std::string render(Fn fn)
{
    std::ostringstream ss;
    fn(ss);
    return ss.str();
}

std::vector<double> column(const std::vector<JointDraw>& draws, const Vec JointDraw::*field,
                           Eigen::Index j)
{
    std::vector<double> out;
    out.reserve(draws.size());
    for (const auto& d : draws) {
        out.push_back((d.*field)[j]);
    }
    return out;
}

nlohmann::json family_frequencies(const std::vector<CopulaFamily>& picks)
{
    std::map<std::string, int> counts;
    for (auto f : picks) {
        ++counts[std::string(family_name(f))];
    }
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, c] : counts) {
        j[name] = static_cast<double>(c) / static_cast<double>(picks.size());
    }
    return j;
}

CopulaFamily most_frequent(const std::vector<CopulaFamily>& picks)
{
    std::array<int, 6> counts{};
    for (auto f : picks) {
        ++counts[static_cast<std::size_t>(f)];
    }
    return static_cast<CopulaFamily>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

void add_summary(OutputBundle& out, const std::vector<std::string>& names,
                 const std::vector<ChainSummary>& summaries, nlohmann::json extra)
{
    out.add("summary.csv", render([&](std::ostream& os) { write_summary_csv(os, names, summaries); }));
    nlohmann::json j = std::move(extra);
    j["parameters"] = nlohmann::json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        nlohmann::json p = summaries[i];
        p["name"] = names[i];
        j["parameters"].push_back(p);
    }
    out.add("summary.json", j.dump(2) + "\n");
}

OutputBundle fit_joint_outputs(const JointFit& fit, const std::vector<std::string>& asset_names)
{
    OutputBundle out;
    out.add("draws.csv", render([&](std::ostream& os) { write_draws_csv(os, fit.draws); }));
    const std::vector<double> levels{0.90, 0.95};
    std::vector<std::string> names;
    std::vector<ChainSummary> sums;
    const auto d = static_cast<Eigen::Index>(fit.draws.front().mu.size());
    const std::pair<const char*, const Vec JointDraw::*> fields[] = {
        {"mu", &JointDraw::mu}, {"phi", &JointDraw::phi}, {"sigma", &JointDraw::sigma},
        {"tau", &JointDraw::tau}};
    for (const auto& [prefix, field] : fields) {
        for (Eigen::Index j = 0; j < d; ++j) {
            names.push_back(std::string(prefix) + "_" + std::to_string(j + 1));
            sums.push_back(summarize_chain(column(fit.draws, field, j), levels));
        }
    }
    nlohmann::json extra;
    extra["assets"] = asset_names;
    extra["margin_acceptance"] = fit.margin_acceptance;
    extra["dependence_acceptance"] = fit.dependence_acceptance;
    extra["families"] = nlohmann::json::array();
    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<CopulaFamily> picks;
        for (const auto& dr : fit.draws) {
            picks.push_back(dr.families[static_cast<std::size_t>(j)]);
        }
        extra["families"].push_back({{"margin", j + 1},
                                     {"mode", std::string(family_name(modal_family(fit.draws, j)))},
                                     {"frequencies", family_frequencies(picks)}});
    }
    add_summary(out, names, sums, extra);
    return out;
}

OutputBundle fit_copula_outputs(const CopulaSelectionFit& fit)
{
    OutputBundle out;
    const auto d = fit.draws.front().delta.size();
    out.add("draws.csv", render([&](std::ostream& os) {
                for (Eigen::Index j = 0; j < d; ++j) {
                    os << (j ? "," : "") << "tau_" << j + 1;
                }
                for (Eigen::Index j = 0; j < d; ++j) {
                    os << ",m_" << j + 1;
                }
                os << '\n';
                for (std::size_t i = 0; i < fit.draws.size(); ++i) {
                    for (Eigen::Index j = 0; j < d; ++j) {
                        os << (j ? "," : "") << format_double(special::sigmoid(fit.draws[i].delta[j]));
                    }
                    for (auto f : fit.families[i]) {
                        os << ',' << family_name(f);
                    }
                    os << '\n';
                }
            }));
    const std::vector<double> levels{0.90, 0.95};
    std::vector<std::string> names;
    std::vector<ChainSummary> sums;
    nlohmann::json extra;
    extra["families"] = nlohmann::json::array();
    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<double> tau;
        std::vector<CopulaFamily> picks;
        for (std::size_t i = 0; i < fit.draws.size(); ++i) {
            tau.push_back(special::sigmoid(fit.draws[i].delta[j]));
            picks.push_back(fit.families[i][static_cast<std::size_t>(j)]);
        }
        names.push_back("tau_" + std::to_string(j + 1));
        sums.push_back(summarize_chain(tau, levels));
        extra["families"].push_back({{"margin", j + 1},
                                     {"mode", std::string(family_name(most_frequent(picks)))},
                                     {"frequencies", family_frequencies(picks)}});
    }
    add_summary(out, names, sums, extra);
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot write " + tmp);
        }
        f << content;
        f.flush();
        if (!f) {
            throw IoError("write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "seed",           "scenario",        "iters",           "burn",        "families",
        "levels",         "window",          "refresh_iters",   "refresh_burn", "per_draw",
        "train_len",      "out_dir",         "threads",         "input",       "input_kind",
        "model",          "draws",           "n_obs",           "replicates",  "full_scale",
        "two_step",       "eps_dependence",  "lmax_dependence", "eps_margin",  "lmax_margin",
        "checkgrad_points"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key_in, const std::string& value_in)
{
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "scenario") cfg.scenario = value;
    else if (key == "iters") cfg.iters = parse_number<int>(key, value);
    else if (key == "burn") cfg.burn = parse_number<int>(key, value);
    else if (key == "families") cfg.families = value;
    else if (key == "levels") cfg.levels = parse_levels(value);
    else if (key == "window") cfg.window = parse_number<int>(key, value);
    else if (key == "refresh_iters") cfg.refresh_iters = parse_number<int>(key, value);
    else if (key == "refresh_burn") cfg.refresh_burn = parse_number<int>(key, value);
    else if (key == "per_draw") cfg.per_draw = parse_number<int>(key, value);
    else if (key == "train_len") cfg.train_len = parse_number<int>(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "input") cfg.input = value;
    else if (key == "input_kind") cfg.input_kind = value;
    else if (key == "model") cfg.model = value;
    else if (key == "draws") cfg.draws = value;
    else if (key == "n_obs") cfg.n_obs = parse_number<int>(key, value);
    else if (key == "replicates") cfg.replicates = parse_number<int>(key, value);
    else if (key == "full_scale") cfg.full_scale = parse_bool(key, value);
    else if (key == "two_step") cfg.two_step = parse_bool(key, value);
    else if (key == "eps_dependence") cfg.eps_dependence = parse_number<double>(key, value);
    else if (key == "lmax_dependence") cfg.lmax_dependence = parse_number<int>(key, value);
    else if (key == "eps_margin") cfg.eps_margin = parse_number<double>(key, value);
    else if (key == "lmax_margin") cfg.lmax_margin = parse_number<int>(key, value);
    else if (key == "checkgrad_points") cfg.checkgrad_points = parse_number<int>(key, value);
    else throw ValidationError("unknown configuration key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, std::istream& in)
{
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(n) + ": expected key = value");
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void RunConfig::validate() const
{
    static const std::vector<std::string> commands{"simulate", "fit",       "forecast",
                                                   "backtest", "replicate", "checkgrad"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
        throw ValidationError("unknown command '" + command + "'");
    }
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) {
            throw ValidationError(msg);
        }
    };
    require(iters.value_or(1) >= 1, "iters must be positive");
    require(burn.value_or(0) >= 0, "burn must be nonnegative");
    if (iters && burn) {
        require(*iters > *burn, "iters must exceed burn");
    }
    require(!levels.empty(), "levels must not be empty");
    for (double p : levels) {
        require(p > 0.0 && p < 1.0, "levels must lie in (0, 1)");
    }
    require(window >= 2, "window must be at least 2");
    require(refresh_burn >= 0 && refresh_iters > refresh_burn, "need refresh_iters > refresh_burn >= 0");
    require(per_draw >= 1, "per_draw must be positive");
    require(train_len >= window, "train_len must be at least the window");
    require(threads >= 1, "threads must be at least 1");
    require(input_kind == "prices" || input_kind == "returns", "input_kind must be prices or returns");
    require(model == "joint" || model == "copula", "model must be joint or copula");
    require(eps_dependence > 0.0 && eps_margin > 0.0, "HMC step sizes must be positive");
    require(lmax_dependence >= 1 && lmax_margin >= 1, "HMC path lengths must be positive");
    require(n_obs.value_or(2) >= 2, "n_obs must be at least 2");
    require(replicates.value_or(1) >= 1, "replicates must be positive");
    require(checkgrad_points >= 1, "checkgrad_points must be positive");
    family_set_of(families);

    if (command == "simulate" || command == "replicate") {
        require(scenario.has_value(), command + " needs a scenario");
        const bool preset = parse_scenario(*scenario).has_value();
        require(preset || (command == "simulate" && *scenario == kBacktestPreset),
                "unknown scenario '" + *scenario + "'");
    }
    if (is_joint_command(command)) {
        require(!input.empty() || (command == "forecast" && !draws.empty()),
                command + " needs an input file");
        const int kept = iters.value_or(2500) - burn.value_or(500);
        require(kept >= 30, "need at least 30 retained draws (iters - burn)");
    }
}

void OutputBundle::add(std::string name, std::string content)
{
    files_.emplace_back(std::move(name), std::move(content));
}

void OutputBundle::commit(const std::string& out_dir) const
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir + ": " + ec.message());
    }
    for (const auto& [name, content] : files_) {
        write_file(std::filesystem::path(out_dir) / name, content);
    }
}

OutputBundle cmd_simulate(const RunConfig& cfg)
{
    Rng rng = make_stream(cfg.seed, 0);
    OutputBundle out;
    const std::string name = *cfg.scenario;
    const auto sc = parse_scenario(name);
    if (sc && is_copula_scenario(*sc)) {
        const CopulaScenario cs = copula_scenario(*sc);
        const Eigen::Index n = cfg.n_obs.value_or(static_cast<int>(scenario_n_obs(*sc)));
        Vec v;
        const Eigen::MatrixXd u = simulate_factor_copula(cs.families, cs.tau, n, rng, &v);
        const auto names = numbered_names("u", u.cols());
        out.add("data.csv", render([&](std::ostream& os) { write_matrix_csv(os, u, names); }));
        out.add("truth.csv", render([&](std::ostream& os) {
                    write_truth_csv(os, truth_from_copula(cs.tau, cs.families));
                }));
        const std::vector<std::string> vname{"v"};
        out.add("factor.csv", render([&](std::ostream& os) { write_matrix_csv(os, v, vname); }));
        return out;
    }
    const JointParams params = sc ? joint_scenario(*sc) : backtest_params();
    const Eigen::Index n = cfg.n_obs.value_or(sc ? static_cast<int>(scenario_n_obs(*sc)) : 1500);
    const SimulatedData sim = simulate_joint(params, n, rng);
    const auto names = numbered_names("z", sim.z.cols());
    out.add("data.csv", render([&](std::ostream& os) { write_matrix_csv(os, sim.z, names); }));
    out.add("truth.csv",
            render([&](std::ostream& os) { write_truth_csv(os, truth_from_params(params)); }));
    const auto s_names = numbered_names("s", sim.s.cols());
    out.add("log_variance.csv", render([&](std::ostream& os) { write_matrix_csv(os, sim.s, s_names); }));
    const std::vector<std::string> vname{"v"};
    out.add("factor.csv", render([&](std::ostream& os) { write_matrix_csv(os, sim.v, vname); }));
    return out;
}

OutputBundle cmd_fit(const RunConfig& cfg)
{
    const InputData data = load_input(cfg);
    const FitConfig config = fit_config_of(cfg);
    if (cfg.model == "copula") {
        if ((data.values.array() < 0.0).any() || (data.values.array() > 1.0).any()) {
            throw ValidationError("copula-scale data must lie in [0, 1]");
        }
        return fit_copula_outputs(fit_copula_selecting(CopulaData(data.values), config));
    }
    return fit_joint_outputs(fit_joint(JointData(data.values), config), data.names);
}

OutputBundle cmd_forecast(const RunConfig& cfg)
{
    std::vector<JointDraw> posterior;
    std::vector<std::string> names;
    if (!cfg.draws.empty()) {
        std::istringstream in(slurp(cfg.draws));
        posterior = read_draws_csv(in);
        if (posterior.empty()) {
            throw ValidationError("draw file holds no draws");
        }
        names = numbered_names("z", posterior.front().mu.size());
    } else {
        const InputData data = load_input(cfg);
        posterior = fit_joint(JointData(data.values), fit_config_of(cfg)).draws;
        names = data.names;
    }
    Rng rng = make_stream(cfg.seed, 1);
    const ForecastSet set = predictive_draws(posterior, rng, cfg.per_draw);
    const Vec w = equal_weights(set.dim());
    OutputBundle out;
    out.add("forecast.csv", render([&](std::ostream& os) { write_matrix_csv(os, set.draws(), names); }));
    out.add("var.csv", render([&](std::ostream& os) {
                os << "level,var\n";
                for (double p : cfg.levels) {
                    os << format_double(p) << ',' << format_double(portfolio_var(set, w, p)) << '\n';
                }
            }));
    return out;
}

OutputBundle cmd_backtest(const RunConfig& cfg)
{
    const InputData data = load_input(cfg);
    if (cfg.train_len >= data.values.rows()) {
        throw ValidationError("train_len must be smaller than the number of return rows");
    }
    if (data.values.rows() - cfg.train_len < 10) {
        throw ValidationError("need at least 10 forecast days after the training period");
    }
    const FitConfig config = fit_config_of(cfg);
    const RollingPolicy policy{cfg.window, cfg.refresh_iters, cfg.refresh_burn, cfg.per_draw};
    OutputBundle out;
    auto emit = [&](const VarSeries& vs, const std::string& suffix) {
        std::vector<BacktestReport> reports;
        for (std::size_t k = 0; k < vs.levels.size(); ++k) {
            reports.push_back(christoffersen_cc(vs.violations(k), vs.levels[k]));
        }
        out.add("var_series" + suffix + ".csv",
                render([&](std::ostream& os) { write_var_series_csv(os, vs); }));
        out.add("backtest" + suffix + ".csv",
                render([&](std::ostream& os) { write_backtest_csv(os, reports); }));
        nlohmann::json j;
        j["reports"] = reports;
        j["failed_days"] = std::count_if(vs.failures.begin(), vs.failures.end(),
                                         [](const std::string& f) { return !f.empty(); });
        out.add("backtest" + suffix + ".json", j.dump(2) + "\n");
    };
    Rng rng = make_stream(cfg.seed, 1);
    emit(rolling_backtest(data.values, cfg.train_len, policy, config, cfg.levels, rng, Vec(), data.dates),
         "");
    if (cfg.two_step) {
        Rng rng2 = make_stream(cfg.seed, 2);
        emit(rolling_backtest_two_step(data.values, cfg.train_len, policy, config, cfg.levels, rng2,
                                       Vec(), data.dates),
             "_two_step");
    }
    return out;
}

OutputBundle cmd_replicate(const RunConfig& cfg)
{
    const Scenario sc = *parse_scenario(*cfg.scenario);
    StudyOptions opt;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    opt.dependence_settings = HmcSettings{cfg.eps_dependence, cfg.lmax_dependence, {}};
    opt.margin_settings = HmcSettings{cfg.eps_margin, cfg.lmax_margin, {}};
    opt.family_set = family_set_of(cfg.families);
    std::vector<ComparisonRow> rows;
    if (is_copula_scenario(sc)) {
        opt.replicates = cfg.replicates.value_or(cfg.full_scale ? 100 : 20);
        opt.n_iter = cfg.iters.value_or(11000);
        opt.n_burn = cfg.burn.value_or(1000);
        rows = compare(run_copula_study(sc, opt));
    } else {
        opt.replicates = cfg.replicates.value_or(cfg.full_scale ? 100 : 10);
        opt.n_iter = cfg.iters.value_or(2500);
        opt.n_burn = cfg.burn.value_or(500);
        rows = compare(run_joint_study(sc, opt));
    }
    const std::string title = std::string(scenario_name(sc)) + " (" +
                              std::to_string(opt.replicates) + " replicates, " +
                              std::to_string(opt.n_iter) + "/" + std::to_string(opt.n_burn) + ")";
    OutputBundle out;
    out.add("comparison.md",
            render([&](std::ostream& os) { write_comparison_markdown(os, title, rows); }));
    out.add("comparison.csv", render([&](std::ostream& os) { write_comparison_csv(os, rows); }));
    return out;
}

OutputBundle cmd_checkgrad(const RunConfig& cfg, std::ostream& log)
{
    GradCheckOptions opt;
    opt.points = cfg.checkgrad_points;
    opt.seed = cfg.seed;
    const auto cases = run_gradient_checks(opt);
    OutputBundle out;
    double worst = 0.0;
    bool ok = true;
    std::ostringstream csv;
    csv << "case,points,max_rel_err,passed\n";
    for (const auto& c : cases) {
        log << std::left << std::setw(32) << c.name << " points=" << c.points
            << " max_rel_err=" << std::scientific << std::setprecision(3) << c.max_rel_err
            << std::defaultfloat << (c.passed ? "  ok" : "  FAIL") << '\n';
        csv << c.name << ',' << c.points << ',' << format_double(c.max_rel_err) << ','
            << (c.passed ? 1 : 0) << '\n';
        worst = std::max(worst, c.max_rel_err);
        ok = ok && c.passed;
    }
    log << "max relative error " << std::scientific << std::setprecision(3) << worst
        << std::defaultfloat << " (tolerance " << opt.tolerance << ")\n";
    out.add("gradcheck.csv", csv.str());
    if (!ok) {
        out.set_status(kNumerical);
    }
    return out;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err)
{
    try {
        cfg.validate();
        OutputBundle out;
        if (cfg.command == "simulate") out = cmd_simulate(cfg);
        else if (cfg.command == "fit") out = cmd_fit(cfg);
        else if (cfg.command == "forecast") out = cmd_forecast(cfg);
        else if (cfg.command == "backtest") out = cmd_backtest(cfg);
        else if (cfg.command == "replicate") out = cmd_replicate(cfg);
        else out = cmd_checkgrad(cfg, log);
        out.commit(cfg.out_dir);
        for (const auto& [name, content] : out.files()) {
            log << "wrote " << (std::filesystem::path(cfg.out_dir) / name).string() << '\n';
        }
        if (out.status() != kOk) {
            err << "error: numerical check failed\n";
        }
        return out.status();
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace fcsv::cli
