#include "fcsv/replication.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fcsv/factor_copula.hpp"
#include "fcsv/special.hpp"

namespace fcsv {

namespace {

constexpr double kLevels[] = {0.90, 0.95};

Vec vec_of(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

// Runs body(r) for r in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(int n, int threads, F body)
{
    if (threads <= 1 || n <= 1) {
        for (int r = 0; r < n; ++r) {
            body(r);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < std::min(threads, n); ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < n; r = next++) {
                    try {
                        body(r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

ChainSummary summarize(std::span<const double> chain)
{
    return summarize_chain(chain, kLevels);
}

void add_score(ParameterStudy& p, const ChainSummary& s, double truth)
{
    const ChainSummary one[] = {s};
    const double t[] = {truth};
    p.at90.push_back(score_against_truth(one, t, 0.90).front());
    p.at95.push_back(score_against_truth(one, t, 0.95).front());
    p.ess.push_back(s.ess);
}

template <class Get>
double mean_over(const std::vector<ParameterScore>& xs, Get get)
{
    if (xs.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& x : xs) {
        total += get(x);
    }
    return total / static_cast<double>(xs.size());
}

ScoreAverages pooled(const std::vector<ParameterStudy>& ps, double level)
{
    std::vector<ParameterScore> all;
    for (const auto& p : ps) {
        const auto& src = level == 0.90 ? p.at90 : p.at95;
        all.insert(all.end(), src.begin(), src.end());
    }
    return average_scores(all);
}

double pooled_ess(const std::vector<ParameterStudy>& ps)
{
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& p : ps) {
        total += std::accumulate(p.ess.begin(), p.ess.end(), 0.0);
        n += p.ess.size();
    }
    return n ? total / static_cast<double>(n) : 0.0;
}

void check_options(const StudyOptions& o)
{
    if (o.replicates < 1) {
        throw std::invalid_argument("need at least one replicate");
    }
    if (o.n_burn < 0 || o.n_iter <= o.n_burn || o.n_iter - o.n_burn < 30) {
        throw std::invalid_argument("need n_iter - n_burn >= 30 retained draws");
    }
    if (o.threads < 1) {
        throw std::invalid_argument("threads must be at least 1");
    }
}

// Published values for the comparison tables, keyed by "stat(parameter)".
using RefMap = std::map<std::string, double>;

void add_refs(RefMap& m, const std::string& stat, const std::string& name,
              std::initializer_list<double> values, int first = 1)
{
    int j = first;
    for (double x : values) {
        m[stat + "(" + name + "_" + std::to_string(j++) + ")"] = x;
    }
}

void add_v_refs(RefMap& m, const std::string& stat, std::initializer_list<double> values)
{
    std::size_t k = 0;
    for (double x : values) {
        m[stat + "(v_" + std::to_string(kTrackedV[k++]) + ")"] = x;
    }
}

RefMap scenario1_refs()
{
    RefMap m;
    add_refs(m, "MSE", "mu", {0.0027, 0.0038, 0.0059, 0.0107, 0.0851});
    add_refs(m, "CI90", "mu", {0.91, 0.86, 0.92, 0.92, 0.82});
    add_refs(m, "CI95", "mu", {0.95, 0.90, 0.96, 0.94, 0.87});
    add_refs(m, "ESS", "mu", {1022, 666, 761, 942, 505});
    add_refs(m, "MSE", "phi", {0.0362, 0.0408, 0.0059, 0.0017, 0.0003});
    add_refs(m, "CI90", "phi", {0.97, 0.86, 0.89, 0.90, 0.83});
    add_refs(m, "CI95", "phi", {0.99, 0.94, 0.94, 0.93, 0.89});
    add_refs(m, "ESS", "phi", {644, 433, 399, 461, 325});
    add_refs(m, "MSE", "sigma", {0.0077, 0.0055, 0.0037, 0.0024, 0.0026});
    add_refs(m, "CI90", "sigma", {0.95, 0.93, 0.91, 0.91, 0.81});
    add_refs(m, "CI95", "sigma", {0.98, 0.93, 0.93, 0.97, 0.88});
    add_refs(m, "ESS", "sigma", {391, 368, 326, 360, 255});
    add_refs(m, "MSE", "tau", {0.0094, 0.0164, 0.0255, 0.0364, 0.0503});
    add_refs(m, "CI90", "tau", {0.78, 0.79, 0.68, 0.79, 0.72});
    add_refs(m, "CI95", "tau", {0.84, 0.85, 0.77, 0.81, 0.74});
    add_refs(m, "ESS", "tau", {879, 770, 528, 480, 280});
    add_refs(m, "MSE", "s_300", {0.0564, 0.0892, 0.2234, 0.1836, 0.2132});
    add_refs(m, "CI90", "s_300", {0.94, 0.88, 0.93, 0.91, 0.94});
    add_refs(m, "CI95", "s_300", {0.98, 0.95, 0.95, 0.96, 0.97});
    add_refs(m, "ESS", "s_300", {1448, 433, 1433, 1343, 1334});
    add_v_refs(m, "MSE", {0.0239, 0.0241, 0.0283, 0.0222, 0.0202});
    add_v_refs(m, "CI90", {0.86, 0.91, 0.83, 0.86, 0.84});
    add_v_refs(m, "CI95", {0.91, 0.94, 0.88, 0.88, 0.89});
    add_v_refs(m, "ESS", {997, 1104, 1036, 1111, 1085});
    add_refs(m, "correct", "m", {0.94, 0.90, 0.87, 0.77, 0.66});
    return m;
}

RefMap scenario2_refs()
{
    RefMap m;
    add_refs(m, "MSE", "mu",
             {0.0033, 0.0031, 0.0050, 0.0097, 0.0560, 0.0031, 0.0036, 0.0068, 0.0121, 0.0629});
    add_refs(m, "CI90", "mu", {0.88, 0.90, 0.93, 0.90, 0.92, 0.88, 0.83, 0.87, 0.90, 0.86});
    add_refs(m, "CI95", "mu", {0.95, 0.97, 0.97, 0.94, 0.98, 0.96, 0.93, 0.92, 0.94, 0.89});
    add_refs(m, "ESS", "mu", {779, 499, 616, 695, 465, 781, 548, 555, 659, 457});
    add_refs(m, "MSE", "phi",
             {0.0462, 0.0239, 0.0038, 0.0009, 0.0003, 0.0321, 0.0340, 0.0035, 0.0010, 0.0003});
    add_refs(m, "CI90", "phi", {0.98, 0.95, 0.83, 0.90, 0.81, 0.98, 0.96, 0.90, 0.92, 0.82});
    add_refs(m, "CI95", "phi", {0.98, 0.98, 0.89, 0.96, 0.92, 1.00, 0.99, 0.92, 0.97, 0.92});
    add_refs(m, "ESS", "phi", {480, 385, 362, 402, 319, 478, 412, 369, 393, 325});
    add_refs(m, "MSE", "sigma",
             {0.0082, 0.0047, 0.0028, 0.0018, 0.0026, 0.0068, 0.0053, 0.0028, 0.0018, 0.0027});
    add_refs(m, "CI90", "sigma", {0.95, 0.97, 0.85, 0.89, 0.81, 0.96, 0.98, 0.91, 0.93, 0.84});
    add_refs(m, "CI95", "sigma", {0.97, 0.99, 0.95, 0.96, 0.89, 0.98, 0.99, 0.96, 0.96, 0.90});
    add_refs(m, "ESS", "sigma", {283, 297, 298, 300, 242, 288, 317, 295, 295, 236});
    add_refs(m, "MSE", "tau",
             {0.0112, 0.0195, 0.0305, 0.0440, 0.0590, 0.0112, 0.0195, 0.0309, 0.0435, 0.0590});
    add_refs(m, "CI90", "tau", {0.78, 0.85, 0.77, 0.74, 0.78, 0.79, 0.79, 0.81, 0.77, 0.76});
    add_refs(m, "CI95", "tau", {0.83, 0.85, 0.84, 0.80, 0.82, 0.82, 0.87, 0.84, 0.81, 0.80});
    add_refs(m, "ESS", "tau", {520, 474, 279, 261, 181, 498, 459, 275, 253, 164});
    add_refs(m, "MSE", "s_300",
             {0.0815, 0.0915, 0.1839, 0.1536, 0.2546, 0.0877, 0.0941, 0.1639, 0.1711, 0.2437});
    add_refs(m, "CI90", "s_300", {0.86, 0.84, 0.92, 0.91, 0.87, 0.85, 0.83, 0.92, 0.91, 0.90});
    add_refs(m, "CI95", "s_300", {0.91, 0.93, 0.94, 0.95, 0.95, 0.94, 0.92, 0.96, 0.96, 0.94});
    add_refs(m, "ESS", "s_300", {1073, 1074, 1043, 1007, 620, 1087, 1100, 1010, 999, 628});
    add_v_refs(m, "MSE", {0.0269, 0.0263, 0.0190, 0.0157, 0.0146});
    add_v_refs(m, "CI90", {0.82, 0.91, 0.82, 0.90, 0.85});
    add_v_refs(m, "CI95", {0.88, 0.93, 0.85, 0.95, 0.90});
    add_v_refs(m, "ESS", {393, 406, 395, 405, 406});
    add_refs(m, "correct", "m", {0.94, 0.89, 0.92, 0.93, 0.78, 0.91, 0.88, 0.91, 0.91, 0.81});
    return m;
}

// HMC column of the copula-only comparison: tau then V, each MAD, MSE, ESS/min, CI90, CI95.
RefMap copula_refs(Scenario s)
{
    struct Row {
        double mad, mse, ess_min, ci90, ci95;
    };
    Row tau{}, v{};
    switch (s) {
    case Scenario::LowTau:
        tau = {0.0564, 0.0059, 92, 0.94, 0.98};
        v = {0.2158, 0.0716, 246, 0.88, 0.94};
        break;
    case Scenario::HighTau:
        tau = {0.0201, 0.0007, 268, 0.90, 0.94};
        v = {0.0502, 0.0046, 278, 0.91, 0.95};
        break;
    case Scenario::MixedTau:
        tau = {0.0340, 0.0019, 132, 0.89, 0.93};
        v = {0.0684, 0.0082, 210, 0.85, 0.93};
        break;
    default:
        throw std::invalid_argument("not a copula scenario");
    }
    RefMap m;
    for (const auto& [name, row] : {std::pair{"tau", tau}, std::pair{"v", v}}) {
        const std::string n = name;
        m["MAD(" + n + ")"] = row.mad;
        m["MSE(" + n + ")"] = row.mse;
        m["ESS/min(" + n + ")"] = row.ess_min;
        m["CI90(" + n + ")"] = row.ci90;
        m["CI95(" + n + ")"] = row.ci95;
    }
    return m;
}

std::optional<double> lookup(const RefMap& m, const std::string& key)
{
    const auto it = m.find(key);
    return it == m.end() ? std::nullopt : std::optional<double>(it->second);
}

}  // namespace

std::string_view scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::LowTau: return "low-tau";
    case Scenario::HighTau: return "high-tau";
    case Scenario::MixedTau: return "mixed-tau";
    case Scenario::Scenario1: return "scenario1";
    case Scenario::Scenario2: return "scenario2";
    }
    return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name)
{
    for (auto s : {Scenario::LowTau, Scenario::HighTau, Scenario::MixedTau, Scenario::Scenario1,
                   Scenario::Scenario2}) {
        if (scenario_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

bool is_copula_scenario(Scenario s)
{
    return s == Scenario::LowTau || s == Scenario::HighTau || s == Scenario::MixedTau;
}

Eigen::Index scenario_n_obs(Scenario s)
{
    return is_copula_scenario(s) ? 200 : 1000;
}

CopulaScenario copula_scenario(Scenario s)
{
    CopulaScenario out;
    switch (s) {
    case Scenario::LowTau: out.tau = vec_of({0.10, 0.12, 0.15, 0.18, 0.20}); break;
    case Scenario::HighTau: out.tau = vec_of({0.50, 0.57, 0.65, 0.73, 0.80}); break;
    case Scenario::MixedTau: out.tau = vec_of({0.10, 0.28, 0.45, 0.62, 0.80}); break;
    default: throw std::invalid_argument("not a copula scenario");
    }
    out.families.assign(5, CopulaFamily::Gumbel);
    return out;
}

JointParams joint_scenario(Scenario s)
{
    JointParams p;
    p.mu = vec_of({-6, -6, -7, -7, -8});
    p.phi = vec_of({0.7, 0.8, 0.85, 0.9, 0.95});
    p.sigma = vec_of({0.2, 0.2, 0.3, 0.3, 0.4});
    p.tau = vec_of({0.3, 0.4, 0.5, 0.6, 0.7});
    p.families = {CopulaFamily::Gaussian, CopulaFamily::StudentT4, CopulaFamily::Clayton,
                  CopulaFamily::Gumbel, CopulaFamily::Gaussian};
    if (s == Scenario::Scenario1) {
        return p;
    }
    if (s != Scenario::Scenario2) {
        throw std::invalid_argument("not a joint scenario");
    }
    auto twice = [](const Vec& x) {
        Vec y(2 * x.size());
        y << x, x;
        return y;
    };
    JointParams q{twice(p.mu), twice(p.phi), twice(p.sigma), twice(p.tau), p.families};
    q.families.insert(q.families.end(), p.families.begin(), p.families.end());
    return q;
}

JointParams backtest_params()
{
    JointParams p;
    p.mu = vec_of({-6, -6, -7, -7, -8, -7});
    p.phi = vec_of({0.7, 0.8, 0.85, 0.9, 0.95, 0.9});
    p.sigma = vec_of({0.2, 0.2, 0.3, 0.3, 0.4, 0.3});
    p.tau = vec_of({0.3, 0.4, 0.5, 0.6, 0.7, 0.5});
    p.families = {CopulaFamily::Gaussian, CopulaFamily::StudentT4, CopulaFamily::Clayton,
                  CopulaFamily::Gumbel,   CopulaFamily::Gaussian,  CopulaFamily::Clayton};
    return p;
}

double ParameterStudy::mse() const
{
    return mean_over(at90, [](const ParameterScore& s) { return s.sq_err; });
}

double ParameterStudy::mad() const
{
    return mean_over(at90, [](const ParameterScore& s) { return s.abs_dev; });
}

double ParameterStudy::coverage90() const
{
    return mean_over(at90, [](const ParameterScore& s) { return s.covered ? 1.0 : 0.0; });
}

double ParameterStudy::coverage95() const
{
    return mean_over(at95, [](const ParameterScore& s) { return s.covered ? 1.0 : 0.0; });
}

double ParameterStudy::mean_ess() const
{
    return ess.empty() ? 0.0
                       : std::accumulate(ess.begin(), ess.end(), 0.0) /
                             static_cast<double>(ess.size());
}

ScoreAverages CopulaStudy::tau_averages(double level) const
{
    return pooled(tau, level);
}

ScoreAverages CopulaStudy::v_averages(double level) const
{
    return pooled(v, level);
}

double CopulaStudy::tau_ess_per_minute() const
{
    return seconds > 0 ? pooled_ess(tau) * options.replicates / (seconds / 60.0) : 0.0;
}

double CopulaStudy::v_ess_per_minute() const
{
    return seconds > 0 ? pooled_ess(v) * options.replicates / (seconds / 60.0) : 0.0;
}

CopulaStudy run_copula_study(Scenario scenario, const StudyOptions& options)
{
    check_options(options);
    const CopulaScenario sc = copula_scenario(scenario);
    const Eigen::Index n_obs = scenario_n_obs(scenario);
    const Eigen::Index d = sc.tau.size();

    struct Rep {
        std::vector<ChainSummary> tau, v;
        Vec v_true;
        double seconds = 0.0;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(options.replicates));
    parallel_for(options.replicates, options.threads, [&](int r) {
        Rng sim = make_stream(options.seed, 2 * static_cast<std::uint64_t>(r));
        Rng chain = make_stream(options.seed, 2 * static_cast<std::uint64_t>(r) + 1);
        Rep& rep = reps[static_cast<std::size_t>(r)];
        const CopulaData data(simulate_factor_copula(sc.families, sc.tau, n_obs, sim, &rep.v_true));
        const auto t0 = std::chrono::steady_clock::now();
        const auto draws = fit(data, sc.families, options.dependence_settings, options.n_iter,
                               options.n_burn, chain);
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::vector<double> buf(draws.size());
        for (Eigen::Index j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < draws.size(); ++i) {
                buf[i] = special::sigmoid(draws[i].delta[j]);
            }
            rep.tau.push_back(summarize(buf));
        }
        for (Eigen::Index t = 0; t < n_obs; ++t) {
            for (std::size_t i = 0; i < draws.size(); ++i) {
                buf[i] = special::sigmoid(draws[i].w[t]);
            }
            rep.v.push_back(summarize(buf));
        }
    });

    CopulaStudy out;
    out.scenario = scenario;
    out.options = options;
    for (Eigen::Index j = 0; j < d; ++j) {
        out.tau.push_back({"tau_" + std::to_string(j + 1), {}, {}, {}});
    }
    for (Eigen::Index t = 0; t < n_obs; ++t) {
        out.v.push_back({"v_" + std::to_string(t + 1), {}, {}, {}});
    }
    for (const auto& rep : reps) {
        for (Eigen::Index j = 0; j < d; ++j) {
            add_score(out.tau[static_cast<std::size_t>(j)], rep.tau[static_cast<std::size_t>(j)],
                      sc.tau[j]);
        }
        for (Eigen::Index t = 0; t < n_obs; ++t) {
            add_score(out.v[static_cast<std::size_t>(t)], rep.v[static_cast<std::size_t>(t)],
                      rep.v_true[t]);
        }
        out.seconds += rep.seconds;
    }
    return out;
}

const ParameterStudy& JointStudy::find(const std::string& name) const
{
    for (const auto& p : params) {
        if (p.name == name) {
            return p;
        }
    }
    throw std::out_of_range("no parameter named " + name);
}

int JointStudy::family_hits(std::size_t j) const
{
    int hits = 0;
    for (const auto& fams : selected) {
        hits += fams.at(j) == true_families.at(j) ? 1 : 0;
    }
    return hits;
}

JointStudy run_joint_study(Scenario scenario, const StudyOptions& options)
{
    check_options(options);
    const JointParams truth = joint_scenario(scenario);
    const Eigen::Index n_obs = scenario_n_obs(scenario);
    const Eigen::Index d = truth.dim();

    std::vector<int> track = kTrackedV;
    track.insert(std::lower_bound(track.begin(), track.end(), kTrackedS), kTrackedS);
    const auto s_row = static_cast<Eigen::Index>(
        std::find(track.begin(), track.end(), kTrackedS) - track.begin());

    struct Rep {
        std::vector<std::pair<ChainSummary, double>> scored;  // in JointStudy::params order
        std::vector<CopulaFamily> families;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(options.replicates));
    parallel_for(options.replicates, options.threads, [&](int r) {
        Rng sim = make_stream(options.seed, 2 * static_cast<std::uint64_t>(r));
        const SimulatedData data = simulate_joint(truth, n_obs, sim);
        FitConfig config;
        config.n_iter = options.n_iter;
        config.n_burn = options.n_burn;
        config.family_set = options.family_set;
        config.dependence_settings = options.dependence_settings;
        config.margin_settings = options.margin_settings;
        config.seed = make_stream(options.seed, 2 * static_cast<std::uint64_t>(r) + 1)();
        config.track_times = track;
        const JointFit fit = fit_joint(JointData(data.z), config);

        Rep& rep = reps[static_cast<std::size_t>(r)];
        std::vector<double> buf(fit.draws.size());
        auto add = [&](auto get, double truth_value) {
            for (std::size_t i = 0; i < fit.draws.size(); ++i) {
                buf[i] = get(fit.draws[i]);
            }
            rep.scored.emplace_back(summarize(buf), truth_value);
        };
        for (Eigen::Index j = 0; j < d; ++j) {
            add([j](const JointDraw& x) { return x.mu[j]; }, truth.mu[j]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            add([j](const JointDraw& x) { return x.phi[j]; }, truth.phi[j]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            add([j](const JointDraw& x) { return x.sigma[j]; }, truth.sigma[j]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            add([j](const JointDraw& x) { return x.tau[j]; }, truth.tau[j]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            add([j, s_row](const JointDraw& x) { return x.s_tracked(s_row, j); },
                data.s(kTrackedS, j));
        }
        for (int t : kTrackedV) {
            const auto k = static_cast<Eigen::Index>(std::find(track.begin(), track.end(), t) -
                                                     track.begin());
            add([k](const JointDraw& x) { return x.v_tracked[k]; }, data.v[t - 1]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            rep.families.push_back(modal_family(fit.draws, j));
        }
    });

    JointStudy out;
    out.scenario = scenario;
    out.options = options;
    out.true_families = truth.families;
    for (const char* name : {"mu", "phi", "sigma", "tau", "s_300"}) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out.params.push_back({std::string(name) + "_" + std::to_string(j + 1), {}, {}, {}});
        }
    }
    for (int t : kTrackedV) {
        out.params.push_back({"v_" + std::to_string(t), {}, {}, {}});
    }
    for (const auto& rep : reps) {
        for (std::size_t i = 0; i < rep.scored.size(); ++i) {
            add_score(out.params[i], rep.scored[i].first, rep.scored[i].second);
        }
        out.selected.push_back(rep.families);
    }
    return out;
}

std::vector<ComparisonRow> compare(const CopulaStudy& study)
{
    const RefMap refs = copula_refs(study.scenario);
    std::vector<ComparisonRow> rows;
    auto block = [&](const std::string& name, const std::vector<ParameterStudy>& ps, double ess_min) {
        const ScoreAverages a90 = pooled(ps, 0.90);
        const ScoreAverages a95 = pooled(ps, 0.95);
        const std::pair<std::string, double> vals[] = {{"MAD", a90.mad},
                                                       {"MSE", a90.mse},
                                                       {"ESS/min", ess_min},
                                                       {"CI90", a90.coverage},
                                                       {"CI95", a95.coverage}};
        for (const auto& [stat, x] : vals) {
            const std::string key = stat + "(" + name + ")";
            rows.push_back({key, x, lookup(refs, key)});
        }
    };
    block("tau", study.tau, study.tau_ess_per_minute());
    block("v", study.v, study.v_ess_per_minute());
    // hardware-independent counterpart of ESS/min, and the time it is based on
    const double kept = study.options.n_iter - study.options.n_burn;
    rows.push_back({"ESS/1000 draws(tau)", pooled_ess(study.tau) * 1000.0 / kept, std::nullopt});
    rows.push_back({"ESS/1000 draws(v)", pooled_ess(study.v) * 1000.0 / kept, std::nullopt});
    rows.push_back({"seconds", study.seconds, std::nullopt});
    return rows;
}

std::vector<ComparisonRow> compare(const JointStudy& study)
{
    const RefMap refs = study.scenario == Scenario::Scenario2 ? scenario2_refs() : scenario1_refs();
    std::vector<ComparisonRow> rows;
    for (const auto& p : study.params) {
        const std::pair<std::string, double> vals[] = {{"MSE", p.mse()},
                                                       {"CI90", p.coverage90()},
                                                       {"CI95", p.coverage95()},
                                                       {"ESS", p.mean_ess()}};
        for (const auto& [stat, x] : vals) {
            const std::string key = stat + "(" + p.name + ")";
            rows.push_back({key, x, lookup(refs, key)});
        }
    }
    const double n = static_cast<double>(study.selected.size());
    for (std::size_t j = 0; j < study.true_families.size(); ++j) {
        const std::string key = "correct(m_" + std::to_string(j + 1) + ")";
        rows.push_back({key, study.family_hits(j) / n, lookup(refs, key)});
    }
    return rows;
}

void write_comparison_markdown(std::ostream& out, const std::string& title,
                               const std::vector<ComparisonRow>& rows)
{
    out << "## " << title << "\n\n| quantity | replicated | reference |\n|---|---:|---:|\n";
    for (const auto& r : rows) {
        std::ostringstream a;
        a << std::setprecision(4) << r.replicated;
        std::ostringstream b;
        if (r.reference) {
            b << std::setprecision(4) << *r.reference;
        } else {
            b << "-";
        }
        out << "| " << r.quantity << " | " << a.str() << " | " << b.str() << " |\n";
    }
    out << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows)
{
    out << "quantity,replicated,reference\n";
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.quantity << ',' << r.replicated << ',';
        if (r.reference) {
            out << *r.reference;
        }
        out << '\n';
    }
}

}  // namespace fcsv
