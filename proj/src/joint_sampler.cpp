#include "fcsv/joint_sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "fcsv/special.hpp"

namespace fcsv {

FamilySet::FamilySet(std::vector<CopulaFamily> members) : members_(std::move(members))
{
    if (members_.empty()) {
        throw std::invalid_argument("family set must not be empty");
    }
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (std::find(members_.begin() + static_cast<std::ptrdiff_t>(i) + 1, members_.end(),
                      members_[i]) != members_.end()) {
            throw std::invalid_argument("family set contains duplicates");
        }
    }
}

FamilySet FamilySet::base()
{
    return FamilySet({CopulaFamily::Gaussian, CopulaFamily::StudentT4, CopulaFamily::Clayton,
                      CopulaFamily::Gumbel});
}

FamilySet FamilySet::with_survival()
{
    return FamilySet({CopulaFamily::Gaussian, CopulaFamily::StudentT4, CopulaFamily::Clayton,
                      CopulaFamily::Gumbel, CopulaFamily::SurvivalClayton,
                      CopulaFamily::SurvivalGumbel});
}

void FitConfig::validate() const
{
    if (n_burn < 0 || n_iter <= n_burn) {
        throw std::invalid_argument("need n_iter > n_burn >= 0");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be at least 1");
    }
    dependence_settings.validate(0);
    margin_settings.validate(0);
    if (dependence_settings.mass_diag.size() != 0 || margin_settings.mass_diag.size() != 0) {
        throw std::invalid_argument("the joint sampler uses identity mass matrices");
    }
}

JointData::JointData(Eigen::MatrixXd z) : z_(std::move(z))
{
    if (z_.rows() < 2 || z_.cols() < 2) {
        throw std::invalid_argument("joint data needs T >= 2 rows and d >= 2 columns");
    }
    if (!z_.allFinite()) {
        throw std::invalid_argument("joint data contains non-finite values");
    }
    for (Eigen::Index j = 0; j < z_.cols(); ++j) {
        margins_.emplace_back(Vec(z_.col(j)));
    }
}

JointState JointState::initial(const JointData& data, const FamilySet& set)
{
    JointState st;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        st.margins.push_back(MarginState::initial(data.margin(j).z()));
    }
    st.dependence = DependenceState::initial(data.dim(), data.n_obs());
    st.families.assign(static_cast<std::size_t>(data.dim()), set.members().front());
    return st;
}

BivariateCopulaSpec JointState::link(Eigen::Index j) const
{
    const auto fam = families[static_cast<std::size_t>(j)];
    return {fam, theta_from_delta(fam, dependence.delta[j])};
}

Eigen::MatrixXd copula_scale(const JointState& state, const JointData& data)
{
    Eigen::MatrixXd u(data.n_obs(), data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        u.col(j) = copula_scale(state.margins[static_cast<std::size_t>(j)], data.margin(j));
    }
    return u;
}

std::vector<double> family_probabilities(const Vec& u_j, const Vec& v, double delta_j,
                                         const FamilySet& set)
{
    std::vector<double> logw;
    for (auto fam : set.members()) {
        const BivariateCopulaSpec spec{fam, theta_from_delta(fam, delta_j)};
        double lw = 0.0;
        for (Eigen::Index t = 0; t < u_j.size(); ++t) {
            lw += log_density(spec, u_j[t], v[t]);
        }
        logw.push_back(std::isfinite(lw) ? lw : -std::numeric_limits<double>::infinity());
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<double> p(logw.size());
    if (!std::isfinite(top)) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
        return p;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logw[i] - top);
        total += p[i];
    }
    for (auto& x : p) {
        x /= total;
    }
    return p;
}

CopulaFamily draw_family(const Vec& u_j, const Vec& v, double delta_j, const FamilySet& set,
                         Rng& rng)
{
    if (set.size() == 1) {
        return set.members().front();
    }
    const auto p = family_probabilities(u_j, v, delta_j, set);
    const double r = uniform01(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (r < cum) {
            return set.members()[i];
        }
    }
    return set.members().back();
}

CopulaFamily sample_family(Eigen::Index j, const JointState& state, const Eigen::MatrixXd& u,
                           const FamilySet& set, Rng& rng)
{
    return draw_family(Vec(u.col(j)), state.dependence.v(), state.dependence.delta[j], set, rng);
}

CopulaSelectionFit fit_copula_selecting(const CopulaData& data, const FitConfig& config)
{
    config.validate();
    const Eigen::Index d = data.dim();
    Rng rng = make_stream(config.seed, 0);
    DependenceState dep = DependenceState::initial(d, data.n_obs());
    std::vector<CopulaFamily> fams(static_cast<std::size_t>(d), config.family_set.members().front());
    CopulaSelectionFit out;
    for (int it = 0; it < config.n_iter; ++it) {
        update_dependence(data, dep, fams, config.dependence_settings, rng);
        const Vec v = dep.v();
        for (Eigen::Index j = 0; j < d; ++j) {
            fams[static_cast<std::size_t>(j)] =
                draw_family(Vec(data.u().col(j)), v, dep.delta[j], config.family_set, rng);
        }
        if (it >= config.n_burn) {
            out.draws.push_back(dep);
            out.families.push_back(fams);
        }
    }
    return out;
}

ChainStreams ChainStreams::from_seed(std::uint64_t seed, Eigen::Index d)
{
    ChainStreams s{{}, make_stream(seed, 0)};
    for (Eigen::Index j = 0; j < d; ++j) {
        s.margin.push_back(make_stream(seed, static_cast<std::uint64_t>(j) + 1));
    }
    return s;
}

SweepStats gibbs_sweep(JointState& state, const JointData& data, const FitConfig& config,
                       ChainStreams& streams, SweepMode mode)
{
    const Eigen::Index d = data.dim();
    SweepStats stats;
    // one byte per margin: vector<bool> bits are not safe to write concurrently
    std::vector<char> accepted(static_cast<std::size_t>(d), 0);
    const Vec v = state.dependence.v();
    const MarginBlock margin_block =
        mode == SweepMode::Full ? MarginBlock::Full : MarginBlock::LatentOnly;

    auto update_one = [&](Eigen::Index j) {
        const auto ju = static_cast<std::size_t>(j);
        accepted[ju] = update_margin(state.margins[ju], data.margin(j), v, state.link(j),
                          config.margin_settings, streams.margin[ju], margin_block);
    };
    const int workers = static_cast<int>(std::min<Eigen::Index>(config.threads, d));
    if (workers <= 1) {
        for (Eigen::Index j = 0; j < d; ++j) {
            update_one(j);
        }
    } else {
        // margins are conditionally independent; each owns its state and stream
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (Eigen::Index j = w; j < d; j += workers) {
                    update_one(j);
                }
            });
        }
    }

    stats.margin_accepted.assign(accepted.begin(), accepted.end());

    const CopulaData u(copula_scale(state, data));
    stats.dependence_accepted = update_dependence(
        u, state.dependence, state.families, config.dependence_settings, streams.shared,
        mode == SweepMode::Full ? DependenceBlock::Full : DependenceBlock::FactorOnly);

    if (mode == SweepMode::Full) {
        for (Eigen::Index j = 0; j < d; ++j) {
            state.families[static_cast<std::size_t>(j)] =
                sample_family(j, state, u.u(), config.family_set, streams.shared);
        }
    }
    return stats;
}

JointDraw JointDraw::from_state(const JointState& state, std::span<const int> track_times)
{
    const auto d = static_cast<Eigen::Index>(state.margins.size());
    JointDraw out;
    out.mu.resize(d);
    out.phi.resize(d);
    out.sigma.resize(d);
    out.s_last.resize(d);
    out.tau = state.dependence.tau();
    out.families = state.families;
    out.track_times.assign(track_times.begin(), track_times.end());
    out.s_tracked.resize(static_cast<Eigen::Index>(track_times.size()), d);
    out.v_tracked.resize(static_cast<Eigen::Index>(track_times.size()));
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto& m = state.margins[static_cast<std::size_t>(j)];
        out.mu[j] = m.mu;
        out.phi[j] = m.phi();
        out.sigma[j] = m.sigma();
        const Vec s = ancillary_to_natural(m);
        out.s_last[j] = s[s.size() - 1];
        for (std::size_t k = 0; k < track_times.size(); ++k) {
            out.s_tracked(static_cast<Eigen::Index>(k), j) = s[track_times[k]];
        }
    }
    for (std::size_t k = 0; k < track_times.size(); ++k) {
        out.v_tracked[static_cast<Eigen::Index>(k)] =
            special::sigmoid(state.dependence.w[track_times[k] - 1]);
    }
    return out;
}

JointFit fit_joint(const JointData& data, const FitConfig& config)
{
    config.validate();
    for (int t : config.track_times) {
        if (t < 1 || t > data.n_obs()) {
            throw std::invalid_argument("tracked time index outside 1..T");
        }
    }
    JointFit fit;
    JointState state = JointState::initial(data, config.family_set);
    ChainStreams streams = ChainStreams::from_seed(config.seed, data.dim());
    long margin_acc = 0;
    long dep_acc = 0;
    fit.draws.reserve(static_cast<std::size_t>(config.n_iter - config.n_burn));
    for (int it = 0; it < config.n_iter; ++it) {
        const auto stats = gibbs_sweep(state, data, config, streams);
        margin_acc += std::count(stats.margin_accepted.begin(), stats.margin_accepted.end(), true);
        dep_acc += stats.dependence_accepted ? 1 : 0;
        if (it >= config.n_burn) {
            fit.draws.push_back(JointDraw::from_state(state, config.track_times));
        }
    }
    fit.final_state = std::move(state);
    fit.margin_acceptance = static_cast<double>(margin_acc) / (config.n_iter * data.dim());
    fit.dependence_acceptance = static_cast<double>(dep_acc) / config.n_iter;
    return fit;
}

CopulaFamily modal_family(std::span<const JointDraw> draws, Eigen::Index j)
{
    if (draws.empty()) {
        throw std::invalid_argument("no draws");
    }
    std::array<int, 6> counts{};
    for (const auto& dr : draws) {
        ++counts[static_cast<std::size_t>(dr.families[static_cast<std::size_t>(j)])];
    }
    const auto best = std::max_element(counts.begin(), counts.end());
    return static_cast<CopulaFamily>(best - counts.begin());
}

void JointParams::validate() const
{
    const Eigen::Index d = mu.size();
    if (d < 2 || phi.size() != d || sigma.size() != d || tau.size() != d ||
        static_cast<Eigen::Index>(families.size()) != d) {
        throw std::invalid_argument("joint parameters need d >= 2 entries of every kind");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!std::isfinite(mu[j]) || !(std::abs(phi[j]) < 1.0) || !(sigma[j] >= 0.0) ||
            !(tau[j] > 0.0 && tau[j] < 1.0)) {
            throw std::domain_error("joint parameter outside its domain");
        }
    }
}

SimulatedData simulate_joint(const JointParams& params, Eigen::Index n_obs, Rng& rng)
{
    params.validate();
    const Eigen::Index d = params.dim();
    SimulatedData out;
    out.z.resize(n_obs, d);
    out.eps.resize(n_obs, d);
    out.s.resize(n_obs + 1, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        out.s.col(j) = simulate_log_variance(params.mu[j], params.phi[j], params.sigma[j], n_obs, rng);
    }
    const Eigen::MatrixXd u = simulate_factor_copula(params.families, params.tau, n_obs, rng, &out.v);
    for (Eigen::Index t = 0; t < n_obs; ++t) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out.eps(t, j) = special::normal_quantile(clamp_unit(u(t, j)));
            out.z(t, j) = std::exp(0.5 * out.s(t + 1, j)) * out.eps(t, j);
        }
    }
    return out;
}

void write_draws_csv(std::ostream& out, std::span<const JointDraw> draws)
{
    if (draws.empty()) {
        throw std::invalid_argument("no draws to write");
    }
    const auto& first = draws.front();
    const Eigen::Index d = first.mu.size();
    std::ostringstream header;
    for (const char* name : {"mu", "phi", "sigma", "tau", "m", "s_last"}) {
        for (Eigen::Index j = 1; j <= d; ++j) {
            header << name << '_' << j << ',';
        }
    }
    for (int t : first.track_times) {
        for (Eigen::Index j = 1; j <= d; ++j) {
            header << "s_" << t << '_' << j << ',';
        }
    }
    for (int t : first.track_times) {
        header << "v_" << t << ',';
    }
    std::string h = header.str();
    h.pop_back();
    out << h << '\n' << std::setprecision(17);
    for (const auto& dr : draws) {
        std::ostringstream row;
        row << std::setprecision(17);
        for (const Vec* x : {&dr.mu, &dr.phi, &dr.sigma, &dr.tau}) {
            for (Eigen::Index j = 0; j < d; ++j) row << (*x)[j] << ',';
        }
        for (auto f : dr.families) row << family_name(f) << ',';
        for (Eigen::Index j = 0; j < d; ++j) row << dr.s_last[j] << ',';
        for (Eigen::Index k = 0; k < dr.s_tracked.rows(); ++k) {
            for (Eigen::Index j = 0; j < d; ++j) row << dr.s_tracked(k, j) << ',';
        }
        for (Eigen::Index k = 0; k < dr.v_tracked.size(); ++k) row << dr.v_tracked[k] << ',';
        std::string r = row.str();
        r.pop_back();
        out << r << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

double parse_double(const std::string& s)
{
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) {
        throw std::invalid_argument("malformed number '" + s + "'");
    }
    return x;
}

}  // namespace

std::vector<JointDraw> read_draws_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("draw CSV is empty");
    }
    const auto header = split_csv_line(line);
    Eigen::Index d = 0;
    while (static_cast<std::size_t>(d) < header.size() && header[d] == "mu_" + std::to_string(d + 1)) {
        ++d;
    }
    if (d < 2) {
        throw std::invalid_argument("draw CSV header does not start with mu_1, mu_2");
    }
    std::vector<int> times;
    std::size_t col = static_cast<std::size_t>(6 * d);
    const char* names[] = {"mu", "phi", "sigma", "tau", "m", "s_last"};
    for (int b = 0; b < 6; ++b) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const std::size_t c = static_cast<std::size_t>(b * d + j);
            if (c >= header.size() || header[c] != std::string(names[b]) + "_" + std::to_string(j + 1)) {
                throw std::invalid_argument("unexpected draw CSV column layout");
            }
        }
    }
    // tracked s_<t>_<j> blocks, then v_<t>
    while (col < header.size() && header[col].rfind("s_", 0) == 0) {
        const std::string rest = header[col].substr(2);
        const int t = std::stoi(rest.substr(0, rest.find('_')));
        times.push_back(t);
        col += static_cast<std::size_t>(d);
    }
    if (col + times.size() != header.size()) {
        throw std::invalid_argument("unexpected tracked-latent columns in draw CSV");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (header[col + k] != "v_" + std::to_string(times[k])) {
            throw std::invalid_argument("unexpected tracked-latent columns in draw CSV");
        }
    }

    std::vector<JointDraw> draws;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("draw CSV row has the wrong number of fields");
        }
        JointDraw dr;
        Vec* blocks[] = {&dr.mu, &dr.phi, &dr.sigma, &dr.tau};
        for (int b = 0; b < 4; ++b) {
            blocks[b]->resize(d);
            for (Eigen::Index j = 0; j < d; ++j) (*blocks[b])[j] = parse_double(cells[b * d + j]);
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto f = parse_family(cells[4 * d + j]);
            if (!f) throw std::invalid_argument("unknown family '" + cells[4 * d + j] + "'");
            dr.families.push_back(*f);
        }
        dr.s_last.resize(d);
        for (Eigen::Index j = 0; j < d; ++j) dr.s_last[j] = parse_double(cells[5 * d + j]);
        dr.track_times = times;
        const auto nt = static_cast<Eigen::Index>(times.size());
        dr.s_tracked.resize(nt, d);
        dr.v_tracked.resize(nt);
        std::size_t c = static_cast<std::size_t>(6 * d);
        for (Eigen::Index k = 0; k < nt; ++k) {
            for (Eigen::Index j = 0; j < d; ++j) dr.s_tracked(k, j) = parse_double(cells[c++]);
        }
        for (Eigen::Index k = 0; k < nt; ++k) dr.v_tracked[k] = parse_double(cells[c++]);
        draws.push_back(std::move(dr));
    }
    return draws;
}

}  // namespace fcsv
