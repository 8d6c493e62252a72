#include "chomp/cspsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "chomp/errors.hpp"
#include "chomp/eval.hpp"

namespace chomp {

double simulate_meal(const SimConfig& cfg, double mu, double duration_min, Rng& rng) {
    if (!(duration_min > 0.0)) throw ConfigError("duration must be positive");
    std::normal_distribution<double> pref(mu, cfg.sigma);
    double p = cfg.sigma > 0.0 ? pref(rng) : mu;
    p = std::clamp(p, 0.0, 1.0);

    const long n = std::lround(cfg.windows_per_minute * duration_min);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long left = 0;
    for (long i = 0; i < n; ++i) {
        bool is_left = u(rng) < p;
        if (u(rng) < cfg.error_rate) is_left = !is_left;  // classifier error
        left += is_left;
    }
    return static_cast<double>(left) / static_cast<double>(n);
}

SimReport monte_carlo(const SimConfig& cfg) {
    if (cfg.n_draws < 1 || cfg.sigma < 0.0 || cfg.error_rate < 0.0 ||
        cfg.error_rate > 0.5)
        throw ConfigError("invalid SimConfig");
    SimReport report;
    report.config = cfg;
    for (double mu : cfg.mus) {
        for (double dur : cfg.durations_min) {
            SimCell cell;
            cell.mu = mu;
            cell.duration_min = dur;
            std::vector<double> observed(cfg.n_draws);
            const std::uint64_t base = derive_seed(
                cfg.rng_seed, "cspsim/" + std::to_string(mu) + "/" + std::to_string(dur));
            // per-draw substreams keep results independent of execution order
            for (int d = 0; d < cfg.n_draws; ++d) {
                Rng rng(splitmix64(base ^ static_cast<std::uint64_t>(d)));
                observed[d] = simulate_meal(cfg, mu, dur, rng);
            }
            double sum = 0.0;
            for (double v : observed) sum += v;
            cell.mean_observed = sum / cfg.n_draws;
            cell.ci_low = quantile_linear(observed, 0.05);
            cell.ci_high = quantile_linear(observed, 0.95);
            cell.excludes_50 = cell.ci_low > 0.5;
            cell.histogram.assign(50, 0);
            for (double v : observed) {
                auto b = static_cast<std::size_t>(v * 50.0);
                if (b >= 50) b = 49;
                ++cell.histogram[b];
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::vector<CspVerdict> diagnose(const SimReport& report) {
    std::vector<CspVerdict> verdicts;
    for (double mu : report.config.mus) {
        CspVerdict v;
        v.mu = mu;
        for (const auto& cell : report.cells) {
            if (cell.mu != mu || !cell.excludes_50) continue;
            if (!v.detected || cell.duration_min < v.minimal_duration_min) {
                v.detected = true;
                v.minimal_duration_min = cell.duration_min;
            }
        }
        verdicts.push_back(v);
    }
    return verdicts;
}

std::string format_sim_report(const SimReport& report) {
    std::ostringstream os;
    os << "# chewing-side-preference simulation\n";
    os << "error_rate: " << report.config.error_rate << "\n";
    os << "sigma: " << report.config.sigma << "\n";
    os << "n_draws: " << report.config.n_draws << "\n";
    os << "windows_per_minute: " << report.config.windows_per_minute << "\n";
    for (const auto& c : report.cells) {
        os << "cell: mu " << c.mu << " duration_min " << c.duration_min << " mean "
           << c.mean_observed << " ci90 [" << c.ci_low << ", " << c.ci_high
           << "] excludes_50 " << (c.excludes_50 ? "yes" : "no") << "\n";
        os << "  histogram:";
        for (long h : c.histogram) os << " " << h;
        os << "\n";
    }
    // Reported exclusion-onset durations for the published operating point.
    // The simulation decides per 2-s window; if the published per-mu onsets
    // do not reproduce under that decision, the discrepancy is stated here
    // rather than tuned away.
    const std::vector<std::pair<double, double>> published = {
        {0.70, 1.0}, {0.65, 5.0}, {0.60, 15.0}};
    const bool at_paper_point = std::abs(report.config.error_rate - 0.046) < 1e-12;
    for (const auto& v : diagnose(report)) {
        os << "verdict: mu " << v.mu << " detected " << (v.detected ? "yes" : "no");
        if (v.detected) os << " minimal_duration_min " << v.minimal_duration_min;
        os << "\n";
        if (!at_paper_point) continue;
        for (const auto& [mu, dur] : published) {
            if (std::abs(v.mu - mu) > 1e-9) continue;
            const bool matches = v.detected && v.minimal_duration_min == dur;
            if (!matches) {
                os << "deviation: mu " << mu << " published exclusion onset "
                   << dur << " min, computed "
                   << (v.detected ? std::to_string(v.minimal_duration_min) + " min"
                                  : std::string("never"))
                   << " under the per-window decision\n";
            }
        }
    }
    return os.str();
}

}  // namespace chomp
