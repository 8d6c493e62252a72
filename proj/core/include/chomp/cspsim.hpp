#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chomp/rng.hpp"

namespace chomp {

// Monte Carlo model of observed chewing-side proportions: per simulated meal
// a preference p ~ N(mu, sigma) clipped to [0,1]; each 2-s window's true
// side is Bernoulli(p) and independently misclassified with probability
// error_rate; the observed proportion is the fraction classified Left.
struct SimConfig {
    std::vector<double> mus = {0.60, 0.65, 0.70};
    double sigma = 0.05;
    double error_rate = 0.046;
    std::vector<double> durations_min = {1.0, 5.0, 15.0};
    int n_draws = 10000;
    int windows_per_minute = 59;  // 2-s windows at 1-s stride over 60 s
    std::uint64_t rng_seed = 0;
};

struct SimCell {
    double mu = 0.0;
    double duration_min = 0.0;
    double mean_observed = 0.0;
    double ci_low = 0.0;   // empirical 5th percentile
    double ci_high = 0.0;  // empirical 95th percentile
    bool excludes_50 = false;
    std::vector<long> histogram;  // counts over 50 equal bins on [0,1]
};

struct SimReport {
    SimConfig config;
    std::vector<SimCell> cells;  // mu-major, then duration
};

struct CspVerdict {
    double mu = 0.0;
    bool detected = false;
    double minimal_duration_min = -1.0;  // -1 when never detected
};

double simulate_meal(const SimConfig& cfg, double mu, double duration_min, Rng& rng);
SimReport monte_carlo(const SimConfig& cfg);
std::vector<CspVerdict> diagnose(const SimReport& report);

std::string format_sim_report(const SimReport& report);

}  // namespace chomp
