#include <doctest.h>

#include <cmath>

#include "chomp/cspsim.hpp"

using namespace chomp;

TEST_CASE("zero error rate reproduces the preference means") {
    SimConfig cfg;
    cfg.error_rate = 0.0;
    cfg.n_draws = 4000;
    cfg.durations_min = {5.0};
    const SimReport rep = monte_carlo(cfg);
    REQUIRE(rep.cells.size() == 3);
    for (const auto& cell : rep.cells)
        CHECK(std::abs(cell.mean_observed - cell.mu) < 0.003);
}

TEST_CASE("symmetric misclassification shrinks the observed proportion") {
    SimConfig cfg;
    cfg.mus = {0.65};
    cfg.error_rate = 0.046;
    cfg.n_draws = 4000;
    cfg.durations_min = {5.0};
    const SimReport rep = monte_carlo(cfg);
    // E[observed] = mu(1-e) + (1-mu)e = 0.65 - 0.3*0.046 = 0.6362
    CHECK(std::abs(rep.cells[0].mean_observed - 0.6362) < 0.003);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    SimConfig cfg;
    cfg.n_draws = 500;
    const SimReport a = monte_carlo(cfg);
    const SimReport b = monte_carlo(cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].mean_observed == b.cells[i].mean_observed);
        CHECK(a.cells[i].ci_low == b.cells[i].ci_low);
        CHECK(a.cells[i].ci_high == b.cells[i].ci_high);
    }
}

TEST_CASE("longer meals tighten the interval") {
    SimConfig cfg;
    cfg.mus = {0.65};
    cfg.durations_min = {1.0, 15.0};
    cfg.n_draws = 2000;
    const SimReport rep = monte_carlo(cfg);
    REQUIRE(rep.cells.size() == 2);
    const double w1 = rep.cells[0].ci_high - rep.cells[0].ci_low;
    const double w15 = rep.cells[1].ci_high - rep.cells[1].ci_low;
    CHECK(w15 < w1);
}

TEST_CASE("diagnose reports the minimal detectable duration per mu") {
    SimConfig cfg;
    cfg.n_draws = 2000;
    const SimReport rep = monte_carlo(cfg);
    const auto verdicts = diagnose(rep);
    REQUIRE(verdicts.size() == cfg.mus.size());
    for (const auto& v : verdicts) {
        if (v.detected) {
            bool found = false;
            for (const auto& cell : rep.cells)
                if (cell.mu == v.mu && cell.duration_min == v.minimal_duration_min)
                    found = cell.excludes_50;
            CHECK(found);
        } else {
            CHECK(v.minimal_duration_min == -1.0);
        }
    }
}

TEST_CASE("the report mentions deviations only at the paper operating point") {
    SimConfig cfg;
    cfg.n_draws = 2000;
    cfg.error_rate = 0.10;
    const auto text = format_sim_report(monte_carlo(cfg));
    CHECK(text.find("deviation") == std::string::npos);
}
