#include <doctest.h>

#include <cmath>

#include "chomp/sync.hpp"
#include "chomp/synth.hpp"

using namespace chomp;

TEST_CASE("alignment signal has the expected length and impulses") {
    AlignmentConfig cfg;
    const double fs = 8000.0;
    const auto sig = generate_alignment_signal(cfg, fs, 1);
    // (n-1) spacings + noise tail + the final impulse sample
    CHECK(sig.size() == 56001);
    CHECK(std::abs(sig[0]) == doctest::Approx(1.0));
    CHECK(std::abs(sig[8000]) == doctest::Approx(1.0));
}

TEST_CASE("gcc-phat recovers a pure sample shift exactly") {
    AlignmentConfig cfg;
    const double fs = 8000.0;
    const auto left = generate_alignment_signal(cfg, fs, 3);
    const long shift = 128;
    std::vector<float> right(left.size(), 0.0f);
    for (std::size_t i = shift; i < right.size(); ++i)
        right[i] = left[i - shift];
    const auto est = gcc_phat_offset(left, right, fs, 2.0, cfg.gaussian_sigma);
    CHECK(est.lag_index == shift);
    CHECK(est.offset == doctest::Approx(0.016));
    CHECK(est.peak_value > 0.0);
}

TEST_CASE("gcc-phat handles negative lags") {
    AlignmentConfig cfg;
    const double fs = 8000.0;
    const auto left = generate_alignment_signal(cfg, fs, 5);
    const long shift = -300;
    std::vector<float> right(left.size(), 0.0f);
    for (std::size_t i = 0; i + 300 < right.size(); ++i) right[i] = left[i + 300];
    const auto est = gcc_phat_offset(left, right, fs, 2.0, cfg.gaussian_sigma);
    CHECK(est.lag_index == shift);
}

TEST_CASE("align_recording shifts only the right earable clock") {
    SynthParams p;
    p.duration = 4.0;
    p.n_interruptions = 0;
    p.rng_seed = 2;
    Recording rec = generate_session(p);
    OffsetEstimate est;
    est.offset = 0.25;
    const Recording aligned = align_recording(rec, est);
    for (std::size_t i = 0; i < rec.channels.size(); ++i) {
        const double expect = rec.channels[i].earable == Earable::Right
                                  ? rec.channels[i].t0 - 0.25
                                  : rec.channels[i].t0;
        CHECK(aligned.channels[i].t0 == doctest::Approx(expect));
    }
}
