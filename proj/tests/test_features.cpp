#include <doctest.h>

#include <cmath>
#include <numeric>

#include "chomp/features.hpp"
#include "chomp/synth.hpp"

using namespace chomp;

TEST_CASE("feature lengths follow 2C * (4 + n_mfcc)") {
    CHECK(feature_length(UnitKind::Microphones) == 68);
    CHECK(feature_length(UnitKind::BoneConduction) == 96);
    CHECK(feature_length(UnitKind::Imu) == 192);
    CHECK(feature_length(UnitKind::Pressure) == 32);
    CHECK(feature_length(UnitKind::Ppg) == 96);
}

TEST_CASE("mel filterbank rows are normalized triangles") {
    const int n_fft = 256;
    const auto fb = mel_filterbank(20, n_fft, 1600.0);
    REQUIRE(fb.size() == 20);
    for (const auto& row : fb) {
        REQUIRE(row.size() == static_cast<std::size_t>(n_fft / 2 + 1));
        double peak = 0.0, sum = 0.0;
        for (double v : row) {
            CHECK(v >= 0.0);
            peak = std::max(peak, v);
            sum += v;
        }
        CHECK(peak > 0.0);
        CHECK(sum > 0.0);
    }
    // filters are ordered by center bin
    auto center = [](const std::vector<double>& row) {
        return std::max_element(row.begin(), row.end()) - row.begin();
    };
    for (std::size_t i = 1; i < fb.size(); ++i)
        CHECK(center(fb[i]) >= center(fb[i - 1]));
}

TEST_CASE("spectral centroid of a tone is near the tone frequency") {
    const MfccParams p = mfcc_params(UnitKind::Microphones);
    const double fs = 8000.0;
    std::vector<float> tone(16000);
    for (std::size_t i = 0; i < tone.size(); ++i)
        tone[i] = static_cast<float>(std::sin(2.0 * M_PI * 1000.0 * i / fs));
    const double c = spectral_centroid_mean(tone.data(),
                                            static_cast<int>(tone.size()), p, fs);
    CHECK(c == doctest::Approx(1000.0).epsilon(0.05));
}

TEST_CASE("window features have the advertised layout") {
    SynthParams sp;
    sp.duration = 4.0;
    sp.n_interruptions = 0;
    sp.rng_seed = 9;
    const Recording rec = generate_session(sp);
    const auto ws = segment_windows(rec, UnitKind::Microphones);
    REQUIRE(!ws.empty());
    const MfccParams p = mfcc_params(UnitKind::Microphones);
    const auto feats = extract_features(ws[0], p);
    REQUIRE(feats.size() == 68);
    // per-channel block 0: mean and variance match a direct computation
    const float* row = ws[0].row(0);
    double mean = 0.0;
    for (int i = 0; i < ws[0].cols; ++i) mean += row[i];
    mean /= ws[0].cols;
    double var = 0.0;
    for (int i = 0; i < ws[0].cols; ++i)
        var += (row[i] - mean) * (row[i] - mean);
    var /= ws[0].cols;
    CHECK(feats[0] == doctest::Approx(mean));
    CHECK(feats[1] == doctest::Approx(var));
    for (double v : feats) CHECK(std::isfinite(v));
}

TEST_CASE("mfcc of silence is finite and constant across frames") {
    const MfccParams p = mfcc_params(UnitKind::Ppg);
    std::vector<float> zeros(100, 0.0f);
    const auto m = mfcc_mean(zeros.data(), static_cast<int>(zeros.size()), p, 50.0);
    REQUIRE(m.size() == static_cast<std::size_t>(p.n_mfcc));
    for (double v : m) CHECK(std::isfinite(v));
}
