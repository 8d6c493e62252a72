#pragma once

#include <cstdint>
#include <vector>

#include "chomp/recording.hpp"

namespace chomp {

// Alignment stimulus: a short impulse train followed by white noise,
// played once per earable power cycle.
struct AlignmentConfig {
    int n_impulses = 4;
    double impulse_spacing = 1.0;  // seconds
    double noise_duration = 4.0;   // seconds
    double gaussian_sigma = 2.0;   // samples, correlation smoothing
};

struct OffsetEstimate {
    double offset = 0.0;      // seconds, right clock minus left clock
    double peak_value = 0.0;  // smoothed correlation at the peak
    long lag_index = 0;       // samples
};

std::vector<float> generate_alignment_signal(const AlignmentConfig& cfg, double fs,
                                             std::uint64_t rng_seed);

// GCC-PHAT: cross-spectrum whitened to unit magnitude per bin, inverse
// transformed, Gaussian smoothed, argmax restricted to [-max_lag, max_lag].
OffsetEstimate gcc_phat_offset(const std::vector<float>& left,
                               const std::vector<float>& right, double fs,
                               double max_lag, double sigma);

// Shifts all right-earable channel time origins by -offset. Not idempotent:
// applying the same estimate twice shifts twice.
Recording align_recording(Recording rec, const OffsetEstimate& est);

}  // namespace chomp
