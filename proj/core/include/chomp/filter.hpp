#pragma once

#include <array>
#include <complex>
#include <vector>

#include "chomp/recording.hpp"

namespace chomp {

// One biquad: b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Biquad {
    double b0, b1, b2;
    double a1, a2;
};

// Fourth-order Butterworth bandpass (analog prototype order 4, so four
// cascaded second-order sections after the lowpass-to-bandpass transform
// and bilinear mapping). Gain normalized to 1 at the geometric center.
struct BandpassFilter {
    int order = 4;
    double low = 0.0;
    double high = 0.0;
    double fs = 0.0;
    std::vector<Biquad> sections;

    std::complex<double> response(double freq_hz) const;  // H(e^{j 2 pi f / fs})
    double magnitude(double freq_hz) const;
};

BandpassFilter design_bandpass(const SensorUnit& unit);
BandpassFilter design_bandpass(double low, double high, double fs, int order = 4);

// Causal single-pass filtering, zero initial state.
std::vector<float> apply_bandpass(const std::vector<float>& x, const BandpassFilter& f);
Channel apply_bandpass(const Channel& ch, const BandpassFilter& f);

}  // namespace chomp
