#pragma once

#include <vector>

#include "chomp/windowing.hpp"

namespace chomp {

// Appendix-style per-sensor STFT/MFCC parameters.
struct MfccParams {
    int n_fft;
    int hop_length;
    int n_mfcc;
    int n_mels;
};

MfccParams mfcc_params(UnitKind unit);

// Triangular mel filterbank (m = 2595*log10(1+f/700)) spanning 0..Nyquist,
// rows are filters over n_fft/2+1 bins.
std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_fft, double fs);

// Frame-averaged MFCCs of one channel: Hann window, power spectrum, log-mel
// (floor 1e-10), DCT-II, first n_mfcc coefficients.
std::vector<double> mfcc_mean(const float* x, int len, const MfccParams& p, double fs);

// Frame-averaged spectral centroid (Hz); all-zero frames contribute 0.
double spectral_centroid_mean(const float* x, int len, const MfccParams& p, double fs);

// Per channel: [mean, variance, power, centroid, mfcc_0..n_mfcc-1],
// concatenated over the window's 2C rows.
std::vector<double> extract_features(const Window& w, const MfccParams& p);

inline int feature_length(UnitKind unit) {
    const auto& u = unit_spec(unit);
    return 2 * u.channels_per_earable * (4 + mfcc_params(unit).n_mfcc);
}

}  // namespace chomp
