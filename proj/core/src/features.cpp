#include "chomp/features.hpp"

#include <cmath>
#include <complex>

#include "chomp/errors.hpp"
#include "chomp/fft.hpp"

namespace chomp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

std::vector<double> hann(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (n - 1));
    return w;
}

// magnitude spectrum of one Hann-windowed frame, bins 0..n_fft/2
std::vector<double> frame_magnitude(const float* x, int n_fft,
                                    const std::vector<double>& win) {
    std::vector<double> buf(n_fft);
    for (int i = 0; i < n_fft; ++i) buf[i] = x[i] * win[i];
    auto spec = rfft(buf, static_cast<std::size_t>(n_fft));
    std::vector<double> mag(n_fft / 2 + 1);
    for (int k = 0; k <= n_fft / 2; ++k) mag[k] = std::abs(spec[k]);
    return mag;
}

}  // namespace

MfccParams mfcc_params(UnitKind unit) {
    switch (unit) {
        case UnitKind::Microphones: return {1024, 128, 13, 40};
        case UnitKind::BoneConduction: return {256, 64, 12, 20};
        case UnitKind::Imu: return {128, 32, 12, 20};
        case UnitKind::Ppg: return {64, 16, 12, 20};
        case UnitKind::Pressure: return {128, 32, 12, 20};
    }
    throw ConfigError("unknown unit");
}

std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_fft, double fs) {
    const int n_bins = n_fft / 2 + 1;
    const double mel_max = hz_to_mel(fs / 2.0);
    std::vector<double> edges(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i)
        edges[i] = mel_to_hz(mel_max * i / (n_mels + 1));

    std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
    for (int m = 0; m < n_mels; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = fs * k / n_fft;
            if (f > lo && f < mid) fb[m][k] = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi) fb[m][k] = (hi - f) / (hi - mid);
        }
    }
    return fb;
}

std::vector<double> mfcc_mean(const float* x, int len, const MfccParams& p, double fs) {
    if (len < p.n_fft) throw InsufficientData("window shorter than n_fft");
    const auto win = hann(p.n_fft);
    const auto fb = mel_filterbank(p.n_mels, p.n_fft, fs);
    std::vector<double> acc(p.n_mfcc, 0.0);
    int frames = 0;
    std::vector<double> logmel(p.n_mels);
    for (int start = 0; start + p.n_fft <= len; start += p.hop_length, ++frames) {
        auto mag = frame_magnitude(x + start, p.n_fft, win);
        for (int m = 0; m < p.n_mels; ++m) {
            double e = 0.0;
            for (std::size_t k = 0; k < mag.size(); ++k)
                e += fb[m][k] * mag[k] * mag[k];
            logmel[m] = std::log(std::max(e, 1e-10));
        }
        // DCT-II
        for (int c = 0; c < p.n_mfcc; ++c) {
            double v = 0.0;
            for (int m = 0; m < p.n_mels; ++m)
                v += logmel[m] * std::cos(kPi * c * (m + 0.5) / p.n_mels);
            acc[c] += v;
        }
    }
    for (auto& v : acc) v /= frames;
    return acc;
}

double spectral_centroid_mean(const float* x, int len, const MfccParams& p, double fs) {
    if (len < p.n_fft) throw InsufficientData("window shorter than n_fft");
    const auto win = hann(p.n_fft);
    double acc = 0.0;
    int frames = 0;
    for (int start = 0; start + p.n_fft <= len; start += p.hop_length, ++frames) {
        auto mag = frame_magnitude(x + start, p.n_fft, win);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < mag.size(); ++k) {
            const double f = fs * static_cast<double>(k) / p.n_fft;
            num += f * mag[k];
            den += mag[k];
        }
        acc += den > 0.0 ? num / den : 0.0;  // silent frame -> centroid 0
    }
    return acc / frames;
}

std::vector<double> extract_features(const Window& w, const MfccParams& p) {
    if (w.cols < p.n_fft) throw InsufficientData("window shorter than n_fft");
    const double fs = unit_spec(w.unit).sample_rate;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(w.rows) * (4 + p.n_mfcc));
    for (int r = 0; r < w.rows; ++r) {
        const float* x = w.row(r);
        double mean = 0.0;
        for (int i = 0; i < w.cols; ++i) mean += x[i];
        mean /= w.cols;
        double var = 0.0, power = 0.0;
        for (int i = 0; i < w.cols; ++i) {
            var += (x[i] - mean) * (x[i] - mean);
            power += static_cast<double>(x[i]) * x[i];
        }
        var /= w.cols;
        power /= w.cols;
        out.push_back(mean);
        out.push_back(var);
        out.push_back(power);
        out.push_back(spectral_centroid_mean(x, w.cols, p, fs));
        auto m = mfcc_mean(x, w.cols, p, fs);
        out.insert(out.end(), m.begin(), m.end());
    }
    return out;
}

}  // namespace chomp
