#include "chomp/sync.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "chomp/errors.hpp"
#include "chomp/fft.hpp"
#include "chomp/rng.hpp"

namespace chomp {

std::vector<float> generate_alignment_signal(const AlignmentConfig& cfg, double fs,
                                             std::uint64_t rng_seed) {
    if (fs <= 0) throw ConfigError("alignment signal needs fs > 0");
    if (cfg.n_impulses < 1 || cfg.impulse_spacing <= 0 || cfg.noise_duration < 0)
        throw ConfigError("invalid AlignmentConfig");

    const double dur =
        (cfg.n_impulses - 1) * cfg.impulse_spacing + cfg.noise_duration;
    const auto n = static_cast<std::size_t>(std::llround(dur * fs)) + 1;
    std::vector<float> sig(n, 0.0f);

    for (int i = 0; i < cfg.n_impulses; ++i) {
        auto idx = static_cast<std::size_t>(std::llround(i * cfg.impulse_spacing * fs));
        if (idx < n) sig[idx] = 1.0f;
    }

    const auto noise_start = static_cast<std::size_t>(
        std::llround((cfg.n_impulses - 1) * cfg.impulse_spacing * fs)) + 1;
    Rng rng = make_rng(rng_seed, "alignment-noise");
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = noise_start; i < n; ++i)
        sig[i] = static_cast<float>(gauss(rng));
    return sig;
}

OffsetEstimate gcc_phat_offset(const std::vector<float>& left,
                               const std::vector<float>& right, double fs,
                               double max_lag, double sigma) {
    const long max_lag_samples = std::lround(max_lag * fs);
    if (static_cast<long>(left.size()) < 2 * max_lag_samples ||
        static_cast<long>(right.size()) < 2 * max_lag_samples)
        throw ConfigError("signals too short for requested max_lag");

    double el = 0.0, er = 0.0;
    for (float v : left) el += static_cast<double>(v) * v;
    for (float v : right) er += static_cast<double>(v) * v;
    if (el == 0.0 || er == 0.0) throw DegenerateSignal("all-zero input to GCC-PHAT");

    const std::size_t n_fft = good_fft_size(left.size() + right.size());
    std::vector<std::complex<double>> xl(n_fft), xr(n_fft);
    for (std::size_t i = 0; i < left.size(); ++i) xl[i] = left[i];
    for (std::size_t i = 0; i < right.size(); ++i) xr[i] = right[i];
    fft(xl, false);
    fft(xr, false);

    // phase transform: keep phase only, zero near-silent bins
    std::vector<std::complex<double>> cross(n_fft);
    for (std::size_t k = 0; k < n_fft; ++k) {
        std::complex<double> g = std::conj(xl[k]) * xr[k];
        double mag = std::abs(g);
        cross[k] = mag < 1e-12 ? std::complex<double>(0.0) : g / mag;
    }
    fft(cross, true);

    std::vector<double> corr(n_fft);
    for (std::size_t k = 0; k < n_fft; ++k) corr[k] = cross[k].real();

    if (sigma > 0.0) {
        const long radius = static_cast<long>(std::ceil(4.0 * sigma));
        std::vector<double> kernel(2 * radius + 1);
        double sum = 0.0;
        for (long i = -radius; i <= radius; ++i) {
            kernel[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
            sum += kernel[i + radius];
        }
        for (auto& k : kernel) k /= sum;
        std::vector<double> smoothed(n_fft);
        const auto n = static_cast<long>(n_fft);
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (long j = -radius; j <= radius; ++j)
                acc += kernel[j + radius] * corr[((i + j) % n + n) % n];
            smoothed[i] = acc;
        }
        corr.swap(smoothed);
    }

    OffsetEstimate est;
    double best = -1e300;
    for (long lag = -max_lag_samples; lag <= max_lag_samples; ++lag) {
        const auto idx = static_cast<std::size_t>(
            (lag + static_cast<long>(n_fft)) % static_cast<long>(n_fft));
        if (corr[idx] > best) {
            best = corr[idx];
            est.lag_index = lag;
        }
    }
    est.peak_value = best;
    est.offset = static_cast<double>(est.lag_index) / fs;
    return est;
}

Recording align_recording(Recording rec, const OffsetEstimate& est) {
    for (auto& ch : rec.channels)
        if (ch.earable == Earable::Right) ch.t0 -= est.offset;
    return rec;
}

}  // namespace chomp
