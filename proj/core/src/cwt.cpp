#include "chomp/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "chomp/errors.hpp"
#include "chomp/fft.hpp"

namespace chomp {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CwtPlan make_plan(const SensorUnit& unit) {
    CwtPlan plan;
    plan.fs = unit.sample_rate;
    plan.f_max = unit.nyquist();
    plan.hop = unit.cwt_hop;
    plan.n_scales = unit.cwt_scales;
    plan.center_frequencies.resize(plan.n_scales);
    plan.scales.resize(plan.n_scales);
    const double log_lo = std::log(plan.f_min);
    const double log_hi = std::log(plan.f_max);
    for (int k = 0; k < plan.n_scales; ++k) {
        const double t = static_cast<double>(k) / (plan.n_scales - 1);
        const double f = std::exp(log_lo + t * (log_hi - log_lo));
        plan.center_frequencies[k] = f;
        plan.scales[k] = plan.fs * plan.omega0 / (2.0 * kPi * f);
    }
    return plan;
}

std::vector<std::complex<double>> cwt_window(const std::vector<float>& x,
                                             const CwtPlan& plan) {
    const auto len = static_cast<long>(x.size());
    if (len != std::lround(2.0 * plan.fs))
        throw ConfigError("cwt_window expects a 2 s window");
    const int frames = plan.frames_for(static_cast<int>(len));

    // reflection padding on both sides; half the wavelet support, capped at
    // the signal length
    const double s_max = *std::max_element(plan.scales.begin(), plan.scales.end());
    const long pad = std::min<long>(len - 1, static_cast<long>(std::ceil(4.0 * s_max)));
    // 5-smooth and, when possible, a multiple of the hop so the decimated
    // output can come from a short folded inverse transform
    std::size_t n_fft = good_fft_size(static_cast<std::size_t>(len + 2 * pad));
    while (n_fft % static_cast<std::size_t>(plan.hop) != 0)
        n_fft = good_fft_size(n_fft + 1);

    std::vector<std::complex<double>> spec(n_fft, 0.0);
    for (long i = 0; i < pad; ++i) spec[i] = x[pad - i];                   // left reflect
    for (long i = 0; i < len; ++i) spec[pad + i] = x[i];
    for (long i = 0; i < pad; ++i) spec[pad + len + i] = x[len - 2 - i];   // right reflect
    fft(spec, false);

    std::vector<std::complex<double>> out(
        static_cast<std::size_t>(plan.n_scales) * frames);
    // Only frames at stride hop are kept, so fold the filtered spectrum
    // modulo M = n/hop and invert a length-M transform: for t = pad + j*hop,
    // exp(2*pi*i*k*t/n) = exp(2*pi*i*k*pad/n) * exp(2*pi*i*(k mod M)*j/M).
    const auto M = static_cast<std::size_t>(n_fft / plan.hop);
    std::vector<std::complex<double>> folded(M);
    const double norm_base = std::sqrt(2.0 * kPi) * std::pow(kPi, -0.25);
    const auto half = static_cast<std::size_t>(n_fft / 2);
    // beyond |s*w - omega0| = 9 the Gaussian factor is < 1e-17
    constexpr double kSupport = 9.0;
    for (int si = 0; si < plan.n_scales; ++si) {
        const double s = plan.scales[si];
        const double norm = norm_base * std::sqrt(s);
        const double bins_per_rad = n_fft / (2.0 * kPi);
        auto lo = static_cast<std::size_t>(std::max(
            0.0, std::ceil((plan.omega0 - kSupport) / s * bins_per_rad)));
        auto hi = static_cast<std::size_t>(std::max(
            0.0, std::floor((plan.omega0 + kSupport) / s * bins_per_rad)));
        hi = std::min(hi, half);  // analytic Morlet: positive frequencies only
        std::fill(folded.begin(), folded.end(), std::complex<double>(0.0));
        for (std::size_t k = lo; k <= hi; ++k) {
            const double w = 2.0 * kPi * static_cast<double>(k) / n_fft;
            const double arg = s * w - plan.omega0;
            const double phase =
                2.0 * kPi * static_cast<double>(k) * static_cast<double>(pad) / n_fft;
            folded[k % M] += spec[k] * std::polar(norm * std::exp(-0.5 * arg * arg),
                                                  phase);
        }
        fft(folded, true);
        const double rescale = static_cast<double>(M) / static_cast<double>(n_fft);
        for (int j = 0; j < frames; ++j)
            out[static_cast<std::size_t>(si) * frames + j] =
                folded[static_cast<std::size_t>(j)] * rescale;
    }
    return out;
}

std::vector<float> log_power(const std::vector<std::complex<double>>& w, double eps) {
    if (!(eps > 0.0)) throw ConfigError("log_power needs eps > 0");
    std::vector<float> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double p = std::max(std::norm(w[i]), eps);
        out[i] = static_cast<float>(10.0 * std::log10(p));
    }
    return out;
}

Scalogram scalogram_window(const Window& w, const CwtPlan& plan) {
    Scalogram sg;
    sg.unit = w.unit;
    sg.channels = w.rows;
    sg.scales = plan.n_scales;
    sg.frames = plan.frames_for(w.cols);
    sg.values.resize(static_cast<std::size_t>(sg.channels) * sg.scales * sg.frames);
    sg.label = w.label;
    sg.subject_id = w.subject_id;
    sg.session_id = w.session_id;
    sg.food_label = w.food_label;
    sg.start_time = w.start_time;

    std::vector<float> chan(w.cols);
    for (int r = 0; r < w.rows; ++r) {
        std::copy_n(w.row(r), w.cols, chan.begin());
        auto coeffs = cwt_window(chan, plan);
        auto db = log_power(coeffs);
        std::copy(db.begin(), db.end(), sg.plane(r));
    }
    return sg;
}

Tensor Scalogram::to_tensor() const {
    Tensor t{{static_cast<std::uint32_t>(channels), static_cast<std::uint32_t>(scales),
              static_cast<std::uint32_t>(frames)}};
    t.data = values;
    return t;
}

void standardize(std::vector<Scalogram>& set) {
    if (set.empty()) throw InsufficientData("empty scalogram set");

    // group key: (subject, channel row) -- the row index encodes earable and
    // sensor channel; unit kind included for mixed-unit sets
    struct Stats {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t n = 0;
    };
    std::map<std::tuple<std::string, int, int>, Stats> groups;
    for (const auto& sg : set) {
        const auto plane_n = static_cast<std::size_t>(sg.scales) * sg.frames;
        for (int ch = 0; ch < sg.channels; ++ch) {
            auto& st = groups[{sg.subject_id, static_cast<int>(sg.unit), ch}];
            const float* p = sg.plane(ch);
            for (std::size_t i = 0; i < plane_n; ++i) {
                st.sum += p[i];
                st.sum_sq += static_cast<double>(p[i]) * p[i];
            }
            st.n += plane_n;
        }
    }
    for (const auto& [key, st] : groups)
        if (st.n < 2) throw InsufficientData("standardization group too small");

    for (auto& sg : set) {
        const auto plane_n = static_cast<std::size_t>(sg.scales) * sg.frames;
        for (int ch = 0; ch < sg.channels; ++ch) {
            const auto& st = groups[{sg.subject_id, static_cast<int>(sg.unit), ch}];
            const double mean = st.sum / static_cast<double>(st.n);
            double var = st.sum_sq / static_cast<double>(st.n) - mean * mean;
            double sd = std::sqrt(std::max(var, 0.0));
            if (sd < 1e-8) sd = 1.0;  // dead-sensor guard
            float* p = sg.plane(ch);
            for (std::size_t i = 0; i < plane_n; ++i)
                p[i] = static_cast<float>((p[i] - mean) / sd);
        }
    }
}

}  // namespace chomp
