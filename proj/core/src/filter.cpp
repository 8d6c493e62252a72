#include "chomp/filter.hpp"

#include <algorithm>
#include <cmath>

#include "chomp/errors.hpp"

namespace chomp {

namespace {

constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

cplx bilinear(cplx s, double fs) {
    return (2.0 * fs + s) / (2.0 * fs - s);
}

}  // namespace

std::complex<double> BandpassFilter::response(double freq_hz) const {
    const cplx z = std::polar(1.0, 2.0 * kPi * freq_hz / fs);
    const cplx zi = 1.0 / z;
    cplx h = 1.0;
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) /
             (1.0 + s.a1 * zi + s.a2 * zi * zi);
    }
    return h;
}

double BandpassFilter::magnitude(double freq_hz) const {
    return std::abs(response(freq_hz));
}

BandpassFilter design_bandpass(double low, double high, double fs, int order) {
    if (!(low > 0.0) || !(low < high) || !(high < fs / 2.0))
        throw ConfigError("bandpass requires 0 < low < high < fs/2");
    if (order < 1 || order % 2 != 0) throw ConfigError("order must be even");

    // analog Butterworth lowpass prototype poles on the unit circle
    std::vector<cplx> proto;
    for (int k = 1; k <= order; ++k) {
        double theta = kPi * (2.0 * k + order - 1.0) / (2.0 * order);
        proto.emplace_back(std::cos(theta), std::sin(theta));
    }

    // prewarped band edges and lowpass-to-bandpass transform
    const double w1 = 2.0 * fs * std::tan(kPi * low / fs);
    const double w2 = 2.0 * fs * std::tan(kPi * high / fs);
    const double bw = w2 - w1;
    const double w0 = std::sqrt(w1 * w2);

    std::vector<cplx> poles;
    for (const auto& p : proto) {
        const cplx pb = p * bw * 0.5;
        const cplx d = std::sqrt(pb * pb - w0 * w0);
        poles.push_back(pb + d);
        poles.push_back(pb - d);
    }

    // map to z-plane; zeros land at +1 (order of them) and -1 (order of them)
    for (auto& p : poles) p = bilinear(p, fs);

    // pair complex-conjugate poles into biquads, deterministically ordered
    std::sort(poles.begin(), poles.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<bool> used(poles.size(), false);
    std::vector<std::pair<cplx, cplx>> pairs;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::size_t best = poles.size();
        double best_d = 1e300;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(poles[j] - std::conj(poles[i]));
            if (d < best_d) { best_d = d; best = j; }
        }
        if (best == poles.size()) throw ConfigError("unpaired pole in filter design");
        used[best] = true;
        pairs.emplace_back(poles[i], poles[best]);
    }

    BandpassFilter f;
    f.order = order;
    f.low = low;
    f.high = high;
    f.fs = fs;
    for (const auto& [p, q] : pairs) {
        Biquad s{};
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;  // zeros at z = +1 and z = -1
        s.a1 = -(p + q).real();
        s.a2 = (p * q).real();
        f.sections.push_back(s);
    }

    // unity gain at the (prewarped) center frequency, spread across sections
    const double f_center = std::atan(w0 / (2.0 * fs)) * fs / kPi;
    const double mag = f.magnitude(f_center);
    if (!(mag > 0.0)) throw ConfigError("degenerate bandpass design");
    const double g = std::pow(1.0 / mag, 1.0 / static_cast<double>(f.sections.size()));
    for (auto& s : f.sections) {
        s.b0 *= g;
        s.b1 *= g;
        s.b2 *= g;
    }
    return f;
}

BandpassFilter design_bandpass(const SensorUnit& unit) {
    return design_bandpass(unit.passband_low, unit.capped_high(), unit.sample_rate, 4);
}

std::vector<float> apply_bandpass(const std::vector<float>& x, const BandpassFilter& f) {
    // direct form II transposed, float64 state
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : f.sections) {
        double z1 = 0.0, z2 = 0.0;
        for (auto& v : y) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    std::vector<float> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = static_cast<float>(y[i]);
    return out;
}

Channel apply_bandpass(const Channel& ch, const BandpassFilter& f) {
    if (std::abs(ch.sample_rate - f.fs) > 1e-9)
        throw ConfigError("filter rate does not match channel rate");
    Channel out = ch;
    out.samples = apply_bandpass(ch.samples, f);
    return out;
}

}  // namespace chomp
