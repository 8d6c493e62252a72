#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "chomp/tensor.hpp"
#include "chomp/windowing.hpp"

namespace chomp {

// Complex-Morlet CWT plan for one sensor unit: 64 log-spaced center
// frequencies from f_min to Nyquist, scales s = fs*omega0 / (2*pi*f).
struct CwtPlan {
    double omega0 = 6.0;
    double f_min = 0.5;
    double f_max = 0.0;
    int n_scales = 64;
    double fs = 0.0;
    int hop = 0;
    std::vector<double> scales;             // samples, one per row
    std::vector<double> center_frequencies;  // Hz

    int frames_for(int window_samples) const { return window_samples / hop; }
};

CwtPlan make_plan(const SensorUnit& unit);

// Per-window log-power scalogram stack with the keys the normalization
// stage groups by.
struct Scalogram {
    UnitKind unit;
    int channels = 0;  // 2C rows: Left ch0..C-1 then Right ch0..C-1
    int scales = 0;
    int frames = 0;
    std::vector<float> values;  // (channels, scales, frames) row-major, dB
    Activity label = Activity::Other;
    std::string subject_id;
    std::string session_id;
    std::optional<std::string> food_label;
    double start_time = 0.0;

    float* plane(int ch) {
        return values.data() + static_cast<std::size_t>(ch) * scales * frames;
    }
    const float* plane(int ch) const {
        return values.data() + static_cast<std::size_t>(ch) * scales * frames;
    }
    Tensor to_tensor() const;
};

// CWT of one channel evaluated on the hop grid; row-major (n_scales, frames).
std::vector<std::complex<double>> cwt_window(const std::vector<float>& x,
                                             const CwtPlan& plan);

// Eq.-style log-power map: 10*log10(max(|W|^2, eps)).
std::vector<float> log_power(const std::vector<std::complex<double>>& w,
                             double eps = 1e-10);

// Full per-window transform: every channel row -> CWT -> log power -> stack.
Scalogram scalogram_window(const Window& w, const CwtPlan& plan);

// In-place standardization per (subject, earable, channel) group; statistics
// pooled over scales and frames of all windows in the provided set. Groups
// with sigma < 1e-8 divide by 1.
void standardize(std::vector<Scalogram>& set);

}  // namespace chomp
