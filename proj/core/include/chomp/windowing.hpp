#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chomp/recording.hpp"

namespace chomp {

// Fixed-length bilateral slice of one sensor unit: rows are
// (Left ch0..C-1, Right ch0..C-1), each of length win_len * rate.
struct Window {
    UnitKind unit;
    int rows = 0;
    int cols = 0;
    std::vector<float> data;  // rows x cols, row-major
    Activity label = Activity::Other;
    std::string subject_id;
    std::string session_id;
    std::optional<std::string> food_label;
    double start_time = 0.0;

    float* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const float* row(int r) const {
        return data.data() + static_cast<std::size_t>(r) * cols;
    }
};

struct WindowingConfig {
    double win_len = 2.0;             // seconds
    double overlap = 0.5;             // fraction of win_len
    double occlusion_half_width = 1.0;  // seconds around each interruption
};

// Slices an aligned, filtered recording into labeled windows at stride
// win_len*(1-overlap), discarding any window whose open interval intersects
// an open occlusion interval around an interruption.
std::vector<Window> segment_windows(const Recording& rec, UnitKind unit,
                                    const WindowingConfig& cfg = {});

}  // namespace chomp
