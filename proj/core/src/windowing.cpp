#include "chomp/windowing.hpp"

#include <algorithm>
#include <cmath>

#include "chomp/errors.hpp"

namespace chomp {

std::vector<Window> segment_windows(const Recording& rec, UnitKind unit,
                                    const WindowingConfig& cfg) {
    const auto& spec = unit_spec(unit);
    const int c = spec.channels_per_earable;
    const double fs = spec.sample_rate;
    const auto win_samples = static_cast<int>(std::llround(cfg.win_len * fs));

    std::vector<const Channel*> chans;
    for (auto e : {Earable::Left, Earable::Right})
        for (int a = 0; a < c; ++a) {
            const Channel* ch = rec.find_channel(e, unit, a);
            if (!ch) throw MissingChannel("unit " + unit_name(unit) +
                                          " not fully present in recording");
            chans.push_back(ch);
        }

    // common aligned span across both earables
    double t_start = -1e300, t_end = 1e300;
    for (const auto* ch : chans) {
        t_start = std::max(t_start, ch->t0);
        t_end = std::min(t_end, ch->t0 + static_cast<double>(ch->samples.size()) / fs);
    }
    if (t_end - t_start < cfg.win_len - 1e-9)
        throw InsufficientData("session shorter than one window");

    const double stride = cfg.win_len * (1.0 - cfg.overlap);
    std::vector<Window> out;
    for (double start = t_start; start + cfg.win_len <= t_end + 1e-9; start += stride) {
        // open-interval intersection with occlusion zones; windows touching a
        // boundary exactly are kept
        bool occluded = false;
        for (double ev : rec.interruptions) {
            const double lo = ev - cfg.occlusion_half_width;
            const double hi = ev + cfg.occlusion_half_width;
            if (start < hi - 1e-9 && lo < start + cfg.win_len - 1e-9) {
                occluded = true;
                break;
            }
        }
        if (occluded) continue;

        Window w;
        w.unit = unit;
        w.rows = 2 * c;
        w.cols = win_samples;
        w.data.resize(static_cast<std::size_t>(w.rows) * win_samples);
        w.label = rec.activity_label;
        w.subject_id = rec.subject_id;
        w.session_id = rec.session_id;
        w.food_label = rec.food_label;
        w.start_time = start;

        bool in_range = true;
        for (std::size_t r = 0; r < chans.size() && in_range; ++r) {
            const auto* ch = chans[r];
            const auto i0 =
                static_cast<long>(std::llround((start - ch->t0) * fs));
            if (i0 < 0 ||
                i0 + win_samples > static_cast<long>(ch->samples.size())) {
                in_range = false;
                break;
            }
            std::copy_n(ch->samples.begin() + i0, win_samples,
                        w.data.begin() + static_cast<std::size_t>(r) * win_samples);
        }
        if (in_range) out.push_back(std::move(w));
    }
    return out;
}

}  // namespace chomp
