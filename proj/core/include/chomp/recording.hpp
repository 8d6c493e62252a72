#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chomp/tensor.hpp"

namespace chomp {

enum class UnitKind { Microphones, BoneConduction, Imu, Pressure, Ppg };
enum class Earable { Left, Right };
enum class Activity { LeftChew, RightChew, Other };
enum class NoiseCondition { None, DiningHall, Construction, EarphoneMusic };

// Static per-modality configuration: channel layout, rates, filter passband
// and CWT hop. One instance per UnitKind.
struct SensorUnit {
    UnitKind kind;
    int channels_per_earable;
    double sample_rate;    // Hz
    double passband_low;   // Hz
    double passband_high;  // Hz (may equal Nyquist; capped at design time)
    int cwt_hop;           // samples
    int cwt_scales = 64;

    double nyquist() const { return sample_rate / 2.0; }
    // A passband edge exactly at Nyquist is degenerate for the bilinear
    // transform; cap it just below.
    double capped_high() const {
        return passband_high >= nyquist() ? 0.99 * nyquist() : passband_high;
    }
};

const SensorUnit& unit_spec(UnitKind kind);
const std::array<SensorUnit, 5>& all_units();
std::string unit_name(UnitKind kind);
UnitKind unit_from_name(const std::string& name);

struct Channel {
    std::vector<float> samples;
    double sample_rate = 0.0;
    double t0 = 0.0;  // seconds on the aligned clock
    Earable earable = Earable::Left;
    UnitKind unit = UnitKind::Microphones;
    int axis_index = 0;
};

struct Recording {
    std::string subject_id;
    std::string session_id;
    Activity activity_label = Activity::Other;
    std::string other_subtype;            // set when activity_label == Other
    std::optional<std::string> food_label;
    std::optional<NoiseCondition> noise_condition;
    std::vector<Channel> channels;
    std::vector<double> interruptions;  // event timestamps, seconds

    const Channel* find_channel(Earable e, UnitKind u, int axis) const;
};

// Linear-interpolation resampling of a timestamped series onto an exact
// 1/target_rate grid spanning [first, last].
Channel resample_uniform(const std::vector<double>& timestamps,
                         const std::vector<float>& values, double target_rate);

Recording load_recording(const std::filesystem::path& dir);
void save_recording(const Recording& rec, const std::filesystem::path& dir);

std::string activity_name(Activity a);
Activity activity_from_name(const std::string& s);

}  // namespace chomp
