#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "chomp/recording.hpp"

namespace chomp {

enum class ChewSide { Left, Right, None };

// Synthetic session: side-asymmetric chewing burst trains across all five
// sensor units, or a non-chewing activity signature.
struct SynthParams {
    double chew_rate = 1.4;     // Hz, within the reported 0.94-2.17 range
    ChewSide side = ChewSide::Left;
    std::string other_subtype = "sitting_still";  // used when side == None
    double asymmetry_db = 6.0;  // ipsilateral minus contralateral burst power
    double burst_sharpness = 1.0;  // food brittleness knob (envelope exponent)
    double burst_duty = 0.35;      // food chewiness knob (fraction of cycle)
    double noise_floor_db = -40.0;
    double subject_gain_spread_db = 3.0;  // per-channel static gain mismatch
    double right_clock_offset = 0.0;      // seconds added to right-earable t0
    double duration = 30.0;               // seconds
    std::uint64_t rng_seed = 0;
    std::string subject_id = "s00";
    std::string session_id = "sess00";
    std::optional<std::string> food_label;
    int n_interruptions = 2;  // chewing sessions only
};

Recording generate_session(const SynthParams& p);

struct CorpusParams {
    int n_subjects = 4;
    int foods_per_subject = 3;
    double duration = 30.0;
    double asymmetry_db = 6.0;
    std::uint64_t seed = 0;
};

// Per subject: one left and one right session per food plus five non-chewing
// sessions. Returns the number of sessions written.
int generate_corpus(const CorpusParams& cp, const std::filesystem::path& out_dir);

}  // namespace chomp
