#include "chomp/synth.hpp"

#include <cmath>
#include <random>

#include "chomp/errors.hpp"
#include "chomp/rng.hpp"

namespace chomp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Hann-shaped burst envelope raised to a sharpness power; sharper bursts
// emulate more brittle foods.
double burst_envelope(double phase, double duty, double sharpness) {
    if (phase < 0.0 || phase >= duty) return 0.0;
    const double h = 0.5 - 0.5 * std::cos(2.0 * kPi * phase / duty);
    return std::pow(h, sharpness);
}

struct ChannelPlan {
    Earable earable;
    UnitKind unit;
    int axis;
};

}  // namespace

Recording generate_session(const SynthParams& p) {
    if (p.side != ChewSide::None &&
        (p.chew_rate < 0.94 || p.chew_rate > 2.17))
        throw ConfigError("chew_rate outside plausible range");
    if (p.asymmetry_db < 0.0) throw ConfigError("asymmetry_db must be >= 0");

    Recording rec;
    rec.subject_id = p.subject_id;
    rec.session_id = p.session_id;
    rec.food_label = p.food_label;
    switch (p.side) {
        case ChewSide::Left: rec.activity_label = Activity::LeftChew; break;
        case ChewSide::Right: rec.activity_label = Activity::RightChew; break;
        case ChewSide::None:
            rec.activity_label = Activity::Other;
            rec.other_subtype = p.other_subtype;
            break;
    }

    const double noise_floor = std::pow(10.0, p.noise_floor_db / 20.0);
    const double asym_gain = std::pow(10.0, p.asymmetry_db / 20.0);

    if (p.side != ChewSide::None && p.n_interruptions > 0) {
        Rng irng = make_rng(p.rng_seed, "interruptions/" + p.session_id);
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        for (int i = 1; i <= p.n_interruptions; ++i) {
            double t = p.duration * i / (p.n_interruptions + 1) + jitter(irng);
            if (t > 2.0 && t < p.duration - 2.0) rec.interruptions.push_back(t);
        }
    }

    for (const auto& spec : all_units()) {
        for (auto e : {Earable::Left, Earable::Right}) {
            for (int axis = 0; axis < spec.channels_per_earable; ++axis) {
                const std::string tag = "chan/" + p.session_id + "/" +
                                        unit_name(spec.kind) + "/" +
                                        (e == Earable::Left ? "L" : "R") +
                                        std::to_string(axis);
                Rng rng = make_rng(p.rng_seed, tag);
                std::normal_distribution<double> gauss(0.0, 1.0);
                std::uniform_real_distribution<double> uni(0.0, 1.0);

                const auto n = static_cast<std::size_t>(
                    std::llround(p.duration * spec.sample_rate));
                Channel ch;
                ch.sample_rate = spec.sample_rate;
                ch.earable = e;
                ch.unit = spec.kind;
                ch.axis_index = axis;
                ch.t0 = e == Earable::Right ? p.right_clock_offset : 0.0;
                ch.samples.resize(n);

                const bool ipsilateral =
                    (p.side == ChewSide::Left && e == Earable::Left) ||
                    (p.side == ChewSide::Right && e == Earable::Right);
                const double burst_gain = ipsilateral ? asym_gain : 1.0;
                const bool broadband = spec.kind == UnitKind::Microphones ||
                                       spec.kind == UnitKind::BoneConduction;
                // low-rate units carry a slow carrier inside the 0.1-6 Hz band
                const double carrier_hz = 3.0 + 0.5 * axis;

                for (std::size_t i = 0; i < n; ++i) {
                    const double t = static_cast<double>(i) / spec.sample_rate;
                    double v = noise_floor * gauss(rng);
                    if (p.side != ChewSide::None) {
                        const double cycle = t * p.chew_rate;
                        const double phase = cycle - std::floor(cycle);
                        const double env = burst_envelope(phase / 1.0, p.burst_duty,
                                                          p.burst_sharpness);
                        if (env > 0.0) {
                            const double carrier =
                                broadband ? gauss(rng)
                                          : std::sin(2.0 * kPi * carrier_hz * t);
                            v += burst_gain * env * carrier;
                        }
                    } else if (p.other_subtype == "reading") {
                        if (broadband) {
                            const double mod =
                                0.5 + 0.5 * std::sin(2.0 * kPi * 0.4 * t);
                            v += 0.5 * mod * gauss(rng);
                        }
                    } else if (p.other_subtype == "head_movement") {
                        if (spec.kind == UnitKind::Imu)
                            v += 0.8 * std::sin(2.0 * kPi * 0.3 * t + axis);
                    } else if (p.other_subtype == "walking") {
                        if (spec.kind == UnitKind::Imu ||
                            spec.kind == UnitKind::Pressure)
                            v += 0.6 * std::sin(2.0 * kPi * 2.6 * t + axis);
                    } else if (p.other_subtype == "drinking") {
                        // sparse gulps roughly every 5 s
                        const double phase = std::fmod(t, 5.0);
                        if (phase < 0.8 && spec.kind != UnitKind::Microphones)
                            v += 0.7 * std::sin(kPi * phase / 0.8) *
                                 std::sin(2.0 * kPi * 1.0 * t);
                    }
                    ch.samples[i] = static_cast<float>(v);
                }

                // static per-subject, per-channel gain/bias mismatch; removed
                // later by per-subject standardization
                Rng srng = make_rng(p.rng_seed, "subject-profile/" + p.subject_id +
                                                    "/" + tag.substr(5 + p.session_id.size()));
                std::uniform_real_distribution<double> gain_db(
                    -p.subject_gain_spread_db, p.subject_gain_spread_db);
                const double gain = std::pow(10.0, gain_db(srng) / 20.0);
                const auto bias = static_cast<float>(0.01 * gain_db(srng));
                for (auto& s : ch.samples)
                    s = static_cast<float>(s * gain) + bias;

                rec.channels.push_back(std::move(ch));
            }
        }
    }
    return rec;
}

int generate_corpus(const CorpusParams& cp, const std::filesystem::path& out_dir) {
    if (cp.n_subjects < 2) throw ConfigError("corpus needs >= 2 subjects");
    std::filesystem::create_directories(out_dir);
    static const char* kSubtypes[5] = {"sitting_still", "reading", "head_movement",
                                       "drinking", "walking"};
    int written = 0;
    for (int s = 0; s < cp.n_subjects; ++s) {
        char subj[8];
        std::snprintf(subj, sizeof(subj), "s%02d", s);
        int session = 0;
        Rng rate_rng = make_rng(cp.seed, std::string("chew-rate/") + subj);
        std::uniform_real_distribution<double> rate(0.95, 2.15);
        for (int f = 0; f < cp.foods_per_subject; ++f) {
            for (auto side : {ChewSide::Left, ChewSide::Right}) {
                SynthParams p;
                p.subject_id = subj;
                p.session_id = subj + std::string("_sess") + std::to_string(session);
                p.side = side;
                p.chew_rate = rate(rate_rng);
                p.food_label = "food" + std::to_string(f);
                // food texture axes: brittleness -> sharpness, chewiness -> duty
                p.burst_sharpness = 0.8 + 0.6 * (f % 3);
                p.burst_duty = 0.25 + 0.1 * (f % 4);
                p.asymmetry_db = cp.asymmetry_db;
                p.duration = cp.duration;
                p.rng_seed = derive_seed(cp.seed, p.session_id);
                save_recording(generate_session(p), out_dir / p.session_id);
                ++session;
                ++written;
            }
        }
        for (int k = 0; k < 5; ++k) {
            SynthParams p;
            p.subject_id = subj;
            p.session_id = subj + std::string("_sess") + std::to_string(session);
            p.side = ChewSide::None;
            p.other_subtype = kSubtypes[k];
            p.duration = cp.duration;
            p.n_interruptions = 0;
            p.rng_seed = derive_seed(cp.seed, p.session_id);
            save_recording(generate_session(p), out_dir / p.session_id);
            ++session;
            ++written;
        }
    }
    return written;
}

}  // namespace chomp
