#include <doctest.h>

#include "chomp/synth.hpp"
#include "chomp/windowing.hpp"

using namespace chomp;

namespace {
Recording session_30s(std::uint64_t seed) {
    SynthParams p;
    p.duration = 30.0;
    p.n_interruptions = 0;
    p.rng_seed = seed;
    return generate_session(p);
}
}  // namespace

TEST_CASE("30 s at 2 s windows and 50% overlap yields 29 windows") {
    const Recording rec = session_30s(1);
    const auto ws = segment_windows(rec, UnitKind::Microphones);
    CHECK(ws.size() == 29);
    for (const auto& w : ws) {
        CHECK(w.rows == 4);  // two earables x two mics
        CHECK(w.cols == 16000);
        CHECK(w.label == Activity::LeftChew);
        CHECK(w.subject_id == rec.subject_id);
    }
    CHECK(ws[0].start_time == doctest::Approx(0.0));
    CHECK(ws[1].start_time == doctest::Approx(1.0));
    CHECK(ws.back().start_time == doctest::Approx(28.0));
}

TEST_CASE("occlusion drops windows overlapping an interruption") {
    Recording rec = session_30s(2);
    rec.interruptions = {15.0};
    const auto ws = segment_windows(rec, UnitKind::Imu);
    // occlusion interval (14, 16) open: starts 13, 14, 15 intersect it
    CHECK(ws.size() == 26);
    for (const auto& w : ws) {
        const bool dropped = w.start_time > 12.5 && w.start_time < 15.5;
        CHECK_FALSE(dropped);
    }
}

TEST_CASE("window rows follow the left-then-right channel order") {
    const Recording rec = session_30s(3);
    const auto ws = segment_windows(rec, UnitKind::Ppg);
    REQUIRE(!ws.empty());
    const auto& w = ws[0];
    CHECK(w.rows == 6);
    const auto* l0 = rec.find_channel(Earable::Left, UnitKind::Ppg, 0);
    const auto* r2 = rec.find_channel(Earable::Right, UnitKind::Ppg, 2);
    REQUIRE(l0 != nullptr);
    REQUIRE(r2 != nullptr);
    CHECK(w.row(0)[0] == l0->samples[0]);
    CHECK(w.row(5)[0] == r2->samples[0]);
}

TEST_CASE("non-chewing sessions label every window Other") {
    SynthParams p;
    p.duration = 10.0;
    p.side = ChewSide::None;
    p.n_interruptions = 0;
    p.rng_seed = 4;
    const auto ws = segment_windows(generate_session(p), UnitKind::Pressure);
    CHECK(ws.size() == 9);
    for (const auto& w : ws) CHECK(w.label == Activity::Other);
}
