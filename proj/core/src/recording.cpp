#include "chomp/recording.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "chomp/errors.hpp"

namespace chomp {

namespace {

// Table-driven per-unit configuration (channels, rate, passband, hop).
const std::array<SensorUnit, 5> kUnits = {{
    {UnitKind::Microphones, 2, 8000.0, 0.1, 4000.0, 128},
    {UnitKind::BoneConduction, 3, 1600.0, 0.1, 800.0, 32},
    {UnitKind::Imu, 6, 100.0, 0.1, 6.0, 4},
    {UnitKind::Pressure, 1, 100.0, 0.1, 6.0, 4},
    {UnitKind::Ppg, 3, 50.0, 0.1, 6.0, 2},
}};

const std::map<std::string, UnitKind> kUnitNames = {
    {"mic", UnitKind::Microphones},  {"bone", UnitKind::BoneConduction},
    {"imu", UnitKind::Imu},          {"pressure", UnitKind::Pressure},
    {"ppg", UnitKind::Ppg},
};

}  // namespace

const SensorUnit& unit_spec(UnitKind kind) {
    for (const auto& u : kUnits)
        if (u.kind == kind) return u;
    throw ConfigError("unknown unit kind");
}

const std::array<SensorUnit, 5>& all_units() { return kUnits; }

std::string unit_name(UnitKind kind) {
    for (const auto& [n, k] : kUnitNames)
        if (k == kind) return n;
    throw ConfigError("unknown unit kind");
}

UnitKind unit_from_name(const std::string& name) {
    auto it = kUnitNames.find(name);
    if (it == kUnitNames.end()) throw ConfigError("unknown sensor unit: " + name);
    return it->second;
}

std::string activity_name(Activity a) {
    switch (a) {
        case Activity::LeftChew: return "left_chew";
        case Activity::RightChew: return "right_chew";
        case Activity::Other: return "other";
    }
    throw ConfigError("bad activity");
}

Activity activity_from_name(const std::string& s) {
    if (s == "left_chew") return Activity::LeftChew;
    if (s == "right_chew") return Activity::RightChew;
    if (s == "other") return Activity::Other;
    throw FormatError("unknown activity label: " + s);
}

const Channel* Recording::find_channel(Earable e, UnitKind u, int axis) const {
    for (const auto& c : channels)
        if (c.earable == e && c.unit == u && c.axis_index == axis) return &c;
    return nullptr;
}

Channel resample_uniform(const std::vector<double>& timestamps,
                         const std::vector<float>& values, double target_rate) {
    if (timestamps.size() != values.size())
        throw FormatError("timestamp/value length mismatch");
    if (timestamps.size() < 2) throw InsufficientData("resampling needs >= 2 samples");
    for (std::size_t i = 1; i < timestamps.size(); ++i)
        if (!(timestamps[i] > timestamps[i - 1]))
            throw FormatError("timestamps must be strictly increasing");

    const double dt = 1.0 / target_rate;
    const double t_first = timestamps.front();
    const double t_last = timestamps.back();
    const auto n = static_cast<std::size_t>(std::floor((t_last - t_first) / dt + 1e-9)) + 1;

    Channel out;
    out.sample_rate = target_rate;
    out.t0 = t_first;
    out.samples.resize(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_first + static_cast<double>(i) * dt;
        while (j + 2 < timestamps.size() && timestamps[j + 1] <= t) ++j;
        const double ta = timestamps[j], tb = timestamps[j + 1];
        const double w = (t - ta) / (tb - ta);
        out.samples[i] = static_cast<float>((1.0 - w) * values[j] + w * values[j + 1]);
    }
    return out;
}

namespace {

std::string earable_name(Earable e) { return e == Earable::Left ? "left" : "right"; }

Earable earable_from_name(const std::string& s) {
    if (s == "left") return Earable::Left;
    if (s == "right") return Earable::Right;
    throw FormatError("unknown earable: " + s);
}

std::string noise_name(NoiseCondition n) {
    switch (n) {
        case NoiseCondition::None: return "none";
        case NoiseCondition::DiningHall: return "dining_hall";
        case NoiseCondition::Construction: return "construction";
        case NoiseCondition::EarphoneMusic: return "earphone_music";
    }
    throw ConfigError("bad noise condition");
}

NoiseCondition noise_from_name(const std::string& s) {
    if (s == "none") return NoiseCondition::None;
    if (s == "dining_hall") return NoiseCondition::DiningHall;
    if (s == "construction") return NoiseCondition::Construction;
    if (s == "earphone_music") return NoiseCondition::EarphoneMusic;
    throw FormatError("unknown noise condition: " + s);
}

}  // namespace

void save_recording(const Recording& rec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream man(dir / "manifest.txt", std::ios::trunc);
    if (!man) throw FormatError("cannot write manifest in " + dir.string());
    man << "subject: " << rec.subject_id << "\n";
    man << "session: " << rec.session_id << "\n";
    man << "activity: " << activity_name(rec.activity_label) << "\n";
    if (!rec.other_subtype.empty()) man << "other_subtype: " << rec.other_subtype << "\n";
    if (rec.food_label) man << "food: " << *rec.food_label << "\n";
    if (rec.noise_condition) man << "noise: " << noise_name(*rec.noise_condition) << "\n";
    if (!rec.interruptions.empty()) {
        man << "interruptions:";
        for (double t : rec.interruptions) man << " " << t;
        man << "\n";
    }
    for (const auto& ch : rec.channels) {
        std::ostringstream name;
        name << earable_name(ch.earable) << "_" << unit_name(ch.unit) << "_"
             << ch.axis_index << ".t32";
        man << "channel: " << name.str() << " " << earable_name(ch.earable) << " "
            << unit_name(ch.unit) << " " << ch.axis_index << " " << ch.sample_rate
            << " " << ch.t0 << "\n";
        Tensor t{{static_cast<std::uint32_t>(ch.samples.size())}};
        t.data = ch.samples;
        write_tensor(t, dir / name.str());
    }
}

Recording load_recording(const std::filesystem::path& dir) {
    std::ifstream man(dir / "manifest.txt");
    if (!man) throw FormatError("missing manifest in " + dir.string());

    Recording rec;
    std::string line;
    while (std::getline(man, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw FormatError("bad manifest line: " + line);
        std::string key = line.substr(0, colon);
        std::string val = line.substr(colon + 1);
        if (!val.empty() && val.front() == ' ') val.erase(0, 1);
        if (key == "subject") rec.subject_id = val;
        else if (key == "session") rec.session_id = val;
        else if (key == "activity") rec.activity_label = activity_from_name(val);
        else if (key == "other_subtype") rec.other_subtype = val;
        else if (key == "food") rec.food_label = val;
        else if (key == "noise") rec.noise_condition = noise_from_name(val);
        else if (key == "offset_estimate") { /* informational, written by sync */ }
        else if (key == "interruptions") {
            std::istringstream ss(val);
            double t;
            while (ss >> t) rec.interruptions.push_back(t);
        } else if (key == "channel") {
            std::istringstream ss(val);
            std::string file, earable, unit;
            int axis;
            double rate, t0 = 0.0;
            if (!(ss >> file >> earable >> unit >> axis >> rate))
                throw FormatError("bad channel line: " + line);
            ss >> t0;
            auto path = dir / file;
            if (!std::filesystem::exists(path))
                throw MissingChannel("channel file missing: " + path.string());
            Tensor t = read_tensor(path);
            if (t.shape.size() != 1)
                throw FormatError("channel tensor must be rank 1: " + path.string());
            Channel ch;
            ch.earable = earable_from_name(earable);
            ch.unit = unit_from_name(unit);
            ch.axis_index = axis;
            ch.sample_rate = rate;
            ch.t0 = t0;
            ch.samples = std::move(t.data);
            const auto& spec = unit_spec(ch.unit);
            if (std::abs(rate - spec.sample_rate) > 1e-9)
                throw FormatError("rate mismatch for " + file);
            for (float v : ch.samples)
                if (!std::isfinite(v)) throw CorruptData("non-finite sample in " + file);
            rec.channels.push_back(std::move(ch));
        } else {
            throw FormatError("unknown manifest key: " + key);
        }
    }

    // every unit present must contribute the full bilateral channel set
    for (const auto& spec : all_units()) {
        bool any = false;
        for (const auto& c : rec.channels) any = any || c.unit == spec.kind;
        if (!any) continue;
        for (auto e : {Earable::Left, Earable::Right})
            for (int a = 0; a < spec.channels_per_earable; ++a)
                if (!rec.find_channel(e, spec.kind, a))
                    throw MissingChannel("incomplete channel set for unit " +
                                         unit_name(spec.kind));
    }
    return rec;
}

}  // namespace chomp
