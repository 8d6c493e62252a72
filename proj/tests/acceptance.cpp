// Acceptance harness: one pass/fail line per criterion. argv[1] is the path
// to the chomp CLI binary (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chomp/cspsim.hpp"
#include "chomp/cwt.hpp"
#include "chomp/eval.hpp"
#include "chomp/features.hpp"
#include "chomp/filter.hpp"
#include "chomp/forest.hpp"
#include "chomp/nn/model.hpp"
#include "chomp/nn/train.hpp"
#include "chomp/pipeline.hpp"
#include "chomp/sync.hpp"
#include "chomp/synth.hpp"
#include "chomp/windowing.hpp"

using namespace chomp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << idx << " (" << name
              << "): " << detail << "\n"
              << std::flush;
    if (!ok) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// --------------------------------------------------------------------------

void criterion_1_monte_carlo() {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = true;

    SimConfig clean;
    clean.error_rate = 0.0;
    clean.durations_min = {5.0};
    SimReport rep = monte_carlo(clean);
    for (const auto& cell : rep.cells) {
        const double dev = std::abs(cell.mean_observed - cell.mu);
        if (dev >= 0.003) ok = false;
        detail << "e=0 mu=" << cell.mu << " mean=" << cell.mean_observed << "; ";
    }

    SimConfig noisy;
    noisy.mus = {0.65};
    noisy.durations_min = {5.0};
    rep = monte_carlo(noisy);
    const double mean = rep.cells[0].mean_observed;
    if (std::abs(mean - 0.636) >= 0.003) ok = false;
    detail << "e=4.6% mu=0.65 mean=" << mean << "; ";

    SimConfig full;  // the published operating point
    const SimReport frep = monte_carlo(full);
    const auto verdicts = diagnose(frep);
    const std::vector<std::pair<double, double>> published = {
        {0.70, 1.0}, {0.65, 5.0}, {0.60, 15.0}};
    bool matches = true;
    for (const auto& [mu, dur] : published) {
        double got = -1.0;
        for (const auto& v : verdicts)
            if (std::abs(v.mu - mu) < 1e-9 && v.detected)
                got = v.minimal_duration_min;
        detail << "mu=" << mu << " onset=" << got << "min; ";
        if (got != dur) matches = false;
    }
    if (!matches) {
        // sanctioned pass path: the report must state the computed onsets and
        // the deviation from the published figure
        const std::string text = format_sim_report(frep);
        if (text.find("deviation") == std::string::npos) ok = false;
        detail << "deviation noted in report; ";
    }

    const double secs = elapsed_s(t0);
    if (secs >= 30.0) ok = false;
    detail << secs << "s";
    report(1, "monte carlo", ok, detail.str());
}

void criterion_2_shapes() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Expect {
        UnitKind unit;
        int channels, frames;
    };
    const Expect table[] = {
        {UnitKind::Microphones, 4, 125}, {UnitKind::BoneConduction, 6, 100},
        {UnitKind::Imu, 12, 50},         {UnitKind::Pressure, 2, 50},
        {UnitKind::Ppg, 6, 50},
    };
    SynthParams p;
    p.duration = 4.0;
    p.n_interruptions = 0;
    p.rng_seed = 21;
    const Recording rec = generate_session(p);
    bool ok = true;
    std::ostringstream detail;
    for (const auto& e : table) {
        const auto ws = segment_windows(rec, e.unit);
        if (ws.empty()) {
            ok = false;
            continue;
        }
        const auto sg = scalogram_window(ws[0], make_plan(unit_spec(e.unit)));
        const bool good =
            sg.channels == e.channels && sg.scales == 64 && sg.frames == e.frames;
        if (!good) ok = false;
        detail << unit_name(e.unit) << "=(" << sg.channels << "," << sg.scales
               << "," << sg.frames << ") ";
    }
    const double secs = elapsed_s(t0);
    if (secs >= 5.0) ok = false;
    detail << secs << "s";
    report(2, "scalogram shapes", ok, detail.str());
}

void criterion_3_cwt() {
    bool ok = true;
    std::ostringstream detail;
    Rng rng = make_rng(0, "acceptance/cwt-tones");
    double max_rel = 0.0;
    int bad_frames = 0, total = 0;
    for (const auto& unit : all_units()) {
        const CwtPlan plan = make_plan(unit);
        for (int k = 0; k < plan.n_scales; ++k) {
            const double expect =
                plan.fs * plan.omega0 / (2.0 * M_PI * plan.center_frequencies[k]);
            max_rel = std::max(max_rel, std::abs(plan.scales[k] - expect) / expect);
        }
        // interior rows: the truncated wavelet support (8 s_k samples) fits
        // the 2 s window, i.e. f_k >= 2*omega0/pi, and below the Nyquist row
        const double f_lo = 2.0 * plan.omega0 / M_PI;
        std::vector<int> interior;
        for (int k = 0; k < plan.n_scales - 1; ++k)
            if (plan.center_frequencies[k] >= f_lo) interior.push_back(k);
        std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
        const int len = static_cast<int>(2.0 * unit.sample_rate);
        const int frames = plan.frames_for(len);
        for (int trial = 0; trial < 10; ++trial) {
            const int target = interior[pick(rng)];
            const double f = plan.center_frequencies[target];
            std::vector<float> x(len);
            for (int i = 0; i < len; ++i)
                x[i] = static_cast<float>(
                    std::cos(2.0 * M_PI * f * i / unit.sample_rate));
            const auto w = cwt_window(x, plan);
            for (int j = frames / 4; j < 3 * frames / 4; ++j) {
                int best = 0;
                double best_mag = -1.0;
                for (int s = 0; s < plan.n_scales; ++s) {
                    const double m =
                        std::abs(w[static_cast<std::size_t>(s) * frames + j]);
                    if (m > best_mag) {
                        best_mag = m;
                        best = s;
                    }
                }
                ++total;
                if (best != target) ++bad_frames;
            }
        }
    }
    if (max_rel > 1e-9) ok = false;
    detail << "scale rel err " << max_rel << "; ";
    if (bad_frames != 0) ok = false;
    detail << "tone frames mislocalized " << bad_frames << "/" << total
           << " across all units";
    report(3, "cwt localization", ok, detail.str());
}

void criterion_4_gcc_phat() {
    AlignmentConfig cfg;
    const double fs = 8000.0;
    const auto clean = generate_alignment_signal(cfg, fs, 77);
    bool ok = true;
    std::ostringstream detail;

    // noiseless: exact for a handful of lags
    for (long shift : {0L, 128L, -4111L, 9000L}) {
        std::vector<float> right(clean.size(), 0.0f);
        for (long i = 0; i < static_cast<long>(right.size()); ++i) {
            const long j = i - shift;
            if (j >= 0 && j < static_cast<long>(clean.size())) right[i] = clean[j];
        }
        const auto est = gcc_phat_offset(clean, right, fs, 2.0, cfg.gaussian_sigma);
        if (est.lag_index != shift) ok = false;
    }
    detail << "noiseless exact; ";

    double sig_pow = 0.0;
    for (float v : clean) sig_pow += static_cast<double>(v) * v;
    sig_pow /= static_cast<double>(clean.size());
    const double noise_sd = std::sqrt(sig_pow / std::pow(10.0, 10.0 / 10.0));

    Rng rng = make_rng(0, "acceptance/gcc-trials");
    std::uniform_int_distribution<long> lag(-16000, 16000);
    std::normal_distribution<double> noise(0.0, noise_sd);
    int within = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const long shift = lag(rng);
        std::vector<float> left(clean.size()), right(clean.size());
        for (long i = 0; i < static_cast<long>(clean.size()); ++i) {
            left[i] = clean[i] + static_cast<float>(noise(rng));
            const long j = i - shift;
            const float base =
                (j >= 0 && j < static_cast<long>(clean.size())) ? clean[j] : 0.0f;
            right[i] = base + static_cast<float>(noise(rng));
        }
        const auto est = gcc_phat_offset(left, right, fs, 2.0, cfg.gaussian_sigma);
        if (std::abs(est.lag_index - shift) <= 1) ++within;
    }
    if (within < 99) ok = false;
    detail << "snr10 within +-1 sample: " << within << "/" << trials;
    report(4, "gcc-phat", ok, detail.str());
}

void criterion_5_filters() {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& unit : all_units()) {
        const BandpassFilter f = design_bandpass(unit);
        const double center = std::sqrt(unit.passband_low * unit.capped_high());
        const double pass = f.magnitude(center);
        const double stop_freq = std::min(2.0 * unit.capped_high(), unit.nyquist());
        const double stop_db = 20.0 * std::log10(std::max(f.magnitude(stop_freq), 1e-30));
        if (pass < 0.95 || stop_db > -20.0) ok = false;
        detail << unit_name(unit.kind) << " pass=" << pass << " stop=" << stop_db
               << "dB; ";
    }
    report(5, "filters", ok, detail.str());
}

std::vector<Scalogram> small_scalogram_set() {
    std::vector<Scalogram> set;
    SynthParams p;
    p.duration = 6.0;
    p.n_interruptions = 0;
    const CwtPlan plan = make_plan(unit_spec(UnitKind::Pressure));
    for (std::uint64_t seed : {1ull, 2ull}) {
        p.rng_seed = seed;
        p.subject_id = "s" + std::to_string(seed);
        const Recording rec = generate_session(p);
        for (const auto& w : segment_windows(rec, UnitKind::Pressure))
            set.push_back(scalogram_window(w, plan));
    }
    return set;
}

void criterion_6_standardization() {
    bool ok = true;
    std::ostringstream detail;
    auto set = small_scalogram_set();
    standardize(set);
    double worst_mean = 0.0, worst_sd = 0.0;
    for (const std::string& subj : {std::string("s1"), std::string("s2")}) {
        for (int ch = 0; ch < 2; ++ch) {
            double sum = 0.0, sum_sq = 0.0;
            std::size_t n = 0;
            for (const auto& sg : set) {
                if (sg.subject_id != subj) continue;
                const float* pl = sg.plane(ch);
                const auto pn = static_cast<std::size_t>(sg.scales) * sg.frames;
                for (std::size_t i = 0; i < pn; ++i) {
                    sum += pl[i];
                    sum_sq += static_cast<double>(pl[i]) * pl[i];
                }
                n += pn;
            }
            const double mean = sum / static_cast<double>(n);
            const double sd =
                std::sqrt(sum_sq / static_cast<double>(n) - mean * mean);
            worst_mean = std::max(worst_mean, std::abs(mean));
            worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
        }
    }
    if (worst_mean >= 1e-6 || worst_sd >= 1e-4) ok = false;
    detail << "|mean|<=" << worst_mean << " |sd-1|<=" << worst_sd << "; ";

    // leakage: perturbing the test portion leaves the train portion untouched
    const auto raw = small_scalogram_set();
    std::vector<Scalogram> train_a, test_a, train_b, test_b;
    for (const auto& sg : raw)
        (sg.subject_id == "s1" ? train_a : test_a).push_back(sg);
    train_b = train_a;
    test_b = test_a;
    for (auto& sg : test_b)
        for (auto& v : sg.values) v += 5.0f;
    standardize(train_a);
    standardize(test_a);
    standardize(train_b);
    standardize(test_b);
    bool identical = train_a.size() == train_b.size();
    for (std::size_t i = 0; identical && i < train_a.size(); ++i)
        identical = train_a[i].values == train_b[i].values;
    if (!identical) ok = false;
    detail << (identical ? "train stats independent of test"
                         : "test perturbation leaked into train");
    report(6, "standardization", ok, detail.str());
}

void criterion_7_model_size() {
    bool ok = true;
    std::ostringstream detail;
    const nn::BackboneConfig cfg;
    if (cfg.feature_dim != 112) ok = false;
    detail << "feature dim " << cfg.feature_dim << "; ";

    auto check_band = [&](std::size_t n, double target, const char* name) {
        const double dev = std::abs(static_cast<double>(n) - target) / target;
        if (dev > 0.15) ok = false;
        detail << name << "=" << n << " (" << dev * 100.0 << "% off); ";
    };
    {
        nn::SingleSensorModel<float> m;
        m.init(cfg, 0);
        nn::ParamList<float> p;
        m.params(p);
        const std::size_t n = nn::param_count(p);
        check_band(n, 0.53e6, "single");
        if (nn::single_model_complexity(cfg, 64, 125).params != n) ok = false;
    }
    {
        nn::FusionModel<float> m;
        m.init({cfg, cfg}, 0);
        nn::ParamList<float> p;
        m.params(p);
        check_band(nn::param_count(p), 1.45e6, "fusion2");
    }
    {
        nn::FusionModel<float> m;
        m.init({cfg, cfg, cfg}, 0);
        nn::ParamList<float> p;
        m.params(p);
        check_band(nn::param_count(p), 2.05e6, "fusion3");
    }
    report(7, "feature dim and parameter bands", ok, detail.str());
}

void criterion_8_gradients() {
    bool ok = true;
    std::ostringstream detail;
    // the real architecture, all layer types; spatial sizes large enough
    // that late-stage batch norms see more than a couple of rows
    const nn::BackboneConfig cfg;
    const double single = nn::gradient_check_single(cfg, 64, 50, 4, 42, 200);
    detail << "single max rel err " << single << "; ";
    const double fusion =
        nn::gradient_check_fusion({cfg, cfg}, {{64, 50}, {32, 25}}, 8, 42, 200);
    detail << "fusion max rel err " << fusion;
    if (single >= 1e-4 || fusion >= 1e-4) ok = false;
    report(8, "gradient checks", ok, detail.str());
}

// Reduced end-to-end schedule sized for the single-core budget; the protocol
// structure (LOSO, per-fold standardization, warm-up freeze, early stopping)
// is identical to the full configuration.
struct E2eSchedule {
    int subjects = 6;
    int foods = 3;
    double duration = 12.0;
    int max_epochs = 6;
    int fusion_epochs = 2;
    int warmup_epochs = 2;
    int patience = 3;
    int batch_size = 64;
};

void criterion_9_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    const E2eSchedule sched;

    const fs::path dir = fs::temp_directory_path() / "chomp_acceptance_corpus";
    fs::remove_all(dir);
    CorpusParams cp;
    cp.n_subjects = sched.subjects;
    cp.foods_per_subject = sched.foods;
    cp.duration = sched.duration;
    cp.asymmetry_db = 6.0;
    cp.seed = 42;
    generate_corpus(cp, dir);
    auto recs = load_corpus(dir);
    for (auto& r : recs) preprocess_recording(r);

    CnnEvalConfig cfg;
    cfg.train.max_epochs = sched.max_epochs;
    cfg.train.fusion_max_epochs = sched.fusion_epochs;
    cfg.train.warmup_epochs = sched.warmup_epochs;
    cfg.train.patience = sched.patience;
    cfg.train.batch_size = sched.batch_size;

    const auto mic_scals =
        make_scalograms(make_windows(recs, UnitKind::Microphones),
                        UnitKind::Microphones);
    const ProtocolReport single =
        run_cnn_single(mic_scals, cfg, Protocol::Loso, 42);
    detail << "mic single median F1 " << single.median_f1 << "; ";
    if (single.median_f1 < 0.95) ok = false;

    std::vector<std::vector<Scalogram>> per_unit;
    per_unit.push_back(mic_scals);
    for (auto u : {UnitKind::Pressure, UnitKind::Ppg})
        per_unit.push_back(make_scalograms(make_windows(recs, u), u));
    const ProtocolReport fusion =
        run_cnn_fusion(per_unit, cfg, Protocol::Loso, 42);
    detail << "fusion median F1 " << fusion.median_f1 << "; ";
    if (fusion.median_f1 < single.median_f1 - 0.02) ok = false;

    fs::remove_all(dir);
    const double secs = elapsed_s(t0);
    if (secs >= 900.0) ok = false;
    detail << secs << "s";
    report(9, "end-to-end learning", ok, detail.str());
}

void criterion_10_training_protocol() {
    bool ok = true;
    std::ostringstream detail;

    const nn::TrainConfig defaults;
    if (defaults.patience != 20 || defaults.max_epochs != 100 ||
        defaults.fusion_max_epochs != 30 || defaults.batch_size != 64 ||
        defaults.warmup_epochs != 3)
        ok = false;
    detail << "defaults patience=" << defaults.patience
           << " single<=" << defaults.max_epochs
           << " fusion<=" << defaults.fusion_max_epochs
           << " batch=" << defaults.batch_size << "; ";

    nn::BackboneConfig tiny;
    tiny.in_channels = 2;
    tiny.stem_channels = 4;
    tiny.blocks = {{8, 1, 1}, {8, 2, 2}};
    tiny.feature_dim = 8;

    auto make_data = [&](std::uint64_t seed) {
        nn::Batchset<float> d;
        d.h = 8;
        d.w = 8;
        d.c = 2;
        Rng rng = make_rng(seed, "acceptance/e10-data");
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 30; ++i) {
            nn::Mat<float> m(64, 2);
            for (Eigen::Index j = 0; j < m.size(); ++j)
                m.data()[j] = static_cast<float>(gauss(rng));
            d.x.push_back(std::move(m));
            d.y.push_back(i % 3);
        }
        return d;
    };

    // early stopping: with a zero learning rate nothing ever improves after
    // the first epoch, so training must stop after exactly patience more
    {
        auto d = make_data(1);
        nn::SingleSensorModel<float> m;
        m.init(tiny, 3);
        nn::TrainConfig cfg;
        cfg.lr = 0.0;
        cfg.warmup_epochs = 1;
        cfg.max_epochs = 100;
        cfg.patience = 20;
        // one full-dataset batch per epoch keeps the batch-norm running
        // statistics (and so the validation loss) exactly constant
        cfg.batch_size = 64;
        const nn::TrainResult res = nn::train_single(m, d, cfg);
        detail << "lr=0 stops at epoch " << res.epochs_run << "; ";
        if (res.epochs_run != 21 || res.best_epoch != 0) ok = false;
    }

    // warm-up freeze: three frozen fusion epochs leave every backbone
    // parameter and batch-norm buffer bit-identical
    {
        std::vector<nn::Batchset<float>> ds = {make_data(2), make_data(2)};
        nn::FusionModel<float> m;
        m.init({tiny, tiny}, 5);
        nn::ParamList<float> bp;
        for (auto& b : m.backbones) b.params(bp);
        std::vector<nn::Mat<float>*> bb;
        for (auto& b : m.backbones) b.buffers(bb);
        std::vector<nn::Mat<float>> before_p, before_b;
        for (auto* p : bp) before_p.push_back(p->value);
        for (auto* b : bb) before_b.push_back(*b);
        nn::TrainConfig cfg;
        cfg.warmup_epochs = 3;
        cfg.fusion_max_epochs = 0;
        cfg.batch_size = 8;
        nn::train_fusion(m, ds, cfg);
        bool frozen = true;
        for (std::size_t i = 0; i < bp.size(); ++i)
            if (bp[i]->value != before_p[i]) frozen = false;
        for (std::size_t i = 0; i < bb.size(); ++i)
            if (*bb[i] != before_b[i]) frozen = false;
        detail << (frozen ? "backbones frozen through warm-up"
                          : "backbones changed during warm-up");
        if (!frozen) ok = false;
    }
    report(10, "training protocol", ok, detail.str());
}

void criterion_11_protocols() {
    bool ok = true;
    std::ostringstream detail;
    std::vector<SampleMeta> samples;
    for (int subj = 0; subj < 4; ++subj)
        for (int f = 0; f < 3; ++f)
            for (int i = 0; i < 3; ++i) {
                SampleMeta m;
                m.subject_id = "s" + std::to_string(subj);
                m.food_label = "food" + std::to_string(f);
                m.label = i % 2 ? Activity::LeftChew : Activity::RightChew;
                samples.push_back(m);
                SampleMeta o;
                o.subject_id = m.subject_id;
                o.label = Activity::Other;
                samples.push_back(o);
            }

    auto disjoint = [](const FoldSplit& f) {
        std::set<int> train(f.train.begin(), f.train.end());
        for (int i : f.test)
            if (train.count(i)) return false;
        return true;
    };
    const auto loso = split_protocol(samples, Protocol::Loso, 0);
    const auto lofo = split_protocol(samples, Protocol::Lofo, 0);
    if (loso.size() != 4 || lofo.size() != 3) ok = false;
    for (const auto& f : loso)
        if (!disjoint(f)) ok = false;
    for (const auto& f : lofo)
        if (!disjoint(f)) ok = false;
    detail << "loso folds " << loso.size() << ", lofo folds " << lofo.size()
           << ", splits disjoint; ";

    const FoldReport r =
        score_fold({0, 0, 1, 1, 1, 2, 2, 2, 0}, {0, 0, 0, 1, 1, 1, 2, 2, 2});
    const bool metrics_ok = std::abs(r.macro_f1 - 2.0 / 3.0) < 1e-12 &&
                            std::abs(quantile_linear({0.8, 0.85, 0.9}, 0.5) - 0.85) <
                                1e-12;
    if (!metrics_ok) ok = false;
    detail << "metric spot checks " << (metrics_ok ? "ok" : "wrong");
    report(11, "protocol splitters and metrics", ok, detail.str());
}

void criterion_12_baseline() {
    bool ok = true;
    std::ostringstream detail;
    if (feature_length(UnitKind::Microphones) != 68) ok = false;
    detail << "mic features " << feature_length(UnitKind::Microphones) << "; ";

    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> X;
    std::vector<int> y;
    const double centers[3][6] = {
        {4, 0, 0, 4, 0, 0}, {0, 4, 0, 0, 4, 0}, {0, 0, 4, 0, 0, 4}};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 80; ++i) {
            for (int d = 0; d < 6; ++d) X.push_back(centers[c][d] + noise(rng));
            y.push_back(c);
        }
    RfConfig cfg;
    cfg.seed = 42;
    const RfModel a = train_rf(X, y, 6, cfg);
    const RfModel b = train_rf(X, y, 6, cfg);
    bool deterministic = a.trees.size() == b.trees.size();
    for (std::size_t t = 0; deterministic && t < a.trees.size(); ++t) {
        deterministic = a.trees[t].nodes.size() == b.trees[t].nodes.size();
        for (std::size_t n = 0; deterministic && n < a.trees[t].nodes.size(); ++n)
            deterministic = a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature &&
                            a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold;
    }
    if (!deterministic) ok = false;
    detail << "seed 42 deterministic " << (deterministic ? "yes" : "no") << "; ";

    const auto preds = predict_rf(a, X);
    int correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == y[i]) ++correct;
    const double acc = static_cast<double>(correct) / static_cast<double>(preds.size());
    if (acc < 0.95) ok = false;
    detail << "blob accuracy " << acc;
    report(12, "baseline forest", ok, detail.str());
}

bool read_file(const fs::path& p, std::string& out) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return false;
    std::ostringstream os;
    os << f.rdbuf();
    out = os.str();
    return true;
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& diff) {
    std::vector<fs::path> rel;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
    std::sort(rel.begin(), rel.end());
    for (const auto& r : rel) {
        if (r.filename() == "run_manifest.txt") continue;  // wall-clock time
        std::string ca, cb;
        if (!read_file(a / r, ca) || !read_file(b / r, cb) || ca != cb) {
            diff = r.string();
            return false;
        }
    }
    return true;
}

void criterion_13_cli_determinism(const std::string& cli) {
    bool ok = true;
    std::ostringstream detail;
    const fs::path base = fs::temp_directory_path() / "chomp_acceptance_cli";
    fs::remove_all(base);
    fs::create_directories(base);

    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    const fs::path ca = base / "corpus_a", cb = base / "corpus_b";
    if (!run("synth --subjects 2 --foods 1 --duration 4 --out " + ca.string() +
             " --seed 5") ||
        !run("synth --subjects 2 --foods 1 --duration 4 --out " + cb.string() +
             " --seed 5"))
        ok = false;
    std::string diff;
    if (ok && !dirs_identical(ca, cb, diff)) {
        ok = false;
        detail << "synth differs at " << diff << "; ";
    }

    const fs::path wa = base / "win_a", wb = base / "win_b";
    if (ok &&
        (!run("preprocess --in " + ca.string() + " --out " + wa.string() +
              " --units pressure --seed 5") ||
         !run("preprocess --in " + cb.string() + " --out " + wb.string() +
              " --units pressure --seed 5")))
        ok = false;
    if (ok && !dirs_identical(wa, wb, diff)) {
        ok = false;
        detail << "preprocess differs at " << diff << "; ";
    }

    const fs::path sa = base / "scal_a", sb = base / "scal_b";
    if (ok &&
        (!run("scalogram --in " + wa.string() + " --out " + sa.string() +
              " --unit pressure --seed 5") ||
         !run("scalogram --in " + wb.string() + " --out " + sb.string() +
              " --unit pressure --seed 5")))
        ok = false;
    if (ok && !dirs_identical(sa, sb, diff)) {
        ok = false;
        detail << "scalogram differs at " << diff << "; ";
    }

    if (ok &&
        (!run("simulate --draws 2000 --out " + (base / "sim_a.txt").string() +
              " --seed 5") ||
         !run("simulate --draws 2000 --out " + (base / "sim_b.txt").string() +
              " --seed 5")))
        ok = false;
    if (ok) {
        std::string x, y;
        if (!read_file(base / "sim_a.txt", x) || !read_file(base / "sim_b.txt", y) ||
            x != y) {
            ok = false;
            detail << "simulate reports differ; ";
        }
    }

    fs::remove_all(base);
    detail << (ok ? "byte-identical artifacts across reruns" : "see above");
    report(13, "cli determinism", ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: chomp_acceptance <path-to-chomp-cli>\n";
        return 2;
    }
    criterion_1_monte_carlo();
    criterion_2_shapes();
    criterion_3_cwt();
    criterion_4_gcc_phat();
    criterion_5_filters();
    criterion_6_standardization();
    criterion_7_model_size();
    criterion_8_gradients();
    criterion_9_end_to_end();
    criterion_10_training_protocol();
    criterion_11_protocols();
    criterion_12_baseline();
    criterion_13_cli_determinism(argv[1]);
    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criteria failed")
              << "\n";
    return g_failures == 0 ? 0 : 1;
}
