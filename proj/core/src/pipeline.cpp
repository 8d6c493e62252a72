#include "chomp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <utility>

#include "chomp/errors.hpp"
#include "chomp/features.hpp"
#include "chomp/filter.hpp"
#include "chomp/rng.hpp"

namespace chomp {

namespace {

SampleMeta meta_of(const Scalogram& s) {
    return SampleMeta{s.subject_id, s.food_label, s.label};
}

std::vector<int> predict_single(nn::SingleSensorModel<float>& model,
                                const nn::Batchset<float>& d, int batch_size,
                                Rng& rng) {
    std::vector<int> preds(d.size());
    for (std::size_t i = 0; i < d.size(); i += batch_size) {
        const auto end = std::min(d.size(), i + batch_size);
        std::vector<int> b(end - i);
        std::iota(b.begin(), b.end(), static_cast<int>(i));
        nn::Act<float> x;
        d.gather(b, x);
        nn::Mat<float> logits;
        model.forward(x, logits, false, rng);
        for (Eigen::Index r = 0; r < logits.rows(); ++r) {
            Eigen::Index arg = 0;
            logits.row(r).maxCoeff(&arg);
            preds[i + r] = static_cast<int>(arg);
        }
    }
    return preds;
}

std::vector<int> predict_fusion(nn::FusionModel<float>& model,
                                const std::vector<nn::Batchset<float>>& ds,
                                int batch_size, Rng& rng) {
    const std::size_t n = ds[0].size();
    std::vector<int> preds(n);
    for (std::size_t i = 0; i < n; i += batch_size) {
        const auto end = std::min(n, i + batch_size);
        std::vector<int> b(end - i);
        std::iota(b.begin(), b.end(), static_cast<int>(i));
        std::vector<nn::Act<float>> xs(ds.size());
        for (std::size_t s = 0; s < ds.size(); ++s) ds[s].gather(b, xs[s]);
        nn::Mat<float> logits;
        model.forward(xs, logits, false, rng);
        for (Eigen::Index r = 0; r < logits.rows(); ++r) {
            Eigen::Index arg = 0;
            logits.row(r).maxCoeff(&arg);
            preds[i + r] = static_cast<int>(arg);
        }
    }
    return preds;
}

}  // namespace

std::vector<Recording> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("corpus directory not found: " + dir.string());
    std::vector<std::filesystem::path> sessions;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory() && std::filesystem::exists(e.path() / "manifest.txt"))
            sessions.push_back(e.path());
    std::sort(sessions.begin(), sessions.end());
    std::vector<Recording> recs;
    recs.reserve(sessions.size());
    for (const auto& p : sessions) recs.push_back(load_recording(p));
    return recs;
}

void preprocess_recording(Recording& rec) {
    std::map<UnitKind, BandpassFilter> filters;
    for (auto& ch : rec.channels) {
        auto it = filters.find(ch.unit);
        if (it == filters.end())
            it = filters.emplace(ch.unit, design_bandpass(unit_spec(ch.unit))).first;
        ch = apply_bandpass(ch, it->second);
    }
}

std::vector<Window> make_windows(const std::vector<Recording>& recs, UnitKind unit,
                                 const WindowingConfig& cfg) {
    std::vector<Window> out;
    for (const auto& rec : recs) {
        try {
            auto ws = segment_windows(rec, unit, cfg);
            out.insert(out.end(), std::make_move_iterator(ws.begin()),
                       std::make_move_iterator(ws.end()));
        } catch (const InsufficientData&) {
            // session shorter than one window: contributes nothing
        }
    }
    return out;
}

std::vector<Scalogram> make_scalograms(const std::vector<Window>& windows,
                                       UnitKind unit) {
    const CwtPlan plan = make_plan(unit_spec(unit));
    std::vector<Scalogram> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(scalogram_window(w, plan));
    return out;
}

void to_batchset(const std::vector<Scalogram>& scals, nn::Batchset<float>& out,
                 std::vector<SampleMeta>& meta) {
    if (scals.empty()) throw InsufficientData("no scalograms to convert");
    out.h = scals[0].scales;
    out.w = scals[0].frames;
    out.c = scals[0].channels;
    out.x.clear();
    out.y.clear();
    meta.clear();
    for (const auto& s : scals) {
        if (s.scales != out.h || s.frames != out.w || s.channels != out.c)
            throw ConfigError("inconsistent scalogram shapes in one dataset");
        nn::Mat<float> m(static_cast<Eigen::Index>(out.h) * out.w, out.c);
        for (int c = 0; c < out.c; ++c) {
            const float* p = s.plane(c);
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x)
                    m(static_cast<Eigen::Index>(y) * out.w + x, c) =
                        p[static_cast<std::size_t>(y) * out.w + x];
        }
        out.x.push_back(std::move(m));
        out.y.push_back(label_index(s.label));
        meta.push_back(meta_of(s));
    }
}

// ---------------------------------------------------------------------------

namespace {

struct MetaLine {
    std::string subject, session;
    Activity label;
    std::optional<std::string> food;
    double start_time;
};

void write_meta(const std::filesystem::path& path,
                const std::vector<MetaLine>& lines) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    for (const auto& m : lines)
        f << m.subject << ' ' << m.session << ' ' << activity_name(m.label) << ' '
          << (m.food ? *m.food : std::string("-")) << ' '
          << std::llround(m.start_time * 1000.0) << '\n';
}

std::vector<MetaLine> read_meta(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("missing sample manifest " + path.string());
    std::vector<MetaLine> out;
    std::string subject, session, activity, food;
    long start_ms = 0;
    while (f >> subject >> session >> activity >> food >> start_ms) {
        MetaLine m{subject, session, activity_from_name(activity), std::nullopt,
                   static_cast<double>(start_ms) / 1000.0};
        if (food != "-") m.food = food;
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

void save_windows(const std::vector<Window>& windows, UnitKind unit,
                  const std::filesystem::path& dir) {
    if (windows.empty()) throw InsufficientData("no windows to save");
    std::filesystem::create_directories(dir);
    const auto& w0 = windows[0];
    Tensor t({static_cast<std::uint32_t>(windows.size()),
              static_cast<std::uint32_t>(w0.rows),
              static_cast<std::uint32_t>(w0.cols)});
    std::vector<MetaLine> meta;
    const std::size_t stride = static_cast<std::size_t>(w0.rows) * w0.cols;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (w.rows != w0.rows || w.cols != w0.cols)
            throw ConfigError("inconsistent window shapes in one set");
        std::copy(w.data.begin(), w.data.end(), t.data.begin() + i * stride);
        meta.push_back({w.subject_id, w.session_id, w.label, w.food_label,
                        w.start_time});
    }
    const std::string name = unit_name(unit);
    write_tensor(t, dir / (name + "_windows.t32"));
    write_meta(dir / (name + "_meta.txt"), meta);
}

std::vector<Window> load_windows(const std::filesystem::path& dir, UnitKind unit) {
    const std::string name = unit_name(unit);
    const Tensor t = read_tensor(dir / (name + "_windows.t32"));
    if (t.shape.size() != 3)
        throw FormatError("window tensor must be rank 3");
    const auto meta = read_meta(dir / (name + "_meta.txt"));
    if (meta.size() != t.shape[0])
        throw CorruptData("window manifest/tensor length mismatch");
    std::vector<Window> out(meta.size());
    const std::size_t stride = static_cast<std::size_t>(t.shape[1]) * t.shape[2];
    for (std::size_t i = 0; i < out.size(); ++i) {
        Window& w = out[i];
        w.unit = unit;
        w.rows = static_cast<int>(t.shape[1]);
        w.cols = static_cast<int>(t.shape[2]);
        w.data.assign(t.data.begin() + i * stride,
                      t.data.begin() + (i + 1) * stride);
        w.subject_id = meta[i].subject;
        w.session_id = meta[i].session;
        w.label = meta[i].label;
        w.food_label = meta[i].food;
        w.start_time = meta[i].start_time;
    }
    return out;
}

void save_scalograms(const std::vector<Scalogram>& scals, UnitKind unit,
                     const std::filesystem::path& dir) {
    if (scals.empty()) throw InsufficientData("no scalograms to save");
    std::filesystem::create_directories(dir);
    const auto& s0 = scals[0];
    Tensor t({static_cast<std::uint32_t>(scals.size()),
              static_cast<std::uint32_t>(s0.channels),
              static_cast<std::uint32_t>(s0.scales),
              static_cast<std::uint32_t>(s0.frames)});
    std::vector<MetaLine> meta;
    const std::size_t stride =
        static_cast<std::size_t>(s0.channels) * s0.scales * s0.frames;
    for (std::size_t i = 0; i < scals.size(); ++i) {
        const auto& s = scals[i];
        if (s.channels != s0.channels || s.scales != s0.scales ||
            s.frames != s0.frames)
            throw ConfigError("inconsistent scalogram shapes in one set");
        std::copy(s.values.begin(), s.values.end(), t.data.begin() + i * stride);
        meta.push_back({s.subject_id, s.session_id, s.label, s.food_label,
                        s.start_time});
    }
    const std::string name = unit_name(unit);
    write_tensor(t, dir / (name + "_scalograms.t32"));
    write_meta(dir / (name + "_meta.txt"), meta);
}

std::vector<Scalogram> load_scalograms(const std::filesystem::path& dir,
                                       UnitKind unit) {
    const std::string name = unit_name(unit);
    const Tensor t = read_tensor(dir / (name + "_scalograms.t32"));
    if (t.shape.size() != 4)
        throw FormatError("scalogram tensor must be rank 4");
    const auto meta = read_meta(dir / (name + "_meta.txt"));
    if (meta.size() != t.shape[0])
        throw CorruptData("scalogram manifest/tensor length mismatch");
    std::vector<Scalogram> out(meta.size());
    const std::size_t stride =
        static_cast<std::size_t>(t.shape[1]) * t.shape[2] * t.shape[3];
    for (std::size_t i = 0; i < out.size(); ++i) {
        Scalogram& s = out[i];
        s.unit = unit;
        s.channels = static_cast<int>(t.shape[1]);
        s.scales = static_cast<int>(t.shape[2]);
        s.frames = static_cast<int>(t.shape[3]);
        s.values.assign(t.data.begin() + i * stride,
                        t.data.begin() + (i + 1) * stride);
        s.subject_id = meta[i].subject;
        s.session_id = meta[i].session;
        s.label = meta[i].label;
        s.food_label = meta[i].food;
        s.start_time = meta[i].start_time;
    }
    return out;
}

// ---------------------------------------------------------------------------

ProtocolReport run_baseline(const std::vector<Window>& windows, Protocol protocol,
                            const RfConfig& rf, std::uint64_t seed) {
    if (windows.empty()) throw InsufficientData("no windows for baseline");
    const MfccParams mp = mfcc_params(windows[0].unit);
    const int n_features = feature_length(windows[0].unit);
    std::vector<double> X;
    X.reserve(windows.size() * static_cast<std::size_t>(n_features));
    std::vector<int> y;
    std::vector<SampleMeta> meta;
    for (const auto& w : windows) {
        const auto f = extract_features(w, mp);
        X.insert(X.end(), f.begin(), f.end());
        y.push_back(label_index(w.label));
        meta.push_back(SampleMeta{w.subject_id, w.food_label, w.label});
    }

    std::vector<FoldReport> folds;
    for (const auto& fold : split_protocol(meta, protocol, seed)) {
        std::vector<double> Xtr, Xte;
        std::vector<int> ytr, yte;
        for (int i : fold.train) {
            Xtr.insert(Xtr.end(), X.begin() + static_cast<long>(i) * n_features,
                       X.begin() + static_cast<long>(i + 1) * n_features);
            ytr.push_back(y[i]);
        }
        for (int i : fold.test) {
            Xte.insert(Xte.end(), X.begin() + static_cast<long>(i) * n_features,
                       X.begin() + static_cast<long>(i + 1) * n_features);
            yte.push_back(y[i]);
        }
        RfConfig fold_rf = rf;
        fold_rf.seed = derive_seed(seed, "baseline/" + fold.fold_key);
        const RfModel model = train_rf(Xtr, ytr, n_features, fold_rf);
        FoldReport r = score_fold(predict_rf(model, Xte), yte);
        r.fold_key = fold.fold_key;
        folds.push_back(std::move(r));
    }
    return aggregate(std::move(folds));
}

namespace {

// Standardize a fold slice independently of the rest of the corpus, then
// flatten it into the CNN sample layout.
nn::Batchset<float> fold_batchset(const std::vector<Scalogram>& scals,
                                  const std::vector<int>& idx) {
    std::vector<Scalogram> part;
    part.reserve(idx.size());
    for (int i : idx) part.push_back(scals[i]);
    standardize(part);
    nn::Batchset<float> out;
    std::vector<SampleMeta> ignore;
    to_batchset(part, out, ignore);
    return out;
}

}  // namespace

ProtocolReport run_cnn_single(const std::vector<Scalogram>& scals,
                              const CnnEvalConfig& cfg, Protocol protocol,
                              std::uint64_t seed) {
    if (scals.empty()) throw InsufficientData("no scalograms to evaluate");
    std::vector<SampleMeta> meta;
    meta.reserve(scals.size());
    for (const auto& s : scals) meta.push_back(meta_of(s));
    nn::BackboneConfig backbone = cfg.backbone;
    backbone.in_channels = scals[0].channels;

    std::vector<FoldReport> folds;
    for (const auto& fold : split_protocol(meta, protocol, seed)) {
        const auto train_set = fold_batchset(scals, fold.train);
        const auto test_set = fold_batchset(scals, fold.test);
        nn::SingleSensorModel<float> model;
        model.init(backbone, derive_seed(seed, "cnn-init/" + fold.fold_key));
        nn::TrainConfig tc = cfg.train;
        tc.seed = derive_seed(seed, "cnn-train/" + fold.fold_key);
        train_single(model, train_set, tc);
        Rng rng = make_rng(seed, "cnn-predict/" + fold.fold_key);
        FoldReport r = score_fold(
            predict_single(model, test_set, tc.batch_size, rng), test_set.y);
        r.fold_key = fold.fold_key;
        folds.push_back(std::move(r));
    }
    return aggregate(std::move(folds));
}

ProtocolReport run_cnn_fusion(const std::vector<std::vector<Scalogram>>& per_unit,
                              const CnnEvalConfig& cfg, Protocol protocol,
                              std::uint64_t seed) {
    if (per_unit.size() < 2)
        throw ConfigError("fusion needs at least two sensor units");

    // match samples across units on (session, start time)
    using Key = std::pair<std::string, long>;
    auto key_of = [](const Scalogram& s) {
        return Key{s.session_id, std::lround(s.start_time * 1000.0)};
    };
    std::vector<std::map<Key, int>> index(per_unit.size());
    for (std::size_t u = 0; u < per_unit.size(); ++u)
        for (std::size_t i = 0; i < per_unit[u].size(); ++i)
            index[u][key_of(per_unit[u][i])] = static_cast<int>(i);

    std::vector<std::vector<int>> rows(per_unit.size());
    std::vector<SampleMeta> meta;
    for (std::size_t i = 0; i < per_unit[0].size(); ++i) {
        const Key k = key_of(per_unit[0][i]);
        bool everywhere = true;
        for (std::size_t u = 1; u < per_unit.size(); ++u)
            if (!index[u].count(k)) {
                everywhere = false;
                break;
            }
        if (!everywhere) continue;
        rows[0].push_back(static_cast<int>(i));
        for (std::size_t u = 1; u < per_unit.size(); ++u) {
            const int j = index[u][k];
            if (per_unit[u][j].label != per_unit[0][i].label)
                throw CorruptData("label mismatch across fused units");
            rows[u].push_back(j);
        }
        meta.push_back(meta_of(per_unit[0][i]));
    }
    if (meta.empty()) throw InsufficientData("no samples shared across units");

    std::vector<std::vector<Scalogram>> ordered(per_unit.size());
    std::vector<nn::BackboneConfig> backbones(per_unit.size());
    for (std::size_t u = 0; u < per_unit.size(); ++u) {
        ordered[u].reserve(rows[u].size());
        for (int j : rows[u]) ordered[u].push_back(per_unit[u][j]);
        backbones[u] = cfg.backbone;
        backbones[u].in_channels = ordered[u][0].channels;
    }

    std::vector<FoldReport> folds;
    for (const auto& fold : split_protocol(meta, protocol, seed)) {
        std::vector<nn::Batchset<float>> train_sets, test_sets;
        for (const auto& o : ordered) {
            train_sets.push_back(fold_batchset(o, fold.train));
            test_sets.push_back(fold_batchset(o, fold.test));
        }
        nn::FusionModel<float> model;
        model.init(backbones, derive_seed(seed, "fusion-init/" + fold.fold_key));
        nn::TrainConfig tc = cfg.train;
        // the fusion stage reuses backbones pretrained per sensor in the
        // single-sensor configuration on the same training fold
        for (std::size_t u = 0; u < train_sets.size(); ++u) {
            const std::string tag = fold.fold_key + "/" + std::to_string(u);
            nn::SingleSensorModel<float> single;
            single.init(backbones[u], derive_seed(seed, "fusion-pretrain-init/" + tag));
            nn::TrainConfig ptc = cfg.train;
            ptc.seed = derive_seed(seed, "fusion-pretrain/" + tag);
            nn::train_single(single, train_sets[u], ptc);
            nn::ParamList<float> src, dst;
            single.backbone.params(src);
            model.backbones[u].params(dst);
            for (std::size_t k = 0; k < src.size(); ++k)
                dst[k]->value = src[k]->value;
            std::vector<nn::Mat<float>*> src_b, dst_b;
            single.backbone.buffers(src_b);
            model.backbones[u].buffers(dst_b);
            for (std::size_t k = 0; k < src_b.size(); ++k) *dst_b[k] = *src_b[k];
        }
        tc.seed = derive_seed(seed, "fusion-train/" + fold.fold_key);
        train_fusion(model, train_sets, tc);
        Rng rng = make_rng(seed, "fusion-predict/" + fold.fold_key);
        FoldReport r = score_fold(
            predict_fusion(model, test_sets, tc.batch_size, rng), test_sets[0].y);
        r.fold_key = fold.fold_key;
        folds.push_back(std::move(r));
    }
    return aggregate(std::move(folds));
}

}  // namespace chomp
