#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "chomp/nn/model.hpp"
#include "chomp/rng.hpp"

namespace chomp::nn {

// Labeled sample set for one sensor unit: every x is an (h*w) x c plane
// stack, labels are 0 = left, 1 = right, 2 = other.
template <typename T>
struct Batchset {
    int h = 0, w = 0, c = 0;
    std::vector<Mat<T>> x;
    std::vector<int> y;

    std::size_t size() const { return x.size(); }
    void gather(const std::vector<int>& idx, Act<T>& out) const {
        out.resize(static_cast<int>(idx.size()), h, w, c);
        const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.m.middleRows(static_cast<Eigen::Index>(i) * hw, hw) = x[idx[i]];
    }
};

struct TrainConfig {
    double lr = 1e-3;
    double fine_tune_lr = 1e-4;
    int warmup_epochs = 3;        // linear LR ramp (single) / frozen phase (fusion)
    int max_epochs = 100;
    int fusion_max_epochs = 30;
    int batch_size = 64;
    double val_fraction = 0.2;
    int patience = 20;
    std::uint64_t seed = 42;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    double best_val_loss = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    int epochs_run = 0;
};

// ---------------------------------------------------------------------------

template <typename T>
struct Adam {
    T lr;
    T beta1 = static_cast<T>(0.9);
    T beta2 = static_cast<T>(0.999);
    T eps = static_cast<T>(1e-8);
    long t = 0;

    explicit Adam(T learning_rate) : lr(learning_rate) {}

    static void zero_grad(ParamList<T>& params) {
        for (auto* p : params) p->grad.setZero();
    }
    void step(ParamList<T>& params) {
        ++t;
        const T bc1 = 1 - std::pow(beta1, static_cast<T>(t));
        const T bc2 = 1 - std::pow(beta2, static_cast<T>(t));
        for (auto* p : params) {
            if (p->adam_m.size() == 0) {
                p->adam_m = Mat<T>::Zero(p->value.rows(), p->value.cols());
                p->adam_v = Mat<T>::Zero(p->value.rows(), p->value.cols());
            }
            p->adam_m = beta1 * p->adam_m + (1 - beta1) * p->grad;
            p->adam_v = (beta2 * p->adam_v.array() +
                         (1 - beta2) * p->grad.array().square())
                            .matrix();
            p->value.array() -=
                lr * (p->adam_m.array() / bc1) /
                ((p->adam_v.array() / bc2).sqrt() + eps);
        }
    }
};

// Mean cross-entropy over softmax logits; writes d(logits) for the mean loss.
template <typename T>
inline double softmax_ce(const Mat<T>& logits, const std::vector<int>& labels,
                         Mat<T>& dlogits) {
    const auto B = logits.rows();
    dlogits.resize(B, logits.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < B; ++i) {
        const T mx = logits.row(i).maxCoeff();
        Eigen::Array<T, 1, Eigen::Dynamic> e =
            (logits.row(i).array() - mx).exp();
        const T z = e.sum();
        loss -= static_cast<double>(std::log(e(labels[i]) / z));
        dlogits.row(i) = (e / z).matrix() / static_cast<T>(B);
        dlogits(i, labels[i]) -= static_cast<T>(1) / static_cast<T>(B);
    }
    return loss / static_cast<double>(B);
}

template <typename T>
inline double softmax_ce_loss(const Mat<T>& logits, const std::vector<int>& labels) {
    Mat<T> scratch;
    return softmax_ce(logits, labels, scratch);
}

// ---------------------------------------------------------------------------

template <typename T>
struct Snapshot {
    std::vector<Mat<T>> values;
    std::vector<Mat<T>> bufs;
};

template <typename T>
inline Snapshot<T> take_snapshot(ParamList<T>& params, std::vector<Mat<T>*>& bufs) {
    Snapshot<T> s;
    for (auto* p : params) s.values.push_back(p->value);
    for (auto* b : bufs) s.bufs.push_back(*b);
    return s;
}

template <typename T>
inline void restore_snapshot(const Snapshot<T>& s, ParamList<T>& params,
                             std::vector<Mat<T>*>& bufs) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = s.values[i];
    for (std::size_t i = 0; i < bufs.size(); ++i) *bufs[i] = s.bufs[i];
}

// Stratified train/validation index split.
inline void stratified_split(const std::vector<int>& labels, double val_fraction,
                             chomp::Rng& rng, std::vector<int>& train_idx,
                             std::vector<int>& val_idx) {
    train_idx.clear();
    val_idx.clear();
    std::vector<std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= static_cast<int>(by_class.size()))
            by_class.resize(labels[i] + 1);
        by_class[labels[i]].push_back(static_cast<int>(i));
    }
    for (auto& cls : by_class) {
        std::shuffle(cls.begin(), cls.end(), rng);
        const auto n_val = static_cast<std::size_t>(
            std::llround(val_fraction * static_cast<double>(cls.size())));
        for (std::size_t i = 0; i < cls.size(); ++i)
            (i < n_val ? val_idx : train_idx).push_back(cls[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
}

inline std::vector<std::vector<int>> make_batches(std::vector<int> idx,
                                                  int batch_size,
                                                  chomp::Rng& rng) {
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::vector<int>> batches;
    for (std::size_t i = 0; i < idx.size(); i += batch_size) {
        const auto end = std::min(idx.size(), i + batch_size);
        batches.emplace_back(idx.begin() + static_cast<long>(i),
                             idx.begin() + static_cast<long>(end));
        // the shuffle decides batch composition only; sorting within the
        // batch makes batch-norm statistics independent of summation order
        std::sort(batches.back().begin(), batches.back().end());
    }
    return batches;
}

template <typename T>
inline std::vector<int> gather_labels(const Batchset<T>& d,
                                      const std::vector<int>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = d.y[idx[i]];
    return out;
}

// ---------------------------------------------------------------------------

template <typename T>
inline EpochStats evaluate_single(SingleSensorModel<T>& model, const Batchset<T>& d,
                                  const std::vector<int>& idx, int batch_size,
                                  chomp::Rng& rng) {
    EpochStats s;
    std::size_t correct = 0;
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < idx.size(); i += batch_size) {
        const auto end = std::min(idx.size(), i + batch_size);
        std::vector<int> b(idx.begin() + static_cast<long>(i),
                           idx.begin() + static_cast<long>(end));
        Act<T> x;
        d.gather(b, x);
        Mat<T> logits;
        model.forward(x, logits, false, rng);
        const auto labels = gather_labels(d, b);
        loss_sum += softmax_ce_loss(logits, labels) * static_cast<double>(b.size());
        for (Eigen::Index r = 0; r < logits.rows(); ++r) {
            Eigen::Index arg = 0;
            logits.row(r).maxCoeff(&arg);
            if (static_cast<int>(arg) == labels[r]) ++correct;
        }
    }
    s.val_loss = loss_sum / static_cast<double>(idx.size());
    s.val_accuracy = static_cast<double>(correct) / static_cast<double>(idx.size());
    return s;
}

template <typename T>
inline TrainResult train_single(SingleSensorModel<T>& model, const Batchset<T>& d,
                                const TrainConfig& cfg) {
    if (d.size() < 4) throw chomp::InsufficientData("too few samples to train");
    ParamList<T> params;
    model.params(params);
    std::vector<Mat<T>*> bufs;
    model.buffers(bufs);

    chomp::Rng split_rng = chomp::make_rng(cfg.seed, "train/val-split");
    std::vector<int> train_idx, val_idx;
    stratified_split(d.y, cfg.val_fraction, split_rng, train_idx, val_idx);
    if (val_idx.empty() || train_idx.empty())
        throw chomp::InsufficientData("empty train/validation split");

    Adam<T> opt(static_cast<T>(cfg.lr));
    chomp::Rng drop_rng = chomp::make_rng(cfg.seed, "train/dropout");
    chomp::Rng eval_rng = chomp::make_rng(cfg.seed, "train/eval");

    TrainResult res;
    Snapshot<T> best;
    int since_best = 0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        opt.lr = static_cast<T>(
            cfg.lr * std::min(1.0, static_cast<double>(epoch + 1) /
                                       std::max(1, cfg.warmup_epochs)));
        chomp::Rng brng =
            chomp::make_rng(cfg.seed, "train/batches/" + std::to_string(epoch));
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (const auto& b : make_batches(train_idx, cfg.batch_size, brng)) {
            Act<T> x;
            d.gather(b, x);
            const auto labels = gather_labels(d, b);
            Mat<T> logits, dlogits;
            Adam<T>::zero_grad(params);
            model.forward(x, logits, true, drop_rng);
            loss_sum += softmax_ce(logits, labels, dlogits) *
                        static_cast<double>(b.size());
            seen += b.size();
            Act<T> dx;
            model.backward(dlogits, dx);
            opt.step(params);
        }
        EpochStats st = evaluate_single(model, d, val_idx, cfg.batch_size, eval_rng);
        st.train_loss = loss_sum / static_cast<double>(seen);
        res.history.push_back(st);
        res.epochs_run = epoch + 1;
        if (st.val_loss < res.best_val_loss) {
            res.best_val_loss = st.val_loss;
            res.best_epoch = epoch;
            best = take_snapshot(params, bufs);
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (res.best_epoch >= 0) restore_snapshot(best, params, bufs);
    return res;
}

// ---------------------------------------------------------------------------

// Fusion training. Phase 1 freezes the backbones: their eval-mode features
// are computed once and cached, and only the fusion stage (concat batch norm,
// gate, head) trains, so the backbone parameters and buffers stay
// bit-identical. Phase 2 fine-tunes everything jointly at a reduced rate.
template <typename T>
inline TrainResult train_fusion(FusionModel<T>& model,
                                const std::vector<Batchset<T>>& ds,
                                const TrainConfig& cfg) {
    if (ds.size() != model.backbones.size())
        throw chomp::ConfigError("fusion training needs one dataset per sensor");
    const std::size_t n = ds[0].size();
    for (const auto& d : ds)
        if (d.size() != n || d.y != ds[0].y)
            throw chomp::ConfigError("fusion datasets must share sample order");
    if (n < 4) throw chomp::InsufficientData("too few samples to train");

    ParamList<T> all_params, fusion_params;
    model.params(all_params);
    model.fusion_params(fusion_params);
    std::vector<Mat<T>*> bufs;
    model.buffers(bufs);

    chomp::Rng split_rng = chomp::make_rng(cfg.seed, "fusion/val-split");
    std::vector<int> train_idx, val_idx;
    stratified_split(ds[0].y, cfg.val_fraction, split_rng, train_idx, val_idx);
    if (val_idx.empty() || train_idx.empty())
        throw chomp::InsufficientData("empty train/validation split");

    chomp::Rng drop_rng = chomp::make_rng(cfg.seed, "fusion/dropout");
    chomp::Rng eval_rng = chomp::make_rng(cfg.seed, "fusion/eval");

    // cached eval-mode concatenated features for the frozen phase
    Mat<T> feats(static_cast<Eigen::Index>(n), model.concat_dim);
    {
        const int chunk = cfg.batch_size;
        for (std::size_t i = 0; i < n; i += chunk) {
            const auto end = std::min(n, i + chunk);
            std::vector<int> b(end - i);
            std::iota(b.begin(), b.end(), static_cast<int>(i));
            int off = 0;
            for (std::size_t s = 0; s < ds.size(); ++s) {
                Act<T> x;
                ds[s].gather(b, x);
                Mat<T> f;
                model.backbones[s].forward(x, f, false);
                feats.block(static_cast<Eigen::Index>(i), off,
                            static_cast<Eigen::Index>(b.size()),
                            model.widths[s]) = f;
                off += model.widths[s];
            }
        }
    }

    auto eval_epoch = [&]() {
        EpochStats s;
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < val_idx.size();
             i += static_cast<std::size_t>(cfg.batch_size)) {
            const auto end = std::min(val_idx.size(),
                                      i + static_cast<std::size_t>(cfg.batch_size));
            std::vector<int> b(val_idx.begin() + static_cast<long>(i),
                               val_idx.begin() + static_cast<long>(end));
            std::vector<Act<T>> xs(ds.size());
            for (std::size_t s2 = 0; s2 < ds.size(); ++s2) ds[s2].gather(b, xs[s2]);
            Mat<T> logits;
            model.forward(xs, logits, false, eval_rng);
            const auto labels = gather_labels(ds[0], b);
            loss_sum += softmax_ce_loss(logits, labels) *
                        static_cast<double>(b.size());
            for (Eigen::Index r = 0; r < logits.rows(); ++r) {
                Eigen::Index arg = 0;
                logits.row(r).maxCoeff(&arg);
                if (static_cast<int>(arg) == labels[r]) ++correct;
            }
        }
        s.val_loss = loss_sum / static_cast<double>(val_idx.size());
        s.val_accuracy =
            static_cast<double>(correct) / static_cast<double>(val_idx.size());
        return s;
    };

    TrainResult res;
    // phase 1: frozen backbones, cached features
    {
        Adam<T> opt(static_cast<T>(cfg.lr));
        for (int epoch = 0; epoch < cfg.warmup_epochs; ++epoch) {
            chomp::Rng brng = chomp::make_rng(
                cfg.seed, "fusion/warmup-batches/" + std::to_string(epoch));
            double loss_sum = 0.0;
            std::size_t seen = 0;
            for (const auto& b : make_batches(train_idx, cfg.batch_size, brng)) {
                Mat<T> fb(static_cast<Eigen::Index>(b.size()), model.concat_dim);
                for (std::size_t i = 0; i < b.size(); ++i)
                    fb.row(static_cast<Eigen::Index>(i)) = feats.row(b[i]);
                const auto labels = gather_labels(ds[0], b);
                Mat<T> logits, dlogits;
                Adam<T>::zero_grad(fusion_params);
                model.forward_from_features(fb, logits, true, drop_rng);
                loss_sum += softmax_ce(logits, labels, dlogits) *
                            static_cast<double>(b.size());
                seen += b.size();
                model.backward_fusion(dlogits);
                opt.step(fusion_params);
            }
            EpochStats st = eval_epoch();
            st.train_loss = loss_sum / static_cast<double>(seen);
            res.history.push_back(st);
            res.epochs_run = epoch + 1;
        }
    }
    // phase 2: joint fine-tuning with early stopping
    {
        Adam<T> opt(static_cast<T>(cfg.fine_tune_lr));
        Snapshot<T> best;
        int since_best = 0;
        for (int epoch = 0; epoch < cfg.fusion_max_epochs; ++epoch) {
            chomp::Rng brng = chomp::make_rng(
                cfg.seed, "fusion/joint-batches/" + std::to_string(epoch));
            double loss_sum = 0.0;
            std::size_t seen = 0;
            for (const auto& b : make_batches(train_idx, cfg.batch_size, brng)) {
                std::vector<Act<T>> xs(ds.size());
                for (std::size_t s2 = 0; s2 < ds.size(); ++s2)
                    ds[s2].gather(b, xs[s2]);
                const auto labels = gather_labels(ds[0], b);
                Mat<T> logits, dlogits;
                Adam<T>::zero_grad(all_params);
                model.forward(xs, logits, true, drop_rng);
                loss_sum += softmax_ce(logits, labels, dlogits) *
                            static_cast<double>(b.size());
                seen += b.size();
                std::vector<Act<T>> dxs;
                model.backward(dlogits, dxs);
                opt.step(all_params);
            }
            EpochStats st = eval_epoch();
            st.train_loss = loss_sum / static_cast<double>(seen);
            res.history.push_back(st);
            res.epochs_run = cfg.warmup_epochs + epoch + 1;
            if (st.val_loss < res.best_val_loss) {
                res.best_val_loss = st.val_loss;
                res.best_epoch = cfg.warmup_epochs + epoch;
                best = take_snapshot(all_params, bufs);
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }
        if (res.best_epoch >= 0) restore_snapshot(best, all_params, bufs);
    }
    return res;
}

// ---------------------------------------------------------------------------

// Central-difference gradient check on a double-precision model. Samples a
// spread of entries from every parameter tensor, so each layer type is
// covered. Returns the maximum relative error.
template <typename Model, typename ForwardFn>
inline double gradient_check_impl(Model& model, ForwardFn&& forward,
                                  const std::vector<int>& labels,
                                  int min_samples, std::uint64_t seed) {
    ParamList<double> params;
    model.params(params);

    Adam<double>::zero_grad(params);
    Mat<double> logits, dlogits;
    forward(logits);
    softmax_ce(logits, labels, dlogits);
    model.backward_for_check(dlogits);

    const int per_param = std::max(
        1, static_cast<int>((min_samples + params.size() - 1) / params.size()));
    chomp::Rng rng = chomp::make_rng(seed, "gradcheck/sample");
    const double h = 1e-5;
    double max_rel = 0.0;
    for (auto* p : params) {
        std::uniform_int_distribution<Eigen::Index> pick(0, p->value.size() - 1);
        const int k = std::min<int>(per_param, static_cast<int>(p->value.size()));
        for (int s = 0; s < k; ++s) {
            const Eigen::Index i = pick(rng);
            const double orig = p->value.data()[i];
            p->value.data()[i] = orig + h;
            forward(logits);
            const double lp = softmax_ce_loss(logits, labels);
            p->value.data()[i] = orig - h;
            forward(logits);
            const double lm = softmax_ce_loss(logits, labels);
            p->value.data()[i] = orig;
            const double num = (lp - lm) / (2 * h);
            const double ana = p->grad.data()[i];
            // the floor keeps directions the loss is invariant to (for
            // example a shift immediately renormalized away) from turning
            // round-off noise into a spurious relative error
            const double denom = std::max({1e-6, std::abs(num), std::abs(ana)});
            max_rel = std::max(max_rel, std::abs(num - ana) / denom);
        }
    }
    return max_rel;
}

struct GradCheckHarness {
    Act<double> x;
    std::vector<int> labels;
    chomp::Rng rng = chomp::Rng(0);
};

inline double gradient_check_single(const BackboneConfig& cfg, int h, int w,
                                    int batch, std::uint64_t seed,
                                    int min_samples = 200) {
    struct Checked : SingleSensorModel<double> {
        void backward_for_check(const Mat<double>& dlogits) {
            Act<double> dx;
            this->backward(dlogits, dx);
        }
    } model;
    model.init(cfg, seed);
    model.dropout.p = 0.0;  // deterministic loss for finite differences

    GradCheckHarness hs;
    hs.rng = chomp::make_rng(seed, "gradcheck/data");
    std::normal_distribution<double> gauss(0.0, 1.0);
    hs.x.resize(batch, h, w, cfg.in_channels);
    for (Eigen::Index i = 0; i < hs.x.m.size(); ++i)
        hs.x.m.data()[i] = gauss(hs.rng);
    std::uniform_int_distribution<int> lab(0, 2);
    hs.labels.resize(batch);
    for (auto& l : hs.labels) l = lab(hs.rng);

    chomp::Rng drop_rng = chomp::make_rng(seed, "gradcheck/drop");
    auto fwd = [&](Mat<double>& logits) {
        model.forward(hs.x, logits, true, drop_rng);
    };
    return gradient_check_impl(model, fwd, hs.labels, min_samples, seed);
}

inline double gradient_check_fusion(const std::vector<BackboneConfig>& cfgs,
                                    const std::vector<std::pair<int, int>>& shapes,
                                    int batch, std::uint64_t seed,
                                    int min_samples = 200) {
    struct Checked : FusionModel<double> {
        void backward_for_check(const Mat<double>& dlogits) {
            std::vector<Act<double>> dxs;
            this->backward(dlogits, dxs);
        }
    } model;
    model.init(cfgs, seed);
    model.dropout.p = 0.0;

    chomp::Rng rng = chomp::make_rng(seed, "gradcheck/data");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Act<double>> xs(cfgs.size());
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        xs[i].resize(batch, shapes[i].first, shapes[i].second, cfgs[i].in_channels);
        for (Eigen::Index j = 0; j < xs[i].m.size(); ++j)
            xs[i].m.data()[j] = gauss(rng);
    }
    std::uniform_int_distribution<int> lab(0, 2);
    std::vector<int> labels(batch);
    for (auto& l : labels) l = lab(rng);

    chomp::Rng drop_rng = chomp::make_rng(seed, "gradcheck/drop");
    auto fwd = [&](Mat<double>& logits) {
        model.forward(xs, logits, true, drop_rng);
    };
    return gradient_check_impl(model, fwd, labels, min_samples, seed);
}

}  // namespace chomp::nn
