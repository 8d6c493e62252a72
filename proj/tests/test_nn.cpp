#include <doctest.h>

#include <cmath>

#include "chomp/nn/model.hpp"
#include "chomp/nn/train.hpp"

using namespace chomp;
using namespace chomp::nn;

namespace {
// Small config covering every layer type: expansion, stride 2, SE, residual
// skip (block 3 keeps 8 -> 8 at stride 1).
BackboneConfig tiny_config() {
    BackboneConfig cfg;
    cfg.in_channels = 2;
    cfg.stem_channels = 4;
    cfg.blocks = {{8, 1, 1}, {8, 2, 2}, {8, 1, 2}};
    cfg.feature_dim = 8;
    return cfg;
}

template <typename T>
Batchset<T> tiny_dataset(int n, int h, int w, int c, std::uint64_t seed) {
    Batchset<T> d;
    d.h = h;
    d.w = w;
    d.c = c;
    chomp::Rng rng = chomp::make_rng(seed, "tiny-dataset");
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        Mat<T> m(static_cast<Eigen::Index>(h) * w, c);
        for (Eigen::Index j = 0; j < m.size(); ++j)
            m.data()[j] = static_cast<T>(gauss(rng));
        const int label = i % 3;
        // plant a strong class-dependent mean so the data is learnable
        m.array() += static_cast<T>(label - 1) * static_cast<T>(2);
        d.x.push_back(std::move(m));
        d.y.push_back(label);
    }
    return d;
}
}  // namespace

TEST_CASE("parameter counts land in the published bands") {
    const BackboneConfig cfg;  // the real model
    {
        SingleSensorModel<float> m;
        m.init(cfg, 0);
        ParamList<float> p;
        m.params(p);
        const std::size_t n = param_count(p);
        CHECK(std::abs(static_cast<double>(n) - 0.53e6) <= 0.15 * 0.53e6);
        const Complexity cx = single_model_complexity(cfg, 64, 125);
        CHECK(cx.params == n);
        CHECK(cx.flops > 0);
    }
    {
        FusionModel<float> m2;
        m2.init({cfg, cfg}, 0);
        ParamList<float> p2;
        m2.params(p2);
        const std::size_t n2 = param_count(p2);
        CHECK(std::abs(static_cast<double>(n2) - 1.45e6) <= 0.15 * 1.45e6);
        CHECK(fusion_model_complexity({cfg, cfg}, {{64, 125}, {64, 100}}).params == n2);

        FusionModel<float> m3;
        m3.init({cfg, cfg, cfg}, 0);
        ParamList<float> p3;
        m3.params(p3);
        const std::size_t n3 = param_count(p3);
        CHECK(std::abs(static_cast<double>(n3) - 2.05e6) <= 0.15 * 2.05e6);
    }
}

TEST_CASE("forward produces one logit row per sample") {
    SingleSensorModel<float> m;
    m.init(tiny_config(), 7);
    Act<float> x;
    x.resize(5, 16, 10, 2);
    x.m.setRandom();
    Mat<float> logits;
    chomp::Rng rng(0);
    m.forward(x, logits, false, rng);
    CHECK(logits.rows() == 5);
    CHECK(logits.cols() == 3);
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        CHECK(std::isfinite(logits.data()[i]));
}

TEST_CASE("gradient check passes on a model with every layer type") {
    const double err = gradient_check_single(tiny_config(), 12, 10, 3, 11, 80);
    CHECK(err < 1e-4);
}

TEST_CASE("fusion gradient check covers the gate and both backbones") {
    const BackboneConfig cfg = tiny_config();
    const double err =
        gradient_check_fusion({cfg, cfg}, {{12, 10}, {8, 8}}, 3, 13, 80);
    CHECK(err < 1e-4);
}

TEST_CASE("softmax cross entropy matches a hand computation") {
    Mat<float> logits(2, 3);
    logits << 1.0f, 0.0f, -1.0f, 0.0f, 0.0f, 0.0f;
    Mat<float> d;
    const double loss = softmax_ce(logits, {0, 2}, d);
    const double l0 = -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0 + std::exp(-1.0)));
    const double l1 = -std::log(1.0 / 3.0);
    CHECK(loss == doctest::Approx((l0 + l1) / 2.0));
    CHECK(d(1, 2) == doctest::Approx((1.0 / 3.0 - 1.0) / 2.0));
}

TEST_CASE("early stopping halts exactly patience epochs after the best") {
    auto d = tiny_dataset<float>(24, 8, 8, 2, 1);
    SingleSensorModel<float> m;
    m.init(tiny_config(), 3);
    TrainConfig cfg;
    cfg.lr = 0.0;  // loss can never improve after the first epoch
    cfg.warmup_epochs = 1;
    cfg.max_epochs = 50;
    cfg.batch_size = 64;  // one batch per epoch: constant batch-norm stats
    cfg.patience = 3;
    const TrainResult res = train_single(m, d, cfg);
    CHECK(res.best_epoch == 0);
    CHECK(res.epochs_run == 1 + cfg.patience);
}

TEST_CASE("training reduces the loss on learnable data") {
    auto d = tiny_dataset<float>(48, 8, 8, 2, 2);
    SingleSensorModel<float> m;
    m.init(tiny_config(), 5);
    TrainConfig cfg;
    cfg.warmup_epochs = 1;
    cfg.max_epochs = 15;
    cfg.batch_size = 16;
    cfg.patience = 15;
    const TrainResult res = train_single(m, d, cfg);
    REQUIRE(!res.history.empty());
    CHECK(res.history.back().train_loss < res.history.front().train_loss);
    CHECK(res.best_val_loss < res.history.front().val_loss + 1e-12);
}

TEST_CASE("fusion warm-up leaves the backbones bit-identical") {
    const BackboneConfig cfg = tiny_config();
    std::vector<Batchset<float>> ds;
    ds.push_back(tiny_dataset<float>(24, 8, 8, 2, 3));
    ds.push_back(tiny_dataset<float>(24, 8, 8, 2, 3));
    FusionModel<float> m;
    m.init({cfg, cfg}, 9);
    ParamList<float> backbone_params;
    for (auto& b : m.backbones) b.params(backbone_params);
    std::vector<Mat<float>> before;
    for (auto* p : backbone_params) before.push_back(p->value);

    TrainConfig tc;
    tc.warmup_epochs = 3;
    tc.fusion_max_epochs = 0;  // frozen phase only
    tc.batch_size = 8;
    const TrainResult res = train_fusion(m, ds, tc);
    CHECK(res.epochs_run == 3);
    for (std::size_t i = 0; i < backbone_params.size(); ++i)
        CHECK(backbone_params[i]->value == before[i]);

    // the fusion stage itself must have moved
    ParamList<float> fusion;
    m.fusion_params(fusion);
    bool moved = false;
    for (auto* p : fusion)
        if (p->grad.size() != 0 || p->adam_m.size() != 0) moved = true;
    CHECK(moved);
}

TEST_CASE("adam takes a descent step on a quadratic") {
    Param<float> p;
    p.value = Mat<float>::Constant(1, 1, 5.0f);
    p.grad = Mat<float>::Constant(1, 1, 10.0f);
    ParamList<float> list = {&p};
    Adam<float> opt(0.1f);
    opt.step(list);
    CHECK(p.value(0, 0) < 5.0f);
}
