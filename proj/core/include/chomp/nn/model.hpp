#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "chomp/nn/layers.hpp"

namespace chomp::nn {

struct MBConvSpec {
    int out_channels;
    int stride;         // 1 or 2
    int expansion;      // >= 1
};

struct BackboneConfig {
    int in_channels = 4;
    int stem_channels = 16;
    // Seven blocks, stride-2 downsampling pattern, width capped at the
    // 112-dim feature size. Tuned to land inside the parameter budget.
    std::vector<MBConvSpec> blocks = {
        {16, 1, 1},  {24, 2, 6}, {56, 2, 6}, {80, 2, 6},
        {112, 1, 6}, {112, 1, 6}, {112, 1, 6},
    };
    double se_reduction = 0.25;  // of the block input channels
    int feature_dim = 112;
};

// Inverted residual block: pointwise expansion, depthwise 3x3, SE, pointwise
// projection; residual skip iff stride 1 and matching channel count.
template <typename T>
struct MBConvBlock {
    int in_ch = 0, out_ch = 0, stride = 1, expansion = 1;
    bool has_expand = false, has_skip = false;
    PointwiseConv<T> expand;
    BatchNorm<T> bn_expand;
    SiLU<T> act_expand;
    DepthwiseConv3x3<T> dw;
    BatchNorm<T> bn_dw;
    SiLU<T> act_dw;
    SEBlock<T> se;
    PointwiseConv<T> project;
    BatchNorm<T> bn_project;

    void init(int in, const MBConvSpec& spec, double se_reduction, chomp::Rng& rng) {
        in_ch = in;
        out_ch = spec.out_channels;
        stride = spec.stride;
        expansion = spec.expansion;
        const int mid = in * expansion;
        has_expand = expansion > 1;
        has_skip = stride == 1 && in == out_ch;
        if (has_expand) {
            expand.init(in, mid, rng);
            bn_expand.init(mid);
        }
        dw.init(mid, stride, rng);
        bn_dw.init(mid);
        const int reduced = std::max(1, static_cast<int>(in * se_reduction));
        se.init(mid, reduced, rng);
        project.init(mid, out_ch, rng);
        bn_project.init(out_ch);
    }

    void params(ParamList<T>& p) {
        if (has_expand) {
            expand.params(p);
            bn_expand.params(p);
        }
        dw.params(p);
        bn_dw.params(p);
        se.params(p);
        project.params(p);
        bn_project.params(p);
    }
    void buffers(std::vector<Mat<T>*>& b) {
        if (has_expand) bn_expand.buffers(b);
        bn_dw.buffers(b);
        bn_project.buffers(b);
    }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        Act<T> a, b;
        const Act<T>* cur = &x;
        if (has_expand) {
            expand.forward(*cur, a, train);
            bn_expand.forward(a, b, train);
            act_expand.forward(b, a, train);
            cur = &a;
        }
        dw.forward(*cur, b, train);
        bn_dw.forward(b, a, train);
        act_dw.forward(a, b, train);
        se.forward(b, a, train);
        project.forward(a, b, train);
        bn_project.forward(b, y, train);
        if (has_skip) y.m += x.m;
    }

    void backward(const Act<T>& dy, Act<T>& dx) {
        Act<T> a, b;
        bn_project.backward(dy, a);
        project.backward(a, b);
        se.backward(b, a);
        act_dw.backward(a, b);
        bn_dw.backward(b, a);
        dw.backward(a, b);
        if (has_expand) {
            act_expand.backward(b, a);
            bn_expand.backward(a, b);
            expand.backward(b, dx);
        } else {
            dx = std::move(b);
        }
        if (has_skip) dx.m += dy.m;
    }
};

// Stem conv + seven MBConv blocks + global average pooling -> feature_dim.
template <typename T>
struct Backbone {
    BackboneConfig cfg;
    Conv3x3<T> stem;
    BatchNorm<T> bn_stem;
    SiLU<T> act_stem;
    std::vector<MBConvBlock<T>> blocks;
    GlobalAvgPool<T> pool;
    int last_h = 0, last_w = 0;

    void init(const BackboneConfig& c, chomp::Rng& rng) {
        cfg = c;
        stem.init(c.in_channels, c.stem_channels, 2, rng);
        bn_stem.init(c.stem_channels);
        blocks.resize(c.blocks.size());
        int ch = c.stem_channels;
        for (std::size_t i = 0; i < c.blocks.size(); ++i) {
            blocks[i].init(ch, c.blocks[i], c.se_reduction, rng);
            ch = c.blocks[i].out_channels;
        }
    }
    void params(ParamList<T>& p) {
        stem.params(p);
        bn_stem.params(p);
        for (auto& b : blocks) b.params(p);
    }
    void buffers(std::vector<Mat<T>*>& b) {
        bn_stem.buffers(b);
        for (auto& blk : blocks) blk.buffers(b);
    }

    // features: batch x feature_dim
    void forward(const Act<T>& x, Mat<T>& features, bool train) {
        Act<T> a, b;
        stem.forward(x, a, train);
        bn_stem.forward(a, b, train);
        act_stem.forward(b, a, train);
        for (auto& blk : blocks) {
            blk.forward(a, b, train);
            std::swap(a, b);
        }
        last_h = a.h;
        last_w = a.w;
        pool.forward(a, features);
    }
    void backward(const Mat<T>& dfeatures, Act<T>& dx) {
        Act<T> a, b;
        pool.backward(dfeatures, a, last_h, last_w);
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
            it->backward(a, b);
            std::swap(a, b);
        }
        act_stem.backward(a, b);
        bn_stem.backward(b, a);
        stem.backward(a, dx);
    }
};

// Backbone + dropout + linear head -> 3 logits.
template <typename T>
struct SingleSensorModel {
    Backbone<T> backbone;
    Dropout<T> dropout;
    Linear<T> head;
    Mat<T> feat_cache;
    Mat<T> drop_cache;

    void init(const BackboneConfig& cfg, std::uint64_t seed) {
        chomp::Rng rng(chomp::derive_seed(seed, "single-sensor-init"));
        backbone.init(cfg, rng);
        dropout.p = static_cast<T>(0.2);
        head.init(cfg.feature_dim, 3, rng);
    }
    void params(ParamList<T>& p) {
        backbone.params(p);
        head.params(p);
    }
    void backbone_params(ParamList<T>& p) { backbone.params(p); }
    void buffers(std::vector<Mat<T>*>& b) { backbone.buffers(b); }

    void forward(const Act<T>& x, Mat<T>& logits, bool train, chomp::Rng& rng) {
        backbone.forward(x, feat_cache, train);
        dropout.forward(feat_cache, drop_cache, train, rng);
        head.forward(drop_cache, logits, train);
    }
    void backward(const Mat<T>& dlogits, Act<T>& dx) {
        Mat<T> d1, d2;
        head.backward(dlogits, d1);
        dropout.backward(d1, d2, true);
        backbone.backward(d2, dx);
    }
};

// N backbones -> concat -> batch norm -> sigmoid gate (MLP bottleneck) ->
// recalibration -> MLP head -> 3 logits.
template <typename T>
struct FusionModel {
    std::vector<Backbone<T>> backbones;
    BatchNorm<T> bn_concat;
    Linear<T> gate_fc1;  // concat -> concat/4
    SiLU<T> gate_act;
    Linear<T> gate_fc2;  // concat/4 -> concat
    Linear<T> head_fc1;  // concat -> 112
    SiLU<T> head_act;
    Dropout<T> dropout;
    Linear<T> head_fc2;  // 112 -> 3
    int concat_dim = 0;

    // caches
    Mat<T> concat_cache, bn_out_cache, gate_z_cache, gate_g_cache, gated_cache;
    Mat<T> h1_cache, h1_act_cache, drop_cache;
    std::vector<int> widths;

    void init(const std::vector<BackboneConfig>& cfgs, std::uint64_t seed) {
        chomp::Rng rng(chomp::derive_seed(seed, "fusion-init"));
        backbones.resize(cfgs.size());
        widths.clear();
        concat_dim = 0;
        for (std::size_t i = 0; i < cfgs.size(); ++i) {
            backbones[i].init(cfgs[i], rng);
            widths.push_back(cfgs[i].feature_dim);
            concat_dim += cfgs[i].feature_dim;
        }
        bn_concat.init(concat_dim);
        gate_fc1.init(concat_dim, concat_dim / 4, rng);
        gate_fc2.init(concat_dim / 4, concat_dim, rng);
        head_fc1.init(concat_dim, 112, rng);
        dropout.p = static_cast<T>(0.2);
        head_fc2.init(112, 3, rng);
    }
    void params(ParamList<T>& p) {
        for (auto& b : backbones) b.params(p);
        fusion_params(p);
    }
    void fusion_params(ParamList<T>& p) {
        bn_concat.params(p);
        gate_fc1.params(p);
        gate_fc2.params(p);
        head_fc1.params(p);
        head_fc2.params(p);
    }
    void buffers(std::vector<Mat<T>*>& b) {
        for (auto& bb : backbones) bb.buffers(b);
        bn_concat.buffers(b);
    }

    // features path shared by full forward and the cached-feature warm-up
    void forward_from_features(const Mat<T>& concat, Mat<T>& logits, bool train,
                               chomp::Rng& rng) {
        if (train) concat_cache = concat;
        Act<T> a, b;
        a.resize(static_cast<int>(concat.rows()), 1, 1, concat_dim);
        a.m = concat;
        bn_concat.forward(a, b, train);
        if (train) bn_out_cache = b.m;
        Mat<T> z1, z1a, z2;
        gate_fc1.forward(b.m, z1, train);
        if (train) gate_z_cache = z1;
        z1a = z1.unaryExpr([](T v) { return v * sigmoid(v); });
        gate_fc2.forward(z1a, z2, train);
        Mat<T> g = z2.unaryExpr([](T v) { return sigmoid(v); });
        if (train) gate_g_cache = g;
        Mat<T> gated = (b.m.array() * g.array()).matrix();
        if (train) gated_cache = gated;
        Mat<T> h1;
        head_fc1.forward(gated, h1, train);
        if (train) h1_cache = h1;
        Mat<T> h1a = h1.unaryExpr([](T v) { return v * sigmoid(v); });
        if (train) h1_act_cache = h1a;
        Mat<T> hd;
        dropout.forward(h1a, hd, train, rng);
        head_fc2.forward(hd, logits, train);
    }

    void forward(const std::vector<Act<T>>& xs, Mat<T>& logits, bool train,
                 chomp::Rng& rng) {
        if (xs.size() != backbones.size())
            throw chomp::ConfigError("fusion expects one tensor per sensor");
        Mat<T> concat;
        std::vector<Mat<T>> feats(backbones.size());
        for (std::size_t i = 0; i < backbones.size(); ++i)
            backbones[i].forward(xs[i], feats[i], train);
        concat.resize(feats[0].rows(), concat_dim);
        int off = 0;
        for (std::size_t i = 0; i < feats.size(); ++i) {
            concat.middleCols(off, widths[i]) = feats[i];
            off += widths[i];
        }
        forward_from_features(concat, logits, train, rng);
    }

    // backward through the fusion stage only; returns d(concat features)
    Mat<T> backward_fusion(const Mat<T>& dlogits) {
        Mat<T> d1, d2;
        head_fc2.backward(dlogits, d1);
        dropout.backward(d1, d2, true);
        Mat<T> dh1 = (d2.array() * h1_cache.unaryExpr([](T v) {
                                       const T s = sigmoid(v);
                                       return s * (1 + v * (1 - s));
                                   }).array())
                         .matrix();
        Mat<T> dgated;
        head_fc1.backward(dh1, dgated);
        Mat<T> dg = (dgated.array() * bn_out_cache.array()).matrix();
        Mat<T> dbn_direct = (dgated.array() * gate_g_cache.array()).matrix();
        Mat<T> dz2 = (dg.array() *
                      (gate_g_cache.array() * (1 - gate_g_cache.array())))
                         .matrix();
        Mat<T> dz1a;
        gate_fc2.backward(dz2, dz1a);
        Mat<T> dz1 = (dz1a.array() * gate_z_cache.unaryExpr([](T v) {
                                         const T s = sigmoid(v);
                                         return s * (1 + v * (1 - s));
                                     }).array())
                         .matrix();
        Mat<T> dbn_gate;
        gate_fc1.backward(dz1, dbn_gate);
        Act<T> dbn, dconcat;
        dbn.resize(static_cast<int>(dbn_direct.rows()), 1, 1, concat_dim);
        dbn.m = dbn_direct + dbn_gate;
        bn_concat.backward(dbn, dconcat);
        return dconcat.m;
    }

    void backward(const Mat<T>& dlogits, std::vector<Act<T>>& dxs) {
        Mat<T> dconcat = backward_fusion(dlogits);
        dxs.resize(backbones.size());
        int off = 0;
        for (std::size_t i = 0; i < backbones.size(); ++i) {
            Mat<T> df = dconcat.middleCols(off, widths[i]);
            backbones[i].backward(df, dxs[i]);
            off += widths[i];
        }
    }
};

template <typename T>
inline std::size_t param_count(ParamList<T>& list) {
    std::size_t n = 0;
    for (auto* p : list) n += p->count();
    return n;
}

// ---------------------------------------------------------------------------
// Analytic parameter and FLOP accounting. FLOPs use the multiply-add = 2
// convention for GEMM-like ops and count elementwise work explicitly.

struct Complexity {
    std::size_t params = 0;
    std::size_t flops = 0;  // one forward pass, batch 1
};

inline int conv_out_dim(int n, int s) { return (n + 2 - 3) / s + 1; }

inline Complexity backbone_complexity(const BackboneConfig& c, int in_h, int in_w) {
    Complexity cx;
    auto bn = [&](int ch, std::size_t elems) {
        cx.params += 2u * ch;
        cx.flops += 2 * elems;
    };
    auto silu = [&](std::size_t elems) { cx.flops += 4 * elems; };

    int h = conv_out_dim(in_h, 2), w = conv_out_dim(in_w, 2);
    std::size_t elems = static_cast<std::size_t>(h) * w * c.stem_channels;
    cx.params += static_cast<std::size_t>(c.in_channels) * 9 * c.stem_channels;
    cx.flops += 2 * elems * c.in_channels * 9;
    bn(c.stem_channels, elems);
    silu(elems);

    int ch = c.stem_channels;
    for (const auto& blk : c.blocks) {
        const int mid = ch * blk.expansion;
        const std::size_t in_elems = static_cast<std::size_t>(h) * w;
        if (blk.expansion > 1) {
            cx.params += static_cast<std::size_t>(ch) * mid;
            cx.flops += 2 * in_elems * ch * mid;
            bn(mid, in_elems * mid);
            silu(in_elems * mid);
        }
        const int h2 = conv_out_dim(h, blk.stride), w2 = conv_out_dim(w, blk.stride);
        const std::size_t mid_elems = static_cast<std::size_t>(h2) * w2;
        cx.params += 9u * mid;
        cx.flops += 2 * mid_elems * mid * 9;
        bn(mid, mid_elems * mid);
        silu(mid_elems * mid);
        const int r = std::max(1, static_cast<int>(std::lround(ch * c.se_reduction)));
        cx.params += static_cast<std::size_t>(mid) * r + r +
                     static_cast<std::size_t>(r) * mid + mid;
        cx.flops += mid_elems * mid                 // pool
                    + 2u * mid * r + 4u * r         // fc1 + SiLU
                    + 2u * r * mid + 4u * mid       // fc2 + sigmoid
                    + mid_elems * mid;              // rescale
        cx.params += static_cast<std::size_t>(mid) * blk.out_channels;
        cx.flops += 2 * mid_elems * mid * blk.out_channels;
        bn(blk.out_channels, mid_elems * blk.out_channels);
        if (blk.stride == 1 && ch == blk.out_channels)
            cx.flops += mid_elems * blk.out_channels;  // residual add
        ch = blk.out_channels;
        h = h2;
        w = w2;
    }
    cx.flops += static_cast<std::size_t>(h) * w * ch;  // global average pool
    return cx;
}

inline Complexity single_model_complexity(const BackboneConfig& c, int in_h,
                                          int in_w) {
    Complexity cx = backbone_complexity(c, in_h, in_w);
    cx.params += static_cast<std::size_t>(c.feature_dim) * 3 + 3;
    cx.flops += 2u * c.feature_dim * 3;
    return cx;
}

inline Complexity fusion_model_complexity(const std::vector<BackboneConfig>& cfgs,
                                          const std::vector<std::pair<int, int>>& shapes) {
    Complexity cx;
    int concat = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const Complexity b = backbone_complexity(cfgs[i], shapes[i].first,
                                                 shapes[i].second);
        cx.params += b.params;
        cx.flops += b.flops;
        concat += cfgs[i].feature_dim;
    }
    const int mid = concat / 4;
    cx.params += 2u * concat;                                  // batch norm
    cx.params += static_cast<std::size_t>(concat) * mid + mid; // gate fc1
    cx.params += static_cast<std::size_t>(mid) * concat + concat;  // gate fc2
    cx.params += static_cast<std::size_t>(concat) * 112 + 112; // head fc1
    cx.params += 112u * 3 + 3;                                 // head fc2
    cx.flops += 2u * concat                       // batch norm
                + 2u * concat * mid + 4u * mid    // gate fc1 + SiLU
                + 2u * mid * concat + 4u * concat // gate fc2 + sigmoid
                + static_cast<std::size_t>(concat)        // recalibration
                + 2u * concat * 112 + 4u * 112    // head fc1 + SiLU
                + 2u * 112 * 3;                   // head fc2
    return cx;
}

}  // namespace chomp::nn
