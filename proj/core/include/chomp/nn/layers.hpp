#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "chomp/errors.hpp"
#include "chomp/nn/act.hpp"
#include "chomp/rng.hpp"

namespace chomp::nn {

template <typename T>
struct Param {
    Mat<T> value;
    Mat<T> grad;
    Mat<T> adam_m;
    Mat<T> adam_v;

    void init_zero(int rows, int cols) {
        value = Mat<T>::Zero(rows, cols);
        grad = Mat<T>::Zero(rows, cols);
    }
    void he_uniform(int rows, int cols, int fan_in, chomp::Rng& rng) {
        init_zero(rows, cols);
        const double limit = std::sqrt(6.0 / fan_in);
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index j = 0; j < value.cols(); ++j)
            for (Eigen::Index i = 0; i < value.rows(); ++i)
                value(i, j) = static_cast<T>(u(rng));
    }
    std::size_t count() const { return static_cast<std::size_t>(value.size()); }
};

template <typename T>
using ParamList = std::vector<Param<T>*>;

template <typename T>
inline T sigmoid(T x) {
    return static_cast<T>(1) / (static_cast<T>(1) + std::exp(-x));
}

// ---------------------------------------------------------------------------

// 1x1 convolution (no bias): a single GEMM on the (BHW) x C layout.
template <typename T>
struct PointwiseConv {
    Param<T> w;  // in x out
    Mat<T> x_cache;

    void init(int in, int out, chomp::Rng& rng) { w.he_uniform(in, out, in, rng); }
    void params(ParamList<T>& p) { p.push_back(&w); }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        if (train) x_cache = x.m;
        y.batch = x.batch;
        y.h = x.h;
        y.w = x.w;
        y.m.noalias() = x.m * w.value;
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        w.grad.noalias() += x_cache.transpose() * dy.m;
        dx.batch = dy.batch;
        dx.h = dy.h;
        dx.w = dy.w;
        dx.m.noalias() = dy.m * w.value.transpose();
    }
};

// 3x3 convolution via im2col (stride s, zero padding 1, no bias).
template <typename T>
struct Conv3x3 {
    int in_ch = 0, out_ch = 0, stride = 1;
    Param<T> w;  // (in*9) x out
    Mat<T> col_cache;
    int in_h = 0, in_w = 0, in_b = 0;

    void init(int in, int out, int s, chomp::Rng& rng) {
        in_ch = in;
        out_ch = out;
        stride = s;
        w.he_uniform(in * 9, out, in * 9, rng);
    }
    void params(ParamList<T>& p) { p.push_back(&w); }

    static int out_dim(int n, int s) { return (n + 2 - 3) / s + 1; }

    void im2col(const Act<T>& x, Mat<T>& col) const {
        const int h2 = out_dim(x.h, stride), w2 = out_dim(x.w, stride);
        col.resize(static_cast<Eigen::Index>(x.batch) * h2 * w2, in_ch * 9);
        col.setZero();
        for (int c = 0; c < in_ch; ++c) {
            const T* src = x.m.col(c).data();
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                    T* dst = col.col(c * 9 + ky * 3 + kx).data();
                    for (int b = 0; b < x.batch; ++b) {
                        const T* sb = src + static_cast<std::size_t>(b) * x.h * x.w;
                        T* db = dst + static_cast<std::size_t>(b) * h2 * w2;
                        for (int y = 0; y < h2; ++y) {
                            const int sy = y * stride + ky - 1;
                            if (sy < 0 || sy >= x.h) continue;
                            for (int xx = 0; xx < w2; ++xx) {
                                const int sx = xx * stride + kx - 1;
                                if (sx < 0 || sx >= x.w) continue;
                                db[y * w2 + xx] = sb[sy * x.w + sx];
                            }
                        }
                    }
                }
        }
    }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        in_h = x.h;
        in_w = x.w;
        in_b = x.batch;
        Mat<T> col;
        im2col(x, col);
        y.batch = x.batch;
        y.h = out_dim(x.h, stride);
        y.w = out_dim(x.w, stride);
        y.m.noalias() = col * w.value;
        if (train) col_cache = std::move(col);
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        w.grad.noalias() += col_cache.transpose() * dy.m;
        Mat<T> dcol = dy.m * w.value.transpose();
        dx.batch = in_b;
        dx.h = in_h;
        dx.w = in_w;
        dx.m = Mat<T>::Zero(static_cast<Eigen::Index>(in_b) * in_h * in_w, in_ch);
        const int h2 = dy.h, w2 = dy.w;
        for (int c = 0; c < in_ch; ++c) {
            T* dst = dx.m.col(c).data();
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                    const T* src = dcol.col(c * 9 + ky * 3 + kx).data();
                    for (int b = 0; b < in_b; ++b) {
                        T* db = dst + static_cast<std::size_t>(b) * in_h * in_w;
                        const T* sb = src + static_cast<std::size_t>(b) * h2 * w2;
                        for (int y = 0; y < h2; ++y) {
                            const int sy = y * stride + ky - 1;
                            if (sy < 0 || sy >= in_h) continue;
                            for (int xx = 0; xx < w2; ++xx) {
                                const int sx = xx * stride + kx - 1;
                                if (sx < 0 || sx >= in_w) continue;
                                db[sy * in_w + sx] += sb[y * w2 + xx];
                            }
                        }
                    }
                }
        }
    }
};

// Depthwise 3x3 convolution (zero padding 1, no bias); direct loops, each
// channel column is contiguous.
template <typename T>
struct DepthwiseConv3x3 {
    int ch = 0, stride = 1;
    Param<T> w;  // 9 x ch
    Act<T> x_cache;

    void init(int c, int s, chomp::Rng& rng) {
        ch = c;
        stride = s;
        w.he_uniform(9, c, 9, rng);
    }
    void params(ParamList<T>& p) { p.push_back(&w); }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        if (train) x_cache = x;
        const int h2 = Conv3x3<T>::out_dim(x.h, stride);
        const int w2 = Conv3x3<T>::out_dim(x.w, stride);
        y.resize(x.batch, h2, w2, ch);
        y.m.setZero();
        for (int c = 0; c < ch; ++c) {
            const T* src = x.m.col(c).data();
            T* dst = y.m.col(c).data();
            const T* k = w.value.col(c).data();
            for (int b = 0; b < x.batch; ++b) {
                const T* sb = src + static_cast<std::size_t>(b) * x.h * x.w;
                T* db = dst + static_cast<std::size_t>(b) * h2 * w2;
                for (int y2 = 0; y2 < h2; ++y2)
                    for (int x2 = 0; x2 < w2; ++x2) {
                        T acc = 0;
                        for (int ky = 0; ky < 3; ++ky) {
                            const int sy = y2 * stride + ky - 1;
                            if (sy < 0 || sy >= x.h) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                const int sx = x2 * stride + kx - 1;
                                if (sx < 0 || sx >= x.w) continue;
                                acc += k[ky * 3 + kx] * sb[sy * x.w + sx];
                            }
                        }
                        db[y2 * w2 + x2] = acc;
                    }
            }
        }
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        dx.resize(x_cache.batch, x_cache.h, x_cache.w, ch);
        dx.m.setZero();
        const int h2 = dy.h, w2 = dy.w;
        for (int c = 0; c < ch; ++c) {
            const T* src = x_cache.m.col(c).data();
            const T* gsrc = dy.m.col(c).data();
            T* gdst = dx.m.col(c).data();
            const T* k = w.value.col(c).data();
            T* gk = w.grad.col(c).data();
            for (int b = 0; b < dy.batch; ++b) {
                const T* sb = src + static_cast<std::size_t>(b) * x_cache.h * x_cache.w;
                const T* gb = gsrc + static_cast<std::size_t>(b) * h2 * w2;
                T* gd = gdst + static_cast<std::size_t>(b) * x_cache.h * x_cache.w;
                for (int y2 = 0; y2 < h2; ++y2)
                    for (int x2 = 0; x2 < w2; ++x2) {
                        const T g = gb[y2 * w2 + x2];
                        for (int ky = 0; ky < 3; ++ky) {
                            const int sy = y2 * stride + ky - 1;
                            if (sy < 0 || sy >= x_cache.h) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                const int sx = x2 * stride + kx - 1;
                                if (sx < 0 || sx >= x_cache.w) continue;
                                gk[ky * 3 + kx] += g * sb[sy * x_cache.w + sx];
                                gd[sy * x_cache.w + sx] += g * k[ky * 3 + kx];
                            }
                        }
                    }
            }
        }
    }
};

// Batch normalization over (batch, spatial) per channel. Works for 1D
// feature vectors as the h = w = 1 case.
template <typename T>
struct BatchNorm {
    Param<T> gamma, beta;
    Mat<T> running_mean, running_var;  // buffers, 1 x ch
    T eps = static_cast<T>(1e-5);
    T momentum = static_cast<T>(0.1);
    long seen_batches = 0;

    Mat<T> xhat_cache;
    Mat<T> invstd_cache;  // 1 x ch

    void init(int ch) {
        gamma.init_zero(1, ch);
        gamma.value.setOnes();
        beta.init_zero(1, ch);
        running_mean = Mat<T>::Zero(1, ch);
        running_var = Mat<T>::Ones(1, ch);
    }
    void params(ParamList<T>& p) {
        p.push_back(&gamma);
        p.push_back(&beta);
    }
    void buffers(std::vector<Mat<T>*>& b) {
        b.push_back(&running_mean);
        b.push_back(&running_var);
    }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        const auto n = static_cast<T>(x.m.rows());
        y.batch = x.batch;
        y.h = x.h;
        y.w = x.w;
        y.m.resize(x.m.rows(), x.m.cols());
        if (train) {
            Mat<T> mean = x.m.colwise().mean();
            Mat<T> var(1, x.m.cols());
            for (Eigen::Index c = 0; c < x.m.cols(); ++c)
                var(0, c) = (x.m.col(c).array() - mean(0, c)).square().sum() / n;
            invstd_cache.resize(1, x.m.cols());
            for (Eigen::Index c = 0; c < x.m.cols(); ++c)
                invstd_cache(0, c) = static_cast<T>(1) / std::sqrt(var(0, c) + eps);
            xhat_cache.resize(x.m.rows(), x.m.cols());
            for (Eigen::Index c = 0; c < x.m.cols(); ++c)
                xhat_cache.col(c) =
                    ((x.m.col(c).array() - mean(0, c)) * invstd_cache(0, c))
                        .matrix();
            for (Eigen::Index c = 0; c < x.m.cols(); ++c)
                y.m.col(c) = (xhat_cache.col(c).array() * gamma.value(0, c) +
                              beta.value(0, c))
                                 .matrix();
            const T unbias = n > 1 ? n / (n - 1) : static_cast<T>(1);
            // cumulative averaging for the first batches, exponential after:
            // otherwise the running statistics need dozens of updates to leave
            // their (0, 1) initialization and eval-mode outputs lag training
            ++seen_batches;
            if (seen_batches == 1) {
                running_mean = mean;
                running_var = var * unbias;
            } else {
                const T m_eff = std::max(
                    momentum, static_cast<T>(1) / static_cast<T>(seen_batches));
                // incremental form: an unchanged batch statistic leaves the
                // running value bit-identical (the delta is exactly zero)
                running_mean += m_eff * (mean - running_mean);
                running_var += m_eff * (var * unbias - running_var);
            }
        } else {
            for (Eigen::Index c = 0; c < x.m.cols(); ++c) {
                const T istd =
                    static_cast<T>(1) / std::sqrt(running_var(0, c) + eps);
                y.m.col(c) = (((x.m.col(c).array() - running_mean(0, c)) * istd) *
                                  gamma.value(0, c) +
                              beta.value(0, c))
                                 .matrix();
            }
        }
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        const auto n = static_cast<T>(dy.m.rows());
        dx.batch = dy.batch;
        dx.h = dy.h;
        dx.w = dy.w;
        dx.m.resize(dy.m.rows(), dy.m.cols());
        for (Eigen::Index c = 0; c < dy.m.cols(); ++c) {
            const T g = gamma.value(0, c);
            const auto dxhat = dy.m.col(c).array() * g;
            const T sum_dxhat = dxhat.sum();
            const T sum_dxhat_xhat = (dxhat * xhat_cache.col(c).array()).sum();
            gamma.grad(0, c) += (dy.m.col(c).array() * xhat_cache.col(c).array()).sum();
            beta.grad(0, c) += dy.m.col(c).sum();
            dx.m.col(c) = ((invstd_cache(0, c) / n) *
                           (n * dxhat - sum_dxhat -
                            xhat_cache.col(c).array() * sum_dxhat_xhat))
                              .matrix();
        }
    }
};

template <typename T>
struct SiLU {
    Mat<T> x_cache;
    void forward(const Act<T>& x, Act<T>& y, bool train) {
        if (train) x_cache = x.m;
        y.batch = x.batch;
        y.h = x.h;
        y.w = x.w;
        y.m = x.m.unaryExpr([](T v) { return v * sigmoid(v); });
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        dx.batch = dy.batch;
        dx.h = dy.h;
        dx.w = dy.w;
        dx.m = (dy.m.array() * x_cache.unaryExpr([](T v) {
                                   const T s = sigmoid(v);
                                   return s * (1 + v * (1 - s));
                               }).array())
                   .matrix();
    }
};

// Squeeze-and-Excitation: global pool -> fc reduce -> SiLU -> fc expand ->
// sigmoid -> channel-wise rescale.
template <typename T>
struct SEBlock {
    int ch = 0, reduced = 0;
    Param<T> w1, b1;  // ch x reduced, 1 x reduced
    Param<T> w2, b2;  // reduced x ch, 1 x ch
    Act<T> x_cache;
    Mat<T> s_cache, z1_cache, a1_cache, g_cache;

    void init(int c, int r, chomp::Rng& rng) {
        ch = c;
        reduced = r;
        w1.he_uniform(c, r, c, rng);
        b1.init_zero(1, r);
        w2.he_uniform(r, c, r, rng);
        b2.init_zero(1, c);
    }
    void params(ParamList<T>& p) {
        p.push_back(&w1);
        p.push_back(&b1);
        p.push_back(&w2);
        p.push_back(&b2);
    }

    void forward(const Act<T>& x, Act<T>& y, bool train) {
        const int hw = x.spatial();
        Mat<T> s(x.batch, ch);  // per-sample channel means
        for (int b = 0; b < x.batch; ++b)
            s.row(b) = x.m.middleRows(static_cast<Eigen::Index>(b) * hw, hw)
                           .colwise()
                           .mean();
        Mat<T> z1 = (s * w1.value).rowwise() + b1.value.row(0);
        Mat<T> a1 = z1.unaryExpr([](T v) { return v * sigmoid(v); });
        Mat<T> z2 = (a1 * w2.value).rowwise() + b2.value.row(0);
        Mat<T> g = z2.unaryExpr([](T v) { return sigmoid(v); });
        y.batch = x.batch;
        y.h = x.h;
        y.w = x.w;
        y.m.resize(x.m.rows(), x.m.cols());
        for (int b = 0; b < x.batch; ++b)
            for (int c = 0; c < ch; ++c)
                y.m.col(c).segment(static_cast<Eigen::Index>(b) * hw, hw) =
                    x.m.col(c).segment(static_cast<Eigen::Index>(b) * hw, hw) *
                    g(b, c);
        if (train) {
            x_cache = x;
            s_cache = std::move(s);
            z1_cache = std::move(z1);
            a1_cache = std::move(a1);
            g_cache = std::move(g);
        }
    }
    void backward(const Act<T>& dy, Act<T>& dx) {
        const int hw = x_cache.spatial();
        const int B = x_cache.batch;
        Mat<T> dg(B, ch);
        dx.batch = dy.batch;
        dx.h = dy.h;
        dx.w = dy.w;
        dx.m.resize(dy.m.rows(), dy.m.cols());
        for (int b = 0; b < B; ++b)
            for (int c = 0; c < ch; ++c) {
                dg(b, c) = (dy.m.col(c).segment(static_cast<Eigen::Index>(b) * hw, hw)
                                .array() *
                            x_cache.m.col(c)
                                .segment(static_cast<Eigen::Index>(b) * hw, hw)
                                .array())
                               .sum();
                dx.m.col(c).segment(static_cast<Eigen::Index>(b) * hw, hw) =
                    dy.m.col(c).segment(static_cast<Eigen::Index>(b) * hw, hw) *
                    g_cache(b, c);
            }
        // through the gate MLP
        Mat<T> dz2 =
            (dg.array() * (g_cache.array() * (1 - g_cache.array()))).matrix();
        w2.grad.noalias() += a1_cache.transpose() * dz2;
        b2.grad.row(0) += dz2.colwise().sum();
        Mat<T> da1 = dz2 * w2.value.transpose();
        Mat<T> dz1 = (da1.array() * z1_cache.unaryExpr([](T v) {
                                         const T s = sigmoid(v);
                                         return s * (1 + v * (1 - s));
                                     }).array())
                         .matrix();
        w1.grad.noalias() += s_cache.transpose() * dz1;
        b1.grad.row(0) += dz1.colwise().sum();
        Mat<T> ds = dz1 * w1.value.transpose();
        const T inv_hw = static_cast<T>(1) / static_cast<T>(hw);
        for (int b = 0; b < B; ++b)
            for (int c = 0; c < ch; ++c)
                dx.m.col(c)
                    .segment(static_cast<Eigen::Index>(b) * hw, hw)
                    .array() += ds(b, c) * inv_hw;
    }
};

// Global average pooling: (B*H*W) x C -> B x C features.
template <typename T>
struct GlobalAvgPool {
    int hw = 0;
    void forward(const Act<T>& x, Mat<T>& y) {
        hw = x.spatial();
        y.resize(x.batch, x.channels());
        for (int b = 0; b < x.batch; ++b)
            y.row(b) = x.m.middleRows(static_cast<Eigen::Index>(b) * hw, hw)
                           .colwise()
                           .mean();
    }
    void backward(const Mat<T>& dy, Act<T>& dx, int h, int w) {
        dx.resize(static_cast<int>(dy.rows()), h, w, static_cast<int>(dy.cols()));
        const T inv = static_cast<T>(1) / static_cast<T>(hw);
        for (int b = 0; b < dy.rows(); ++b)
            for (int c = 0; c < dy.cols(); ++c)
                dx.m.col(c)
                    .segment(static_cast<Eigen::Index>(b) * hw, hw)
                    .setConstant(dy(b, c) * inv);
    }
};

template <typename T>
struct Linear {
    Param<T> w, b;  // in x out, 1 x out
    Mat<T> x_cache;

    void init(int in, int out, chomp::Rng& rng) {
        w.he_uniform(in, out, in, rng);
        b.init_zero(1, out);
    }
    void params(ParamList<T>& p) {
        p.push_back(&w);
        p.push_back(&b);
    }
    void forward(const Mat<T>& x, Mat<T>& y, bool train) {
        if (train) x_cache = x;
        y.noalias() = x * w.value;
        y.rowwise() += b.value.row(0);
    }
    void backward(const Mat<T>& dy, Mat<T>& dx) {
        w.grad.noalias() += x_cache.transpose() * dy;
        b.grad.row(0) += dy.colwise().sum();
        dx.noalias() = dy * w.value.transpose();
    }
};

// Inverted dropout on feature matrices; active only in training.
template <typename T>
struct Dropout {
    T p = static_cast<T>(0.2);
    Mat<T> mask;

    void forward(const Mat<T>& x, Mat<T>& y, bool train, chomp::Rng& rng) {
        if (!train || p <= 0) {
            y = x;
            return;
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        mask.resize(x.rows(), x.cols());
        const T scale = static_cast<T>(1) / (1 - p);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                mask(i, j) = u(rng) < static_cast<double>(p) ? 0 : scale;
        y = (x.array() * mask.array()).matrix();
    }
    void backward(const Mat<T>& dy, Mat<T>& dx, bool train) {
        if (!train || p <= 0) {
            dx = dy;
            return;
        }
        dx = (dy.array() * mask.array()).matrix();
    }
};

}  // namespace chomp::nn
