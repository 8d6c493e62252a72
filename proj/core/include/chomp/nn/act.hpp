#pragma once

#include <Eigen/Core>

namespace chomp::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Activation batch: rows index (b, y, x) with b-major ordering, columns index
// channels. Column-major storage keeps each channel contiguous.
template <typename T>
struct Act {
    int batch = 0;
    int h = 0;
    int w = 0;
    Mat<T> m;  // (batch*h*w) x channels

    int channels() const { return static_cast<int>(m.cols()); }
    int spatial() const { return h * w; }
    void resize(int b, int hh, int ww, int c) {
        batch = b;
        h = hh;
        w = ww;
        m.resize(static_cast<Eigen::Index>(b) * hh * ww, c);
    }
};

}  // namespace chomp::nn
