#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chomp/nn/model.hpp"
#include "chomp/tensor.hpp"

namespace chomp {

// A checkpoint is a manifest of key/value metadata plus an ordered list of
// tensors (parameters followed by buffers, in model traversal order).
struct Checkpoint {
    std::map<std::string, std::string> meta;
    std::vector<Tensor> tensors;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------

namespace detail {

inline Tensor to_tensor(const nn::Mat<float>& m) {
    Tensor t;
    t.shape = {static_cast<std::uint32_t>(m.rows()),
               static_cast<std::uint32_t>(m.cols())};
    t.data.assign(m.data(), m.data() + m.size());
    return t;
}

inline void from_tensor(const Tensor& t, nn::Mat<float>& m) {
    if (t.shape.size() != 2)
        throw FormatError("checkpoint tensor must be rank 2");
    m.resize(t.shape[0], t.shape[1]);
    std::copy(t.data.begin(), t.data.end(), m.data());
}

}  // namespace detail

// Captures / restores any model exposing params() and buffers().
template <typename Model>
Checkpoint make_checkpoint(Model& model) {
    Checkpoint ck;
    nn::ParamList<float> params;
    model.params(params);
    std::vector<nn::Mat<float>*> bufs;
    model.buffers(bufs);
    ck.meta["n_params"] = std::to_string(params.size());
    ck.meta["n_buffers"] = std::to_string(bufs.size());
    for (auto* p : params) ck.tensors.push_back(detail::to_tensor(p->value));
    for (auto* b : bufs) ck.tensors.push_back(detail::to_tensor(*b));
    return ck;
}

template <typename Model>
void apply_checkpoint(const Checkpoint& ck, Model& model) {
    nn::ParamList<float> params;
    model.params(params);
    std::vector<nn::Mat<float>*> bufs;
    model.buffers(bufs);
    if (ck.tensors.size() != params.size() + bufs.size())
        throw FormatError("checkpoint tensor count does not match model");
    std::size_t i = 0;
    for (auto* p : params) detail::from_tensor(ck.tensors[i++], p->value);
    for (auto* b : bufs) detail::from_tensor(ck.tensors[i++], *b);
}

}  // namespace chomp
