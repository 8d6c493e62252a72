#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <vector>

namespace chomp {

// Row-major float32 tensor. On-disk layout: little-endian u32 words
// [magic 0x43484F4D, rank, dim0..dimN-1] followed by the float32 payload.
struct Tensor {
    std::vector<std::uint32_t> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::uint32_t> s) : shape(std::move(s)) {
        data.assign(size(), 0.0f);
    }

    std::size_t size() const {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    bool operator==(const Tensor& o) const = default;
};

inline constexpr std::uint32_t kTensorMagic = 0x43484F4D;  // "CHOM"

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace chomp
