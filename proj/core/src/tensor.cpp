#include "chomp/tensor.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "chomp/errors.hpp"

namespace chomp {

namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is, const std::filesystem::path& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw FormatError("truncated tensor header: " + path.string());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    if (t.shape.empty()) throw FormatError("tensor shape must be nonempty");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    put_u32(os, kTensorMagic);
    put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_u32(os, d);
    // float32 payload, little-endian host assumed
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * 4));
    if (!os) throw FormatError("short write: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path.string());
    if (get_u32(is, path) != kTensorMagic)
        throw FormatError("bad magic in " + path.string());
    std::uint32_t rank = get_u32(is, path);
    if (rank == 0 || rank > 8) throw FormatError("bad rank in " + path.string());
    Tensor t;
    t.shape.resize(rank);
    for (auto& d : t.shape) d = get_u32(is, path);
    std::size_t n = t.size();
    t.data.resize(n);
    if (!is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(n * 4)))
        throw FormatError("truncated tensor payload: " + path.string());
    return t;
}

}  // namespace chomp
