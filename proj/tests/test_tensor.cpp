#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "chomp/errors.hpp"
#include "chomp/tensor.hpp"

using namespace chomp;

namespace {
std::filesystem::path tmp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("chomp_test_" + name);
}
}  // namespace

TEST_CASE("tensor round trip preserves shape and payload") {
    Tensor t({2, 3, 4});
    for (std::size_t i = 0; i < t.data.size(); ++i)
        t.data[i] = static_cast<float>(i) * 0.5f - 3.0f;
    const auto path = tmp_path("roundtrip.t32");
    write_tensor(t, path);
    const Tensor back = read_tensor(path);
    CHECK(back == t);
    std::filesystem::remove(path);
}

TEST_CASE("tensor header magic is CHOM") {
    Tensor t({2});
    t.data = {1.0f, 2.0f};
    const auto path = tmp_path("magic.t32");
    write_tensor(t, path);
    std::ifstream f(path, std::ios::binary);
    std::uint32_t magic = 0;
    f.read(reinterpret_cast<char*>(&magic), 4);
    CHECK(magic == kTensorMagic);
    std::filesystem::remove(path);
}

TEST_CASE("corrupted magic raises FormatError") {
    const auto path = tmp_path("badmagic.t32");
    Tensor t({2});
    t.data = {1.0f, 2.0f};
    write_tensor(t, path);
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        const std::uint32_t bad = 0xDEADBEEF;
        f.write(reinterpret_cast<const char*>(&bad), 4);
    }
    CHECK_THROWS_AS(read_tensor(path), FormatError);
    std::filesystem::remove(path);
}

TEST_CASE("truncated payload raises FormatError") {
    const auto path = tmp_path("trunc.t32");
    Tensor t({16});
    for (int i = 0; i < 16; ++i) t.data[i] = static_cast<float>(i);
    write_tensor(t, path);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS(read_tensor(path), FormatError);
    std::filesystem::remove(path);
}

TEST_CASE("degenerate ranks are rejected") {
    const auto path = tmp_path("rank.t32");
    std::ofstream f(path, std::ios::binary);
    const std::uint32_t header[2] = {kTensorMagic, 0};  // rank 0
    f.write(reinterpret_cast<const char*>(header), 8);
    f.close();
    CHECK_THROWS_AS(read_tensor(path), FormatError);
    std::filesystem::remove(path);
}
