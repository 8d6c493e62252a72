#include "chomp/checkpoint.hpp"

#include <fstream>

#include "chomp/errors.hpp"

namespace chomp {

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream mf(dir / "checkpoint.txt");
    if (!mf) throw ConfigError("cannot write checkpoint manifest");
    mf << "tensors: " << ck.tensors.size() << "\n";
    for (const auto& [k, v] : ck.meta) mf << k << ": " << v << "\n";
    for (std::size_t i = 0; i < ck.tensors.size(); ++i)
        write_tensor(ck.tensors[i],
                     dir / ("tensor" + std::to_string(i) + ".t32"));
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "checkpoint.txt");
    if (!mf) throw FormatError("missing checkpoint manifest in " + dir.string());
    Checkpoint ck;
    std::size_t n_tensors = 0;
    std::string line;
    while (std::getline(mf, line)) {
        const auto pos = line.find(": ");
        if (pos == std::string::npos) continue;
        const std::string key = line.substr(0, pos);
        const std::string value = line.substr(pos + 2);
        if (key == "tensors")
            n_tensors = static_cast<std::size_t>(std::stoull(value));
        else
            ck.meta[key] = value;
    }
    ck.tensors.reserve(n_tensors);
    for (std::size_t i = 0; i < n_tensors; ++i)
        ck.tensors.push_back(
            read_tensor(dir / ("tensor" + std::to_string(i) + ".t32")));
    return ck;
}

}  // namespace chomp
