#include "vmdiff/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "vmdiff/png_io.hpp"  // io_error

namespace vmdiff {

namespace {

constexpr char kMagic[4] = {'V', 'M', 'D', 'C'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// This code targets little-endian hosts; the format is little-endian.
template <typename T>
void put(std::FILE* f, const T& v) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1)
        throw io_error("checkpoint: write failed");
}
template <typename T>
T get(std::FILE* f) {
    T v;
    if (std::fread(&v, sizeof(T), 1, f) != 1)
        throw io_error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const DenoiserNet& net,
                     uint64_t train_steps, double learning_rate) {
    require(!net.params.empty(), "save_checkpoint: uninitialized net");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw io_error("cannot write " + path);
    if (std::fwrite(kMagic, 1, 4, f.get()) != 4)
        throw io_error("checkpoint: write failed");
    put(f.get(), kVersion);
    put(f.get(), net.sched.sigma_min);
    put(f.get(), net.sched.sigma_max);
    put(f.get(), static_cast<uint32_t>(net.sched.n_steps));
    put(f.get(), static_cast<uint32_t>(net.features));
    put(f.get(), static_cast<uint32_t>(net.stages));
    put(f.get(), net.init_seed);
    put(f.get(), train_steps);
    put(f.get(), learning_rate);
    const auto arrs = net.layout();
    put(f.get(), static_cast<uint32_t>(arrs.size()));
    for (const auto& a : arrs) {
        put(f.get(), static_cast<uint32_t>(a.name.size()));
        if (std::fwrite(a.name.data(), 1, a.name.size(), f.get()) !=
            a.name.size())
            throw io_error("checkpoint: write failed");
        put(f.get(), static_cast<uint32_t>(a.dims.size()));
        size_t n = 1;
        for (uint32_t d : a.dims) {
            put(f.get(), d);
            n *= d;
        }
        if (std::fwrite(net.params.data() + a.offset, sizeof(float), n,
                        f.get()) != n)
            throw io_error("checkpoint: write failed");
    }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw io_error("cannot open " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, f.get()) != 4 ||
        std::memcmp(magic, kMagic, 4) != 0)
        throw io_error("not a checkpoint file: " + path);
    if (get<uint32_t>(f.get()) != kVersion)
        throw io_error("unsupported checkpoint version: " + path);

    LoadedCheckpoint out;
    DenoiserNet& net = out.net;
    net.sched.sigma_min = get<double>(f.get());
    net.sched.sigma_max = get<double>(f.get());
    net.sched.n_steps = static_cast<int>(get<uint32_t>(f.get()));
    net.features = static_cast<int>(get<uint32_t>(f.get()));
    net.stages = static_cast<int>(get<uint32_t>(f.get()));
    net.init_seed = get<uint64_t>(f.get());
    out.train_steps = get<uint64_t>(f.get());
    out.learning_rate = get<double>(f.get());
    net.sched.validate();
    require(net.features > 0 && net.features <= 4096 && net.stages > 0 &&
                net.stages <= 64,
            "checkpoint: implausible hyperparameters");

    const auto arrs = net.layout();
    if (get<uint32_t>(f.get()) != arrs.size())
        throw io_error("checkpoint: array count mismatch");
    net.params.assign(net.param_count(), 0.0f);
    for (const auto& a : arrs) {
        const uint32_t len = get<uint32_t>(f.get());
        std::string name(len, '\0');
        if (len && std::fread(name.data(), 1, len, f.get()) != len)
            throw io_error("checkpoint: truncated file");
        if (name != a.name) throw io_error("checkpoint: unexpected array " + name);
        const uint32_t nd = get<uint32_t>(f.get());
        if (nd != a.dims.size()) throw io_error("checkpoint: rank mismatch");
        size_t n = 1;
        for (uint32_t d = 0; d < nd; ++d) {
            const uint32_t dim = get<uint32_t>(f.get());
            if (dim != a.dims[d]) throw io_error("checkpoint: shape mismatch");
            n *= dim;
        }
        if (std::fread(net.params.data() + a.offset, sizeof(float), n,
                       f.get()) != n)
            throw io_error("checkpoint: truncated file");
    }
    return out;
}

}  // namespace vmdiff
