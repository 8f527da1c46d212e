#ifndef VMDIFF_TENSOR_HPP
#define VMDIFF_TENSOR_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmdiff {

// Dense row-major (row, col, channel) tensor. Channel is the fastest index,
// so a pixel's channels are contiguous in memory.
struct Tensor {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c, int ch, double fill = 0.0)
        : rows(r), cols(c), channels(ch),
          data(static_cast<size_t>(r) * c * ch, fill) {
        if (r < 0 || c < 0 || ch < 0)
            throw std::invalid_argument("Tensor: negative dimension");
    }

    double& at(int r, int c, int ch) {
        return data[(static_cast<size_t>(r) * cols + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<size_t>(r) * cols + c) * channels + ch];
    }

    size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const {
        return rows == o.rows && cols == o.cols && channels == o.channels;
    }
    std::string shape_str() const {
        return std::to_string(rows) + "x" + std::to_string(cols) + "x" +
               std::to_string(channels);
    }
};

// An RGB image is a 3-channel tensor with intensities in [0,1]. The imaging
// operations clip at their boundaries; intermediate pipeline iterates may
// leave the range.
using Image = Tensor;

// Binary known/missing map. 1 = known, 0 = missing.
struct Mask {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int r, int c, uint8_t fill = 1)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    uint8_t at(int r, int c) const {
        return data[static_cast<size_t>(r) * cols + c];
    }
    size_t size() const { return data.size(); }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// splitmix64 step; used to derive independent child seeds from a master seed
// so parallel workers (patches, images) get decorrelated streams.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded random stream. One instance per logical stream; never shared across
// threads.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }
    uint64_t raw() { return gen_(); }

    // i.i.d. standard normal tensor
    Tensor normal_tensor(int r, int c, int ch) {
        Tensor t(r, c, ch);
        for (auto& v : t.data) v = normal_(gen_);
        return t;
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace vmdiff

#endif
