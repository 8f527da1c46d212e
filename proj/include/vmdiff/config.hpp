#ifndef VMDIFF_CONFIG_HPP
#define VMDIFF_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vmdiff/image.hpp"
#include "vmdiff/pipeline.hpp"
#include "vmdiff/train.hpp"

namespace vmdiff {

// Flat key=value run configuration ('#' starts a comment, unknown keys are
// rejected). Defaults follow the reference operating point.
struct AppConfig {
    // noise schedule
    double sigma_min = 0.01;
    double sigma_max = 378.0;
    int steps = 1000;  // reverse-ladder levels N
    // sampler
    int corrector_steps = 1;
    double snr = 0.075;
    // perturbation encoding
    double perturb_ratio = 2.81;  // virtual-mask threshold xi
    double fusion_temp = 1.0;
    // low-rank completion
    int rank = 48;
    double mu = 1.0;
    int admm_iters = 10;
    // data consistency
    double lambda = 1.0;
    bool noiseless = true;
    // training
    int train_steps = 2000;
    int crop = 64;
    double lr = 0.0002;
    int checkpoint_every = 500;
    int features = 64;
    int net_stages = 4;
    // master seed (CLI --seed overrides)
    uint64_t seed = 0;

    NoiseSchedule schedule() const;
    TrainConfig train_config() const;
    InpaintConfig inpaint_config() const;
    // every key with its current value, in documented order
    std::vector<std::pair<std::string, std::string>> kv_pairs() const;
};

// Set one key; unknown key or unparsable value -> invalid_argument.
void apply_kv(AppConfig& cfg, const std::string& key, const std::string& value);

// Parse a config file (missing file -> io_error).
AppConfig load_config(const std::string& path);

// Mask mini-grammar: "random:<frac>", "block:<x,y,w,h>", "text:<path>".
MaskSpec parse_mask_spec(const std::string& spec);

// Stable 64-bit FNV-1a over a file's bytes (checkpoint identity in
// manifests).
uint64_t fnv1a_file(const std::string& path);

}  // namespace vmdiff

#endif
