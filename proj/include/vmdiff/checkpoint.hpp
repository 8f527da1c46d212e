#ifndef VMDIFF_CHECKPOINT_HPP
#define VMDIFF_CHECKPOINT_HPP

#include <string>

#include "vmdiff/denoiser.hpp"

namespace vmdiff {

// Self-describing binary container: magic "VMDC", version, schedule scalars,
// net hyperparameters, training seed, step count and learning rate, then
// named parameter arrays (dims as u32, data as little-endian f32).
// save -> load -> save is byte-identical.
void save_checkpoint(const std::string& path, const DenoiserNet& net,
                     uint64_t train_steps, double learning_rate);

struct LoadedCheckpoint {
    DenoiserNet net;
    uint64_t train_steps = 0;
    double learning_rate = 0.0;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace vmdiff

#endif
