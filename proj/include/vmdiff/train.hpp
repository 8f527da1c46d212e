#ifndef VMDIFF_TRAIN_HPP
#define VMDIFF_TRAIN_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "vmdiff/denoiser.hpp"
#include "vmdiff/diffusion.hpp"
#include "vmdiff/tensor.hpp"

namespace vmdiff {

struct TrainConfig {
    NoiseSchedule sched;
    int steps = 2000;
    int crop = 64;
    double lr = 0.0002;
    double xi = 2.81;          // virtual-mask ratio for the training stacks
    int features = 64;
    int stages = 4;
    uint64_t seed = 0;
    int checkpoint_every = 500;    // also writes at the end; 0 = final only
    std::string checkpoint_path;   // empty = keep everything in memory
};

struct training_diverged : std::runtime_error {
    int step;
    explicit training_diverged(int s)
        : std::runtime_error("training diverged (non-finite loss) at step " +
                             std::to_string(s) +
                             "; last good parameters retained"),
          step(s) {}
};

struct TrainResult {
    DenoiserNet net;
    std::vector<double> loss_trace;  // one entry per step
    int steps_done = 0;
};

// Mean DSM loss over the batch with fixed step indices and noise draws, and
// (optionally) its gradient w.r.t. the parameters. Deterministic given the
// inputs; the finite-difference checks rely on that.
template <typename S>
double dsm_loss_grad(const DenoiserNetT<S>& net,
                     const std::vector<Tensor>& x0s,
                     const std::vector<int>& is,
                     const std::vector<Tensor>& zs, std::vector<S>* grad);

// One optimizer step per call on a batch of one random crop per image, each
// crop expanded to a perturbation stack with a fresh virtual mask. Adaptive
// moments at the fixed learning rate; loss trace recorded per step. A
// non-finite loss raises training_diverged after restoring (and, when a path
// is configured, writing) the last parameters that produced a finite loss.
TrainResult train(const std::vector<Image>& images, const TrainConfig& cfg);

// Convenience wrapper: load PNGs then train.
TrainResult train_files(const std::vector<std::string>& paths,
                        const TrainConfig& cfg);

}  // namespace vmdiff

#endif
