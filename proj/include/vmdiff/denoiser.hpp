#ifndef VMDIFF_DENOISER_HPP
#define VMDIFF_DENOISER_HPP

#include <string>
#include <vector>

#include "vmdiff/diffusion.hpp"
#include "vmdiff/tensor.hpp"

namespace vmdiff {

// Compact conditioned convolutional denoiser on 12-channel stacks.
//
// The net sees the stack scaled by 1/sqrt(1 + sigma_i^2) plus one constant
// conditioning channel log(sigma_i)/log(sigma_max), and predicts the negated
// unit noise -z ("noise prediction"); the score is that output divided by
// sigma_i. Layers: conv3x3 13->F, `stages` pre-activation residual blocks
// (x + conv(silu(conv(silu(x))))), conv3x3 F->12. The output convolution
// starts at zero so an untrained net is the zero score.
//
// Scalar is float in production and double on the gradient-check path.
template <typename Scalar>
struct DenoiserNetT : ScoreModel {
    NoiseSchedule sched;
    int features = 64;
    int stages = 4;
    uint64_t init_seed = 0;
    std::vector<Scalar> params;

    struct ArrayInfo {
        std::string name;
        size_t offset;
        std::vector<uint32_t> dims;  // conv weights: [9, c_in, c_out]
    };

    // Named views into `params`, in storage order.
    std::vector<ArrayInfo> layout() const;
    size_t param_count() const;

    // Allocate and initialize parameters (He for hidden, zero final layer).
    void init(uint64_t seed);

    // Scratch buffers of one forward pass, kept for backprop.
    struct Workspace {
        std::vector<Scalar> in13;                // scaled input + conditioning
        std::vector<std::vector<Scalar>> x;      // stages+1 feature maps
        std::vector<std::vector<Scalar>> a, b, c;  // per-stage intermediates
        std::vector<Scalar> aout;                // silu before the out conv
        int rows = 0, cols = 0;
    };

    // Scaled 13-channel input for level i.
    void build_input(const Tensor& x, int i, std::vector<Scalar>& in13) const;
    // in13 -> 12-channel prediction; fills ws for a later backward().
    void forward(const std::vector<Scalar>& in13, int rows, int cols,
                 std::vector<Scalar>& out12, Workspace& ws) const;
    // Accumulate dL/dparams into grad given dL/dout; ws from forward().
    void backward(const Workspace& ws, const std::vector<Scalar>& dout,
                  std::vector<Scalar>& grad) const;

    // Noise prediction at level i (12-channel in/out).
    Tensor predict(const Tensor& x, int i) const;
    // ScoreModel contract: predict(x,i) / sigma_i.
    Tensor score(const Tensor& x, int i) const override;
};

using DenoiserNet = DenoiserNetT<float>;

extern template struct DenoiserNetT<float>;
extern template struct DenoiserNetT<double>;

}  // namespace vmdiff

#endif
