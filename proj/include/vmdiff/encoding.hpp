#ifndef VMDIFF_ENCODING_HPP
#define VMDIFF_ENCODING_HPP

#include <array>

#include "vmdiff/tensor.hpp"

namespace vmdiff {

// Channel-perturbation encoding. A binary "virtual mask" M (1 = keep, 0 =
// perturbed) gates a pairwise swap of colour channels, and the image patch is
// expanded into a 12-channel stack of one identity copy plus three perturbed
// variants:
//
//   channel   0 1 2   3   4 5   6 7   8   9 10 11
//   content   R G B   RG  G B   R GB  B   R G  BR
//
// with RG = R.M + G.(1-M), GB = G.M + B.(1-M), BR = B.M + R.(1-M).

// M_ij = 1 if Z_ij <= xi, else 0, Z i.i.d. standard normal; the expected
// perturbed fraction is P(Z > xi). Higher xi means milder perturbation.
Mask sample_virtual_mask(int rows, int cols, double xi, uint64_t seed);

// 3-channel patch -> 12-channel stack as documented above.
Tensor perturb_stack(const Image& patch, const Mask& vmask);

// Exact inverse: four 3-channel estimates of the source patch, one per
// sub-tensor. Estimate 0 is the identity copy; estimates 1..3 rebuild the
// perturbed channel by taking the perturbed value where M=1 (it was never
// swapped there) and the identity copy's channel where M=0.
std::array<Image, 4> invert_stack(const Tensor& stack, const Mask& vmask);

struct ChannelCorr {
    double rg = 0.0, gb = 0.0, br = 0.0;
};

// Pearson correlation over all pixels for each channel pair; a constant
// channel yields 0 by convention.
ChannelCorr channel_correlations(const Image& patch);

struct FusionWeights {
    double rg = 0.0, gb = 0.0, br = 0.0;
};

// softmax(tau * [rho_rg, rho_gb, rho_br]), max-subtracted for stability.
FusionWeights fusion_weights(const ChannelCorr& rho, double tau);

// 1/2 * estimate0 + 1/2 * (w_rg*estimate1 + w_gb*estimate2 + w_br*estimate3).
Image fuse_estimates(const std::array<Image, 4>& estimates,
                     const ChannelCorr& rho, double tau);

}  // namespace vmdiff

#endif
