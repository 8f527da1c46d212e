#ifndef VMDIFF_SAMPLER_HPP
#define VMDIFF_SAMPLER_HPP

#include <stdexcept>

#include "vmdiff/diffusion.hpp"
#include "vmdiff/tensor.hpp"

namespace vmdiff {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplerConfig {
    int corrector_steps = 1;  // Langevin corrections per predictor step
    double snr = 0.075;
    uint64_t seed = 0;

    void validate() const {
        require(corrector_steps >= 0, "SamplerConfig: negative corrector count");
        require(snr > 0.0, "SamplerConfig: snr must be positive");
    }
};

// i.i.d. N(0, sigma_max^2) start of the reverse pass.
Tensor sample_prior(int rows, int cols, int channels,
                    const NoiseSchedule& sched, Rng& rng);

// Reverse-diffusion step from level i+1 down to target level i:
//   X_i = X_{i+1} + (s2_{i+1}-s2_i) * score(X_{i+1}, i+1)
//               + sqrt(s2_{i+1}-s2_i) * z            (s2 = sigma^2)
// Callers pass z = 0 on the final step for a denoised output.
Tensor predictor_step(const Tensor& x, int i, const ScoreModel& model,
                      const NoiseSchedule& sched, const Tensor& z);

// Annealed Langevin correction at level i with step size
// eps = 2*(snr*|z|/|s|)^2; a zero score makes it a no-op.
Tensor corrector_step(const Tensor& x, int i, const ScoreModel& model,
                      const Tensor& z, double snr);

}  // namespace vmdiff

#endif
