#include "vmdiff/sampler.hpp"

#include <cmath>

#include "vmdiff/kernels.hpp"

namespace vmdiff {

Tensor sample_prior(int rows, int cols, int channels,
                    const NoiseSchedule& sched, Rng& rng) {
    sched.validate();
    Tensor x = rng.normal_tensor(rows, cols, channels);
    for (double& v : x.data) v *= sched.sigma_max;
    return x;
}

Tensor predictor_step(const Tensor& x, int i, const ScoreModel& model,
                      const NoiseSchedule& sched, const Tensor& z) {
    require(i >= 0 && i < sched.n_steps - 1,
            "predictor_step: target index out of range");
    require(x.same_shape(z), "predictor_step: noise shape mismatch");
    const double s_hi = sched.sigma_step(i + 1);
    const double s_lo = sched.sigma_step(i);
    const double dv = s_hi * s_hi - s_lo * s_lo;  // > 0, ladder is monotone
    const Tensor sc = model.score(x, i + 1);
    const double step = std::sqrt(dv);
    Tensor out(x.rows, x.cols, x.channels);
    for (size_t j = 0; j < x.size(); ++j)
        out.data[j] = x.data[j] + dv * sc.data[j] + step * z.data[j];
    return out;
}

Tensor corrector_step(const Tensor& x, int i, const ScoreModel& model,
                      const Tensor& z, double snr) {
    require(snr > 0.0, "corrector_step: snr must be positive");
    require(x.same_shape(z), "corrector_step: noise shape mismatch");
    const Tensor sc = model.score(x, i);
    const double s2 = kernels::sum_squares(sc.data.data(), sc.size());
    if (!std::isfinite(s2))
        throw numerical_error("corrector_step: non-finite score");
    if (s2 == 0.0) return x;  // guarded no-op
    const double znorm = std::sqrt(kernels::sum_squares(z.data.data(), z.size()));
    const double snorm = std::sqrt(s2);
    const double ratio = snr * znorm / snorm;
    const double eps = 2.0 * ratio * ratio;
    const double noise = std::sqrt(2.0 * eps);
    Tensor out(x.rows, x.cols, x.channels);
    for (size_t j = 0; j < x.size(); ++j)
        out.data[j] = x.data[j] + eps * sc.data[j] + noise * z.data[j];
    return out;
}

}  // namespace vmdiff
