#include "vmdiff/diffusion.hpp"

#include <cmath>

#include "vmdiff/kernels.hpp"

namespace vmdiff {

double NoiseSchedule::sigma(double t) const {
    validate();
    require(t > 0.0 && t <= 1.0, "sigma: t outside (0,1]");
    return sigma_min * std::pow(sigma_max / sigma_min, t);
}

double NoiseSchedule::sigma_step(int i) const {
    validate();
    require(i >= 0 && i < n_steps, "sigma_step: index out of range");
    return sigma_min *
           std::pow(sigma_max / sigma_min,
                    static_cast<double>(i) / (n_steps - 1));
}

Tensor GaussianScoreOracle::score(const Tensor& x, int i) const {
    return oracle_score(x, mean, std, i, sched);
}

Tensor oracle_score(const Tensor& x, const Tensor& mean, double std, int i,
                    const NoiseSchedule& sched) {
    require(x.same_shape(mean), "oracle_score: shape mismatch");
    const double s2 = sched.sigma_step(i);
    const double denom = std * std + s2 * s2;
    Tensor out(x.rows, x.cols, x.channels);
    for (size_t j = 0; j < x.size(); ++j)
        out.data[j] = -(x.data[j] - mean.data[j]) / denom;
    return out;
}

Tensor forward_perturb(const Tensor& x0, int i, const Tensor& z,
                       const NoiseSchedule& sched) {
    require(x0.same_shape(z), "forward_perturb: shape mismatch");
    const double s = sched.sigma_step(i);
    Tensor out(x0.rows, x0.cols, x0.channels);
    for (size_t j = 0; j < x0.size(); ++j)
        out.data[j] = x0.data[j] + s * z.data[j];
    return out;
}

Tensor dsm_target(const Tensor& x0, const Tensor& xt, double sigma) {
    require(x0.same_shape(xt), "dsm_target: shape mismatch");
    require(sigma > 0.0, "dsm_target: sigma must be positive");
    Tensor out(x0.rows, x0.cols, x0.channels);
    const double inv = 1.0 / (sigma * sigma);
    for (size_t j = 0; j < x0.size(); ++j)
        out.data[j] = -(xt.data[j] - x0.data[j]) * inv;
    return out;
}

double dsm_loss(const ScoreModel& model, const std::vector<Tensor>& batch,
                const NoiseSchedule& sched, Rng& rng) {
    require(!batch.empty(), "dsm_loss: empty batch");
    double total = 0.0;
    for (const Tensor& x0 : batch) {
        const int i = static_cast<int>(rng.raw() % sched.n_steps);
        const double s = sched.sigma_step(i);
        const Tensor z = rng.normal_tensor(x0.rows, x0.cols, x0.channels);
        const Tensor xt = forward_perturb(x0, i, z, sched);
        const Tensor sc = model.score(xt, i);
        const Tensor tgt = dsm_target(x0, xt, s);
        std::vector<double> diff(x0.size());
        for (size_t j = 0; j < diff.size(); ++j)
            diff[j] = sc.data[j] - tgt.data[j];
        total += s * s * kernels::sum_squares(diff.data(), diff.size()) /
                 diff.size();
    }
    return total / batch.size();
}

}  // namespace vmdiff
