#ifndef VMDIFF_DIFFUSION_HPP
#define VMDIFF_DIFFUSION_HPP

#include <functional>
#include <vector>

#include "vmdiff/tensor.hpp"

namespace vmdiff {

// Variance-exploding geometric noise schedule.
struct NoiseSchedule {
    double sigma_min = 0.01;
    double sigma_max = 378.0;
    int n_steps = 1000;

    void validate() const {
        require(sigma_min > 0.0 && sigma_min < sigma_max,
                "NoiseSchedule: need 0 < sigma_min < sigma_max");
        require(n_steps >= 2, "NoiseSchedule: need at least 2 steps");
    }
    // sigma_min * (sigma_max/sigma_min)^t for t in (0,1]
    double sigma(double t) const;
    // discrete ladder sigma_min * (sigma_max/sigma_min)^(i/(N-1)), i in [0,N)
    double sigma_step(int i) const;
};

// Score evaluation contract: same-shaped output, step index selects the
// noise level.
struct ScoreModel {
    virtual ~ScoreModel() = default;
    virtual Tensor score(const Tensor& x, int i) const = 0;
};

// Exact score of N(mean, std^2 I) smoothed by N(0, sigma_i^2 I):
// -(x - mean) / (std^2 + sigma_i^2). Used to verify the sampler.
struct GaussianScoreOracle : ScoreModel {
    Tensor mean;
    double std = 0.0;
    NoiseSchedule sched;

    GaussianScoreOracle(Tensor m, double s, NoiseSchedule sc)
        : mean(std::move(m)), std(s), sched(sc) {
        require(s >= 0.0, "GaussianScoreOracle: negative std");
        sched.validate();
    }
    Tensor score(const Tensor& x, int i) const override;
};

// Wraps a plain function as a ScoreModel (test/ablation hooks).
struct FunctionScore : ScoreModel {
    std::function<Tensor(const Tensor&, int)> fn;
    explicit FunctionScore(std::function<Tensor(const Tensor&, int)> f)
        : fn(std::move(f)) {}
    Tensor score(const Tensor& x, int i) const override { return fn(x, i); }
};

// Free-function form of the oracle.
Tensor oracle_score(const Tensor& x, const Tensor& mean, double std, int i,
                    const NoiseSchedule& sched);

// Training-time perturbation kernel X_i = X_0 + sigma_i * z.
Tensor forward_perturb(const Tensor& x0, int i, const Tensor& z,
                       const NoiseSchedule& sched);

// Score of the Gaussian transition kernel: -(xt - x0) / sigma^2.
Tensor dsm_target(const Tensor& x0, const Tensor& xt, double sigma);

// Monte-Carlo denoising-score-matching loss: for each stack draw a uniform
// step i and noise z, weight by sigma_i^2, normalize per element. A model
// that returns the exact target scores 0; the zero model scores 1 in
// expectation.
double dsm_loss(const ScoreModel& model, const std::vector<Tensor>& batch,
                const NoiseSchedule& sched, Rng& rng);

}  // namespace vmdiff

#endif
