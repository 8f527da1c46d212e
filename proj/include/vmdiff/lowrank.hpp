#ifndef VMDIFF_LOWRANK_HPP
#define VMDIFF_LOWRANK_HPP

#include <Eigen/Core>

#include "vmdiff/tensor.hpp"

namespace vmdiff {

// Structured block lift: a (side x side x ch) patch becomes the
// (side-k+1)^2 x (k*k*ch) matrix of all k x k windows. At the default
// side=64, ch=3, k=8 this is 3249 x 192. Row order is window origin,
// row-major; column order is channel-major window entries.
Eigen::MatrixXd hankel(const Image& patch, int k = 8);

// Exact left inverse of hankel: every pixel is the mean of all matrix
// entries that copied it (the multiplicity-weighted adjoint).
Image hankel_pinv(const Eigen::MatrixXd& mat, int side, int channels,
                  int k = 8);

// Scaled Frobenius factorization state for rank-r completion.
struct ADMMState {
    Eigen::MatrixXd u;    // rows x r
    Eigen::MatrixXd v;    // cols x r
    Eigen::MatrixXd lam;  // rows x cols multiplier
    double mu = 1.0;
    int r = 0;

    bool ready() const { return r > 0 && u.size() > 0; }
};

// Factor initialization without any singular-value routine: modified
// Gram-Schmidt on the first r columns of the matrix (seeded random
// replacement for near-dependent columns), V = A^T U, multiplier zero.
ADMMState admm_init(const Eigen::MatrixXd& a, int r, double mu, uint64_t seed);

// One scaled-ALM sweep: U and V in Gauss-Seidel order via SPD r x r solves,
// then the multiplier; returns the completed estimate UV^T - lam.
Eigen::MatrixXd admm_step(ADMMState& st, const Eigen::MatrixXd& target);

// Lift, complete, project back. The state warm-starts across calls: it is
// initialized on first use and reused afterwards (pass the same object for
// every iteration of one restoration run).
Image lowrank_step(const Image& patch, ADMMState& st, int r, double mu,
                   int iters, uint64_t seed, int k = 8);

}  // namespace vmdiff

#endif
