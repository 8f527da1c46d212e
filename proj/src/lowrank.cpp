#include "vmdiff/lowrank.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "vmdiff/kernels.hpp"

// The factorization must stay SVD-free (that is the point of the LMaFit-style
// initialization), so only Core and Cholesky are included above.
#if defined(EIGEN_SVD_MODULE_H) || defined(EIGEN_JACOBISVD_H)
#error "singular-value routines must not be linked into this unit"
#endif

namespace vmdiff {

Eigen::MatrixXd hankel(const Image& patch, int k) {
    require(patch.rows == patch.cols, "hankel: patch must be square");
    require(k >= 1 && k <= patch.rows, "hankel: bad window size");
    const int side = patch.rows, ch = patch.channels;
    const int wr = side - k + 1;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
        wr * wr, ch * k * k);
    kernels::hankel_lift(patch.data.data(), side, side, ch, k, m.data());
    return m;
}

Image hankel_pinv(const Eigen::MatrixXd& mat, int side, int channels, int k) {
    require(k >= 1 && k <= side, "hankel_pinv: bad window size");
    const int wr = side - k + 1;
    require(mat.rows() == wr * wr && mat.cols() == channels * k * k,
            "hankel_pinv: matrix shape mismatch");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        rm = mat;
    Image patch(side, side, channels);
    kernels::hankel_unlift(rm.data(), side, side, channels, k,
                           patch.data.data());
    return patch;
}

ADMMState admm_init(const Eigen::MatrixXd& a, int r, double mu,
                    uint64_t seed) {
    require(r >= 1 && r <= a.cols(), "admm_init: rank out of range");
    require(mu > 0.0, "admm_init: mu must be positive");
    const auto rows = a.rows();
    ADMMState st;
    st.r = r;
    st.mu = mu;
    st.u.resize(rows, r);
    Rng rng(seed);
    // Modified Gram-Schmidt over the leading columns; a column that collapses
    // (rank deficiency) is replaced by a seeded random draw and re-reduced.
    const double tol = 1e-10 * std::max(1.0, a.norm());
    for (int j = 0; j < r; ++j) {
        Eigen::VectorXd q = a.col(j);
        for (int attempt = 0;; ++attempt) {
            for (int p = 0; p < j; ++p)
                q -= st.u.col(p).dot(q) * st.u.col(p);
            const double n = q.norm();
            if (n > tol) {
                st.u.col(j) = q / n;
                break;
            }
            require(attempt < 8, "admm_init: could not build orthonormal basis");
            for (Eigen::Index i = 0; i < rows; ++i) q(i) = rng.normal();
        }
    }
    st.v = a.transpose() * st.u;
    st.lam = Eigen::MatrixXd::Zero(rows, a.cols());
    return st;
}

Eigen::MatrixXd admm_step(ADMMState& st, const Eigen::MatrixXd& target) {
    require(st.ready(), "admm_step: state not initialized");
    require(target.rows() == st.u.rows() && target.cols() == st.v.rows(),
            "admm_step: target shape mismatch");
    const double mu = st.mu;
    const Eigen::MatrixXd al = target + st.lam;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(st.r, st.r);
    // U <- mu (A+L) V (I + mu V'V)^-1, solved as SPD system on the right
    Eigen::LLT<Eigen::MatrixXd> lltv(eye + mu * st.v.transpose() * st.v);
    st.u = lltv.solve((mu * al * st.v).transpose()).transpose();
    // V <- mu (A+L)' U (I + mu U'U)^-1 with the refreshed U
    Eigen::LLT<Eigen::MatrixXd> lltu(eye + mu * st.u.transpose() * st.u);
    st.v = lltu.solve((mu * al.transpose() * st.u).transpose()).transpose();
    const Eigen::MatrixXd uv = st.u * st.v.transpose();
    st.lam = target - uv + st.lam;
    return uv - st.lam;
}

Image lowrank_step(const Image& patch, ADMMState& st, int r, double mu,
                   int iters, uint64_t seed, int k) {
    require(iters >= 1, "lowrank_step: need at least one iteration");
    const Eigen::MatrixXd a = hankel(patch, k);
    if (!st.ready()) st = admm_init(a, r, mu, seed);
    Eigen::MatrixXd xlr;
    for (int it = 0; it < iters; ++it) xlr = admm_step(st, a);
    return hankel_pinv(xlr, patch.rows, patch.channels, k);
}

}  // namespace vmdiff
