#include "vmdiff/encoding.hpp"

#include <cmath>

namespace vmdiff {

Mask sample_virtual_mask(int rows, int cols, double xi, uint64_t seed) {
    require(rows > 0 && cols > 0, "sample_virtual_mask: empty mask");
    require(std::isfinite(xi), "sample_virtual_mask: xi not finite");
    Mask m(rows, cols);
    Rng rng(seed);
    for (auto& v : m.data) v = rng.normal() <= xi ? 1 : 0;
    return m;
}

Tensor perturb_stack(const Image& patch, const Mask& vmask) {
    require(patch.channels == 3, "perturb_stack: need 3 channels");
    require(patch.rows == vmask.rows && patch.cols == vmask.cols,
            "perturb_stack: shape mismatch");
    Tensor s(patch.rows, patch.cols, 12);
    for (int r = 0; r < patch.rows; ++r)
        for (int c = 0; c < patch.cols; ++c) {
            const double R = patch.at(r, c, 0);
            const double G = patch.at(r, c, 1);
            const double B = patch.at(r, c, 2);
            const bool keep = vmask.at(r, c) != 0;
            // [R,G,B]
            s.at(r, c, 0) = R;
            s.at(r, c, 1) = G;
            s.at(r, c, 2) = B;
            // [RG,G,B]
            s.at(r, c, 3) = keep ? R : G;
            s.at(r, c, 4) = G;
            s.at(r, c, 5) = B;
            // [R,GB,B]
            s.at(r, c, 6) = R;
            s.at(r, c, 7) = keep ? G : B;
            s.at(r, c, 8) = B;
            // [R,G,BR]
            s.at(r, c, 9) = R;
            s.at(r, c, 10) = G;
            s.at(r, c, 11) = keep ? B : R;
        }
    return s;
}

std::array<Image, 4> invert_stack(const Tensor& stack, const Mask& vmask) {
    require(stack.channels == 12, "invert_stack: need 12 channels");
    require(stack.rows == vmask.rows && stack.cols == vmask.cols,
            "invert_stack: shape mismatch");
    std::array<Image, 4> est;
    for (auto& e : est) e = Image(stack.rows, stack.cols, 3);
    for (int r = 0; r < stack.rows; ++r)
        for (int c = 0; c < stack.cols; ++c) {
            const bool keep = vmask.at(r, c) != 0;
            // identity copy
            est[0].at(r, c, 0) = stack.at(r, c, 0);
            est[0].at(r, c, 1) = stack.at(r, c, 1);
            est[0].at(r, c, 2) = stack.at(r, c, 2);
            // [RG,G,B]: R sits in the perturbed slot where M=1
            est[1].at(r, c, 0) = keep ? stack.at(r, c, 3) : stack.at(r, c, 0);
            est[1].at(r, c, 1) = stack.at(r, c, 4);
            est[1].at(r, c, 2) = stack.at(r, c, 5);
            // [R,GB,B]
            est[2].at(r, c, 0) = stack.at(r, c, 6);
            est[2].at(r, c, 1) = keep ? stack.at(r, c, 7) : stack.at(r, c, 1);
            est[2].at(r, c, 2) = stack.at(r, c, 8);
            // [R,G,BR]
            est[3].at(r, c, 0) = stack.at(r, c, 9);
            est[3].at(r, c, 1) = stack.at(r, c, 10);
            est[3].at(r, c, 2) = keep ? stack.at(r, c, 11) : stack.at(r, c, 2);
        }
    return est;
}

namespace {
bool is_constant(const Image& p, int ch) {
    const double v0 = p.at(0, 0, ch);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            if (p.at(r, c, ch) != v0) return false;
    return true;
}

double pearson(const Image& p, int cha, int chb) {
    // an exactly constant channel correlates with nothing; detect it before
    // the mean subtraction, whose rounding residue would otherwise masquerade
    // as signal
    if (is_constant(p, cha) || is_constant(p, chb)) return 0.0;
    const size_t n = static_cast<size_t>(p.rows) * p.cols;
    double ma = 0, mb = 0;
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) {
            ma += p.at(r, c, cha);
            mb += p.at(r, c, chb);
        }
    ma /= n;
    mb /= n;
    double saa = 0, sbb = 0, sab = 0;
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) {
            const double da = p.at(r, c, cha) - ma;
            const double db = p.at(r, c, chb) - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}
}  // namespace

ChannelCorr channel_correlations(const Image& patch) {
    require(patch.channels == 3, "channel_correlations: need 3 channels");
    require(patch.rows > 0 && patch.cols > 0,
            "channel_correlations: empty patch");
    return {pearson(patch, 0, 1), pearson(patch, 1, 2), pearson(patch, 2, 0)};
}

FusionWeights fusion_weights(const ChannelCorr& rho, double tau) {
    require(tau > 0.0, "fusion_weights: tau must be positive");
    const double a = tau * rho.rg, b = tau * rho.gb, c = tau * rho.br;
    const double m = std::max(a, std::max(b, c));
    const double ea = std::exp(a - m), eb = std::exp(b - m),
                 ec = std::exp(c - m);
    const double z = ea + eb + ec;
    return {ea / z, eb / z, ec / z};
}

Image fuse_estimates(const std::array<Image, 4>& est, const ChannelCorr& rho,
                     double tau) {
    for (int k = 1; k < 4; ++k)
        require(est[k].same_shape(est[0]), "fuse_estimates: shape mismatch");
    const FusionWeights w = fusion_weights(rho, tau);
    Image out(est[0].rows, est[0].cols, est[0].channels);
    for (size_t i = 0; i < out.size(); ++i)
        out.data[i] = 0.5 * est[0].data[i] +
                      0.5 * (w.rg * est[1].data[i] + w.gb * est[2].data[i] +
                             w.br * est[3].data[i]);
    return out;
}

}  // namespace vmdiff
