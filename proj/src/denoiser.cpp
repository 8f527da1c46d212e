#include "vmdiff/denoiser.hpp"

#include <cmath>

#include "vmdiff/kernels.hpp"

namespace vmdiff {

namespace {
constexpr int kStack = 12;
constexpr int kIn = kStack + 1;  // + conditioning channel

template <typename S>
S silu(S u) {
    return u / (S(1) + std::exp(-u));
}
template <typename S>
S dsilu(S u) {
    const S s = S(1) / (S(1) + std::exp(-u));
    return s * (S(1) + u * (S(1) - s));
}
template <typename S>
void silu_map(const std::vector<S>& in, std::vector<S>& out) {
    out.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[i] = silu(in[i]);
}
}  // namespace

template <typename S>
std::vector<typename DenoiserNetT<S>::ArrayInfo> DenoiserNetT<S>::layout()
    const {
    const uint32_t f = static_cast<uint32_t>(features);
    std::vector<ArrayInfo> v;
    size_t off = 0;
    auto conv = [&](const std::string& name, uint32_t cin, uint32_t cout) {
        v.push_back({name + ".w", off, {9, cin, cout}});
        off += 9ull * cin * cout;
        v.push_back({name + ".b", off, {cout}});
        off += cout;
    };
    conv("conv_in", kIn, f);
    for (int s = 0; s < stages; ++s) {
        conv("stage" + std::to_string(s) + ".conv1", f, f);
        conv("stage" + std::to_string(s) + ".conv2", f, f);
    }
    conv("conv_out", f, kStack);
    return v;
}

template <typename S>
size_t DenoiserNetT<S>::param_count() const {
    const auto v = layout();
    const auto& last = v.back();
    size_t n = 1;
    for (uint32_t d : last.dims) n *= d;
    return last.offset + n;
}

template <typename S>
void DenoiserNetT<S>::init(uint64_t seed) {
    require(features > 0 && stages > 0, "DenoiserNet: bad hyperparameters");
    sched.validate();
    init_seed = seed;
    params.assign(param_count(), S(0));
    Rng rng(seed);
    for (const auto& arr : layout()) {
        if (arr.dims.size() != 3) continue;           // biases stay zero
        if (arr.name == "conv_out.w") continue;        // zero final layer
        const size_t n = 9ull * arr.dims[1] * arr.dims[2];
        const double std = std::sqrt(2.0 / (9.0 * arr.dims[1]));
        for (size_t i = 0; i < n; ++i)
            params[arr.offset + i] = static_cast<S>(std * rng.normal());
    }
}

template <typename S>
void DenoiserNetT<S>::build_input(const Tensor& x, int i,
                                  std::vector<S>& in13) const {
    require(x.channels == kStack, "DenoiserNet: need 12-channel input");
    const double sig = sched.sigma_step(i);
    const double scale = 1.0 / std::sqrt(1.0 + sig * sig);
    const double cond = std::log(sig) / std::log(sched.sigma_max);
    in13.resize(static_cast<size_t>(x.rows) * x.cols * kIn);
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < x.cols; ++c) {
            S* px = in13.data() + (static_cast<size_t>(r) * x.cols + c) * kIn;
            for (int ch = 0; ch < kStack; ++ch)
                px[ch] = static_cast<S>(x.at(r, c, ch) * scale);
            px[kStack] = static_cast<S>(cond);
        }
}

template <typename S>
void DenoiserNetT<S>::forward(const std::vector<S>& in13, int rows, int cols,
                              std::vector<S>& out12, Workspace& ws) const {
    require(!params.empty(), "DenoiserNet: parameters not initialized");
    const auto arrs = layout();
    const size_t npx = static_cast<size_t>(rows) * cols;
    auto w = [&](size_t idx) { return params.data() + arrs[idx].offset; };
    ws.rows = rows;
    ws.cols = cols;
    ws.x.assign(stages + 1, {});
    ws.a.assign(stages, {});
    ws.b.assign(stages, {});
    ws.c.assign(stages, {});
    ws.in13 = in13;

    ws.x[0].resize(npx * features);
    kernels::conv3x3_forward(in13.data(), rows, cols, kIn, w(0), w(1),
                             features, ws.x[0].data());
    std::vector<S> tmp(npx * features);
    for (int s = 0; s < stages; ++s) {
        const size_t base = 2 + 4ull * s;  // stage arrays start after conv_in
        silu_map(ws.x[s], ws.a[s]);
        ws.b[s].resize(npx * features);
        kernels::conv3x3_forward(ws.a[s].data(), rows, cols, features,
                                 w(base), w(base + 1), features,
                                 ws.b[s].data());
        silu_map(ws.b[s], ws.c[s]);
        kernels::conv3x3_forward(ws.c[s].data(), rows, cols, features,
                                 w(base + 2), w(base + 3), features,
                                 tmp.data());
        ws.x[s + 1].resize(npx * features);
        for (size_t i = 0; i < tmp.size(); ++i)
            ws.x[s + 1][i] = ws.x[s][i] + tmp[i];
    }
    silu_map(ws.x[stages], ws.aout);
    out12.resize(npx * kStack);
    const size_t ob = 2 + 4ull * stages;
    kernels::conv3x3_forward(ws.aout.data(), rows, cols, features, w(ob),
                             w(ob + 1), kStack, out12.data());
}

template <typename S>
void DenoiserNetT<S>::backward(const Workspace& ws,
                               const std::vector<S>& dout,
                               std::vector<S>& grad) const {
    const auto arrs = layout();
    grad.resize(param_count());
    const int rows = ws.rows, cols = ws.cols;
    const size_t npx = static_cast<size_t>(rows) * cols;
    auto w = [&](size_t idx) { return params.data() + arrs[idx].offset; };
    auto g = [&](size_t idx) { return grad.data() + arrs[idx].offset; };

    std::vector<S> gw(9ull * features * std::max(features, kIn));
    std::vector<S> gb(std::max(features, kIn));
    auto add_conv_grads = [&](size_t idx, const std::vector<S>& in, int cin,
                              const std::vector<S>& go, int cout) {
        kernels::conv3x3_grad_weights(in.data(), go.data(), rows, cols, cin,
                                      cout, gw.data(), gb.data());
        S* dst_w = g(idx);
        for (size_t i = 0; i < 9ull * cin * cout; ++i) dst_w[i] += gw[i];
        S* dst_b = g(idx + 1);
        for (int i = 0; i < cout; ++i) dst_b[i] += gb[i];
    };

    // out conv
    const size_t ob = 2 + 4ull * stages;
    add_conv_grads(ob, ws.aout, features, dout, kStack);
    std::vector<S> gx(npx * features);
    kernels::conv3x3_grad_input(dout.data(), rows, cols, kStack, w(ob),
                                features, gx.data());
    for (size_t i = 0; i < gx.size(); ++i) gx[i] *= dsilu(ws.x[stages][i]);

    // residual stages, reversed
    std::vector<S> gc(npx * features), ga(npx * features);
    for (int s = stages - 1; s >= 0; --s) {
        const size_t base = 2 + 4ull * s;
        add_conv_grads(base + 2, ws.c[s], features, gx, features);
        kernels::conv3x3_grad_input(gx.data(), rows, cols, features,
                                    w(base + 2), features, gc.data());
        for (size_t i = 0; i < gc.size(); ++i) gc[i] *= dsilu(ws.b[s][i]);
        add_conv_grads(base, ws.a[s], features, gc, features);
        kernels::conv3x3_grad_input(gc.data(), rows, cols, features, w(base),
                                    features, ga.data());
        // dL/dx_s = residual passthrough + branch contribution
        for (size_t i = 0; i < gx.size(); ++i)
            gx[i] += ga[i] * dsilu(ws.x[s][i]);
    }
    add_conv_grads(0, ws.in13, kIn, gx, features);
}

template <typename S>
Tensor DenoiserNetT<S>::predict(const Tensor& x, int i) const {
    std::vector<S> in13, out12;
    Workspace ws;
    build_input(x, i, in13);
    forward(in13, x.rows, x.cols, out12, ws);
    Tensor out(x.rows, x.cols, kStack);
    for (size_t j = 0; j < out.size(); ++j)
        out.data[j] = static_cast<double>(out12[j]);
    return out;
}

template <typename S>
Tensor DenoiserNetT<S>::score(const Tensor& x, int i) const {
    Tensor out = predict(x, i);
    const double inv = 1.0 / sched.sigma_step(i);
    for (double& v : out.data) v *= inv;
    return out;
}

template struct DenoiserNetT<float>;
template struct DenoiserNetT<double>;

}  // namespace vmdiff
