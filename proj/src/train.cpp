#include "vmdiff/train.hpp"

#include <cmath>

#include "vmdiff/checkpoint.hpp"
#include "vmdiff/encoding.hpp"
#include "vmdiff/kernels.hpp"
#include "vmdiff/png_io.hpp"

namespace vmdiff {

template <typename S>
double dsm_loss_grad(const DenoiserNetT<S>& net,
                     const std::vector<Tensor>& x0s,
                     const std::vector<int>& is,
                     const std::vector<Tensor>& zs, std::vector<S>* grad) {
    require(!x0s.empty(), "dsm_loss_grad: empty batch");
    require(x0s.size() == is.size() && x0s.size() == zs.size(),
            "dsm_loss_grad: batch size mismatch");
    if (grad) grad->assign(net.param_count(), S(0));
    const size_t bsz = x0s.size();
    double total = 0.0;
    std::vector<S> in13, out12, dout;
    typename DenoiserNetT<S>::Workspace ws;
    for (size_t k = 0; k < bsz; ++k) {
        const Tensor& x0 = x0s[k];
        const Tensor& z = zs[k];
        require(x0.same_shape(z), "dsm_loss_grad: noise shape mismatch");
        const Tensor xt = forward_perturb(x0, is[k], z, net.sched);
        net.build_input(xt, is[k], in13);
        net.forward(in13, x0.rows, x0.cols, out12, ws);
        // weighted score residual collapses to prediction + z per element
        const size_t d = out12.size();
        std::vector<double> res(d);
        for (size_t j = 0; j < d; ++j)
            res[j] = static_cast<double>(out12[j]) + z.data[j];
        total += kernels::sum_squares(res.data(), d) / d;
        if (grad) {
            dout.resize(d);
            const double scale = 2.0 / (static_cast<double>(d) * bsz);
            for (size_t j = 0; j < d; ++j)
                dout[j] = static_cast<S>(res[j] * scale);
            net.backward(ws, dout, *grad);
        }
    }
    return total / bsz;
}

template double dsm_loss_grad<float>(const DenoiserNetT<float>&,
                                     const std::vector<Tensor>&,
                                     const std::vector<int>&,
                                     const std::vector<Tensor>&,
                                     std::vector<float>*);
template double dsm_loss_grad<double>(const DenoiserNetT<double>&,
                                      const std::vector<Tensor>&,
                                      const std::vector<int>&,
                                      const std::vector<Tensor>&,
                                      std::vector<double>*);

namespace {

Image random_crop(const Image& img, int crop, Rng& rng) {
    const int r0 = static_cast<int>(rng.raw() % (img.rows - crop + 1));
    const int c0 = static_cast<int>(rng.raw() % (img.cols - crop + 1));
    Image out(crop, crop, img.channels);
    for (int r = 0; r < crop; ++r)
        for (int c = 0; c < crop; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(r0 + r, c0 + c, ch);
    return out;
}

}  // namespace

TrainResult train(const std::vector<Image>& images, const TrainConfig& cfg) {
    require(!images.empty(), "train: need at least one image");
    require(cfg.steps > 0, "train: non-positive step count");
    require(cfg.lr > 0.0, "train: non-positive learning rate");
    for (const auto& img : images)
        require(img.rows >= cfg.crop && img.cols >= cfg.crop,
                "train: image smaller than crop");

    TrainResult res;
    res.net.sched = cfg.sched;
    res.net.features = cfg.features;
    res.net.stages = cfg.stages;
    res.net.init(cfg.seed);
    DenoiserNet& net = res.net;

    Rng rng(mix_seed(cfg.seed, 0x7261696e));  // master training stream
    const size_t np = net.param_count();
    std::vector<float> grad, m(np, 0.0f), v(np, 0.0f), last_good;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    std::vector<Tensor> x0s(images.size());
    std::vector<int> is(images.size());
    std::vector<Tensor> zs(images.size());
    for (int step = 1; step <= cfg.steps; ++step) {
        for (size_t k = 0; k < images.size(); ++k) {
            const Image crop = random_crop(images[k], cfg.crop, rng);
            const Mask vm = sample_virtual_mask(cfg.crop, cfg.crop, cfg.xi,
                                                rng.raw());
            x0s[k] = perturb_stack(crop, vm);
            is[k] = static_cast<int>(rng.raw() % cfg.sched.n_steps);
            zs[k] = rng.normal_tensor(cfg.crop, cfg.crop, 12);
        }
        const double loss = dsm_loss_grad(net, x0s, is, zs, &grad);
        if (!std::isfinite(loss)) {
            if (!last_good.empty()) net.params = last_good;
            if (!cfg.checkpoint_path.empty() && !last_good.empty())
                save_checkpoint(cfg.checkpoint_path, net,
                                static_cast<uint64_t>(res.steps_done), cfg.lr);
            throw training_diverged(step);
        }
        last_good = net.params;
        res.loss_trace.push_back(loss);
        res.steps_done = step;

        const double bc1 = 1.0 - std::pow(b1, step);
        const double bc2 = 1.0 - std::pow(b2, step);
        for (size_t j = 0; j < np; ++j) {
            const double gj = grad[j];
            m[j] = static_cast<float>(b1 * m[j] + (1.0 - b1) * gj);
            v[j] = static_cast<float>(b2 * v[j] + (1.0 - b2) * gj * gj);
            const double mh = m[j] / bc1, vh = v[j] / bc2;
            net.params[j] -=
                static_cast<float>(cfg.lr * mh / (std::sqrt(vh) + eps));
        }
        if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
            step % cfg.checkpoint_every == 0)
            save_checkpoint(cfg.checkpoint_path, net,
                            static_cast<uint64_t>(step), cfg.lr);
    }
    if (!cfg.checkpoint_path.empty())
        save_checkpoint(cfg.checkpoint_path, net,
                        static_cast<uint64_t>(cfg.steps), cfg.lr);
    return res;
}

TrainResult train_files(const std::vector<std::string>& paths,
                        const TrainConfig& cfg) {
    require(!paths.empty(), "train: need at least one image");
    std::vector<Image> images;
    images.reserve(paths.size());
    for (const auto& p : paths) images.push_back(load_png(p));
    return train(images, cfg);
}

}  // namespace vmdiff
