#include "vmdiff/pipeline.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "vmdiff/encoding.hpp"
#include "vmdiff/lowrank.hpp"

namespace vmdiff {

Strategy parse_strategy(const std::string& name) {
    if (name == "score_only") return Strategy::score_only;
    if (name == "score_lowrank") return Strategy::score_lowrank;
    if (name == "score_perturb") return Strategy::score_perturb;
    if (name == "full") return Strategy::full;
    throw std::invalid_argument("unknown strategy: " + name);
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::score_only: return "score_only";
        case Strategy::score_lowrank: return "score_lowrank";
        case Strategy::score_perturb: return "score_perturb";
        case Strategy::full: return "full";
    }
    return "?";
}

void apply_strategy(InpaintConfig& cfg, Strategy s) {
    cfg.perturb_enabled =
        s == Strategy::score_perturb || s == Strategy::full;
    cfg.lowrank_enabled =
        s == Strategy::score_lowrank || s == Strategy::full;
}

Image dc_step(const Image& x_pred, const Image& y, const Mask& mask,
              double lambda, bool noiseless) {
    require(x_pred.same_shape(y), "dc_step: shape mismatch");
    require(x_pred.rows == mask.rows && x_pred.cols == mask.cols,
            "dc_step: mask shape mismatch");
    require(noiseless || lambda >= 0.0, "dc_step: negative lambda");
    Image out(x_pred.rows, x_pred.cols, x_pred.channels);
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) {
            const bool known = mask.at(r, c) != 0;
            for (int ch = 0; ch < out.channels; ++ch) {
                const double xp = x_pred.at(r, c, ch);
                if (!known)
                    out.at(r, c, ch) = noiseless ? xp : lambda * xp / (1.0 + lambda);
                else if (noiseless)
                    out.at(r, c, ch) = y.at(r, c, ch);
                else
                    out.at(r, c, ch) =
                        (y.at(r, c, ch) + lambda * xp) / (1.0 + lambda);
            }
        }
    return out;
}

namespace {

Image slice(const Image& img, int r0, int c0, int side) {
    Image out(side, side, img.channels);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(r0 + r, c0 + c, ch);
    return out;
}

Mask slice_mask(const Mask& m, int r0, int c0, int side) {
    Mask out(side, side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) out.at(r, c) = m.at(r0 + r, c0 + c);
    return out;
}

Mask pad_mask_reflect(const Mask& m, int target) {
    Image tmp(m.rows, m.cols, 1);
    for (size_t i = 0; i < m.data.size(); ++i) tmp.data[i] = m.data[i];
    const Image padded = pad_reflect(tmp, target);
    Mask out(target, target);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = padded.data[i] > 0.5 ? 1 : 0;
    return out;
}

void check_finite(const Tensor& t, int patch, int step, const char* where) {
    for (double v : t.data)
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "inpaint: non-finite iterate after " << where
                << " at step " << step << " on patch " << patch;
            throw numerical_error(msg.str());
        }
}

}  // namespace

Image inpaint(const Image& y, const Mask& mask, const ScoreModel& model,
              const InpaintConfig& cfg, const StageObserver& observe) {
    require(y.channels == 3, "inpaint: need an RGB observation");
    require(y.rows == y.cols, "inpaint: observation must be square");
    require(y.rows == mask.rows && y.cols == mask.cols,
            "inpaint: mask shape mismatch");
    cfg.sched.validate();
    cfg.sampler.validate();
    const int side = y.rows;
    // Pad with a 32-pixel border, rounded up to whole 64-pixel patches
    // (256 -> 320, the 5x5 grid).
    const int canvas = ((side + 64 + 63) / 64) * 64;
    const PatchGrid grid = PatchGrid::for_canvas(canvas, 64);
    const Image y_pad = pad_reflect(y, canvas);
    const Mask m_pad = pad_mask_reflect(mask, canvas);

    std::vector<Image> result(grid.count);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
    for (int n = 0; n < grid.count; ++n) {
        try {
            const auto [r0, c0] = grid.origin(n);
            const Image y_n = slice(y_pad, r0, c0, grid.patch);
            const Mask m_n = slice_mask(m_pad, r0, c0, grid.patch);
            Rng noise_rng(mix_seed(cfg.seed, 3ull * n));
            Rng mask_rng(mix_seed(cfg.seed, 3ull * n + 1));
            Rng init_rng(mix_seed(cfg.seed, 3ull * n + 2));

            auto emit = [&](int step, bool corr, const char* stage,
                            const Tensor* data) {
                if (!observe) return;
#pragma omp critical(vmdiff_trace)
                observe(StageEvent{n, step, corr, stage, data});
            };

            // known pixels from the observation, missing from the prior
            Image x(grid.patch, grid.patch, 3);
            for (int r = 0; r < grid.patch; ++r)
                for (int c = 0; c < grid.patch; ++c) {
                    const bool known = m_n.at(r, c) != 0;
                    for (int ch = 0; ch < 3; ++ch)
                        x.at(r, c, ch) =
                            known ? y_n.at(r, c, ch)
                                  : cfg.sched.sigma_max * init_rng.normal();
                }

            ADMMState admm;
            const uint64_t lr_seed = mix_seed(cfg.seed, 7000 + n);
            Mask ones(grid.patch, grid.patch, 1);

            // one iteration of the alternation at ladder level i
            auto refine = [&](Tensor stack, const Mask& vm, int i, bool corr) {
                const ChannelCorr rho = channel_correlations(x);
                auto est = invert_stack(stack, vm);
                emit(i, corr, "invert", nullptr);
                x = fuse_estimates(est, rho, cfg.tau);
                emit(i, corr, "fuse", &x);
                if (cfg.lowrank_enabled) {
                    x = lowrank_step(x, admm, cfg.rank, cfg.mu,
                                     cfg.admm_iters, lr_seed);
                    emit(i, corr, "lowrank", &x);
                }
                x = dc_step(x, y_n, m_n, cfg.dc.lambda, cfg.dc.noiseless);
                emit(i, corr, "dc", &x);
                check_finite(x, n, i, corr ? "correction" : "prediction");
            };

            for (int i = cfg.sched.n_steps - 2; i >= 0; --i) {
                const Mask vm =
                    cfg.perturb_enabled
                        ? sample_virtual_mask(grid.patch, grid.patch, cfg.xi,
                                              mask_rng.raw())
                        : ones;
                emit(i, false, "mask", nullptr);
                Tensor stack = perturb_stack(x, vm);
                emit(i, false, "perturb", &stack);
                Tensor z =
                    noise_rng.normal_tensor(grid.patch, grid.patch, 12);
                if (i == 0)  // denoised final step
                    for (double& v : z.data) v = 0.0;
                stack = predictor_step(stack, i, model, cfg.sched, z);
                emit(i, false, "predictor", &stack);
                refine(std::move(stack), vm, i, false);

                for (int j = 0; j < cfg.sampler.corrector_steps; ++j) {
                    const Mask vmc =
                        cfg.perturb_enabled
                            ? sample_virtual_mask(grid.patch, grid.patch,
                                                  cfg.xi, mask_rng.raw())
                            : ones;
                    emit(i, true, "mask", nullptr);
                    Tensor cstack = perturb_stack(x, vmc);
                    emit(i, true, "perturb", &cstack);
                    const Tensor zc =
                        noise_rng.normal_tensor(grid.patch, grid.patch, 12);
                    cstack = corrector_step(cstack, i, model, zc,
                                            cfg.sampler.snr);
                    emit(i, true, "corrector", &cstack);
                    refine(std::move(cstack), vmc, i, true);
                }
            }
            result[n] = std::move(x);
        } catch (...) {
#pragma omp critical(vmdiff_fail)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    Image out = stitch_patches(result, grid, side);
    for (double& v : out.data) v = std::min(1.0, std::max(0.0, v));
    return out;
}

std::string EvalResult::table() const {
    std::ostringstream os;
    os << "image\tpsnr_in\tpsnr\tssim\n";
    auto row = [&os](const EvalRow& r) {
        os << r.name << '\t';
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.6f\n", r.psnr_in,
                      r.psnr, r.ssim);
        os << buf;
    };
    for (const auto& r : rows) row(r);
    row(mean);
    return os.str();
}

EvalResult evaluate(const std::vector<std::pair<std::string, Image>>& truths,
                    const MaskSpec& spec, const ScoreModel& model,
                    const InpaintConfig& cfg, std::vector<Image>* outputs) {
    require(!truths.empty(), "evaluate: no images");
    EvalResult res;
    res.mean.name = "mean";
    for (size_t idx = 0; idx < truths.size(); ++idx) {
        const auto& [name, truth] = truths[idx];
        const Mask mask = gen_mask(spec, truth.rows, truth.cols,
                                   mix_seed(cfg.seed, 0xe5a1 + idx));
        const Image y = apply_degradation(truth, mask);
        InpaintConfig icfg = cfg;
        icfg.seed = mix_seed(cfg.seed, 0x1a9e + idx);
        const Image out = inpaint(y, mask, model, icfg);
        EvalRow row{name, psnr(y, truth), psnr(out, truth), ssim(out, truth)};
        res.rows.push_back(row);
        res.mean.psnr_in += row.psnr_in;
        res.mean.psnr += row.psnr;
        res.mean.ssim += row.ssim;
        if (outputs) outputs->push_back(out);
    }
    res.mean.psnr_in /= res.rows.size();
    res.mean.psnr /= res.rows.size();
    res.mean.ssim /= res.rows.size();
    return res;
}

EvalResult ablation_run(Strategy strategy,
                        const std::vector<std::pair<std::string, Image>>& truths,
                        const MaskSpec& spec, const ScoreModel& model,
                        const InpaintConfig& cfg, std::vector<Image>* outputs) {
    InpaintConfig acfg = cfg;
    apply_strategy(acfg, strategy);
    return evaluate(truths, spec, model, acfg, outputs);
}

}  // namespace vmdiff
