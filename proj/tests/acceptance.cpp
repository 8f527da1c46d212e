// Acceptance gate. One test case per shipping criterion, run in order; each
// prints a single "[criterion N] PASS/FAIL: <measured values> (elapsed)" line
// so the log reads as a checklist. Tolerances and budgets are pinned here.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "support/sampling.hpp"
#include "support/synth.hpp"
#include "support/testutil.hpp"
#include "vmdiff/encoding.hpp"
#include "vmdiff/lowrank.hpp"
#include "vmdiff/pipeline.hpp"
#include "vmdiff/png_io.hpp"
#include "vmdiff/train.hpp"

using namespace vmdiff;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void verdict(int n, bool ok, const std::string& detail, double secs) {
    std::printf("[criterion %d] %s: %s (%.1f s)\n", n, ok ? "PASS" : "FAIL",
                detail.c_str(), secs);
    std::fflush(stdout);
}

Eigen::MatrixXd orthonormal(int n, int r, uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd g(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = rng.normal();
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
           Eigen::MatrixXd::Identity(n, r);
}

// mirrors the padding the pipeline applies to the pixel mask
Mask pad_mask(const Mask& m, int target) {
    Image tmp(m.rows, m.cols, 1);
    for (size_t i = 0; i < m.data.size(); ++i) tmp.data[i] = m.data[i];
    const Image padded = pad_reflect(tmp, target);
    Mask out(target, target);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = padded.data[i] > 0.5 ? 1 : 0;
    return out;
}

// Desk-scale fixture shared by criteria 8 and 9: a 2000-step prior trained on
// ten synthetic textures, plus the 80%-missing evaluations of three held-out
// images. Built once, on first use.
struct DeskRig {
    TrainResult trained;
    std::vector<std::pair<std::string, Image>> truths;
    InpaintConfig icfg;
    MaskSpec spec;
    EvalResult full80, score_only80;
    double secs = 0.0;
    std::string error;  // non-empty = setup threw
};

const DeskRig& desk_rig() {
    static const DeskRig rig = [] {
        DeskRig r;
        Stopwatch sw;
        try {
            std::vector<Image> train_set;
            for (int j = 0; j < 10; ++j)
                train_set.push_back(synth_texture(256, 256, 1000 + j));
            for (int j = 0; j < 3; ++j)
                r.truths.emplace_back("held" + std::to_string(j),
                                      synth_texture(256, 256, 2000 + j));

            TrainConfig tc;
            tc.sched = NoiseSchedule{0.01, 378.0, 60};
            tc.steps = 2000;
            tc.crop = 64;
            tc.features = 12;
            tc.stages = 2;
            tc.seed = 7;
            tc.checkpoint_every = 0;
            r.trained = train(train_set, tc);

            r.icfg.sched = NoiseSchedule{0.01, 378.0, 60};
            r.icfg.rank = 16;
            r.icfg.mu = 1.0;
            r.icfg.admm_iters = 1;
            r.icfg.seed = 99;
            r.spec.kind = MaskKind::random;
            r.spec.fraction = 0.8;
            r.full80 = ablation_run(Strategy::full, r.truths, r.spec,
                                    r.trained.net, r.icfg);
            r.score_only80 = ablation_run(Strategy::score_only, r.truths,
                                          r.spec, r.trained.net, r.icfg);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.secs = sw.secs();
        return r;
    }();
    return rig;
}

}  // namespace

TEST_CASE("criterion 1: channel perturbation decodes back exactly") {
    Stopwatch sw;
    const double xis[4] = {0.0, 2.0, 2.81, 3.0};
    const int cases = 1000;
    int exact = 0;
    Rng rng(101);
    for (int t = 0; t < cases; ++t) {
        const int rows = 4 + static_cast<int>(rng.raw() % 29);
        const int cols = 4 + static_cast<int>(rng.raw() % 29);
        const Image patch = uniform_image(rows, cols, 3, rng.raw());
        const Mask vm =
            sample_virtual_mask(rows, cols, xis[t % 4], rng.raw());
        const Tensor stack = perturb_stack(patch, vm);
        const std::array<Image, 4> est = invert_stack(stack, vm);
        bool all = stack.channels == 12;
        for (const Image& e : est)
            for (size_t j = 0; j < patch.size() && all; ++j)
                all = e.data[j] == patch.data[j];  // zero tolerance
        exact += all;
    }
    const double t = sw.secs();
    const bool ok = exact == cases && t < 10.0;
    verdict(1, ok,
            fmt("all four decoded estimates bitwise equal on %d/%d random "
                "(patch, mask, ratio) cases, budget 10 s",
                exact, cases),
            t);
    CHECK_MESSAGE(ok, "perturbation round trip must be exact on every case");
}

TEST_CASE("criterion 2: window lift and unlift invert at production size") {
    Stopwatch sw;
    bool dims_ok = true;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Image x = uniform_image(64, 64, 3, 7000 + t);
        const Eigen::MatrixXd m = hankel(x, 8);
        dims_ok = dims_ok && m.rows() == 3249 && m.cols() == 192;
        worst = std::max(worst, max_abs_diff(hankel_pinv(m, 64, 3, 8), x));
    }
    const double t = sw.secs();
    const bool ok = dims_ok && worst <= 1e-12 && t < 30.0;
    verdict(2, ok,
            fmt("lift of a 64x64x3 patch is %s3249x192; unlift(lift(x)) worst "
                "|dx| = %.2e over 100 patches, tolerance 1e-12, budget 30 s",
                dims_ok ? "" : "NOT ", worst),
            t);
    CHECK_MESSAGE(ok, "structured lift must invert to 1e-12 at 3249x192");
}

TEST_CASE("criterion 3: factorization solver converges on a rank-8 target") {
    Stopwatch sw;
    const int n = 3249, m = 192, r = 8;
    const double mu = 1.0;
    Eigen::VectorXd sig(r);
    for (int j = 0; j < r; ++j) sig(j) = 0.2 * std::pow(10.0, j / 7.0);

    // Start from the solver's matching state -- the configuration all three
    // updates jointly reproduce: factors split the spectrum as its square
    // root and the multiplier carries the stationary 1/mu offset. From there
    // the fit must hold steady (ties within 1e-10 of the target norm) for
    // 200 sweeps and end below 1e-6 relative.
    const Eigen::MatrixXd p = orthonormal(n, r, 31);
    const Eigen::MatrixXd q = orthonormal(m, r, 32);
    const Eigen::MatrixXd a = p * sig.asDiagonal() * q.transpose();
    const double na = a.norm();
    ADMMState st;
    st.r = r;
    st.mu = mu;
    st.u = p * sig.cwiseSqrt().asDiagonal();
    st.v = q * sig.cwiseSqrt().asDiagonal();
    st.lam = p * q.transpose() / mu;

    double prev = (a - st.u * st.v.transpose()).norm();
    double fit = prev, max_rise = 0.0;
    bool monotone = true;
    for (int it = 0; it < 200; ++it) {
        (void)admm_step(st, a);
        fit = (a - st.u * st.v.transpose()).norm();
        max_rise = std::max(max_rise, fit - prev);
        monotone = monotone && fit <= prev + 1e-10 * na;
        prev = fit;
    }

    // generic cold start on a unit-norm rank-8 target must also reach 1e-6
    // within the same sweep budget
    Eigen::MatrixXd a2 = orthonormal(n, r, 33) * sig.asDiagonal() *
                         orthonormal(m, r, 34).transpose();
    a2 /= a2.norm();
    ADMMState cold = admm_init(a2, r, mu, 35);
    int crossed = -1;
    for (int it = 0; it < 200 && crossed < 0; ++it) {
        (void)admm_step(cold, a2);
        if ((a2 - cold.u * cold.v.transpose()).norm() < 1e-6) crossed = it + 1;
    }

    // the factor initializer alone must fit a rank-1 target to 1e-8; the
    // solver source rejects spectral decompositions at compile time, so no
    // singular-value routine can be involved
    Rng vr(36);
    Eigen::VectorXd lu(n), lv(m);
    for (int i = 0; i < n; ++i) lu(i) = vr.normal();
    for (int j = 0; j < m; ++j) lv(j) = vr.normal();
    const Eigen::MatrixXd a1 = lu * lv.transpose();
    const ADMMState s1 = admm_init(a1, 1, mu, 37);
    const double init_fit =
        (a1 - s1.u * s1.v.transpose()).norm() / a1.norm();

    const double t = sw.secs();
    const bool ok = monotone && fit < 1e-6 * na && crossed > 0 &&
                    init_fit <= 1e-8 && t < 60.0;
    verdict(3, ok,
            fmt("r=8 mu=1: fit %.1e relative after 200 sweeps, largest rise "
                "%.1e (tie tolerance 1e-10); cold start crossed 1e-6 at sweep "
                "%d; rank-1 init fit %.1e (tolerance 1e-8), budget 60 s",
                fit / na, max_rise / na, crossed, init_fit),
            t);
    CHECK_MESSAGE(ok, "completion solver must hold and reach 1e-6 on rank-8");
}

TEST_CASE("criterion 4: reverse sampler reproduces the analytic target") {
    Stopwatch sw;
    const NoiseSchedule sched{0.01, 378.0, 500};
    const int rows = 8, cols = 8, ch = 12, chains = 256;
    Tensor m(rows, cols, ch);
    Rng mr(404);
    for (auto& v : m.data) v = mr.uniform();
    const GaussianScoreOracle oracle(m, 0.1, sched);
    SamplerConfig scfg;  // one correction per step, snr 0.075

    const size_t d = m.size();
    std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
    for (int c = 0; c < chains; ++c) {
        Rng rng(mix_seed(405, c));
        const Tensor x =
            reverse_pc_sample(oracle, sched, scfg, rows, cols, ch, rng);
        for (size_t j = 0; j < d; ++j) {
            sum[j] += x.data[j];
            sumsq[j] += x.data[j] * x.data[j];
        }
    }
    double worst_mean = 0.0, lo_std = 1e9, hi_std = 0.0;
    for (size_t j = 0; j < d; ++j) {
        const double mean = sum[j] / chains;
        const double var =
            (sumsq[j] - chains * mean * mean) / (chains - 1.0);
        const double sd = std::sqrt(std::max(var, 0.0));
        worst_mean = std::max(worst_mean, std::abs(mean - m.data[j]));
        lo_std = std::min(lo_std, sd);
        hi_std = std::max(hi_std, sd);
    }
    const double t = sw.secs();
    const bool ok = worst_mean <= 0.05 && lo_std >= 0.075 &&
                    hi_std <= 0.125 && t < 300.0;
    verdict(4, ok,
            fmt("N=500 M=1 snr=0.075, 256 chains of 8x8x12: worst |mean "
                "error| %.4f (limit 0.05), per-coordinate std in [%.4f, %.4f] "
                "(0.1 +/- 25%%), budget 5 min",
                worst_mean, lo_std, hi_std),
            t);
    CHECK_MESSAGE(ok, "sampler statistics must match the gaussian target");
}

TEST_CASE("criterion 5: analytic loss gradient passes finite differences") {
    Stopwatch sw;
    DenoiserNetT<double> net;
    net.sched = NoiseSchedule{0.01, 378.0, 10};
    net.features = 8;
    net.stages = 1;
    net.init(55);
    // the output conv initializes to zero, which stalls trunk gradients;
    // randomize before checking
    Rng prng(56);
    for (auto& p : net.params) p += 0.05 * prng.normal();
    const size_t np = net.param_count();

    Rng rng(57);
    std::vector<Tensor> x0s;
    std::vector<Tensor> zs;
    const std::vector<int> is{3, 7};
    for (int k = 0; k < 2; ++k) {
        const Image crop = uniform_image(8, 8, 3, rng.raw());
        const Mask vm = sample_virtual_mask(8, 8, 2.81, rng.raw());
        x0s.push_back(perturb_stack(crop, vm));
        zs.push_back(rng.normal_tensor(8, 8, 12));
    }
    std::vector<double> grad;
    (void)dsm_loss_grad(net, x0s, is, zs, &grad);

    const double h = 1e-6;
    double max_rel = 0.0;
    for (size_t j = 0; j < np; ++j) {
        const double keep = net.params[j];
        net.params[j] = keep + h;
        const double up = dsm_loss_grad<double>(net, x0s, is, zs, nullptr);
        net.params[j] = keep - h;
        const double dn = dsm_loss_grad<double>(net, x0s, is, zs, nullptr);
        net.params[j] = keep;
        const double fd = (up - dn) / (2 * h);
        const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-4});
        max_rel = std::max(max_rel, std::abs(fd - grad[j]) / scale);
    }
    const double t = sw.secs();
    const bool ok = np <= 10000 && max_rel <= 1e-4 && t < 120.0;
    verdict(5, ok,
            fmt("%zu parameters (limit 10000), worst relative gradient error "
                "%.2e (tolerance 1e-4), budget 2 min",
                np, max_rel),
            t);
    CHECK_MESSAGE(ok, "every parameter gradient must match central FD");
}

TEST_CASE("criterion 6: known pixels are bit-exact after every iteration") {
    Stopwatch sw;
    const Image truth = synth_texture(64, 64, 606);
    MaskSpec msp;
    msp.kind = MaskKind::random;
    msp.fraction = 0.3;
    const Mask mask = gen_mask(msp, 64, 64, 607);
    const Image y = apply_degradation(truth, mask);

    InpaintConfig icfg;
    icfg.sched = NoiseSchedule{0.01, 378.0, 51};  // 50 reverse iterations
    icfg.rank = 8;
    icfg.admm_iters = 1;
    icfg.seed = 608;  // dc defaults stay noiseless
    const PatchGrid grid = PatchGrid::for_canvas(128);
    const Image y_pad = pad_reflect(y, 128);
    const Mask m_pad = pad_mask(mask, 128);

    std::mutex mtx;
    long dc_events = 0, checked = 0, mismatched = 0;
    auto observe = [&](const StageEvent& ev) {
        if (std::strcmp(ev.stage, "dc") != 0) return;
        std::lock_guard<std::mutex> lock(mtx);
        ++dc_events;
        const auto [r0, c0] = grid.origin(ev.patch);
        for (int r = 0; r < grid.patch; ++r)
            for (int c = 0; c < grid.patch; ++c) {
                if (!m_pad.at(r0 + r, c0 + c)) continue;
                for (int ch = 0; ch < 3; ++ch) {
                    ++checked;
                    mismatched +=
                        ev.data->at(r, c, ch) != y_pad.at(r0 + r, c0 + c, ch);
                }
            }
    };
    const GaussianScoreOracle oracle(Tensor(64, 64, 12, 0.5), 0.3, icfg.sched);
    (void)inpaint(y, mask, oracle, icfg, observe);

    const long expect = 4L * 50 * 2;  // patches x iterations x (pred + corr)
    const double t = sw.secs();
    const bool ok = dc_events == expect && checked > 0 && mismatched == 0;
    verdict(6, ok,
            fmt("%ld consistency events (expected %ld), %ld known samples "
                "checked, %ld mismatched (zero tolerance)",
                dc_events, expect, checked, mismatched),
            t);
    CHECK_MESSAGE(ok, "noiseless consistency must restore knowns bit-exactly");
}

TEST_CASE("criterion 7: virtual mask hits the analytic perturbed fraction") {
    Stopwatch sw;
    const double xis[4] = {0.0, 2.0, 2.81, 3.0};
    double worst_z = 0.0;
    bool all_ok = true;
    std::string parts;
    for (int k = 0; k < 4; ++k) {
        const double frac = 0.5 * std::erfc(xis[k] / std::sqrt(2.0));
        long hits = 0, n = 0;
        for (int s = 0; s < 50; ++s) {
            const Mask m =
                sample_virtual_mask(64, 64, xis[k], mix_seed(707, 4 * s + k));
            for (const auto v : m.data) hits += v == 0;
            n += static_cast<long>(m.size());
        }
        const double emp = static_cast<double>(hits) / n;
        const double se = std::sqrt(frac * (1.0 - frac) / n);
        const double z = std::abs(emp - frac) / se;
        worst_z = std::max(worst_z, z);
        all_ok = all_ok && z <= 3.0;
        parts += fmt("%s%.2f: %.5f vs %.5f", k ? ", " : "", xis[k], emp, frac);
    }
    const double t = sw.secs();
    verdict(7, all_ok,
            fmt("empirical vs analytic perturbed fraction over 50 seeds (%s), "
                "worst deviation %.2f standard errors (limit 3)",
                parts.c_str(), worst_z),
            t);
    CHECK_MESSAGE(all_ok, "perturbed fraction must sit within 3 SE");
}

TEST_CASE("criterion 8: desk-scale training beats zero-fill by 5 dB") {
    const DeskRig& rig = desk_rig();
    bool ok = false;
    std::string msg;
    if (!rig.error.empty()) {
        msg = "fixture setup failed: " + rig.error;
    } else {
        const double gain = rig.full80.mean.psnr - rig.full80.mean.psnr_in;
        ok = gain >= 5.0 &&
             rig.full80.mean.psnr >= rig.score_only80.mean.psnr &&
             rig.secs < 1800.0;
        msg = fmt(
            "2000 steps on 10 textures, 3 held-out 256x256 at 80%% missing: "
            "mean psnr %.2f dB vs zero-filled %.2f dB (gain %.2f, need >= 5); "
            "score-only ablation %.2f dB (full must match or beat), budget "
            "30 min",
            rig.full80.mean.psnr, rig.full80.mean.psnr_in, gain,
            rig.score_only80.mean.psnr);
    }
    verdict(8, ok, msg, rig.secs);
    CHECK_MESSAGE(ok, "end-to-end desk run must clear both trend gates");
}

TEST_CASE("criterion 9: quality falls monotonically with missing fraction") {
    Stopwatch sw;
    const DeskRig& rig = desk_rig();
    bool ok = false;
    std::string msg;
    if (!rig.error.empty()) {
        msg = "fixture setup failed: " + rig.error;
    } else {
        try {
            const double fracs[4] = {0.5, 0.7, 0.8, 0.9};
            double means[4];
            means[2] = rig.full80.mean.psnr;
            for (int k = 0; k < 4; ++k) {
                if (k == 2) continue;
                MaskSpec spec = rig.spec;
                spec.fraction = fracs[k];
                means[k] = ablation_run(Strategy::full, rig.truths, spec,
                                        rig.trained.net, rig.icfg)
                               .mean.psnr;
            }
            ok = means[0] >= means[1] && means[1] >= means[2] &&
                 means[2] >= means[3];
            msg = fmt(
                "mean psnr across missing fractions: 50%%: %.2f, 70%%: %.2f, "
                "80%%: %.2f, 90%%: %.2f dB (must be non-increasing)",
                means[0], means[1], means[2], means[3]);
        } catch (const std::exception& e) {
            msg = std::string("evaluation failed: ") + e.what();
        }
    }
    verdict(9, ok, msg, sw.secs());
    CHECK_MESSAGE(ok, "mean psnr must not rise as more pixels go missing");
}

TEST_CASE("criterion 10: quality metrics match their textbook definitions") {
    Stopwatch sw;
    const Image a = synth_texture(32, 32, 1010);
    const Image b = synth_texture(32, 32, 1011);

    Image off = a;
    for (auto& v : off.data) v += 0.1;
    const double p_offset = psnr(off, a);

    double mse = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    const double p_oracle = 10.0 * std::log10(1.0 / mse);

    const double s_self = ssim(a, a);

    // direct per-window evaluation: 11x11 gaussian (sigma 1.5), valid
    // windows, channels averaged
    std::vector<double> win(121);
    double tot = 0.0;
    for (int r = 0; r < 11; ++r)
        for (int c = 0; c < 11; ++c) {
            const double dr = r - 5, dc = c - 5;
            win[r * 11 + c] = std::exp(-(dr * dr + dc * dc) / (2 * 1.5 * 1.5));
            tot += win[r * 11 + c];
        }
    for (auto& w : win) w /= tot;
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0.0;
    size_t nwin = 0;
    for (int ch = 0; ch < 3; ++ch)
        for (int r = 0; r + 11 <= 32; ++r)
            for (int c = 0; c + 11 <= 32; ++c) {
                double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double w = win[i * 11 + j];
                        mx += w * a.at(r + i, c + j, ch);
                        my += w * b.at(r + i, c + j, ch);
                    }
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double w = win[i * 11 + j];
                        const double dx = a.at(r + i, c + j, ch) - mx;
                        const double dy = b.at(r + i, c + j, ch) - my;
                        sxx += w * dx * dx;
                        syy += w * dy * dy;
                        sxy += w * dx * dy;
                    }
                acc += ((2 * mx * my + c1) * (2 * sxy + c2)) /
                       ((mx * mx + my * my + c1) * (sxx + syy + c2));
                ++nwin;
            }
    const double s_oracle = acc / static_cast<double>(nwin);

    const double e_offset = std::abs(p_offset - 20.0);
    const double e_psnr = std::abs(psnr(a, b) - p_oracle);
    const double e_self = std::abs(s_self - 1.0);
    const double e_ssim = std::abs(ssim(a, b) - s_oracle);
    const double t = sw.secs();
    const bool ok = e_offset <= 1e-9 && e_psnr <= 1e-10 && e_self <= 1e-12 &&
                    e_ssim <= 1e-8;
    verdict(10, ok,
            fmt("constant 0.1 offset: %.10f dB (|err| %.1e, tol 1e-9); psnr "
                "vs direct mse %.1e (tol 1e-10); self-similarity 1%+.1e (tol "
                "1e-12); similarity vs windowed oracle %.1e (tol 1e-8)",
                p_offset, e_offset, e_psnr, s_self - 1.0, e_ssim),
            t);
    CHECK_MESSAGE(ok, "metrics must match brute-force definitions");
}

TEST_CASE("criterion 11: fixed-seed runs produce byte-identical artifacts") {
    Stopwatch sw;
    namespace fs = std::filesystem;
    TempDir tmp;
    const std::string log = tmp.path("cli.log");
    save_png(synth_texture(64, 64, 1101), tmp.path("train0.png"));
    save_png(synth_texture(64, 64, 1102), tmp.path("train1.png"));
    fs::create_directories(tmp.path("truth"));
    save_png(synth_texture(64, 64, 1103), tmp.path("truth/t0.png"));
    save_png(synth_texture(64, 64, 1104), tmp.path("truth/t1.png"));

    // tiny but complete profile; every artifact-bearing subcommand runs twice
    const std::string prof =
        " --set features=8 --set net_stages=1 --set train_steps=15"
        " --set steps=6 --set crop=32 --set rank=8 --set admm_iters=1";
    bool ran = true;
    for (int round = 0; round < 2 && ran; ++round) {
        const std::string dir = tmp.path("r" + std::to_string(round));
        fs::create_directories(dir);
        // run from inside the round directory so recorded paths agree
        auto run = [&](const std::string& args) {
            const std::string cmd = "cd \"" + dir + "\" && VMDIFF_WORKERS=1 \"" +
                                    VMDIFF_CLI_PATH + "\" " + args + " >> \"" +
                                    log + "\" 2>&1";
            return std::system(cmd.c_str()) == 0;
        };
        ran = ran && run("mask --mask random:0.4 --size 64 --out mask.png "
                         "--seed 5");
        ran = ran && run("train " + tmp.path("train0.png") + " " +
                         tmp.path("train1.png") + " --out ck.bin --seed 3" +
                         prof);
        ran = ran && run("inpaint " + tmp.path("truth/t0.png") +
                         " --mask random:0.5 --checkpoint ck.bin --out out.png"
                         " --truth " + tmp.path("truth/t0.png") + " --seed 9" +
                         prof);
        ran = ran && run("eval --truth " + tmp.path("truth") +
                         " --mask random:0.5 --checkpoint ck.bin --out eval "
                         "--seed 4" + prof);
    }

    const char* files[] = {"mask.png",
                           "ck.bin",
                           "ck.bin.loss.tsv",
                           "out.png",
                           "out.png.manifest.json",
                           "eval/table.tsv",
                           "eval/manifest.json",
                           "eval/t0_restored.png",
                           "eval/t1_restored.png"};
    const int total = static_cast<int>(std::size(files));
    int identical = 0;
    std::string first_diff;
    for (const char* f : files) {
        if (files_identical(tmp.path("r0/" + std::string(f)),
                            tmp.path("r1/" + std::string(f))))
            ++identical;
        else if (first_diff.empty())
            first_diff = f;
    }
    const double t = sw.secs();
    const bool ok = ran && identical == total;
    verdict(11, ok,
            fmt("mask/train/inpaint/eval twice with fixed seeds: %d/%d "
                "artifacts byte-identical%s%s",
                identical, total, first_diff.empty() ? "" : ", first diff: ",
                first_diff.c_str()),
            t);
    CHECK_MESSAGE(ok, "every artifact must be byte-identical across runs");
}
