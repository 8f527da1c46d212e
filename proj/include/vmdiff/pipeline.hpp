#ifndef VMDIFF_PIPELINE_HPP
#define VMDIFF_PIPELINE_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vmdiff/diffusion.hpp"
#include "vmdiff/image.hpp"
#include "vmdiff/sampler.hpp"
#include "vmdiff/tensor.hpp"

namespace vmdiff {

struct DcConfig {
    double lambda = 1.0;
    bool noiseless = true;  // replace known pixels with the observation
};

struct InpaintConfig {
    NoiseSchedule sched;
    SamplerConfig sampler;
    double xi = 2.81;  // virtual-mask ratio
    double tau = 1.0;  // fusion temperature
    int rank = 48;
    double mu = 1.0;
    int admm_iters = 10;
    DcConfig dc;
    uint64_t seed = 0;
    // Ablation switches; both on is the full method.
    bool perturb_enabled = true;
    bool lowrank_enabled = true;
};

// Restoration strategies for the ablation harness.
enum class Strategy { score_only, score_lowrank, score_perturb, full };
Strategy parse_strategy(const std::string& name);
const char* strategy_name(Strategy s);
void apply_strategy(InpaintConfig& cfg, Strategy s);

// Observer event fired after each stage of each patch iteration. `data`
// points at the value the stage just produced (the 12-channel stack after
// "perturb", the 3-channel iterate after "fuse"/"lowrank"/"dc", null for
// "mask"/"invert") and is valid only during the call. With several worker
// threads events interleave across patches; fields identify the patch.
struct StageEvent {
    int patch = 0;         // patch index, row-major
    int step = 0;          // target ladder index i
    bool corrector = false;  // inside the inner correction loop
    const char* stage = "";  // mask|perturb|predictor|corrector|invert|fuse|lowrank|dc
    const Tensor* data = nullptr;
};
using StageObserver = std::function<void(const StageEvent&)>;

// Least-squares data consistency, x = (D^T y + lambda x_pred)/(1 + lambda)
// elementwise: known pixels blend toward the observation, missing pixels
// keep lambda/(1+lambda) of the prediction. In noiseless mode (lambda ->
// infinity for the data term) known pixels are set to y exactly and missing
// pixels keep x_pred unchanged.
Image dc_step(const Image& x_pred, const Image& y, const Mask& mask,
              double lambda, bool noiseless);

// Full conditional restoration: pad, split into 64x64 patches, per patch run
// the reverse ladder alternating perturbation encoding, predictor/corrector,
// decoding+fusion, low-rank completion, and data consistency, then stitch,
// crop and clip. Deterministic given cfg.seed; patches run in parallel on
// independent RNG streams.
Image inpaint(const Image& y, const Mask& mask, const ScoreModel& model,
              const InpaintConfig& cfg, const StageObserver& observe = {});

struct EvalRow {
    std::string name;
    double psnr_in = 0.0;  // zero-filled observation vs truth
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalResult {
    std::vector<EvalRow> rows;
    EvalRow mean;  // name "mean"
    std::string table() const;  // tab-separated, header + rows + mean
};

// Degrade each truth image with a mask drawn from `spec` (seeded per image),
// inpaint it, and score the result. Restored images are appended to
// `outputs` when given, in row order.
EvalResult evaluate(const std::vector<std::pair<std::string, Image>>& truths,
                    const MaskSpec& spec, const ScoreModel& model,
                    const InpaintConfig& cfg,
                    std::vector<Image>* outputs = nullptr);

// evaluate() under a named stage-toggling strategy, same seeds throughout.
EvalResult ablation_run(Strategy strategy,
                        const std::vector<std::pair<std::string, Image>>& truths,
                        const MaskSpec& spec, const ScoreModel& model,
                        const InpaintConfig& cfg,
                        std::vector<Image>* outputs = nullptr);

}  // namespace vmdiff

#endif
