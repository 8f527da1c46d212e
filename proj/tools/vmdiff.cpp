// Batch CLI: train a prior, restore degraded images, run the evaluation
// harness, generate masks. Every run with --seed is bit-reproducible.
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "vmdiff/checkpoint.hpp"
#include "vmdiff/config.hpp"
#include "vmdiff/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vmdiff;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    int64_t seed = -1;                   // -1 = keep config value
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--set", o.overrides,
                    "override a config key, e.g. --set rank=16");
    cmd->add_option("--seed", o.seed, "master seed (overrides config)");
}

AppConfig resolve_config(const CommonOpts& o) {
    AppConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got " + kv);
        apply_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed >= 0) cfg.seed = static_cast<uint64_t>(o.seed);
    return cfg;
}

json config_json(const AppConfig& cfg) {
    json j;
    for (const auto& [k, v] : cfg.kv_pairs()) j[k] = v;
    return j;
}

json checkpoint_json(const std::string& path) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    return json{{"path", path}, {"fnv1a64", hex}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << text;
}

double missing_fraction(const Mask& m) {
    size_t missing = 0;
    for (auto v : m.data) missing += v == 0;
    return static_cast<double>(missing) / m.size();
}

int cmd_train(const CommonOpts& common, const std::vector<std::string>& images,
              const std::string& out) {
    AppConfig cfg = resolve_config(common);
    TrainConfig tc = cfg.train_config();
    tc.checkpoint_path = out;
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult res = train_files(images, tc);
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::string trace = "step\tloss\n";
    for (size_t i = 0; i < res.loss_trace.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu\t%.8e\n", i + 1,
                      res.loss_trace[i]);
        trace += buf;
    }
    write_text(out + ".loss.tsv", trace);
    std::printf("trained %d steps on %zu images in %.1f s\n", res.steps_done,
                images.size(), sec);
    std::printf("final loss: %.6f\n", res.loss_trace.back());
    std::printf("checkpoint: %s\n", out.c_str());
    return 0;
}

int cmd_inpaint(const CommonOpts& common, const std::string& input,
                const std::string& mask_spec, const std::string& ckpt,
                const std::string& out, const std::string& truth_path) {
    AppConfig cfg = resolve_config(common);
    const DenoiserNet net = load_checkpoint(ckpt).net;
    const Image observed = load_png(input);
    const MaskSpec spec = parse_mask_spec(mask_spec);
    const Mask mask = gen_mask(spec, observed.rows, observed.cols, cfg.seed);
    const Image y = apply_degradation(observed, mask);  // zero the missing
    InpaintConfig icfg = cfg.inpaint_config();
    icfg.sched = net.sched;  // the checkpoint owns the schedule it trained on

    const auto t0 = std::chrono::steady_clock::now();
    const Image restored = inpaint(y, mask, net, icfg);
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    save_png(restored, out);

    json manifest{{"command", "inpaint"},
                  {"seed", cfg.seed},
                  {"config", config_json(cfg)},
                  {"checkpoint", checkpoint_json(ckpt)},
                  {"mask", mask_spec},
                  {"missing_fraction", missing_fraction(mask)},
                  {"input", input},
                  {"output", out}};
    if (!truth_path.empty()) {
        const Image truth = load_png(truth_path);
        const double p = psnr(restored, truth), s = ssim(restored, truth);
        std::printf("psnr: %.4f\n", p);
        std::printf("ssim: %.6f\n", s);
        manifest["metrics"] = {{"psnr", p}, {"ssim", s}};
    }
    write_text(out + ".manifest.json", manifest.dump(2) + "\n");
    std::printf("restored %s -> %s in %.1f s\n", input.c_str(), out.c_str(),
                sec);
    return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& truth_dir,
             const std::string& mask_spec, const std::string& ckpt,
             const std::string& out_dir, const std::string& strategy_name_) {
    AppConfig cfg = resolve_config(common);
    const DenoiserNet net = load_checkpoint(ckpt).net;
    const Strategy strategy = parse_strategy(strategy_name_);

    std::vector<std::pair<std::string, Image>> truths;
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(truth_dir))
        if (e.path().extension() == ".png") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        truths.emplace_back(p.stem().string(), load_png(p.string()));
    if (truths.empty()) throw std::invalid_argument("no PNGs in " + truth_dir);

    const MaskSpec spec = parse_mask_spec(mask_spec);
    InpaintConfig icfg = cfg.inpaint_config();
    icfg.sched = net.sched;
    fs::create_directories(out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Image> outputs;
    const EvalResult res =
        ablation_run(strategy, truths, spec, net, icfg, &outputs);
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    json rows = json::array();
    for (size_t i = 0; i < res.rows.size(); ++i) {
        const auto& r = res.rows[i];
        const std::string png =
            (fs::path(out_dir) / (r.name + "_restored.png")).string();
        save_png(outputs[i], png);
        rows.push_back({{"image", r.name},
                        {"psnr_in", r.psnr_in},
                        {"psnr", r.psnr},
                        {"ssim", r.ssim},
                        {"output", png}});
    }
    const std::string table_path = (fs::path(out_dir) / "table.tsv").string();
    write_text(table_path, res.table());
    json manifest{{"command", "eval"},
                  {"seed", cfg.seed},
                  {"config", config_json(cfg)},
                  {"checkpoint", checkpoint_json(ckpt)},
                  {"mask", mask_spec},
                  {"strategy", strategy_name(strategy)},
                  {"rows", rows},
                  {"mean", {{"psnr_in", res.mean.psnr_in},
                            {"psnr", res.mean.psnr},
                            {"ssim", res.mean.ssim}}},
                  {"table", table_path}};
    write_text((fs::path(out_dir) / "manifest.json").string(),
               manifest.dump(2) + "\n");
    std::fputs(res.table().c_str(), stdout);
    std::printf("evaluated %zu images (%s) in %.1f s\n", res.rows.size(),
                strategy_name(strategy), sec);
    return 0;
}

int cmd_mask(const CommonOpts& common, const std::string& mask_spec, int size,
             const std::string& out) {
    AppConfig cfg = resolve_config(common);
    const Mask m = gen_mask(parse_mask_spec(mask_spec), size, size, cfg.seed);
    save_mask_png(m, out);
    std::printf("mask %s: %.4f missing -> %s\n", mask_spec.c_str(),
                missing_fraction(m), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* w = std::getenv("VMDIFF_WORKERS")) {
        const int n = std::atoi(w);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"Few-shot diffusion image inpainting with channel "
                 "perturbation and Hankel low-rank completion"};
    app.require_subcommand(1);

    CommonOpts opt_train, opt_inpaint, opt_eval, opt_mask;
    std::vector<std::string> train_images;
    std::string train_out = "checkpoint.bin";
    auto* train_cmd = app.add_subcommand("train", "learn a score prior");
    train_cmd->add_option("images", train_images, "training PNGs")
        ->required()
        ->expected(-1);
    train_cmd->add_option("--out", train_out, "checkpoint path");
    add_common(train_cmd, opt_train);

    std::string in_input, in_mask, in_ckpt, in_out = "restored.png", in_truth;
    auto* in_cmd = app.add_subcommand("inpaint", "restore one image");
    in_cmd->add_option("input", in_input, "observed PNG")->required();
    in_cmd->add_option("--mask", in_mask, "mask spec (random:F|block:X,Y,W,H|text:PATH)")
        ->required();
    in_cmd->add_option("--checkpoint", in_ckpt, "trained checkpoint")
        ->required();
    in_cmd->add_option("--out", in_out, "restored PNG path");
    in_cmd->add_option("--truth", in_truth, "ground truth for metrics");
    add_common(in_cmd, opt_inpaint);

    std::string ev_truth, ev_mask, ev_ckpt, ev_out = "eval_out",
                ev_strategy = "full";
    auto* ev_cmd = app.add_subcommand("eval", "metrics table over a directory");
    ev_cmd->add_option("--truth", ev_truth, "directory of ground-truth PNGs")
        ->required();
    ev_cmd->add_option("--mask", ev_mask, "mask spec")->required();
    ev_cmd->add_option("--checkpoint", ev_ckpt, "trained checkpoint")
        ->required();
    ev_cmd->add_option("--out", ev_out, "output directory");
    ev_cmd->add_option("--strategy", ev_strategy,
                       "score_only|score_lowrank|score_perturb|full");
    add_common(ev_cmd, opt_eval);

    std::string mk_mask, mk_out = "mask.png";
    int mk_size = 256;
    auto* mk_cmd = app.add_subcommand("mask", "write a mask PNG");
    mk_cmd->add_option("--mask", mk_mask, "mask spec")->required();
    mk_cmd->add_option("--size", mk_size, "mask side in pixels");
    mk_cmd->add_option("--out", mk_out, "output PNG");
    add_common(mk_cmd, opt_mask);

    CLI11_PARSE(app, argc, argv);
    try {
        if (train_cmd->parsed())
            return cmd_train(opt_train, train_images, train_out);
        if (in_cmd->parsed())
            return cmd_inpaint(opt_inpaint, in_input, in_mask, in_ckpt, in_out,
                               in_truth);
        if (ev_cmd->parsed())
            return cmd_eval(opt_eval, ev_truth, ev_mask, ev_ckpt, ev_out,
                            ev_strategy);
        if (mk_cmd->parsed()) return cmd_mask(opt_mask, mk_mask, mk_size, mk_out);
    } catch (const training_diverged& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
