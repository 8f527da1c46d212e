#include <doctest.h>

#include <fstream>
#include <stdexcept>
#include <string>

#include "support/testutil.hpp"
#include "vmdiff/config.hpp"
#include "vmdiff/png_io.hpp"

using namespace vmdiff;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

}  // namespace

TEST_CASE("config defaults match the reference operating point") {
    const AppConfig cfg;
    CHECK(cfg.sigma_min == 0.01);
    CHECK(cfg.sigma_max == 378.0);
    CHECK(cfg.steps == 1000);
    CHECK(cfg.corrector_steps == 1);
    CHECK(cfg.snr == 0.075);
    CHECK(cfg.perturb_ratio == 2.81);
    CHECK(cfg.fusion_temp == 1.0);
    CHECK(cfg.rank == 48);
    CHECK(cfg.mu == 1.0);
    CHECK(cfg.admm_iters == 10);
    CHECK(cfg.lambda == 1.0);
    CHECK(cfg.noiseless == true);
    CHECK(cfg.train_steps == 2000);
    CHECK(cfg.crop == 64);
    CHECK(cfg.lr == 0.0002);
    CHECK(cfg.checkpoint_every == 500);
    CHECK(cfg.features == 64);
    CHECK(cfg.net_stages == 4);
    CHECK(cfg.seed == 0);
}

TEST_CASE("apply_kv sets every key and rejects junk") {
    AppConfig cfg;
    apply_kv(cfg, "sigma_min", "0.02");
    CHECK(cfg.sigma_min == 0.02);
    apply_kv(cfg, "sigma_max", "50");
    CHECK(cfg.sigma_max == 50.0);
    apply_kv(cfg, "steps", "12");
    CHECK(cfg.steps == 12);
    apply_kv(cfg, "corrector_steps", "2");
    CHECK(cfg.corrector_steps == 2);
    apply_kv(cfg, "snr", "0.16");
    CHECK(cfg.snr == 0.16);
    apply_kv(cfg, "perturb_ratio", "3.0");
    CHECK(cfg.perturb_ratio == 3.0);
    apply_kv(cfg, "fusion_temp", "2.5");
    CHECK(cfg.fusion_temp == 2.5);
    apply_kv(cfg, "rank", "16");
    CHECK(cfg.rank == 16);
    apply_kv(cfg, "mu", "0.5");
    CHECK(cfg.mu == 0.5);
    apply_kv(cfg, "admm_iters", "3");
    CHECK(cfg.admm_iters == 3);
    apply_kv(cfg, "lambda", "4");
    CHECK(cfg.lambda == 4.0);
    apply_kv(cfg, "noiseless", "false");
    CHECK(cfg.noiseless == false);
    apply_kv(cfg, "noiseless", "1");
    CHECK(cfg.noiseless == true);
    apply_kv(cfg, "noiseless", "0");
    CHECK(cfg.noiseless == false);
    apply_kv(cfg, "train_steps", "77");
    CHECK(cfg.train_steps == 77);
    apply_kv(cfg, "crop", "32");
    CHECK(cfg.crop == 32);
    apply_kv(cfg, "lr", "1e-3");
    CHECK(cfg.lr == 1e-3);
    apply_kv(cfg, "checkpoint_every", "100");
    CHECK(cfg.checkpoint_every == 100);
    apply_kv(cfg, "features", "8");
    CHECK(cfg.features == 8);
    apply_kv(cfg, "net_stages", "1");
    CHECK(cfg.net_stages == 1);
    apply_kv(cfg, "seed", "18446744073709551615");  // full 64-bit range
    CHECK(cfg.seed == 18446744073709551615ull);

    CHECK_THROWS_AS(apply_kv(cfg, "stride", "3"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(cfg, "sigma_min", "abc"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(cfg, "sigma_min", "1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(cfg, "steps", "3.7"), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(cfg, "steps", ""), std::invalid_argument);
    CHECK_THROWS_AS(apply_kv(cfg, "noiseless", "yes"), std::invalid_argument);
}

TEST_CASE("kv_pairs round trips through apply_kv") {
    AppConfig cfg;
    apply_kv(cfg, "snr", "0.075");
    apply_kv(cfg, "perturb_ratio", "2.81");
    apply_kv(cfg, "lr", "0.00057");
    apply_kv(cfg, "sigma_max", "378");
    apply_kv(cfg, "rank", "24");
    apply_kv(cfg, "noiseless", "false");
    apply_kv(cfg, "seed", "91");

    AppConfig back;
    for (const auto& [k, v] : cfg.kv_pairs()) apply_kv(back, k, v);
    CHECK(back.kv_pairs() == cfg.kv_pairs());
    CHECK(cfg.kv_pairs().size() == 19);  // every documented key is listed
}

TEST_CASE("load_config handles comments, spacing and bad lines") {
    TempDir tmp;
    const auto good = tmp.path("run.cfg");
    write_file(good,
               "# reference desk profile\n"
               "\n"
               "steps = 12   # small ladder\n"
               "  rank=5\n"
               "sigma_max =  42.5\n"
               "noiseless= false\n"
               "   # indented comment\n");
    const AppConfig cfg = load_config(good);
    CHECK(cfg.steps == 12);
    CHECK(cfg.rank == 5);
    CHECK(cfg.sigma_max == 42.5);
    CHECK(cfg.noiseless == false);
    CHECK(cfg.snr == 0.075);  // untouched keys keep their defaults

    const auto broken = tmp.path("broken.cfg");
    write_file(broken, "steps = 12\nrank 5\n");
    CHECK_THROWS_AS((void)load_config(broken), std::invalid_argument);

    const auto unknown = tmp.path("unknown.cfg");
    write_file(unknown, "stride = 3\n");
    CHECK_THROWS_AS((void)load_config(unknown), std::invalid_argument);

    CHECK_THROWS_AS((void)load_config(tmp.path("absent.cfg")), io_error);
}

TEST_CASE("derived run configurations carry the documented fields") {
    AppConfig cfg;
    apply_kv(cfg, "sigma_min", "0.02");
    apply_kv(cfg, "sigma_max", "50");
    apply_kv(cfg, "steps", "40");
    apply_kv(cfg, "corrector_steps", "2");
    apply_kv(cfg, "snr", "0.16");
    apply_kv(cfg, "perturb_ratio", "2.0");
    apply_kv(cfg, "fusion_temp", "1.5");
    apply_kv(cfg, "rank", "16");
    apply_kv(cfg, "mu", "0.5");
    apply_kv(cfg, "admm_iters", "4");
    apply_kv(cfg, "lambda", "2");
    apply_kv(cfg, "noiseless", "false");
    apply_kv(cfg, "train_steps", "9");
    apply_kv(cfg, "crop", "32");
    apply_kv(cfg, "lr", "0.001");
    apply_kv(cfg, "checkpoint_every", "5");
    apply_kv(cfg, "features", "8");
    apply_kv(cfg, "net_stages", "2");
    apply_kv(cfg, "seed", "7");

    const NoiseSchedule sched = cfg.schedule();
    CHECK(sched.sigma_min == 0.02);
    CHECK(sched.sigma_max == 50.0);
    CHECK(sched.n_steps == 40);

    const TrainConfig tc = cfg.train_config();
    CHECK(tc.steps == 9);
    CHECK(tc.crop == 32);
    CHECK(tc.lr == 0.001);
    CHECK(tc.xi == 2.0);
    CHECK(tc.features == 8);
    CHECK(tc.stages == 2);
    CHECK(tc.seed == 7);
    CHECK(tc.checkpoint_every == 5);
    CHECK(tc.sched.n_steps == 40);

    const InpaintConfig ic = cfg.inpaint_config();
    CHECK(ic.sampler.corrector_steps == 2);
    CHECK(ic.sampler.snr == 0.16);
    CHECK(ic.xi == 2.0);
    CHECK(ic.tau == 1.5);
    CHECK(ic.rank == 16);
    CHECK(ic.mu == 0.5);
    CHECK(ic.admm_iters == 4);
    CHECK(ic.dc.lambda == 2.0);
    CHECK(ic.dc.noiseless == false);
    CHECK(ic.seed == 7);
    CHECK(ic.perturb_enabled);
    CHECK(ic.lowrank_enabled);

    apply_kv(cfg, "sigma_min", "-1");
    CHECK_THROWS_AS((void)cfg.schedule(), std::invalid_argument);
}

TEST_CASE("mask specs parse the three kinds") {
    const MaskSpec rnd = parse_mask_spec("random:0.8");
    CHECK(rnd.kind == MaskKind::random);
    CHECK(rnd.fraction == 0.8);

    const MaskSpec blk = parse_mask_spec("block:4,5,20,30");
    CHECK(blk.kind == MaskKind::block);
    CHECK(blk.x == 4);
    CHECK(blk.y == 5);
    CHECK(blk.w == 20);
    CHECK(blk.h == 30);

    const MaskSpec txt = parse_mask_spec("text:masks/words.png");
    CHECK(txt.kind == MaskKind::text);
    CHECK(txt.path == "masks/words.png");

    CHECK_THROWS_AS((void)parse_mask_spec("random"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("holes:0.5"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("random:0.5x"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("block:1,2,3"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("block:1;2;3;4"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("block:1,2,3,4junk"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_mask_spec("text:"), std::invalid_argument);
}

TEST_CASE("file hashing matches the FNV-1a reference vectors") {
    TempDir tmp;
    const auto abc = tmp.path("abc.bin");
    write_file(abc, "abc");
    CHECK(fnv1a_file(abc) == 0xe71fa2190541574bull);

    const auto empty = tmp.path("empty.bin");
    write_file(empty, "");
    CHECK(fnv1a_file(empty) == 0xcbf29ce484222325ull);  // offset basis

    // order-sensitive: transposed bytes hash differently
    const auto acb = tmp.path("acb.bin");
    write_file(acb, "acb");
    CHECK(fnv1a_file(acb) != fnv1a_file(abc));

    CHECK_THROWS_AS((void)fnv1a_file(tmp.path("absent.bin")), io_error);
}
