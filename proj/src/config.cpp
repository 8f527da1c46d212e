#include "vmdiff/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vmdiff/png_io.hpp"

namespace vmdiff {

NoiseSchedule AppConfig::schedule() const {
    NoiseSchedule s{sigma_min, sigma_max, steps};
    s.validate();
    return s;
}

TrainConfig AppConfig::train_config() const {
    TrainConfig t;
    t.sched = schedule();
    t.steps = train_steps;
    t.crop = crop;
    t.lr = lr;
    t.xi = perturb_ratio;
    t.features = features;
    t.stages = net_stages;
    t.seed = seed;
    t.checkpoint_every = checkpoint_every;
    return t;
}

InpaintConfig AppConfig::inpaint_config() const {
    InpaintConfig c;
    c.sched = schedule();
    c.sampler = SamplerConfig{corrector_steps, snr, seed};
    c.xi = perturb_ratio;
    c.tau = fusion_temp;
    c.rank = rank;
    c.mu = mu;
    c.admm_iters = admm_iters;
    c.dc = DcConfig{lambda, noiseless};
    c.seed = seed;
    return c;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const uint64_t u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> AppConfig::kv_pairs() const {
    return {
        {"sigma_min", fmt_double(sigma_min)},
        {"sigma_max", fmt_double(sigma_max)},
        {"steps", std::to_string(steps)},
        {"corrector_steps", std::to_string(corrector_steps)},
        {"snr", fmt_double(snr)},
        {"perturb_ratio", fmt_double(perturb_ratio)},
        {"fusion_temp", fmt_double(fusion_temp)},
        {"rank", std::to_string(rank)},
        {"mu", fmt_double(mu)},
        {"admm_iters", std::to_string(admm_iters)},
        {"lambda", fmt_double(lambda)},
        {"noiseless", noiseless ? "true" : "false"},
        {"train_steps", std::to_string(train_steps)},
        {"crop", std::to_string(crop)},
        {"lr", fmt_double(lr)},
        {"checkpoint_every", std::to_string(checkpoint_every)},
        {"features", std::to_string(features)},
        {"net_stages", std::to_string(net_stages)},
        {"seed", std::to_string(seed)},
    };
}

void apply_kv(AppConfig& cfg, const std::string& key,
              const std::string& value) {
    if (key == "sigma_min") cfg.sigma_min = to_double(key, value);
    else if (key == "sigma_max") cfg.sigma_max = to_double(key, value);
    else if (key == "steps") cfg.steps = to_int(key, value);
    else if (key == "corrector_steps") cfg.corrector_steps = to_int(key, value);
    else if (key == "snr") cfg.snr = to_double(key, value);
    else if (key == "perturb_ratio") cfg.perturb_ratio = to_double(key, value);
    else if (key == "fusion_temp") cfg.fusion_temp = to_double(key, value);
    else if (key == "rank") cfg.rank = to_int(key, value);
    else if (key == "mu") cfg.mu = to_double(key, value);
    else if (key == "admm_iters") cfg.admm_iters = to_int(key, value);
    else if (key == "lambda") cfg.lambda = to_double(key, value);
    else if (key == "noiseless") cfg.noiseless = to_bool(key, value);
    else if (key == "train_steps") cfg.train_steps = to_int(key, value);
    else if (key == "crop") cfg.crop = to_int(key, value);
    else if (key == "lr") cfg.lr = to_double(key, value);
    else if (key == "checkpoint_every") cfg.checkpoint_every = to_int(key, value);
    else if (key == "features") cfg.features = to_int(key, value);
    else if (key == "net_stages") cfg.net_stages = to_int(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else throw std::invalid_argument("config: unknown key: " + key);
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config " + path);
    AppConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' on line " +
                                        std::to_string(lineno));
        apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

MaskSpec parse_mask_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("mask spec: expected kind:params, got " +
                                    spec);
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    MaskSpec m;
    if (kind == "random") {
        m.kind = MaskKind::random;
        m.fraction = to_double("mask fraction", rest);
    } else if (kind == "block") {
        m.kind = MaskKind::block;
        std::istringstream is(rest);
        char c1, c2, c3;
        if (!(is >> m.x >> c1 >> m.y >> c2 >> m.w >> c3 >> m.h) || c1 != ',' ||
            c2 != ',' || c3 != ',' || !(is >> std::ws).eof())
            throw std::invalid_argument("mask spec: bad block rectangle: " +
                                        rest);
    } else if (kind == "text") {
        m.kind = MaskKind::text;
        m.path = rest;
        if (m.path.empty())
            throw std::invalid_argument("mask spec: empty text path");
    } else {
        throw std::invalid_argument("mask spec: unknown kind: " + kind);
    }
    return m;
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

}  // namespace vmdiff
