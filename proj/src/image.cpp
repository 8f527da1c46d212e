#include "vmdiff/image.hpp"

#include <cmath>
#include <limits>

#include "vmdiff/kernels.hpp"

namespace vmdiff {

PatchGrid PatchGrid::for_canvas(int side, int patch) {
    require(patch > 0 && side > 0, "PatchGrid: non-positive size");
    require(side % patch == 0, "PatchGrid: canvas not divisible by patch");
    PatchGrid g;
    g.side = side;
    g.patch = patch;
    g.per_side = side / patch;
    g.count = g.per_side * g.per_side;
    return g;
}

std::pair<int, int> PatchGrid::origin(int n) const {
    require(n >= 0 && n < count, "PatchGrid: patch index out of range");
    return {(n / per_side) * patch, (n % per_side) * patch};
}

namespace {
// reflect i into [0, n) without repeating the edge sample
int mirror(int i, int n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    return i;
}
}  // namespace

Image pad_reflect(const Image& img, int target) {
    require(img.rows > 0 && img.cols > 0, "pad_reflect: empty image");
    require(target >= img.rows && target >= img.cols,
            "pad_reflect: target smaller than image");
    const int top = (target - img.rows) / 2;
    const int left = (target - img.cols) / 2;
    const int bottom = target - img.rows - top;
    const int right = target - img.cols - left;
    require(std::max(top, bottom) <= img.rows - 1 &&
                std::max(left, right) <= img.cols - 1,
            "pad_reflect: padding exceeds mirrorable extent");
    if (target == img.rows && target == img.cols) return img;
    Image out(target, target, img.channels);
    for (int r = 0; r < target; ++r) {
        const int sr = mirror(r - top, img.rows);
        for (int c = 0; c < target; ++c) {
            const int sc = mirror(c - left, img.cols);
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(sr, sc, ch);
        }
    }
    return out;
}

std::vector<Image> extract_patches(const Image& padded, const PatchGrid& grid) {
    require(padded.rows == grid.side && padded.cols == grid.side,
            "extract_patches: image does not match grid");
    std::vector<Image> patches;
    patches.reserve(grid.count);
    for (int n = 0; n < grid.count; ++n) {
        auto [r0, c0] = grid.origin(n);
        Image p(grid.patch, grid.patch, padded.channels);
        for (int r = 0; r < grid.patch; ++r)
            for (int c = 0; c < grid.patch; ++c)
                for (int ch = 0; ch < padded.channels; ++ch)
                    p.at(r, c, ch) = padded.at(r0 + r, c0 + c, ch);
        patches.push_back(std::move(p));
    }
    return patches;
}

Image stitch_patches(const std::vector<Image>& patches, const PatchGrid& grid,
                     int crop) {
    require(static_cast<int>(patches.size()) == grid.count,
            "stitch_patches: wrong patch count");
    require(crop > 0 && crop <= grid.side, "stitch_patches: bad crop");
    const int ch = patches[0].channels;
    for (const auto& p : patches)
        require(p.rows == grid.patch && p.cols == grid.patch &&
                    p.channels == ch,
                "stitch_patches: wrong patch shape");
    Image canvas(grid.side, grid.side, ch);
    for (int n = 0; n < grid.count; ++n) {
        auto [r0, c0] = grid.origin(n);
        for (int r = 0; r < grid.patch; ++r)
            for (int c = 0; c < grid.patch; ++c)
                for (int k = 0; k < ch; ++k)
                    canvas.at(r0 + r, c0 + c, k) = patches[n].at(r, c, k);
    }
    if (crop == grid.side) return canvas;
    const int off = (grid.side - crop) / 2;
    Image out(crop, crop, ch);
    for (int r = 0; r < crop; ++r)
        for (int c = 0; c < crop; ++c)
            for (int k = 0; k < ch; ++k)
                out.at(r, c, k) = canvas.at(off + r, off + c, k);
    return out;
}

Mask load_mask_png(const std::string& path);  // png_io.cpp

Mask gen_mask(const MaskSpec& spec, int rows, int cols, uint64_t seed) {
    require(rows > 0 && cols > 0, "gen_mask: empty mask");
    switch (spec.kind) {
        case MaskKind::random: {
            require(spec.fraction >= 0.0 && spec.fraction <= 1.0,
                    "gen_mask: fraction outside [0,1]");
            Mask m(rows, cols);
            Rng rng(seed);
            for (auto& v : m.data)
                v = rng.uniform() < spec.fraction ? 0 : 1;
            return m;
        }
        case MaskKind::block: {
            require(spec.w >= 0 && spec.h >= 0, "gen_mask: negative block");
            require(spec.x >= 0 && spec.y >= 0 && spec.x + spec.w <= cols &&
                        spec.y + spec.h <= rows,
                    "gen_mask: block outside image");
            Mask m(rows, cols);
            for (int r = spec.y; r < spec.y + spec.h; ++r)
                for (int c = spec.x; c < spec.x + spec.w; ++c) m.at(r, c) = 0;
            return m;
        }
        case MaskKind::text: {
            Mask m = load_mask_png(spec.path);
            require(m.rows == rows && m.cols == cols,
                    "gen_mask: text raster size mismatch");
            return m;
        }
    }
    throw std::invalid_argument("gen_mask: unknown kind");
}

Image apply_degradation(const Image& x, const Mask& mask, double noise_sigma,
                        uint64_t seed) {
    require(x.rows == mask.rows && x.cols == mask.cols,
            "apply_degradation: shape mismatch");
    require(noise_sigma >= 0.0, "apply_degradation: negative noise");
    Image y(x.rows, x.cols, x.channels);
    Rng rng(seed);
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < x.cols; ++c) {
            if (!mask.at(r, c)) continue;  // missing stays exactly 0
            for (int ch = 0; ch < x.channels; ++ch) {
                double v = x.at(r, c, ch);
                if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
                y.at(r, c, ch) = std::min(1.0, std::max(0.0, v));
            }
        }
    return y;
}

double psnr(const Image& x, const Image& ref, double peak) {
    require(x.same_shape(ref), "psnr: shape mismatch");
    require(peak > 0.0, "psnr: non-positive peak");
    require(!x.data.empty(), "psnr: empty image");
    std::vector<double> diff(x.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = x.data[i] - ref.data[i];
    const double mse =
        kernels::sum_squares(diff.data(), diff.size()) / diff.size();
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& x, const Image& ref) {
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01, kC2 = 0.03 * 0.03;
    require(x.same_shape(ref), "ssim: shape mismatch");
    require(x.rows >= kWin && x.cols >= kWin, "ssim: image smaller than window");
    double win[kWin * kWin];
    double total = 0.0;
    for (int r = 0; r < kWin; ++r)
        for (int c = 0; c < kWin; ++c) {
            const double dr = r - kWin / 2, dc = c - kWin / 2;
            win[r * kWin + c] =
                std::exp(-(dr * dr + dc * dc) / (2 * kSigma * kSigma));
            total += win[r * kWin + c];
        }
    for (double& v : win) v /= total;
    return kernels::ssim_windows(x.data.data(), ref.data.data(), x.rows,
                                 x.cols, x.channels, win, kWin, kC1, kC2);
}

}  // namespace vmdiff
