#ifndef VMDIFF_IMAGE_HPP
#define VMDIFF_IMAGE_HPP

#include <string>
#include <utility>
#include <vector>

#include "vmdiff/tensor.hpp"

namespace vmdiff {

// Square tiling of a padded canvas into non-overlapping patches, row-major.
struct PatchGrid {
    int side = 320;      // canvas edge in pixels
    int patch = 64;      // patch edge
    int per_side = 5;    // patches along one edge
    int count = 25;

    static PatchGrid for_canvas(int side, int patch = 64);
    // top-left corner of patch n, n in [0, count)
    std::pair<int, int> origin(int n) const;
};

// Mirror the borders (edge pixel not repeated) until the image is
// target x target. 256 -> 320 adds 32 pixels per side.
Image pad_reflect(const Image& img, int target);

std::vector<Image> extract_patches(const Image& padded, const PatchGrid& grid);

// Inverse of extract_patches followed by a center crop to crop x crop.
Image stitch_patches(const std::vector<Image>& patches, const PatchGrid& grid,
                     int crop);

enum class MaskKind { random, block, text };

struct MaskSpec {
    MaskKind kind = MaskKind::random;
    double fraction = 0.0;        // random: probability a pixel is missing
    int x = 0, y = 0, w = 0, h = 0;  // block rectangle
    std::string path;             // text: raster file, dark pixels = missing
};

Mask gen_mask(const MaskSpec& spec, int rows, int cols, uint64_t seed);

// y = D x + e with D the pixel mask (all channels alike). Missing pixels are
// exactly zero; optional Gaussian noise of std noise_sigma lands on the known
// pixels and the result is clipped back to [0,1].
Image apply_degradation(const Image& x, const Mask& mask,
                        double noise_sigma = 0.0, uint64_t seed = 0);

// 10*log10(peak^2 / MSE); returns +infinity when the images are identical.
double psnr(const Image& x, const Image& ref, double peak = 1.0);

// Mean local structural similarity: 11x11 Gaussian window (sigma 1.5),
// c1=(0.01)^2, c2=(0.03)^2, valid windows only, channels averaged.
double ssim(const Image& x, const Image& ref);

}  // namespace vmdiff

#endif
