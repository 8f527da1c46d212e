#ifndef VMDIFF_PNG_IO_HPP
#define VMDIFF_PNG_IO_HPP

#include <stdexcept>
#include <string>

#include "vmdiff/tensor.hpp"

namespace vmdiff {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 8-bit PNG in any colour type; grayscale/palette/alpha are coerced to RGB
// and intensities mapped linearly to [0,1].
Image load_png(const std::string& path);

// Clips to [0,1], quantizes with round-half-up, writes 8-bit RGB.
void save_png(const Image& img, const std::string& path);

// Binary mask raster: 0 = missing, 255 = known. Loading thresholds the first
// channel at 1/2; saving writes 8-bit grayscale.
Mask load_mask_png(const std::string& path);
void save_mask_png(const Mask& mask, const std::string& path);

}  // namespace vmdiff

#endif
