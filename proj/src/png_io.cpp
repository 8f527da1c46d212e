#include "vmdiff/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace vmdiff {

namespace {

constexpr int kMaxSide = 1 << 14;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Raw 8-bit RGB rows out of any PNG colour type.
std::vector<uint8_t> read_rgb8(const std::string& path, int& rows, int& cols) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw io_error("cannot open " + path);
    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw io_error("not a PNG file: " + path);

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw io_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("PNG decode failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    rows = static_cast<int>(png_get_image_height(png, info));
    cols = static_cast<int>(png_get_image_width(png, info));
    if (rows <= 0 || cols <= 0 || rows > kMaxSide || cols > kMaxSide) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("PNG dimensions unsupported: " + path);
    }
    const png_byte color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    std::vector<uint8_t> buf(static_cast<size_t>(rows) * cols * 3);
    std::vector<png_bytep> rp(rows);
    for (int r = 0; r < rows; ++r)
        rp[r] = buf.data() + static_cast<size_t>(r) * cols * 3;
    png_read_image(png, rp.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return buf;
}

void write_png(const std::string& path, const uint8_t* data, int rows,
               int cols, int channels) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw io_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw io_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("PNG encode failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, cols, rows, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rp(rows);
    for (int r = 0; r < rows; ++r)
        rp[r] = const_cast<png_bytep>(data + static_cast<size_t>(r) * cols *
                                                 channels);
    png_write_image(png, rp.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

uint8_t quantize(double v) {
    v = std::min(1.0, std::max(0.0, v));
    return static_cast<uint8_t>(std::floor(v * 255.0 + 0.5));
}

}  // namespace

Image load_png(const std::string& path) {
    int rows = 0, cols = 0;
    const auto buf = read_rgb8(path, rows, cols);
    Image img(rows, cols, 3);
    for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0;
    return img;
}

void save_png(const Image& img, const std::string& path) {
    require(img.channels == 3, "save_png: need 3 channels");
    require(img.rows > 0 && img.cols > 0, "save_png: empty image");
    std::vector<uint8_t> buf(img.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = quantize(img.data[i]);
    write_png(path, buf.data(), img.rows, img.cols, 3);
}

Mask load_mask_png(const std::string& path) {
    int rows = 0, cols = 0;
    const auto buf = read_rgb8(path, rows, cols);
    Mask m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m.at(r, c) =
                buf[(static_cast<size_t>(r) * cols + c) * 3] > 127 ? 1 : 0;
    return m;
}

void save_mask_png(const Mask& mask, const std::string& path) {
    require(mask.rows > 0 && mask.cols > 0, "save_mask_png: empty mask");
    std::vector<uint8_t> buf(mask.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = mask.data[i] ? 255 : 0;
    write_png(path, buf.data(), mask.rows, mask.cols, 1);
}

}  // namespace vmdiff
