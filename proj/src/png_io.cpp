#include "colorsail/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>

#include "colorsail/error.hpp"

namespace colorsail::png {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const
    {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw IoError("cannot open " + path.string());
    return f;
}

void write_image(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
                 const std::vector<std::vector<png_byte>>& rows)
{
    if (width < 1 || height < 1)
        throw InvalidArgument("cannot write an empty PNG");
    FilePtr f = open(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing " + path.string());
    }
    png_init_io(png, f.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& row : rows)
        png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Image read(const std::filesystem::path& path)
{
    FilePtr f = open(path, "rb");
    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IoError(path.string() + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    Image img;
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG: " + path.string());
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.bit_depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    rows.assign(static_cast<std::size_t>(img.height), std::vector<png_byte>(rowbytes));
    std::vector<png_bytep> ptrs;
    for (auto& r : rows)
        ptrs.push_back(r.data());
    png_read_image(png, ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    // Gray+alpha is widened to RGBA so callers only see 1, 3 or 4 channels.
    const bool gray_alpha = channels == 2;
    img.channels = gray_alpha ? 4 : channels;
    img.samples.reserve(static_cast<std::size_t>(img.width) * img.height * img.channels);
    for (const auto& r : rows) {
        for (int x = 0; x < img.width; ++x) {
            auto sample = [&](int c) -> std::uint16_t {
                const std::size_t k = static_cast<std::size_t>(x) * channels + c;
                if (img.bit_depth == 16)
                    return static_cast<std::uint16_t>((r[2 * k] << 8) | r[2 * k + 1]);
                return r[k];
            };
            if (gray_alpha) {
                const auto g = sample(0);
                img.samples.insert(img.samples.end(), {g, g, g, sample(1)});
            } else {
                for (int c = 0; c < channels; ++c)
                    img.samples.push_back(sample(c));
            }
        }
    }
    return img;
}

Raster read_rgb(const std::filesystem::path& path)
{
    const Image img = read(path);
    const double scale = img.bit_depth == 16 ? 65535.0 : 255.0;
    Raster out(img.width, img.height);
    for (std::size_t p = 0; p < out.size(); ++p) {
        const std::size_t base = p * img.channels;
        if (img.channels == 1) {
            const double g = img.samples[base] / scale;
            out.pixels[p] = {g, g, g};
        } else {
            out.pixels[p] = {img.samples[base] / scale, img.samples[base + 1] / scale, img.samples[base + 2] / scale};
        }
    }
    return out;
}

void write_rgb8(const std::filesystem::path& path, const Raster& raster)
{
    const auto bytes = to_rgb8(raster);
    std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(raster.height));
    const std::size_t stride = static_cast<std::size_t>(raster.width) * 3;
    for (int y = 0; y < raster.height; ++y)
        rows[y].assign(bytes.begin() + y * stride, bytes.begin() + (y + 1) * stride);
    write_image(path, raster.width, raster.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

void write_rgba8(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgba)
{
    if (rgba.size() != static_cast<std::size_t>(width) * height * 4)
        throw InvalidArgument("RGBA buffer size mismatch");
    std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(height));
    const std::size_t stride = static_cast<std::size_t>(width) * 4;
    for (int y = 0; y < height; ++y)
        rows[y].assign(rgba.begin() + y * stride, rgba.begin() + (y + 1) * stride);
    write_image(path, width, height, PNG_COLOR_TYPE_RGBA, 8, rows);
}

void write_gray8(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& values)
{
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw InvalidArgument("gray buffer size mismatch");
    std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[y].assign(values.begin() + static_cast<std::ptrdiff_t>(y) * width,
                       values.begin() + static_cast<std::ptrdiff_t>(y + 1) * width);
    write_image(path, width, height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

void write_gray16(const std::filesystem::path& path, int width, int height, const std::vector<std::uint16_t>& values)
{
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw InvalidArgument("gray16 buffer size mismatch");
    std::vector<std::vector<png_byte>> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        auto& row = rows[y];
        row.resize(static_cast<std::size_t>(width) * 2);
        for (int x = 0; x < width; ++x) {
            const std::uint16_t v = values[static_cast<std::size_t>(y) * width + x];
            row[2 * x] = static_cast<png_byte>(v >> 8);
            row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
        }
    }
    write_image(path, width, height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

} // namespace colorsail::png
