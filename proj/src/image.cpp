#include "consentscan/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace consentscan {

std::string to_hex(Rgb c)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb parse_hex_color(const std::string& text)
{
    auto nibble = [&](char ch) -> int {
        if (ch >= '0' && ch <= '9') return ch - '0';
        if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
        if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
        throw ImageError("bad hex color: " + text);
    };
    if (text.size() == 7 && text[0] == '#') {
        return {static_cast<std::uint8_t>(nibble(text[1]) * 16 + nibble(text[2])),
                static_cast<std::uint8_t>(nibble(text[3]) * 16 + nibble(text[4])),
                static_cast<std::uint8_t>(nibble(text[5]) * 16 + nibble(text[6]))};
    }
    if (text.size() == 4 && text[0] == '#') {
        return {static_cast<std::uint8_t>(nibble(text[1]) * 17), static_cast<std::uint8_t>(nibble(text[2]) * 17),
                static_cast<std::uint8_t>(nibble(text[3]) * 17)};
    }
    throw ImageError("bad hex color: " + text);
}

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw ImageError("negative image dimensions");
    }
    data_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

PixelRect RgbImage::clip(const PixelRect& r) const
{
    const int l = std::max(r.x, 0);
    const int t = std::max(r.y, 0);
    const int rr = std::min(r.x + r.w, width_);
    const int b = std::min(r.y + r.h, height_);
    if (rr <= l || b <= t) {
        return {l, t, 0, 0};
    }
    return {l, t, rr - l, b - t};
}

void RgbImage::fill_rect(const PixelRect& r, Rgb c)
{
    const auto c2 = clip(r);
    for (int y = c2.y; y < c2.y + c2.h; ++y) {
        for (int x = c2.x; x < c2.x + c2.w; ++x) {
            set(x, y, c);
        }
    }
}

std::uint8_t luma(Rgb c)
{
    // Integer form of round(0.299 R + 0.587 G + 0.114 B): exact, no float drift at .5 boundaries.
    const int scaled = 299 * c.r + 587 * c.g + 114 * c.b;
    return static_cast<std::uint8_t>((scaled + 500) / 1000);
}

GrayImage to_grayscale(const RgbImage& image)
{
    GrayImage out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.set(x, y, luma(image.at(x, y)));
        }
    }
    return out;
}

namespace {

RgbImage finish_read(png_image& img)
{
    img.format = PNG_FORMAT_RGB;
    RgbImage out(static_cast<int>(img.width), static_cast<int>(img.height));
    if (png_image_finish_read(&img, nullptr, out.bytes().data(), 0, nullptr) == 0) {
        std::string msg = img.message;
        png_image_free(&img);
        throw ImageError("png decode failed: " + msg);
    }
    return out;
}

} // namespace

RgbImage decode_png(std::span<const std::uint8_t> bytes)
{
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()) == 0) {
        throw ImageError(std::string("png header invalid: ") + img.message);
    }
    return finish_read(img);
}

std::vector<std::uint8_t> encode_png(const RgbImage& image)
{
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&img, nullptr, &size, 0, image.bytes().data(), 0, nullptr) == 0) {
        throw ImageError(std::string("png size query failed: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (png_image_write_to_memory(&img, out.data(), &size, 0, image.bytes().data(), 0, nullptr) == 0) {
        throw ImageError(std::string("png encode failed: ") + img.message);
    }
    out.resize(size);
    return out;
}

RgbImage read_png(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

void write_png(const std::filesystem::path& path, const RgbImage& image)
{
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ImageError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ImageError("short write to " + path.string());
    }
}

} // namespace consentscan
