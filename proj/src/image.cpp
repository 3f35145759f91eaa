#include "anmin/image.hpp"

#include "anmin/error.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

namespace anmin {

namespace {

// Skips whitespace and '#' comments between PGM header tokens.
int read_pgm_int(std::istream& in) {
    int ch = in.peek();
    while (ch != EOF) {
        if (ch == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
        ch = in.peek();
    }
    int value = 0;
    if (!(in >> value)) throw DataError("malformed PGM header");
    return value;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) throw DataError(path.string() + " is not a PGM");
    const int w = read_pgm_int(in);
    const int h = read_pgm_int(in);
    const int maxval = read_pgm_int(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw DataError("bad PGM dimensions in " + path.string());

    GrayImage img(w, h);
    auto scale = [&](int v) { return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval); };
    if (magic[1] == '2') {
        for (auto& px : img.pixels) {
            int v = 0;
            if (!(in >> v) || v < 0 || v > maxval) throw DataError("bad PGM pixel in " + path.string());
            px = scale(v);
        }
        return img;
    }
    in.get();  // single whitespace after maxval
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.pixels.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw DataError("truncated PGM " + path.string());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
        img.pixels[i] = maxval == 255 ? static_cast<std::uint8_t>(v) : scale(v);
    }
    return img;
}

GrayImage read_png(const std::filesystem::path& path) {
    std::unique_ptr<FILE, decltype(&std::fclose)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!fp) throw DataError("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("libpng initialisation failed");
    }
    GrayImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("cannot decode PNG " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(img.width)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("unsupported PNG layout in " + path.string());
    }
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
    rows.resize(static_cast<std::size_t>(img.height));
    for (int r = 0; r < img.height; ++r) rows[static_cast<std::size_t>(r)] = &img.pixels[static_cast<std::size_t>(r) * img.width];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

GrayImage read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw DataError("cannot open " + path.string());
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), 8);
    probe.close();
    if (png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
    if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return read_pgm(path);
    throw DataError(path.string() + ": unsupported image format (expected PGM or PNG)");
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace anmin
