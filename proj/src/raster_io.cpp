#include "vecraster/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>

namespace vecraster {

namespace {

void check_dimensions(int w, int h) {
    if (w < kMinSide || h < kMinSide || w > kMaxSide || h > kMaxSide) {
        throw DimensionError("image dimensions " + std::to_string(w) + "x" +
                             std::to_string(h) + " outside supported range [" +
                             std::to_string(kMinSide) + ", " +
                             std::to_string(kMaxSide) + "]");
    }
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------- PNG --

RasterImage load_png(const std::string& path, std::FILE* fp) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("failed to decode PNG: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);

    if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA ||
        color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
        png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("PNG with alpha is not supported: " + path);
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("palette PNG is not supported: " + path);
    }
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG color type: " + path);
    }
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG bit depth (want 8 or 16): " + path);
    }

    RasterImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
    try {
        check_dimensions(img.width, img.height);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    img.data.resize(static_cast<std::size_t>(img.width) * img.height *
                    img.channels);

    const std::size_t stride =
        static_cast<std::size_t>(img.width) * img.channels * (bit_depth / 8);
    std::vector<png_byte> raw(stride * img.height);
    row_ptrs.resize(img.height);
    for (int y = 0; y < img.height; ++y) row_ptrs[y] = raw.data() + stride * y;
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t samples = img.data.size();
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < samples; ++i) {
            img.data[i] = static_cast<double>(raw[i]);
        }
    } else {  // big-endian 16-bit, rescaled onto [0, 255]
        for (std::size_t i = 0; i < samples; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            img.data[i] = static_cast<double>(v) * 255.0 / 65535.0;
        }
    }
    return img;
}

// ----------------------------------------------------------- PPM/PGM --

int read_pnm_token(std::FILE* fp) {
    // Skips whitespace and '#' comments, then reads a decimal value.
    int c = std::fgetc(fp);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(fp);
        } else if (!std::isspace(c)) {
            break;
        }
        c = std::fgetc(fp);
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<int>::max()) return -1;
        c = std::fgetc(fp);
    }
    if (c != EOF && !std::isspace(c)) return -1;
    return static_cast<int>(value);
}

RasterImage load_pnm(const std::string& path, std::FILE* fp, int channels) {
    const int w = read_pnm_token(fp);
    const int h = read_pnm_token(fp);
    const int maxval = read_pnm_token(fp);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval >= 65536) {
        throw FormatError("malformed PNM header: " + path);
    }
    check_dimensions(w, h);

    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    const std::size_t samples =
        static_cast<std::size_t>(w) * h * channels;
    img.data.resize(samples);

    const int bytes_per = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(samples * bytes_per);
    if (std::fread(raw.data(), 1, raw.size(), fp) != raw.size()) {
        throw FormatError("truncated PNM pixel data: " + path);
    }
    const double scale = 255.0 / maxval;
    if (bytes_per == 1) {
        for (std::size_t i = 0; i < samples; ++i) {
            img.data[i] = static_cast<double>(raw[i]) * scale;
        }
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            const unsigned v =
                (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            img.data[i] = static_cast<double>(v) * scale;
        }
    }
    return img;
}

}  // namespace

RasterImage load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    unsigned char magic[8] = {};
    const std::size_t got = std::fread(magic, 1, sizeof magic, fp.get());
    std::rewind(fp.get());
    if (got >= 8 && !png_sig_cmp(magic, 0, 8)) {
        return load_png(path, fp.get());
    }
    if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        std::fseek(fp.get(), 2, SEEK_SET);
        return load_pnm(path, fp.get(), magic[1] == '5' ? 1 : 3);
    }
    throw FormatError("unrecognized image format (expect PNG, P5 PGM or P6 PPM): " +
                      path);
}

namespace {

unsigned char to_byte(double v) {
    const double r = std::floor(v + 0.5);  // round half up
    return static_cast<unsigned char>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

void save_ppm(const RasterImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os << (img.channels == 1 ? "P5" : "P6") << '\n'
       << img.width << ' ' << img.height << '\n'
       << 255 << '\n';
    std::vector<unsigned char> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(img.data[i]);
    os.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size()));
    if (!os) throw IoError("short write: " + path);
}

void save_png(const RasterImage& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(img.data[i]);
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) {
        png_write_row(png, raw.data() + stride * y);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageStats compute_stats(const RasterImage& img) {
    ImageStats s;
    s.total_area = static_cast<double>(img.width) * img.height;
    for (int c = 0; c < img.channels; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const double v = img.at(x, y, c);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        s.oscillation_sq += (hi - lo) * (hi - lo);
    }
    return s;
}

RasterImage box_prefilter(const RasterImage& img) {
    RasterImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sx = std::clamp(x + dx, 0, img.width - 1);
                        const int sy = std::clamp(y + dy, 0, img.height - 1);
                        acc += img.at(sx, sy, c);
                    }
                }
                out.at(x, y, c) = acc / 9.0;
            }
        }
    }
    return out;
}

Partition initial_partition(const RasterImage& img) {
    check_dimensions(img.width, img.height);
    const int w = img.width;
    const int h = img.height;
    const int n = w * h;

    Partition p;
    p.width = w;
    p.height = h;
    p.channels = img.channels;
    p.regions.resize(n + 1);
    p.adjacency.resize(n + 1);
    p.parent.resize(n + 1);
    p.pixel_labels.resize(n);
    p.region_count = n;

    RegionStats& outer = p.regions[0];
    outer.alive = true;
    outer.area = 0.0;
    outer.perimeter = 2.0 * (w + h);
    p.parent[0] = 0;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int id = y * w + x + 1;
            p.parent[id] = id;
            p.pixel_labels[id - 1] = id;
            RegionStats& r = p.regions[id];
            r.alive = true;
            r.area = 1.0;
            r.perimeter = 4.0;
            for (int c = 0; c < img.channels; ++c) {
                const double v = img.at(x, y, c);
                r.color_sum[c] = v;
                r.color_sq_sum[c] = v * v;
            }

            auto& row = p.adjacency[id];
            // Sorted neighbor order: 0 (if border), up, left, right, down.
            double border = 0.0;
            if (x == 0) border += 1.0;
            if (x == w - 1) border += 1.0;
            if (y == 0) border += 1.0;
            if (y == h - 1) border += 1.0;
            if (border > 0.0) row.push_back({0, border});
            if (y > 0) row.push_back({id - w, 1.0});
            if (x > 0) row.push_back({id - 1, 1.0});
            if (x < w - 1) row.push_back({id + 1, 1.0});
            if (y < h - 1) row.push_back({id + w, 1.0});

            if (border > 0.0) {
                p.adjacency[0].push_back({id, border});
            }
        }
    }
    std::sort(p.adjacency[0].begin(), p.adjacency[0].end());
    return p;
}

}  // namespace vecraster
