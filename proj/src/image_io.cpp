#include "otx/image_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>

#include "otx/errors.hpp"

#ifdef OTX_HAVE_PNG
#include <png.h>
#endif

namespace otx::io {

namespace {

// Skips whitespace and '#' comments between header tokens.
int next_header_int(std::istream& in, const std::string& name) {
    while (true) {
        int c = in.peek();
        if (c == EOF) throw io_error(name + ": truncated netpbm header");
        if (std::isspace(c)) {
            in.get();
        } else if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
    }
    int v = 0;
    if (!(in >> v)) throw io_error(name + ": bad netpbm header");
    return v;
}

}  // namespace

std::optional<ColorImage> read_netpbm(std::istream& in, const std::string& name) {
    // Allow inter-frame whitespace in concatenated streams.
    int c = in.peek();
    while (c != EOF && std::isspace(c)) {
        in.get();
        c = in.peek();
    }
    if (c == EOF) return std::nullopt;

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P') throw io_error(name + ": not a netpbm image");
    int kind = magic[1] - '0';
    if (kind != 2 && kind != 3 && kind != 5 && kind != 6)
        throw io_error(name + ": unsupported netpbm type P" + std::string(1, magic[1]));

    int w = next_header_int(in, name);
    int h = next_header_int(in, name);
    int maxval = next_header_int(in, name);
    if (w <= 0 || h <= 0) throw io_error(name + ": bad dimensions");
    if (maxval <= 0 || maxval > 255) throw io_error(name + ": unsupported maxval");

    bool color = (kind == 3 || kind == 6);
    std::size_t samples = static_cast<std::size_t>(w) * h * (color ? 3 : 1);
    std::vector<std::uint8_t> data(samples);

    if (kind == 5 || kind == 6) {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(samples));
        if (static_cast<std::size_t>(in.gcount()) != samples)
            throw io_error(name + ": truncated pixel data");
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            int v;
            if (!(in >> v)) throw io_error(name + ": truncated ascii pixel data");
            if (v < 0 || v > maxval) throw io_error(name + ": sample out of range");
            data[i] = static_cast<std::uint8_t>(v);
        }
    }

    if (maxval != 255)
        for (auto& v : data) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);

    ColorImage img(w, h);
    if (color) {
        img.rgb = std::move(data);
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) {
            img.rgb[3 * i] = img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = data[i];
        }
    }
    return img;
}

ColorImage read_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".png") return read_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot open " + path.string());
        auto img = read_netpbm(in, path.string());
        if (!img) throw io_error(path.string() + ": empty file");
        return std::move(*img);
    }
    throw io_error("unsupported image format: " + path.string());
}

void write_ppm(const std::filesystem::path& path, const ColorImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw io_error("write failed: " + path.string());
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& gray) {
    if (gray.size() != static_cast<std::size_t>(width) * height)
        throw io_error("pgm write: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
    if (!out) throw io_error("write failed: " + path.string());
}

void write_pgm_scaled(const std::filesystem::path& path, int width, int height,
                      const std::vector<float>& values) {
    std::vector<std::uint8_t> bytes(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        float v = values[i];
        if (v < 0.f) v = 0.f;
        if (v > 1.f) v = 1.f;
        bytes[i] = static_cast<std::uint8_t>(v * 255.f + 0.5f);
    }
    write_pgm(path, width, height, bytes);
}

std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    auto img = read_netpbm(in, path.string());
    if (!img) throw io_error(path.string() + ": empty file");
    width = img->width;
    height = img->height;
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = img->rgb[3 * i];
    return gray;
}

ColorImage read_pgm_as_color(const std::filesystem::path& path) { return read_image(path); }

#ifdef OTX_HAVE_PNG

bool png_supported() { return true; }

ColorImage read_png(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw io_error("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (fp) std::fclose(fp);
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("png init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("png decode failed: " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int ctype = png_get_color_type(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (ctype == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (ctype == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (ctype == PNG_COLOR_TYPE_GRAY || ctype == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    ColorImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.px(0, static_cast<int>(y));
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

void write_png(const std::filesystem::path& path, const ColorImage& img) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw io_error("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (fp) std::fclose(fp);
        if (png) png_destroy_write_struct(&png, &info);
        throw io_error("png init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("png encode failed: " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.px(0, y));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

#else

bool png_supported() { return false; }

ColorImage read_png(const std::filesystem::path& path) {
    throw io_error("PNG support not built: " + path.string());
}

void write_png(const std::filesystem::path& path, const ColorImage&) {
    throw io_error("PNG support not built: " + path.string());
}

#endif

}  // namespace otx::io
