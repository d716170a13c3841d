#include "salbench/image_io.hpp"

#include <png.h>
#include <jpeglib.h>

#include <array>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "salbench/errors.hpp"

namespace salbench::io {

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

Image8 decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw IoError(name + ": " + img.message);
    }
    const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
    img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    Image8 out{img.width, img.height, gray ? 1u : 3u, {}};
    out.pixels.resize(PNG_IMAGE_SIZE(img));
    // Alpha is composited over black; inputs are expected to be opaque.
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw IoError(name + ": " + msg);
    }
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

Image8 decode_jpeg(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager jerr;
    cinfo.err = jpeg_std_error(&jerr.base);
    jerr.base.error_exit = jpeg_error_exit;
    Image8 out;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError(name + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    out.width = cinfo.output_width;
    out.height = cinfo.output_height;
    out.channels = static_cast<std::size_t>(cinfo.output_components);
    out.pixels.resize(out.width * out.height * out.channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.pixels.data() + std::size_t{cinfo.output_scanline} * out.width * out.channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::uint32_t{b[at]} | std::uint32_t{b[at + 1]} << 8 | std::uint32_t{b[at + 2]} << 16 |
           std::uint32_t{b[at + 3]} << 24;
}
std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

Image8 decode_bmp(const std::vector<std::uint8_t>& b, const std::string& name) {
    if (b.size() < 54) throw IoError(name + ": truncated BMP header");
    const std::uint32_t offset = le32(b, 10);
    const auto width = static_cast<std::int32_t>(le32(b, 18));
    const auto height = static_cast<std::int32_t>(le32(b, 22));
    const std::uint16_t bpp = le16(b, 28);
    const std::uint32_t compression = le32(b, 30);
    if ((bpp != 24 && bpp != 32) || (compression != 0 && compression != 3) || width <= 0 || height == 0) {
        throw IoError(name + ": only uncompressed 24/32-bit BMP is supported");
    }
    const bool bottom_up = height > 0;
    Image8 out{static_cast<std::size_t>(width), static_cast<std::size_t>(bottom_up ? height : -height), 3, {}};
    const std::size_t bytes_pp = bpp / 8;
    const std::size_t stride = (out.width * bytes_pp + 3) & ~std::size_t{3};
    if (offset + stride * out.height > b.size()) throw IoError(name + ": truncated BMP pixel data");
    out.pixels.resize(out.width * out.height * 3);
    for (std::size_t y = 0; y < out.height; ++y) {
        const std::size_t src_row = bottom_up ? out.height - 1 - y : y;
        const std::uint8_t* src = b.data() + offset + src_row * stride;
        for (std::size_t x = 0; x < out.width; ++x) {
            std::uint8_t* dst = out.pixels.data() + (y * out.width + x) * 3;
            dst[0] = src[x * bytes_pp + 2];
            dst[1] = src[x * bytes_pp + 1];
            dst[2] = src[x * bytes_pp + 0];
        }
    }
    return out;
}

Image8 decode_pgm(const std::vector<std::uint8_t>& b, const std::string& name) {
    std::size_t pos = 2;
    auto next_int = [&]() -> std::size_t {
        while (pos < b.size()) {
            if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else if (std::isspace(b[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        std::size_t v = 0;
        bool any = false;
        while (pos < b.size() && std::isdigit(b[pos])) {
            v = v * 10 + static_cast<std::size_t>(b[pos++] - '0');
            any = true;
        }
        if (!any) throw IoError(name + ": malformed PGM header");
        return v;
    };
    Image8 out;
    out.width = next_int();
    out.height = next_int();
    out.channels = 1;
    if (next_int() != 255) throw IoError(name + ": only 8-bit PGM is supported");
    ++pos;
    if (pos + out.width * out.height > b.size()) throw IoError(name + ": truncated PGM");
    out.pixels.assign(b.begin() + static_cast<std::ptrdiff_t>(pos),
                      b.begin() + static_cast<std::ptrdiff_t>(pos + out.width * out.height));
    return out;
}

}  // namespace

Image8 read_image8(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    const std::string name = path.string();
    static constexpr std::array<std::uint8_t, 8> kPng = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(kPng.begin(), kPng.end(), bytes.begin())) return decode_png(bytes, name);
    if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) return decode_jpeg(bytes, name);
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes, name);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, name);
    throw IoError(name + ": unrecognized image format");
}

imaging::RasterImage read_srgb_image(const std::filesystem::path& path) {
    const Image8 img = read_image8(path);
    std::vector<double> data(img.width * img.height * 3);
    for (std::size_t i = 0; i < img.width * img.height; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::uint8_t v = img.channels == 1 ? img.pixels[i] : img.pixels[i * 3 + c];
            data[i * 3 + c] = v / 255.0;
        }
    }
    return imaging::RasterImage(img.width, img.height, 3, imaging::Encoding::SrgbGamma, std::move(data));
}

std::vector<std::uint8_t> encode_png(const Image8& image) {
    if (image.channels != 1 && image.channels != 3) throw IoError("encode_png: channels must be 1 or 3");
    if (image.pixels.size() != image.width * image.height * image.channels) {
        throw IoError("encode_png: pixel buffer size mismatch");
    }
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
        throw IoError(std::string("encode_png: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
        throw IoError(std::string("encode_png: ") + img.message);
    }
    out.resize(size);
    return out;
}

void write_png(const std::filesystem::path& path, const Image8& image) { spill(path, encode_png(image)); }

void write_pgm(const std::filesystem::path& path, const Image8& image) {
    if (image.channels != 1) throw IoError("write_pgm: PGM export needs a 1-channel image");
    const std::string header =
        "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
    spill(path, bytes);
}

}  // namespace salbench::io
