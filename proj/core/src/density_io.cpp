#include "salbench/density_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <string>

#include "salbench/errors.hpp"
#include "salbench/image_io.hpp"

namespace salbench::io {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";

}  // namespace

void write_npy(const std::filesystem::path& path, const fixmap::DensityMap& map) {
    std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + std::to_string(map.height()) +
                         ", " + std::to_string(map.width()) + "), }";
    const std::size_t unpadded = 6 + 2 + 2 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kMagic, 6);
    const char version[2] = {1, 0};
    out.write(version, 2);
    const auto len = static_cast<std::uint16_t>(header.size());
    const char len_le[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
    out.write(len_le, 2);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    const auto values = map.values();
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw IoError("short write to " + path.string());
}

fixmap::DensityMap read_npy(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const std::string name = path.string();
    if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0) throw IoError(name + ": not an NPY file");
    const auto major = static_cast<unsigned char>(bytes[6]);
    std::size_t header_len = 0;
    std::size_t offset = 0;
    if (major == 1) {
        header_len = static_cast<unsigned char>(bytes[8]) | static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8;
        offset = 10;
    } else if (major == 2 || major == 3) {
        if (bytes.size() < 12) throw IoError(name + ": truncated NPY header");
        for (int i = 0; i < 4; ++i) header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
        offset = 12;
    } else {
        throw IoError(name + ": unsupported NPY version");
    }
    if (offset + header_len > bytes.size()) throw IoError(name + ": truncated NPY header");
    const std::string header(bytes.data() + offset, header_len);
    offset += header_len;

    std::smatch m;
    static const std::regex descr_re(R"('descr'\s*:\s*'([<|=]?)(f[48])')");
    static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
    static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
    if (!std::regex_search(header, m, descr_re)) throw IoError(name + ": unsupported dtype (need <f8 or <f4)");
    const bool f4 = m[2] == "f4";
    if (!std::regex_search(header, m, order_re) || m[1] == "True") throw IoError(name + ": Fortran order not supported");
    if (!std::regex_search(header, m, shape_re)) throw IoError(name + ": missing shape");
    std::vector<std::size_t> dims;
    const std::string shape = m[1];
    static const std::regex num_re(R"(\d+)");
    for (auto it = std::sregex_iterator(shape.begin(), shape.end(), num_re); it != std::sregex_iterator(); ++it) {
        dims.push_back(std::stoul(it->str()));
    }
    std::size_t h = 0, w = 0;
    if (dims.size() == 2) {
        h = dims[0], w = dims[1];
    } else if (dims.size() == 3 && dims[2] == 1) {
        h = dims[0], w = dims[1];
    } else if (dims.size() == 3 && dims[0] == 1) {
        h = dims[1], w = dims[2];
    } else {
        throw IoError(name + ": expected a 2-D array");
    }
    const std::size_t n = h * w;
    const std::size_t item = f4 ? 4 : 8;
    if (offset + n * item > bytes.size()) throw IoError(name + ": truncated NPY data");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (f4) {
            float f;
            std::memcpy(&f, bytes.data() + offset + i * 4, 4);
            values[i] = f;
        } else {
            std::memcpy(&values[i], bytes.data() + offset + i * 8, 8);
        }
    }
    try {
        return fixmap::DensityMap(w, h, std::move(values));
    } catch (const ValidationError& e) {
        throw IoError(name + ": " + e.what());
    }
}

void write_density_png(const std::filesystem::path& path, const fixmap::DensityMap& map) {
    const fixmap::DensityMap norm = map.normalized_max();
    Image8 img{map.width(), map.height(), 1, std::vector<std::uint8_t>(map.width() * map.height())};
    const auto v = norm.values();
    for (std::size_t i = 0; i < v.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(std::floor(v[i] * 255.0 + 0.5));
    write_png(path, img);
}

fixmap::DensityMap read_density_image(const std::filesystem::path& path) {
    const Image8 img = read_image8(path);
    std::vector<double> values(img.width * img.height);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (img.channels == 1) {
            values[i] = img.pixels[i] / 255.0;
        } else {
            values[i] = (img.pixels[3 * i] + img.pixels[3 * i + 1] + img.pixels[3 * i + 2]) / (3.0 * 255.0);
        }
    }
    return fixmap::DensityMap(img.width, img.height, std::move(values));
}

fixmap::DensityMap read_density(const std::filesystem::path& path) {
    if (path.extension() == ".npy") return read_npy(path);
    return read_density_image(path);
}

}  // namespace salbench::io
