#include "geopitch/render.hpp"

#include "geopitch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <zlib.h>

namespace geopitch {

GrayImage matrix_to_image(const Matrix& m, int scale, bool dark_is_high) {
    if (m.rows <= 0 || m.cols <= 0) throw std::invalid_argument("cannot render an empty matrix");
    if (scale < 1) throw std::invalid_argument("scale must be positive");
    const double hi = *std::max_element(m.data.begin(), m.data.end());
    const double lo = std::min(0.0, *std::min_element(m.data.begin(), m.data.end()));
    const double range = hi - lo;

    GrayImage img;
    img.width = m.cols * scale;
    img.height = m.rows * scale;
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            const double v = range > 0.0 ? (m(r, c) - lo) / range : 0.0;
            int level = static_cast<int>(std::lround(255.0 * v));
            if (dark_is_high) level = 255 - level;
            const int y0 = (m.rows - 1 - r) * scale;
            for (int dy = 0; dy < scale; ++dy) {
                for (int dx = 0; dx < scale; ++dx) {
                    img.pixels[static_cast<std::size_t>(y0 + dy) * img.width + c * scale + dx] =
                        static_cast<std::uint8_t>(level);
                }
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_ppm(const GrayImage& img) {
    const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.pixels.size() * 3);
    for (std::uint8_t p : img.pixels) out.insert(out.end(), {p, p, p});
    return out;
}

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        const auto* row = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
        raw.insert(raw.end(), row, row + img.width);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) != Z_OK) {
        throw std::runtime_error("zlib compression failed");
    }
    packed.resize(packed_size);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(img.width));
    put_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

void write_image(const std::filesystem::path& path, const GrayImage& img) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto bytes = ext == ".png" ? encode_png(img) : encode_ppm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace geopitch
