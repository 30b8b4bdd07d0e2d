#include "doctest.h"

#include "geopitch/errors.hpp"
#include "geopitch/render.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

using namespace geopitch;

namespace {

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

// Walks the chunks, checks every CRC and inflates IDAT back into rows.
GrayImage decode_gray_png(const std::vector<std::uint8_t>& png) {
    const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    REQUIRE(png.size() > 8);
    REQUIRE(std::memcmp(png.data(), sig, 8) == 0);
    GrayImage img;
    std::vector<std::uint8_t> idat;
    std::vector<std::string> order;
    for (std::size_t at = 8; at < png.size();) {
        const std::uint32_t len = be32(png, at);
        const std::string type(png.begin() + static_cast<std::ptrdiff_t>(at + 4), png.begin() + static_cast<std::ptrdiff_t>(at + 8));
        order.push_back(type);
        const uLong crc = crc32(0L, png.data() + at + 4, 4 + len);
        CHECK(be32(png, at + 8 + len) == crc);
        if (type == "IHDR") {
            img.width = static_cast<int>(be32(png, at + 8));
            img.height = static_cast<int>(be32(png, at + 12));
            CHECK(png[at + 16] == 8);
            CHECK(png[at + 17] == 0);
        } else if (type == "IDAT") {
            idat.insert(idat.end(), png.begin() + static_cast<std::ptrdiff_t>(at + 8),
                        png.begin() + static_cast<std::ptrdiff_t>(at + 8 + len));
        }
        at += 12 + len;
    }
    CHECK(order == std::vector<std::string>{"IHDR", "IDAT", "IEND"});
    uLongf raw_size = static_cast<uLongf>(img.height) * (img.width + 1);
    std::vector<std::uint8_t> raw(raw_size);
    REQUIRE(uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) == Z_OK);
    REQUIRE(raw_size == raw.size());
    for (int y = 0; y < img.height; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * (img.width + 1);
        CHECK(raw[row] == 0);
        img.pixels.insert(img.pixels.end(), raw.begin() + static_cast<std::ptrdiff_t>(row + 1),
                          raw.begin() + static_cast<std::ptrdiff_t>(row + 1 + img.width));
    }
    return img;
}

}  // namespace

TEST_CASE("matrix to image") {
    Matrix m(2, 3);
    m(0, 0) = 4.0;
    m(1, 2) = 2.0;
    const GrayImage img = matrix_to_image(m, 2);
    CHECK(img.width == 6);
    CHECK(img.height == 4);
    // Row 0 is drawn at the bottom, darkest where the value is largest.
    CHECK(img.at(0, 3) == 0);
    CHECK(img.at(1, 2) == 0);
    CHECK(img.at(0, 0) == 255);
    CHECK(img.at(4, 0) == 127);
    CHECK(img.at(2, 3) == 255);
    const GrayImage light = matrix_to_image(m, 1, false);
    CHECK(light.at(0, 1) == 255);
    CHECK(light.at(0, 0) == 0);

    // Levels are measured from zero, so a constant positive matrix is all dark.
    for (auto p : matrix_to_image(Matrix(2, 2, 3.0), 1).pixels) CHECK(p == 0);
    for (auto p : matrix_to_image(Matrix(2, 2, 0.0), 1).pixels) CHECK(p == 255);
    CHECK_THROWS_AS(matrix_to_image(Matrix{}), std::invalid_argument);
    CHECK_THROWS_AS(matrix_to_image(m, 0), std::invalid_argument);
}

TEST_CASE("ppm and png encodings") {
    Matrix m(5, 7);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 7; ++c) m(r, c) = r * 7 + c;
    }
    const GrayImage img = matrix_to_image(m, 3);

    const auto ppm = encode_ppm(img);
    const std::string header = "P6\n21 15\n255\n";
    REQUIRE(ppm.size() == header.size() + img.pixels.size() * 3);
    CHECK(std::string(ppm.begin(), ppm.begin() + static_cast<std::ptrdiff_t>(header.size())) == header);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const std::size_t at = header.size() + 3 * i;
        CHECK(ppm[at] == img.pixels[i]);
        CHECK(ppm[at + 2] == img.pixels[i]);
    }

    const GrayImage back = decode_gray_png(encode_png(img));
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.pixels == img.pixels);

    const auto dir = std::filesystem::temp_directory_path();
    write_image(dir / "geopitch_unit.png", img);
    write_image(dir / "geopitch_unit.ppm", img);
    std::ifstream in(dir / "geopitch_unit.png", std::ios::binary);
    const std::vector<std::uint8_t> disk{std::istreambuf_iterator<char>(in), {}};
    CHECK(disk == encode_png(img));
    CHECK(std::filesystem::file_size(dir / "geopitch_unit.ppm") == ppm.size());
    std::filesystem::remove(dir / "geopitch_unit.png");
    std::filesystem::remove(dir / "geopitch_unit.ppm");
    CHECK_THROWS_AS(write_image("/nonexistent/dir/x.png", img), IoError);
}
