#include "servotrack/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace servotrack {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void write_chunk(std::ofstream& out, const char type[4], const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> buf;
    put_be32(buf, static_cast<std::uint32_t>(data.size()));
    buf.insert(buf.end(), type, type + 4);
    buf.insert(buf.end(), data.begin(), data.end());
    const uLong crc = crc32(crc32(0L, reinterpret_cast<const Bytef*>(type), 4),
                            data.empty() ? nullptr : data.data(),
                            static_cast<uInt>(data.size()));
    put_be32(buf, static_cast<std::uint32_t>(crc));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<std::uint8_t>& raw) {
    // One filter byte (0 = none) precedes each scanline.
    std::vector<std::uint8_t> scanlines;
    scanlines.reserve(static_cast<std::size_t>(height) * (1 + static_cast<std::size_t>(width) * channels));
    for (int y = 0; y < height; ++y) {
        scanlines.push_back(0);
        const std::size_t off = static_cast<std::size_t>(y) * width * channels;
        scanlines.insert(scanlines.end(), raw.begin() + off, raw.begin() + off + static_cast<std::size_t>(width) * channels);
    }

    uLongf comp_len = compressBound(static_cast<uLong>(scanlines.size()));
    std::vector<std::uint8_t> compressed(comp_len);
    if (compress2(compressed.data(), &comp_len, scanlines.data(), static_cast<uLong>(scanlines.size()), 6) != Z_OK)
        throw std::runtime_error("write_png: deflate failed");
    compressed.resize(comp_len);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_png: cannot open '" + path + "'");
    static const std::uint8_t signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.write(reinterpret_cast<const char*>(signature), 8);

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                        // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);                    // gray / truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    write_chunk(out, "IHDR", ihdr);
    write_chunk(out, "IDAT", compressed);
    write_chunk(out, "IEND", {});
}

}  // namespace

void write_png_gray(const std::string& path, const Image& image) {
    std::vector<std::uint8_t> raw(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        raw[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.pixels[i], 0.0, 1.0) * 255.0));
    write_png(path, image.width, image.height, 1, raw);
}

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw std::invalid_argument("write_png_rgb: buffer size mismatch");
    write_png(path, width, height, 3, rgb);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace servotrack
