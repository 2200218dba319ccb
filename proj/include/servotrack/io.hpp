#ifndef SERVOTRACK_IO_HPP
#define SERVOTRACK_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "servotrack/image.hpp"

namespace servotrack {

/// 8-bit grayscale PNG.
void write_png_gray(const std::string& path, const Image& image);

/// 8-bit RGB PNG, pixels row-major, 3 bytes per pixel.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

/// Minimal CSV reader for the report round-trip path: splits on commas,
/// no quoting (none of our writers emit quotes).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace servotrack

#endif
