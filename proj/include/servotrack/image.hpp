#ifndef SERVOTRACK_IMAGE_HPP
#define SERVOTRACK_IMAGE_HPP

#include <cstddef>
#include <vector>

namespace servotrack {

/// Grayscale raster, intensities in [0,1], row-major, origin top-left.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Image&) const = default;
};

}  // namespace servotrack

#endif
