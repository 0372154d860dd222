#ifndef MONOSIL_IMAGE_HPP_
#define MONOSIL_IMAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace monosil::imaging
{

// Row-major 8-bit grayscale frame.
struct ImageGray
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    ImageGray() = default;
    ImageGray(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t &at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// Binary PGM (P5, maxval 255).
void write_pgm(const ImageGray &img, const std::string &path);
ImageGray read_pgm(const std::string &path);

} // namespace monosil::imaging

#endif
