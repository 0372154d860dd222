#ifndef MONOSIL_IMAGING_HPP_
#define MONOSIL_IMAGING_HPP_

#include <cstdint>
#include <random>

#include "monosil/image.hpp"
#include "monosil/track.hpp"

namespace monosil::imaging
{

// Bird's-eye camera. Vehicle frame: forward = up in the image (-y axis),
// lateral-left = -x axis, so a point d metres ahead and l metres to the
// left lands at pixel (origin.x - l*px_per_m, origin.y - d*px_per_m).
struct CameraModel
{
    double px_per_m = 100.0;
    double origin_x = 320.0;
    double origin_y = 470.0;
    int width = 640;
    int height = 480;
};

struct Pose
{
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
};

enum class MorphOp
{
    erode,
    dilate,
    open,
    close
};

// Draws both lane boundaries as anti-aliased strokes on black, then adds
// seeded Gaussian noise (clamped to [0,255]). noise_sigma 0 skips the RNG.
ImageGray render_frame(const track::RefPath &path_left, const track::RefPath &path_right,
                       const Pose &pose, const CameraModel &cam, double line_width_m,
                       double noise_sigma, std::mt19937_64 &rng);

ImageGray gaussian_blur(const ImageGray &img, double sigma);

ImageGray threshold_binary(const ImageGray &img, int t);

// Square structuring element of side 2*radius+1. Input must be 0/255.
ImageGray morphology(const ImageGray &img, MorphOp op, int radius);

} // namespace monosil::imaging

#endif
