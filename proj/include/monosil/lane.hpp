#ifndef MONOSIL_LANE_HPP_
#define MONOSIL_LANE_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "monosil/errors.hpp"
#include "monosil/imaging.hpp"

namespace monosil::lane
{

enum class Side
{
    left,
    right,
    center
};

// Quadratic lateral = a*d^2 + b*d + c in the metric vehicle frame,
// d = forward distance, lateral positive to the vehicle's left.
struct LanePoly
{
    Side side = Side::center;
    double a = 0.0;  // 1/m
    double b = 0.0;
    double c = 0.0;  // m
    double a3 = 0.0; // 1/m^2, nonzero only for order-3 fits
    bool valid = false;
    int support = 0;

    double eval(double d) const { return ((a3 * d + a) * d + b) * d + c; }
    double slope(double d) const { return (3.0 * a3 * d + 2.0 * a) * d + b; }
};

struct SlidingWindowConfig
{
    int n_windows = 9;
    int margin = 60;
    int min_pixels_recenter = 40;
    int min_support = 50;
    int fit_order = 2;        // 2 or 3
    double half_width = 0.4;  // m, used for single-side fallback
};

struct PixelPoint
{
    int x = 0;
    int y = 0;
};

// Pixel-space fit x(y) = c0 + c1*y + ... (ascending powers).
using PixelPolyCoeffs = std::vector<double>;

struct LaneDetection
{
    LanePoly left;
    LanePoly right;
    LanePoly center;
};

// Column-sum histogram over the lower half; argmax per half, ties broken
// toward the image center. Throws NoLanePixels if a half is all zero.
std::pair<int, int> histogram_base(const imaging::ImageGray &mask);

std::vector<PixelPoint> sliding_window_collect(const imaging::ImageGray &mask, int base_x,
                                               const SlidingWindowConfig &cfg);

// Least-squares x(y) with y scaled to [0,1] for conditioning.
PixelPolyCoeffs fit_poly(const std::vector<PixelPoint> &points, int order);

// Full pipeline: histogram -> windows -> fit -> pixel-to-metric conversion.
// When a side drops out and prev is given, the previous poly is carried
// forward with support = 0.
LaneDetection detect_lanes(const imaging::ImageGray &mask, const SlidingWindowConfig &cfg,
                           const imaging::CameraModel &cam,
                           const std::optional<std::pair<LanePoly, LanePoly>> &prev = std::nullopt);

// Quadratic pixel fit x(y) -> metric vehicle-frame coefficients.
LanePoly pixel_to_metric(const PixelPolyCoeffs &px_coeffs, const imaging::CameraModel &cam,
                         Side side, int support);

} // namespace monosil::lane

#endif
