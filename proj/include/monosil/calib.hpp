#ifndef MONOSIL_CALIB_HPP_
#define MONOSIL_CALIB_HPP_

#include <vector>

#include <Eigen/Core>

#include "monosil/errors.hpp"
#include "monosil/image.hpp"

namespace monosil::calib
{

using Point2 = Eigen::Vector2d;

// 3x3 projective map, normalized so h(2,2) == 1 after estimation.
struct Homography
{
    Eigen::Matrix3d h = Eigen::Matrix3d::Identity();

    Homography inverse() const;
};

struct Correspondence
{
    Point2 src;
    Point2 dst;
};

// Interior corners of a calibration chessboard, row-major.
struct ChessboardGrid
{
    int rows = 5;
    int cols = 4;
    std::vector<Point2> corners;
};

struct GridSpacingReport
{
    double mean_dx = 0.0;
    double mean_dy = 0.0;
    double max_rel_dev = 0.0;
};

// DLT with Hartley normalization. Needs >= 4 correspondences.
Homography estimate_homography(const std::vector<Correspondence> &pairs);

Point2 apply_homography(const Homography &h, const Point2 &p);

// Inverse mapping with bilinear interpolation; pixels outside the source are 0.
imaging::ImageGray warp_image(const imaging::ImageGray &img, const Homography &h,
                              int out_w, int out_h);

GridSpacingReport verify_grid_spacing(const ChessboardGrid &grid);

// Perfect grid with the given pitch, top-left corner at origin_px.
ChessboardGrid make_grid(int rows, int cols, double pitch_px, const Point2 &origin_px);

// Parses "sx sy dx dy" lines; '#' starts a comment.
std::vector<Correspondence> load_correspondences(const std::string &path);

} // namespace monosil::calib

#endif
