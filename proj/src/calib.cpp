#include "monosil/calib.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace monosil::calib
{

Homography Homography::inverse() const
{
    if (std::abs(h.determinant()) <= 1e-12)
        throw DegenerateConfiguration("homography not invertible");
    Homography out;
    out.h = h.inverse();
    if (std::abs(out.h(2, 2)) > 1e-12)
        out.h /= out.h(2, 2);
    return out;
}

namespace
{

// Hartley normalization: translate to centroid, scale mean distance to sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Correspondence> &pairs, bool use_src)
{
    Point2 centroid = Point2::Zero();
    for (const auto &c : pairs)
        centroid += use_src ? c.src : c.dst;
    centroid /= static_cast<double>(pairs.size());

    double mean_dist = 0.0;
    for (const auto &c : pairs)
        mean_dist += ((use_src ? c.src : c.dst) - centroid).norm();
    mean_dist /= static_cast<double>(pairs.size());

    const double scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t;
    t << scale, 0, -scale * centroid.x(),
        0, scale, -scale * centroid.y(),
        0, 0, 1;
    return t;
}

} // namespace

Homography estimate_homography(const std::vector<Correspondence> &pairs)
{
    if (pairs.size() < 4)
        throw DegenerateConfiguration("need at least 4 correspondences");
    for (const auto &c : pairs)
        if (!c.src.allFinite() || !c.dst.allFinite())
            throw DegenerateConfiguration("non-finite correspondence");

    const Eigen::Matrix3d t_src = normalizing_transform(pairs, true);
    const Eigen::Matrix3d t_dst = normalizing_transform(pairs, false);

    const int n = static_cast<int>(pairs.size());
    Eigen::MatrixXd a(2 * n, 9);
    for (int i = 0; i < n; ++i)
    {
        const Eigen::Vector3d s = t_src * pairs[i].src.homogeneous();
        const Eigen::Vector3d d = t_dst * pairs[i].dst.homogeneous();
        const double sx = s.x(), sy = s.y();
        const double dx = d.x(), dy = d.y();
        a.row(2 * i) << -sx, -sy, -1, 0, 0, 0, dx * sx, dx * sy, dx;
        a.row(2 * i + 1) << 0, 0, 0, -sx, -sy, -1, dy * sx, dy * sy, dy;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    // Rank must be 8: the second-smallest singular value separates a unique
    // solution from a degenerate configuration.
    if (sv(7) <= 1e-9 * sv(0))
        throw DegenerateConfiguration("rank-deficient design matrix");

    const Eigen::VectorXd hvec = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << hvec(0), hvec(1), hvec(2),
        hvec(3), hvec(4), hvec(5),
        hvec(6), hvec(7), hvec(8);

    Eigen::Matrix3d h = t_dst.inverse() * hn * t_src;
    if (std::abs(h(2, 2)) <= 1e-12)
        throw DegenerateConfiguration("degenerate homography (h33 ~ 0)");
    h /= h(2, 2);
    if (std::abs(h.determinant()) <= 1e-12)
        throw DegenerateConfiguration("estimated homography is singular");

    Homography out;
    out.h = h;
    return out;
}

Point2 apply_homography(const Homography &h, const Point2 &p)
{
    const Eigen::Vector3d q = h.h * p.homogeneous();
    if (std::abs(q.z()) <= 1e-12)
        throw PointAtInfinity("point maps to infinity");
    return q.hnormalized();
}

imaging::ImageGray warp_image(const imaging::ImageGray &img, const Homography &h,
                              int out_w, int out_h)
{
    const Homography hinv = h.inverse();
    imaging::ImageGray out(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
    {
        for (int x = 0; x < out_w; ++x)
        {
            const Eigen::Vector3d q = hinv.h * Eigen::Vector3d(x, y, 1.0);
            if (std::abs(q.z()) <= 1e-12)
                continue;
            const double sx = q.x() / q.z();
            const double sy = q.y() / q.z();
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            if (x0 < 0 || y0 < 0 || x0 + 1 >= img.width || y0 + 1 >= img.height)
                continue;
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double v = (1 - fx) * (1 - fy) * img.at(x0, y0) +
                             fx * (1 - fy) * img.at(x0 + 1, y0) +
                             (1 - fx) * fy * img.at(x0, y0 + 1) +
                             fx * fy * img.at(x0 + 1, y0 + 1);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return out;
}

GridSpacingReport verify_grid_spacing(const ChessboardGrid &grid)
{
    if (grid.rows < 2 || grid.cols < 2)
        throw DegenerateGrid("grid must be at least 2x2");
    if (static_cast<int>(grid.corners.size()) != grid.rows * grid.cols)
        throw DegenerateGrid("corner count does not match rows*cols");

    std::vector<double> dx, dy;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c + 1 < grid.cols; ++c)
            dx.push_back((grid.corners[r * grid.cols + c + 1] -
                          grid.corners[r * grid.cols + c])
                             .norm());
    for (int r = 0; r + 1 < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            dy.push_back((grid.corners[(r + 1) * grid.cols + c] -
                          grid.corners[r * grid.cols + c])
                             .norm());

    for (double v : dx)
        if (v < 1e-9)
            throw DegenerateGrid("zero horizontal spacing");
    for (double v : dy)
        if (v < 1e-9)
            throw DegenerateGrid("zero vertical spacing");

    GridSpacingReport rep;
    for (double v : dx)
        rep.mean_dx += v;
    rep.mean_dx /= static_cast<double>(dx.size());
    for (double v : dy)
        rep.mean_dy += v;
    rep.mean_dy /= static_cast<double>(dy.size());

    for (double v : dx)
        rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(v - rep.mean_dx) / rep.mean_dx);
    for (double v : dy)
        rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(v - rep.mean_dy) / rep.mean_dy);
    return rep;
}

ChessboardGrid make_grid(int rows, int cols, double pitch_px, const Point2 &origin_px)
{
    ChessboardGrid g;
    g.rows = rows;
    g.cols = cols;
    g.corners.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            g.corners.emplace_back(origin_px.x() + c * pitch_px, origin_px.y() + r * pitch_px);
    return g;
}

std::vector<Correspondence> load_correspondences(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open correspondence file: " + path);
    std::vector<Correspondence> out;
    std::string line;
    while (std::getline(in, line))
    {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        double sx, sy, dx, dy;
        if (ss >> sx >> sy >> dx >> dy)
            out.push_back({{sx, sy}, {dx, dy}});
    }
    return out;
}

} // namespace monosil::calib
