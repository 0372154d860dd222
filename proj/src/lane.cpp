#include "monosil/lane.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace monosil::lane
{

std::pair<int, int> histogram_base(const imaging::ImageGray &mask)
{
    const int w = mask.width, h = mask.height;
    std::vector<long> hist(w, 0);
    for (int y = h / 2; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y) != 0)
                hist[x] += mask.at(x, y);

    const int mid = w / 2;
    // ties break toward the image center
    int left_x = -1;
    long left_v = 0;
    for (int x = 0; x < mid; ++x)
        if (hist[x] > left_v || (hist[x] == left_v && hist[x] > 0))
        {
            left_v = hist[x];
            left_x = x;
        }
    int right_x = -1;
    long right_v = 0;
    for (int x = w - 1; x >= mid; --x)
        if (hist[x] > right_v || (hist[x] == right_v && hist[x] > 0))
        {
            right_v = hist[x];
            right_x = x;
        }
    if (left_x < 0)
        throw NoLanePixels("left");
    if (right_x < 0)
        throw NoLanePixels("right");
    return {left_x, right_x};
}

std::vector<PixelPoint> sliding_window_collect(const imaging::ImageGray &mask, int base_x,
                                               const SlidingWindowConfig &cfg)
{
    const int w = mask.width, h = mask.height;
    const int wh = h / cfg.n_windows;
    std::vector<PixelPoint> out;
    double center = base_x;

    for (int wi = 0; wi < cfg.n_windows; ++wi)
    {
        const int y_hi = h - wi * wh;               // exclusive
        const int y_lo = (wi == cfg.n_windows - 1) ? 0 : y_hi - wh;
        const double x_lo = center - cfg.margin;
        const double x_hi = center + cfg.margin;

        double sum_x = 0.0;
        int count = 0;
        for (int y = y_lo; y < y_hi; ++y)
            for (int x = std::max(0, static_cast<int>(std::ceil(x_lo)));
                 x <= std::min(w - 1, static_cast<int>(std::floor(x_hi))); ++x)
                if (mask.at(x, y) != 0)
                {
                    out.push_back({x, y});
                    sum_x += x;
                    ++count;
                }
        if (count >= cfg.min_pixels_recenter)
            center = sum_x / count;
    }
    return out;
}

PixelPolyCoeffs fit_poly(const std::vector<PixelPoint> &points, int order)
{
    if (static_cast<int>(points.size()) < order + 1)
        throw InsufficientSupport("too few points for the requested order");

    int y_min = points[0].y, y_max = points[0].y;
    for (const auto &p : points)
    {
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    if (y_max - y_min < 10)
        throw InsufficientSupport("y span below 10 px");
    const double dy = y_max - y_min;

    // normal equations in u = (y - y_min)/dy for conditioning
    const int n_coef = order + 1;
    Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(n_coef, n_coef);
    Eigen::VectorXd atb = Eigen::VectorXd::Zero(n_coef);
    for (const auto &p : points)
    {
        Eigen::VectorXd row(n_coef);
        const double u = (p.y - y_min) / dy;
        double pw = 1.0;
        for (int j = 0; j < n_coef; ++j)
        {
            row(j) = pw;
            pw *= u;
        }
        ata += row * row.transpose();
        atb += row * p.x;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ata);
    const double ev_min = eig.eigenvalues()(0);
    const double ev_max = eig.eigenvalues()(n_coef - 1);
    if (ev_min <= 0.0 || ev_max / ev_min > 1e10)
        throw IllConditioned("normal matrix condition estimate too large");

    const Eigen::VectorXd k = ata.ldlt().solve(atb);

    // expand x = sum_j k_j ((y - y_min)/dy)^j back into powers of y
    PixelPolyCoeffs coeffs(n_coef, 0.0);
    const double alpha = 1.0 / dy;
    for (int j = 0; j < n_coef; ++j)
    {
        // (y - y_min)^j via binomial expansion
        double binom = 1.0;
        for (int m = 0; m <= j; ++m)
        {
            coeffs[m] += k(j) * std::pow(alpha, j) * binom *
                         std::pow(-static_cast<double>(y_min), j - m);
            binom = binom * (j - m) / (m + 1.0);
        }
    }
    return coeffs;
}

LanePoly pixel_to_metric(const PixelPolyCoeffs &px_coeffs, const imaging::CameraModel &cam,
                         Side side, int support)
{
    const double s = cam.px_per_m;
    const double oy = cam.origin_y;
    const int order = static_cast<int>(px_coeffs.size()) - 1;

    // substitute y = oy - s*d into x(y), collect powers of d
    std::vector<double> xc(order + 1, 0.0);
    for (int j = 0; j <= order; ++j)
    {
        double binom = 1.0;
        for (int m = 0; m <= j; ++m)
        {
            xc[m] += px_coeffs[j] * binom * std::pow(oy, j - m) * std::pow(-s, m);
            binom = binom * (j - m) / (m + 1.0);
        }
    }

    LanePoly poly;
    poly.side = side;
    poly.support = support;
    poly.c = (cam.origin_x - xc[0]) / s;
    poly.b = order >= 1 ? -xc[1] / s : 0.0;
    poly.a = order >= 2 ? -xc[2] / s : 0.0;
    poly.a3 = order >= 3 ? -xc[3] / s : 0.0;
    return poly;
}

namespace
{

LanePoly detect_side(const imaging::ImageGray &mask, int base_x, const SlidingWindowConfig &cfg,
                     const imaging::CameraModel &cam, Side side)
{
    const auto points = sliding_window_collect(mask, base_x, cfg);
    if (static_cast<int>(points.size()) < cfg.min_support)
        throw InsufficientSupport("below min_support");
    const auto px_coeffs = fit_poly(points, cfg.fit_order);
    LanePoly poly = pixel_to_metric(px_coeffs, cam, side, static_cast<int>(points.size()));
    const double frame_half_width_m = 0.5 * cam.width / cam.px_per_m;
    poly.valid = std::abs(poly.c) <= frame_half_width_m;
    if (!poly.valid)
        throw InsufficientSupport("fit lands outside the frame");
    return poly;
}

} // namespace

LaneDetection detect_lanes(const imaging::ImageGray &mask, const SlidingWindowConfig &cfg,
                           const imaging::CameraModel &cam,
                           const std::optional<std::pair<LanePoly, LanePoly>> &prev)
{
    int left_base = -1, right_base = -1;
    try
    {
        std::tie(left_base, right_base) = histogram_base(mask);
    }
    catch (const NoLanePixels &)
    {
        // one side may still be present; retry per half below
    }
    if (left_base < 0 || right_base < 0)
    {
        // re-run halves independently so a single missing side is recoverable
        const int w = mask.width, h = mask.height;
        std::vector<long> hist(w, 0);
        for (int y = h / 2; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (mask.at(x, y) != 0)
                    hist[x] += mask.at(x, y);
        long best = 0;
        for (int x = 0; x < w / 2; ++x)
            if (hist[x] > best || (hist[x] == best && hist[x] > 0))
            {
                best = hist[x];
                left_base = x;
            }
        best = 0;
        for (int x = w - 1; x >= w / 2; --x)
            if (hist[x] > best || (hist[x] == best && hist[x] > 0))
            {
                best = hist[x];
                right_base = x;
            }
    }

    LaneDetection det;
    det.left.side = Side::left;
    det.right.side = Side::right;
    det.center.side = Side::center;

    if (left_base >= 0)
    {
        try
        {
            det.left = detect_side(mask, left_base, cfg, cam, Side::left);
        }
        catch (const Error &)
        {
        }
    }
    if (right_base >= 0)
    {
        try
        {
            det.right = detect_side(mask, right_base, cfg, cam, Side::right);
        }
        catch (const Error &)
        {
        }
    }

    if (!det.left.valid && prev)
    {
        det.left = prev->first;
        det.left.valid = true;
        det.left.support = 0;
    }
    if (!det.right.valid && prev)
    {
        det.right = prev->second;
        det.right.valid = true;
        det.right.support = 0;
    }

    if (det.left.valid && det.right.valid)
    {
        det.center.a3 = 0.5 * (det.left.a3 + det.right.a3);
        det.center.a = 0.5 * (det.left.a + det.right.a);
        det.center.b = 0.5 * (det.left.b + det.right.b);
        det.center.c = 0.5 * (det.left.c + det.right.c);
        det.center.valid = true;
        det.center.support = det.left.support + det.right.support;
    }
    else if (det.left.valid)
    {
        det.center = det.left;
        det.center.side = Side::center;
        det.center.c -= cfg.half_width;
    }
    else if (det.right.valid)
    {
        det.center = det.right;
        det.center.side = Side::center;
        det.center.c += cfg.half_width;
    }
    else
    {
        throw BothLanesLost("no valid lane boundary and no previous detection");
    }
    return det;
}

} // namespace monosil::lane
