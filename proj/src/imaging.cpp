#include "monosil/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace monosil::imaging
{

namespace
{

struct Seg
{
    double ax, ay, bx, by;
};

double dist_to_seg(double px, double py, const Seg &s)
{
    const double dx = s.bx - s.ax, dy = s.by - s.ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 1e-24 ? ((px - s.ax) * dx + (py - s.ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double fx = s.ax + t * dx, fy = s.ay + t * dy;
    return std::hypot(px - fx, py - fy);
}

void stroke_polyline(ImageGray &img, const std::vector<Seg> &segs, double half_w_px)
{
    const double pad = half_w_px + 1.5;
    for (const auto &s : segs)
    {
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(s.ax, s.bx) - pad)));
        const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(s.ax, s.bx) + pad)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(s.ay, s.by) - pad)));
        const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.ay, s.by) + pad)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
            {
                const double d = dist_to_seg(x, y, s);
                // 1 px linear falloff at the stroke edge
                const double alpha = std::clamp(half_w_px + 0.5 - d, 0.0, 1.0);
                if (alpha <= 0.0)
                    continue;
                const auto v = static_cast<std::uint8_t>(std::lround(255.0 * alpha));
                img.at(x, y) = std::max(img.at(x, y), v);
            }
    }
}

// World polyline -> vehicle frame -> pixel segments, dropping segments
// entirely outside the frame.
std::vector<Seg> project_boundary(const track::RefPath &path, const Pose &pose,
                                  const CameraModel &cam, double pad_px)
{
    const double c = std::cos(-pose.phi), s = std::sin(-pose.phi);
    std::vector<Seg> segs;
    double prev_px = 0.0, prev_py = 0.0;
    bool have_prev = false;
    for (const auto &p : path.points)
    {
        const double wx = p.x - pose.x, wy = p.y - pose.y;
        const double fwd = c * wx - s * wy;  // vehicle forward
        const double lat = s * wx + c * wy;  // vehicle left
        const double px = cam.origin_x - lat * cam.px_per_m;
        const double py = cam.origin_y - fwd * cam.px_per_m;
        if (have_prev)
        {
            const bool visible =
                !(std::max(prev_px, px) < -pad_px || std::min(prev_px, px) > cam.width + pad_px ||
                  std::max(prev_py, py) < -pad_px || std::min(prev_py, py) > cam.height + pad_px);
            if (visible)
                segs.push_back({prev_px, prev_py, px, py});
        }
        prev_px = px;
        prev_py = py;
        have_prev = true;
    }
    return segs;
}

// Pixels are quantized, so adding N(0, sigma) and rounding is the same as
// adding an integer drawn from the exact discrete distribution of
// round(N(0, sigma)). Sampling that directly costs one RNG draw per pixel,
// with a 16-bit lookup fast path and a binary-search fallback on the rare
// draws that land on a bucket boundary.
class DiscreteGaussian
{
  public:
    explicit DiscreteGaussian(double sigma)
    {
        const int k_max = std::max(1, static_cast<int>(std::ceil(9.0 * sigma)));
        offset_ = k_max;
        cum_.resize(2 * k_max + 2);
        cum_[0] = 0.0;
        for (int v = -k_max; v <= k_max; ++v)
        {
            // P(round(noise) <= v); the tails fold into the extreme bins
            const double hi =
                v == k_max ? 1.0 : 0.5 * std::erfc(-(v + 0.5) / (sigma * std::sqrt(2.0)));
            cum_[v + k_max + 1] = hi;
        }
        lut_.assign(65536, kSentinel);
        for (int v = -k_max; v <= k_max; ++v)
        {
            const double lo = cum_[v + k_max], hi = cum_[v + k_max + 1];
            const int b0 = static_cast<int>(std::ceil(lo * 65536.0));
            const int b1 = static_cast<int>(std::floor(hi * 65536.0));
            for (int b = std::max(b0, 0); b < std::min(b1, 65536); ++b)
                lut_[b] = static_cast<std::int16_t>(v);
        }
    }

    int operator()(std::mt19937_64 &rng) const
    {
        const std::uint64_t r = rng();
        const std::int16_t v = lut_[r >> 48];
        if (v != kSentinel)
            return v;
        const double u = static_cast<double>(r >> 11) * 0x1.0p-53;
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        return static_cast<int>(it - cum_.begin()) - 1 - offset_;
    }

  private:
    static constexpr std::int16_t kSentinel = 32767;
    int offset_ = 0;
    std::vector<double> cum_;
    std::vector<std::int16_t> lut_;
};

} // namespace

ImageGray render_frame(const track::RefPath &path_left, const track::RefPath &path_right,
                       const Pose &pose, const CameraModel &cam, double line_width_m,
                       double noise_sigma, std::mt19937_64 &rng)
{
    ImageGray img(cam.width, cam.height);
    const double half_w_px = 0.5 * line_width_m * cam.px_per_m;
    const double pad = half_w_px + 2.0;
    stroke_polyline(img, project_boundary(path_left, pose, cam, pad), half_w_px);
    stroke_polyline(img, project_boundary(path_right, pose, cam, pad), half_w_px);

    if (noise_sigma > 0.0)
    {
        const DiscreteGaussian noise(noise_sigma);
        for (auto &px : img.pixels)
            px = static_cast<std::uint8_t>(std::clamp(px + noise(rng), 0, 255));
    }
    return img;
}

ImageGray gaussian_blur(const ImageGray &img, double sigma)
{
    if (sigma <= 0.0)
        return img;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i)
    {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto &k : kernel)
        k /= sum;

    const int w = img.width, h = img.height;
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);

    // horizontal pass, clamp-to-edge; tap-outer loops over a padded row keep
    // the inner loops branch-free so they vectorize
    std::vector<double> pad_row(static_cast<std::size_t>(w) + 2 * radius);
    for (int y = 0; y < h; ++y)
    {
        const std::uint8_t *src = &img.pixels[static_cast<std::size_t>(y) * w];
        for (int i = 0; i < radius; ++i)
        {
            pad_row[i] = src[0];
            pad_row[w + radius + i] = src[w - 1];
        }
        for (int x = 0; x < w; ++x)
            pad_row[radius + x] = src[x];

        double *dst = &tmp[static_cast<std::size_t>(y) * w];
        const double k0 = kernel[0];
        for (int x = 0; x < w; ++x)
            dst[x] = k0 * pad_row[x];
        for (int i = 1; i <= 2 * radius; ++i)
        {
            const double k = kernel[i];
            const double *shifted = pad_row.data() + i;
            for (int x = 0; x < w; ++x)
                dst[x] += k * shifted[x];
        }
    }

    ImageGray out(w, h);
    std::vector<double> acc(w);
    for (int y = 0; y < h; ++y)
    {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int i = -radius; i <= radius; ++i)
        {
            const double k = kernel[i + radius];
            const double *src = &tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w];
            for (int x = 0; x < w; ++x)
                acc[x] += k * src[x];
        }
        std::uint8_t *dst = &out.pixels[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x)
            dst[x] = static_cast<std::uint8_t>(std::lround(std::clamp(acc[x], 0.0, 255.0)));
    }
    return out;
}

ImageGray threshold_binary(const ImageGray &img, int t)
{
    ImageGray out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = img.pixels[i] > t ? 255 : 0;
    return out;
}

namespace
{

ImageGray morph_pass(const ImageGray &img, int radius, bool is_erode)
{
    const int w = img.width, h = img.height;
    // separable min/max over the square element, out-of-frame treated as 0;
    // tap-outer byte min/max loops vectorize
    ImageGray tmp(w, h), out(w, h);
    std::vector<std::uint8_t> pad_row(static_cast<std::size_t>(w) + 2 * radius, 0);
    for (int y = 0; y < h; ++y)
    {
        const std::uint8_t *src = &img.pixels[static_cast<std::size_t>(y) * w];
        std::memcpy(pad_row.data() + radius, src, static_cast<std::size_t>(w));
        std::uint8_t *dst = &tmp.pixels[static_cast<std::size_t>(y) * w];
        std::memcpy(dst, pad_row.data(), static_cast<std::size_t>(w));
        for (int i = 1; i <= 2 * radius; ++i)
        {
            const std::uint8_t *shifted = pad_row.data() + i;
            if (is_erode)
                for (int x = 0; x < w; ++x)
                    dst[x] = std::min(dst[x], shifted[x]);
            else
                for (int x = 0; x < w; ++x)
                    dst[x] = std::max(dst[x], shifted[x]);
        }
    }

    const std::vector<std::uint8_t> zero_row(w, 0);
    for (int y = 0; y < h; ++y)
    {
        std::uint8_t *dst = &out.pixels[static_cast<std::size_t>(y) * w];
        const int y0 = y - radius;
        const std::uint8_t *first =
            (y0 >= 0 && y0 < h) ? &tmp.pixels[static_cast<std::size_t>(y0) * w] : zero_row.data();
        std::memcpy(dst, first, static_cast<std::size_t>(w));
        for (int i = -radius + 1; i <= radius; ++i)
        {
            const int yy = y + i;
            const std::uint8_t *src = (yy >= 0 && yy < h)
                                          ? &tmp.pixels[static_cast<std::size_t>(yy) * w]
                                          : zero_row.data();
            if (is_erode)
                for (int x = 0; x < w; ++x)
                    dst[x] = std::min(dst[x], src[x]);
            else
                for (int x = 0; x < w; ++x)
                    dst[x] = std::max(dst[x], src[x]);
        }
    }
    return out;
}

} // namespace

ImageGray morphology(const ImageGray &img, MorphOp op, int radius)
{
    for (auto px : img.pixels)
        if (px != 0 && px != 255)
            throw NonBinaryInput("morphology expects a 0/255 mask");
    switch (op)
    {
    case MorphOp::erode:
        return morph_pass(img, radius, true);
    case MorphOp::dilate:
        return morph_pass(img, radius, false);
    case MorphOp::open:
        return morph_pass(morph_pass(img, radius, true), radius, false);
    case MorphOp::close:
        return morph_pass(morph_pass(img, radius, false), radius, true);
    }
    throw Error("unreachable");
}

} // namespace monosil::imaging
