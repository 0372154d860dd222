#include "monosil/track.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace monosil::track
{

namespace
{

constexpr double kTau = 6.283185307179586476925286766559;

double wrap_pi(double a)
{
    a = std::fmod(a + M_PI, kTau);
    if (a < 0)
        a += kTau;
    return a - M_PI;
}

double radius_at(const TrackSpec &spec, double theta)
{
    double r = spec.base_radius;
    for (const auto &h : spec.harmonics)
        r += h.amplitude * std::sin(h.frequency * theta + h.phase);
    return r;
}

bool segments_intersect(double ax, double ay, double bx, double by,
                        double cx, double cy, double dx, double dy)
{
    const auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
        return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    const double o1 = orient(ax, ay, bx, by, cx, cy);
    const double o2 = orient(ax, ay, bx, by, dx, dy);
    const double o3 = orient(cx, cy, dx, dy, ax, ay);
    const double o4 = orient(cx, cy, dx, dy, bx, by);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

void check_spec(const TrackSpec &spec)
{
    double amp_sum = 0.0;
    for (const auto &h : spec.harmonics)
    {
        if (h.frequency < 1)
            throw ConfigError("harmonic frequency must be a positive integer");
        amp_sum += std::abs(h.amplitude);
    }
    if (spec.base_radius <= amp_sum)
        throw ConfigError("base_radius must exceed the sum of harmonic amplitudes");
    if (spec.half_width <= 0)
        throw ConfigError("half_width must be positive");
    if (spec.samples_per_lap < 360)
        throw ConfigError("samples_per_lap must be at least 360");
}

// Heading and curvature of a sampled polyline by central differences.
// For closed paths the stencil wraps over the n unique samples.
void fill_derivatives(RefPath &path)
{
    const int total = static_cast<int>(path.points.size());
    const int n = path.closed ? total - 1 : total;
    auto &pts = path.points;

    for (int i = 0; i < n; ++i)
    {
        int im = i - 1, ip = i + 1;
        double scale = 2.0;
        if (path.closed)
        {
            im = (i - 1 + n) % n;
            ip = (i + 1) % n;
        }
        else if (i == 0)
        {
            im = 0;
            scale = 1.0;
        }
        else if (i == n - 1)
        {
            ip = n - 1;
            scale = 1.0;
        }
        const double x1 = (pts[ip].x - pts[im].x) / scale;
        const double y1 = (pts[ip].y - pts[im].y) / scale;
        const double x2 = pts[ip].x - 2.0 * pts[i].x + pts[im].x;
        const double y2 = pts[ip].y - 2.0 * pts[i].y + pts[im].y;
        pts[i].heading = std::atan2(y1, x1);
        const double speed2 = x1 * x1 + y1 * y1;
        pts[i].curvature = speed2 > 1e-18
                               ? (x1 * y2 - y1 * x2) / std::pow(speed2, 1.5)
                               : 0.0;
    }
    if (path.closed)
    {
        pts[total - 1].heading = pts[0].heading;
        pts[total - 1].curvature = pts[0].curvature;
    }
}

void fill_arclength(RefPath &path)
{
    auto &pts = path.points;
    pts[0].s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        pts[i].s = pts[i - 1].s + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
}

// Portable uniform draws: distributions from <random> vary across stdlibs.
double uniform_real(std::mt19937_64 &rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

int uniform_int(std::mt19937_64 &rng, int lo, int hi)
{
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

} // namespace

RefPath generate_track(const TrackSpec &spec)
{
    check_spec(spec);
    const int n = spec.samples_per_lap;
    RefPath path;
    path.closed = true;
    path.points.resize(n + 1);
    for (int i = 0; i < n; ++i)
    {
        const double theta = kTau * i / n;
        const double r = radius_at(spec, theta);
        path.points[i].x = r * std::cos(theta);
        path.points[i].y = r * std::sin(theta);
    }
    path.points[n].x = path.points[0].x;
    path.points[n].y = path.points[0].y;

    fill_arclength(path);
    fill_derivatives(path);

    for (int i = 0; i < n; ++i)
        for (int j = i + 2; j < n; ++j)
        {
            if (i == 0 && j == n - 1)
                continue; // adjacent through the closure
            if (segments_intersect(path.points[i].x, path.points[i].y,
                                   path.points[i + 1].x, path.points[i + 1].y,
                                   path.points[j].x, path.points[j].y,
                                   path.points[j + 1].x, path.points[j + 1].y))
                throw SelfIntersecting("track centerline self-intersects");
        }
    return path;
}

TrackSpec random_spec(std::uint64_t seed, Preset preset)
{
    std::mt19937_64 rng(seed);
    TrackSpec spec;
    spec.seed = seed;
    spec.base_radius = 5.0;
    spec.half_width = 0.4;
    spec.samples_per_lap = 720;

    int n_harm = 0;
    double amp_lo = 0.0, amp_hi = 0.0;
    int f_lo = 2, f_hi = 5;
    switch (preset)
    {
    case Preset::circle:
        return spec;
    case Preset::normal:
        n_harm = uniform_int(rng, 2, 3);
        amp_lo = 0.2;
        amp_hi = 0.6;
        break;
    case Preset::hard:
        n_harm = uniform_int(rng, 3, 4);
        amp_lo = 0.3;
        amp_hi = 0.8;
        f_hi = 7;
        break;
    }
    for (int i = 0; i < n_harm; ++i)
    {
        Harmonic h;
        h.amplitude = uniform_real(rng, amp_lo, amp_hi);
        h.frequency = uniform_int(rng, f_lo, f_hi);
        h.phase = uniform_real(rng, 0.0, kTau);
        spec.harmonics.push_back(h);
    }
    return spec;
}

PathProjection project_onto_path(const RefPath &path, double px, double py,
                                 std::optional<int> hint_index)
{
    const int n_seg = static_cast<int>(path.points.size()) - 1;
    if (n_seg < 1)
        throw Error("path needs at least 2 points");

    int lo = 0, hi = n_seg - 1;
    const bool windowed = hint_index.has_value();
    constexpr int kWindow = 50;

    PathProjection best;
    double best_d2 = std::numeric_limits<double>::infinity();

    const int count = windowed ? 2 * kWindow + 1 : n_seg;
    for (int k = 0; k < count; ++k)
    {
        int i;
        if (windowed)
        {
            i = *hint_index - kWindow + k;
            if (path.closed)
                i = ((i % n_seg) + n_seg) % n_seg;
            else if (i < lo || i > hi)
                continue;
        }
        else
        {
            i = k;
        }
        const auto &a = path.points[i];
        const auto &b = path.points[i + 1];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        if (len2 < 1e-24)
            continue;
        double t = ((px - a.x) * dx + (py - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
        const double fx = a.x + t * dx, fy = a.y + t * dy;
        const double d2 = (px - fx) * (px - fx) + (py - fy) * (py - fy);
        if (d2 < best_d2)
        {
            best_d2 = d2;
            const double seg_len = std::sqrt(len2);
            const double cross = dx * (py - fy) - dy * (px - fx);
            best.s = a.s + t * seg_len;
            best.lateral_offset = (cross >= 0 ? 1.0 : -1.0) * std::sqrt(d2);
            best.path_heading = std::atan2(dy, dx);
            best.segment_index = i;
        }
    }
    return best;
}

std::pair<RefPath, RefPath> lane_boundaries(const RefPath &path, double half_width)
{
    for (const auto &p : path.points)
        if (std::abs(p.curvature) * half_width >= 1.0)
            throw OffsetDegenerate("half_width reaches the osculating radius");

    RefPath left, right;
    left.closed = right.closed = path.closed;
    left.points.resize(path.points.size());
    right.points.resize(path.points.size());
    for (std::size_t i = 0; i < path.points.size(); ++i)
    {
        const auto &p = path.points[i];
        const double nx = -std::sin(p.heading);
        const double ny = std::cos(p.heading);
        left.points[i].x = p.x + half_width * nx;
        left.points[i].y = p.y + half_width * ny;
        right.points[i].x = p.x - half_width * nx;
        right.points[i].y = p.y - half_width * ny;
    }
    fill_arclength(left);
    fill_arclength(right);
    fill_derivatives(left);
    fill_derivatives(right);
    return {std::move(left), std::move(right)};
}

Preset preset_from_name(const std::string &name)
{
    if (name == "circle")
        return Preset::circle;
    if (name == "default" || name == "normal")
        return Preset::normal;
    if (name == "hard")
        return Preset::hard;
    throw ConfigError("unknown preset: " + name);
}

namespace
{

double sig12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

} // namespace

void save_track_json(const TrackSpec &spec, const RefPath &path, const std::string &path_out)
{
    nlohmann::json j;
    j["spec"]["base_radius"] = spec.base_radius;
    j["spec"]["half_width"] = spec.half_width;
    j["spec"]["samples_per_lap"] = spec.samples_per_lap;
    j["spec"]["seed"] = spec.seed;
    j["spec"]["harmonics"] = nlohmann::json::array();
    for (const auto &h : spec.harmonics)
        j["spec"]["harmonics"].push_back(
            {{"amplitude", h.amplitude}, {"frequency", h.frequency}, {"phase", h.phase}});
    j["closed"] = path.closed;
    auto &pts = j["points"] = nlohmann::json::array();
    for (const auto &p : path.points)
        pts.push_back({sig12(p.x), sig12(p.y), sig12(p.s), sig12(p.heading), sig12(p.curvature)});

    std::ofstream out(path_out);
    if (!out)
        throw Error("cannot write track file: " + path_out);
    out << j.dump(1) << "\n";
}

TrackSpec load_track_spec_json(const std::string &file)
{
    std::ifstream in(file);
    if (!in)
        throw Error("cannot read track file: " + file);
    nlohmann::json j;
    in >> j;
    const auto &js = j.contains("spec") ? j["spec"] : j;
    TrackSpec spec;
    spec.base_radius = js.at("base_radius").get<double>();
    spec.half_width = js.at("half_width").get<double>();
    spec.samples_per_lap = js.at("samples_per_lap").get<int>();
    spec.seed = js.at("seed").get<std::uint64_t>();
    for (const auto &h : js.at("harmonics"))
    {
        Harmonic hh;
        hh.amplitude = h.at("amplitude").get<double>();
        hh.frequency = h.at("frequency").get<int>();
        hh.phase = h.at("phase").get<double>();
        spec.harmonics.push_back(hh);
    }
    return spec;
}

} // namespace monosil::track
