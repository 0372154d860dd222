#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "monosil/harness.hpp"

namespace monosil::harness
{

namespace
{

constexpr int kWidth = 800;
constexpr int kHeight = 600;
constexpr double kMarginPx = 50.0;

std::string num(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

struct Mapper
{
    Range xr, yr;

    double mx(double x) const
    {
        return kMarginPx + (x - xr.lo) / xr.span() * (kWidth - 2 * kMarginPx);
    }
    double my(double y) const
    {
        // SVG y grows downward
        return kHeight - kMarginPx - (y - yr.lo) / yr.span() * (kHeight - 2 * kMarginPx);
    }
};

std::string polyline(const Mapper &m, const std::vector<std::pair<double, double>> &pts,
                     const char *color, double width)
{
    std::string out = "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"";
    out += num(width);
    out += "\" points=\"";
    for (const auto &[x, y] : pts)
    {
        out += num(m.mx(x));
        out += ',';
        out += num(m.my(y));
        out += ' ';
    }
    out += "\"/>\n";
    return out;
}

std::string axes(const Mapper &m, const std::string &x_label, const std::string &y_label)
{
    std::string out;
    out += "<rect x=\"" + num(kMarginPx) + "\" y=\"" + num(kMarginPx) + "\" width=\"" +
           num(kWidth - 2 * kMarginPx) + "\" height=\"" + num(kHeight - 2 * kMarginPx) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
    out += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"" + num(kHeight - 12.0) +
           "\" text-anchor=\"middle\" font-size=\"14\">" + x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(kHeight / 2.0) +
           "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 " +
           num(kHeight / 2.0) + ")\">" + y_label + "</text>\n";
    out += "<text x=\"" + num(kMarginPx) + "\" y=\"" + num(kHeight - 30.0) +
           "\" font-size=\"11\">" + num(m.xr.lo) + "</text>\n";
    out += "<text x=\"" + num(kWidth - kMarginPx) + "\" y=\"" + num(kHeight - 30.0) +
           "\" text-anchor=\"end\" font-size=\"11\">" + num(m.xr.hi) + "</text>\n";
    out += "<text x=\"" + num(kMarginPx - 4.0) + "\" y=\"" + num(kHeight - kMarginPx) +
           "\" text-anchor=\"end\" font-size=\"11\">" + num(m.yr.lo) + "</text>\n";
    out += "<text x=\"" + num(kMarginPx - 4.0) + "\" y=\"" + num(kMarginPx + 4.0) +
           "\" text-anchor=\"end\" font-size=\"11\">" + num(m.yr.hi) + "</text>\n";
    return out;
}

void write_svg(const std::string &path, const std::string &body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write SVG: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\">\n"
        << body << "</svg>\n";
}

std::vector<std::pair<double, double>> path_points(const track::RefPath &p)
{
    std::vector<std::pair<double, double>> out;
    out.reserve(p.points.size());
    for (const auto &q : p.points)
        out.emplace_back(q.x, q.y);
    return out;
}

} // namespace

void emit_trajectory_svg(const SimLog &log, const track::RefPath &center, double half_width,
                         const std::string &path)
{
    const auto [left, right] = track::lane_boundaries(center, half_width);
    Mapper m;
    for (const auto &p : center.points)
    {
        m.xr.add(p.x);
        m.yr.add(p.y);
    }
    for (const auto &r : log.records)
    {
        m.xr.add(r.x);
        m.yr.add(r.y);
    }
    m.xr.lo -= half_width;
    m.xr.hi += half_width;
    m.yr.lo -= half_width;
    m.yr.hi += half_width;

    std::vector<std::pair<double, double>> traj;
    traj.reserve(log.records.size());
    for (const auto &r : log.records)
        traj.emplace_back(r.x, r.y);

    std::string body = axes(m, "x [m]", "y [m]");
    body += polyline(m, path_points(left), "#999", 1.0);
    body += polyline(m, path_points(right), "#999", 1.0);
    body += polyline(m, path_points(center), "#ccc", 0.5);
    body += polyline(m, traj, "#d62728", 1.5);
    write_svg(path, body);
}

void emit_speed_svg(const SimLog &log, const std::string &path)
{
    Mapper m;
    std::vector<std::pair<double, double>> pts;
    for (const auto &r : log.records)
    {
        const double v = std::hypot(r.v_x, r.v_y);
        m.xr.add(r.t);
        m.yr.add(v);
        pts.emplace_back(r.t, v);
    }
    m.yr.add(0.0);
    std::string body = axes(m, "t [s]", "speed [m/s]");
    body += polyline(m, pts, "#1f77b4", 1.5);
    write_svg(path, body);
}

void emit_yaw_rate_svg(const SimLog &log, const std::string &path)
{
    Mapper m;
    std::vector<std::pair<double, double>> pts;
    for (const auto &r : log.records)
    {
        m.xr.add(r.t);
        m.yr.add(r.phi_dot);
        pts.emplace_back(r.t, r.phi_dot);
    }
    m.yr.add(0.0);
    std::string body = axes(m, "t [s]", "yaw rate [rad/s]");
    body += polyline(m, pts, "#2ca02c", 1.5);
    write_svg(path, body);
}

void emit_overlay_svg(const std::vector<SimLog> &pid_logs, const std::vector<SimLog> &mpc_logs,
                      const std::string &path)
{
    Mapper m;
    for (const auto *group : {&pid_logs, &mpc_logs})
        for (const auto &log : *group)
            for (const auto &r : log.records)
            {
                m.xr.add(r.x);
                m.yr.add(r.y);
            }

    std::string body = axes(m, "x [m]", "y [m]");
    for (const auto &log : pid_logs)
    {
        std::vector<std::pair<double, double>> pts;
        for (const auto &r : log.records)
            pts.emplace_back(r.x, r.y);
        body += polyline(m, pts, "#d62728", 1.0);
    }
    for (const auto &log : mpc_logs)
    {
        std::vector<std::pair<double, double>> pts;
        for (const auto &r : log.records)
            pts.emplace_back(r.x, r.y);
        body += polyline(m, pts, "#1f77b4", 1.0);
    }
    write_svg(path, body);
}

} // namespace monosil::harness
