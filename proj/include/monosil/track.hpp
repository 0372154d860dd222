#ifndef MONOSIL_TRACK_HPP_
#define MONOSIL_TRACK_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monosil/errors.hpp"

namespace monosil::track
{

struct Harmonic
{
    double amplitude = 0.0; // m
    int frequency = 1;      // integer cycles per lap so the loop closes
    double phase = 0.0;     // rad
};

struct TrackSpec
{
    double base_radius = 5.0;
    std::vector<Harmonic> harmonics;
    double half_width = 0.4;
    int samples_per_lap = 720;
    std::uint64_t seed = 0;
};

struct PathPoint
{
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;         // arc length from the start
    double heading = 0.0;   // rad
    double curvature = 0.0; // 1/m
};

struct RefPath
{
    std::vector<PathPoint> points;
    bool closed = false;

    double length() const { return points.empty() ? 0.0 : points.back().s; }
};

struct PathProjection
{
    double s = 0.0;
    double lateral_offset = 0.0; // signed, positive left of the path direction
    double path_heading = 0.0;
    int segment_index = 0;
};

enum class Preset
{
    circle,
    normal,
    hard
};

// Samples r(theta) = base_radius + sum A_i sin(f_i theta + phi_i) over one lap.
// Throws SelfIntersecting if the resulting polyline crosses itself.
RefPath generate_track(const TrackSpec &spec);

TrackSpec random_spec(std::uint64_t seed, Preset preset);

PathProjection project_onto_path(const RefPath &path, double px, double py,
                                 std::optional<int> hint_index = std::nullopt);

// Offset curves at +/- half_width along the local normal.
std::pair<RefPath, RefPath> lane_boundaries(const RefPath &path, double half_width);

Preset preset_from_name(const std::string &name);

void save_track_json(const TrackSpec &spec, const RefPath &path, const std::string &path_out);
TrackSpec load_track_spec_json(const std::string &file);

} // namespace monosil::track

#endif
