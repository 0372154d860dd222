#ifndef MONOSIL_HARNESS_HPP_
#define MONOSIL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monosil/control.hpp"
#include "monosil/imaging.hpp"
#include "monosil/lane.hpp"
#include "monosil/track.hpp"
#include "monosil/vehicle.hpp"

namespace monosil::harness
{

enum class ControllerKind
{
    pid,
    mpc
};

struct PreprocessConfig
{
    double blur_sigma = 1.5;
    int threshold = 100;
    int close_radius = 2;
};

struct SimConfig
{
    track::TrackSpec track_spec;
    ControllerKind controller = ControllerKind::pid;
    double duration = 40.0;       // s
    double plant_dt = 0.01;       // s
    double control_period = 0.05; // s, integer multiple of plant_dt
    vehicle::VehicleParams vehicle_params;
    imaging::CameraModel camera;
    lane::SlidingWindowConfig detector;
    PreprocessConfig preprocess;
    control::MpcConfig mpc;
    control::PidGains pid;
    double line_width = 0.06;  // m
    double noise_sigma = 2.0;
    std::uint64_t noise_seed = 1;
    double initial_lateral_offset = 0.0; // m
    double initial_heading_offset = 0.0; // rad
    int lane_reuse_cap = 10;
    bool through_homography = false;

    // Optional frame dumping, wired from the CLI.
    std::string dump_frames_dir;
    int dump_every = 0;
};

struct TickRecord
{
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double v_x = 0.0;
    double v_y = 0.0;
    double phi_dot = 0.0;
    double delta_cmd = 0.0;
    double accel_cmd = 0.0;
    double lateral_err = 0.0;
    double heading_err = 0.0;
    bool lane_valid = false;
    double cost = 0.0;
    bool clamped = false;
};

struct Metrics
{
    double lateral_msd = 0.0;  // m^2
    double angular_msd = 0.0;  // rad^2
    double lane_valid_fraction = 0.0;
    int laps_completed = 0;
    int ticks = 0;
};

struct SimLog
{
    std::vector<TickRecord> records;
    std::string termination_reason; // "duration", "nonfinite", "lane_lost"
};

struct SimResult
{
    SimLog log;
    Metrics metrics;
};

struct ComparisonRow
{
    std::uint64_t seed = 0;
    Metrics pid;
    Metrics mpc;
    double pid_peak_yaw_rate = 0.0;
    double mpc_peak_yaw_rate = 0.0;
    bool pid_ok = false;
    bool mpc_ok = false;
};

struct Comparison
{
    std::vector<ComparisonRow> rows;
    Metrics pid_aggregate;
    Metrics mpc_aggregate;
    // per-run logs in seed order, for overlays and post-hoc checks
    std::vector<SimLog> pid_logs;
    std::vector<SimLog> mpc_logs;
};

SimResult run_sim(const SimConfig &cfg);

Metrics compute_metrics(const SimLog &log);

Comparison compare_controllers(const std::vector<std::uint64_t> &seeds, const SimConfig &base_cfg);

void write_csv(const SimLog &log, const std::string &path);
SimLog read_csv(const std::string &path);

std::string comparison_table_text(const Comparison &cmp);
void write_comparison_csv(const Comparison &cmp, const std::string &path);

// Standalone SVG artifacts derived from the log.
void emit_trajectory_svg(const SimLog &log, const track::RefPath &center, double half_width,
                         const std::string &path);
void emit_speed_svg(const SimLog &log, const std::string &path);
void emit_yaw_rate_svg(const SimLog &log, const std::string &path);
void emit_overlay_svg(const std::vector<SimLog> &pid_logs, const std::vector<SimLog> &mpc_logs,
                      const std::string &path);

SimConfig load_config_json(const std::string &file);
SimConfig parse_config_json(const std::string &text);
std::string default_config_json();

} // namespace monosil::harness

#endif
