#include "monosil/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monosil/calib.hpp"

namespace monosil::harness
{

namespace
{

std::string num9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Fixed perspective<->bird's-eye map used by the optional --through-homography
// path: the bird's-eye top edge comes from a narrower band in the
// perspective view.
calib::Homography perspective_homography()
{
    std::vector<calib::Correspondence> pairs = {
        {{220, 200}, {0, 0}},
        {{420, 200}, {639, 0}},
        {{40, 479}, {0, 479}},
        {{600, 479}, {639, 479}},
    };
    return calib::estimate_homography(pairs);
}

} // namespace

SimResult run_sim(const SimConfig &cfg)
{
    const int steps_per_control =
        static_cast<int>(std::lround(cfg.control_period / cfg.plant_dt));
    if (std::abs(steps_per_control * cfg.plant_dt - cfg.control_period) > 1e-9 ||
        steps_per_control < 1)
        throw ConfigError("control_period must be an integer multiple of plant_dt");
    if (cfg.duration < 0)
        throw ConfigError("duration must be non-negative");

    const track::RefPath center = track::generate_track(cfg.track_spec);
    const auto [left_b, right_b] = track::lane_boundaries(center, cfg.track_spec.half_width);
    const double lap_length = center.length();

    // start on the centerline heading along the path, plus configured offsets
    vehicle::VehicleState state;
    {
        const auto &p0 = center.points[0];
        const double nx = -std::sin(p0.heading), ny = std::cos(p0.heading);
        state.x = p0.x + cfg.initial_lateral_offset * nx;
        state.y = p0.y + cfg.initial_lateral_offset * ny;
        state.phi = vehicle::wrap_angle(p0.heading + cfg.initial_heading_offset);
    }

    std::mt19937_64 rng(cfg.noise_seed);
    const calib::Homography h_be =
        cfg.through_homography ? perspective_homography() : calib::Homography{};
    const calib::Homography h_be_inv =
        cfg.through_homography ? h_be.inverse() : calib::Homography{};

    SimLog log;
    log.termination_reason = "duration";
    std::optional<std::pair<lane::LanePoly, lane::LanePoly>> prev;
    int reuse_count = 0;
    double u_prev = 0.0;
    control::PidState pid_state;
    int hint = 0;
    double progress = 0.0;
    double prev_s = track::project_onto_path(center, state.x, state.y).s;
    int laps = 0;

    const int n_ticks = static_cast<int>(std::floor(cfg.duration / cfg.control_period + 1e-9));
    for (int tick = 0; tick < n_ticks; ++tick)
    {
        const double t = tick * cfg.control_period;

        imaging::ImageGray frame =
            imaging::render_frame(left_b, right_b, {state.x, state.y, state.phi}, cfg.camera,
                                  cfg.line_width, cfg.noise_sigma, rng);
        if (cfg.through_homography)
        {
            const imaging::ImageGray persp =
                calib::warp_image(frame, h_be_inv, cfg.camera.width, cfg.camera.height);
            frame = calib::warp_image(persp, h_be, cfg.camera.width, cfg.camera.height);
        }
        if (cfg.dump_every > 0 && tick % cfg.dump_every == 0 && !cfg.dump_frames_dir.empty())
        {
            char name[64];
            std::snprintf(name, sizeof(name), "frame_%06d.pgm", tick);
            imaging::write_pgm(frame,
                               (std::filesystem::path(cfg.dump_frames_dir) / name).string());
        }

        const imaging::ImageGray mask = imaging::morphology(
            imaging::threshold_binary(imaging::gaussian_blur(frame, cfg.preprocess.blur_sigma),
                                      cfg.preprocess.threshold),
            imaging::MorphOp::close, cfg.preprocess.close_radius);

        lane::LaneDetection det;
        bool lane_ok = true;
        try
        {
            det = lane::detect_lanes(mask, cfg.detector, cfg.camera, prev);
        }
        catch (const BothLanesLost &)
        {
            log.termination_reason = "lane_lost";
            break;
        }
        const bool fresh = det.left.support > 0 || det.right.support > 0;
        reuse_count = fresh ? 0 : reuse_count + 1;
        if (reuse_count > cfg.lane_reuse_cap)
        {
            log.termination_reason = "lane_lost";
            break;
        }
        lane_ok = fresh && det.left.support > 0 && det.right.support > 0;
        prev = std::make_pair(det.left, det.right);

        control::ControlCommand cmd;
        control::MpcDiagnostics diag;
        if (cfg.controller == ControllerKind::mpc)
        {
            cmd = control::mpc_control(det.center, state, cfg.vehicle_params, cfg.mpc,
                                       cfg.control_period, u_prev, diag);
        }
        else
        {
            cmd = control::pid_control(det.center, state, cfg.vehicle_params, cfg.pid,
                                       cfg.control_period, pid_state);
        }
        u_prev = cmd.delta_f;

        // truth channel, used only for metrics
        const track::PathProjection proj =
            track::project_onto_path(center, state.x, state.y, hint);
        hint = proj.segment_index;
        double ds = proj.s - prev_s;
        if (ds < -0.5 * lap_length)
            ds += lap_length;
        if (ds > 0.5 * lap_length)
            ds -= lap_length;
        progress += ds;
        prev_s = proj.s;
        laps = static_cast<int>(std::floor(progress / lap_length));

        TickRecord rec;
        rec.t = t;
        rec.x = state.x;
        rec.y = state.y;
        rec.phi = state.phi;
        rec.v_x = cfg.vehicle_params.v_x;
        rec.v_y = state.v_y;
        rec.phi_dot = state.phi_dot;
        rec.delta_cmd = cmd.delta_f;
        rec.accel_cmd = cmd.accel;
        rec.lateral_err = proj.lateral_offset;
        rec.heading_err = vehicle::wrap_angle(state.phi - proj.path_heading);
        rec.lane_valid = lane_ok;
        rec.cost = diag.cost;
        rec.clamped = diag.clamped;
        log.records.push_back(rec);

        try
        {
            for (int i = 0; i < steps_per_control; ++i)
                state = vehicle::step(state, cmd.delta_f, cfg.vehicle_params, cfg.plant_dt);
        }
        catch (const NonFiniteState &)
        {
            log.termination_reason = "nonfinite";
            break;
        }
    }

    SimResult result;
    result.metrics = compute_metrics(log);
    result.metrics.laps_completed = laps;
    result.log = std::move(log);
    return result;
}

Metrics compute_metrics(const SimLog &log)
{
    Metrics m;
    m.ticks = static_cast<int>(log.records.size());
    if (log.records.empty())
        return m;
    int valid = 0;
    for (const auto &r : log.records)
    {
        m.lateral_msd += r.lateral_err * r.lateral_err;
        const double he = vehicle::wrap_angle(r.heading_err);
        m.angular_msd += he * he;
        valid += r.lane_valid ? 1 : 0;
    }
    m.lateral_msd /= m.ticks;
    m.angular_msd /= m.ticks;
    m.lane_valid_fraction = static_cast<double>(valid) / m.ticks;
    return m;
}

Comparison compare_controllers(const std::vector<std::uint64_t> &seeds, const SimConfig &base_cfg)
{
    Comparison cmp;
    int pid_n = 0, mpc_n = 0;
    for (const auto seed : seeds)
    {
        ComparisonRow row;
        row.seed = seed;
        SimConfig cfg = base_cfg;
        cfg.track_spec = track::random_spec(seed, track::Preset::normal);

        for (const auto kind : {ControllerKind::pid, ControllerKind::mpc})
        {
            cfg.controller = kind;
            Metrics metrics;
            double peak = 0.0;
            bool ok = false;
            SimLog log;
            try
            {
                SimResult res = run_sim(cfg);
                metrics = res.metrics;
                ok = res.log.termination_reason == "duration";
                for (const auto &r : res.log.records)
                    peak = std::max(peak, std::abs(r.phi_dot));
                log = std::move(res.log);
            }
            catch (const Error &)
            {
                ok = false;
            }
            (kind == ControllerKind::pid ? cmp.pid_logs : cmp.mpc_logs).push_back(std::move(log));
            if (kind == ControllerKind::pid)
            {
                row.pid = metrics;
                row.pid_peak_yaw_rate = peak;
                row.pid_ok = ok;
            }
            else
            {
                row.mpc = metrics;
                row.mpc_peak_yaw_rate = peak;
                row.mpc_ok = ok;
            }
        }
        cmp.rows.push_back(row);
        if (row.pid_ok)
        {
            cmp.pid_aggregate.lateral_msd += row.pid.lateral_msd;
            cmp.pid_aggregate.angular_msd += row.pid.angular_msd;
            ++pid_n;
        }
        if (row.mpc_ok)
        {
            cmp.mpc_aggregate.lateral_msd += row.mpc.lateral_msd;
            cmp.mpc_aggregate.angular_msd += row.mpc.angular_msd;
            ++mpc_n;
        }
    }
    if (pid_n > 0)
    {
        cmp.pid_aggregate.lateral_msd /= pid_n;
        cmp.pid_aggregate.angular_msd /= pid_n;
    }
    if (mpc_n > 0)
    {
        cmp.mpc_aggregate.lateral_msd /= mpc_n;
        cmp.mpc_aggregate.angular_msd /= mpc_n;
    }
    return cmp;
}

void write_csv(const SimLog &log, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write CSV: " + path);
    out << "t,x,y,phi,vx,vy,phidot,delta_cmd,accel_cmd,lateral_err,heading_err,"
           "lane_valid,cost,clamped\n";
    for (const auto &r : log.records)
    {
        out << num9(r.t) << ',' << num9(r.x) << ',' << num9(r.y) << ',' << num9(r.phi) << ','
            << num9(r.v_x) << ',' << num9(r.v_y) << ',' << num9(r.phi_dot) << ','
            << num9(r.delta_cmd) << ',' << num9(r.accel_cmd) << ',' << num9(r.lateral_err) << ','
            << num9(r.heading_err) << ',' << (r.lane_valid ? 1 : 0) << ',' << num9(r.cost) << ','
            << (r.clamped ? 1 : 0) << '\n';
    }
}

SimLog read_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read CSV: " + path);
    SimLog log;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ','))
            v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() != 14)
            throw Error("malformed CSV row in " + path);
        TickRecord r;
        r.t = v[0];
        r.x = v[1];
        r.y = v[2];
        r.phi = v[3];
        r.v_x = v[4];
        r.v_y = v[5];
        r.phi_dot = v[6];
        r.delta_cmd = v[7];
        r.accel_cmd = v[8];
        r.lateral_err = v[9];
        r.heading_err = v[10];
        r.lane_valid = v[11] != 0;
        r.cost = v[12];
        r.clamped = v[13] != 0;
        log.records.push_back(r);
    }
    return log;
}

std::string comparison_table_text(const Comparison &cmp)
{
    char buf[256];
    std::ostringstream out;
    out << "Metric                          | PID          | MPC\n";
    out << "--------------------------------+--------------+-------------\n";
    std::snprintf(buf, sizeof(buf), "Lateral Mean Squared Deviation  | %-12.6g | %-12.6g\n",
                  cmp.pid_aggregate.lateral_msd, cmp.mpc_aggregate.lateral_msd);
    out << buf;
    std::snprintf(buf, sizeof(buf), "Angular Mean Squared Deviation  | %-12.6g | %-12.6g\n",
                  cmp.pid_aggregate.angular_msd, cmp.mpc_aggregate.angular_msd);
    out << buf;
    return out.str();
}

void write_comparison_csv(const Comparison &cmp, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write CSV: " + path);
    out << "seed,pid_lateral_msd,pid_angular_msd,pid_peak_yaw_rate,pid_ok,"
           "mpc_lateral_msd,mpc_angular_msd,mpc_peak_yaw_rate,mpc_ok\n";
    for (const auto &r : cmp.rows)
    {
        out << r.seed << ',' << num9(r.pid.lateral_msd) << ',' << num9(r.pid.angular_msd) << ','
            << num9(r.pid_peak_yaw_rate) << ',' << (r.pid_ok ? 1 : 0) << ','
            << num9(r.mpc.lateral_msd) << ',' << num9(r.mpc.angular_msd) << ','
            << num9(r.mpc_peak_yaw_rate) << ',' << (r.mpc_ok ? 1 : 0) << '\n';
    }
    out << "aggregate," << num9(cmp.pid_aggregate.lateral_msd) << ','
        << num9(cmp.pid_aggregate.angular_msd) << ",,," << num9(cmp.mpc_aggregate.lateral_msd)
        << ',' << num9(cmp.mpc_aggregate.angular_msd) << ",,\n";
}

} // namespace monosil::harness
