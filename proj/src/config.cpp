#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "monosil/harness.hpp"

namespace monosil::harness
{

namespace
{

using nlohmann::json;

// unknown keys are rejected so config typos fail fast
void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
    for (const auto &item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
}

template <typename T>
void opt(const json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

void parse_track(const json &j, track::TrackSpec &spec)
{
    check_keys(j,
               {"file", "preset", "seed", "base_radius", "harmonics", "half_width",
                "samples_per_lap"},
               "track");
    if (j.contains("file"))
    {
        spec = track::load_track_spec_json(j.at("file").get<std::string>());
        return;
    }
    if (j.contains("preset"))
    {
        std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 1;
        spec = track::random_spec(seed, track::preset_from_name(j.at("preset").get<std::string>()));
        // explicit geometry keys still override the preset
    }
    opt(j, "seed", spec.seed);
    opt(j, "base_radius", spec.base_radius);
    opt(j, "half_width", spec.half_width);
    opt(j, "samples_per_lap", spec.samples_per_lap);
    if (j.contains("harmonics"))
    {
        spec.harmonics.clear();
        for (const auto &h : j.at("harmonics"))
        {
            check_keys(h, {"amplitude", "frequency", "phase"}, "track.harmonics[]");
            track::Harmonic hh;
            opt(h, "amplitude", hh.amplitude);
            opt(h, "frequency", hh.frequency);
            opt(h, "phase", hh.phase);
            spec.harmonics.push_back(hh);
        }
    }
}

} // namespace

SimConfig parse_config_json(const std::string &text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }

    check_keys(j,
               {"track", "controller", "duration", "plant_dt", "control_period", "vehicle",
                "camera", "detector", "preprocess", "mpc", "pid", "line_width", "noise_sigma",
                "noise_seed", "initial_lateral_offset", "initial_heading_offset",
                "lane_reuse_cap", "through_homography"},
               "config");

    SimConfig cfg;
    try
    {
        if (j.contains("track"))
            parse_track(j.at("track"), cfg.track_spec);
        if (j.contains("controller"))
        {
            const auto name = j.at("controller").get<std::string>();
            if (name == "pid")
                cfg.controller = ControllerKind::pid;
            else if (name == "mpc")
                cfg.controller = ControllerKind::mpc;
            else
                throw ConfigError("controller must be \"pid\" or \"mpc\"");
        }
        opt(j, "duration", cfg.duration);
        opt(j, "plant_dt", cfg.plant_dt);
        opt(j, "control_period", cfg.control_period);
        if (j.contains("vehicle"))
        {
            const auto &v = j.at("vehicle");
            check_keys(v,
                       {"m", "i_z", "d_front", "d_rear", "c_cf", "c_cr", "v_x", "delta_max",
                        "ddelta_max"},
                       "vehicle");
            auto &p = cfg.vehicle_params;
            opt(v, "m", p.m);
            opt(v, "i_z", p.i_z);
            opt(v, "d_front", p.d_front);
            opt(v, "d_rear", p.d_rear);
            opt(v, "c_cf", p.c_cf);
            opt(v, "c_cr", p.c_cr);
            opt(v, "v_x", p.v_x);
            opt(v, "delta_max", p.delta_max);
            opt(v, "ddelta_max", p.ddelta_max);
        }
        if (j.contains("camera"))
        {
            const auto &c = j.at("camera");
            check_keys(c, {"px_per_m", "origin_x", "origin_y", "width", "height"}, "camera");
            opt(c, "px_per_m", cfg.camera.px_per_m);
            opt(c, "origin_x", cfg.camera.origin_x);
            opt(c, "origin_y", cfg.camera.origin_y);
            opt(c, "width", cfg.camera.width);
            opt(c, "height", cfg.camera.height);
        }
        if (j.contains("detector"))
        {
            const auto &d = j.at("detector");
            check_keys(d,
                       {"n_windows", "margin", "min_pixels_recenter", "min_support", "fit_order",
                        "half_width"},
                       "detector");
            opt(d, "n_windows", cfg.detector.n_windows);
            opt(d, "margin", cfg.detector.margin);
            opt(d, "min_pixels_recenter", cfg.detector.min_pixels_recenter);
            opt(d, "min_support", cfg.detector.min_support);
            opt(d, "fit_order", cfg.detector.fit_order);
            opt(d, "half_width", cfg.detector.half_width);
        }
        if (j.contains("preprocess"))
        {
            const auto &pp = j.at("preprocess");
            check_keys(pp, {"blur_sigma", "threshold", "close_radius"}, "preprocess");
            opt(pp, "blur_sigma", cfg.preprocess.blur_sigma);
            opt(pp, "threshold", cfg.preprocess.threshold);
            opt(pp, "close_radius", cfg.preprocess.close_radius);
        }
        if (j.contains("mpc"))
        {
            const auto &m = j.at("mpc");
            check_keys(m,
                       {"n_p", "n_c", "q_y", "q_phi", "r_du", "kp_v", "v_target",
                        "relinearize_horizon"},
                       "mpc");
            opt(m, "n_p", cfg.mpc.n_p);
            opt(m, "n_c", cfg.mpc.n_c);
            opt(m, "q_y", cfg.mpc.q_y);
            opt(m, "q_phi", cfg.mpc.q_phi);
            opt(m, "r_du", cfg.mpc.r_du);
            opt(m, "kp_v", cfg.mpc.kp_v);
            opt(m, "v_target", cfg.mpc.v_target);
            opt(m, "relinearize_horizon", cfg.mpc.relinearize_horizon);
        }
        if (j.contains("pid"))
        {
            const auto &g = j.at("pid");
            check_keys(g, {"kp", "ki", "kd", "kp_v", "v_target", "lookahead", "integral_clamp"},
                       "pid");
            opt(g, "kp", cfg.pid.kp);
            opt(g, "ki", cfg.pid.ki);
            opt(g, "kd", cfg.pid.kd);
            opt(g, "kp_v", cfg.pid.kp_v);
            opt(g, "v_target", cfg.pid.v_target);
            opt(g, "lookahead", cfg.pid.lookahead);
            opt(g, "integral_clamp", cfg.pid.integral_clamp);
        }
        opt(j, "line_width", cfg.line_width);
        opt(j, "noise_sigma", cfg.noise_sigma);
        opt(j, "noise_seed", cfg.noise_seed);
        opt(j, "initial_lateral_offset", cfg.initial_lateral_offset);
        opt(j, "initial_heading_offset", cfg.initial_heading_offset);
        opt(j, "lane_reuse_cap", cfg.lane_reuse_cap);
        opt(j, "through_homography", cfg.through_homography);
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }

    if (cfg.mpc.n_c < 1 || cfg.mpc.n_c > cfg.mpc.n_p)
        throw ConfigError("mpc requires 1 <= n_c <= n_p");
    if (cfg.vehicle_params.v_x <= 0.1)
        throw ConfigError("vehicle.v_x must exceed 0.1 m/s");
    if (cfg.detector.fit_order != 2 && cfg.detector.fit_order != 3)
        throw ConfigError("detector.fit_order must be 2 or 3");
    return cfg;
}

SimConfig load_config_json(const std::string &file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config file: " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string default_config_json()
{
    const SimConfig cfg;
    json j;
    j["track"] = {{"preset", "default"}, {"seed", 1}};
    j["controller"] = "pid";
    j["duration"] = cfg.duration;
    j["plant_dt"] = cfg.plant_dt;
    j["control_period"] = cfg.control_period;
    j["vehicle"] = {{"m", cfg.vehicle_params.m},
                    {"i_z", cfg.vehicle_params.i_z},
                    {"d_front", cfg.vehicle_params.d_front},
                    {"d_rear", cfg.vehicle_params.d_rear},
                    {"c_cf", cfg.vehicle_params.c_cf},
                    {"c_cr", cfg.vehicle_params.c_cr},
                    {"v_x", cfg.vehicle_params.v_x},
                    {"delta_max", cfg.vehicle_params.delta_max},
                    {"ddelta_max", cfg.vehicle_params.ddelta_max}};
    j["camera"] = {{"px_per_m", cfg.camera.px_per_m},
                   {"origin_x", cfg.camera.origin_x},
                   {"origin_y", cfg.camera.origin_y},
                   {"width", cfg.camera.width},
                   {"height", cfg.camera.height}};
    j["detector"] = {{"n_windows", cfg.detector.n_windows},
                     {"margin", cfg.detector.margin},
                     {"min_pixels_recenter", cfg.detector.min_pixels_recenter},
                     {"min_support", cfg.detector.min_support},
                     {"fit_order", cfg.detector.fit_order},
                     {"half_width", cfg.detector.half_width}};
    j["preprocess"] = {{"blur_sigma", cfg.preprocess.blur_sigma},
                       {"threshold", cfg.preprocess.threshold},
                       {"close_radius", cfg.preprocess.close_radius}};
    j["mpc"] = {{"n_p", cfg.mpc.n_p},
                {"n_c", cfg.mpc.n_c},
                {"q_y", cfg.mpc.q_y},
                {"q_phi", cfg.mpc.q_phi},
                {"r_du", cfg.mpc.r_du},
                {"kp_v", cfg.mpc.kp_v},
                {"v_target", cfg.mpc.v_target},
                {"relinearize_horizon", cfg.mpc.relinearize_horizon}};
    j["pid"] = {{"kp", cfg.pid.kp},
                {"ki", cfg.pid.ki},
                {"kd", cfg.pid.kd},
                {"kp_v", cfg.pid.kp_v},
                {"v_target", cfg.pid.v_target},
                {"lookahead", cfg.pid.lookahead},
                {"integral_clamp", cfg.pid.integral_clamp}};
    j["line_width"] = cfg.line_width;
    j["noise_sigma"] = cfg.noise_sigma;
    j["noise_seed"] = cfg.noise_seed;
    j["initial_lateral_offset"] = cfg.initial_lateral_offset;
    j["initial_heading_offset"] = cfg.initial_heading_offset;
    j["lane_reuse_cap"] = cfg.lane_reuse_cap;
    j["through_homography"] = cfg.through_homography;
    return j.dump(2) + "\n";
}

} // namespace monosil::harness
