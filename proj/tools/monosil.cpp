#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "monosil/calib.hpp"
#include "monosil/harness.hpp"

namespace fs = std::filesystem;
using namespace monosil;

namespace
{

std::vector<std::uint64_t> parse_seed_list(const std::string &arg)
{
    // "1..5" or "1,2,7"
    std::vector<std::uint64_t> seeds;
    const auto dots = arg.find("..");
    if (dots != std::string::npos)
    {
        const std::uint64_t lo = std::stoull(arg.substr(0, dots));
        const std::uint64_t hi = std::stoull(arg.substr(dots + 2));
        for (std::uint64_t s = lo; s <= hi; ++s)
            seeds.push_back(s);
        return seeds;
    }
    std::size_t pos = 0;
    while (pos < arg.size())
    {
        const auto comma = arg.find(',', pos);
        seeds.push_back(std::stoull(arg.substr(pos, comma - pos)));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return seeds;
}

int cmd_generate_track(std::uint64_t seed, const std::string &preset, const std::string &out)
{
    const auto spec = track::random_spec(seed, track::preset_from_name(preset));
    const auto path = track::generate_track(spec);
    track::save_track_json(spec, path, out);
    std::printf("wrote %s (%zu samples, length %.3f m)\n", out.c_str(), path.points.size(),
                path.length());
    return 0;
}

int cmd_run(const std::string &config_file, const std::string &controller,
            const std::string &out_dir, int dump_every, bool through_homography)
{
    harness::SimConfig cfg =
        config_file.empty() ? harness::parse_config_json(harness::default_config_json())
                            : harness::load_config_json(config_file);
    if (controller == "pid")
        cfg.controller = harness::ControllerKind::pid;
    else if (controller == "mpc")
        cfg.controller = harness::ControllerKind::mpc;
    else if (!controller.empty())
        throw ConfigError("controller must be pid or mpc");
    if (through_homography)
        cfg.through_homography = true;

    fs::create_directories(out_dir);
    if (dump_every > 0)
    {
        cfg.dump_every = dump_every;
        cfg.dump_frames_dir = (fs::path(out_dir) / "frames").string();
        fs::create_directories(cfg.dump_frames_dir);
    }

    const harness::SimResult res = harness::run_sim(cfg);
    harness::write_csv(res.log, (fs::path(out_dir) / "run.csv").string());

    const auto center = track::generate_track(cfg.track_spec);
    harness::emit_trajectory_svg(res.log, center, cfg.track_spec.half_width,
                                 (fs::path(out_dir) / "trajectory.svg").string());
    harness::emit_speed_svg(res.log, (fs::path(out_dir) / "speed.svg").string());
    harness::emit_yaw_rate_svg(res.log, (fs::path(out_dir) / "yaw_rate.svg").string());

    std::printf("ticks: %d  termination: %s\n", res.metrics.ticks,
                res.log.termination_reason.c_str());
    std::printf("lateral MSD: %.6g m^2  angular MSD: %.6g rad^2  lane valid: %.3f  laps: %d\n",
                res.metrics.lateral_msd, res.metrics.angular_msd,
                res.metrics.lane_valid_fraction, res.metrics.laps_completed);
    return 0;
}

int cmd_compare(const std::string &seeds_arg, const std::string &config_file,
                const std::string &out_dir)
{
    harness::SimConfig cfg =
        config_file.empty() ? harness::parse_config_json(harness::default_config_json())
                            : harness::load_config_json(config_file);
    const auto seeds = parse_seed_list(seeds_arg);
    if (seeds.empty())
        throw ConfigError("need at least one seed");

    fs::create_directories(out_dir);
    const harness::Comparison cmp = harness::compare_controllers(seeds, cfg);
    harness::write_comparison_csv(cmp, (fs::path(out_dir) / "comparison.csv").string());
    const std::string table = harness::comparison_table_text(cmp);
    {
        std::ofstream out((fs::path(out_dir) / "comparison.txt").string(), std::ios::binary);
        out << table;
    }
    std::fputs(table.c_str(), stdout);

    harness::emit_overlay_svg(cmp.pid_logs, cmp.mpc_logs,
                              (fs::path(out_dir) / "overlay.svg").string());
    return 0;
}

int cmd_detect(const std::string &image_file, const std::string &config_file,
               const std::string &out_file)
{
    harness::SimConfig cfg =
        config_file.empty() ? harness::parse_config_json(harness::default_config_json())
                            : harness::load_config_json(config_file);
    const imaging::ImageGray img = imaging::read_pgm(image_file);
    const imaging::ImageGray mask = imaging::morphology(
        imaging::threshold_binary(imaging::gaussian_blur(img, cfg.preprocess.blur_sigma),
                                  cfg.preprocess.threshold),
        imaging::MorphOp::close, cfg.preprocess.close_radius);
    const lane::LaneDetection det = lane::detect_lanes(mask, cfg.detector, cfg.camera);

    nlohmann::json j;
    const std::pair<const char *, const lane::LanePoly *> sides[] = {
        {"left", &det.left}, {"right", &det.right}, {"center", &det.center}};
    for (const auto &[name, poly] : sides)
    {
        j[name] = {{"a", poly->a},  {"b", poly->b},           {"c", poly->c},
                   {"a3", poly->a3}, {"valid", poly->valid},  {"support", poly->support}};
    }
    std::ofstream out(out_file);
    if (!out)
        throw Error("cannot write " + out_file);
    out << j.dump(2) << "\n";
    std::printf("wrote %s\n", out_file.c_str());
    return 0;
}

int cmd_calib_demo(double tilt, const std::string &out_dir)
{
    // synthetic chessboard corners under a configurable projective distortion
    const auto grid = calib::make_grid(5, 4, 40.0, {240.0, 140.0});

    calib::Homography h_true;
    h_true.h << 1.0, 0.05, 10.0,
        0.02, 1.0, 6.0,
        tilt, tilt * 0.5, 1.0;

    std::vector<calib::Correspondence> pairs;
    for (const auto &c : grid.corners)
        pairs.push_back({calib::apply_homography(h_true, c), c});

    const calib::Homography h_est = calib::estimate_homography(pairs);
    std::printf("estimated homography (row-major):\n");
    for (int r = 0; r < 3; ++r)
        std::printf("  %.10g %.10g %.10g\n", h_est.h(r, 0), h_est.h(r, 1), h_est.h(r, 2));

    const auto rep = calib::verify_grid_spacing(grid);
    std::printf("grid spacing: mean_dx %.6g px, mean_dy %.6g px, max_rel_dev %.6g\n", rep.mean_dx,
                rep.mean_dy, rep.max_rel_dev);

    if (!out_dir.empty())
    {
        fs::create_directories(out_dir);
        // checker image distorted with the true map, then rectified back
        imaging::ImageGray checker(640, 480);
        for (int y = 0; y < 480; ++y)
            for (int x = 0; x < 640; ++x)
                checker.at(x, y) = ((x / 40 + y / 40) % 2) ? 255 : 0;
        const auto distorted = calib::warp_image(checker, h_true.inverse(), 640, 480);
        const auto rectified = calib::warp_image(distorted, h_est, 640, 480);
        imaging::write_pgm(distorted, (fs::path(out_dir) / "before.pgm").string());
        imaging::write_pgm(rectified, (fs::path(out_dir) / "after.pgm").string());
        std::printf("wrote %s/{before,after}.pgm\n", out_dir.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"monosil: software-in-the-loop lane tracking testbed"};
    app.require_subcommand(1);

    auto *gen = app.add_subcommand("generate-track", "Generate a randomized closed track");
    std::uint64_t gen_seed = 1;
    std::string gen_preset = "default";
    std::string gen_out = "track.json";
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--preset", gen_preset, "circle, default, or hard");
    gen->add_option("--out", gen_out, "output JSON file");

    auto *run = app.add_subcommand("run", "Run one closed-loop simulation");
    std::string run_config, run_controller, run_out = "out";
    int run_dump = 0;
    bool run_through_h = false;
    run->add_option("--config", run_config, "config JSON file");
    run->add_option("--controller", run_controller, "pid or mpc (overrides config)");
    run->add_option("--out-dir", run_out, "output directory");
    run->add_option("--dump-frames", run_dump, "write every k-th frame as PGM");
    run->add_flag("--through-homography", run_through_h,
                  "render a perspective view and rectify it through the calibration path");

    auto *cmp = app.add_subcommand("compare", "Run PID vs MPC over seeded tracks");
    std::string cmp_seeds = "1..5", cmp_config, cmp_out = "out";
    cmp->add_option("--seeds", cmp_seeds, "seed list, e.g. 1..5 or 1,2,7");
    cmp->add_option("--config", cmp_config, "config JSON file");
    cmp->add_option("--out-dir", cmp_out, "output directory");

    auto *det = app.add_subcommand("detect", "Detect lanes in a PGM frame");
    std::string det_image, det_config, det_out = "lanes.json";
    det->add_option("--image", det_image, "input PGM frame")->required();
    det->add_option("--config", det_config, "config JSON file");
    det->add_option("--out", det_out, "output JSON file");

    auto *cal = app.add_subcommand("calib-demo", "Synthetic chessboard calibration demo");
    double cal_tilt = 2e-4;
    std::string cal_out;
    cal->add_option("--tilt", cal_tilt, "projective distortion strength");
    cal->add_option("--out", cal_out, "directory for before/after PGM images");

    auto *dump_cfg = app.add_subcommand("default-config", "Print the default config JSON");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (gen->parsed())
            return cmd_generate_track(gen_seed, gen_preset, gen_out);
        if (run->parsed())
            return cmd_run(run_config, run_controller, run_out, run_dump, run_through_h);
        if (cmp->parsed())
            return cmd_compare(cmp_seeds, cmp_config, cmp_out);
        if (det->parsed())
            return cmd_detect(det_image, det_config, det_out);
        if (cal->parsed())
            return cmd_calib_demo(cal_tilt, cal_out);
        if (dump_cfg->parsed())
        {
            std::fputs(harness::default_config_json().c_str(), stdout);
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
