// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Runs against library defaults only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "monosil/calib.hpp"
#include "monosil/harness.hpp"

using namespace monosil;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace
{

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return "<missing:" + path + ">";
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// criteria 1, 2, 7 share the 5-seed default comparison

struct SuiteResult
{
    harness::Comparison cmp;
    double elapsed = 0.0;
};

SuiteResult run_suite()
{
    const harness::SimConfig cfg; // library defaults throughout
    const auto t0 = Clock::now();
    SuiteResult out;
    out.cmp = harness::compare_controllers({1, 2, 3, 4, 5}, cfg);
    out.elapsed = seconds_since(t0);
    return out;
}

bool criterion1(const SuiteResult &suite, std::string &detail)
{
    const auto &pid = suite.cmp.pid_aggregate;
    const auto &mpc = suite.cmp.mpc_aggregate;
    const bool ordering = pid.lateral_msd < mpc.lateral_msd;
    const bool range = pid.lateral_msd >= 0.0005 && pid.lateral_msd <= 0.1 &&
                       mpc.lateral_msd >= 0.0005 && mpc.lateral_msd <= 0.1;
    const bool angular = pid.angular_msd < 0.01 && mpc.angular_msd < 0.01;
    const bool fast = suite.elapsed < 180.0;

    std::ostringstream s;
    s << "PID lat " << pid.lateral_msd << " vs MPC lat " << mpc.lateral_msd << " m^2, angular "
      << pid.angular_msd << " / " << mpc.angular_msd << " rad^2, " << suite.elapsed << " s";
    detail = s.str();
    return ordering && range && angular && fast;
}

bool criterion2(const SuiteResult &suite, std::string &detail)
{
    int peaks_ok = 0;
    for (const auto &row : suite.cmp.rows)
        peaks_ok += row.pid_peak_yaw_rate >= row.mpc_peak_yaw_rate;

    const harness::SimConfig cfg;
    const double ddelta_max = cfg.vehicle_params.ddelta_max;
    double worst_rate = 0.0;
    for (const auto &log : suite.cmp.mpc_logs)
    {
        double prev = 0.0;
        for (std::size_t i = 0; i < log.records.size(); ++i)
        {
            worst_rate = std::max(worst_rate, std::abs(log.records[i].delta_cmd - prev));
            prev = log.records[i].delta_cmd;
        }
    }
    const bool rate_ok = worst_rate <= ddelta_max + 1e-12;

    std::ostringstream s;
    s << "PID peak >= MPC peak in " << peaks_ok << "/5 trials, worst MPC step " << worst_rate
      << " rad <= ddelta_max " << ddelta_max;
    detail = s.str();
    return peaks_ok >= 4 && rate_ok;
}

bool criterion7(const SuiteResult &suite, std::string &detail)
{
    bool ok = true;
    int laps_min = 1 << 20;
    double lv_min = 1.0;
    for (const auto &row : suite.cmp.rows)
    {
        ok = ok && row.pid_ok && row.mpc_ok;
        for (const auto *m : {&row.pid, &row.mpc})
        {
            laps_min = std::min(laps_min, m->laps_completed);
            lv_min = std::min(lv_min, m->lane_valid_fraction);
        }
    }

    // plus the pure circle with both controllers
    for (const auto kind : {harness::ControllerKind::pid, harness::ControllerKind::mpc})
    {
        harness::SimConfig cfg;
        cfg.track_spec = track::TrackSpec{}; // pure circle
        cfg.controller = kind;
        const harness::SimResult res = harness::run_sim(cfg);
        ok = ok && res.log.termination_reason == "duration";
        laps_min = std::min(laps_min, res.metrics.laps_completed);
        lv_min = std::min(lv_min, res.metrics.lane_valid_fraction);
    }

    std::ostringstream s;
    s << "min laps " << laps_min << ", min lane_valid " << lv_min
      << ", no run terminated abnormally: " << (ok ? "yes" : "no");
    detail = s.str();
    return ok && laps_min >= 1 && lv_min >= 0.99;
}

// ---------------------------------------------------------------------------
// criterion 3: perception accuracy on a seeded wavy track

double lane_rms(double noise_sigma)
{
    track::TrackSpec spec;
    spec.base_radius = 18.0;
    spec.half_width = 0.4;
    spec.samples_per_lap = 1440;
    spec.harmonics = {{0.8, 2, 0.7}};
    const auto center = track::generate_track(spec);
    const auto [leftb, rightb] = track::lane_boundaries(center, spec.half_width);
    const imaging::CameraModel cam;
    const lane::SlidingWindowConfig cfg;
    const harness::PreprocessConfig pre;

    std::mt19937_64 rng(1);
    double sq = 0.0;
    int n = 0;
    const std::size_t total = center.points.size();
    for (int f = 0; f < 50; ++f)
    {
        const auto &p = center.points[(f * total) / 50];
        const imaging::ImageGray frame =
            imaging::render_frame(leftb, rightb, {p.x, p.y, p.heading}, cam, 0.06, noise_sigma,
                                  rng);
        imaging::ImageGray mask = imaging::threshold_binary(
            imaging::gaussian_blur(frame, pre.blur_sigma), pre.threshold);
        if (noise_sigma > 0.0)
            mask = imaging::morphology(mask, imaging::MorphOp::close, pre.close_radius);
        const auto det = lane::detect_lanes(mask, cfg, cam);
        if (!det.center.valid)
            return 1e9;

        const double c = std::cos(-p.heading), s = std::sin(-p.heading);
        for (double d = 0.5; d <= 3.5; d += 0.25)
        {
            // centerline lateral position at forward distance d: interpolate
            // the forward crossing nearest the vehicle laterally
            double true_lat = 1e9;
            for (std::size_t k = 0; k + 1 < center.points.size(); ++k)
            {
                const auto &q0 = center.points[k];
                const auto &q1 = center.points[k + 1];
                const double f0 = c * (q0.x - p.x) - s * (q0.y - p.y);
                const double f1 = c * (q1.x - p.x) - s * (q1.y - p.y);
                if ((f0 - d) * (f1 - d) > 0.0 || f0 == f1)
                    continue;
                const double t = (d - f0) / (f1 - f0);
                const double l0 = s * (q0.x - p.x) + c * (q0.y - p.y);
                const double l1 = s * (q1.x - p.x) + c * (q1.y - p.y);
                const double lat = l0 + t * (l1 - l0);
                if (std::abs(lat) < std::abs(true_lat))
                    true_lat = lat;
            }
            if (std::abs(true_lat) > 2.0)
                continue;
            const double err = det.center.eval(d) - true_lat;
            sq += err * err;
            ++n;
        }
    }
    return std::sqrt(sq / n);
}

bool criterion3(std::string &detail)
{
    const auto t0 = Clock::now();
    const double rms_clean = lane_rms(0.0);
    const double rms_noisy = lane_rms(2.0);
    const double elapsed = seconds_since(t0);

    std::ostringstream s;
    s << "noise-free RMS " << rms_clean << " m (<= 0.02), noisy RMS " << rms_noisy
      << " m (<= 0.04), " << elapsed << " s";
    detail = s.str();
    return rms_clean <= 0.02 && rms_noisy <= 0.04 && elapsed < 10.0;
}

// ---------------------------------------------------------------------------
// criterion 4: homography suite

bool criterion4(std::string &detail)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> affine(-1.0, 1.0);
    std::uniform_real_distribution<double> persp(-5e-4, 5e-4);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        calib::Homography h;
        do
        {
            h.h << 1.0 + 0.3 * affine(rng), 0.3 * affine(rng), 50.0 * affine(rng),
                0.3 * affine(rng), 1.0 + 0.3 * affine(rng), 50.0 * affine(rng),
                persp(rng), persp(rng), 1.0;
        } while (std::abs(h.h.determinant()) < 1e-3);

        std::vector<calib::Correspondence> pairs;
        for (int gy = 0; gy < 3; ++gy)
            for (int gx = 0; gx < 4; ++gx)
            {
                const calib::Point2 src(40.0 + 180.0 * gx, 40.0 + 180.0 * gy);
                pairs.push_back({src, calib::apply_homography(h, src)});
            }
        const calib::Homography est = calib::estimate_homography(pairs);
        worst = std::max(worst, (est.h / est.h(2, 2) - h.h).cwiseAbs().maxCoeff());
    }

    // perfect chessboard under identity, and exact oracle agreement
    const auto grid = calib::make_grid(5, 4, 40.0, {240.0, 140.0});
    const auto rep = calib::verify_grid_spacing(grid);
    std::vector<double> dx, dy;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c + 1 < grid.cols; ++c)
            dx.push_back(
                (grid.corners[r * grid.cols + c + 1] - grid.corners[r * grid.cols + c]).norm());
    for (int r = 0; r + 1 < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            dy.push_back(
                (grid.corners[(r + 1) * grid.cols + c] - grid.corners[r * grid.cols + c]).norm());
    double mx = 0.0, my = 0.0, dev = 0.0;
    for (double v : dx)
        mx += v;
    mx /= dx.size();
    for (double v : dy)
        my += v;
    my /= dy.size();
    for (double v : dx)
        dev = std::max(dev, std::abs(v - mx) / mx);
    for (double v : dy)
        dev = std::max(dev, std::abs(v - my) / my);
    const bool grid_ok = rep.max_rel_dev == 0.0 && rep.mean_dx == mx && rep.mean_dy == my &&
                         rep.max_rel_dev == dev;

    std::ostringstream s;
    s << "max homography error " << worst << " (< 1e-8), grid spacing uniform and oracle-exact: "
      << (grid_ok ? "yes" : "no");
    detail = s.str();
    return worst < 1e-8 && grid_ok;
}

// ---------------------------------------------------------------------------
// criterion 5: dynamics verification

vehicle::VehicleState integrate(vehicle::VehicleState s, double delta,
                                const vehicle::VehicleParams &p, double horizon, int steps)
{
    const double dt = horizon / steps;
    for (int i = 0; i < steps; ++i)
        s = vehicle::step(s, delta, p, dt);
    return s;
}

double state_dist(const vehicle::VehicleState &a, const vehicle::VehicleState &b)
{
    return std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2) +
                     std::pow(vehicle::wrap_angle(a.phi - b.phi), 2) + std::pow(a.v_y - b.v_y, 2) +
                     std::pow(a.phi_dot - b.phi_dot, 2));
}

bool criterion5(std::string &detail)
{
    const vehicle::VehicleParams p;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // finite-difference check of the analytic Jacobians at 1000 points
    double worst_fd = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 1000; ++trial)
    {
        vehicle::VehicleState s;
        s.phi = M_PI * u(rng);
        s.v_y = u(rng);
        s.phi_dot = 2.0 * u(rng);
        const double delta = 0.4 * u(rng);

        Eigen::Matrix4d a_c;
        Eigen::Vector4d b_c;
        vehicle::linearize(s, delta, p, a_c, b_c);

        // lateral-subsystem state ordering (y, v_y, phi, phi_dot)
        const auto rhs4 = [&](const vehicle::VehicleState &st, double d) {
            const auto der = vehicle::dynamics_rhs(st, d, p);
            return Eigen::Vector4d(der.y_dot, der.v_y_dot, der.phi_dot, der.phi_ddot);
        };
        const auto perturb = [&](int j, double eps) {
            vehicle::VehicleState st = s;
            if (j == 0)
                st.y += eps;
            else if (j == 1)
                st.v_y += eps;
            else if (j == 2)
                st.phi += eps;
            else
                st.phi_dot += eps;
            return st;
        };
        for (int j = 0; j < 4; ++j)
        {
            const Eigen::Vector4d fd =
                (rhs4(perturb(j, h), delta) - rhs4(perturb(j, -h), delta)) / (2.0 * h);
            for (int i = 0; i < 4; ++i)
            {
                const double scale = std::max(1.0, std::abs(fd(i)));
                worst_fd = std::max(worst_fd, std::abs(fd(i) - a_c(i, j)) / scale);
            }
        }
        const Eigen::Vector4d fd_b = (rhs4(s, delta + h) - rhs4(s, delta - h)) / (2.0 * h);
        for (int i = 0; i < 4; ++i)
        {
            const double scale = std::max(1.0, std::abs(fd_b(i)));
            worst_fd = std::max(worst_fd, std::abs(fd_b(i) - b_c(i)) / scale);
        }
    }

    // RK4 order by dt-halving against a fine reference
    vehicle::VehicleState s0;
    s0.phi = 0.3;
    s0.v_y = 0.2;
    s0.phi_dot = 0.5;
    const double delta = 0.2, horizon = 0.08;
    const auto ref = integrate(s0, delta, p, horizon, 4096);
    const double e1 = state_dist(integrate(s0, delta, p, horizon, 1), ref);
    const double e2 = state_dist(integrate(s0, delta, p, horizon, 2), ref);
    const double e4 = state_dist(integrate(s0, delta, p, horizon, 4), ref);
    const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e4));

    // equilibrium: straight driving is a fixed point of the lateral dynamics
    const auto eq = vehicle::dynamics_rhs(vehicle::VehicleState{}, 0.0, p);
    const bool eq_ok = std::abs(eq.y_dot) < 1e-12 && std::abs(eq.phi_dot) < 1e-12 &&
                       std::abs(eq.v_y_dot) < 1e-12 && std::abs(eq.phi_ddot) < 1e-12;

    // mirror symmetry of 200-step trajectories
    double worst_mirror = 0.0;
    {
        vehicle::VehicleState a, b;
        a.v_y = 0.1;
        a.phi_dot = 0.2;
        b.v_y = -0.1;
        b.phi_dot = -0.2;
        for (int k = 0; k < 200; ++k)
        {
            const double d = 0.3 * std::sin(0.11 * k);
            a = vehicle::step(a, d, p, 0.01);
            b = vehicle::step(b, -d, p, 0.01);
            worst_mirror = std::max({worst_mirror, std::abs(a.x - b.x), std::abs(a.y + b.y),
                                     std::abs(vehicle::wrap_angle(a.phi + b.phi)),
                                     std::abs(a.v_y + b.v_y), std::abs(a.phi_dot + b.phi_dot)});
        }
    }

    std::ostringstream s;
    s << "max FD rel err " << worst_fd << " (< 1e-5), RK4 order " << order
      << " (>= 3.8), equilibrium " << (eq_ok ? "exact" : "violated") << ", mirror residual "
      << worst_mirror << " (<= 1e-12)";
    detail = s.str();
    return worst_fd < 1e-5 && order >= 3.8 && eq_ok && worst_mirror <= 1e-12;
}

// ---------------------------------------------------------------------------
// criterion 6: MPC math verification

vehicle::LinearModel random_linear(std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    vehicle::LinearModel m;
    for (int i = 0; i < 4; ++i)
    {
        for (int j = 0; j < 4; ++j)
            m.a_c(i, j) = u(rng);
        m.b_c(i) = u(rng);
    }
    vehicle::discretize(m.a_c, m.b_c, m.t_s, m.a_d, m.b_d);
    return m;
}

bool criterion6(std::string &detail)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> np_dist(1, 12);

    // prediction-matrix equivalence over 200 random instances
    double worst_pred = 0.0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const int n_p = np_dist(rng);
        const int n_c = std::uniform_int_distribution<int>(1, n_p)(rng);

        std::vector<control::IncrementalModel> models;
        for (int i = 0; i < n_p; ++i)
            models.push_back(control::build_incremental(random_linear(rng)));
        const auto pm = control::build_prediction(models, n_c);

        Eigen::Matrix<double, 5, 1> chi;
        for (int i = 0; i < 5; ++i)
            chi(i) = u(rng);
        Eigen::VectorXd du(n_c);
        for (int i = 0; i < n_c; ++i)
            du(i) = u(rng);
        const Eigen::VectorXd y_pred = pm.f * chi + pm.phi * du;

        Eigen::Matrix<double, 5, 1> state = chi;
        for (int i = 0; i < n_p; ++i)
        {
            state = models[i].a_aug * state + models[i].b_aug * (i < n_c ? du(i) : 0.0);
            const Eigen::Vector2d y = models[i].c_aug * state;
            worst_pred = std::max({worst_pred, std::abs(y_pred(2 * i) - y(0)),
                                   std::abs(y_pred(2 * i + 1) - y(1))});
        }
    }

    // unconstrained solve vs stacked weighted least squares
    double worst_ls = 0.0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const int n_p = np_dist(rng);
        const int n_c = std::uniform_int_distribution<int>(1, n_p)(rng);
        const control::IncrementalModel inc = control::build_incremental(random_linear(rng));
        const auto pm =
            control::build_prediction(std::vector<control::IncrementalModel>(n_p, inc), n_c);

        Eigen::Matrix<double, 5, 1> chi;
        for (int i = 0; i < 5; ++i)
            chi(i) = u(rng);
        Eigen::VectorXd y_ref(2 * n_p);
        for (int i = 0; i < y_ref.size(); ++i)
            y_ref(i) = u(rng);

        control::MpcConfig cfg;
        cfg.q_y = 10.0;
        cfg.q_phi = 2.0;
        cfg.r_du = 1.0;
        vehicle::VehicleParams p;
        p.ddelta_max = 1e9;
        p.delta_max = 1e9;
        control::MpcDiagnostics diag;
        const double du0 = control::solve_mpc(pm, chi, y_ref, cfg, p, 0.0, diag);

        Eigen::VectorXd sq(2 * n_p);
        for (int i = 0; i < n_p; ++i)
        {
            sq(2 * i) = std::sqrt(cfg.q_y);
            sq(2 * i + 1) = std::sqrt(cfg.q_phi);
        }
        Eigen::MatrixXd a(2 * n_p + n_c, n_c);
        Eigen::VectorXd b(2 * n_p + n_c);
        a.topRows(2 * n_p) = sq.asDiagonal() * pm.phi;
        a.bottomRows(n_c) = std::sqrt(cfg.r_du) * Eigen::MatrixXd::Identity(n_c, n_c);
        b.head(2 * n_p) = sq.asDiagonal() * (y_ref - pm.f * chi);
        b.tail(n_c).setZero();
        const Eigen::VectorXd du_ls = a.colPivHouseholderQr().solve(b);
        worst_ls = std::max(worst_ls, std::abs(du0 - du_ls(0)));
    }

    // N_p = N_c = 1 closed form: q (1 - du)^2 + r du^2 minimized at du = 1/2
    control::PredictionMatrices pm;
    pm.f = Eigen::MatrixXd::Zero(2, 5);
    pm.f(0, 0) = 1.0;
    pm.phi = Eigen::MatrixXd::Zero(2, 1);
    pm.phi(0, 0) = 1.0;
    control::MpcConfig cfg;
    cfg.q_y = 1.0;
    cfg.q_phi = 0.0;
    cfg.r_du = 1.0;
    vehicle::VehicleParams p;
    p.ddelta_max = 1.0;
    p.delta_max = 1.0;
    Eigen::VectorXd y_ref(2);
    y_ref << 1.0, 0.0;
    control::MpcDiagnostics diag;
    const double du_cf =
        control::solve_mpc(pm, Eigen::Matrix<double, 5, 1>::Zero(), y_ref, cfg, p, 0.0, diag);

    std::ostringstream s;
    s << "max prediction err " << worst_pred << " (< 1e-10), max LS err " << worst_ls
      << " (< 1e-8), closed-form du = " << du_cf;
    detail = s.str();
    return worst_pred < 1e-10 && worst_ls < 1e-8 && du_cf == 0.5;
}

// ---------------------------------------------------------------------------
// criterion 8: byte-level determinism of run and compare artifacts

void emit_run_artifacts(const harness::SimConfig &cfg, const std::string &dir)
{
    fs::create_directories(dir);
    const harness::SimResult res = harness::run_sim(cfg);
    harness::write_csv(res.log, dir + "/run.csv");
    const auto center = track::generate_track(cfg.track_spec);
    harness::emit_trajectory_svg(res.log, center, cfg.track_spec.half_width,
                                 dir + "/trajectory.svg");
    harness::emit_speed_svg(res.log, dir + "/speed.svg");
    harness::emit_yaw_rate_svg(res.log, dir + "/yaw_rate.svg");
}

void emit_compare_artifacts(const harness::SimConfig &cfg, const std::string &dir)
{
    fs::create_directories(dir);
    const harness::Comparison cmp = harness::compare_controllers({1, 2}, cfg);
    harness::write_comparison_csv(cmp, dir + "/comparison.csv");
    std::ofstream(dir + "/comparison.txt", std::ios::binary) << harness::comparison_table_text(cmp);
    harness::emit_overlay_svg(cmp.pid_logs, cmp.mpc_logs, dir + "/overlay.svg");
}

bool criterion8(std::string &detail)
{
    const std::string base = (fs::temp_directory_path() / "monosil_acceptance").string();
    fs::remove_all(base);

    harness::SimConfig run_cfg;
    run_cfg.duration = 5.0;
    run_cfg.controller = harness::ControllerKind::mpc;
    emit_run_artifacts(run_cfg, base + "/run_a");
    emit_run_artifacts(run_cfg, base + "/run_b");

    harness::SimConfig cmp_cfg;
    cmp_cfg.duration = 5.0;
    emit_compare_artifacts(cmp_cfg, base + "/cmp_a");
    emit_compare_artifacts(cmp_cfg, base + "/cmp_b");

    int checked = 0, identical = 0;
    for (const auto &[a, b] :
         std::vector<std::pair<std::string, std::string>>{{"run_a", "run_b"}, {"cmp_a", "cmp_b"}})
        for (const auto &entry : fs::directory_iterator(base + "/" + a))
        {
            const std::string name = entry.path().filename().string();
            ++checked;
            identical += slurp(entry.path().string()) ==
                         slurp(base + "/" + b + "/" + name);
        }
    fs::remove_all(base);

    std::ostringstream s;
    s << identical << "/" << checked << " artifacts byte-identical across two invocations";
    detail = s.str();
    return checked >= 7 && identical == checked;
}

} // namespace

int main()
{
    bool pass[9] = {};
    std::string detail[9];

    const SuiteResult suite = run_suite();
    pass[1] = criterion1(suite, detail[1]);
    pass[2] = criterion2(suite, detail[2]);
    pass[3] = criterion3(detail[3]);
    pass[4] = criterion4(detail[4]);
    pass[5] = criterion5(detail[5]);
    pass[6] = criterion6(detail[6]);
    pass[7] = criterion7(suite, detail[7]);
    pass[8] = criterion8(detail[8]);

    int failures = 0;
    for (int id = 1; id <= 8; ++id)
    {
        std::printf("criterion %d: %s  (%s)\n", id, pass[id] ? "PASS" : "FAIL",
                    detail[id].c_str());
        failures += !pass[id];
    }

    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all 8 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
