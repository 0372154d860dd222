#include "monosil/control.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace monosil::control
{

IncrementalModel build_incremental(const vehicle::LinearModel &model)
{
    IncrementalModel inc;
    inc.a_aug.setZero();
    inc.a_aug.topLeftCorner<4, 4>() = model.a_d;
    inc.a_aug.topRightCorner<4, 1>() = model.b_d;
    inc.a_aug(4, 4) = 1.0;
    inc.b_aug.topRows<4>() = model.b_d;
    inc.b_aug(4) = 1.0;
    inc.c_aug.setZero();
    inc.c_aug.leftCols<4>() = model.c_d;
    return inc;
}

PredictionMatrices build_prediction(const std::vector<IncrementalModel> &models, int n_c)
{
    const int n_p = static_cast<int>(models.size());
    if (n_p < 1 || n_c < 1 || n_c > n_p)
        throw HorizonMismatch("need 1 <= N_c <= N_p and one model per prediction step");

    PredictionMatrices pm;
    pm.f.resize(2 * n_p, 5);
    pm.phi = Eigen::MatrixXd::Zero(2 * n_p, n_c);

    // running products of the augmented transition matrices
    Eigen::Matrix<double, 5, 5> prod = Eigen::Matrix<double, 5, 5>::Identity();
    // column j holds (A_{k+i-1}...A_{k+j+1}) B_{k+j} for the current row block i
    std::vector<Eigen::Matrix<double, 5, 1>> col(n_c);

    for (int i = 0; i < n_p; ++i)
    {
        for (int j = 0; j < std::min(i, n_c); ++j)
            col[j] = models[i].a_aug * col[j];
        if (i < n_c)
            col[i] = models[i].b_aug;
        prod = models[i].a_aug * prod;

        pm.f.middleRows<2>(2 * i) = models[i].c_aug * prod;
        for (int j = 0; j <= std::min(i, n_c - 1); ++j)
            pm.phi.block<2, 1>(2 * i, j) = models[i].c_aug * col[j];
    }
    return pm;
}

double solve_mpc(const PredictionMatrices &pm, const Eigen::Matrix<double, 5, 1> &chi_aug,
                 const Eigen::VectorXd &y_ref, const MpcConfig &cfg,
                 const vehicle::VehicleParams &p, double u_prev, MpcDiagnostics &diag)
{
    const int n_p = static_cast<int>(pm.f.rows()) / 2;
    const int n_c = static_cast<int>(pm.phi.cols());
    if (y_ref.size() != 2 * n_p)
        throw HorizonMismatch("reference length must be 2*N_p");

    Eigen::VectorXd q_diag(2 * n_p);
    for (int i = 0; i < n_p; ++i)
    {
        q_diag(2 * i) = cfg.q_y;
        q_diag(2 * i + 1) = cfg.q_phi;
    }

    const Eigen::VectorXd err = y_ref - pm.f * chi_aug;
    const Eigen::MatrixXd phi_q = pm.phi.transpose() * q_diag.asDiagonal();
    Eigen::MatrixXd hess = phi_q * pm.phi;
    hess.diagonal().array() += cfg.r_du;

    Eigen::VectorXd du;
    if (n_c == 1)
    {
        // scalar horizon: direct division, avoids Cholesky round-off
        if (hess(0, 0) <= 0.0)
            throw SingularHessian("prediction Hessian is not positive definite");
        du = (phi_q * err) / hess(0, 0);
    }
    else
    {
        Eigen::LLT<Eigen::MatrixXd> llt(hess);
        if (llt.info() != Eigen::Success)
            throw SingularHessian("prediction Hessian is not positive definite");
        du = llt.solve(phi_q * err);
    }

    // receding horizon: apply only the first increment, projected onto the
    // rate and magnitude bounds
    double du0 = du(0);
    diag.clamped = false;
    if (std::abs(du0) > p.ddelta_max)
    {
        du0 = std::clamp(du0, -p.ddelta_max, p.ddelta_max);
        diag.clamped = true;
    }
    double u_new = u_prev + du0;
    if (std::abs(u_new) > p.delta_max)
    {
        u_new = std::clamp(u_new, -p.delta_max, p.delta_max);
        du0 = u_new - u_prev;
        diag.clamped = true;
    }

    const Eigen::VectorXd resid = err - pm.phi * du;
    diag.cost = resid.dot(q_diag.asDiagonal() * resid) + cfg.r_du * du.squaredNorm();
    (void)n_c;
    return du0;
}

ControlCommand mpc_control(const lane::LanePoly &lane_center, const vehicle::VehicleState &state,
                           const vehicle::VehicleParams &p, const MpcConfig &cfg, double t_s,
                           double u_prev, MpcDiagnostics &diag)
{
    if (!lane_center.valid)
        throw InvalidLane("MPC needs a valid lane-center polynomial");

    // error state in the vehicle frame: lateral error and relative heading are
    // zero at the vehicle origin by construction
    vehicle::VehicleState op = state;
    op.phi = 0.0;
    const vehicle::LinearModel lin = vehicle::make_linear_model(op, u_prev, p, t_s);

    Eigen::Matrix<double, 5, 1> chi_aug;
    chi_aug << 0.0, state.v_y, 0.0, state.phi_dot, u_prev;

    std::vector<IncrementalModel> models(cfg.n_p, build_incremental(lin));
    if (cfg.relinearize_horizon)
    {
        // relinearize along the nominal constant-input prediction
        vehicle::VehicleState pred = op;
        for (int i = 1; i < cfg.n_p; ++i)
        {
            for (int k = 0; k < 5; ++k)
                pred = vehicle::step(pred, u_prev, p, t_s / 5.0);
            models[i] = build_incremental(vehicle::make_linear_model(pred, u_prev, p, t_s));
        }
    }
    const PredictionMatrices pm = build_prediction(models, cfg.n_c);

    Eigen::VectorXd y_ref(2 * cfg.n_p);
    for (int i = 1; i <= cfg.n_p; ++i)
    {
        const double d = i * p.v_x * t_s;
        y_ref(2 * (i - 1)) = lane_center.eval(d);
        y_ref(2 * (i - 1) + 1) = std::atan(lane_center.slope(d));
    }

    const double du0 = solve_mpc(pm, chi_aug, y_ref, cfg, p, u_prev, diag);

    ControlCommand cmd;
    cmd.delta_f = std::clamp(u_prev + du0, -p.delta_max, p.delta_max);
    cmd.accel = cfg.kp_v * (cfg.v_target - p.v_x);
    return cmd;
}

ControlCommand pid_control(const lane::LanePoly &lane_center, const vehicle::VehicleState &state,
                           const vehicle::VehicleParams &p, const PidGains &gains, double dt,
                           PidState &pid_state)
{
    if (!lane_center.valid)
        throw InvalidLane("PID needs a valid lane-center polynomial");

    const double e = lane_center.eval(gains.lookahead);

    pid_state.integral += e * dt;
    pid_state.integral = std::clamp(pid_state.integral, -gains.integral_clamp, gains.integral_clamp);
    const double de = pid_state.has_last ? (e - pid_state.last_error) / dt : 0.0;
    pid_state.last_error = e;
    pid_state.has_last = true;

    ControlCommand cmd;
    cmd.delta_f = std::clamp(gains.kp * e + gains.ki * pid_state.integral + gains.kd * de,
                             -p.delta_max, p.delta_max);
    cmd.accel = gains.kp_v * (gains.v_target - p.v_x);
    return cmd;
}

} // namespace monosil::control
