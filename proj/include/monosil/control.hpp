#ifndef MONOSIL_CONTROL_HPP_
#define MONOSIL_CONTROL_HPP_

#include <vector>

#include <Eigen/Core>

#include "monosil/errors.hpp"
#include "monosil/lane.hpp"
#include "monosil/vehicle.hpp"

namespace monosil::control
{

// Augmented model with the previous input as a fifth state, so the control
// increment becomes the input.
struct IncrementalModel
{
    Eigen::Matrix<double, 5, 5> a_aug;
    Eigen::Matrix<double, 5, 1> b_aug;
    Eigen::Matrix<double, 2, 5> c_aug;
};

struct MpcConfig
{
    int n_p = 20;       // prediction horizon
    int n_c = 5;        // control horizon
    double q_y = 10.0;  // lateral output weight
    double q_phi = 2.0; // heading output weight
    // heavy increment weight: trades tracking tightness for the smooth,
    // rate-regulated steering the MPC is meant to exhibit
    double r_du = 500.0;
    double kp_v = 1.0;  // speed loop gain
    double v_target = 1.0;
    bool relinearize_horizon = false;
};

// Stacked outputs over the horizon: Y = F * chi_aug + Phi * dU.
struct PredictionMatrices
{
    Eigen::MatrixXd f;   // (2*N_p) x 5
    Eigen::MatrixXd phi; // (2*N_p) x N_c
};

struct ControlCommand
{
    double delta_f = 0.0; // rad
    double accel = 0.0;   // m/s^2, throttle surrogate
};

struct MpcDiagnostics
{
    double cost = 0.0;
    bool clamped = false;
};

struct PidGains
{
    double kp = 2.0;
    double ki = 0.1;
    double kd = 0.6;
    double kp_v = 1.0;
    double v_target = 1.0;
    double lookahead = 0.8;      // m, short preview keeps corner-cutting bias small
    double integral_clamp = 0.5;
};

struct PidState
{
    double integral = 0.0;
    double last_error = 0.0;
    bool has_last = false;
};

IncrementalModel build_incremental(const vehicle::LinearModel &model);

// models.size() must equal N_p (replicate a single model for the
// constant-model approximation).
PredictionMatrices build_prediction(const std::vector<IncrementalModel> &models, int n_c);

// Unconstrained weighted least-squares solve, then projection of the first
// increment onto the rate and magnitude bounds. Returns the applied delta_u.
double solve_mpc(const PredictionMatrices &pm, const Eigen::Matrix<double, 5, 1> &chi_aug,
                 const Eigen::VectorXd &y_ref, const MpcConfig &cfg,
                 const vehicle::VehicleParams &p, double u_prev, MpcDiagnostics &diag);

ControlCommand mpc_control(const lane::LanePoly &lane_center, const vehicle::VehicleState &state,
                           const vehicle::VehicleParams &p, const MpcConfig &cfg, double t_s,
                           double u_prev, MpcDiagnostics &diag);

ControlCommand pid_control(const lane::LanePoly &lane_center, const vehicle::VehicleState &state,
                           const vehicle::VehicleParams &p, const PidGains &gains, double dt,
                           PidState &pid_state);

} // namespace monosil::control

#endif
