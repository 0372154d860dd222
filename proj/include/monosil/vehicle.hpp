#ifndef MONOSIL_VEHICLE_HPP_
#define MONOSIL_VEHICLE_HPP_

#include <Eigen/Core>

#include "monosil/errors.hpp"

namespace monosil::vehicle
{

struct VehicleParams
{
    double m = 3.5;         // kg
    double i_z = 0.06;      // kg m^2
    double d_front = 0.16;  // CoG -> front axle, m
    double d_rear = 0.16;   // CoG -> rear axle, m
    // stiff enough to corner at 1 m/s yet soft enough that the forward-Euler
    // controller model at T_s = 0.05 stays stable (spectral radius < 1)
    double c_cf = 6.0;     // front cornering stiffness, N/rad
    double c_cr = 6.0;     // rear cornering stiffness, N/rad
    double v_x = 1.0;       // fixed longitudinal speed, m/s
    double delta_max = 0.4; // rad
    double ddelta_max = 0.05; // rad per control period
};

struct VehicleState
{
    double x = 0.0;       // world, m
    double y = 0.0;       // world, m
    double phi = 0.0;     // yaw, rad, wrapped to (-pi, pi]
    double v_y = 0.0;     // body-frame lateral velocity, m/s
    double phi_dot = 0.0; // yaw rate, rad/s
};

struct TireState
{
    double alpha_f = 0.0; // rad
    double alpha_r = 0.0; // rad
    double f_cf = 0.0;    // N
    double f_cr = 0.0;    // N
};

struct StateDerivative
{
    double x_dot = 0.0;
    double y_dot = 0.0;
    double phi_dot = 0.0;
    double v_y_dot = 0.0;
    double phi_ddot = 0.0;
};

// 4-state lateral model, state ordering (lateral coordinate, v_y, phi, phi_dot),
// single input delta_f, outputs (lateral, phi).
struct LinearModel
{
    Eigen::Matrix4d a_c = Eigen::Matrix4d::Zero();
    Eigen::Vector4d b_c = Eigen::Vector4d::Zero();
    Eigen::Matrix4d a_d = Eigen::Matrix4d::Identity();
    Eigen::Vector4d b_d = Eigen::Vector4d::Zero();
    Eigen::Matrix<double, 2, 4> c_d = (Eigen::Matrix<double, 2, 4>() << 1, 0, 0, 0,
                                       0, 0, 1, 0)
                                          .finished();
    double t_s = 0.05;
};

double wrap_angle(double a);

TireState tire_forces(const VehicleState &state, double delta_f, const VehicleParams &p);

StateDerivative dynamics_rhs(const VehicleState &state, double delta_f, const VehicleParams &p);

// Classical RK4; delta clamped to +/- delta_max. Throws NonFiniteState if the
// result blows up.
VehicleState step(const VehicleState &state, double delta_f, const VehicleParams &p, double dt);

// Analytic Jacobians of the lateral subsystem at the operating point.
void linearize(const VehicleState &op_state, double op_delta, const VehicleParams &p,
               Eigen::Matrix4d &a_c, Eigen::Vector4d &b_c);

// Forward Euler: A_d = I + T_s A_c, B_d = T_s B_c.
void discretize(const Eigen::Matrix4d &a_c, const Eigen::Vector4d &b_c, double t_s,
                Eigen::Matrix4d &a_d, Eigen::Vector4d &b_d);

LinearModel make_linear_model(const VehicleState &op_state, double op_delta,
                              const VehicleParams &p, double t_s);

} // namespace monosil::vehicle

#endif
