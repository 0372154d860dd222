#include "monosil/vehicle.hpp"

#include <cmath>

namespace monosil::vehicle
{

double wrap_angle(double a)
{
    // range (-pi, pi]: pi stays pi, -pi maps to pi
    a = std::fmod(a - M_PI, 2.0 * M_PI);
    if (a <= 0.0)
        a += 2.0 * M_PI;
    return a - M_PI;
}

TireState tire_forces(const VehicleState &state, double delta_f, const VehicleParams &p)
{
    TireState t;
    t.alpha_f = delta_f - (state.v_y + p.d_front * state.phi_dot) / p.v_x;
    t.alpha_r = -(state.v_y - p.d_rear * state.phi_dot) / p.v_x;
    t.f_cf = p.c_cf * t.alpha_f;
    t.f_cr = p.c_cr * t.alpha_r;
    return t;
}

StateDerivative dynamics_rhs(const VehicleState &state, double delta_f, const VehicleParams &p)
{
    const TireState t = tire_forces(state, delta_f, p);
    const double cd = std::cos(delta_f);

    StateDerivative d;
    d.x_dot = p.v_x * std::cos(state.phi) - state.v_y * std::sin(state.phi);
    d.y_dot = p.v_x * std::sin(state.phi) + state.v_y * std::cos(state.phi);
    d.phi_dot = state.phi_dot;
    d.v_y_dot = (2.0 * t.f_cf * cd + 2.0 * t.f_cr) / p.m - p.v_x * state.phi_dot;
    d.phi_ddot = (2.0 * p.d_front * t.f_cf * cd - 2.0 * p.d_rear * t.f_cr) / p.i_z;
    return d;
}

VehicleState step(const VehicleState &state, double delta_f, const VehicleParams &p, double dt)
{
    const double delta = std::clamp(delta_f, -p.delta_max, p.delta_max);

    const auto add = [](const VehicleState &s, const StateDerivative &d, double h) {
        VehicleState out = s;
        out.x += h * d.x_dot;
        out.y += h * d.y_dot;
        out.phi += h * d.phi_dot;
        out.v_y += h * d.v_y_dot;
        out.phi_dot += h * d.phi_ddot;
        return out;
    };

    const StateDerivative k1 = dynamics_rhs(state, delta, p);
    const StateDerivative k2 = dynamics_rhs(add(state, k1, 0.5 * dt), delta, p);
    const StateDerivative k3 = dynamics_rhs(add(state, k2, 0.5 * dt), delta, p);
    const StateDerivative k4 = dynamics_rhs(add(state, k3, dt), delta, p);

    VehicleState out = state;
    out.x += dt / 6.0 * (k1.x_dot + 2 * k2.x_dot + 2 * k3.x_dot + k4.x_dot);
    out.y += dt / 6.0 * (k1.y_dot + 2 * k2.y_dot + 2 * k3.y_dot + k4.y_dot);
    out.phi += dt / 6.0 * (k1.phi_dot + 2 * k2.phi_dot + 2 * k3.phi_dot + k4.phi_dot);
    out.v_y += dt / 6.0 * (k1.v_y_dot + 2 * k2.v_y_dot + 2 * k3.v_y_dot + k4.v_y_dot);
    out.phi_dot += dt / 6.0 * (k1.phi_ddot + 2 * k2.phi_ddot + 2 * k3.phi_ddot + k4.phi_ddot);
    out.phi = wrap_angle(out.phi);

    if (!std::isfinite(out.x) || !std::isfinite(out.y) || !std::isfinite(out.phi) ||
        !std::isfinite(out.v_y) || !std::isfinite(out.phi_dot))
        throw NonFiniteState("vehicle state diverged");
    return out;
}

void linearize(const VehicleState &op_state, double op_delta, const VehicleParams &p,
               Eigen::Matrix4d &a_c, Eigen::Vector4d &b_c)
{
    // state ordering: (lateral coordinate y, v_y, phi, phi_dot)
    const double cd = std::cos(op_delta);
    const double sd = std::sin(op_delta);
    const double alpha_f = op_delta - (op_state.v_y + p.d_front * op_state.phi_dot) / p.v_x;

    a_c.setZero();
    b_c.setZero();

    // y_dot = v_x sin(phi) + v_y cos(phi)
    a_c(0, 1) = std::cos(op_state.phi);
    a_c(0, 2) = p.v_x * std::cos(op_state.phi) - op_state.v_y * std::sin(op_state.phi);

    // v_y_dot = (2 C_cf alpha_f cos(d) + 2 C_cr alpha_r)/m - v_x phi_dot
    a_c(1, 1) = (-2.0 * p.c_cf * cd - 2.0 * p.c_cr) / (p.m * p.v_x);
    a_c(1, 3) = (-2.0 * p.c_cf * cd * p.d_front + 2.0 * p.c_cr * p.d_rear) / (p.m * p.v_x) - p.v_x;
    b_c(1) = 2.0 * p.c_cf * (cd - alpha_f * sd) / p.m;

    // phi_dot = phi_dot
    a_c(2, 3) = 1.0;

    // phi_ddot = (2 d_f C_cf alpha_f cos(d) - 2 d_r C_cr alpha_r)/I_z
    a_c(3, 1) = (-2.0 * p.d_front * p.c_cf * cd + 2.0 * p.d_rear * p.c_cr) / (p.i_z * p.v_x);
    a_c(3, 3) = (-2.0 * p.d_front * p.d_front * p.c_cf * cd -
                 2.0 * p.d_rear * p.d_rear * p.c_cr) /
                (p.i_z * p.v_x);
    b_c(3) = 2.0 * p.d_front * p.c_cf * (cd - alpha_f * sd) / p.i_z;
}

void discretize(const Eigen::Matrix4d &a_c, const Eigen::Vector4d &b_c, double t_s,
                Eigen::Matrix4d &a_d, Eigen::Vector4d &b_d)
{
    a_d = Eigen::Matrix4d::Identity() + t_s * a_c;
    b_d = t_s * b_c;
}

LinearModel make_linear_model(const VehicleState &op_state, double op_delta,
                              const VehicleParams &p, double t_s)
{
    LinearModel m;
    m.t_s = t_s;
    linearize(op_state, op_delta, p, m.a_c, m.b_c);
    discretize(m.a_c, m.b_c, t_s, m.a_d, m.b_d);
    return m;
}

} // namespace monosil::vehicle
