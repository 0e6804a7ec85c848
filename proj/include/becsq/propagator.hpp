#pragma once

// Closed-form Heisenberg-picture solution of the linearly coupled (b, a) pair
//
//   i d/dt (b, a)^T = [[omega0, omega_r e^{-i theta}], [omega_r e^{i theta}, omega_a]] (b, a)^T
//
// with b the outcoupled atomic mode and a the optical mode.

#include "becsq/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace becsq {

struct ModelParams {
    double omega0 = 4.0;   ///< atomic level splitting
    double omega_a = 4.0;  ///< optical frequency
    double omega_r = 1.0;  ///< effective Rabi coupling (single-atom coupling times sqrt(N_c))
    double theta = 0.0;    ///< condensate phase

    void validate() const {
        if (!(omega_r > 0.0)) throw std::invalid_argument("ModelParams: omega_r must be > 0");
    }

    bool resonant() const {
        return std::abs(omega0 - omega_a) <= 1e-12 * std::max({1.0, std::abs(omega0), std::abs(omega_a)});
    }
};

struct DetuningGeometry {
    double varphi = 0.0;  ///< detuning angle, omega0 - omega_a = 2 omega_r tan(varphi)
    double big_i = 0.0;   ///< generalized Rabi frequency omega_r / cos(varphi)
};

inline DetuningGeometry detuning_geometry(const ModelParams& p) {
    p.validate();
    const double half_detuning = 0.5 * (p.omega0 - p.omega_a);
    DetuningGeometry g;
    g.varphi = std::atan2(half_detuning, p.omega_r);
    // hypot is I(varphi) = omega_r / cos(varphi) without the cos -> 0 cancellation
    g.big_i = std::hypot(p.omega_r, half_detuning);
    return g;
}

struct PropagatorMatrix {
    Eigen::Matrix2cd entries = Eigen::Matrix2cd::Identity();  ///< excludes the global phase
    cplx global_phase{1.0, 0.0};
    double t = 0.0;
    cplx lambda_minus{1.0, 0.0};
    cplx lambda_plus{1.0, 0.0};
    double eta = 0.0;

    /// Full transfer matrix including the global phase.
    Eigen::Matrix2cd full() const { return global_phase * entries; }
};

inline PropagatorMatrix propagator_at(const ModelParams& p, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("propagator_at: t must be >= 0");
    const DetuningGeometry g = detuning_geometry(p);
    const double s = std::sin(g.big_i * t);
    const double c = std::cos(g.big_i * t);

    PropagatorMatrix u;
    u.t = t;
    u.lambda_minus = cplx(c, -std::sin(g.varphi) * s);
    u.lambda_plus = cplx(c, std::sin(g.varphi) * s);
    u.eta = std::cos(g.varphi) * s;
    const cplx minus_i(0.0, -1.0);
    u.entries(0, 0) = u.lambda_minus;
    u.entries(0, 1) = minus_i * u.eta * std::polar(1.0, -p.theta);
    u.entries(1, 0) = minus_i * u.eta * std::polar(1.0, p.theta);
    u.entries(1, 1) = u.lambda_plus;
    u.global_phase = std::polar(1.0, -0.5 * (p.omega0 + p.omega_a) * t);
    return u;
}

/// Complete-conversion times (n + 1/2) pi / omega_r, n = 0..count-1. Resonance only.
inline std::vector<double> conversion_times(const ModelParams& p, int count) {
    p.validate();
    if (!p.resonant()) throw std::domain_error("conversion_times: requires omega0 == omega_a");
    if (count < 1) throw std::invalid_argument("conversion_times: count must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) out.push_back((n + 0.5) * std::numbers::pi / p.omega_r);
    return out;
}

namespace detail {

// Moments of c = u a(0) + v b(0) with b(0) in vacuum. Normal ordering kills every
// term carrying b(0), so
//   <c> = u <a>,  <c^2> = u^2 <a^2>,  <c^dag c> = |u|^2 <a^dag a>,
//   <(c^dag c)^2> = <c^dag^2 c^2> + [c, c^dag] <c^dag c>
//                 = |u|^4 <a^dag^2 a^2> + (|u|^2 + |v|^2) |u|^2 <a^dag a>.
inline MomentSet combine_with_vacuum(cplx u, cplx v, const NormalMoments& a0) {
    const double u2 = std::norm(u);
    const double comm = u2 + std::norm(v);
    MomentSet out;
    out.mean_amp = u * a0(0, 1);
    out.sq_amp = u * u * a0(0, 2);
    out.number_mean = u2 * a0(1, 1).real();
    out.number_sq = u2 * u2 * a0(2, 2).real() + comm * out.number_mean;
    return out;
}

inline bool is_vacuum(const MomentSet& m, double tol = 1e-12) {
    return std::abs(m.mean_amp) <= tol && std::abs(m.sq_amp) <= tol && std::abs(m.number_mean) <= tol &&
           std::abs(m.number_sq) <= tol;
}

}  // namespace detail

struct EvolvedMoments {
    MomentSet a;
    MomentSet b;
};

/// Propagates single-mode input moments through U for the product input b-vacuum x a-state.
inline EvolvedMoments heisenberg_moment_map(const PropagatorMatrix& u, const NormalMoments& initial_a,
                                            const MomentSet& initial_b) {
    if (!detail::is_vacuum(initial_b))
        throw std::invalid_argument("heisenberg_moment_map: b(0) must be in vacuum");
    const Eigen::Matrix2cd m = u.full();
    // b(t) = m00 b(0) + m01 a(0);  a(t) = m10 b(0) + m11 a(0)
    EvolvedMoments out;
    out.b = detail::combine_with_vacuum(m(0, 1), m(0, 0), initial_a);
    out.a = detail::combine_with_vacuum(m(1, 1), m(1, 0), initial_a);
    return out;
}

}  // namespace becsq
