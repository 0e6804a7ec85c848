#pragma once

// Number statistics, Mandel Q, quadrature squeezing, and the closed-form
// predictions for a squeezed-coherent optical input transferred to the atomic
// output mode. The printed:: namespace evaluates the closed forms exactly as
// they were published, typos included; the discrepancy report adjudicates them.

#include "becsq/fock.hpp"
#include "becsq/propagator.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace becsq {

struct ScenarioConfig {
    ModelParams params;
    SqueezedInput input;
    Truncation truncation{64};
    TailPolicy tail_policy;
};

/// The optical input state S(xi) D(m)|0> at the scenario truncation.
inline ModeVector input_state(const ScenarioConfig& cfg) {
    return squeezed_coherent_state(cfg.input, cfg.truncation, cfg.tail_policy);
}

/// Smallest cutoff >= the occupation heuristic whose input state passes the tail policy.
inline Truncation auto_truncation(const SqueezedInput& input, const TailPolicy& policy = {},
                                  int step = 8, int limit = 1024) {
    for (int n = heuristic_n_max(input); n <= limit; n += step) {
        try {
            (void)squeezed_coherent_state(input, Truncation(n), policy);
            return Truncation(n);
        } catch (const TruncationError&) {
        }
    }
    throw TruncationError("auto_truncation: no cutoff up to " + std::to_string(limit) + " passes", 1.0);
}

struct AlphaPair {
    double alpha1 = 1.0;  ///< sinh^2 r + cosh^2 r
    double alpha2 = 0.0;  ///< sinh r cosh r
};

inline AlphaPair alpha_pair(double r) {
    const double sh = std::sinh(r);
    const double ch = std::cosh(r);
    return {sh * sh + ch * ch, sh * ch};
}

enum class Source { literal, moment_map, oracle };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::literal: return "literal-paper";
        case Source::moment_map: return "moment-map";
        case Source::oracle: return "oracle";
    }
    return "?";
}

inline std::optional<Source> parse_source(std::string_view s) {
    if (s == "literal-paper" || s == "literal") return Source::literal;
    if (s == "moment-map") return Source::moment_map;
    if (s == "oracle") return Source::oracle;
    return std::nullopt;
}

/// Snapshot of all observables at one time. Empty optionals are "not available"
/// (undefined Q for an empty mode, or no closed form from the literal source).
struct ObservableRecord {
    double t = 0.0;
    Source source = Source::oracle;
    std::optional<double> na_mean, na_var, nb_mean, nb_var;
    std::optional<double> q_a, q_b;
    std::optional<double> s1a, s2a, s1b, s2b;
    std::optional<double> ntotal;
    int n_max = 0;
    double tail_mass = 0.0;
};

// ---------------------------------------------------------------------------
// Functionals on a MomentSet

/// Q = <dN^2>/<N> - 1; empty when <N> <= vacuum_tol.
inline std::optional<double> mandel_q(const MomentSet& m, double vacuum_tol = 1e-10) {
    if (m.number_mean <= vacuum_tol) return std::nullopt;
    return m.number_variance() / m.number_mean - 1.0;
}

enum class PhotonStatistics { sub_poisson, poisson, super_poisson };

inline PhotonStatistics classify(double q, double dead_band = 1e-9) {
    if (std::abs(q) <= dead_band) return PhotonStatistics::poisson;
    return q < 0.0 ? PhotonStatistics::sub_poisson : PhotonStatistics::super_poisson;
}

struct SqueezePair {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// S_i = 4 <dX_i^2> - 1 for X1 = (c + c^dag)/2, X2 = (c - c^dag)/2i.
/// Negative S_i means quadrature i is below the vacuum level.
inline SqueezePair squeeze_coeffs(const MomentSet& m) {
    const double re_sq = m.sq_amp.real();
    const double re_mean = m.mean_amp.real();
    const double im_mean = m.mean_amp.imag();
    return {2.0 * m.number_mean + 2.0 * re_sq - 4.0 * re_mean * re_mean,
            2.0 * m.number_mean - 2.0 * re_sq - 4.0 * im_mean * im_mean};
}

inline ObservableRecord record_from_moments(double t, const MomentSet& a, const MomentSet& b, Source source) {
    ObservableRecord rec;
    rec.t = t;
    rec.source = source;
    rec.na_mean = a.number_mean;
    rec.na_var = a.number_variance();
    rec.nb_mean = b.number_mean;
    rec.nb_var = b.number_variance();
    rec.q_a = mandel_q(a);
    rec.q_b = mandel_q(b);
    const auto sa = squeeze_coeffs(a);
    const auto sb = squeeze_coeffs(b);
    rec.s1a = sa.s1;
    rec.s2a = sa.s2;
    rec.s1b = sb.s1;
    rec.s2b = sb.s2;
    rec.ntotal = a.number_mean + b.number_mean;
    return rec;
}

// ---------------------------------------------------------------------------
// Moment-map source

/// Moment-map records on `times`; input moments are extracted from the truncated input state.
inline std::vector<ObservableRecord> moment_map_records(const ScenarioConfig& cfg, const std::vector<double>& times) {
    const ModeVector in = input_state(cfg);
    const NormalMoments a0 = extract_normal_moments(in);
    std::vector<ObservableRecord> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto ev = heisenberg_moment_map(propagator_at(cfg.params, t), a0, MomentSet{});
        auto rec = record_from_moments(t, ev.a, ev.b, Source::moment_map);
        rec.n_max = cfg.truncation.n_max();
        rec.tail_mass = in.tail_mass();
        out.push_back(rec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Printed closed forms (resonance, omega = omega0 = omega_a)

namespace printed {

struct Terms {
    double sh, ch, alpha1, alpha2;
    double m_abs2;       // |m|^2
    double phase_term;   // (m^*)^2 e^{-2i phi} + m^2 e^{2i phi}
    double m_real;       // m when m is real
    double c2, s2;       // cos^2, sin^2 of omega_r t
    double omega, theta;
};

inline void require_resonance(const ScenarioConfig& cfg, const char* who) {
    if (!cfg.params.resonant()) throw std::domain_error(std::string(who) + ": closed form requires resonance");
}

inline bool real_domain(const ScenarioConfig& cfg) { return cfg.input.phi == 0.0 && cfg.input.m.imag() == 0.0; }
inline bool squeezed_vacuum_domain(const ScenarioConfig& cfg) { return cfg.input.phi == 0.0 && cfg.input.m == cplx{}; }

inline Terms terms(const ScenarioConfig& cfg, double t, const char* who) {
    require_resonance(cfg, who);
    const double r = cfg.input.r;
    const auto ap = alpha_pair(r);
    const cplx m = cfg.input.m;
    const double wt = cfg.params.omega_r * t;
    Terms k{};
    k.sh = std::sinh(r);
    k.ch = std::cosh(r);
    k.alpha1 = ap.alpha1;
    k.alpha2 = ap.alpha2;
    k.m_abs2 = std::norm(m);
    k.phase_term = 2.0 * (m * m * std::polar(1.0, 2.0 * cfg.input.phi)).real();
    k.m_real = m.real();
    k.c2 = std::cos(wt) * std::cos(wt);
    k.s2 = std::sin(wt) * std::sin(wt);
    k.omega = cfg.params.omega0;
    k.theta = cfg.params.theta;
    return k;
}

/// Input occupation <a^dag(0) a(0)>, the bracket of the mean-number formula.
inline double input_number(const ScenarioConfig& cfg) {
    const auto k = terms(cfg, 0.0, "printed::input_number");
    return k.m_abs2 * k.alpha1 + k.phase_term * k.alpha2 + k.sh * k.sh;
}

/// Optical mean number, general phi and complex m.
inline double na_mean(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::na_mean");
    return (k.m_abs2 * k.alpha1 + k.phase_term * k.alpha2 + k.sh * k.sh) * k.c2;
}

/// Atomic mean number implied by complete conversion: input number times sin^2.
inline double nb_mean(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::nb_mean");
    return (k.m_abs2 * k.alpha1 + k.phase_term * k.alpha2 + k.sh * k.sh) * k.s2;
}

struct VariancePair {
    double na_var = 0.0;
    double nb_var = 0.0;
};

/// Number variances, general phi and complex m.
inline VariancePair variances_general(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::variances_general");
    const double quartic = k.m_abs2 * k.alpha1 * k.alpha1 + 2.0 * k.alpha2 * k.alpha2 * (2.0 * k.m_abs2 + 1.0) +
                           2.0 * k.alpha1 * k.alpha2 * k.phase_term;
    const double cross = k.alpha1 * k.m_abs2 + k.sh * k.sh + k.phase_term * k.alpha2;
    return {quartic * k.c2 * k.c2 + cross * k.s2 * k.c2, quartic * k.s2 * k.s2 + cross * k.s2 * k.c2};
}

/// Number variances for phi = 0 and real m.
inline std::optional<VariancePair> variances_real(const ScenarioConfig& cfg, double t) {
    if (!real_domain(cfg)) return std::nullopt;
    const auto k = terms(cfg, t, "printed::variances_real");
    const double m2 = k.m_real * k.m_real;
    const double ap = k.alpha1 + 2.0 * k.alpha2;
    const double quartic = m2 * ap * ap + 2.0 * k.alpha2 * k.alpha2;
    const double cross = k.sh * k.sh + ap * m2;
    return VariancePair{quartic * k.c2 * k.c2 + cross * k.s2 * k.c2, quartic * k.s2 * k.s2 + cross * k.s2 * k.c2};
}

/// Squeezed-vacuum optical mean and second moment as printed.
inline std::pair<double, double> vacuum_na_moments(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::vacuum_na_moments");
    const double sh2 = k.sh * k.sh;
    return {sh2 * k.c2, (2.0 * k.alpha2 + sh2 * sh2) * k.c2 * k.c2};
}

/// Squeezed-vacuum variances as printed (optical, atomic).
inline VariancePair vacuum_variances(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::vacuum_variances");
    return {std::sqrt(2.0) * k.sh * k.c2 * k.c2, std::sqrt(2.0) * k.sh * k.ch * k.s2 * k.s2};
}

/// Variances at a complete-conversion time, phi = 0 and real m.
inline VariancePair conversion_variances(const ScenarioConfig& cfg) {
    const auto k = terms(cfg, 0.0, "printed::conversion_variances");
    const double ap = k.alpha1 + 2.0 * k.alpha2;
    return {0.0, k.m_real * k.m_real * ap * ap + 2.0 * k.alpha2 * k.alpha2};
}

struct QPair {
    double q_a = 0.0;
    double q_b = 0.0;
};

/// Q pair for phi = 0 and real m, numerator exactly as printed.
inline QPair q_pair_general(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::q_pair_general");
    const double m2 = k.m_real * k.m_real;
    const double ap = k.alpha1 + 2.0 * k.alpha2;
    const double amp = (m2 * ap * ap + 2.0 * k.alpha2) / (m2 * ap + k.sh * k.sh) - 1.0;
    return {amp * k.c2, amp * k.s2};
}

/// Squeezed-vacuum Q pair: alpha1 (cos^2, sin^2).
inline QPair q_pair_vacuum(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::q_pair_vacuum");
    return {k.alpha1 * k.c2, k.alpha1 * k.s2};
}

/// Atomic second moments for the squeezed vacuum as printed: (<b^2>, <b^dag b>).
inline std::pair<cplx, double> vacuum_b_moments(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::vacuum_b_moments");
    return {-k.sh * k.ch * std::polar(1.0, -2.0 * k.omega * t) * k.s2, k.sh * k.sh * k.ch * k.ch * k.s2};
}

/// Atomic squeezing coefficients for the squeezed vacuum (phi = 0, m = 0).
inline SqueezePair sb_pair(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::sb_pair");
    const double c = std::cos(2.0 * (k.omega * t + k.theta));
    return {2.0 * k.sh * (k.sh - k.ch * c) * k.s2, 2.0 * k.sh * (k.sh + k.ch * c) * k.s2};
}

/// Atomic squeezing coefficients when omega t + theta = n pi, as printed.
inline SqueezePair sb_pair_in_phase(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::sb_pair_in_phase");
    const double v = 2.0 * k.sh * std::exp(-cfg.input.r) * k.s2;
    return {-v, v};
}

/// Atomic squeezing coefficients when omega t + theta = (n + 1/2) pi, as printed.
inline SqueezePair sb_pair_quadrature(const ScenarioConfig& cfg, double t) {
    const auto k = terms(cfg, t, "printed::sb_pair_quadrature");
    const double v = 2.0 * k.sh * std::exp(-cfg.input.r) * k.s2;
    return {v, -v};
}

/// Squeezing coefficients from moments with the printed mean-field term (Re<c>)^2.
inline SqueezePair squeeze_coeffs_printed(const MomentSet& m) {
    const double re_sq = m.sq_amp.real();
    const double re_mean = m.mean_amp.real();
    const double im_mean = m.mean_amp.imag();
    return {2.0 * m.number_mean + 2.0 * re_sq - re_mean * re_mean,
            2.0 * m.number_mean - 2.0 * re_sq - im_mean * im_mean};
}

}  // namespace printed

/// Literal-source Q pair: the squeezed-vacuum form when m = 0, else the general printed form.
inline printed::QPair printed_q_pair(const ScenarioConfig& cfg, double t) {
    if (!printed::real_domain(cfg)) throw std::domain_error("printed_q_pair: requires phi = 0 and real m");
    return cfg.input.m == cplx{} ? printed::q_pair_vacuum(cfg, t) : printed::q_pair_general(cfg, t);
}

inline SqueezePair printed_sb_pair(const ScenarioConfig& cfg, double t) {
    if (!printed::squeezed_vacuum_domain(cfg)) throw std::domain_error("printed_sb_pair: requires m = 0 and phi = 0");
    return printed::sb_pair(cfg, t);
}

/// Record built only from printed closed forms; fields without one stay empty.
inline ObservableRecord literal_record(const ScenarioConfig& cfg, double t) {
    ObservableRecord rec;
    rec.t = t;
    rec.source = Source::literal;
    rec.n_max = cfg.truncation.n_max();
    if (!cfg.params.resonant()) return rec;

    rec.na_mean = printed::na_mean(cfg, t);
    rec.nb_mean = printed::nb_mean(cfg, t);
    rec.ntotal = *rec.na_mean + *rec.nb_mean;
    const auto v = printed::variances_general(cfg, t);
    rec.na_var = v.na_var;
    rec.nb_var = v.nb_var;
    if (printed::real_domain(cfg)) {
        // at an empty mode this is the t -> t0 limit of Q, not an evaluation
        const auto q = printed_q_pair(cfg, t);
        rec.q_a = q.q_a;
        rec.q_b = q.q_b;
    }
    if (printed::squeezed_vacuum_domain(cfg)) {
        const auto s = printed::sb_pair(cfg, t);
        rec.s1b = s.s1;
        rec.s2b = s.s2;
    }
    return rec;
}

}  // namespace becsq
