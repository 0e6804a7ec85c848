#pragma once

// Adjudication of the printed closed forms against the moment map and the
// Fock-space oracle. Each formula row carries the printed expression, an
// optional pre-registered corrected form, the times at which the expression
// claims to hold, and the observable it predicts.

#include "becsq/fock.hpp"
#include "becsq/observables.hpp"
#include "becsq/oracle.hpp"
#include "becsq/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace becsq {

enum class Verdict { confirmed, typo_suspect, unresolved };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::confirmed: return "CONFIRMED";
        case Verdict::typo_suspect: return "TYPO-SUSPECT";
        case Verdict::unresolved: return "UNRESOLVED";
    }
    return "?";
}

struct Tolerances {
    double algebraic = 1e-8;  ///< moment map vs oracle (same truncated input)
    double oracle = 1e-6;     ///< closed form vs oracle, relative to max(1, |oracle|)
};

struct FormulaPoint {
    double t = 0.0;
    cplx literal;
    std::optional<cplx> corrected;
    cplx moment_map;
    cplx oracle;
    double literal_dev = 0.0;                ///< vs oracle
    std::optional<double> corrected_dev;     ///< vs oracle
    double source_dev = 0.0;                 ///< moment map vs oracle
    double scale = 1.0;                      ///< max(1, |oracle|)
};

struct FormulaVerdict {
    std::string id;
    std::string expression;
    std::string printed_form;
    std::string corrected_form;  ///< empty when no correction is registered
    Verdict verdict = Verdict::unresolved;
    std::vector<FormulaPoint> points;

    double max_literal_rel() const {
        double w = 0.0;
        for (const auto& p : points) w = std::max(w, p.literal_dev / p.scale);
        return w;
    }
    std::optional<double> max_corrected_rel() const {
        if (corrected_form.empty()) return std::nullopt;
        double w = 0.0;
        for (const auto& p : points) w = std::max(w, p.corrected_dev.value_or(INFINITY) / p.scale);
        return w;
    }
};

struct DiscrepancyReport {
    Tolerances tolerances;
    int n_max = 0;
    double tail_mass = 0.0;
    std::vector<FormulaVerdict> formulas;

    bool any_unresolved() const {
        return std::any_of(formulas.begin(), formulas.end(),
                           [](const FormulaVerdict& f) { return f.verdict == Verdict::unresolved; });
    }
    const FormulaVerdict* find(std::string_view id, std::string_view expression) const {
        for (const auto& f : formulas)
            if (f.id == id && f.expression == expression) return &f;
        return nullptr;
    }
};

namespace detail {

struct Snapshot {
    MomentSet a;
    MomentSet b;
};

enum class TimeSet { grid, conversion, in_phase, quadrature };
enum class Compare { value, phase };

struct FormulaSpec {
    std::string id;
    std::string expression;
    std::string printed_form;
    std::string corrected_form;
    TimeSet times = TimeSet::grid;
    Compare compare = Compare::value;
    std::function<bool(const ScenarioConfig&)> applies;
    std::function<cplx(const ScenarioConfig&, double)> literal;
    std::function<std::optional<cplx>(const ScenarioConfig&, double)> corrected;  // may be empty
    std::function<std::optional<cplx>(const Snapshot&)> truth;                   // nullopt: skip this time
};

inline double wrap_angle(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

inline std::vector<double> phase_times(const ScenarioConfig& cfg, double t_max, double offset) {
    // omega t + theta = (n + offset) pi with sin(omega_r t) != 0
    std::vector<double> out;
    const double w = cfg.params.omega0;
    if (!(w > 0.0)) return out;
    const double pi = std::numbers::pi;
    for (int n = 0;; ++n) {
        const double t = ((n + offset) * pi - cfg.params.theta) / w;
        if (t > t_max * (1.0 + 1e-12)) break;
        if (t < 0.0) continue;
        if (std::abs(std::sin(cfg.params.omega_r * t)) > 1e-6) out.push_back(t);
        if (n > 1'000'000) break;
    }
    return out;
}

inline std::vector<double> conversion_times_within(const ScenarioConfig& cfg, double t_max) {
    std::vector<double> out;
    for (int n = 0;; ++n) {
        const double t = (n + 0.5) * std::numbers::pi / cfg.params.omega_r;
        if (t > t_max * (1.0 + 1e-12)) break;
        out.push_back(t);
    }
    return out;
}

inline cplx value(double x) { return {x, 0.0}; }

inline std::vector<FormulaSpec> registered_formulas() {
    using printed::squeezed_vacuum_domain;
    using printed::real_domain;
    const auto resonant = [](const ScenarioConfig& c) { return c.params.resonant(); };
    const auto sv = [](const ScenarioConfig& c) { return c.params.resonant() && squeezed_vacuum_domain(c); };
    const auto real = [](const ScenarioConfig& c) { return c.params.resonant() && real_domain(c); };
    const auto any = [](const ScenarioConfig&) { return true; };
    const auto sin2 = [](const ScenarioConfig& c, double t) { return std::pow(std::sin(c.params.omega_r * t), 2); };
    const auto cos2 = [](const ScenarioConfig& c, double t) { return std::pow(std::cos(c.params.omega_r * t), 2); };
    const auto analytic_mean = [](const ScenarioConfig& c) {
        const cplx m = c.input.m;
        return m * std::cosh(c.input.r) + std::conj(m) * std::polar(1.0, -2.0 * c.input.phi) * std::sinh(c.input.r);
    };

    std::vector<FormulaSpec> f;

    f.push_back({"Eq. (4)", "<b(t)>", "U(t) (0, <a(0)>)^T, detuned transfer matrix", "", TimeSet::grid,
                 Compare::value, any,
                 [=](const ScenarioConfig& c, double t) { return propagator_at(c.params, t).full()(0, 1) * analytic_mean(c); },
                 {}, [](const Snapshot& s) { return std::optional<cplx>(s.b.mean_amp); }});
    f.push_back({"Eq. (4)", "<a(t)>", "U(t) (0, <a(0)>)^T, detuned transfer matrix", "", TimeSet::grid,
                 Compare::value, any,
                 [=](const ScenarioConfig& c, double t) { return propagator_at(c.params, t).full()(1, 1) * analytic_mean(c); },
                 {}, [](const Snapshot& s) { return std::optional<cplx>(s.a.mean_amp); }});

    f.push_back({"Eq. (7)", "<b^dag b>(t0) = <a^dag a>(0)", "{|m|^2 a1 + 2 Re(m^2 e^{2i phi}) a2 + sinh^2 r} at cos(wR t0) = 0",
                 "", TimeSet::conversion, Compare::value, resonant,
                 [](const ScenarioConfig& c, double) { return value(printed::input_number(c)); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_mean); }});

    f.push_back({"Eq. (8)", "<N_a(t)>", "{|m|^2 a1 + 2 Re(m^2 e^{2i phi}) a2 + sinh^2 r} cos^2(wR t)", "", TimeSet::grid,
                 Compare::value, resonant, [](const ScenarioConfig& c, double t) { return value(printed::na_mean(c, t)); },
                 {}, [](const Snapshot& s) { return std::optional<cplx>(s.a.number_mean); }});

    f.push_back({"Eq. (9)", "<dN_a^2(t)>", "{|m|^2 a1^2 + 2 a2^2 (2|m|^2+1) + 2 a1 a2 P} cos^4 + {a1 |m|^2 + sinh^2 r + P a2} sin^2 cos^2",
                 "", TimeSet::grid, Compare::value, resonant,
                 [](const ScenarioConfig& c, double t) { return value(printed::variances_general(c, t).na_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_variance()); }});
    f.push_back({"Eq. (10)", "<dN_b^2(t)>", "{|m|^2 a1^2 + 2 a2^2 (2|m|^2+1) + 2 a1 a2 P} sin^4 + {a1 |m|^2 + sinh^2 r + P a2} sin^2 cos^2",
                 "", TimeSet::grid, Compare::value, resonant,
                 [](const ScenarioConfig& c, double t) { return value(printed::variances_general(c, t).nb_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_variance()); }});

    f.push_back({"Eq. (11)", "<dN_a^2(t)> (phi=0, m real)", "[m^2 (a1+2a2)^2 + 2 a2^2] cos^4 + [sinh^2 r + (a1+2a2) m^2] sin^2 cos^2",
                 "", TimeSet::grid, Compare::value, real,
                 [](const ScenarioConfig& c, double t) { return value(printed::variances_real(c, t)->na_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_variance()); }});
    f.push_back({"Eq. (12)", "<dN_b^2(t)> (phi=0, m real)", "[m^2 (a1+2a2)^2 + 2 a2^2] sin^4 + [sinh^2 r + (a1+2a2) m^2] sin^2 cos^2",
                 "", TimeSet::grid, Compare::value, real,
                 [](const ScenarioConfig& c, double t) { return value(printed::variances_real(c, t)->nb_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_variance()); }});

    f.push_back({"Eq. (13)", "<N_a(t)> (m=0)", "sinh^2 r cos^2(wR t)", "", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::vacuum_na_moments(c, t).first); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_mean); }});
    f.push_back({"Eq. (13)", "<N_a^2(t)> (m=0)", "(2 a2 + sinh^4 r) cos^4(wR t)",
                 "(2 a2^2 + sinh^4 r) cos^4 + sinh^2 r sin^2 cos^2", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::vacuum_na_moments(c, t).second); },
                 [=](const ScenarioConfig& c, double t) -> std::optional<cplx> {
                     const double sh2 = std::pow(std::sinh(c.input.r), 2);
                     const double a2 = alpha_pair(c.input.r).alpha2;
                     const double cc = cos2(c, t);
                     return value((2.0 * a2 * a2 + sh2 * sh2) * cc * cc + sh2 * sin2(c, t) * cc);
                 },
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_sq); }});

    f.push_back({"Eq. (14)", "<dN_a^2(t)> (m=0)", "sqrt(2) sinh r cos^4(wR t)",
                 "2 sinh^2 r cosh^2 r cos^4 + sinh^2 r sin^2 cos^2", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::vacuum_variances(c, t).na_var); },
                 [=](const ScenarioConfig& c, double t) -> std::optional<cplx> {
                     const double a2 = alpha_pair(c.input.r).alpha2;
                     const double cc = cos2(c, t);
                     return value(2.0 * a2 * a2 * cc * cc + std::pow(std::sinh(c.input.r), 2) * sin2(c, t) * cc);
                 },
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_variance()); }});
    f.push_back({"Eq. (14)", "<dN_b^2(t)> (m=0)", "sqrt(2) sinh r cosh r sin^4(wR t)",
                 "2 sinh^2 r cosh^2 r sin^4 + sinh^2 r sin^2 cos^2", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::vacuum_variances(c, t).nb_var); },
                 [=](const ScenarioConfig& c, double t) -> std::optional<cplx> {
                     const double a2 = alpha_pair(c.input.r).alpha2;
                     const double ss = sin2(c, t);
                     return value(2.0 * a2 * a2 * ss * ss + std::pow(std::sinh(c.input.r), 2) * ss * cos2(c, t));
                 },
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_variance()); }});

    f.push_back({"Eq. (16)", "<dN_a^2(t0)>", "0 at cos(wR t0) = 0", "", TimeSet::conversion, Compare::value, real,
                 [](const ScenarioConfig& c, double) { return value(printed::conversion_variances(c).na_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.a.number_variance()); }});
    f.push_back({"Eq. (16)", "<dN_b^2(t0)>", "m^2 (a1 + 2 a2)^2 + 2 a2^2 at cos(wR t0) = 0", "", TimeSet::conversion,
                 Compare::value, real,
                 [](const ScenarioConfig& c, double) { return value(printed::conversion_variances(c).nb_var); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_variance()); }});

    const auto q_of = [](const MomentSet& m) -> std::optional<cplx> {
        if (m.number_mean <= 1e-6) return std::nullopt;
        return value(*mandel_q(m));
    };
    const auto q_corrected = [=](const ScenarioConfig& c, double t, bool atomic) -> std::optional<cplx> {
        const auto ap = alpha_pair(c.input.r);
        const double m2 = c.input.m.real() * c.input.m.real();
        const double s = ap.alpha1 + 2.0 * ap.alpha2;
        const double amp = (m2 * s * s + 2.0 * ap.alpha2 * ap.alpha2) / (m2 * s + std::pow(std::sinh(c.input.r), 2)) - 1.0;
        return value(amp * (atomic ? sin2(c, t) : cos2(c, t)));
    };
    f.push_back({"Eq. (18)", "Q_a(t) (phi=0, m real)", "[(m^2 (a1+2a2)^2 + 2 a2) / (m^2 (a1+2a2) + sinh^2 r) - 1] cos^2",
                 "numerator 2 a2 -> 2 a2^2", TimeSet::grid, Compare::value, real,
                 [](const ScenarioConfig& c, double t) { return value(printed::q_pair_general(c, t).q_a); },
                 [=](const ScenarioConfig& c, double t) { return q_corrected(c, t, false); },
                 [=](const Snapshot& s) { return q_of(s.a); }});
    f.push_back({"Eq. (18)", "Q_b(t) (phi=0, m real)", "[(m^2 (a1+2a2)^2 + 2 a2) / (m^2 (a1+2a2) + sinh^2 r) - 1] sin^2",
                 "numerator 2 a2 -> 2 a2^2", TimeSet::grid, Compare::value, real,
                 [](const ScenarioConfig& c, double t) { return value(printed::q_pair_general(c, t).q_b); },
                 [=](const ScenarioConfig& c, double t) { return q_corrected(c, t, true); },
                 [=](const Snapshot& s) { return q_of(s.b); }});

    f.push_back({"Eq. (19)", "Q_a(t) (m=0)", "a1 cos^2(wR t)", "", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::q_pair_vacuum(c, t).q_a); }, {},
                 [=](const Snapshot& s) { return q_of(s.a); }});
    f.push_back({"Eq. (19)", "Q_b(t) (m=0)", "a1 sin^2(wR t)", "", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::q_pair_vacuum(c, t).q_b); }, {},
                 [=](const Snapshot& s) { return q_of(s.b); }});

    // printed functional vs quadrature variance, both on the oracle's own moments
    f.push_back({"Eq. (22)", "S_1b from moments", "2<N_b> + 2 Re<b^2> - (Re<b>)^2", "mean term -> 4 (Re<b>)^2",
                 TimeSet::grid, Compare::value, any, nullptr, nullptr,
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s1); }});
    f.push_back({"Eq. (22)", "S_2b from moments", "2<N_b> - 2 Re<b^2> - (Im<b>)^2", "mean term -> 4 (Im<b>)^2",
                 TimeSet::grid, Compare::value, any, nullptr, nullptr,
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s2); }});

    f.push_back({"Eq. (23)", "|<b^2(t)>| (m=0)", "sinh r cosh r sin^2(wR t)", "", TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(std::abs(printed::vacuum_b_moments(c, t).first)); },
                 {}, [](const Snapshot& s) { return std::optional<cplx>(std::abs(s.b.sq_amp)); }});
    f.push_back({"Eq. (23)", "arg <b^2(t)> (m=0)", "arg(-e^{-2i w t})", "arg(-e^{-2i (w t + theta)})", TimeSet::grid,
                 Compare::phase, sv,
                 [](const ScenarioConfig& c, double t) { return value(std::arg(-std::polar(1.0, -2.0 * c.params.omega0 * t))); },
                 [](const ScenarioConfig& c, double t) -> std::optional<cplx> {
                     return value(std::arg(-std::polar(1.0, -2.0 * (c.params.omega0 * t + c.params.theta))));
                 },
                 [](const Snapshot& s) -> std::optional<cplx> {
                     if (std::abs(s.b.sq_amp) <= 1e-6) return std::nullopt;
                     return value(std::arg(s.b.sq_amp));
                 }});
    f.push_back({"Eq. (23)", "<b^dag b(t)> (m=0)", "sinh^2 r cosh^2 r sin^2(wR t)", "sinh^2 r sin^2(wR t)", TimeSet::grid,
                 Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::vacuum_b_moments(c, t).second); },
                 [=](const ScenarioConfig& c, double t) -> std::optional<cplx> {
                     return value(std::pow(std::sinh(c.input.r), 2) * sin2(c, t));
                 },
                 [](const Snapshot& s) { return std::optional<cplx>(s.b.number_mean); }});

    f.push_back({"Eq. (24)", "S_1b(t) (m=0)", "2 sinh r {sinh r - cosh r cos[2(w t + theta)]} sin^2(wR t)", "",
                 TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair(c, t).s1); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s1); }});
    f.push_back({"Eq. (24)", "S_2b(t) (m=0)", "2 sinh r {sinh r + cosh r cos[2(w t + theta)]} sin^2(wR t)", "",
                 TimeSet::grid, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair(c, t).s2); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s2); }});

    const auto anti = [=](const ScenarioConfig& c, double t) -> std::optional<cplx> {
        return value(2.0 * std::sinh(c.input.r) * std::exp(c.input.r) * sin2(c, t));
    };
    f.push_back({"Eq. (25)", "S_1b(t) at w t + theta = n pi", "-2 sinh r e^{-r} sin^2(wR t)", "", TimeSet::in_phase,
                 Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair_in_phase(c, t).s1); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s1); }});
    f.push_back({"Eq. (25)", "S_2b(t) at w t + theta = n pi", "2 sinh r e^{-r} sin^2(wR t)", "2 sinh r e^{r} sin^2(wR t)",
                 TimeSet::in_phase, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair_in_phase(c, t).s2); }, anti,
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s2); }});
    f.push_back({"Eq. (26)", "S_1b(t) at w t + theta = (n+1/2) pi", "2 sinh r e^{-r} sin^2(wR t)",
                 "2 sinh r e^{r} sin^2(wR t)", TimeSet::quadrature, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair_quadrature(c, t).s1); }, anti,
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s1); }});
    f.push_back({"Eq. (26)", "S_2b(t) at w t + theta = (n+1/2) pi", "-2 sinh r e^{-r} sin^2(wR t)", "",
                 TimeSet::quadrature, Compare::value, sv,
                 [](const ScenarioConfig& c, double t) { return value(printed::sb_pair_quadrature(c, t).s2); }, {},
                 [](const Snapshot& s) { return std::optional<cplx>(squeeze_coeffs(s.b).s2); }});
    return f;
}

inline double deviation(Compare kind, cplx x, cplx y) {
    if (kind == Compare::phase) return std::abs(wrap_angle(x.real() - y.real()));
    return std::abs(x - y);
}

}  // namespace detail

/// Three-way comparison of every registered closed form on `grid` plus the
/// exact phase-condition times in [0, t_max].
inline DiscrepancyReport discrepancy_report(const ScenarioConfig& cfg, const std::vector<double>& grid, double t_max,
                                            const Tolerances& tol = {}) {
    using detail::TimeSet;
    std::vector<double> conv, in_phase, quad;
    if (cfg.params.resonant()) {
        conv = detail::conversion_times_within(cfg, t_max);
        in_phase = detail::phase_times(cfg, t_max, 0.0);
        quad = detail::phase_times(cfg, t_max, 0.5);
    }
    std::vector<double> all = grid;
    all.insert(all.end(), conv.begin(), conv.end());
    all.insert(all.end(), in_phase.begin(), in_phase.end());
    all.insert(all.end(), quad.begin(), quad.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    const ModeVector in = input_state(cfg);
    const NormalMoments a0 = extract_normal_moments(in);
    const auto oracle = run_oracle(cfg, all);

    std::map<double, std::size_t> at;
    std::vector<detail::Snapshot> oracle_snap, map_snap;
    for (std::size_t i = 0; i < all.size(); ++i) {
        at[all[i]] = i;
        oracle_snap.push_back({extract_moments(oracle.states[i], Mode::a), extract_moments(oracle.states[i], Mode::b)});
        const auto ev = heisenberg_moment_map(propagator_at(cfg.params, all[i]), a0, MomentSet{});
        map_snap.push_back({ev.a, ev.b});
    }

    DiscrepancyReport report;
    report.tolerances = tol;
    report.n_max = cfg.truncation.n_max();
    report.tail_mass = in.tail_mass();

    for (const auto& spec : detail::registered_formulas()) {
        if (!spec.applies(cfg)) continue;
        const std::vector<double>* times = &grid;
        switch (spec.times) {
            case TimeSet::grid: times = &grid; break;
            case TimeSet::conversion: times = &conv; break;
            case TimeSet::in_phase: times = &in_phase; break;
            case TimeSet::quadrature: times = &quad; break;
        }

        FormulaVerdict fv{spec.id, spec.expression, spec.printed_form, spec.corrected_form, Verdict::unresolved, {}};
        for (double t : *times) {
            const std::size_t i = at.at(t);
            const auto truth = spec.truth(oracle_snap[i]);
            const auto mm = spec.truth(map_snap[i]);
            if (!truth || !mm) continue;

            FormulaPoint p;
            p.t = t;
            p.oracle = *truth;
            p.moment_map = *mm;
            if (spec.literal) {
                p.literal = spec.literal(cfg, t);
                if (spec.corrected) p.corrected = spec.corrected(cfg, t);
            } else {
                // a functional of the moments rather than a closed form in t
                const bool first = spec.expression.find("S_1") != std::string::npos;
                const auto printed = printed::squeeze_coeffs_printed(oracle_snap[i].b);
                p.literal = first ? printed.s1 : printed.s2;
                p.corrected = *truth;
            }
            p.scale = std::max(1.0, std::abs(p.oracle));
            p.literal_dev = detail::deviation(spec.compare, p.literal, p.oracle);
            if (p.corrected) p.corrected_dev = detail::deviation(spec.compare, *p.corrected, p.oracle);
            p.source_dev = detail::deviation(spec.compare, p.moment_map, p.oracle);
            fv.points.push_back(p);
        }
        if (fv.points.empty()) continue;

        const bool sources_agree = std::all_of(fv.points.begin(), fv.points.end(), [&](const FormulaPoint& p) {
            return p.source_dev <= tol.algebraic * p.scale;
        });
        const bool literal_ok = std::all_of(fv.points.begin(), fv.points.end(), [&](const FormulaPoint& p) {
            return p.literal_dev <= tol.oracle * p.scale;
        });
        const bool corrected_ok = !spec.corrected_form.empty() &&
                                  std::all_of(fv.points.begin(), fv.points.end(), [&](const FormulaPoint& p) {
                                      return p.corrected_dev && *p.corrected_dev <= tol.oracle * p.scale;
                                  });
        if (!sources_agree) fv.verdict = Verdict::unresolved;
        else if (literal_ok) fv.verdict = Verdict::confirmed;
        else if (corrected_ok) fv.verdict = Verdict::typo_suspect;
        else fv.verdict = Verdict::unresolved;
        report.formulas.push_back(std::move(fv));
    }
    return report;
}

}  // namespace becsq
