#pragma once

// Brute-force ground truth: the two-mode Hamiltonian
//
//   H = omega0 b^dag b + omega_a a^dag a + omega_r (e^{-i theta} a b^dag + e^{i theta} a^dag b)
//
// in the truncated Fock basis, evolved exactly block by block.
//
// H conserves n_tot = n_a + n_b. Blocks with n_tot <= n_max contain every
// (n_b, n_a) pair of that total and are exact; blocks with n_tot > n_max lose
// their outer states to the cutoff and are truncation artifacts. States
// supported on n_tot <= n_max (any b-vacuum product input) never reach them.

#include "becsq/fock.hpp"
#include "becsq/observables.hpp"
#include "becsq/propagator.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace becsq {

struct HamiltonianMatrix {
    ModelParams params;
    Truncation truncation;
    Eigen::SparseMatrix<cplx> entries;

    std::size_t dimension() const { return truncation.two_mode_dim(); }
};

inline HamiltonianMatrix build_hamiltonian(const ModelParams& params, const Truncation& trunc) {
    params.validate();
    const int n = trunc.n_max();
    const auto d = static_cast<int>(trunc.dim());
    const auto idx = [d](int nb, int na) { return nb * d + na; };
    const cplx hop_phase = std::polar(1.0, -params.theta);

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(trunc.two_mode_dim() * 3);
    for (int nb = 0; nb <= n; ++nb) {
        for (int na = 0; na <= n; ++na) {
            trip.emplace_back(idx(nb, na), idx(nb, na), cplx(params.omega0 * nb + params.omega_a * na, 0.0));
            if (na >= 1 && nb + 1 <= n) {
                // <nb+1, na-1| e^{-i theta} a b^dag |nb, na> = e^{-i theta} sqrt(na) sqrt(nb+1)
                const cplx h = params.omega_r * hop_phase * std::sqrt(static_cast<double>(na) * (nb + 1));
                trip.emplace_back(idx(nb + 1, na - 1), idx(nb, na), h);
                trip.emplace_back(idx(nb, na), idx(nb + 1, na - 1), std::conj(h));
            }
        }
    }
    HamiltonianMatrix h{params, trunc, Eigen::SparseMatrix<cplx>(d * d, d * d)};
    h.entries.setFromTriplets(trip.begin(), trip.end());
    return h;
}

struct EvolutionResult {
    std::vector<TwoModeState> states;
    std::vector<ObservableRecord> records;
    double norm_drift = 0.0;     ///< max | ||psi(t)|| - 1 |
    double ntotal_drift = 0.0;   ///< max | <N_a + N_b>(t) - <N_a + N_b>(0) |
    double block_drift = 0.0;    ///< max change of any n_tot block probability
};

namespace detail {

struct Block {
    int n_tot = 0;
    int nb_lo = 0;   // first n_b in the block
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

// Blocks of the gauged Hamiltonian D H D^dag with D = diag(e^{i theta n_b}), which
// is real symmetric tridiagonal in n_b.
inline std::vector<Block> diagonalize_blocks(const ModelParams& p, const Truncation& trunc, int max_n_tot) {
    const int n = trunc.n_max();
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(max_n_tot) + 1);
    for (int k = 0; k <= max_n_tot; ++k) {
        Block blk;
        blk.n_tot = k;
        blk.nb_lo = std::max(0, k - n);
        const int nb_hi = std::min(k, n);
        const int size = nb_hi - blk.nb_lo + 1;
        Eigen::VectorXd diag(size);
        Eigen::VectorXd sub(std::max(size - 1, 0));
        for (int j = 0; j < size; ++j) {
            const int nb = blk.nb_lo + j;
            diag(j) = p.omega0 * nb + p.omega_a * (k - nb);
            if (j + 1 < size) sub(j) = p.omega_r * std::sqrt(static_cast<double>(k - nb) * (nb + 1));
        }
        if (size == 1) {
            blk.energies = diag;
            blk.vectors = Eigen::MatrixXd::Identity(1, 1);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            if (es.info() != Eigen::Success) throw std::runtime_error("oracle: block eigensolver failed");
            blk.energies = es.eigenvalues();
            blk.vectors = es.eigenvectors();
        }
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

inline std::vector<double> block_probabilities(const TwoModeState& s) {
    const int n = s.truncation.n_max();
    std::vector<double> p(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (int nb = 0; nb <= n; ++nb)
        for (int na = 0; na <= n; ++na) p[static_cast<std::size_t>(nb + na)] += std::norm(s.at(nb, na));
    return p;
}

inline double marginal_tail_mass(const TwoModeState& s, Mode mode) {
    const int n = s.truncation.n_max();
    std::vector<cplx> amp(s.truncation.dim());
    std::vector<double> p(s.truncation.dim(), 0.0);
    for (int nb = 0; nb <= n; ++nb)
        for (int na = 0; na <= n; ++na) p[static_cast<std::size_t>(mode == Mode::a ? na : nb)] += std::norm(s.at(nb, na));
    for (std::size_t i = 0; i < p.size(); ++i) amp[i] = std::sqrt(p[i]);
    return tail_mass(amp);
}

}  // namespace detail

/// Exact evolution exp(-iHt)|psi0> at each requested time (sorted, nonnegative).
inline EvolutionResult evolve(const TwoModeState& state0, const HamiltonianMatrix& h, const std::vector<double>& times,
                              const TailPolicy& policy = {}) {
    if (!(state0.truncation == h.truncation)) throw std::invalid_argument("evolve: truncation mismatch");
    if (std::abs(state0.norm() - 1.0) > 1e-10) throw std::invalid_argument("evolve: state0 must be normalized");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
            throw std::invalid_argument("evolve: times must be sorted and nonnegative");
    }

    const int n = h.truncation.n_max();
    const auto p0 = detail::block_probabilities(state0);
    double artifact_mass = 0.0;
    for (int k = n + 1; k <= 2 * n; ++k) artifact_mass += p0[static_cast<std::size_t>(k)];
    if (artifact_mass > policy.tail_threshold) {
        throw TruncationError("evolve: initial state occupies incomplete n_tot blocks (mass " +
                                  std::to_string(artifact_mass) + ")",
                              artifact_mass);
    }

    int max_k = 0;
    for (int k = 0; k <= 2 * n; ++k)
        if (p0[static_cast<std::size_t>(k)] > 0.0) max_k = k;
    const auto blocks = detail::diagonalize_blocks(h.params, h.truncation, max_k);

    // project the gauged initial state onto each block's eigenbasis once
    const double theta = h.params.theta;
    std::vector<Eigen::VectorXcd> coeffs;
    coeffs.reserve(blocks.size());
    for (const auto& blk : blocks) {
        const auto size = blk.energies.size();
        Eigen::VectorXcd v(size);
        for (Eigen::Index j = 0; j < size; ++j) {
            const int nb = blk.nb_lo + static_cast<int>(j);
            v(j) = std::polar(1.0, theta * nb) * state0.at(nb, blk.n_tot - nb);
        }
        coeffs.push_back(blk.vectors.transpose().cast<cplx>() * v);
    }

    EvolutionResult result;
    result.states.reserve(times.size());
    result.records.reserve(times.size());
    const double n0 = extract_moments(state0, Mode::a).number_mean + extract_moments(state0, Mode::b).number_mean;
    const double tail = detail::marginal_tail_mass(state0, Mode::a);

    for (double t : times) {
        TwoModeState s{std::vector<cplx>(state0.amplitudes.size()), state0.truncation};
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const auto& blk = blocks[bi];
            const Eigen::VectorXcd phased =
                coeffs[bi].cwiseProduct(blk.energies.unaryExpr([t](double e) { return std::polar(1.0, -e * t); }));
            const Eigen::VectorXcd v = blk.vectors.cast<cplx>() * phased;
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                const int nb = blk.nb_lo + static_cast<int>(j);
                s.amplitudes[s.index(nb, blk.n_tot - nb)] = std::polar(1.0, -theta * nb) * v(j);
            }
        }

        const MomentSet ma = extract_moments(s, Mode::a);
        const MomentSet mb = extract_moments(s, Mode::b);
        auto rec = record_from_moments(t, ma, mb, Source::oracle);
        rec.n_max = n;
        rec.tail_mass = tail;
        result.records.push_back(rec);

        result.norm_drift = std::max(result.norm_drift, std::abs(s.norm() - 1.0));
        result.ntotal_drift = std::max(result.ntotal_drift, std::abs(ma.number_mean + mb.number_mean - n0));
        const auto pk = detail::block_probabilities(s);
        for (std::size_t k = 0; k < pk.size(); ++k) result.block_drift = std::max(result.block_drift, std::abs(pk[k] - p0[k]));
        result.states.push_back(std::move(s));
    }
    return result;
}

/// Oracle run for a scenario: |0>_b (x) S(xi)D(m)|0>_a evolved under the full Hamiltonian.
inline EvolutionResult run_oracle(const ScenarioConfig& cfg, const std::vector<double>& times) {
    const ModeVector in = input_state(cfg);
    const TwoModeState psi0 = tensor_product(vacuum(cfg.truncation), in);
    auto result = evolve(psi0, build_hamiltonian(cfg.params, cfg.truncation), times, cfg.tail_policy);
    for (auto& rec : result.records) rec.tail_mass = in.tail_mass();
    return result;
}

// ---------------------------------------------------------------------------
// Convergence in the cutoff

struct ConvergenceStep {
    int n_max = 0;
    double tail_mass = 0.0;
    bool insufficient = false;                  ///< input fails the scenario's tail policy
    std::vector<ObservableRecord> records;      ///< oracle records at the requested times
    std::optional<double> max_delta;            ///< vs the previous cutoff, over all fields and times
};

struct ConvergenceTable {
    std::vector<double> times;
    std::vector<ConvergenceStep> steps;
    double tolerance = 1e-8;
    bool converged = false;   ///< final delta below tolerance and largest cutoff sufficient
};

namespace detail {

inline std::vector<std::optional<double>> record_fields(const ObservableRecord& r) {
    return {r.na_mean, r.na_var, r.nb_mean, r.nb_var, r.q_a, r.q_b, r.s1a, r.s2a, r.s1b, r.s2b, r.ntotal};
}

inline double max_record_delta(const std::vector<ObservableRecord>& x, const std::vector<ObservableRecord>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto fx = record_fields(x[i]);
        const auto fy = record_fields(y[i]);
        for (std::size_t f = 0; f < fx.size(); ++f) {
            if (fx[f].has_value() != fy[f].has_value()) return std::numeric_limits<double>::infinity();
            if (fx[f]) worst = std::max(worst, std::abs(*fx[f] - *fy[f]));
        }
    }
    return worst;
}

}  // namespace detail

inline ConvergenceTable convergence_sweep(const ScenarioConfig& cfg, const std::vector<double>& times,
                                          const std::vector<int>& n_max_list, double tolerance = 1e-8) {
    if (n_max_list.empty()) throw std::invalid_argument("convergence_sweep: empty cutoff list");
    for (std::size_t i = 1; i < n_max_list.size(); ++i)
        if (n_max_list[i] <= n_max_list[i - 1]) throw std::invalid_argument("convergence_sweep: cutoffs must increase");

    // every cutoff is evaluated; the tail policy only decides the verdict
    TailPolicy permissive;
    permissive.tail_threshold = std::numeric_limits<double>::infinity();
    permissive.deficit_threshold = std::numeric_limits<double>::infinity();

    ConvergenceTable table;
    table.times = times;
    table.tolerance = tolerance;
    for (int n : n_max_list) {
        ScenarioConfig c = cfg;
        c.truncation = Truncation(n);
        c.tail_policy = permissive;
        ConvergenceStep step;
        step.n_max = n;
        const ModeVector in = input_state(c);
        step.tail_mass = in.tail_mass();
        try {
            (void)squeezed_coherent_state(cfg.input, c.truncation, cfg.tail_policy);
        } catch (const TruncationError&) {
            step.insufficient = true;
        }
        step.records = run_oracle(c, times).records;
        if (!table.steps.empty()) step.max_delta = detail::max_record_delta(table.steps.back().records, step.records);
        table.steps.push_back(std::move(step));
    }
    const auto& last = table.steps.back();
    const bool final_delta_ok = table.steps.size() == 1 ? false : (*last.max_delta < tolerance);
    table.converged = final_delta_ok && !last.insufficient;
    return table;
}

}  // namespace becsq
