#pragma once

// Truncated Fock-space representation of one and two bosonic modes.
//
// Single-mode vectors hold amplitudes for |0>..|n_max>. Two-mode vectors use
// the index convention (n_b, n_a) with n_a fastest-varying, i.e.
// index = n_b * (n_max + 1) + n_a.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace becsq {

using cplx = std::complex<double>;

class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double tail_mass)
        : std::runtime_error(what), tail_mass_(tail_mass) {}
    double tail_mass() const noexcept { return tail_mass_; }

private:
    double tail_mass_;
};

class Truncation {
public:
    explicit Truncation(int n_max) : n_max_(n_max) {
        if (n_max < 1) throw std::invalid_argument("Truncation: n_max must be >= 1");
    }
    int n_max() const noexcept { return n_max_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }
    std::size_t two_mode_dim() const noexcept { return dim() * dim(); }

    friend bool operator==(const Truncation&, const Truncation&) = default;

private:
    int n_max_;
};

/// Thresholds used to accept a constructed state as adequately truncated.
struct TailPolicy {
    double tail_threshold = 1e-10;     ///< max probability in the top 10% of indices
    double deficit_threshold = 1e-8;   ///< max norm lost when projecting a squeezed state
};

/// Squeezed-coherent input S(xi) D(m)|0>, xi fixed by (r, phi).
struct SqueezedInput {
    double r = 0.0;
    double phi = 0.0;
    cplx m{0.0, 0.0};

    void validate() const {
        if (!(r >= 0.0)) throw std::invalid_argument("SqueezedInput: r must be >= 0");
    }
};

enum class Mode { a, b };

inline double squared_norm(std::span<const cplx> v) {
    return std::accumulate(v.begin(), v.end(), 0.0,
                           [](double acc, const cplx& z) { return acc + std::norm(z); });
}

/// Probability mass in the top 10% (at least one) of the indices.
inline double tail_mass(std::span<const cplx> v) {
    const std::size_t n = v.size();
    const std::size_t count = std::max<std::size_t>(1, (n + 9) / 10);
    return squared_norm(v.subspan(n - count));
}

struct ModeVector {
    std::vector<cplx> amplitudes;
    Truncation truncation;

    double norm() const { return std::sqrt(squared_norm(amplitudes)); }
    double tail_mass() const { return becsq::tail_mass(amplitudes); }
};

struct TwoModeState {
    std::vector<cplx> amplitudes;
    Truncation truncation;

    std::size_t index(int n_b, int n_a) const {
        return static_cast<std::size_t>(n_b) * truncation.dim() + static_cast<std::size_t>(n_a);
    }
    cplx at(int n_b, int n_a) const { return amplitudes[index(n_b, n_a)]; }
    double norm() const { return std::sqrt(squared_norm(amplitudes)); }
};

/// <c>, <c^2>, <c^dag c>, <(c^dag c)^2> for one mode.
struct MomentSet {
    cplx mean_amp{0.0, 0.0};
    cplx sq_amp{0.0, 0.0};
    double number_mean = 0.0;
    double number_sq = 0.0;

    double number_variance() const { return number_sq - number_mean * number_mean; }
};

/// Normal-ordered moments <(c^dag)^p c^q> for p + q <= 4.
struct NormalMoments {
    static constexpr int kOrder = 4;
    std::array<std::array<cplx, kOrder + 1>, kOrder + 1> values{};

    cplx operator()(int p, int q) const {
        if (p < 0 || q < 0 || p + q > kOrder) throw std::out_of_range("NormalMoments: p + q > 4");
        return values[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
    }

    /// Number moments follow from (c^dag c)^2 = c^dag^2 c^2 + c^dag c.
    MomentSet moments() const {
        MomentSet out;
        out.mean_amp = (*this)(0, 1);
        out.sq_amp = (*this)(0, 2);
        out.number_mean = (*this)(1, 1).real();
        out.number_sq = (*this)(2, 2).real() + out.number_mean;
        return out;
    }
};

/// Annihilation matrix: a|n> = sqrt(n)|n-1>.
inline Eigen::MatrixXcd ladder_matrix(const Truncation& trunc) {
    const auto d = static_cast<Eigen::Index>(trunc.dim());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

namespace detail {

// Unnormalized coherent amplitudes m^n / sqrt(n!) by the running ratio.
inline std::vector<cplx> coherent_amplitudes(cplx m, std::size_t dim) {
    std::vector<cplx> amps(dim);
    amps[0] = 1.0;
    for (std::size_t n = 1; n < dim; ++n) amps[n] = amps[n - 1] * m / std::sqrt(static_cast<double>(n));
    return amps;
}

inline void normalize(std::vector<cplx>& v) {
    const double s = std::sqrt(squared_norm(v));
    for (auto& z : v) z /= s;
}

inline void check_tail(const ModeVector& v, const TailPolicy& policy, const char* who) {
    const double tail = v.tail_mass();
    if (tail > policy.tail_threshold) {
        throw TruncationError(std::string(who) + ": truncation insufficient at n_max=" +
                                  std::to_string(v.truncation.n_max()) +
                                  " (tail mass " + std::to_string(tail) + ")",
                              tail);
    }
}

}  // namespace detail

inline ModeVector coherent_state(cplx m, const Truncation& trunc, const TailPolicy& policy = {}) {
    ModeVector v{detail::coherent_amplitudes(m, trunc.dim()), trunc};
    detail::normalize(v.amplitudes);
    detail::check_tail(v, policy, "coherent_state");
    return v;
}

/// S(xi) D(m)|0> with S(xi) = exp[xi (a^dag)^2 - xi^* a^2], xi = (r/2) e^{-2i phi}.
///
/// The generator is exponentiated at working cutoff 2*n_max and the result
/// projected back to n_max and renormalized. With this convention
/// S^dag a S = a cosh r + a^dag e^{-2i phi} sinh r, so the squeezed vacuum has
/// <N> = sinh^2 r and <a^2> = e^{-2i phi} sinh r cosh r.
inline ModeVector squeezed_coherent_state(const SqueezedInput& input, const Truncation& trunc,
                                          const TailPolicy& policy = {}) {
    input.validate();
    if (input.r == 0.0) return coherent_state(input.m, trunc, policy);

    const Truncation work(2 * trunc.n_max());
    const auto wd = static_cast<Eigen::Index>(work.dim());

    Eigen::VectorXcd psi(wd);
    {
        auto amps = detail::coherent_amplitudes(input.m, work.dim());
        detail::normalize(amps);
        for (Eigen::Index i = 0; i < wd; ++i) psi(i) = amps[static_cast<std::size_t>(i)];
    }

    const cplx xi = 0.5 * input.r * std::polar(1.0, -2.0 * input.phi);
    const Eigen::MatrixXcd a = ladder_matrix(work);
    const Eigen::MatrixXcd a2 = a * a;
    const Eigen::MatrixXcd gen = xi * a2.adjoint() - std::conj(xi) * a2;

    // gen is anti-Hermitian: exp(gen) = V exp(-i w) V^dag with i*gen = V w V^dag.
    const Eigen::MatrixXcd herm = cplx(0.0, 1.0) * gen;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (herm + herm.adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("squeezed_coherent_state: eigensolver failed");
    const Eigen::VectorXcd phases =
        es.eigenvalues().unaryExpr([](double w) { return std::polar(1.0, -w); });
    const Eigen::VectorXcd out = es.eigenvectors() * phases.cwiseProduct(es.eigenvectors().adjoint() * psi);

    ModeVector v{std::vector<cplx>(trunc.dim()), trunc};
    for (std::size_t n = 0; n < trunc.dim(); ++n) v.amplitudes[n] = out(static_cast<Eigen::Index>(n));

    const double deficit = 1.0 - squared_norm(v.amplitudes);
    if (deficit > policy.deficit_threshold) {
        throw TruncationError("squeezed_coherent_state: projection norm deficit " +
                                  std::to_string(deficit) + " at n_max=" +
                                  std::to_string(trunc.n_max()),
                              deficit);
    }
    detail::normalize(v.amplitudes);
    detail::check_tail(v, policy, "squeezed_coherent_state");
    return v;
}

inline TwoModeState tensor_product(const ModeVector& b_state, const ModeVector& a_state) {
    if (!(b_state.truncation == a_state.truncation))
        throw std::invalid_argument("tensor_product: truncation mismatch");
    const std::size_t d = a_state.truncation.dim();
    TwoModeState s{std::vector<cplx>(d * d), a_state.truncation};
    for (std::size_t nb = 0; nb < d; ++nb)
        for (std::size_t na = 0; na < d; ++na) s.amplitudes[nb * d + na] = b_state.amplitudes[nb] * a_state.amplitudes[na];
    return s;
}

inline ModeVector vacuum(const Truncation& trunc) {
    ModeVector v{std::vector<cplx>(trunc.dim()), trunc};
    v.amplitudes[0] = 1.0;
    return v;
}

namespace detail {

// c|psi> for the chosen mode of a two-mode state (same basis, top level dropped).
inline std::vector<cplx> lower(std::span<const cplx> psi, std::size_t d, Mode mode) {
    std::vector<cplx> out(psi.size());
    for (std::size_t nb = 0; nb < d; ++nb) {
        for (std::size_t na = 0; na < d; ++na) {
            const cplx z = psi[nb * d + na];
            if (mode == Mode::a) {
                if (na > 0) out[nb * d + na - 1] = std::sqrt(static_cast<double>(na)) * z;
            } else {
                if (nb > 0) out[(nb - 1) * d + na] = std::sqrt(static_cast<double>(nb)) * z;
            }
        }
    }
    return out;
}

inline cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

}  // namespace detail

/// <(c^dag)^p c^q> = <c^p psi | c^q psi> for all p + q <= 4.
inline NormalMoments extract_normal_moments(const TwoModeState& state, Mode mode) {
    const std::size_t d = state.truncation.dim();
    std::array<std::vector<cplx>, NormalMoments::kOrder + 1> lowered;
    lowered[0] = state.amplitudes;
    for (int k = 1; k <= NormalMoments::kOrder; ++k)
        lowered[static_cast<std::size_t>(k)] = detail::lower(lowered[static_cast<std::size_t>(k - 1)], d, mode);

    NormalMoments nm;
    for (int p = 0; p <= NormalMoments::kOrder; ++p)
        for (int q = 0; p + q <= NormalMoments::kOrder; ++q)
            nm.values[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
                detail::inner(lowered[static_cast<std::size_t>(p)], lowered[static_cast<std::size_t>(q)]);
    return nm;
}

inline NormalMoments extract_normal_moments(const ModeVector& v) {
    return extract_normal_moments(tensor_product(vacuum(v.truncation), v), Mode::a);
}

inline MomentSet extract_moments(const TwoModeState& state, Mode mode) {
    const std::size_t d = state.truncation.dim();
    MomentSet ms;
    for (std::size_t nb = 0; nb < d; ++nb) {
        for (std::size_t na = 0; na < d; ++na) {
            const double p = std::norm(state.amplitudes[nb * d + na]);
            const double n = static_cast<double>(mode == Mode::a ? na : nb);
            ms.number_mean += n * p;
            ms.number_sq += n * n * p;
        }
    }
    const auto c1 = detail::lower(state.amplitudes, d, mode);
    const auto c2 = detail::lower(c1, d, mode);
    ms.mean_amp = detail::inner(state.amplitudes, c1);
    ms.sq_amp = detail::inner(state.amplitudes, c2);
    return ms;
}

inline MomentSet extract_moments(const ModeVector& v) {
    return extract_moments(tensor_product(vacuum(v.truncation), v), Mode::a);
}

/// Starting cutoff for a squeezed-coherent input: ceil(4 (|m| e^r + e^r)^2 + 20).
inline int heuristic_n_max(const SqueezedInput& input) {
    const double er = std::exp(input.r);
    const double occ = std::abs(input.m) * er + er;
    return static_cast<int>(std::ceil(4.0 * occ * occ + 20.0));
}

}  // namespace becsq
