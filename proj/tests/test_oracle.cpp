#include "becsq/oracle.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace becsq {
namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXcd dense(const HamiltonianMatrix& h) { return Eigen::MatrixXcd(h.entries); }

TEST(Hamiltonian, SingleExcitationBlock) {
    const auto h = dense(build_hamiltonian({0.0, 0.0, 1.0, 0.0}, Truncation(1)));
    const TwoModeState s{std::vector<cplx>(4), Truncation(1)};
    const auto i01 = static_cast<Eigen::Index>(s.index(0, 1));
    const auto i10 = static_cast<Eigen::Index>(s.index(1, 0));
    EXPECT_EQ(h(i01, i01), cplx(0.0));
    EXPECT_EQ(h(i10, i10), cplx(0.0));
    EXPECT_EQ(h(i01, i10), cplx(1.0));
    EXPECT_EQ(h(i10, i01), cplx(1.0));
}

TEST(Hamiltonian, DiagonalAndHopping) {
    const ModelParams p{1.3, 0.7, 2.0, 0.0};
    const Truncation tr(4);
    const auto h = dense(build_hamiltonian(p, tr));
    const TwoModeState s{std::vector<cplx>(tr.two_mode_dim()), tr};
    const auto at = [&](int nb, int na) { return static_cast<Eigen::Index>(s.index(nb, na)); };
    EXPECT_NEAR(h(at(2, 3), at(2, 3)).real(), 2 * 1.3 + 3 * 0.7, 1e-15);
    EXPECT_NEAR(std::abs(h(at(1, 1), at(0, 2))), 2.0 * std::sqrt(2.0), 1e-15);
}

TEST(Hamiltonian, HermitianSparseNumberConserving) {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> w(0.0, 5.0), th(0.0, 2 * pi);
    for (int i = 0; i < 5; ++i) {
        const ModelParams p{w(rng), w(rng), 0.1 + w(rng), th(rng)};
        const Truncation tr(6);
        const auto hm = build_hamiltonian(p, tr);
        const auto h = dense(hm);
        EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
            int nnz = 0;
            for (Eigen::Index c = 0; c < h.cols(); ++c) nnz += h(r, c) != cplx(0.0) ? 1 : 0;
            EXPECT_LE(nnz, 3);
        }
        Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
        const TwoModeState s{std::vector<cplx>(tr.two_mode_dim()), tr};
        for (int nb = 0; nb <= 6; ++nb)
            for (int na = 0; na <= 6; ++na) {
                const auto k = static_cast<Eigen::Index>(s.index(nb, na));
                n(k, k) = nb + na;
            }
        EXPECT_LT((h * n - n * h).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Evolve, TimeZeroReturnsInput) {
    const Truncation tr(40);
    const auto psi0 = tensor_product(vacuum(tr), squeezed_coherent_state({0.5, 0.2, 0.3}, tr));
    const auto res = evolve(psi0, build_hamiltonian({4, 4, 1, 0.7}, tr), {0.0});
    double worst = 0.0;
    for (std::size_t i = 0; i < psi0.amplitudes.size(); ++i)
        worst = std::max(worst, std::abs(res.states[0].amplitudes[i] - psi0.amplitudes[i]));
    EXPECT_LT(worst, 1e-13);
}

TEST(Evolve, MatchesDenseExponential) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> w(0.0, 6.0), th(0.0, 2 * pi), tt(0.0, 5.0);
    const Truncation tr(6);
    for (int trial = 0; trial < 5; ++trial) {
        const ModelParams p{w(rng), w(rng), 0.2 + w(rng), th(rng)};
        // an arbitrary normalized state supported on complete blocks
        std::normal_distribution<double> g;
        TwoModeState psi{std::vector<cplx>(tr.two_mode_dim()), tr};
        for (int nb = 0; nb <= 6; ++nb)
            for (int na = 0; na + nb <= 6; ++na) psi.amplitudes[psi.index(nb, na)] = cplx(g(rng), g(rng));
        const double n = psi.norm();
        for (auto& z : psi.amplitudes) z /= n;

        const auto hm = build_hamiltonian(p, tr);
        const double t = tt(rng);
        const auto res = evolve(psi, hm, {t});
        const Eigen::VectorXcd v0 = Eigen::Map<const Eigen::VectorXcd>(psi.amplitudes.data(), psi.amplitudes.size());
        const Eigen::VectorXcd ref = reference::dense_evolve(dense(hm), v0, t);
        const Eigen::VectorXcd got =
            Eigen::Map<const Eigen::VectorXcd>(res.states[0].amplitudes.data(), res.states[0].amplitudes.size());
        EXPECT_LT((ref - got).cwiseAbs().maxCoeff(), 1e-11);
    }
}

TEST(Evolve, SinglePhotonSwap) {
    const Truncation tr(2);
    TwoModeState psi{std::vector<cplx>(tr.two_mode_dim()), tr};
    psi.amplitudes[psi.index(0, 1)] = 1.0;
    const auto res = evolve(psi, build_hamiltonian({4, 4, 1, 0.4}, tr), {pi / 2});
    EXPECT_NEAR(std::abs(res.states[0].at(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(*res.records[0].nb_mean, 1.0, 1e-14);
    EXPECT_NEAR(*res.records[0].na_mean, 0.0, 1e-14);
}

TEST(Evolve, RejectsBadInputs) {
    const Truncation tr(10);
    const auto psi = tensor_product(vacuum(tr), coherent_state(0.5, tr));
    const auto h = build_hamiltonian({}, tr);
    EXPECT_THROW(evolve(psi, h, {1.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(evolve(psi, h, {-1.0}), std::invalid_argument);
    EXPECT_THROW(evolve(psi, build_hamiltonian({}, Truncation(5)), {0.0}), std::invalid_argument);
    TwoModeState bad = psi;
    bad.amplitudes[0] *= 2.0;
    EXPECT_THROW(evolve(bad, h, {0.0}), std::invalid_argument);
}

TEST(Evolve, IncompleteBlocksReported) {
    const Truncation tr(4);
    TwoModeState psi{std::vector<cplx>(tr.two_mode_dim()), tr};
    psi.amplitudes[psi.index(3, 3)] = 1.0;
    EXPECT_THROW(evolve(psi, build_hamiltonian({}, tr), {1.0}), TruncationError);
}

TEST(Evolve, SqueezedVacuumConversion) {
    ScenarioConfig c;
    c.input = {1.0, 0.0, 0.0};
    c.truncation = Truncation(64);
    c.tail_policy.tail_threshold = 1e-7;
    const auto res = run_oracle(c, {pi / 2});
    EXPECT_NEAR(*res.records[0].nb_mean, reference::sinh2(1.0), 1e-6);
    EXPECT_NEAR(*res.records[0].nb_mean, 1.38109, 1e-5);
}

TEST(Evolve, ConservationAndBlockStructure) {
    ScenarioConfig c;
    c.params = {5.0, 3.5, 0.8, 1.1};
    c.input = {0.6, 0.4, cplx(0.9, 0.3)};
    c.truncation = Truncation(72);
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back(0.25 * i);
    const auto res = run_oracle(c, times);
    EXPECT_LT(res.norm_drift, 1e-12);
    EXPECT_LT(res.ntotal_drift, 1e-9);
    EXPECT_LT(res.block_drift, 1e-12);
}

TEST(Evolve, FirstMomentsFollowPropagator) {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> w(0.0, 8.0), th(0.0, 2 * pi), tt(0.0, 10.0);
    for (int trial = 0; trial < 4; ++trial) {
        ScenarioConfig c;
        c.params = {w(rng), w(rng), 0.3 + w(rng) / 2, th(rng)};
        c.input = {0.3, 0.5, cplx(1.0, -0.6)};
        c.truncation = Truncation(48);
        std::vector<double> times{tt(rng), tt(rng), tt(rng)};
        std::sort(times.begin(), times.end());
        const auto res = run_oracle(c, times);
        const auto a0 = extract_moments(input_state(c)).mean_amp;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Eigen::Matrix2cd u = propagator_at(c.params, times[k]).full();
            const auto& s = res.states[k];
            EXPECT_NEAR(std::abs(extract_moments(s, Mode::b).mean_amp - u(0, 1) * a0), 0.0, 1e-10);
            EXPECT_NEAR(std::abs(extract_moments(s, Mode::a).mean_amp - u(1, 1) * a0), 0.0, 1e-10);
        }
    }
}

TEST(Evolve, AgreesWithMomentMap) {
    ScenarioConfig c;
    c.params = {4.0, 4.0, 1.0, 0.6};
    c.input = {0.8, 0.25, cplx(0.5, 0.2)};
    c.truncation = Truncation(96);
    std::vector<double> times;
    for (int i = 0; i < 25; ++i) times.push_back(0.13 * i);
    const auto oracle = run_oracle(c, times).records;
    const auto mm = moment_map_records(c, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_NEAR(*oracle[i].na_mean, *mm[i].na_mean, 1e-10);
        EXPECT_NEAR(*oracle[i].nb_var, *mm[i].nb_var, 1e-9);
        EXPECT_NEAR(*oracle[i].s1b, *mm[i].s1b, 1e-10);
        EXPECT_NEAR(*oracle[i].s2a, *mm[i].s2a, 1e-10);
    }
}

TEST(Convergence, CoherentConvergesQuickly) {
    ScenarioConfig c;
    c.input = {0.0, 0.0, 1.0};
    const auto table = convergence_sweep(c, {0.0, 0.7, 1.6}, {16, 24});
    EXPECT_TRUE(table.converged);
    EXPECT_FALSE(table.steps[0].max_delta.has_value());
    EXPECT_LT(*table.steps[1].max_delta, 1e-8);
}

TEST(Convergence, SqueezedVacuumDeltasShrink) {
    ScenarioConfig c;
    c.input = {1.0, 0.0, 0.0};
    const auto table = convergence_sweep(c, {0.5, pi / 2, 2.0}, {40, 48, 56, 64, 72});
    for (std::size_t i = 2; i < table.steps.size(); ++i)
        EXPECT_LT(*table.steps[i].max_delta, *table.steps[i - 1].max_delta) << table.steps[i].n_max;
    EXPECT_TRUE(table.steps.back().insufficient);
    EXPECT_FALSE(table.converged);
}

TEST(Convergence, InsufficientCutoffFlagged) {
    ScenarioConfig c;
    c.input = {2.0, 0.0, 0.0};
    const auto table = convergence_sweep(c, {0.5}, {16, 24});
    EXPECT_TRUE(table.steps[0].insufficient);
    EXPECT_TRUE(table.steps[1].insufficient);
    EXPECT_FALSE(table.converged);
}

TEST(Convergence, RejectsUnorderedList) {
    ScenarioConfig c;
    EXPECT_THROW(convergence_sweep(c, {0.0}, {32, 16}), std::invalid_argument);
    EXPECT_THROW(convergence_sweep(c, {0.0}, {}), std::invalid_argument);
}

}  // namespace
}  // namespace becsq
