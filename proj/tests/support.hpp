#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library code paths they are used to check: eigen
// decompositions go through Eigen's SelfAdjointEigenSolver, winning
// probabilities through raw trace loops, classical values through full
// strategy-pair enumeration.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "nlg/eval.hpp"
#include "nlg/game.hpp"
#include "nlg/recovery.hpp"
#include "nlg/rounding.hpp"
#include "nlg/sdp.hpp"

namespace support {

inline nlg::Game make_chsh() {
    nlg::Game g;
    g.name = "chsh";
    g.s_size = 2;
    g.t_size = 2;
    g.k = 2;
    g.pi = Eigen::MatrixXd::Constant(2, 2, 0.25);
    g.v.assign(16, 0);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    g.v[g.v_index(s, t, a, b)] = ((a ^ b) == (s & t)) ? 1 : 0;
    return g;
}

inline nlg::Game make_constant_game(int s_size, int t_size, int k, int value) {
    nlg::Game g;
    g.name = value ? "ones" : "zeros";
    g.s_size = s_size;
    g.t_size = t_size;
    g.k = k;
    g.pi = Eigen::MatrixXd::Constant(s_size, t_size, 1.0 / (double(s_size) * t_size));
    g.v.assign(static_cast<std::size_t>(s_size) * t_size * k * k, value);
    return g;
}

// Optimal CHSH qubit strategy: Alice measures sigma_z / sigma_x, Bob's stored
// observables are the diagonal rotations (sigma_z +- sigma_x)/sqrt(2). Under
// the Tr(PQ)/d convention this wins with probability (2+sqrt(2))/4.
inline nlg::QuantumStrategy chsh_textbook_strategy() {
    using Eigen::MatrixXcd;
    const MatrixXcd id = MatrixXcd::Identity(2, 2);
    MatrixXcd sz(2, 2), sx(2, 2);
    sz << 1, 0, 0, -1;
    sx << 0, 1, 1, 0;
    const double r = 1.0 / std::sqrt(2.0);

    nlg::QuantumStrategy qs;
    qs.d = 2;
    qs.k = 2;
    qs.projective = true;
    auto meas = [&](const MatrixXcd& obs) {
        return std::vector<MatrixXcd>{0.5 * (id + obs), 0.5 * (id - obs)};
    };
    qs.alice = {meas(sz), meas(sx)};
    qs.bob = {meas(r * (sz + sx)), meas(r * (sz - sx))};
    return qs;
}

inline double chsh_value() { return (2.0 + std::sqrt(2.0)) / 4.0; }

// Full enumeration over every (alice, bob) answer-function pair.
inline double classical_bruteforce(const nlg::Game& g) {
    std::vector<int> alice(static_cast<std::size_t>(g.s_size), 0);
    double best = 0.0;
    while (true) {
        std::vector<int> bob(static_cast<std::size_t>(g.t_size), 0);
        while (true) {
            best = std::max(best, nlg::winning_probability(g, alice, bob));
            int pos = 0;
            while (pos < g.t_size && ++bob[static_cast<std::size_t>(pos)] == g.k)
                bob[static_cast<std::size_t>(pos)++] = 0;
            if (pos == g.t_size) break;
        }
        int pos = 0;
        while (pos < g.s_size && ++alice[static_cast<std::size_t>(pos)] == g.k)
            alice[static_cast<std::size_t>(pos)++] = 0;
        if (pos == g.s_size) break;
    }
    return best;
}

inline Eigen::MatrixXcd random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
}

inline Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

// Projective measurements from a Haar-ish unitary, one column group per answer.
inline std::vector<Eigen::MatrixXcd> random_projective_measurement(int d, int k,
                                                                   std::mt19937_64& rng) {
    const Eigen::MatrixXcd u = random_unitary(d, rng);
    std::vector<Eigen::MatrixXcd> meas;
    for (int a = 0; a < k; ++a) {
        const int lo = a * d / k, hi = (a + 1) * d / k;
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
        for (int c = lo; c < hi; ++c) p += u.col(c) * u.col(c).adjoint();
        meas.push_back(p);
    }
    return meas;
}

inline nlg::QuantumStrategy random_projective_strategy(int d, int k, int s_size, int t_size,
                                                       std::mt19937_64& rng) {
    nlg::QuantumStrategy qs;
    qs.d = d;
    qs.k = k;
    qs.projective = true;
    for (int s = 0; s < s_size; ++s) qs.alice.push_back(random_projective_measurement(d, k, rng));
    for (int t = 0; t < t_size; ++t) qs.bob.push_back(random_projective_measurement(d, k, rng));
    return qs;
}

// Random POVM: random PSD pieces whitened by the inverse square root of their
// sum (Eigen eigensolver, not the in-repo one).
inline std::vector<Eigen::MatrixXcd> random_povm_measurement(int d, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> raw;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < k; ++a) {
        Eigen::MatrixXcd b(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) b(i, j) = std::complex<double>(gauss(rng), gauss(rng));
        Eigen::MatrixXcd e = b * b.adjoint();
        raw.push_back(e);
        sum += e;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum);
    const Eigen::MatrixXcd inv_sqrt =
        es.eigenvectors() *
        es.eigenvalues().cwiseMax(1e-14).cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().adjoint();
    for (auto& e : raw) e = inv_sqrt * e * inv_sqrt;
    return raw;
}

inline nlg::QuantumStrategy random_povm_strategy(int d, int k, int s_size, int t_size,
                                                 std::mt19937_64& rng) {
    nlg::QuantumStrategy qs;
    qs.d = d;
    qs.k = k;
    qs.projective = false;
    for (int s = 0; s < s_size; ++s) qs.alice.push_back(random_povm_measurement(d, k, rng));
    for (int t = 0; t < t_size; ++t) qs.bob.push_back(random_povm_measurement(d, k, rng));
    return qs;
}

// Winning probability straight from the trace formula, raw loops only.
inline double win_prob_direct(const nlg::Game& g, const nlg::QuantumStrategy& qs) {
    double p = 0.0;
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t)
            for (int a = 0; a < g.k; ++a)
                for (int b = 0; b < g.k; ++b) {
                    if (!g.wins(s, t, a, b)) continue;
                    std::complex<double> tr(0.0, 0.0);
                    const auto& pm = qs.alice[(std::size_t)s][(std::size_t)a];
                    const auto& qm = qs.bob[(std::size_t)t][(std::size_t)b];
                    for (int i = 0; i < qs.d; ++i)
                        for (int j = 0; j < qs.d; ++j) tr += pm(i, j) * qm(j, i);
                    p += g.pi(s, t) * tr.real() / qs.d;
                }
    return p;
}

// Gram matrix of the vectors behind a strategy played on the maximally
// entangled state: z = I/sqrt(d), v = P/sqrt(d), w = Q/sqrt(d), with the
// real Hilbert-Schmidt inner product. Feasible for the relaxation whenever
// the strategy is a valid POVM pair.
inline Eigen::MatrixXd gram_from_strategy(const nlg::Game& g, const nlg::QuantumStrategy& qs) {
    const nlg::GramIndex idx(g);
    const int n = idx.size();
    const double d = qs.d;
    std::vector<Eigen::MatrixXcd> ops(static_cast<std::size_t>(n));
    ops[0] = Eigen::MatrixXcd::Identity(qs.d, qs.d);
    for (int s = 0; s < g.s_size; ++s)
        for (int a = 0; a < g.k; ++a)
            ops[(std::size_t)idx.v(s, a)] = qs.alice[(std::size_t)s][(std::size_t)a];
    for (int t = 0; t < g.t_size; ++t)
        for (int b = 0; b < g.k; ++b)
            ops[(std::size_t)idx.w(t, b)] = qs.bob[(std::size_t)t][(std::size_t)b];
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (ops[(std::size_t)i].adjoint() * ops[(std::size_t)j]).trace().real() / d;
    return 0.5 * (m + m.transpose());
}

// Valid vector tuples without a solver run: per question, project a shared
// unit vector onto the blocks of a random orthonormal basis. The blocks are
// orthogonal, sum to the shared vector, and have nonnegative first
// coordinates once everything is rotated so the shared vector is e_0.
inline nlg::VectorStrategy random_vector_strategy(int s_size, int t_size, int k, int dim,
                                                  std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd phi(dim);
    for (int i = 0; i < dim; ++i) phi(i) = gauss(rng);
    phi.normalize();

    auto split = [&](std::vector<Eigen::VectorXd>& sink) {
        const Eigen::MatrixXd basis = random_orthogonal(dim, rng);
        std::vector<int> owner(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c)
            owner[(std::size_t)c] = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
        owner[0] = 0;  // every question keeps at least one nonempty answer
        for (int a = 0; a < k; ++a) {
            Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
            for (int c = 0; c < dim; ++c)
                if (owner[(std::size_t)c] == a) u += basis.col(c).dot(phi) * basis.col(c);
            sink.push_back(u);
        }
    };

    std::vector<Eigen::VectorXd> all;
    all.push_back(phi);
    std::vector<Eigen::VectorXd> v, w;
    for (int s = 0; s < s_size; ++s) split(v);
    for (int t = 0; t < t_size; ++t) split(w);
    for (const auto& x : v) all.push_back(x);
    for (const auto& x : w) all.push_back(x);

    const std::vector<Eigen::VectorXd> rotated = nlg::rotate_to_e0(all, 0);

    nlg::VectorStrategy vs;
    vs.index = nlg::GramIndex(s_size, t_size, k);
    vs.m_dim = dim - 1;
    vs.rank_tol = 0.0;
    vs.z = Eigen::VectorXd::Zero(dim);
    vs.z(0) = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) vs.v.push_back(rotated[1 + i]);
    for (std::size_t i = 0; i < w.size(); ++i) vs.w.push_back(rotated[1 + v.size() + i]);
    return vs;
}

inline double min_eig_oracle(const Eigen::MatrixXcd& h) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().minCoeff();
}

inline double min_eig_oracle(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace support
