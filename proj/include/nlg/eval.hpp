#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlg/game.hpp"
#include "nlg/rounding.hpp"

namespace nlg {

/// Outcome statistics of a strategy on a game.
struct EvalReport {
    double win_prob = 0.0;
    std::vector<Eigen::MatrixXd> joint;  // [s*t_size + t], k x k outcome table
    Eigen::MatrixXd alice_marginals;     // s_size x k
    Eigen::MatrixXd bob_marginals;       // t_size x k

    const Eigen::MatrixXd& joint_at(int s, int t, int t_size) const {
        return joint[static_cast<std::size_t>(s) * t_size + t];
    }
};

/// Probability of outcomes (a,b) on questions (s,t) under the maximally
/// entangled state: Re Tr(P_a^s Q_b^t)/d. Bob's stored operator enters
/// untransposed because the state transposes it back.
inline double outcome_prob(const QuantumStrategy& qs, int s, int t, int a, int b) {
    const auto& p = qs.alice[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    const auto& q = qs.bob[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)];
    const std::complex<double> tr = (p.transpose().cwiseProduct(q)).sum();
    if (std::abs(tr.imag()) > 1e-10 * std::max(1.0, std::abs(tr.real())))
        throw std::runtime_error("outcome_prob: trace has a non-negligible imaginary part");
    return tr.real() / double(qs.d);
}

inline EvalReport evaluate(const Game& g, const QuantumStrategy& qs) {
    if (static_cast<int>(qs.alice.size()) != g.s_size ||
        static_cast<int>(qs.bob.size()) != g.t_size || qs.k != g.k)
        throw std::invalid_argument("evaluate: strategy shape does not match the game");

    EvalReport rep;
    rep.joint.reserve(static_cast<std::size_t>(g.s_size) * g.t_size);
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t) {
            Eigen::MatrixXd table(g.k, g.k);
            for (int a = 0; a < g.k; ++a)
                for (int b = 0; b < g.k; ++b) {
                    const double prob = outcome_prob(qs, s, t, a, b);
                    table(a, b) = prob;
                    rep.win_prob += g.pi(s, t) * g.v_at(s, t, a, b) * prob;
                }
            rep.joint.push_back(table);
        }

    // Marginals come from the operators directly; Tr(P_a^s)/d is what every
    // column/row sum of the joint tables equals under a complete partner POVM.
    rep.alice_marginals.resize(g.s_size, g.k);
    for (int s = 0; s < g.s_size; ++s)
        for (int a = 0; a < g.k; ++a)
            rep.alice_marginals(s, a) =
                qs.alice[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].trace().real() /
                double(qs.d);
    rep.bob_marginals.resize(g.t_size, g.k);
    for (int t = 0; t < g.t_size; ++t)
        for (int b = 0; b < g.k; ++b)
            rep.bob_marginals(t, b) =
                qs.bob[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)].trace().real() /
                double(qs.d);
    return rep;
}

/// Same probability through the explicit d^2-dimensional state
/// |psi> = d^{-1/2} sum_i |i>|i>, applying P (x) Q^T to it amplitude by
/// amplitude. Independent code path from the trace formula; capped at d <= 64.
inline double cross_check_state(const QuantumStrategy& qs, int s, int t, int a, int b) {
    const int d = qs.d;
    if (d > 64) throw std::invalid_argument("cross_check_state: d must be <= 64");
    const auto& p = qs.alice[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    const Eigen::MatrixXcd qt =
        qs.bob[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)].transpose();

    const double amp = 1.0 / std::sqrt(double(d));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
    for (int i = 0; i < d; ++i) psi(i * d + i) = amp;

    // w = (P (x) Q^T) psi; the nonzero amplitudes of psi sit on |kk>
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            std::complex<double> acc(0.0, 0.0);
            for (int kk = 0; kk < d; ++kk) acc += p(i, kk) * qt(j, kk) * psi(kk * d + kk);
            w(i * d + j) = acc;
        }
    const std::complex<double> val = psi.dot(w);
    return val.real();
}

}  // namespace nlg
