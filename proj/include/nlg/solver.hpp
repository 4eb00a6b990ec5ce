#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>

#include "nlg/eig.hpp"
#include "nlg/sdp.hpp"

namespace nlg {

/// Raised when an iterate goes non-finite. The CLI maps it to exit code 3.
struct SolverDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    int max_iters = 50000;
    double tol_primal = 1e-8;
    double tol_dual = 1e-8;
    double tol_psd = 1e-8;
    double rho = 1.0;             // ADMM penalty, adaptively rescaled
    double over_relaxation = 1.6; // in [1,2]
    std::uint64_t seed = 0;       // nonzero: random symmetric start
    int size_cap = 2000;
    std::ostream* iter_log = nullptr;  // CSV: iter,objective,primal_res,dual_res
};

struct SolveStatus {
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

struct SdpResiduals {
    double max_eq_violation = 0.0;
    double min_eigenvalue = 0.0;
    double max_neg_ineq = 0.0;  // violation magnitude, 0 when all entries nonnegative
};

struct SdpSolution {
    Eigen::MatrixXd m_matrix;
    double objective_value = 0.0;
    SdpResiduals residuals;
    int iterations = 0;
};

/// Frobenius-nearest PSD matrix: clip negative eigenvalues to zero.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("project_psd: matrix must be square");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::invalid_argument("project_psd: matrix is not symmetric");
    EigResult e = eig_symmetric(m);
    Eigen::VectorXd lam = e.values.cwiseMax(0.0);
    return e.vectors * lam.asDiagonal() * e.vectors.transpose();
}

namespace detail {

// Equality constraints as a dense operator on vectorized symmetric matrices.
// Row j is the symmetric coefficient matrix of constraint j, so the affine
// projection is Y - A^T (A A^T)^+ (A vec(Y) - b). The pseudoinverse solve
// keeps the projection exact when the constraint list carries redundancy.
struct AffineProjector {
    Eigen::MatrixXd a_op;  // m x n*n
    Eigen::VectorXd b;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> gram_cod;

    AffineProjector(const SdpProblem& p) {
        const int n = p.n;
        const int m = static_cast<int>(p.eq_constraints.size());
        a_op.setZero(m, n * n);
        b.resize(m);
        for (int j = 0; j < m; ++j) {
            const auto& eq = p.eq_constraints[static_cast<std::size_t>(j)];
            b(j) = eq.b;
            for (const auto& t : eq.terms) {
                if (t.i == t.j) {
                    a_op(j, t.i * n + t.i) += t.c;
                } else {
                    a_op(j, t.i * n + t.j) += 0.5 * t.c;
                    a_op(j, t.j * n + t.i) += 0.5 * t.c;
                }
            }
        }
        gram_cod.compute(a_op * a_op.transpose());
    }

    void project(Eigen::MatrixXd& y) const {
        Eigen::Map<Eigen::VectorXd> yv(y.data(), y.size());
        Eigen::VectorXd r = a_op * yv - b;
        yv -= a_op.transpose() * gram_cod.solve(r);
    }

    double max_violation(const Eigen::MatrixXd& y) const {
        Eigen::Map<const Eigen::VectorXd> yv(y.data(), y.size());
        if (b.size() == 0) return 0.0;
        return (a_op * yv - b).cwiseAbs().maxCoeff();
    }
};

inline double max_neg_designated(const Eigen::MatrixXd& m,
                                 const std::vector<std::pair<int, int>>& idx) {
    double worst = 0.0;
    for (const auto& [i, j] : idx) worst = std::max(worst, -m(i, j));
    return std::max(worst, 0.0);
}

}  // namespace detail

/// ADMM solve of a dense SDP with linear equalities and entrywise sign
/// constraints. Splitting: X carries the objective and the affine subspace;
/// one consensus copy is projected onto the PSD cone per iteration, a second
/// copy onto the nonnegative orthant restricted to the designated entries.
///
/// The returned matrix is the PSD-cone copy, so its minimum eigenvalue is
/// nonnegative up to eigensolver error and the stopping test measures the
/// equality and sign violations directly on it.
inline std::pair<SdpSolution, SolveStatus> solve_sdp(const SdpProblem& p,
                                                     const SolverConfig& cfg = {}) {
    const int n = p.n;
    if (n > cfg.size_cap)
        throw std::invalid_argument("solve_sdp: problem size " + std::to_string(n) +
                                    " exceeds cap " + std::to_string(cfg.size_cap));
    if (n <= 0) throw std::invalid_argument("solve_sdp: empty problem");
    if (cfg.max_iters < 1 || cfg.tol_primal <= 0 || cfg.tol_dual <= 0)
        throw std::invalid_argument("solve_sdp: bad config");

    const bool has_ineq = !p.ineq_indices.empty();
    const double alpha = cfg.over_relaxation;

    detail::AffineProjector aff(p);

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    if (cfg.seed != 0) {
        std::mt19937_64 rng(cfg.seed);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double r = double(rng() >> 11) * 0x1.0p-53 - 0.5;
                x(i, j) = 0.1 * r;
                x(j, i) = x(i, j);
            }
    }
    Eigen::MatrixXd z1 = x, z2 = x;
    Eigen::MatrixXd u1 = Eigen::MatrixXd::Zero(n, n), u2 = u1;
    Eigen::MatrixXd z1_prev = z1, z2_prev = z2;

    double rho = cfg.rho;
    SolveStatus status;

    auto clamp_designated = [&](Eigen::MatrixXd m) {
        for (const auto& [i, j] : p.ineq_indices) {
            const double val = std::max(0.0, 0.5 * (m(i, j) + m(j, i)));
            m(i, j) = val;
            m(j, i) = val;
        }
        return m;
    };

    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        // X-update: unconstrained minimizer of the augmented terms, then affine projection.
        if (has_ineq)
            x = 0.5 * (z1 - u1 + z2 - u2) + p.objective / (2.0 * rho);
        else
            x = (z1 - u1) + p.objective / rho;
        aff.project(x);
        if (!x.allFinite()) throw SolverDiverged("solve_sdp: non-finite iterate");

        z1_prev.swap(z1);
        Eigen::MatrixXd xh1 = alpha * x + (1.0 - alpha) * z1_prev;
        z1 = project_psd(0.5 * ((xh1 + u1) + (xh1 + u1).transpose()));
        u1 += xh1 - z1;

        if (has_ineq) {
            z2_prev.swap(z2);
            Eigen::MatrixXd xh2 = alpha * x + (1.0 - alpha) * z2_prev;
            z2 = clamp_designated(xh2 + u2);
            u2 += xh2 - z2;
        }

        // Residuals are measured on the PSD copy, which is what gets returned.
        double consensus = (x - z1).norm();
        double dual = rho * (z1 - z1_prev).norm();
        if (has_ineq) {
            consensus = std::max(consensus, (x - z2).norm());
            dual = std::max(dual, rho * (z2 - z2_prev).norm());
        }
        const double eq_viol = aff.max_violation(z1);
        const double ineq_viol = detail::max_neg_designated(z1, p.ineq_indices);
        const double primal = std::max({consensus, eq_viol, ineq_viol});

        status.primal_residual = primal;
        status.dual_residual = dual;

        if (cfg.iter_log && (iter % 25 == 0)) {
            const double obj = (p.objective.array() * z1.array()).sum();
            (*cfg.iter_log) << iter << "," << obj << "," << primal << "," << dual << "\n";
        }

        if (primal <= cfg.tol_primal && dual <= cfg.tol_dual) {
            status.converged = true;
            ++iter;
            break;
        }

        // standard residual-balancing rho update
        if ((iter + 1) % 25 == 0) {
            if (primal > 10.0 * dual && rho < 1e6) {
                rho *= 2.0;
                u1 *= 0.5;
                u2 *= 0.5;
            } else if (dual > 10.0 * primal && rho > 1e-6) {
                rho *= 0.5;
                u1 *= 2.0;
                u2 *= 2.0;
            }
        }
    }

    SdpSolution sol;
    sol.m_matrix = 0.5 * (z1 + z1.transpose());
    sol.objective_value = (p.objective.array() * sol.m_matrix.array()).sum();
    sol.iterations = iter;
    status.iterations = iter;

    sol.residuals.max_eq_violation = aff.max_violation(sol.m_matrix);
    sol.residuals.max_neg_ineq = detail::max_neg_designated(sol.m_matrix, p.ineq_indices);
    sol.residuals.min_eigenvalue = eig_symmetric(sol.m_matrix).values(0);
    if (sol.residuals.min_eigenvalue < -cfg.tol_psd) status.converged = false;

    return {sol, status};
}

}  // namespace nlg
