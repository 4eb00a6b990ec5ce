#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace nlg {

/// Eigendecomposition of a real symmetric matrix: a = vectors * values.asDiagonal() * vectors^T.
/// Eigenvalues are sorted ascending; vectors holds the matching eigenvectors as columns.
struct EigResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi eigensolver for dense real symmetric matrices.
///
/// Row-cyclic sweeps of Givens rotations until the off-diagonal mass is at
/// machine level. Accuracy is near machine precision for the sizes this
/// project needs (N up to a few hundred); cost is O(N^3) per sweep.
inline EigResult eig_symmetric(Eigen::MatrixXd a, int max_sweeps = 64) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("eig_symmetric: matrix must be square");
    if (!a.allFinite())
        throw std::runtime_error("eig_symmetric: non-finite entries");

    const Eigen::Index n = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    if (n == 0) return {Eigen::VectorXd(), v};

    // Callers pass symmetric input; small asymmetry is folded away here.
    a = (0.5 * (a + a.transpose())).eval();

    const double frob = a.norm();
    const double stop = 1e-15 * std::max(1.0, frob);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) <= stop) break;

        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 0.25 * stop / double(n)) continue;

                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(p, i) = a(i, p);
                    a(i, q) = s * aip + c * aiq;
                    a(q, i) = a(i, q);
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    // Sort ascending, stable in the original index order.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    EigResult out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        out.values(c) = a(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(c)]);
        out.vectors.col(c) = v.col(order[static_cast<std::size_t>(c)]);
    }
    return out;
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a complex Hermitian
/// matrix; its spectrum is the Hermitian spectrum with every eigenvalue doubled.
inline Eigen::MatrixXd hermitian_embedding(const Eigen::MatrixXcd& h) {
    const Eigen::Index d = h.rows();
    if (h.cols() != d) throw std::invalid_argument("hermitian_embedding: matrix must be square");
    Eigen::MatrixXd f(2 * d, 2 * d);
    f.topLeftCorner(d, d) = h.real();
    f.bottomRightCorner(d, d) = h.real();
    f.topRightCorner(d, d) = -h.imag();
    f.bottomLeftCorner(d, d) = h.imag();
    return f;
}

/// Smallest eigenvalue of a complex Hermitian matrix.
inline double min_eig_hermitian(const Eigen::MatrixXcd& h) {
    EigResult e = eig_symmetric(hermitian_embedding(h));
    return e.values(0);
}

}  // namespace nlg
