#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlg/eig.hpp"
#include "nlg/sdp.hpp"

namespace nlg {

/// Explicit real vectors recovered from a solved Gram matrix, rotated so the
/// handle vector z sits at e_0. First coordinates are then inner products with
/// z, which is what the rounding constructions consume.
struct VectorStrategy {
    GramIndex index;
    int m_dim = 0;            // ambient dimension minus one
    Eigen::VectorXd z;        // e_0
    std::vector<Eigen::VectorXd> v;  // [s*k + a]
    std::vector<Eigen::VectorXd> w;  // [t*k + b]
    double rank_tol = 0.0;

    const Eigen::VectorXd& v_at(int s, int a) const {
        return v[static_cast<std::size_t>(s) * index.k + a];
    }
    const Eigen::VectorXd& w_at(int t, int b) const {
        return w[static_cast<std::size_t>(t) * index.k + b];
    }
};

/// Rows of U * Lambda^{1/2} restricted to eigenvalues above rank_tol, so
/// pairwise inner products reproduce the input matrix. Eigenvalues in
/// [-rank_tol, rank_tol] are dropped; anything below -rank_tol is rejected.
inline std::vector<Eigen::VectorXd> factor_gram(const Eigen::MatrixXd& m, double rank_tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("factor_gram: matrix must be square");
    EigResult e = eig_symmetric(m);
    if (e.values.size() > 0 && e.values(0) < -rank_tol)
        throw std::runtime_error("factor_gram: matrix is not PSD at tolerance (min eigenvalue " +
                                 std::to_string(e.values(0)) + ")");

    // kept coordinates ordered by decreasing eigenvalue
    std::vector<int> kept;
    for (int i = static_cast<int>(e.values.size()) - 1; i >= 0; --i)
        if (e.values(i) > rank_tol) kept.push_back(i);

    const int n = static_cast<int>(m.rows());
    const int r = static_cast<int>(kept.size());
    std::vector<Eigen::VectorXd> vectors(static_cast<std::size_t>(n));
    for (int row = 0; row < n; ++row) {
        Eigen::VectorXd x(r);
        for (int c = 0; c < r; ++c)
            x(c) = e.vectors(row, kept[static_cast<std::size_t>(c)]) *
                   std::sqrt(e.values(kept[static_cast<std::size_t>(c)]));
        vectors[static_cast<std::size_t>(row)] = x;
    }
    return vectors;
}

/// Householder reflection sending the (renormalized) vector at z_index to e_0,
/// applied to every vector. Inner products are preserved.
inline std::vector<Eigen::VectorXd> rotate_to_e0(const std::vector<Eigen::VectorXd>& vectors,
                                                 int z_index) {
    if (z_index < 0 || static_cast<std::size_t>(z_index) >= vectors.size())
        throw std::invalid_argument("rotate_to_e0: z_index out of range");
    Eigen::VectorXd z = vectors[static_cast<std::size_t>(z_index)];
    const double norm = z.norm();
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::runtime_error("rotate_to_e0: z norm deviates from 1 by " +
                                 std::to_string(std::abs(norm - 1.0)));
    if (z.size() == 0) throw std::invalid_argument("rotate_to_e0: empty vectors");
    z /= norm;

    Eigen::VectorXd h = z;
    h(0) -= 1.0;
    const double h2 = h.squaredNorm();

    std::vector<Eigen::VectorXd> out;
    out.reserve(vectors.size());
    for (const auto& x : vectors) {
        if (x.size() != z.size())
            throw std::invalid_argument("rotate_to_e0: inconsistent vector dimensions");
        if (h2 < 1e-30) {
            out.push_back(x);  // z already at e_0
        } else {
            out.push_back(x - (2.0 * h.dot(x) / h2) * h);
        }
    }
    return out;
}

/// factor_gram + rotate_to_e0 + labeling through the Gram layout.
inline VectorStrategy recover_vector_strategy(const GramIndex& idx, const Eigen::MatrixXd& m,
                                              double rank_tol = 1e-7) {
    if (m.rows() != idx.size())
        throw std::invalid_argument("recover_vector_strategy: matrix does not match index");
    std::vector<Eigen::VectorXd> vectors = rotate_to_e0(factor_gram(m, rank_tol), idx.z());

    VectorStrategy vs;
    vs.index = idx;
    vs.rank_tol = rank_tol;
    vs.m_dim = static_cast<int>(vectors[0].size()) - 1;
    vs.z = Eigen::VectorXd::Zero(vs.m_dim + 1);
    vs.z(0) = 1.0;
    vs.v.reserve(static_cast<std::size_t>(idx.s_size) * idx.k);
    vs.w.reserve(static_cast<std::size_t>(idx.t_size) * idx.k);
    for (int s = 0; s < idx.s_size; ++s)
        for (int a = 0; a < idx.k; ++a)
            vs.v.push_back(vectors[static_cast<std::size_t>(idx.v(s, a))]);
    for (int t = 0; t < idx.t_size; ++t)
        for (int b = 0; b < idx.k; ++b)
            vs.w.push_back(vectors[static_cast<std::size_t>(idx.w(t, b))]);
    return vs;
}

/// Structural checks used by tests and the self test: orthogonality within a
/// question, completion to z, and first coordinate = squared norm.
inline std::vector<std::string> vector_strategy_violations(const VectorStrategy& vs,
                                                           double tol = 1e-6) {
    std::vector<std::string> out;
    const auto check_family = [&](const std::vector<Eigen::VectorXd>& fam, int questions,
                                  const char* label) {
        for (int q = 0; q < questions; ++q) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(vs.m_dim + 1);
            for (int a = 0; a < vs.index.k; ++a) {
                const auto& x = fam[static_cast<std::size_t>(q) * vs.index.k + a];
                sum += x;
                if (std::abs(x(0) - x.squaredNorm()) > tol)
                    out.push_back(std::string(label) + ": first coordinate != squared norm at question " +
                                  std::to_string(q));
                for (int a2 = a + 1; a2 < vs.index.k; ++a2) {
                    const auto& y = fam[static_cast<std::size_t>(q) * vs.index.k + a2];
                    if (std::abs(x.dot(y)) > tol)
                        out.push_back(std::string(label) + ": answers not orthogonal at question " +
                                      std::to_string(q));
                }
            }
            if ((sum - vs.z).norm() > tol)
                out.push_back(std::string(label) + ": answer vectors do not sum to z at question " +
                              std::to_string(q));
        }
    };
    check_family(vs.v, vs.index.s_size, "alice");
    check_family(vs.w, vs.index.t_size, "bob");
    return out;
}

}  // namespace nlg
