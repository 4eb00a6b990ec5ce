#pragma once

#include <Eigen/Dense>

#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlg/game.hpp"

namespace nlg {

/// Layout of the Gram matrix: index 0 is the handle vector z, then Alice's
/// answer vectors v(s,a) blocked by question, then Bob's w(t,b).
struct GramIndex {
    int s_size = 0;
    int t_size = 0;
    int k = 0;

    explicit GramIndex() = default;
    explicit GramIndex(const Game& g) : s_size(g.s_size), t_size(g.t_size), k(g.k) {}
    GramIndex(int s, int t, int k_) : s_size(s), t_size(t), k(k_) {}

    int size() const { return 1 + k * (s_size + t_size); }
    int z() const { return 0; }
    int v(int s, int a) const { return 1 + s * k + a; }
    int w(int t, int b) const { return 1 + k * s_size + t * k + b; }
};

/// One term c * M(i,j) of a linear functional on symmetric matrices,
/// canonicalized to i <= j.
struct EqTerm {
    int i;
    int j;
    double c;
};

/// Linear equality sum_terms c * M(i,j) = b.
struct EqConstraint {
    std::vector<EqTerm> terms;
    double b = 0.0;
};

inline double constraint_value(const EqConstraint& eq, const Eigen::MatrixXd& m) {
    double val = 0.0;
    for (const auto& t : eq.terms) val += t.c * m(t.i, t.j);
    return val;
}

/// Gram-matrix SDP: maximize sum(C o M) over PSD M subject to the equality
/// constraints and entrywise nonnegativity on ineq_indices.
struct SdpProblem {
    int n = 0;
    Eigen::MatrixXd objective;  // C, symmetric; objective value = sum_ij C_ij M_ij
    std::vector<EqConstraint> eq_constraints;
    std::vector<std::pair<int, int>> ineq_indices;  // (v-index, w-index) pairs
};

namespace detail {

// Accumulates terms keyed by canonical (i <= j) entry, then emits sorted.
class ConstraintBuilder {
  public:
    void add(int i, int j, double c) {
        if (i > j) std::swap(i, j);
        coeffs_[{i, j}] += c;
    }
    EqConstraint done(double b) {
        EqConstraint eq;
        eq.b = b;
        for (const auto& [key, c] : coeffs_)
            if (c != 0.0) eq.terms.push_back({key.first, key.second, c});
        coeffs_.clear();
        return eq;
    }

  private:
    std::map<std::pair<int, int>, double> coeffs_;
};

}  // namespace detail

/// Builds the relaxation for a game. With `uniform` set (binary games only)
/// the diagonal entries of every answer vector are pinned to 1/2, which makes
/// the optimum the uniform value of the game.
inline SdpProblem build_sdp(const Game& g, bool uniform = false) {
    if (uniform && g.k != 2)
        throw std::invalid_argument("build_sdp: uniform mode requires k = 2");

    const GramIndex idx(g);
    const int n = idx.size();

    SdpProblem p;
    p.n = n;
    p.objective = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t)
            for (int a = 0; a < g.k; ++a)
                for (int b = 0; b < g.k; ++b) {
                    const double c = g.pi(s, t) * g.v_at(s, t, a, b);
                    if (c == 0.0) continue;
                    p.objective(idx.v(s, a), idx.w(t, b)) += 0.5 * c;
                    p.objective(idx.w(t, b), idx.v(s, a)) += 0.5 * c;
                }

    detail::ConstraintBuilder cb;

    // <z|z> = 1
    cb.add(0, 0, 1.0);
    p.eq_constraints.push_back(cb.done(1.0));

    // sum_a |v_a^s> = |z>, encoded row-wise against every index u; same for Bob.
    for (int s = 0; s < g.s_size; ++s)
        for (int u = 0; u < n; ++u) {
            for (int a = 0; a < g.k; ++a) cb.add(u, idx.v(s, a), 1.0);
            cb.add(u, 0, -1.0);
            p.eq_constraints.push_back(cb.done(0.0));
        }
    for (int t = 0; t < g.t_size; ++t)
        for (int u = 0; u < n; ++u) {
            for (int b = 0; b < g.k; ++b) cb.add(u, idx.w(t, b), 1.0);
            cb.add(u, 0, -1.0);
            p.eq_constraints.push_back(cb.done(0.0));
        }

    // orthogonality within each measurement
    for (int s = 0; s < g.s_size; ++s)
        for (int a = 0; a < g.k; ++a)
            for (int a2 = a + 1; a2 < g.k; ++a2) {
                cb.add(idx.v(s, a), idx.v(s, a2), 1.0);
                p.eq_constraints.push_back(cb.done(0.0));
            }
    for (int t = 0; t < g.t_size; ++t)
        for (int b = 0; b < g.k; ++b)
            for (int b2 = b + 1; b2 < g.k; ++b2) {
                cb.add(idx.w(t, b), idx.w(t, b2), 1.0);
                p.eq_constraints.push_back(cb.done(0.0));
            }

    if (uniform) {
        for (int s = 0; s < g.s_size; ++s)
            for (int a = 0; a < g.k; ++a) {
                cb.add(idx.v(s, a), idx.v(s, a), 1.0);
                p.eq_constraints.push_back(cb.done(0.5));
            }
        for (int t = 0; t < g.t_size; ++t)
            for (int b = 0; b < g.k; ++b) {
                cb.add(idx.w(t, b), idx.w(t, b), 1.0);
                p.eq_constraints.push_back(cb.done(0.5));
            }
    }

    // cross inner products <v|w> >= 0
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t)
            for (int a = 0; a < g.k; ++a)
                for (int b = 0; b < g.k; ++b)
                    p.ineq_indices.emplace_back(idx.v(s, a), idx.w(t, b));

    return p;
}

/// sum_{s,t} pi(s,t) sum_{a,b} V(a,b|s,t) * M[v(s,a)][w(t,b)]
inline double objective_of(const Game& g, const Eigen::MatrixXd& m) {
    const GramIndex idx(g);
    if (m.rows() != idx.size() || m.cols() != idx.size())
        throw std::invalid_argument("objective_of: matrix size does not match the game");
    double val = 0.0;
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t)
            for (int a = 0; a < g.k; ++a)
                for (int b = 0; b < g.k; ++b)
                    val += g.pi(s, t) * g.v_at(s, t, a, b) * m(idx.v(s, a), idx.w(t, b));
    return val;
}

/// Sparse triplet dump, one constraint or coefficient per line.
inline void dump_sdp(const SdpProblem& p, std::ostream& os) {
    for (std::size_t j = 0; j < p.eq_constraints.size(); ++j) {
        os << "EQ " << j;
        for (const auto& t : p.eq_constraints[j].terms)
            os << " " << t.i << " " << t.j << " " << t.c;
        os << " = " << p.eq_constraints[j].b << "\n";
    }
    for (const auto& [i, j] : p.ineq_indices) os << "INEQ " << i << " " << j << "\n";
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j)
            if (p.objective(i, j) != 0.0) os << "OBJ " << i << " " << j << " " << p.objective(i, j) << "\n";
}

}  // namespace nlg
