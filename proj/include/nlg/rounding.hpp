#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlg/eig.hpp"
#include "nlg/family.hpp"
#include "nlg/game.hpp"
#include "nlg/recovery.hpp"

namespace nlg {

/// Measurement operators for both players in local dimension d. Bob's
/// operators are stored untransposed; the evaluator works with the maximally
/// entangled state in dimension d, under which Bob physically measures the
/// transposes and outcome probabilities reduce to Tr(P Q)/d.
struct QuantumStrategy {
    int d = 1;
    int k = 0;
    std::vector<std::vector<Eigen::MatrixXcd>> alice;  // [s][a]
    std::vector<std::vector<Eigen::MatrixXcd>> bob;    // [t][b]
    bool projective = false;
};

namespace detail {

// u_0 I + sum_j u_j sigma_j
inline Eigen::MatrixXcd contract(const Eigen::VectorXd& u, const AnticommutingFamily& fam) {
    Eigen::MatrixXcd out =
        u(0) * Eigen::MatrixXcd::Identity(fam.d, fam.d);
    for (int j = 1; j < u.size(); ++j)
        if (u(j) != 0.0) out += u(j) * fam.sigmas[static_cast<std::size_t>(j - 1)];
    return out;
}

inline void require_family_match(const VectorStrategy& vs, const AnticommutingFamily& fam) {
    if (fam.m != vs.m_dim)
        throw std::invalid_argument("rounding: family has " + std::to_string(fam.m) +
                                    " generators, vectors need " + std::to_string(vs.m_dim));
}

}  // namespace detail

/// Projective strategy for binary games with uniform marginals. Each vector
/// has first coordinate 1/2 and residual norm 1/2 up to solver noise; both are
/// snapped exactly before the contraction against the generators, which makes
/// P^2 = P and P_0 + P_1 = I hold at machine precision. The snap moves each
/// coefficient by at most the stated tolerance.
inline QuantumStrategy round_uniform_binary(const VectorStrategy& vs,
                                            const AnticommutingFamily& fam,
                                            double uniform_tol = 1e-4) {
    if (vs.index.k != 2)
        throw std::invalid_argument("round_uniform_binary: requires k = 2");
    detail::require_family_match(vs, fam);

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(fam.d, fam.d);
    auto project_from = [&](const Eigen::VectorXd& u) {
        const double first = u(0);
        Eigen::VectorXd tail = u.tail(u.size() - 1);
        const double tail_norm = tail.norm();
        if (std::abs(first - 0.5) > uniform_tol || std::abs(tail_norm - 0.5) > uniform_tol)
            throw std::runtime_error(
                "round_uniform_binary: vector is not uniform within tolerance (first coordinate " +
                std::to_string(first) + ", residual norm " + std::to_string(tail_norm) + ")");
        Eigen::VectorXd snapped(u.size());
        snapped(0) = 0.5;
        if (tail_norm > 0.0)
            snapped.tail(u.size() - 1) = tail * (0.5 / tail_norm);
        else
            snapped.tail(u.size() - 1).setZero();
        return detail::contract(snapped, fam);
    };

    QuantumStrategy qs;
    qs.d = fam.d;
    qs.k = 2;
    qs.projective = true;
    for (int s = 0; s < vs.index.s_size; ++s) {
        Eigen::MatrixXcd p0 = project_from(vs.v_at(s, 0));
        qs.alice.push_back({p0, id - p0});
    }
    for (int t = 0; t < vs.index.t_size; ++t) {
        Eigen::MatrixXcd q0 = project_from(vs.w_at(t, 0));
        qs.bob.push_back({q0, id - q0});
    }
    return qs;
}

/// POVM strategy for any k. Per question, with vectors u^(1..k):
///
///   E_i = ( g_i I + sum_{j>=1} u_j^(i) sigma_j ) / D,
///   g_i = max(u_0^(i), ||u^(i) tail||),  D = sum_i g_i.
///
/// At an exact SDP solution the residual norm equals sqrt(u_0 (1-u_0)), so
/// g_i matches the analytic scale factor; taking the computed norm keeps every
/// element PSD under solver noise. Residuals are recentered to sum to zero
/// exactly, so completeness holds at machine precision.
inline QuantumStrategy round_general(const VectorStrategy& vs, const AnticommutingFamily& fam,
                                     double clamp_tol = 1e-6) {
    detail::require_family_match(vs, fam);
    const int k = vs.index.k;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(fam.d, fam.d);

    auto round_question = [&](const std::vector<Eigen::VectorXd>& fam_vecs, int q) {
        const int dim = vs.m_dim + 1;
        std::vector<Eigen::VectorXd> tails(static_cast<std::size_t>(k));
        std::vector<double> firsts(static_cast<std::size_t>(k));
        Eigen::VectorXd tail_sum = Eigen::VectorXd::Zero(dim - 1);
        for (int i = 0; i < k; ++i) {
            const auto& u = fam_vecs[static_cast<std::size_t>(q) * k + i];
            double u0 = u(0);
            if (u0 < -clamp_tol || u0 > 1.0 + clamp_tol)
                throw std::runtime_error("round_general: first coordinate " + std::to_string(u0) +
                                         " outside [0,1] beyond tolerance");
            firsts[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, u0));
            tails[static_cast<std::size_t>(i)] = u.tail(dim - 1);
            tail_sum += tails[static_cast<std::size_t>(i)];
        }
        // sum_i u^(i) = z, so the tails cancel; enforce that exactly
        for (auto& tl : tails) tl -= tail_sum / double(k);

        double d_scale = 0.0;
        std::vector<double> g(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            g[static_cast<std::size_t>(i)] =
                std::max(firsts[static_cast<std::size_t>(i)], tails[static_cast<std::size_t>(i)].norm());
            d_scale += g[static_cast<std::size_t>(i)];
        }
        if (d_scale < 1e-12)
            throw std::runtime_error("round_general: degenerate question, all vectors vanish");

        std::vector<Eigen::MatrixXcd> elems;
        elems.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd coeff(dim);
            coeff(0) = g[static_cast<std::size_t>(i)];
            coeff.tail(dim - 1) = tails[static_cast<std::size_t>(i)];
            elems.push_back(detail::contract(coeff, fam) / d_scale);
        }
        return elems;
    };

    QuantumStrategy qs;
    qs.d = fam.d;
    qs.k = k;
    qs.projective = false;
    for (int s = 0; s < vs.index.s_size; ++s) qs.alice.push_back(round_question(vs.v, s));
    for (int t = 0; t < vs.index.t_size; ++t) qs.bob.push_back(round_question(vs.w, t));
    return qs;
}

/// Numeric POVM checks (PSD via Hermitian eigenvalues, completeness,
/// projectivity when flagged). Intended for small d; cost grows as d^3.
inline std::vector<std::string> povm_violations(const QuantumStrategy& qs, double tol_psd = 1e-9,
                                                double tol_sum = 1e-9) {
    std::vector<std::string> out;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(qs.d, qs.d);
    auto check = [&](const std::vector<std::vector<Eigen::MatrixXcd>>& side, const char* label) {
        for (std::size_t q = 0; q < side.size(); ++q) {
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(qs.d, qs.d);
            for (std::size_t i = 0; i < side[q].size(); ++i) {
                const auto& e = side[q][i];
                sum += e;
                if ((e - e.adjoint()).cwiseAbs().maxCoeff() > tol_sum)
                    out.push_back(std::string(label) + " element not Hermitian at question " +
                                  std::to_string(q));
                if (min_eig_hermitian(e) < -tol_psd)
                    out.push_back(std::string(label) + " element not PSD at question " +
                                  std::to_string(q) + " answer " + std::to_string(i));
                if (qs.projective && (e * e - e).cwiseAbs().maxCoeff() > tol_sum)
                    out.push_back(std::string(label) + " element not a projection at question " +
                                  std::to_string(q));
            }
            if ((sum - id).cwiseAbs().maxCoeff() > tol_sum)
                out.push_back(std::string(label) + " measurement does not sum to identity at question " +
                              std::to_string(q));
        }
    };
    check(qs.alice, "alice");
    check(qs.bob, "bob");
    return out;
}

/// Largest ||E^2 - E|| over all elements; meaningful for projective strategies.
inline double projection_residual(const QuantumStrategy& qs) {
    double worst = 0.0;
    for (const auto* side : {&qs.alice, &qs.bob})
        for (const auto& meas : *side)
            for (const auto& e : meas)
                worst = std::max(worst, (e * e - e).cwiseAbs().maxCoeff());
    return worst;
}

// ---------------------------------------------------------------------------
// Strategy files: matrices as row-major [re, im] pairs.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXcd& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, int d) {
    if (!j.is_array() || static_cast<int>(j.size()) != d)
        throw ParseError("strategy file: matrix must be d x d of [re, im] pairs");
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw ParseError("strategy file: matrix must be d x d of [re, im] pairs");
        for (int c = 0; c < d; ++c) {
            const auto& cell = row.at(static_cast<std::size_t>(c));
            if (!cell.is_array() || cell.size() != 2)
                throw ParseError("strategy file: matrix entries must be [re, im] pairs");
            m(i, c) = std::complex<double>(cell.at(0).get<double>(), cell.at(1).get<double>());
        }
    }
    return m;
}

}  // namespace detail

inline nlohmann::ordered_json strategy_to_json(const QuantumStrategy& qs) {
    nlohmann::ordered_json j;
    j["d"] = qs.d;
    j["k"] = qs.k;
    j["projective"] = qs.projective;
    auto side_to_json = [&](const std::vector<std::vector<Eigen::MatrixXcd>>& side) {
        auto qsj = nlohmann::ordered_json::array();
        for (const auto& meas : side) {
            auto mj = nlohmann::ordered_json::array();
            for (const auto& e : meas) mj.push_back(detail::matrix_to_json(e));
            qsj.push_back(mj);
        }
        return qsj;
    };
    j["alice"] = side_to_json(qs.alice);
    j["bob"] = side_to_json(qs.bob);
    return j;
}

inline QuantumStrategy strategy_from_json(const nlohmann::json& j) {
    QuantumStrategy qs;
    try {
        qs.d = j.at("d").get<int>();
        qs.k = j.at("k").get<int>();
        qs.projective = j.value("projective", false);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("strategy file: ") + e.what());
    }
    if (qs.d < 1 || qs.k < 1) throw ParseError("strategy file: need d >= 1 and k >= 1");
    auto side_from_json = [&](const nlohmann::json& sj) {
        std::vector<std::vector<Eigen::MatrixXcd>> side;
        if (!sj.is_array()) throw ParseError("strategy file: player block must be an array");
        for (const auto& mj : sj) {
            if (!mj.is_array() || static_cast<int>(mj.size()) != qs.k)
                throw ParseError("strategy file: each question needs k elements");
            std::vector<Eigen::MatrixXcd> meas;
            for (const auto& ej : mj) meas.push_back(detail::matrix_from_json(ej, qs.d));
            side.push_back(std::move(meas));
        }
        return side;
    };
    try {
        qs.alice = side_from_json(j.at("alice"));
        qs.bob = side_from_json(j.at("bob"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("strategy file: ") + e.what());
    }
    return qs;
}

}  // namespace nlg
