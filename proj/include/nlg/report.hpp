#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "json.hpp"
#include "nlg/constants.hpp"
#include "nlg/eval.hpp"
#include "nlg/game.hpp"
#include "nlg/recovery.hpp"
#include "nlg/rounding.hpp"
#include "nlg/sdp.hpp"
#include "nlg/solver.hpp"

namespace nlg {

struct PipelineOptions {
    bool uniform = false;
    double tol = 1e-8;        // solver primal/dual tolerance
    double tol_psd = 1e-8;
    int max_iters = 50000;
    double rank_tol = 1e-7;
    FamilyMode family = FamilyMode::compact;
    int dim_cap = 4096;
    std::uint64_t seed = 0;
    bool skip_classical = false;
    double classical_cap = 1e7;
    std::ostream* iter_log = nullptr;
};

/// Bound sandwich for one game: classical value, relaxation value(s), the
/// extracted strategy's value and the certification flag
/// omega_c <= omega_sdp and c_k * omega_sdp - tol <= omega_extracted <= omega_sdp + tol.
struct GameValueReport {
    std::string game_name;
    int k = 0;
    int n = 0;

    std::optional<double> omega_c;
    std::string classical_note;
    std::vector<int> best_alice, best_bob;

    double omega_sdp = 0.0;
    std::optional<double> omega_sdp_uniform;
    double c_k = 0.0;
    std::optional<double> omega_extracted;
    bool sandwich_ok = false;

    SolveStatus solver_status;
    SdpResiduals solver_residuals;
    std::optional<SolveStatus> solver_status_uniform;
    SdpResiduals solver_residuals_uniform;

    int strategy_dimension = 0;
    int family_generators = 0;
    bool projective = false;
    std::optional<double> projection_res;
    std::optional<EvalReport> eval;

    bool complete = false;      // false on solver non-convergence or divergence
    std::string error;

    PipelineOptions options;
    std::map<std::string, double> timings_ms;
};

namespace detail {

struct StageTimer {
    std::map<std::string, double>& sink;
    std::string key;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    StageTimer(std::map<std::string, double>& s, std::string k) : sink(s), key(std::move(k)) {}
    ~StageTimer() {
        sink[key] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
    }
};

}  // namespace detail

/// Full solve -> recover -> round -> evaluate pipeline. Solver non-convergence
/// leaves a partial report (complete = false) instead of throwing; file and
/// dimension problems propagate as ParseError / DimensionCapError.
inline GameValueReport run_pipeline(const Game& g, const PipelineOptions& opt = {}) {
    GameValueReport rep;
    rep.options = opt;
    rep.game_name = g.name;
    rep.k = g.k;
    rep.c_k = c_k_closed(g.k);
    detail::StageTimer total(rep.timings_ms, "total");

    const GramIndex idx(g);
    rep.n = idx.size();

    if (opt.uniform && g.k != 2)
        throw std::invalid_argument("uniform mode requires k = 2");

    if (!opt.skip_classical) {
        if (classical_pair_count(g) <= opt.classical_cap) {
            detail::StageTimer t(rep.timings_ms, "classical");
            ClassicalResult cr = classical_value(g, opt.classical_cap);
            rep.omega_c = cr.value;
            rep.best_alice = cr.best_alice;
            rep.best_bob = cr.best_bob;
        } else {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "classical enumeration skipped: %.3g strategy pairs exceed cap %.3g",
                          classical_pair_count(g), opt.classical_cap);
            rep.classical_note = buf;
        }
    } else {
        rep.classical_note = "classical enumeration skipped by flag";
    }

    SolverConfig cfg;
    cfg.max_iters = opt.max_iters;
    cfg.tol_primal = opt.tol;
    cfg.tol_dual = opt.tol;
    cfg.tol_psd = opt.tol_psd;
    cfg.seed = opt.seed;
    cfg.iter_log = opt.iter_log;

    SdpSolution sol;
    try {
        {
            detail::StageTimer t(rep.timings_ms, "solve");
            auto [s, status] = solve_sdp(build_sdp(g, false), cfg);
            sol = std::move(s);
            rep.solver_status = status;
        }
        rep.solver_residuals = sol.residuals;
        rep.omega_sdp = sol.objective_value;

        SdpSolution rounding_source = sol;
        if (opt.uniform) {
            detail::StageTimer t(rep.timings_ms, "solve_uniform");
            auto [su, status_u] = solve_sdp(build_sdp(g, true), cfg);
            rep.solver_status_uniform = status_u;
            rep.solver_residuals_uniform = su.residuals;
            rep.omega_sdp_uniform = su.objective_value;
            rounding_source = std::move(su);
        }

        if (!rep.solver_status.converged ||
            (rep.solver_status_uniform && !rep.solver_status_uniform->converged)) {
            rep.error = "solver did not converge";
            return rep;
        }

        VectorStrategy vs;
        {
            detail::StageTimer t(rep.timings_ms, "recover");
            vs = recover_vector_strategy(idx, rounding_source.m_matrix, opt.rank_tol);
        }

        QuantumStrategy qs;
        {
            detail::StageTimer t(rep.timings_ms, "round");
            AnticommutingFamily fam = build_family(vs.m_dim, opt.family, opt.dim_cap);
            qs = opt.uniform ? round_uniform_binary(vs, fam) : round_general(vs, fam);
            rep.strategy_dimension = fam.d;
            rep.family_generators = fam.m;
            rep.projective = qs.projective;
            if (qs.projective) rep.projection_res = projection_residual(qs);
        }

        {
            detail::StageTimer t(rep.timings_ms, "eval");
            rep.eval = evaluate(g, qs);
            rep.omega_extracted = rep.eval->win_prob;
        }
    } catch (const SolverDiverged& e) {
        rep.error = e.what();
        return rep;
    }

    rep.complete = true;
    rep.sandwich_ok = rep.omega_extracted &&
                      *rep.omega_extracted >= rep.c_k * rep.omega_sdp - 1e-5 &&
                      *rep.omega_extracted <= rep.omega_sdp + 1e-5 &&
                      (!rep.omega_c || *rep.omega_c <= rep.omega_sdp + 1e-5);
    return rep;
}

// ---------------------------------------------------------------------------
// JSON serialization. Report floats are rounded to 12 significant digits so
// reruns with identical inputs produce byte-identical files (timings aside).
// ---------------------------------------------------------------------------

namespace detail {

inline double round_sig(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline nlohmann::ordered_json matrix_rows(const Eigen::MatrixXd& m, bool round = true) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(round ? round_sig(m(i, j)) : m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::ordered_json status_json(const SolveStatus& st, const SdpResiduals& res) {
    nlohmann::ordered_json j;
    j["converged"] = st.converged;
    j["iterations"] = st.iterations;
    j["primal_residual"] = round_sig(st.primal_residual);
    j["dual_residual"] = round_sig(st.dual_residual);
    j["max_eq_violation"] = round_sig(res.max_eq_violation);
    j["min_eigenvalue"] = round_sig(res.min_eigenvalue);
    j["max_neg_ineq"] = round_sig(res.max_neg_ineq);
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json eval_to_json(const EvalReport& rep, int s_size, int t_size) {
    nlohmann::ordered_json j;
    j["win_prob"] = detail::round_sig(rep.win_prob);
    auto joint = nlohmann::ordered_json::array();
    for (int s = 0; s < s_size; ++s) {
        auto row = nlohmann::ordered_json::array();
        for (int t = 0; t < t_size; ++t)
            row.push_back(detail::matrix_rows(rep.joint_at(s, t, t_size)));
        joint.push_back(row);
    }
    j["joint"] = joint;
    j["alice_marginals"] = detail::matrix_rows(rep.alice_marginals);
    j["bob_marginals"] = detail::matrix_rows(rep.bob_marginals);
    return j;
}

inline nlohmann::ordered_json report_to_json(const GameValueReport& rep, int s_size = 0,
                                             int t_size = 0) {
    nlohmann::ordered_json j;
    j["game_name"] = rep.game_name;
    j["k"] = rep.k;
    j["n"] = rep.n;
    j["complete"] = rep.complete;
    if (!rep.error.empty()) j["error"] = rep.error;

    nlohmann::ordered_json flags;
    flags["uniform"] = rep.options.uniform;
    flags["tol"] = detail::round_sig(rep.options.tol);
    flags["tol_psd"] = detail::round_sig(rep.options.tol_psd);
    flags["max_iters"] = rep.options.max_iters;
    flags["rank_tol"] = detail::round_sig(rep.options.rank_tol);
    flags["family"] = to_string(rep.options.family);
    flags["dim_cap"] = rep.options.dim_cap;
    flags["seed"] = rep.options.seed;
    flags["skip_classical"] = rep.options.skip_classical;
    flags["classical_cap"] = detail::round_sig(rep.options.classical_cap);
    j["flags"] = flags;

    if (rep.omega_c) {
        j["omega_c"] = detail::round_sig(*rep.omega_c);
        j["best_alice"] = rep.best_alice;
        j["best_bob"] = rep.best_bob;
    }
    if (!rep.classical_note.empty()) j["classical_note"] = rep.classical_note;

    j["omega_sdp"] = detail::round_sig(rep.omega_sdp);
    if (rep.omega_sdp_uniform) j["omega_sdp_uniform"] = detail::round_sig(*rep.omega_sdp_uniform);
    j["c_k"] = detail::round_sig(rep.c_k);
    if (rep.omega_extracted) j["omega_extracted"] = detail::round_sig(*rep.omega_extracted);
    j["sandwich_ok"] = rep.sandwich_ok;

    j["solver"] = detail::status_json(rep.solver_status, rep.solver_residuals);
    if (rep.solver_status_uniform)
        j["solver_uniform"] =
            detail::status_json(*rep.solver_status_uniform, rep.solver_residuals_uniform);

    if (rep.complete) {
        j["strategy_dimension"] = rep.strategy_dimension;
        j["family_generators"] = rep.family_generators;
        j["projective"] = rep.projective;
        if (rep.projection_res) j["projection_residual"] = detail::round_sig(*rep.projection_res);
        if (rep.eval && s_size > 0) j["eval"] = eval_to_json(*rep.eval, s_size, t_size);
    }

    nlohmann::ordered_json timings;
    for (const auto& [key, val] : rep.timings_ms) timings[key] = detail::round_sig(val);
    j["timings_ms"] = timings;
    return j;
}

/// Solve-stage artifact; the matrix keeps full precision so later stages can
/// resume from the file exactly.
inline nlohmann::ordered_json solution_to_json(const std::string& game_name, bool uniform,
                                               const SdpSolution& sol, const SolveStatus& st) {
    nlohmann::ordered_json j;
    j["game_name"] = game_name;
    j["uniform"] = uniform;
    j["n"] = static_cast<int>(sol.m_matrix.rows());
    j["objective_value"] = sol.objective_value;
    j["converged"] = st.converged;
    j["iterations"] = st.iterations;
    j["primal_residual"] = detail::round_sig(st.primal_residual);
    j["dual_residual"] = detail::round_sig(st.dual_residual);
    j["max_eq_violation"] = detail::round_sig(sol.residuals.max_eq_violation);
    j["min_eigenvalue"] = detail::round_sig(sol.residuals.min_eigenvalue);
    j["max_neg_ineq"] = detail::round_sig(sol.residuals.max_neg_ineq);
    j["m_matrix"] = detail::matrix_rows(sol.m_matrix, /*round=*/false);
    return j;
}

inline std::pair<Eigen::MatrixXd, bool> solution_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        const auto& rows = j.at("m_matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n)
            throw ParseError("solution file: m_matrix must be n x n");
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i) {
            const auto& row = rows.at(static_cast<std::size_t>(i));
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw ParseError("solution file: m_matrix must be n x n");
            for (int c = 0; c < n; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
        return {m, j.value("uniform", false)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("solution file: ") + e.what());
    }
}

}  // namespace nlg
