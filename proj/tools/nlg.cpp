// nlg: bounds on the entangled value of two-player one-round games.
//
// Pipeline: parse game -> classical enumeration -> Gram-matrix SDP ->
// vector recovery -> operator rounding -> exact evaluation, with each stage
// exposed as a subcommand and JSON artifacts in between.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlg/constants.hpp"
#include "nlg/eval.hpp"
#include "nlg/family.hpp"
#include "nlg/game.hpp"
#include "nlg/recovery.hpp"
#include "nlg/report.hpp"
#include "nlg/rounding.hpp"
#include "nlg/sdp.hpp"
#include "nlg/solver.hpp"

namespace {

constexpr int kExitSandwichFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitDimCap = 4;

int default_dim_cap() {
    if (const char* env = std::getenv("NLG_DIM_CAP")) {
        const int cap = std::atoi(env);
        if (cap > 0) return cap;
    }
    return 4096;
}

void write_or_print(const nlohmann::ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
}

nlohmann::json load_json(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw nlg::ParseError(std::string("cannot open ") + what + " file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw nlg::ParseError(std::string(what) + " file: " + e.what());
    }
    return j;
}

struct ReportArgs {
    std::string game_path;
    std::string out_path;
    std::string batch_dir;
    std::string iter_log_path;
    std::string dump_sdp_path;
    std::string dump_vectors_path;
    nlg::PipelineOptions opt;
    std::string family_name = "compact";
};

void dump_vectors_csv(const nlg::VectorStrategy& vs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "player,question,answer";
    for (int c = 0; c <= vs.m_dim; ++c) out << ",u" << c;
    out << "\n";
    out.precision(17);
    for (int s = 0; s < vs.index.s_size; ++s)
        for (int a = 0; a < vs.index.k; ++a) {
            out << "alice," << s << "," << a;
            const auto& u = vs.v_at(s, a);
            for (int c = 0; c <= vs.m_dim; ++c) out << "," << u(c);
            out << "\n";
        }
    for (int t = 0; t < vs.index.t_size; ++t)
        for (int b = 0; b < vs.index.k; ++b) {
            out << "bob," << t << "," << b;
            const auto& u = vs.w_at(t, b);
            for (int c = 0; c <= vs.m_dim; ++c) out << "," << u(c);
            out << "\n";
        }
}

int run_report_one(const std::string& game_path, const ReportArgs& args,
                   const std::string& out_path) {
    const nlg::Game g = nlg::load_game(game_path);

    nlg::PipelineOptions opt = args.opt;
    std::ofstream iter_log;
    if (!args.iter_log_path.empty()) {
        iter_log.open(args.iter_log_path);
        iter_log << "iter,objective,primal_res,dual_res\n";
        opt.iter_log = &iter_log;
    }
    if (!args.dump_sdp_path.empty()) {
        std::ofstream dump(args.dump_sdp_path);
        nlg::dump_sdp(nlg::build_sdp(g, opt.uniform && g.k == 2), dump);
    }

    nlg::GameValueReport rep = nlg::run_pipeline(g, opt);
    write_or_print(nlg::report_to_json(rep, g.s_size, g.t_size), out_path);

    if (!args.dump_vectors_path.empty() && rep.complete) {
        // re-derive the vectors the rounding consumed
        nlg::SolverConfig cfg;
        cfg.max_iters = opt.max_iters;
        cfg.tol_primal = cfg.tol_dual = opt.tol;
        cfg.tol_psd = opt.tol_psd;
        cfg.seed = opt.seed;
        auto [sol, status] = nlg::solve_sdp(nlg::build_sdp(g, opt.uniform), cfg);
        dump_vectors_csv(
            nlg::recover_vector_strategy(nlg::GramIndex(g), sol.m_matrix, opt.rank_tol),
            args.dump_vectors_path);
    }

    if (!rep.complete) return kExitSolver;
    return rep.sandwich_ok ? 0 : kExitSandwichFail;
}

int run_report(const ReportArgs& args) {
    if (args.batch_dir.empty()) return run_report_one(args.game_path, args, args.out_path);

    namespace fs = std::filesystem;
    std::vector<fs::path> games;
    for (const auto& entry : fs::directory_iterator(args.batch_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto p = entry.path();
        if (p.extension() == ".json" && p.string().find(".report.json") == std::string::npos)
            games.push_back(p);
    }
    std::sort(games.begin(), games.end());
    if (games.empty()) {
        std::cerr << "no game files in " << args.batch_dir << "\n";
        return kExitParse;
    }
    int worst = 0;
    for (const auto& p : games) {
        fs::path out = p;
        out.replace_extension(".report.json");
        const int rc = run_report_one(p.string(), args, out.string());
        std::cerr << p.filename().string() << " -> " << out.filename().string() << " (exit "
                  << rc << ")\n";
        worst = std::max(worst, rc);
    }
    return worst;
}

int run_selftest() {
    int failures = 0;
    auto line = [&](const std::string& what, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };

    for (int k = 2; k <= 6; ++k) {
        nlg::CkResult ck = nlg::c_k_numeric(k);
        line("c_" + std::to_string(k) + " numeric " + std::to_string(ck.numeric) +
                 " vs closed " + std::to_string(ck.closed_form),
             std::abs(ck.numeric - ck.closed_form) <= 1e-6);
    }
    line("binary scale minimum 2/(1+sqrt 2)",
         std::abs(nlg::binary_scale_min() - 2.0 / (1.0 + std::sqrt(2.0))) <= 1e-8);

    for (int m = 0; m <= 8; ++m)
        for (const auto mode : {nlg::FamilyMode::paper, nlg::FamilyMode::compact}) {
            const auto fam = nlg::build_family(m, mode);
            line("family m=" + std::to_string(m) + " mode=" + nlg::to_string(mode) + " d=" +
                     std::to_string(fam.d),
                 nlg::family_violations(fam).empty());
        }
    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds on the entangled value of two-player one-round games"};
    app.require_subcommand(1);

    ReportArgs ra;
    ra.opt.dim_cap = default_dim_cap();

    auto add_solver_flags = [](CLI::App* cmd, nlg::PipelineOptions& opt) {
        cmd->add_option("--tol", opt.tol, "solver primal/dual tolerance");
        cmd->add_option("--max-iters", opt.max_iters, "solver iteration cap");
        cmd->add_option("--seed", opt.seed, "solver initialization seed");
    };
    auto add_round_flags = [](CLI::App* cmd, nlg::PipelineOptions& opt, std::string& family) {
        cmd->add_option("--rank-tol", opt.rank_tol, "eigenvalue cutoff for vector recovery");
        cmd->add_option("--family", family, "anticommuting family: paper or compact")
            ->check(CLI::IsMember({"paper", "compact"}));
        cmd->add_option("--dim-cap", opt.dim_cap, "measurement dimension cap");
    };

    // report
    auto* report = app.add_subcommand("report", "full pipeline, bound sandwich report");
    report->add_option("game", ra.game_path, "game JSON file (or a directory with --batch)")
        ->required();
    report->add_flag("--uniform", ra.opt.uniform, "uniform binary relaxation and projective rounding (k=2)");
    report->add_flag("--skip-classical", ra.opt.skip_classical, "skip the classical enumeration");
    add_solver_flags(report, ra.opt);
    add_round_flags(report, ra.opt, ra.family_name);
    report->add_option("-o,--out", ra.out_path, "write the report here instead of stdout");
    report->add_flag_callback("--batch", [&] {}, "treat <game> as a directory of game files");
    report->add_option("--iter-log", ra.iter_log_path, "solver iteration CSV");
    report->add_option("--dump-sdp", ra.dump_sdp_path, "constraint triplet dump");
    report->add_option("--dump-vectors", ra.dump_vectors_path, "recovered vector CSV");

    // classical
    std::string cl_game, cl_out;
    double cl_cap = 1e7;
    auto* classical = app.add_subcommand("classical", "exhaustive classical value");
    classical->add_option("game", cl_game)->required();
    classical->add_option("--cap", cl_cap, "strategy-pair enumeration cap");
    classical->add_option("-o,--out", cl_out);

    // solve
    std::string so_game, so_out, so_iter_log, so_dump;
    nlg::PipelineOptions so_opt;
    auto* solve = app.add_subcommand("solve", "build and solve the relaxation");
    solve->add_option("game", so_game)->required();
    solve->add_flag("--uniform", so_opt.uniform, "add uniform-marginal constraints (k=2)");
    add_solver_flags(solve, so_opt);
    solve->add_option("-o,--out", so_out);
    solve->add_option("--iter-log", so_iter_log);
    solve->add_option("--dump-sdp", so_dump);

    // round
    std::string ro_game, ro_solution, ro_out, ro_dump_vectors, ro_family = "compact";
    nlg::PipelineOptions ro_opt;
    ro_opt.dim_cap = default_dim_cap();
    auto* round = app.add_subcommand("round", "extract measurement operators from a solution");
    round->add_option("game", ro_game)->required();
    round->add_option("--solution", ro_solution, "solve-stage artifact")->required();
    add_round_flags(round, ro_opt, ro_family);
    round->add_option("-o,--out", ro_out);
    round->add_option("--dump-vectors", ro_dump_vectors);

    // eval
    std::string ev_game, ev_strategy, ev_out;
    auto* eval = app.add_subcommand("eval", "evaluate a strategy file on a game");
    eval->add_option("game", ev_game)->required();
    eval->add_option("--strategy", ev_strategy)->required();
    eval->add_option("-o,--out", ev_out);

    auto* selftest = app.add_subcommand("selftest", "constants oracle and family invariants");
    (void)selftest;

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            ra.opt.family = nlg::family_mode_from_string(ra.family_name);
            if (report->count("--batch")) ra.batch_dir = ra.game_path;
            return run_report(ra);
        }
        if (classical->parsed()) {
            const nlg::Game g = nlg::load_game(cl_game);
            const nlg::ClassicalResult cr = nlg::classical_value(g, cl_cap);
            nlohmann::ordered_json j;
            j["game_name"] = g.name;
            j["omega_c"] = cr.value;
            j["best_alice"] = cr.best_alice;
            j["best_bob"] = cr.best_bob;
            write_or_print(j, cl_out);
            return 0;
        }
        if (solve->parsed()) {
            const nlg::Game g = nlg::load_game(so_game);
            const nlg::SdpProblem p = nlg::build_sdp(g, so_opt.uniform);
            if (!so_dump.empty()) {
                std::ofstream dump(so_dump);
                nlg::dump_sdp(p, dump);
            }
            nlg::SolverConfig cfg;
            cfg.max_iters = so_opt.max_iters;
            cfg.tol_primal = cfg.tol_dual = so_opt.tol;
            cfg.seed = so_opt.seed;
            std::ofstream iter_log;
            if (!so_iter_log.empty()) {
                iter_log.open(so_iter_log);
                iter_log << "iter,objective,primal_res,dual_res\n";
                cfg.iter_log = &iter_log;
            }
            auto [sol, status] = nlg::solve_sdp(p, cfg);
            write_or_print(nlg::solution_to_json(g.name, so_opt.uniform, sol, status), so_out);
            return status.converged ? 0 : kExitSolver;
        }
        if (round->parsed()) {
            const nlg::Game g = nlg::load_game(ro_game);
            auto [m, uniform] = nlg::solution_from_json(load_json(ro_solution, "solution"));
            const nlg::GramIndex idx(g);
            const nlg::VectorStrategy vs =
                nlg::recover_vector_strategy(idx, m, ro_opt.rank_tol);
            if (!ro_dump_vectors.empty()) dump_vectors_csv(vs, ro_dump_vectors);
            const nlg::AnticommutingFamily fam = nlg::build_family(
                vs.m_dim, nlg::family_mode_from_string(ro_family), ro_opt.dim_cap);
            const nlg::QuantumStrategy qs =
                uniform ? nlg::round_uniform_binary(vs, fam) : nlg::round_general(vs, fam);
            write_or_print(nlg::strategy_to_json(qs), ro_out);
            return 0;
        }
        if (eval->parsed()) {
            const nlg::Game g = nlg::load_game(ev_game);
            const nlg::QuantumStrategy qs =
                nlg::strategy_from_json(load_json(ev_strategy, "strategy"));
            const nlg::EvalReport rep = nlg::evaluate(g, qs);
            write_or_print(nlg::eval_to_json(rep, g.s_size, g.t_size), ev_out);
            return 0;
        }
        if (selftest->parsed()) return run_selftest();
    } catch (const nlg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlg::DimensionCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDimCap;
    } catch (const nlg::SolverDiverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
