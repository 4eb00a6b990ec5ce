#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace nlg {

/// Raised for malformed game/strategy/solution files. The CLI maps it to exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two-player one-round game: questions (s,t) drawn from pi, answers a,b in
/// {0,...,k-1}, won iff the predicate v(a,b|s,t) is 1.
struct Game {
    std::string name;
    int s_size = 0;
    int t_size = 0;
    int k = 0;
    Eigen::MatrixXd pi;      // s_size x t_size question distribution
    std::vector<int> v;      // predicate tensor, [s][t][a][b] row-major

    std::size_t v_index(int s, int t, int a, int b) const {
        return ((static_cast<std::size_t>(s) * t_size + t) * k + a) * k + b;
    }
    int v_at(int s, int t, int a, int b) const { return v[v_index(s, t, a, b)]; }
    bool wins(int s, int t, int a, int b) const { return v_at(s, t, a, b) == 1; }
};

/// Deterministic classical optimum: best answer functions and their winning probability.
struct ClassicalResult {
    double value = 0.0;
    std::vector<int> best_alice;  // S -> A
    std::vector<int> best_bob;    // T -> B
};

inline std::vector<std::string> validate_game(const Game& g) {
    std::vector<std::string> violations;
    if (g.s_size < 1) violations.push_back("s_size must be >= 1");
    if (g.t_size < 1) violations.push_back("t_size must be >= 1");
    if (g.k < 2) violations.push_back("k must be >= 2");
    if (!violations.empty()) return violations;

    if (g.pi.rows() != g.s_size || g.pi.cols() != g.t_size) {
        violations.push_back("pi shape does not match (s_size, t_size)");
        return violations;
    }
    double sum = 0.0;
    bool negative = false;
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t) {
            if (g.pi(s, t) < 0.0 || !std::isfinite(g.pi(s, t))) negative = true;
            sum += g.pi(s, t);
        }
    if (negative) violations.push_back("distribution has negative or non-finite entries");
    if (std::abs(sum - 1.0) > 1e-12) violations.push_back("distribution not normalized");

    const std::size_t expect =
        static_cast<std::size_t>(g.s_size) * g.t_size * g.k * g.k;
    if (g.v.size() != expect) {
        violations.push_back("predicate tensor size does not match (s_size, t_size, k, k)");
        return violations;
    }
    for (int x : g.v)
        if (x != 0 && x != 1) {
            violations.push_back("predicate not boolean");
            break;
        }
    return violations;
}

inline double winning_probability(const Game& g, const std::vector<int>& alice,
                                  const std::vector<int>& bob) {
    double p = 0.0;
    for (int s = 0; s < g.s_size; ++s)
        for (int t = 0; t < g.t_size; ++t)
            p += g.pi(s, t) * g.v_at(s, t, alice[static_cast<std::size_t>(s)],
                                     bob[static_cast<std::size_t>(t)]);
    return p;
}

/// Number of deterministic strategy pairs, k^|S| * k^|T|, as a double so that
/// oversized games report a count instead of overflowing.
inline double classical_pair_count(const Game& g) {
    return std::pow(double(g.k), g.s_size) * std::pow(double(g.k), g.t_size);
}

/// Exhaustive classical value. Enumerates Alice's k^|S| answer functions; for
/// each, Bob's optimum decomposes per question, so his side is a best response
/// rather than a second enumeration. The result equals the full pairwise max.
inline ClassicalResult classical_value(const Game& g, double pair_cap = 1e7) {
    const double pairs = classical_pair_count(g);
    if (pairs > pair_cap) {
        std::ostringstream msg;
        msg << "classical_value: enumeration needs " << pairs
            << " strategy pairs, cap is " << pair_cap;
        throw std::runtime_error(msg.str());
    }

    ClassicalResult best;
    best.value = -1.0;
    std::vector<int> alice(static_cast<std::size_t>(g.s_size), 0);
    std::vector<int> bob(static_cast<std::size_t>(g.t_size), 0);
    while (true) {
        double total = 0.0;
        for (int t = 0; t < g.t_size; ++t) {
            double best_bt = -1.0;
            int best_b = 0;
            for (int b = 0; b < g.k; ++b) {
                double val = 0.0;
                for (int s = 0; s < g.s_size; ++s)
                    val += g.pi(s, t) * g.v_at(s, t, alice[static_cast<std::size_t>(s)], b);
                if (val > best_bt) {
                    best_bt = val;
                    best_b = b;
                }
            }
            bob[static_cast<std::size_t>(t)] = best_b;
            total += best_bt;
        }
        if (total > best.value) {
            best.value = total;
            best.best_alice = alice;
            best.best_bob = bob;
        }
        // odometer over Alice's answer functions
        int pos = 0;
        while (pos < g.s_size) {
            if (++alice[static_cast<std::size_t>(pos)] < g.k) break;
            alice[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == g.s_size) break;
    }
    return best;
}

/// Uniform pi, each predicate entry 1 with probability `density`. Uses an
/// explicit 53-bit mantissa draw so the output is identical for a given seed
/// on every platform.
inline Game random_game(int s_size, int t_size, int k, double density, std::uint64_t seed) {
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("random_game: density must be in [0,1]");
    Game g;
    {
        std::ostringstream nm;
        nm << "random_" << s_size << "x" << t_size << "_k" << k << "_seed" << seed;
        g.name = nm.str();
    }
    g.s_size = s_size;
    g.t_size = t_size;
    g.k = k;
    g.pi = Eigen::MatrixXd::Constant(s_size, t_size, 1.0 / (double(s_size) * t_size));
    g.v.assign(static_cast<std::size_t>(s_size) * t_size * k * k, 0);
    std::mt19937_64 rng(seed);
    for (auto& entry : g.v) {
        const double u = double(rng() >> 11) * 0x1.0p-53;
        entry = (u < density) ? 1 : 0;
    }
    return g;
}

// ---------------------------------------------------------------------------
// JSON game files
//
//   { "name": str, "s_size": int, "t_size": int, "k": int,
//     "pi": [[float; t_size]; s_size],
//     "v":  [[[[0|1; k]; k]; t_size]; s_size] }
//
// or, instead of "v", the compact winning list "winning": [[s,t,a,b], ...].
// ---------------------------------------------------------------------------

inline Game game_from_json(const nlohmann::json& j) {
    Game g;
    try {
        g.name = j.value("name", "unnamed");
        g.s_size = j.at("s_size").get<int>();
        g.t_size = j.at("t_size").get<int>();
        g.k = j.at("k").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("game file: ") + e.what());
    }
    if (g.s_size < 1 || g.t_size < 1 || g.k < 2)
        throw ParseError("game file: need s_size >= 1, t_size >= 1, k >= 2");

    const auto& pi = j.find("pi") != j.end() ? j.at("pi") : nlohmann::json();
    if (!pi.is_array() || static_cast<int>(pi.size()) != g.s_size)
        throw ParseError("game file: pi must be an s_size x t_size array");
    g.pi.resize(g.s_size, g.t_size);
    for (int s = 0; s < g.s_size; ++s) {
        const auto& row = pi.at(static_cast<std::size_t>(s));
        if (!row.is_array() || static_cast<int>(row.size()) != g.t_size)
            throw ParseError("game file: pi must be an s_size x t_size array");
        for (int t = 0; t < g.t_size; ++t) {
            const auto& cell = row.at(static_cast<std::size_t>(t));
            if (!cell.is_number()) throw ParseError("game file: pi entries must be numbers");
            g.pi(s, t) = cell.get<double>();
        }
    }

    const bool has_v = j.find("v") != j.end();
    const bool has_winning = j.find("winning") != j.end();
    if (has_v == has_winning)
        throw ParseError("game file: exactly one of \"v\" and \"winning\" is required");

    g.v.assign(static_cast<std::size_t>(g.s_size) * g.t_size * g.k * g.k, 0);
    if (has_v) {
        const auto& v = j.at("v");
        if (!v.is_array() || static_cast<int>(v.size()) != g.s_size)
            throw ParseError("game file: v must have shape [s_size][t_size][k][k]");
        for (int s = 0; s < g.s_size; ++s) {
            const auto& vs = v.at(static_cast<std::size_t>(s));
            if (!vs.is_array() || static_cast<int>(vs.size()) != g.t_size)
                throw ParseError("game file: v must have shape [s_size][t_size][k][k]");
            for (int t = 0; t < g.t_size; ++t) {
                const auto& vt = vs.at(static_cast<std::size_t>(t));
                if (!vt.is_array() || static_cast<int>(vt.size()) != g.k)
                    throw ParseError("game file: v must have shape [s_size][t_size][k][k]");
                for (int a = 0; a < g.k; ++a) {
                    const auto& va = vt.at(static_cast<std::size_t>(a));
                    if (!va.is_array() || static_cast<int>(va.size()) != g.k)
                        throw ParseError("game file: v must have shape [s_size][t_size][k][k]");
                    for (int b = 0; b < g.k; ++b) {
                        const auto& cell = va.at(static_cast<std::size_t>(b));
                        if (!cell.is_number_integer())
                            throw ParseError("game file: v entries must be integers");
                        g.v[g.v_index(s, t, a, b)] = cell.get<int>();
                    }
                }
            }
        }
    } else {
        for (const auto& quad : j.at("winning")) {
            if (!quad.is_array() || quad.size() != 4)
                throw ParseError("game file: winning entries must be [s,t,a,b]");
            const int s = quad.at(0).get<int>();
            const int t = quad.at(1).get<int>();
            const int a = quad.at(2).get<int>();
            const int b = quad.at(3).get<int>();
            if (s < 0 || s >= g.s_size || t < 0 || t >= g.t_size || a < 0 || a >= g.k ||
                b < 0 || b >= g.k)
                throw ParseError("game file: winning entry out of range");
            g.v[g.v_index(s, t, a, b)] = 1;
        }
    }
    return g;
}

inline nlohmann::ordered_json game_to_json(const Game& g) {
    nlohmann::ordered_json j;
    j["name"] = g.name;
    j["s_size"] = g.s_size;
    j["t_size"] = g.t_size;
    j["k"] = g.k;
    auto pi = nlohmann::ordered_json::array();
    for (int s = 0; s < g.s_size; ++s) {
        auto row = nlohmann::ordered_json::array();
        for (int t = 0; t < g.t_size; ++t) row.push_back(g.pi(s, t));
        pi.push_back(row);
    }
    j["pi"] = pi;
    auto v = nlohmann::ordered_json::array();
    for (int s = 0; s < g.s_size; ++s) {
        auto vs = nlohmann::ordered_json::array();
        for (int t = 0; t < g.t_size; ++t) {
            auto vt = nlohmann::ordered_json::array();
            for (int a = 0; a < g.k; ++a) {
                auto va = nlohmann::ordered_json::array();
                for (int b = 0; b < g.k; ++b) va.push_back(g.v_at(s, t, a, b));
                vt.push_back(va);
            }
            vs.push_back(vt);
        }
        v.push_back(vs);
    }
    j["v"] = v;
    return j;
}

inline Game load_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open game file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("game file: ") + e.what());
    }
    Game g = game_from_json(j);
    auto violations = validate_game(g);
    if (!violations.empty()) {
        std::string msg = "invalid game " + g.name + ":";
        for (const auto& viol : violations) msg += " [" + viol + "]";
        throw ParseError(msg);
    }
    return g;
}

}  // namespace nlg
