#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nlg {

/// Rounding guarantee for answer alphabets of size k: the extracted strategy
/// wins with probability at least c_k times the relaxation optimum.
inline double c_k_closed(int k) {
    if (k < 2) throw std::invalid_argument("c_k_closed: k must be >= 2");
    if (k == 2) return 4.0 / (3.0 + 2.0 * std::sqrt(2.0));
    return 1.0 / double(k - 1);
}

struct CkResult {
    int k = 0;
    double closed_form = 0.0;
    double numeric = 0.0;
    std::vector<double> argmin;  // k nonnegative entries summing to 1
};

namespace detail {

// per-coordinate scale factor of the POVM normalization
inline double scale_term(double u) {
    u = std::min(1.0, std::max(0.0, u));
    return std::max(u, std::sqrt(u * (1.0 - u)));
}

inline double scale_sum(const std::vector<double>& u) {
    double s = 0.0;
    for (double x : u) s += scale_term(x);
    return s;
}

// c_k objective: the squared reciprocal of the normalization sum
inline double ck_objective(const std::vector<double>& u) {
    const double s = scale_sum(u);
    return 1.0 / (s * s);
}

inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 int iters = 120) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Independent numeric check of c_k: minimizes 1/(sum_i max(u_i,
/// sqrt(u_i(1-u_i))))^2 over the probability simplex. Coarse simplex grid,
/// then pairwise-transfer descent, plus the two stationary shapes (all active
/// coordinates equal; one coordinate above 1/2, the rest equal) refined by
/// golden section. Test oracle only; runtime code uses the closed form.
inline CkResult c_k_numeric(int k, int grid = 40) {
    if (k < 2 || k > 6) throw std::invalid_argument("c_k_numeric: k must be in {2,...,6}");

    std::vector<double> best_u;
    double best_scale = -1.0;
    auto consider = [&](const std::vector<double>& u) {
        const double s = detail::scale_sum(u);
        if (s > best_scale) {
            best_scale = s;
            best_u = u;
        }
    };

    // coarse grid over compositions of `grid` units into k parts
    {
        std::vector<int> parts(static_cast<std::size_t>(k), 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == k - 1) {
                parts[static_cast<std::size_t>(pos)] = left;
                std::vector<double> u(static_cast<std::size_t>(k));
                for (int i = 0; i < k; ++i) u[static_cast<std::size_t>(i)] = double(parts[static_cast<std::size_t>(i)]) / grid;
                consider(u);
                return;
            }
            for (int take = 0; take <= left; ++take) {
                parts[static_cast<std::size_t>(pos)] = take;
                rec(pos + 1, left - take);
            }
        };
        rec(0, grid);
    }

    // stationary shapes: j equal active coordinates, optionally one dominant
    for (int j = 1; j <= k; ++j) {
        std::vector<double> u(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < j; ++i) u[static_cast<std::size_t>(i)] = 1.0 / j;
        consider(u);
    }
    for (int j = 1; j <= k - 1; ++j) {
        auto neg_scale = [&](double a) {
            std::vector<double> u(static_cast<std::size_t>(k), 0.0);
            u[0] = a;
            for (int i = 1; i <= j; ++i) u[static_cast<std::size_t>(i)] = (1.0 - a) / j;
            return -detail::scale_sum(u);
        };
        const double a = detail::golden_section_min(neg_scale, 0.5, 1.0);
        std::vector<double> u(static_cast<std::size_t>(k), 0.0);
        u[0] = a;
        for (int i = 1; i <= j; ++i) u[static_cast<std::size_t>(i)] = (1.0 - a) / j;
        consider(u);
    }

    // pairwise mass-transfer descent from the incumbent
    std::vector<double> u = best_u;
    for (int round = 0; round < 200; ++round) {
        double improved = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                auto neg_scale = [&](double delta) {
                    std::vector<double> trial = u;
                    trial[static_cast<std::size_t>(i)] += delta;
                    trial[static_cast<std::size_t>(j)] -= delta;
                    return -detail::scale_sum(trial);
                };
                const double hi = u[static_cast<std::size_t>(j)];
                const double lo = -u[static_cast<std::size_t>(i)];
                if (hi - lo < 1e-15) continue;
                const double delta = detail::golden_section_min(neg_scale, lo, hi);
                std::vector<double> trial = u;
                trial[static_cast<std::size_t>(i)] += delta;
                trial[static_cast<std::size_t>(j)] -= delta;
                const double gain = detail::scale_sum(trial) - detail::scale_sum(u);
                if (gain > 0.0) {
                    u = trial;
                    improved += gain;
                }
            }
        consider(u);
        if (improved < 1e-15) break;
    }

    // tidy the argmin: clamp dust, renormalize
    for (double& x : best_u) x = std::max(0.0, x);
    double sum = 0.0;
    for (double x : best_u) sum += x;
    for (double& x : best_u) x /= sum;

    CkResult out;
    out.k = k;
    out.closed_form = c_k_closed(k);
    out.numeric = detail::ck_objective(best_u);
    out.argmin = best_u;
    return out;
}

/// Worst per-question shrink factor for binary uniform-dominant coordinates:
/// min over alpha in [1/2, 1] of 1/(alpha + sqrt(alpha(1-alpha))). Equals
/// 2/(1+sqrt(2)); c_2 is its square.
inline double binary_scale_min() {
    auto f = [](double a) { return 1.0 / (a + std::sqrt(a * (1.0 - a))); };
    const double a = detail::golden_section_min(f, 0.5, 1.0);
    return f(a);
}

}  // namespace nlg
