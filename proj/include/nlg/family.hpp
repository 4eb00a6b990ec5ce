#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlg {

/// Raised when the measurement dimension would exceed the configured cap.
/// The CLI maps it to exit code 4.
struct DimensionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FamilyMode {
    paper,    // sigma_i = Z^(i-1) (x) X (x) I..., one qubit per generator, d = 2^m
    compact,  // Jordan-Wigner pairing with X and Y per qubit, d = 2^ceil(m/2)
};

inline const char* to_string(FamilyMode mode) {
    return mode == FamilyMode::paper ? "paper" : "compact";
}

inline FamilyMode family_mode_from_string(const std::string& s) {
    if (s == "paper") return FamilyMode::paper;
    if (s == "compact") return FamilyMode::compact;
    throw std::invalid_argument("unknown family mode: " + s);
}

/// Hermitian d x d matrices sigma_1..sigma_m with sigma_i^2 = I, Tr sigma_i = 0
/// and sigma_i sigma_j = -sigma_j sigma_i for i != j. sigma_0 = I is implicit.
struct AnticommutingFamily {
    int m = 0;
    int d = 1;
    std::vector<Eigen::MatrixXcd> sigmas;
};

namespace detail {

inline Eigen::MatrixXcd pauli(char which) {
    Eigen::MatrixXcd p(2, 2);
    const std::complex<double> i(0.0, 1.0);
    switch (which) {
        case 'x': p << 0, 1, 1, 0; break;
        case 'y': p << 0, -i, i, 0; break;
        case 'z': p << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: unknown label");
    }
    return p;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// tensor word over {I,X,Y,Z}, one letter per qubit
inline Eigen::MatrixXcd pauli_word(const std::string& word) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (char c : word)
        out = kron(out, c == 'i' ? Eigen::MatrixXcd::Identity(2, 2).eval() : pauli(c));
    return out;
}

}  // namespace detail

/// Builds m pairwise-anticommuting Hermitian involutions. The compact mode
/// packs two generators per qubit, halving the exponent of the dimension.
inline AnticommutingFamily build_family(int m, FamilyMode mode = FamilyMode::compact,
                                        int dim_cap = 4096) {
    if (m < 0) throw std::invalid_argument("build_family: m must be >= 0");
    const int qubits = (mode == FamilyMode::paper) ? m : (m + 1) / 2;
    if (qubits > 30 || (1 << qubits) > dim_cap) {
        std::string msg = "build_family: required dimension 2^" + std::to_string(qubits) +
                          " exceeds cap " + std::to_string(dim_cap);
        if (mode == FamilyMode::paper)
            msg += " (compact mode needs only 2^" + std::to_string((m + 1) / 2) + ")";
        msg += "; a larger rank tolerance reduces the number of generators";
        throw DimensionCapError(msg);
    }

    AnticommutingFamily fam;
    fam.m = m;
    fam.d = 1 << qubits;
    fam.sigmas.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::string word(static_cast<std::size_t>(qubits), 'i');
        if (mode == FamilyMode::paper) {
            for (int q = 0; q < i; ++q) word[static_cast<std::size_t>(q)] = 'z';
            word[static_cast<std::size_t>(i)] = 'x';
        } else {
            const int site = i / 2;
            for (int q = 0; q < site; ++q) word[static_cast<std::size_t>(q)] = 'z';
            word[static_cast<std::size_t>(site)] = (i % 2 == 0) ? 'x' : 'y';
        }
        fam.sigmas.push_back(detail::pauli_word(word));
    }
    return fam;
}

/// Invariant check used by tests and `nlg selftest`.
inline std::vector<std::string> family_violations(const AnticommutingFamily& fam,
                                                  double tol = 1e-12) {
    std::vector<std::string> out;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(fam.d, fam.d);
    if (static_cast<int>(fam.sigmas.size()) != fam.m) {
        out.push_back("generator count does not match m");
        return out;
    }
    for (int i = 0; i < fam.m; ++i) {
        const auto& s = fam.sigmas[static_cast<std::size_t>(i)];
        if (s.rows() != fam.d || s.cols() != fam.d) {
            out.push_back("generator " + std::to_string(i) + " has wrong shape");
            continue;
        }
        if ((s - s.adjoint()).cwiseAbs().maxCoeff() > tol)
            out.push_back("generator " + std::to_string(i) + " not Hermitian");
        if ((s * s - id).cwiseAbs().maxCoeff() > tol)
            out.push_back("generator " + std::to_string(i) + " not an involution");
        if (std::abs(s.trace()) > tol)
            out.push_back("generator " + std::to_string(i) + " not traceless");
        for (int j = i + 1; j < fam.m; ++j) {
            const auto& t = fam.sigmas[static_cast<std::size_t>(j)];
            if ((s * t + t * s).cwiseAbs().maxCoeff() > tol)
                out.push_back("generators " + std::to_string(i) + "," + std::to_string(j) +
                              " do not anticommute");
        }
    }
    return out;
}

}  // namespace nlg
