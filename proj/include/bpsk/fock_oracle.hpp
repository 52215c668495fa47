#pragma once

// Brute-force truncated number-basis oracle. Everything here is deliberately independent of
// the phase-space formulas: states are amplitude vectors, operators are matrix exponentials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "bpsk/errors.hpp"

namespace bpsk::fock {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Extra levels used when exponentiating generators; the result is cut back to `dim`.
inline constexpr int kPad = 20;
inline constexpr int kMaxDim = 512;
inline constexpr double kTailTolerance = 1e-10;

struct FockVector {
    CVector amps;
    int dim = 0;
    double tail_bound = 0.0; ///< 1 - sum |c_m|^2
    bool tail_warning = false;

    double norm_sq() const { return amps.squaredNorm(); }
};

enum class OperatorKind { unitary, povm_element, generic };

struct FockOperator {
    CMatrix mat;
    int dim = 0;
    OperatorKind kind = OperatorKind::generic;

    /// max |(U^dag U - I)_{ij}| over i, j < interior.
    double unitarity_defect(int interior) const {
        const CMatrix g = mat.adjoint() * mat;
        return (g - CMatrix::Identity(dim, dim)).topLeftCorner(interior, interior).cwiseAbs().maxCoeff();
    }

    double expectation(const CVector& psi) const { return psi.dot(mat * psi).real(); }
};

/// Coherent state with real amplitude, c_m = e^{-alpha^2/2} alpha^m / sqrt(m!).
inline FockVector coherent_vector(double alpha, int dim, double tail_tolerance = kTailTolerance) {
    if (dim < 1) throw InvalidInput(fmt::format("dimension must be >= 1, got {}", dim));
    FockVector v;
    v.dim = dim;
    v.amps = CVector::Zero(dim);
    double c = std::exp(-0.5 * alpha * alpha);
    v.amps(0) = c;
    for (int m = 1; m < dim; ++m) {
        c *= alpha / std::sqrt(static_cast<double>(m));
        v.amps(m) = c;
    }
    v.tail_bound = 1.0 - v.norm_sq();
    v.tail_warning = v.tail_bound > tail_tolerance;
    return v;
}

/// Annihilation operator on `dim` levels.
inline Eigen::MatrixXd annihilation(int dim) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int m = 1; m < dim; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
    return a;
}

namespace detail {

inline FockOperator exponentiate(const Eigen::MatrixXd& generator, int dim) {
    const Eigen::MatrixXd full = generator.exp();
    return {full.topLeftCorner(dim, dim).cast<Complex>(), dim, OperatorKind::unitary};
}

} // namespace detail

/// D(beta) = exp(beta (a^dag - a)) for real beta.
inline FockOperator displacement_matrix(double beta, int dim) {
    if (dim < 1) throw InvalidInput(fmt::format("dimension must be >= 1, got {}", dim));
    const Eigen::MatrixXd a = annihilation(dim + kPad);
    return detail::exponentiate(beta * (a.transpose() - a), dim);
}

/// S(r) = exp[r (a^2 - a^dag^2) / 2] for real r; r > 0 squeezes the x quadrature.
inline FockOperator squeeze_matrix(double r, int dim) {
    if (std::abs(r) > 2.0) throw InvalidInput(fmt::format("squeezing |r| <= 2 required by the oracle, got {}", r));
    if (dim < 4) throw InvalidInput(fmt::format("squeeze oracle needs dim >= 4, got {}", dim));
    const Eigen::MatrixXd a = annihilation(dim + kPad);
    const Eigen::MatrixXd a2 = a * a;
    return detail::exponentiate(0.5 * r * (a2 - a2.transpose()), dim);
}

/// No-click element e^{-nu} sum_m (1 - eta)^m |m><m|.
inline FockOperator off_operator(double eta, double nu, int dim) {
    if (!(eta >= 0.0 && eta <= 1.0) || !(nu >= 0.0)) {
        throw InvalidInput(fmt::format("need eta in [0,1] and nu >= 0 (eta={}, nu={})", eta, nu));
    }
    if (dim < 1) throw InvalidInput(fmt::format("dimension must be >= 1, got {}", dim));
    CVector diag(dim);
    double w = std::exp(-nu);
    for (int m = 0; m < dim; ++m) {
        diag(m) = w;
        w *= 1.0 - eta;
    }
    return {diag.asDiagonal(), dim, OperatorKind::povm_element};
}

inline FockOperator on_operator(double eta, double nu, int dim) {
    FockOperator off = off_operator(eta, nu, dim);
    off.mat = CMatrix::Identity(dim, dim) - off.mat;
    return off;
}

struct FockReceiverEstimate {
    double p_error = 0.0;
    int dim = 0;
    double tail_plus = 0.0;  ///< probability leaked out of the basis by U|+alpha>
    double tail_minus = 0.0;
};

/// 1/2 (<alpha|U^dag Pi_off U|alpha> + <-alpha|U^dag Pi_on U|-alpha>) with U = D(beta) S(r)
/// (squeeze first), in a fixed truncation.
inline FockReceiverEstimate receiver_error_fock_fixed(double alpha, double beta, double r, double eta, double nu,
                                                      int dim) {
    const FockOperator squeeze = squeeze_matrix(r, dim);
    const FockOperator displace = displacement_matrix(beta, dim);
    const FockOperator off = off_operator(eta, nu, dim);
    FockReceiverEstimate est;
    est.dim = dim;
    double p_off[2];
    double tail[2];
    for (int k = 0; k < 2; ++k) {
        const double sign = k == 0 ? 1.0 : -1.0;
        const CVector psi = displace.mat * (squeeze.mat * coherent_vector(sign * alpha, dim).amps);
        p_off[k] = off.expectation(psi);
        tail[k] = 1.0 - psi.squaredNorm();
    }
    // Pi_on = I - Pi_off on the retained block
    est.p_error = 0.5 * (p_off[0] + (1.0 - tail[1] - p_off[1]));
    est.tail_plus = tail[0];
    est.tail_minus = tail[1];
    return est;
}

/// Initial truncation ceil(8 (alpha + |beta| + 1)^2 e^{2|r|}), capped at 512.
inline int adaptive_start_dim(double alpha, double beta, double r) {
    const double n = 8.0 * std::pow(std::abs(alpha) + std::abs(beta) + 1.0, 2) * std::exp(2.0 * std::abs(r));
    return static_cast<int>(std::min<double>(std::ceil(n), kMaxDim));
}

/// Receiver error with adaptive truncation: the dimension doubles (up to 512) until both
/// branches leak less than 1e-10 and the estimate moves by less than 1e-10.
inline FockReceiverEstimate receiver_error_fock(double alpha, double beta, double r, double eta, double nu) {
    int dim = adaptive_start_dim(alpha, beta, r);
    std::optional<FockReceiverEstimate> previous;
    while (true) {
        const FockReceiverEstimate est = receiver_error_fock_fixed(alpha, beta, r, eta, nu, dim);
        const bool tails_ok = std::abs(est.tail_plus) < kTailTolerance && std::abs(est.tail_minus) < kTailTolerance;
        const bool settled = previous && std::abs(est.p_error - previous->p_error) < kTailTolerance;
        if (tails_ok && (settled || dim == kMaxDim)) return est;
        if (dim == kMaxDim) {
            throw TruncationError(fmt::format("tail {:.3e} above {:.0e} at the dimension cap {}",
                                              std::max(est.tail_plus, est.tail_minus), kTailTolerance, kMaxDim),
                                  dim, std::max(est.tail_plus, est.tail_minus));
        }
        previous = est;
        dim = std::min(2 * dim, kMaxDim);
    }
}

} // namespace bpsk::fock
