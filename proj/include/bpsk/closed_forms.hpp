#pragma once

// Closed-form error probabilities for equal-prior BPSK receivers.
//
// Click receivers decide "+" on a click and "-" on no click; the displacement is oriented so
// that the -alpha branch is (nearly) nulled. Error = 1/2 [P_off(+) + 1 - P_off(-)], evaluated
// with expm1 so that values far below machine epsilon keep their relative precision.

#include <cmath>
#include <numbers>

#include "bpsk/types.hpp"

namespace bpsk::closed_forms {

/// (1 - sqrt(1 - e^{-4 alpha^2})) / 2, written without cancellation.
inline double helstrom_bound(double alpha) {
    const double x = std::exp(-4.0 * alpha * alpha);
    return 0.5 * x / (1.0 + std::sqrt(1.0 - x));
}

inline double homodyne_error(double alpha) { return 0.5 * std::erfc(std::numbers::sqrt2 * alpha); }

/// Error of an on/off decision given the log no-click probabilities of the bright (+) and
/// nulled (-) branches.
inline double click_error_from_log_off(double log_off_plus, double log_off_minus) {
    return 0.5 * (std::exp(log_off_plus) - std::expm1(log_off_minus));
}

/// Mean photon number reaching the detector after interfering the signal (+-alpha, through
/// transmittance tau) with the local oscillator that contributes displacement beta, with a
/// fraction 1 - xi of the light mode-mismatched and adding incoherently.
inline double mean_intensity(int sign, double alpha, double beta, double tau, double xi) {
    const double coherent = sign * std::sqrt(tau) * alpha + beta;
    return (1.0 - xi) * (tau * alpha * alpha + beta * beta) + xi * coherent * coherent;
}

/// Displacement receiver with imperfect interference, for any displacement gamma:
///   1/2 - e^{-nu - eta (tau alpha^2 + gamma^2)} sinh(2 eta xi sqrt(tau) alpha gamma).
/// With tau = xi = 1 this is the ideal displacement receiver; gamma = alpha is Kennedy's.
inline double displacement_error(double alpha, double gamma, const DetectorModel& det) {
    const double i_plus = mean_intensity(+1, alpha, gamma, det.tau, det.xi);
    const double i_minus = mean_intensity(-1, alpha, gamma, det.tau, det.xi);
    return click_error_from_log_off(-det.nu - det.eta * i_plus, -det.nu - det.eta * i_minus);
}

namespace detail {

/// log of e^{-nu} 2 / sqrt(c_+ c_-) with c_+ c_- = 4 (1 + eta (2 - eta) sinh^2 r); never positive.
inline double log_vacuum_overlap(double r, double eta, double nu) {
    const double s = std::sinh(r);
    return -nu - 0.5 * std::log1p(eta * (2.0 - eta) * s * s);
}

} // namespace detail

/// Squeeze-then-displace receiver in the optimizer's parameterization (beta, r):
///   P = 1/2 - 2 e^{-nu} / sqrt(c_+ c_-) exp(-2 eta (alpha^2 + beta^2) / c_-) sinh(4 eta alpha beta / c_-),
///   c_+- = eta + (2 - eta) e^{+-2r}.
/// See `to_operator_parameters` for the corresponding physical displacement and squeezing.
inline double type1_objective(double alpha, double beta, double r, double eta, double nu) {
    const double c_minus = eta + (2.0 - eta) * std::exp(-2.0 * r);
    const double log_norm = detail::log_vacuum_overlap(r, eta, nu);
    const double bright = (alpha + beta) * (alpha + beta);
    const double dark = (alpha - beta) * (alpha - beta);
    return click_error_from_log_off(log_norm - 2.0 * eta * bright / c_minus, log_norm - 2.0 * eta * dark / c_minus);
}

/// Error of U = D(beta) S(r) (squeeze first, then displace) followed by the on/off detector,
/// with S(r) = exp[r (a^2 - a^dag^2) / 2] squeezing the x quadrature for r > 0.
///
/// U|s alpha> is Gaussian with covariance diag(e^{-2r}, e^{2r}) and x-displacement
/// sqrt2 (s alpha e^{-r} + beta). The no-click element e^{-nu} (1-eta)^n is the vacuum
/// projector after loss eta, so
///   P_off(s) = e^{-nu} 2 / sqrt(det(eta cov + (2 - eta) I)) exp(-2 eta (s alpha e^{-r} + beta)^2 / (eta e^{-2r} + 2 - eta)).
inline double displaced_squeezed_error(double alpha, double beta, double r, double eta, double nu) {
    const double vx = eta * std::exp(-2.0 * r) + 2.0 - eta;
    const double log_norm = detail::log_vacuum_overlap(r, eta, nu);
    const double bright = alpha * std::exp(-r) + beta;
    const double dark = -alpha * std::exp(-r) + beta;
    return click_error_from_log_off(log_norm - 2.0 * eta * bright * bright / vx,
                                    log_norm - 2.0 * eta * dark * dark / vx);
}

struct OperatorParameters {
    double displacement; // beta of D(beta), applied after squeezing
    double squeezing;    // r of S(r)
};

/// type1_objective(alpha, beta, r, ...) == displaced_squeezed_error(alpha, beta e^{r}, -r, ...).
inline OperatorParameters to_operator_parameters(double beta, double r) { return {beta * std::exp(r), -r}; }

} // namespace bpsk::closed_forms
