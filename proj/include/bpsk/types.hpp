#pragma once

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "bpsk/errors.hpp"

namespace bpsk {

/// The discrimination problem: signals |+alpha>, |-alpha> (alpha real) with priors.
struct BinaryEnsemble {
    double alpha = 0.0;
    double p_plus = 0.5;
    double p_minus = 0.5;

    static BinaryEnsemble equal_priors(double alpha) { return {alpha, 0.5, 0.5}; }

    static BinaryEnsemble from_alpha_sq(double alpha_sq) { return equal_priors(std::sqrt(alpha_sq)); }

    double alpha_sq() const { return alpha * alpha; }

    bool has_equal_priors() const { return std::abs(p_plus - p_minus) <= 1e-12; }

    void validate() const {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
            throw InvalidInput(fmt::format("signal amplitude must be finite and >= 0, got {}", alpha));
        }
        if (!(p_plus >= 0.0 && p_plus <= 1.0 && p_minus >= 0.0 && p_minus <= 1.0)) {
            throw InvalidInput(fmt::format("priors must lie in [0,1], got ({}, {})", p_plus, p_minus));
        }
        if (std::abs(p_plus + p_minus - 1.0) > 1e-12) {
            throw InvalidInput(fmt::format("priors must sum to 1, got {} + {}", p_plus, p_minus));
        }
    }
};

/// On/off detector and interference imperfections.
///   eta: quantum efficiency, nu: mean dark counts per pulse,
///   tau: transmittance of the displacement beamsplitter, xi: signal/LO mode overlap.
struct DetectorModel {
    double eta = 1.0;
    double nu = 0.0;
    double tau = 1.0;
    double xi = 1.0;

    static DetectorModel ideal() { return {}; }

    /// Practical operating point used for the imperfect-receiver comparison.
    static DetectorModel practical() { return {0.9, 1e-3, 0.99, 0.995}; }

    bool lossless_interference() const { return tau == 1.0 && xi == 1.0; }

    void validate() const {
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!unit(eta) || !unit(tau) || !unit(xi)) {
            throw InvalidInput(fmt::format("eta, tau, xi must lie in [0,1], got eta={} tau={} xi={}", eta, tau, xi));
        }
        if (!(nu >= 0.0) || !std::isfinite(nu)) {
            throw InvalidInput(fmt::format("dark counts must be finite and >= 0, got {}", nu));
        }
    }
};

} // namespace bpsk
