#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include <fmt/format.h>

#include "bpsk/closed_forms.hpp"
#include "bpsk/errors.hpp"
#include "bpsk/gaussian_algebra.hpp"
#include "bpsk/optimizer.hpp"
#include "bpsk/types.hpp"

namespace bpsk::receivers {

enum class ReceiverTag {
    helstrom,
    homodyne,
    homodyne_tau, ///< homodyne after the transmittance tau
    kennedy,      ///< displacement sqrt(tau) alpha (nulls the attenuated signal)
    kennedy_raw,  ///< displacement alpha
    type1,
    type2,
    type2_imperfect,
};

inline constexpr std::array<ReceiverTag, 8> kAllReceivers{
    ReceiverTag::helstrom, ReceiverTag::homodyne,  ReceiverTag::homodyne_tau, ReceiverTag::kennedy,
    ReceiverTag::kennedy_raw, ReceiverTag::type1, ReceiverTag::type2,       ReceiverTag::type2_imperfect};

inline std::string_view to_string(ReceiverTag tag) {
    switch (tag) {
    case ReceiverTag::helstrom: return "helstrom";
    case ReceiverTag::homodyne: return "homodyne";
    case ReceiverTag::homodyne_tau: return "homodyne_tau";
    case ReceiverTag::kennedy: return "kennedy";
    case ReceiverTag::kennedy_raw: return "kennedy_raw";
    case ReceiverTag::type1: return "type1";
    case ReceiverTag::type2: return "type2";
    case ReceiverTag::type2_imperfect: return "type2_imperfect";
    }
    return "unknown";
}

inline std::optional<ReceiverTag> parse_receiver(std::string_view name) {
    for (ReceiverTag tag : kAllReceivers) {
        if (to_string(tag) == name) return tag;
    }
    return std::nullopt;
}

enum class Provenance { analytic, fock, montecarlo };

inline std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::fock: return "fock";
    case Provenance::montecarlo: return "montecarlo";
    }
    return "unknown";
}

inline std::optional<Provenance> parse_provenance(std::string_view name) {
    for (Provenance p : {Provenance::analytic, Provenance::fock, Provenance::montecarlo}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

struct ReceiverResult {
    ReceiverTag receiver = ReceiverTag::helstrom;
    double p_error = 0.5;
    std::optional<double> beta_opt;
    std::optional<double> r_opt;
    std::optional<double> gamma_opt;
    Provenance provenance = Provenance::analytic;
    DetectorModel detector{};
};

namespace detail {

inline ReceiverResult make_result(ReceiverTag tag, double p_error, const DetectorModel& det) {
    ReceiverResult out;
    out.receiver = tag;
    out.p_error = p_error;
    out.detector = det;
    return out;
}

inline void require_equal_priors(const BinaryEnsemble& ensemble, std::string_view receiver) {
    ensemble.validate();
    if (!ensemble.has_equal_priors()) {
        throw UnsupportedConfiguration(
            fmt::format("{} is only defined for equal priors (got p+={}, p-={})", receiver, ensemble.p_plus, ensemble.p_minus));
    }
}

inline void require_lossless_interference(const DetectorModel& det, std::string_view receiver) {
    det.validate();
    if (!det.lossless_interference()) {
        throw UnsupportedConfiguration(fmt::format("{} assumes tau = xi = 1 (got tau={}, xi={})", receiver, det.tau, det.xi));
    }
}

inline void require_efficiency(const DetectorModel& det, std::string_view receiver) {
    if (!(det.eta > 0.0)) throw InvalidInput(fmt::format("{} needs eta > 0", receiver));
}

} // namespace detail

/// Minimum error over all quantum measurements.
inline double helstrom(const BinaryEnsemble& ensemble) {
    detail::require_equal_priors(ensemble, "helstrom");
    return closed_forms::helstrom_bound(ensemble.alpha);
}

/// Ideal x-homodyne with Bayes decision; equal priors reduce to 1/2 erfc(sqrt2 alpha).
inline double homodyne_limit(const BinaryEnsemble& ensemble) {
    ensemble.validate();
    if (ensemble.has_equal_priors()) return closed_forms::homodyne_error(ensemble.alpha);
    return gaussian::bayes_error_from_separation(ensemble, 1.0);
}

inline double homodyne_attenuated(const BinaryEnsemble& ensemble, const DetectorModel& det) {
    det.validate();
    BinaryEnsemble attenuated = ensemble;
    attenuated.alpha *= std::sqrt(det.tau);
    return homodyne_limit(attenuated);
}

inline double mean_intensity(int sign, const BinaryEnsemble& ensemble, double beta, const DetectorModel& det) {
    if (sign != 1 && sign != -1) throw InvalidInput("sign must be +1 or -1");
    det.validate();
    return closed_forms::mean_intensity(sign, ensemble.alpha, beta, det.tau, det.xi);
}

/// Kennedy receiver: displace by the (attenuated) signal amplitude sqrt(tau) alpha, no optimisation.
inline ReceiverResult kennedy_error(const BinaryEnsemble& ensemble, const DetectorModel& det) {
    detail::require_equal_priors(ensemble, "kennedy");
    det.validate();
    const double gamma = std::sqrt(det.tau) * ensemble.alpha;
    ReceiverResult out = detail::make_result(ReceiverTag::kennedy, closed_forms::displacement_error(ensemble.alpha, gamma, det), det);
    out.gamma_opt = gamma;
    return out;
}

/// Kennedy receiver that ignores the transmittance: displacement alpha.
inline ReceiverResult kennedy_raw_error(const BinaryEnsemble& ensemble, const DetectorModel& det) {
    detail::require_equal_priors(ensemble, "kennedy_raw");
    det.validate();
    ReceiverResult out = detail::make_result(ReceiverTag::kennedy_raw, closed_forms::displacement_error(ensemble.alpha, ensemble.alpha, det), det);
    out.gamma_opt = ensemble.alpha;
    return out;
}

/// Optimised displacement receiver.
inline ReceiverResult type2_error(const BinaryEnsemble& ensemble, const DetectorModel& det) {
    detail::require_equal_priors(ensemble, "type2");
    detail::require_lossless_interference(det, "type2");
    detail::require_efficiency(det, "type2");
    const double gamma = optimizer::solve_type2_gamma(ensemble.alpha, det.eta).value;
    ReceiverResult out = detail::make_result(ReceiverTag::type2, closed_forms::displacement_error(ensemble.alpha, gamma, det), det);
    out.gamma_opt = gamma;
    return out;
}

/// Optimised squeeze + displace receiver. beta_opt and r_opt are reported in the
/// parameterization of closed_forms::type1_objective.
inline ReceiverResult type1_error(const BinaryEnsemble& ensemble, const DetectorModel& det) {
    detail::require_equal_priors(ensemble, "type1");
    detail::require_lossless_interference(det, "type1");
    detail::require_efficiency(det, "type1");
    ReceiverResult out = detail::make_result(ReceiverTag::type1, 0.5, det);
    if (ensemble.alpha == 0.0) return out;
    const auto sol = optimizer::solve_type1_params(ensemble.alpha, det.eta);
    out.p_error = closed_forms::type1_objective(ensemble.alpha, sol.beta, sol.r, det.eta, det.nu);
    out.beta_opt = sol.beta;
    out.r_opt = sol.r;
    return out;
}

/// Optimised displacement receiver with transmittance and mode mismatch.
inline ReceiverResult type2_imperfect_error(const BinaryEnsemble& ensemble, const DetectorModel& det,
                                            optimizer::ImperfectCondition form = optimizer::ImperfectCondition::stationary) {
    detail::require_equal_priors(ensemble, "type2_imperfect");
    det.validate();
    if (!(det.eta > 0.0 && det.xi > 0.0 && det.tau > 0.0)) {
        throw InvalidInput("type2_imperfect needs eta, xi, tau > 0");
    }
    const double gamma = optimizer::solve_type2_gamma_imperfect(ensemble.alpha, det, form).value;
    ReceiverResult out = detail::make_result(ReceiverTag::type2_imperfect, closed_forms::displacement_error(ensemble.alpha, gamma, det), det);
    out.gamma_opt = gamma;
    return out;
}

/// Dispatch by tag.
inline ReceiverResult evaluate(ReceiverTag tag, const BinaryEnsemble& ensemble, const DetectorModel& det) {
    switch (tag) {
    case ReceiverTag::helstrom: return detail::make_result(tag, helstrom(ensemble), det);
    case ReceiverTag::homodyne: return detail::make_result(tag, homodyne_limit(ensemble), det);
    case ReceiverTag::homodyne_tau: return detail::make_result(tag, homodyne_attenuated(ensemble, det), det);
    case ReceiverTag::kennedy: return kennedy_error(ensemble, det);
    case ReceiverTag::kennedy_raw: return kennedy_raw_error(ensemble, det);
    case ReceiverTag::type1: return type1_error(ensemble, det);
    case ReceiverTag::type2: return type2_error(ensemble, det);
    case ReceiverTag::type2_imperfect: return type2_imperfect_error(ensemble, det);
    }
    throw InvalidInput("unknown receiver tag");
}

} // namespace bpsk::receivers
