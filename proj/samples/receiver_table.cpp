// Error probability of each receiver at a few signal strengths, ideal and practical detector.

#include <iostream>

#include <fmt/format.h>

#include "bpsk/bpsk.hpp"

int main() {
    using namespace bpsk;
    using receivers::ReceiverTag;

    const double alpha_sq[] = {0.1, 0.5, 1.0, 2.0};

    fmt::print("ideal detector\n{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "alpha^2", "helstrom", "type1", "type2",
               "kennedy", "homodyne");
    for (double a2 : alpha_sq) {
        const auto ens = BinaryEnsemble::from_alpha_sq(a2);
        const auto det = DetectorModel::ideal();
        fmt::print("{:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}\n", a2, receivers::helstrom(ens),
                   receivers::type1_error(ens, det).p_error, receivers::type2_error(ens, det).p_error,
                   receivers::kennedy_error(ens, det).p_error, receivers::homodyne_limit(ens));
    }

    const auto practical = DetectorModel::practical();
    fmt::print("\npractical detector (eta={}, nu={}, tau={}, xi={})\n{:>8} {:>12} {:>12} {:>12}\n", practical.eta,
               practical.nu, practical.tau, practical.xi, "alpha^2", "type2", "gamma_opt", "kennedy");
    for (double a2 : alpha_sq) {
        const auto ens = BinaryEnsemble::from_alpha_sq(a2);
        const auto t2 = receivers::type2_imperfect_error(ens, practical);
        fmt::print("{:>8} {:>12.4e} {:>12.6f} {:>12.4e}\n", a2, t2.p_error, *t2.gamma_opt,
                   receivers::kennedy_error(ens, practical).p_error);
    }

    // Parameters of the squeeze + displace receiver, as physical operator settings
    const auto sol = optimizer::solve_type1_params(1.0, 1.0);
    const auto op = closed_forms::to_operator_parameters(sol.beta, sol.r);
    fmt::print("\nalpha=1: squeeze r={:.6f} then displace by {:.6f}; error {:.6e}\n", op.squeezing, op.displacement,
               sol.p_error);
    return 0;
}
