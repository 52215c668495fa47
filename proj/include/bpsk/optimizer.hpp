#pragma once

// Root finding for the receivers' optimality conditions and the Gaussian-measurement
// landscape scan.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "bpsk/closed_forms.hpp"
#include "bpsk/errors.hpp"
#include "bpsk/gaussian_algebra.hpp"
#include "bpsk/types.hpp"

namespace bpsk::optimizer {

struct RootResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

inline constexpr int kMaxBracketExpansions = 60;

/// Root of f in [lo, hi]. Without a sign change, the bracket is widened by moving `hi` so
/// that the width doubles, at most 60 times. Refinement is TOMS 748 (bisection-safeguarded
/// inverse cubic/secant steps), run to full double precision.
inline RootResult find_root_bracketed(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw InvalidInput(fmt::format("bracket requires lo < hi, got [{}, {}]", lo, hi));
    double flo = f(lo);
    double fhi = f(hi);
    RootResult out;
    if (flo == 0.0) return {lo, 0.0, 0, lo, lo};
    int expansions = 0;
    while (flo * fhi > 0.0) {
        if (expansions == kMaxBracketExpansions) {
            throw BracketError(fmt::format("no sign change in [{}, {}] after {} expansions", lo, hi, expansions), lo, hi);
        }
        hi = lo + 2.0 * (hi - lo);
        fhi = f(hi);
        ++expansions;
    }
    if (fhi == 0.0) return {hi, 0.0, expansions, hi, hi};

    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                          boost::math::tools::eps_tolerance<double>(), max_iter);
    const double fa = std::abs(f(a));
    const double fb = std::abs(f(b));
    out.value = fa <= fb ? a : b;
    out.residual = std::min(fa, fb);
    out.iterations = expansions + static_cast<int>(max_iter);
    out.bracket_lo = a;
    out.bracket_hi = b;
    if (!(out.residual < tol)) {
        throw ConvergenceError(fmt::format("root residual {:.3e} above tolerance {:.1e}", out.residual, tol),
                               {out.value, 0.0}, out.residual);
    }
    return out;
}

/// Positive solution of a = g * tanh(k * g) for a > 0, k > 0. The left side is increasing
/// in g and the root lies above a.
inline RootResult solve_tanh_balance(double a, double k, double tol = 1e-12) {
    if (!(a > 0.0 && k > 0.0)) throw InvalidInput(fmt::format("tanh balance needs a > 0, k > 0 (a={}, k={})", a, k));
    auto f = [a, k](double g) { return g * std::tanh(k * g) - a; };
    const double hi = std::max(2.0 * a, a + 1.0 / std::sqrt(k));
    return find_root_bracketed(f, a, hi, tol);
}

/// gamma_opt of the optimised displacement receiver: alpha = gamma tanh(2 eta alpha gamma).
/// alpha = 0 returns the limit 1/sqrt(2 eta) without iterating.
inline RootResult solve_type2_gamma(double alpha, double eta) {
    if (!(eta > 0.0) || !(alpha >= 0.0)) throw InvalidInput(fmt::format("need alpha >= 0, eta > 0 (alpha={}, eta={})", alpha, eta));
    if (alpha == 0.0) {
        const double g = 1.0 / std::sqrt(2.0 * eta);
        return {g, 0.0, 0, g, g};
    }
    return solve_tanh_balance(alpha, 2.0 * eta * alpha);
}

enum class ImperfectCondition {
    stationary, ///< xi sqrt(tau) alpha = g tanh(2 eta xi sqrt(tau) alpha g), the minimiser of the imperfect error
    as_printed, ///< xi sqrt(tau) alpha = g tanh(2 eta xi alpha g)
};

inline double type2_imperfect_residual(double alpha, double gamma, const DetectorModel& det,
                                       ImperfectCondition form = ImperfectCondition::stationary) {
    const double lhs = det.xi * std::sqrt(det.tau) * alpha;
    const double inner = form == ImperfectCondition::stationary ? lhs : det.xi * alpha;
    return lhs - gamma * std::tanh(2.0 * det.eta * inner * gamma);
}

inline RootResult solve_type2_gamma_imperfect(double alpha, const DetectorModel& det,
                                              ImperfectCondition form = ImperfectCondition::stationary) {
    det.validate();
    if (!(det.eta > 0.0 && det.xi > 0.0 && det.tau > 0.0)) {
        throw InvalidInput("imperfect displacement receiver needs eta, xi, tau > 0");
    }
    const double sqrt_tau = std::sqrt(det.tau);
    // Either form is solve_type2_gamma with alpha -> xi sqrt(tau) alpha and a rescaled efficiency.
    const double eta_eff = form == ImperfectCondition::stationary ? det.eta : det.eta / sqrt_tau;
    RootResult out = solve_type2_gamma(det.xi * sqrt_tau * alpha, eta_eff);
    out.residual = std::abs(type2_imperfect_residual(alpha, out.value, det, form));
    return out;
}

// ---------------------------------------------------------------------------
// Displacement + squeezing receiver

/// Optimality residuals in the (beta, r) parameterization of closed_forms::type1_objective,
/// with u = 4 eta alpha beta / c_-:
///   stationarity in r, cleared of 1/(1 - e^{4r}):
///     8 eta alpha beta - [4 eta (alpha^2 + beta^2) - eta (1 - e^{4r}) c_- / c_+] tanh u
///   stationarity in beta:
///     alpha - beta tanh u
/// At eta = 1 the first is also the commonly quoted form without the eta factor.
struct Type1Residuals {
    double squeezing;
    double displacement;
};

inline Type1Residuals type1_residuals(double alpha, double beta, double r, double eta) {
    const double c_minus = eta + (2.0 - eta) * std::exp(-2.0 * r);
    const double c_plus = eta + (2.0 - eta) * std::exp(2.0 * r);
    const double t = std::tanh(4.0 * eta * alpha * beta / c_minus);
    const double bracket = 4.0 * eta * (alpha * alpha + beta * beta) + eta * std::expm1(4.0 * r) * c_minus / c_plus;
    return {8.0 * eta * alpha * beta - bracket * t, alpha - beta * t};
}

struct Type1Solution {
    double beta = 0.0;
    double r = 0.0;
    double p_error = 0.0; ///< type1_objective at the solution with nu = 0
    Type1Residuals residuals{};
    int iterations = 0;
    double step_norm = 0.0;
    bool newton_converged = false;
};

inline constexpr double kType1SearchHalfWidth = 1.5;
inline constexpr std::array<double, 3> kType1Starts{-0.3, 0.0, 0.3};

namespace detail {

/// beta(r) solving the displacement condition for fixed squeezing.
inline double type1_beta_given_r(double alpha, double r, double eta) {
    const double c_minus = eta + (2.0 - eta) * std::exp(-2.0 * r);
    return solve_tanh_balance(alpha, 4.0 * eta * alpha / c_minus).value;
}

inline double residual_norm(const Type1Residuals& res) { return std::hypot(res.squeezing, res.displacement); }

/// Damped Newton on the two residuals, Jacobian by central differences.
inline std::optional<Type1Solution> type1_newton(double alpha, double eta, double beta, double r) {
    Type1Solution sol{beta, r};
    Type1Residuals res = type1_residuals(alpha, beta, r, eta);
    for (int it = 0; it < 100; ++it) {
        if (residual_norm(res) < 1e-13) break;
        const double h = 1e-7;
        const auto rb_p = type1_residuals(alpha, sol.beta + h, sol.r, eta);
        const auto rb_m = type1_residuals(alpha, sol.beta - h, sol.r, eta);
        const auto rr_p = type1_residuals(alpha, sol.beta, sol.r + h, eta);
        const auto rr_m = type1_residuals(alpha, sol.beta, sol.r - h, eta);
        const double j11 = (rb_p.squeezing - rb_m.squeezing) / (2 * h);
        const double j12 = (rr_p.squeezing - rr_m.squeezing) / (2 * h);
        const double j21 = (rb_p.displacement - rb_m.displacement) / (2 * h);
        const double j22 = (rr_p.displacement - rr_m.displacement) / (2 * h);
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0) return std::nullopt;
        const double d_beta = -(j22 * res.squeezing - j12 * res.displacement) / det;
        const double d_r = -(-j21 * res.squeezing + j11 * res.displacement) / det;
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, step *= 0.5) {
            const double nb = sol.beta + step * d_beta;
            const double nr = sol.r + step * d_r;
            if (std::abs(nr) > 2.0 * kType1SearchHalfWidth) continue;
            const auto nres = type1_residuals(alpha, nb, nr, eta);
            if (residual_norm(nres) < residual_norm(res)) {
                sol.beta = nb;
                sol.r = nr;
                res = nres;
                sol.step_norm = step * std::hypot(d_beta, d_r);
                accepted = true;
                break;
            }
        }
        sol.iterations = it + 1;
        if (!accepted) break;
    }
    sol.residuals = res;
    sol.newton_converged = std::abs(res.squeezing) < 1e-10 && std::abs(res.displacement) < 1e-10;
    if (!sol.newton_converged || !(sol.beta > 0.0) || std::abs(sol.r) > kType1SearchHalfWidth) return std::nullopt;
    sol.p_error = closed_forms::type1_objective(alpha, sol.beta, sol.r, eta, 0.0);
    return sol;
}

/// Minimise the profile P(r) = objective(beta(r), r) over the search box: coarse scan, then Brent.
inline double type1_profile_minimum(double alpha, double eta) {
    auto profile = [&](double r) {
        return closed_forms::type1_objective(alpha, type1_beta_given_r(alpha, r, eta), r, eta, 0.0);
    };
    constexpr int kScan = 60;
    const double step = 2.0 * kType1SearchHalfWidth / kScan;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double v = profile(-kType1SearchHalfWidth + i * step);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = -kType1SearchHalfWidth + std::max(best - 1, 0) * step;
    const double hi = -kType1SearchHalfWidth + std::min(best + 1, kScan) * step;
    std::uintmax_t iters = 200;
    return boost::math::tools::brent_find_minima(profile, lo, hi, std::numeric_limits<double>::digits / 2, iters).first;
}

} // namespace detail

/// Stencil check: objective at the solution is no larger than at its 5x5 neighbourhood
/// (spacing `h`) and no larger than the r = 0 slice optimum.
inline bool type1_is_local_minimum(double alpha, double eta, const Type1Solution& sol, double h = 1e-3) {
    const double centre = closed_forms::type1_objective(alpha, sol.beta, sol.r, eta, 0.0);
    for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
            if (closed_forms::type1_objective(alpha, sol.beta + i * h, sol.r + j * h, eta, 0.0) < centre - 1e-12) {
                return false;
            }
        }
    }
    const double gamma = solve_type2_gamma(alpha, eta).value;
    return centre <= closed_forms::type1_objective(alpha, gamma, 0.0, eta, 0.0) + 1e-15;
}

/// (beta_opt, r_opt) of the squeeze + displace receiver.
///
/// Candidates come from damped Newton started at r in {-0.3, 0, 0.3} (beta from the
/// displacement condition) and from a Newton polish of the profile minimiser over
/// r in [-1.5, 1.5]. The converged candidate with the lowest objective wins; ties go to the
/// lexicographically smaller (beta, r).
inline Type1Solution solve_type1_params(double alpha, double eta) {
    if (!(alpha > 0.0) || !(eta > 0.0 && eta <= 1.0)) {
        throw InvalidInput(fmt::format("type-I solve needs alpha > 0 and eta in (0,1] (alpha={}, eta={})", alpha, eta));
    }
    std::vector<Type1Solution> candidates;
    double best_seen = std::numeric_limits<double>::infinity();
    std::pair<double, double> best_point{0.0, 0.0};
    auto consider = [&](double r0) {
        const double b0 = detail::type1_beta_given_r(alpha, r0, eta);
        const double v = closed_forms::type1_objective(alpha, b0, r0, eta, 0.0);
        if (v < best_seen) {
            best_seen = v;
            best_point = {b0, r0};
        }
        if (auto sol = detail::type1_newton(alpha, eta, b0, r0)) candidates.push_back(*sol);
    };
    for (double r0 : kType1Starts) consider(r0);
    consider(detail::type1_profile_minimum(alpha, eta));

    std::erase_if(candidates, [&](const Type1Solution& s) { return !type1_is_local_minimum(alpha, eta, s); });
    if (candidates.empty()) {
        throw ConvergenceError(fmt::format("type-I optimum not found for alpha={} eta={}", alpha, eta), best_point,
                               detail::residual_norm(type1_residuals(alpha, best_point.first, best_point.second, eta)));
    }
    return *std::min_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.p_error != b.p_error) return a.p_error < b.p_error;
        return std::pair(a.beta, a.r) < std::pair(b.beta, b.r);
    });
}

// ---------------------------------------------------------------------------
// Gaussian-measurement landscape

struct LandscapePoint {
    double r = 0.0;
    double phi = 0.0;
    double e = 0.0;       ///< separation factor
    double p_error = 0.0; ///< Bayes error of the measurement
};

struct LandscapeReport {
    std::vector<LandscapePoint> points;
    std::size_t argmin = 0;
    bool degenerate = false;          ///< grid cannot distinguish measurements (single r or single point)
    bool optimum_at_homodyne = false; ///< argmin sits at phi = 0 and the largest grid r
};

/// Evaluate the Bayes error of every (r, phi) measurement on the grid (r-major order) and
/// locate the minimum. Ties resolve to the first point in grid order.
inline LandscapeReport verify_gaussian_optimum(const BinaryEnsemble& ensemble, std::span<const double> r_grid,
                                               std::span<const double> phi_grid) {
    if (r_grid.empty() || phi_grid.empty()) throw InvalidInput("landscape grids must be nonempty");
    LandscapeReport report;
    for (double r : r_grid) {
        for (double phi : phi_grid) {
            const double e = gaussian::separation_factor(r, phi);
            report.points.push_back({r, phi, e, gaussian::bayes_error_from_separation(ensemble, e)});
        }
    }
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        if (report.points[i].p_error < report.points[report.argmin].p_error) report.argmin = i;
    }
    const double r_max = *std::max_element(r_grid.begin(), r_grid.end());
    const double r_min = *std::min_element(r_grid.begin(), r_grid.end());
    const auto& best = report.points[report.argmin];
    report.degenerate = r_max == r_min;
    report.optimum_at_homodyne = best.r == r_max && best.phi == 0.0;
    return report;
}

} // namespace bpsk::optimizer
