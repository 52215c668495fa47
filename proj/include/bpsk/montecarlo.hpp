#pragma once

// Click-level simulation of the displacement receiver with imperfections.
//
// Each trial sends one signal, computes the mean intensity reaching the detector and draws
// the click from the Poisson law P(on) = 1 - e^{-nu - eta I}. Photon numbers are not sampled:
// the click law is exact for coherent light, so nothing is lost by sampling clicks directly.
//
// Reproducibility: the generator is std::mt19937_64 (fully specified by the C++ standard),
// uniforms are built as (x >> 11) * 2^-53 rather than through <random> distributions, whose
// algorithms are implementation-defined. Sweep points are seeded by mixing the master seed
// with the point index through splitmix64, so results do not depend on evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bpsk/closed_forms.hpp"
#include "bpsk/errors.hpp"
#include "bpsk/optimizer.hpp"
#include "bpsk/types.hpp"

namespace bpsk::montecarlo {

inline constexpr const char* kRngId = "mt19937_64+splitmix64-v1";

struct McConfig {
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    BinaryEnsemble ensemble{};
    DetectorModel detector{};
    double gamma = 0.0; ///< local-oscillator displacement
};

struct McEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string rng_id = kRngId;
    double gamma = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sweep point `index`: splitmix64(master ^ splitmix64(index)).
inline std::uint64_t point_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Error-rate estimate of the displacement receiver (click -> "+", no click -> "-").
///
/// Signs are allocated by stratification: round(p+ * trials) trials carry +alpha and the rest
/// -alpha, so the prior enters exactly rather than through a sampled sign.
inline McEstimate simulate_type2(const McConfig& config) {
    config.ensemble.validate();
    config.detector.validate();
    if (config.trials < 1) throw InvalidInput("at least one trial required");
    const auto& det = config.detector;
    const double alpha = config.ensemble.alpha;

    const auto n_plus = static_cast<std::uint64_t>(std::llround(config.ensemble.p_plus * static_cast<double>(config.trials)));
    const std::uint64_t n_minus = config.trials - std::min(n_plus, config.trials);
    const double click_plus = -std::expm1(-det.nu - det.eta * closed_forms::mean_intensity(+1, alpha, config.gamma, det.tau, det.xi));
    const double click_minus = -std::expm1(-det.nu - det.eta * closed_forms::mean_intensity(-1, alpha, config.gamma, det.tau, det.xi));

    std::mt19937_64 rng(config.seed);
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < n_plus; ++t) {
        if (!(uniform01(rng) < click_plus)) ++errors;
    }
    for (std::uint64_t t = 0; t < n_minus; ++t) {
        if (uniform01(rng) < click_minus) ++errors;
    }

    McEstimate est;
    est.trials = config.trials;
    est.seed = config.seed;
    est.gamma = config.gamma;
    est.p_hat = static_cast<double>(errors) / static_cast<double>(config.trials);
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(config.trials));
    return est;
}

/// Displacement used at each sweep point.
enum class GammaRule {
    fixed,         ///< the template's gamma
    optimal,       ///< minimiser of the imperfect error
    kennedy,       ///< sqrt(tau) alpha
    kennedy_raw,   ///< alpha
};

inline double displacement_for(GammaRule rule, double alpha, const McConfig& base) {
    switch (rule) {
    case GammaRule::fixed: return base.gamma;
    case GammaRule::optimal: return optimizer::solve_type2_gamma_imperfect(alpha, base.detector).value;
    case GammaRule::kennedy: return std::sqrt(base.detector.tau) * alpha;
    case GammaRule::kennedy_raw: return alpha;
    }
    return base.gamma;
}

/// Run one simulation per alpha^2 grid point. Point i uses seed point_seed(base.seed, i);
/// points are distributed over worker threads and written back by index.
inline std::vector<McEstimate> sweep_montecarlo(std::span<const double> alpha_sq_grid, const McConfig& base,
                                                GammaRule rule = GammaRule::optimal) {
    if (alpha_sq_grid.empty()) throw InvalidInput("sweep grid must be nonempty");
    std::vector<McConfig> configs;
    configs.reserve(alpha_sq_grid.size());
    for (std::size_t i = 0; i < alpha_sq_grid.size(); ++i) {
        McConfig c = base;
        c.ensemble.alpha = std::sqrt(alpha_sq_grid[i]);
        c.seed = point_seed(base.seed, i);
        c.ensemble.validate();
        c.detector.validate();
        if (c.trials < 1) throw InvalidInput("at least one trial required");
        c.gamma = displacement_for(rule, c.ensemble.alpha, base);
        configs.push_back(c);
    }

    std::vector<McEstimate> out(configs.size());
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, configs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < configs.size(); i += workers) out[i] = simulate_type2(configs[i]);
            });
        }
    }
    return out;
}

} // namespace bpsk::montecarlo
