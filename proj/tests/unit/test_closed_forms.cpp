#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "bpsk/closed_forms.hpp"

namespace cf = bpsk::closed_forms;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

double big_homodyne(double alpha) {
    const Big z = boost::multiprecision::sqrt(Big(2)) * Big(alpha);
    return static_cast<double>(Big(0.5) * boost::multiprecision::erfc(z));
}

double big_helstrom(double alpha) {
    using Huge = boost::multiprecision::cpp_bin_float_100;
    const Huge x = boost::multiprecision::exp(Huge(-4) * Huge(alpha) * Huge(alpha));
    return static_cast<double>((Huge(1) - boost::multiprecision::sqrt(Huge(1) - x)) / 2);
}

} // namespace

TEST(HomodyneError, MatchesFiftyDigitErfc) {
    for (double a2 : {1e-6, 1e-2, 0.1, 0.4, 1.0, 2.5, 5.0, 8.0, 10.0, 20.0}) {
        const double alpha = std::sqrt(a2);
        const double ref = big_homodyne(alpha);
        EXPECT_NEAR(cf::homodyne_error(alpha), ref, 1e-14 * ref) << "alpha^2=" << a2;
    }
}

TEST(HomodyneError, ZeroAmplitudeIsGuessing) { EXPECT_DOUBLE_EQ(cf::homodyne_error(0.0), 0.5); }

TEST(Helstrom, MatchesHighPrecisionFormula) {
    for (double a2 : {1e-8, 1e-3, 0.1, 1.0, 3.0, 10.0, 20.0}) {
        const double alpha = std::sqrt(a2);
        const double ref = big_helstrom(alpha);
        EXPECT_NEAR(cf::helstrom_bound(alpha), ref, 1e-14 * ref) << "alpha^2=" << a2;
    }
}

TEST(Helstrom, LargeAmplitudeAsymptote) {
    // (1 - sqrt(1 - x)) / 2 -> x / 4
    const double alpha = 3.0;
    EXPECT_NEAR(cf::helstrom_bound(alpha), std::exp(-36.0) / 4.0, 1e-12 * std::exp(-36.0));
}

TEST(DisplacementError, KennedyIsHalfVacuumOverlap) {
    for (double alpha : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        const double kennedy = cf::displacement_error(alpha, alpha, bpsk::DetectorModel::ideal());
        EXPECT_NEAR(kennedy, 0.5 * std::exp(-4.0 * alpha * alpha), 1e-15 * std::exp(-4.0 * alpha * alpha));
    }
}

TEST(DisplacementError, MatchesSinhForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 2.0 * u(rng);
        const double gamma = 2.0 * u(rng);
        const bpsk::DetectorModel det{0.2 + 0.8 * u(rng), 0.01 * u(rng), 0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng)};
        const double ref = 0.5 - std::exp(-det.nu - det.eta * (det.tau * alpha * alpha + gamma * gamma)) *
                                     std::sinh(2.0 * det.eta * det.xi * std::sqrt(det.tau) * alpha * gamma);
        EXPECT_NEAR(cf::displacement_error(alpha, gamma, det), ref, 1e-14);
    }
}

TEST(DisplacementError, ProbabilityRange) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const bpsk::DetectorModel det{u(rng), 5.0 * u(rng), u(rng), u(rng)};
        const double p = cf::displacement_error(4.0 * u(rng), 4.0 * u(rng), det);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(MeanIntensity, PerfectInterferenceIsCoherentSum) {
    EXPECT_DOUBLE_EQ(cf::mean_intensity(+1, 1.0, 0.5, 1.0, 1.0), 2.25);
    EXPECT_DOUBLE_EQ(cf::mean_intensity(-1, 1.0, 0.5, 1.0, 1.0), 0.25);
    // fully mismatched modes add incoherently
    EXPECT_DOUBLE_EQ(cf::mean_intensity(-1, 1.0, 0.5, 1.0, 0.0), 1.25);
    EXPECT_DOUBLE_EQ(cf::mean_intensity(+1, 1.0, 0.0, 0.81, 1.0), 0.81);
}

TEST(Type1Objective, NoSqueezingIsDisplacementReceiver) {
    for (double eta : {0.5, 0.9, 1.0}) {
        for (double nu : {0.0, 1e-3}) {
            for (double beta : {0.2, 0.7, 1.3}) {
                const double alpha = 0.8;
                const bpsk::DetectorModel det{eta, nu, 1.0, 1.0};
                EXPECT_NEAR(cf::type1_objective(alpha, beta, 0.0, eta, nu), cf::displacement_error(alpha, beta, det), 1e-15);
            }
        }
    }
}

TEST(Type1Objective, EqualsOperatorFormAfterReparameterization) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double alpha = 2.0 * u(rng);
        const double beta = 2.0 * u(rng);
        const double r = 2.0 * u(rng) - 1.0;
        const double eta = 0.1 + 0.9 * u(rng);
        const double nu = 0.01 * u(rng);
        const auto op = cf::to_operator_parameters(beta, r);
        EXPECT_NEAR(cf::type1_objective(alpha, beta, r, eta, nu),
                    cf::displaced_squeezed_error(alpha, op.displacement, op.squeezing, eta, nu), 1e-14);
    }
}

TEST(Type1Objective, NonNegativeAtLargeAmplitude) {
    // the optimum at large alpha has r -> 0 and beta -> alpha; the value must stay a probability
    for (double r : {0.0, 1e-16, -1e-16}) {
        const double p = cf::type1_objective(std::sqrt(10.0), std::sqrt(10.0), r, 1.0, 0.0);
        EXPECT_GE(p, 0.0);
        EXPECT_NEAR(p, 0.5 * std::exp(-40.0), 1e-6 * std::exp(-40.0));
    }
}

TEST(ClickError, ExtremeLogsStayAccurate) {
    // nulled branch almost never clicks: error ~ 1/2 (off+ + on-)
    EXPECT_NEAR(cf::click_error_from_log_off(-50.0, -1e-20), 0.5 * (std::exp(-50.0) + 1e-20), 1e-30);
}
