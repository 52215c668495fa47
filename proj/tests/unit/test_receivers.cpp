#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bpsk/closed_forms.hpp"
#include "bpsk/receivers.hpp"

using namespace bpsk;
using namespace bpsk::receivers;

TEST(Receivers, TagsRoundTrip) {
    for (auto tag : kAllReceivers) EXPECT_EQ(parse_receiver(to_string(tag)), tag);
    EXPECT_FALSE(parse_receiver("nope").has_value());
    EXPECT_EQ(parse_provenance("fock"), Provenance::fock);
    EXPECT_FALSE(parse_provenance("").has_value());
}

TEST(Receivers, OrderingChainOnIdealDetector) {
    for (int i = 0; i < 60; ++i) {
        const double a2 = 1e-2 * std::pow(1e3, i / 59.0);
        const auto ens = BinaryEnsemble::from_alpha_sq(a2);
        const auto det = DetectorModel::ideal();
        const double h = helstrom(ens);
        const double t1 = type1_error(ens, det).p_error;
        const double t2 = type2_error(ens, det).p_error;
        const double k = kennedy_error(ens, det).p_error;
        const double hom = homodyne_limit(ens);
        EXPECT_LE(h, t1 + 1e-15) << a2;
        EXPECT_LE(t1, t2 + 1e-15) << a2;
        EXPECT_LE(t2, k + 1e-15) << a2;
        EXPECT_LT(t2, hom) << a2;
    }
}

TEST(Receivers, ZeroAmplitudeIsGuessing) {
    const auto ens = BinaryEnsemble::equal_priors(0.0);
    const auto det = DetectorModel::ideal();
    EXPECT_DOUBLE_EQ(helstrom(ens), 0.5);
    EXPECT_DOUBLE_EQ(homodyne_limit(ens), 0.5);
    EXPECT_DOUBLE_EQ(type1_error(ens, det).p_error, 0.5);
    EXPECT_DOUBLE_EQ(type2_error(ens, det).p_error, 0.5);
    EXPECT_DOUBLE_EQ(kennedy_error(ens, det).p_error, 0.5);
}

TEST(Receivers, KennedyMatchesVacuumOverlap) {
    const auto r = kennedy_error(BinaryEnsemble::equal_priors(0.8), DetectorModel::ideal());
    EXPECT_NEAR(r.p_error, 0.5 * std::exp(-4.0 * 0.64), 1e-16);
    EXPECT_DOUBLE_EQ(*r.gamma_opt, 0.8);
}

TEST(Receivers, KennedyVariantsUnderTransmittance) {
    const auto det = DetectorModel::practical();
    const auto ens = BinaryEnsemble::equal_priors(0.7);
    EXPECT_NEAR(*kennedy_error(ens, det).gamma_opt, std::sqrt(det.tau) * 0.7, 1e-15);
    EXPECT_DOUBLE_EQ(*kennedy_raw_error(ens, det).gamma_opt, 0.7);
    EXPECT_LT(type2_imperfect_error(ens, det).p_error, kennedy_error(ens, det).p_error);
}

TEST(Receivers, HomodyneUnequalPriorsMatchesBayesRule) {
    const BinaryEnsemble ens{0.6, 0.8, 0.2};
    const double z = std::numbers::sqrt2 * 0.6;
    const double t = std::log(0.8 / 0.2) / (4.0 * z);
    EXPECT_NEAR(homodyne_limit(ens), 0.5 * 0.8 * std::erfc(z + t) + 0.5 * 0.2 * std::erfc(z - t), 1e-16);
    EXPECT_LT(homodyne_limit(ens), 0.2);
}

TEST(Receivers, AttenuatedHomodyne) {
    DetectorModel det;
    det.tau = 0.81;
    EXPECT_NEAR(homodyne_attenuated(BinaryEnsemble::equal_priors(1.0), det), closed_forms::homodyne_error(0.9), 1e-16);
}

TEST(Receivers, UnsupportedConfigurations) {
    const BinaryEnsemble unequal{0.5, 0.7, 0.3};
    EXPECT_THROW(helstrom(unequal), UnsupportedConfiguration);
    EXPECT_THROW(type2_error(unequal, DetectorModel::ideal()), UnsupportedConfiguration);
    EXPECT_THROW(type1_error(BinaryEnsemble::equal_priors(0.5), DetectorModel::practical()), UnsupportedConfiguration);
    EXPECT_THROW(type2_error(BinaryEnsemble::equal_priors(0.5), DetectorModel{0.0, 0.0, 1.0, 1.0}), InvalidInput);
    EXPECT_THROW(evaluate(ReceiverTag::helstrom, BinaryEnsemble{-1.0, 0.5, 0.5}, DetectorModel::ideal()), InvalidInput);
    EXPECT_THROW(mean_intensity(0, BinaryEnsemble::equal_priors(1.0), 0.5, DetectorModel::ideal()), InvalidInput);
}

TEST(Receivers, Type1ReportsOptimiserParameters) {
    const auto r = type1_error(BinaryEnsemble::equal_priors(0.5), DetectorModel{0.9, 0.0, 1.0, 1.0});
    ASSERT_TRUE(r.beta_opt && r.r_opt);
    EXPECT_FALSE(r.gamma_opt.has_value());
    EXPECT_NEAR(r.p_error, closed_forms::type1_objective(0.5, *r.beta_opt, *r.r_opt, 0.9, 0.0), 0.0);
}

TEST(Receivers, DarkCountsRaiseError) {
    const auto ens = BinaryEnsemble::equal_priors(0.7);
    const double clean = type2_error(ens, DetectorModel{0.9, 0.0, 1.0, 1.0}).p_error;
    const double noisy = type2_error(ens, DetectorModel{0.9, 1e-2, 1.0, 1.0}).p_error;
    EXPECT_GT(noisy, clean);
}

TEST(Receivers, DispatchMatchesDirectCalls) {
    const auto ens = BinaryEnsemble::equal_priors(0.9);
    const auto det = DetectorModel::ideal();
    EXPECT_EQ(evaluate(ReceiverTag::type2, ens, det).p_error, type2_error(ens, det).p_error);
    EXPECT_EQ(evaluate(ReceiverTag::homodyne, ens, det).p_error, homodyne_limit(ens));
    EXPECT_EQ(evaluate(ReceiverTag::helstrom, ens, det).provenance, Provenance::analytic);
}

TEST(Receivers, KennedyHomodyneCrossover) {
    auto diff = [](double a2) {
        const auto ens = BinaryEnsemble::from_alpha_sq(a2);
        return kennedy_error(ens, DetectorModel::ideal()).p_error - homodyne_limit(ens);
    };
    double lo = 0.05, hi = 2.0;
    ASSERT_GT(diff(lo), 0.0);
    ASSERT_LT(diff(hi), 0.0);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (diff(mid) > 0.0 ? lo : hi) = mid;
    }
    EXPECT_GT(lo, 0.35);
    EXPECT_LT(lo, 0.45);
}
