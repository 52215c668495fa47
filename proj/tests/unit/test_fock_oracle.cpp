#include <cmath>

#include <gtest/gtest.h>

#include "bpsk/closed_forms.hpp"
#include "bpsk/fock_oracle.hpp"

using namespace bpsk::fock;

TEST(FockVectors, CoherentNormAndTail) {
    const auto v = coherent_vector(1.2, 40);
    EXPECT_NEAR(v.norm_sq(), 1.0, 1e-14);
    EXPECT_FALSE(v.tail_warning);
    const auto cut = coherent_vector(3.0, 5);
    EXPECT_TRUE(cut.tail_warning);
    EXPECT_GT(cut.tail_bound, 0.1);
    EXPECT_THROW(coherent_vector(1.0, 0), bpsk::InvalidInput);
}

TEST(FockOperators, DisplacedVacuumIsCoherent) {
    for (double beta : {-1.0, 0.4, 1.5}) {
        const int dim = 50;
        const auto d = displacement_matrix(beta, dim);
        CVector vac = CVector::Zero(dim);
        vac(0) = 1.0;
        const CVector psi = d.mat * vac;
        const auto ref = coherent_vector(beta, dim);
        EXPECT_LT((psi - ref.amps).cwiseAbs().maxCoeff(), 1e-12) << "beta=" << beta;
        EXPECT_LT(d.unitarity_defect(10), 1e-12);
    }
}

TEST(FockOperators, SqueezedVacuumMoments) {
    const double r = 0.5;
    const int dim = 80;
    const auto s = squeeze_matrix(r, dim);
    CVector vac = CVector::Zero(dim);
    vac(0) = 1.0;
    const CVector psi = s.mat * vac;
    EXPECT_NEAR(std::abs(psi(0)), 1.0 / std::sqrt(std::cosh(r)), 1e-12);
    double mean_n = 0.0;
    for (int m = 0; m < dim; ++m) mean_n += m * std::norm(psi(m));
    EXPECT_NEAR(mean_n, std::sinh(r) * std::sinh(r), 1e-10);
    // odd levels are never populated
    for (int m = 1; m < dim; m += 2) EXPECT_LT(std::abs(psi(m)), 1e-14);
    // r > 0 squeezes x: <x^2> (vacuum = 1) equals e^{-2r}
    const Eigen::MatrixXd a = annihilation(dim);
    const CMatrix x = (a + a.transpose()).cast<Complex>();
    EXPECT_NEAR(psi.dot(x * x * psi).real(), std::exp(-2.0 * r), 1e-10);
}

TEST(FockOperators, Validation) {
    EXPECT_THROW(squeeze_matrix(2.5, 40), bpsk::InvalidInput);
    EXPECT_THROW(squeeze_matrix(0.1, 3), bpsk::InvalidInput);
    EXPECT_THROW(off_operator(1.5, 0.0, 10), bpsk::InvalidInput);
    EXPECT_THROW(off_operator(0.5, -1.0, 10), bpsk::InvalidInput);
}

TEST(FockOperators, OnOffResolveIdentity) {
    const auto off = off_operator(0.7, 0.01, 20);
    const auto on = on_operator(0.7, 0.01, 20);
    EXPECT_TRUE((off.mat + on.mat).isIdentity(1e-15));
    EXPECT_NEAR(off.mat(0, 0).real(), std::exp(-0.01), 1e-15);
    EXPECT_NEAR(off.mat(3, 3).real(), std::exp(-0.01) * std::pow(0.3, 3), 1e-15);
}

TEST(FockReceiver, MatchesClosedForm) {
    struct Case {
        double alpha, beta, r, eta, nu;
    };
    for (const Case c : {Case{0.5, 0.6, 0.0, 1.0, 0.0}, Case{0.5, 0.7, 0.2, 1.0, 0.0}, Case{1.0, 1.1, -0.3, 0.9, 1e-3},
                         Case{0.25, 0.9, 0.5, 0.6, 0.01}, Case{0.8, -0.5, 0.1, 0.95, 0.0}}) {
        const auto est = receiver_error_fock(c.alpha, c.beta, c.r, c.eta, c.nu);
        EXPECT_NEAR(est.p_error, bpsk::closed_forms::displaced_squeezed_error(c.alpha, c.beta, c.r, c.eta, c.nu), 1e-7)
            << c.alpha << " " << c.beta << " " << c.r;
        EXPECT_LT(est.tail_plus, kTailTolerance);
        EXPECT_LT(est.tail_minus, kTailTolerance);
    }
}

TEST(FockReceiver, TruncationErrorShrinksWithDimension) {
    const double exact = bpsk::closed_forms::displaced_squeezed_error(1.0, 1.0, 0.3, 0.9, 0.0);
    double previous = 1.0;
    for (int dim : {8, 16, 32, 64}) {
        const auto est = receiver_error_fock_fixed(1.0, 1.0, 0.3, 0.9, 0.0, dim);
        const double err = std::abs(est.p_error - exact);
        EXPECT_LE(err, previous + 1e-12);
        EXPECT_LE(err, est.tail_plus + est.tail_minus + 1e-9);
        previous = err;
    }
}

TEST(FockReceiver, StartDimensionFormula) {
    EXPECT_EQ(adaptive_start_dim(0.0, 0.0, 0.0), 8);
    EXPECT_EQ(adaptive_start_dim(1.0, 1.0, 0.0), 72);
    EXPECT_EQ(adaptive_start_dim(5.0, 5.0, 1.0), kMaxDim);
}
