#pragma once

// Multimode Gaussian-state algebra.
//
// Conventions used throughout:
//   * quadrature order (x1, p1, x2, p2, ..., xn, pn);
//   * covariance normalised so that the vacuum is the identity, i.e. cov = 2 * Var;
//   * a coherent state |alpha> with real alpha has displacement (sqrt(2) alpha, 0);
//   * symplectic form Omega = diag([[0, 1], [-1, 0]], ...);
//   * a Gaussian POVM element Pi(G, delta) over outcome delta in R^{2n} has
//     Tr[rho(cov, d) Pi(G, delta)] = pi^{-n} det(cov + G)^{-1/2} exp(-(d - delta)^T (cov + G)^{-1} (d - delta)),
//     which integrates to one over delta.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "bpsk/errors.hpp"
#include "bpsk/types.hpp"

namespace bpsk::gaussian {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultHomodyneSqueezing = 8.0;
inline constexpr double kMaxConditionNumber = 1e12;

inline Matrix symplectic_form(int n_modes) {
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/// Smallest eigenvalue of the Hermitian matrix cov + i*Omega (>= 0 for physical covariances).
inline double uncertainty_margin(const Matrix& cov) {
    const int dim = static_cast<int>(cov.rows());
    Eigen::MatrixXcd h = cov.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * symplectic_form(dim / 2).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// Symplectic eigenvalues in ascending order. The spectrum of Omega*cov is {+-i nu_k};
/// the 2n moduli are sorted and averaged pairwise.
inline std::vector<double> symplectic_eigenvalues(const Matrix& cov) {
    const int dim = static_cast<int>(cov.rows());
    Eigen::EigenSolver<Matrix> solver(symplectic_form(dim / 2) * cov, false);
    std::vector<double> moduli(dim);
    for (int k = 0; k < dim; ++k) moduli[k] = std::abs(solver.eigenvalues()[k]);
    std::sort(moduli.begin(), moduli.end());
    std::vector<double> nus(dim / 2);
    for (int k = 0; k < dim / 2; ++k) nus[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
    return nus;
}

struct GaussianState {
    int n_modes = 0;
    Matrix cov;
    Vector disp;

    static GaussianState vacuum(int n_modes) {
        return {n_modes, Matrix::Identity(2 * n_modes, 2 * n_modes), Vector::Zero(2 * n_modes)};
    }

    /// Coherent state with complex amplitude x + i p (real alpha: p = 0).
    static GaussianState coherent(double re, double im = 0.0) {
        GaussianState s = vacuum(1);
        s.disp << std::numbers::sqrt2 * re, std::numbers::sqrt2 * im;
        return s;
    }

    double asymmetry() const { return (cov - cov.transpose()).cwiseAbs().maxCoeff(); }

    bool is_pure(double tol = 1e-9) const { return std::abs(cov.determinant() - 1.0) <= tol; }

    void validate(double symmetry_tol = 1e-12, double psd_tol = 1e-10) const {
        if (n_modes <= 0 || cov.rows() != 2 * n_modes || cov.cols() != 2 * n_modes || disp.size() != 2 * n_modes) {
            throw InvalidInput(fmt::format("inconsistent Gaussian state dimensions: modes={} cov={}x{} disp={}",
                                           n_modes, cov.rows(), cov.cols(), disp.size()));
        }
        if (asymmetry() > symmetry_tol) {
            throw InvalidInput(fmt::format("covariance not symmetric (max asymmetry {:.3e})", asymmetry()));
        }
        const double margin = uncertainty_margin(cov);
        if (margin < -psd_tol) {
            throw InvalidInput(fmt::format("covariance violates cov + i*Omega >= 0 (min eigenvalue {:.3e})", margin));
        }
    }
};

inline GaussianState tensor_product(const GaussianState& a, const GaussianState& b) {
    GaussianState out;
    out.n_modes = a.n_modes + b.n_modes;
    out.cov = Matrix::Zero(2 * out.n_modes, 2 * out.n_modes);
    out.cov.topLeftCorner(2 * a.n_modes, 2 * a.n_modes) = a.cov;
    out.cov.bottomRightCorner(2 * b.n_modes, 2 * b.n_modes) = b.cov;
    out.disp.resize(2 * out.n_modes);
    out.disp << a.disp, b.disp;
    return out;
}

inline GaussianState tensor_product(std::span<const GaussianState> states) {
    if (states.empty()) throw InvalidInput("tensor product of an empty list");
    GaussianState out = states.front();
    for (std::size_t k = 1; k < states.size(); ++k) out = tensor_product(out, states[k]);
    return out;
}

/// Gaussian unitary at the phase-space level: x -> S x + offset.
struct SymplecticOp {
    Matrix matrix;
    Vector offset;

    int n_modes() const { return static_cast<int>(matrix.rows()) / 2; }

    static SymplecticOp identity(int n_modes) {
        return {Matrix::Identity(2 * n_modes, 2 * n_modes), Vector::Zero(2 * n_modes)};
    }

    static SymplecticOp linear(Matrix s) {
        Vector zero = Vector::Zero(s.rows());
        return {std::move(s), std::move(zero)};
    }

    double symplectic_defect() const {
        const Matrix omega = symplectic_form(n_modes());
        return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff();
    }

    bool is_symplectic(double tol = 1e-10) const { return symplectic_defect() <= tol; }

    /// This op applied after `first`.
    SymplecticOp after(const SymplecticOp& first) const {
        if (first.n_modes() != n_modes()) {
            throw InvalidInput(fmt::format("cannot compose {}-mode and {}-mode operations", n_modes(), first.n_modes()));
        }
        return {matrix * first.matrix, matrix * first.offset + offset};
    }

    /// Inverse through S^{-1} = -Omega S^T Omega.
    SymplecticOp inverse() const {
        const Matrix omega = symplectic_form(n_modes());
        Matrix inv = -omega * matrix.transpose() * omega;
        Vector off = -inv * offset;
        return {std::move(inv), std::move(off)};
    }
};

inline void require_mode(int n_modes, int mode, const char* what) {
    if (mode < 0 || mode >= n_modes) {
        throw InvalidInput(fmt::format("{}: mode {} out of range for {} modes", what, mode, n_modes));
    }
}

/// Beamsplitter mixing modes i and j: (a_i, a_j) -> (c a_i - s a_j, s a_i + c a_j).
/// theta = pi/4 is the 50:50 splitter.
inline SymplecticOp beamsplitter(int n_modes, int i, int j, double theta) {
    require_mode(n_modes, i, "beamsplitter");
    require_mode(n_modes, j, "beamsplitter");
    if (i == j) throw InvalidInput("beamsplitter needs two distinct modes");
    Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    for (int q = 0; q < 2; ++q) {
        s(2 * i + q, 2 * i + q) = c;
        s(2 * i + q, 2 * j + q) = -sn;
        s(2 * j + q, 2 * i + q) = sn;
        s(2 * j + q, 2 * j + q) = c;
    }
    return SymplecticOp::linear(std::move(s));
}

/// Phase shifter a -> e^{i phi} a on one mode.
inline SymplecticOp phase_rotation(int n_modes, int mode, double phi) {
    require_mode(n_modes, mode, "phase_rotation");
    Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
    s(2 * mode, 2 * mode) = std::cos(phi);
    s(2 * mode, 2 * mode + 1) = -std::sin(phi);
    s(2 * mode + 1, 2 * mode) = std::sin(phi);
    s(2 * mode + 1, 2 * mode + 1) = std::cos(phi);
    return SymplecticOp::linear(std::move(s));
}

/// Single-mode squeezer diag(e^{-r}, e^{r}): r > 0 squeezes x.
inline SymplecticOp squeezer(int n_modes, int mode, double r) {
    require_mode(n_modes, mode, "squeezer");
    Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
    s(2 * mode, 2 * mode) = std::exp(-r);
    s(2 * mode + 1, 2 * mode + 1) = std::exp(r);
    return SymplecticOp::linear(std::move(s));
}

/// Seeded passive (energy-preserving) network: 3*n layers of {beamsplitter at a random angle
/// on a random pair, random phase on a random mode}.
inline SymplecticOp random_passive(int n_modes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> pick(0, n_modes - 1);
    SymplecticOp op = SymplecticOp::identity(n_modes);
    for (int layer = 0; layer < 3 * n_modes; ++layer) {
        if (n_modes > 1) {
            const int i = pick(rng);
            int j = pick(rng);
            while (j == i) j = pick(rng);
            op = beamsplitter(n_modes, i, j, angle(rng)).after(op);
        }
        op = phase_rotation(n_modes, pick(rng), angle(rng)).after(op);
    }
    return op;
}

/// Seeded generic symplectic in Bloch-Messiah form: passive, single-mode squeezing
/// r_k ~ U[0, max_squeezing] on every mode, passive.
inline SymplecticOp random_symplectic(int n_modes, std::mt19937_64& rng, double max_squeezing = 1.5) {
    std::uniform_real_distribution<double> squeeze(0.0, max_squeezing);
    SymplecticOp op = random_passive(n_modes, rng);
    for (int k = 0; k < n_modes; ++k) op = squeezer(n_modes, k, squeeze(rng)).after(op);
    return random_passive(n_modes, rng).after(op);
}

inline GaussianState apply_gaussian_unitary(const GaussianState& state, const SymplecticOp& op) {
    if (op.matrix.rows() != state.cov.rows() || op.offset.size() != state.disp.size()) {
        throw InvalidInput(fmt::format("operation acts on {} modes but state has {}", op.n_modes(), state.n_modes));
    }
    return {state.n_modes, op.matrix * state.cov * op.matrix.transpose(), op.matrix * state.disp + op.offset};
}

// ---------------------------------------------------------------------------
// Gaussian measurements and conditioning

/// Covariance of the single-mode Gaussian measurement with squeezing r and phase phi:
/// [[c-, s], [s, c+]], c+- = cosh 2r +- sinh 2r cos phi, s = sinh 2r sin phi.
/// phi = 0 and r -> infinity is x-homodyne; r = 0 is heterodyne.
/// Built as R(phi/2) diag(e^{-2r}, e^{2r}) R(phi/2)^T so the small eigenvalue keeps full
/// relative precision at large r.
inline Matrix single_mode_measurement_cov(double r, double phi) {
    const double lo = std::exp(-2.0 * r);
    const double hi = std::exp(2.0 * r);
    const double c2 = std::cos(0.5 * phi) * std::cos(0.5 * phi);
    const double s2 = std::sin(0.5 * phi) * std::sin(0.5 * phi);
    const double off = std::sinh(2.0 * r) * std::sin(phi);
    Matrix g(2, 2);
    g << lo * c2 + hi * s2, off,
         off, lo * s2 + hi * c2;
    return g;
}

enum class Quadrature { x, p };

struct GaussianMeasurementSpec {
    Matrix cov;
    Vector outcome;

    int n_modes() const { return static_cast<int>(cov.rows()) / 2; }

    static GaussianMeasurementSpec none() { return {Matrix(0, 0), Vector(0)}; }

    static GaussianMeasurementSpec single_mode(double r, double phi, const Vector& outcome) {
        return {single_mode_measurement_cov(r, phi), outcome};
    }

    /// Finite-squeezing approximation of homodyne detection of one quadrature.
    static GaussianMeasurementSpec homodyne(Quadrature q, const Vector& outcome,
                                            double r = kDefaultHomodyneSqueezing) {
        return single_mode(r, q == Quadrature::x ? 0.0 : std::numbers::pi, outcome);
    }

    /// Block-diagonal product of independent per-mode measurements.
    static GaussianMeasurementSpec product(std::span<const GaussianMeasurementSpec> parts) {
        int dim = 0;
        for (const auto& p : parts) dim += static_cast<int>(p.cov.rows());
        GaussianMeasurementSpec out{Matrix::Zero(dim, dim), Vector(dim)};
        int at = 0;
        for (const auto& p : parts) {
            const auto n = p.cov.rows();
            out.cov.block(at, at, n, n) = p.cov;
            out.outcome.segment(at, n) = p.outcome;
            at += static_cast<int>(n);
        }
        return out;
    }

    void validate() const {
        if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || outcome.size() != cov.rows()) {
            throw InvalidInput(fmt::format("measurement spec dimensions inconsistent: cov {}x{}, outcome {}",
                                           cov.rows(), cov.cols(), outcome.size()));
        }
        if (cov.rows() > 0 && uncertainty_margin(cov) < -1e-10) {
            throw InvalidInput("measurement covariance violates cov + i*Omega >= 0");
        }
    }
};

/// LDLT solve of a symmetric positive-definite matrix, guarded by its condition number.
class GuardedSolve {
public:
    explicit GuardedSolve(const Matrix& m, const char* what = "matrix") : dim_(static_cast<int>(m.rows())) {
        if (dim_ == 0) return;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        if (!(condition_ < kMaxConditionNumber)) {
            throw SingularMatrixError(
                fmt::format("{} is numerically singular (condition number {:.3e}, limit {:.0e})", what, condition_,
                            kMaxConditionNumber),
                condition_);
        }
        ldlt_.compute(m);
        log_det_ = eig.eigenvalues().array().log().sum();
    }

    template <class Rhs>
    auto solve(const Rhs& rhs) const {
        return ldlt_.solve(rhs);
    }

    double condition_number() const { return condition_; }
    double log_det() const { return log_det_; }
    int dim() const { return dim_; }

private:
    int dim_;
    Eigen::LDLT<Matrix> ldlt_;
    double condition_ = 1.0;
    double log_det_ = 0.0;
};

/// Outcome density pi^{-K} det(M)^{-1/2} exp(-v^T M^{-1} v) for a 2K-dimensional residual v.
inline double outcome_density(const GuardedSolve& m, const Vector& residual) {
    if (m.dim() == 0) return 1.0;
    const double quad = residual.dot(m.solve(residual));
    const double k = m.dim() / 2.0;
    return std::exp(-quad - 0.5 * m.log_det() - k * std::log(std::numbers::pi));
}

/// Output of measuring the trailing modes of one Gaussian input.
struct ConditionalState {
    GaussianState state;
    double density = 1.0;
};

namespace detail {

struct Blocks {
    Matrix a, b, c;
};

inline Blocks split(const Matrix& cov, int keep) {
    const int n = 2 * keep;
    const int m = static_cast<int>(cov.rows()) - n;
    return {cov.topLeftCorner(n, n), cov.bottomRightCorner(m, m), cov.topRightCorner(n, m)};
}

inline void check_partition(int total_modes, int keep_modes, const GaussianMeasurementSpec& meas) {
    meas.validate();
    if (keep_modes < 0 || keep_modes > total_modes || meas.n_modes() != total_modes - keep_modes) {
        throw InvalidInput(fmt::format("measurement on {} modes does not match {} modes with {} kept",
                                       meas.n_modes(), total_modes, keep_modes));
    }
}

} // namespace detail

/// Keep the first `keep_modes` modes and measure the rest with `meas`:
///   cov_out = A - C (B + G_M)^{-1} C^T,
///   disp_out = d_A - C (B + G_M)^{-1} (d_B - d_M),
///   density  = outcome density of d_M.
inline ConditionalState condition_on_partial_measurement(const GaussianState& state, int keep_modes,
                                                         const GaussianMeasurementSpec& meas) {
    detail::check_partition(state.n_modes, keep_modes, meas);
    const auto [a, b, c] = detail::split(state.cov, keep_modes);
    const int n = 2 * keep_modes;
    const GuardedSolve solve(b + meas.cov, "B + cov_M");

    const Vector residual = state.disp.tail(state.disp.size() - n) - meas.outcome;
    ConditionalState out;
    out.state.n_modes = keep_modes;
    if (solve.dim() == 0) {
        out.state.cov = a;
        out.state.disp = state.disp.head(n);
        return out;
    }
    const Matrix gain = solve.solve(c.transpose()).transpose(); // C (B + G_M)^{-1}
    out.state.cov = a - gain * c.transpose();
    out.state.disp = state.disp.head(n) - gain * residual;
    out.density = outcome_density(solve, residual);
    return out;
}

/// Conditional output for the binary coherent ensemble {|+alpha>, |-alpha>}.
///
/// The signal enters mode 0 and the remaining modes of `op` start in vacuum. After `op`,
/// the trailing modes are measured with `meas`. Output displacements decompose as
/// D+- = +-signal_disp + offset_disp, where signal_disp does not depend on the outcome
/// and offset_disp is affine in it.
struct ConditionalOutput {
    GaussianState state_plus;
    GaussianState state_minus;
    Matrix shared_cov;
    Vector signal_disp;
    Vector offset_disp;
    double density_plus = 1.0;
    double density_minus = 1.0;
    double weight_plus = 0.0;  // p+ * density_plus
    double weight_minus = 0.0; // p- * density_minus
};

inline ConditionalOutput binary_conditional_output(const BinaryEnsemble& ensemble, const SymplecticOp& op,
                                                   const GaussianMeasurementSpec& meas) {
    ensemble.validate();
    const int total = op.n_modes();
    if (total < 1) throw InvalidInput("operation must act on at least the signal mode");
    const int keep = total - meas.n_modes();
    detail::check_partition(total, keep, meas);

    // The transformed covariance and the signal displacement d = S [sqrt2 alpha, 0, ...].
    const Matrix cov = op.matrix * op.matrix.transpose();
    const Vector signal = op.matrix.col(0) * (std::numbers::sqrt2 * ensemble.alpha);
    const Vector& offset = op.offset;

    const auto [a, b, c] = detail::split(cov, keep);
    const int n = 2 * keep;
    const GuardedSolve solve(b + meas.cov, "B + cov_M");

    ConditionalOutput out;
    if (solve.dim() == 0) {
        out.shared_cov = a;
        out.signal_disp = signal;
        out.offset_disp = offset;
    } else {
        const Matrix gain = solve.solve(c.transpose()).transpose();
        out.shared_cov = a - gain * c.transpose();
        out.signal_disp = signal.head(n) - gain * signal.tail(signal.size() - n);
        out.offset_disp = offset.head(n) - gain * (offset.tail(offset.size() - n) - meas.outcome);
        const Vector base = offset.tail(offset.size() - n) - meas.outcome;
        out.density_plus = outcome_density(solve, signal.tail(signal.size() - n) + base);
        out.density_minus = outcome_density(solve, -signal.tail(signal.size() - n) + base);
    }
    out.state_plus = {keep, out.shared_cov, out.signal_disp + out.offset_disp};
    out.state_minus = {keep, out.shared_cov, -out.signal_disp + out.offset_disp};
    out.weight_plus = ensemble.p_plus * out.density_plus;
    out.weight_minus = ensemble.p_minus * out.density_minus;
    return out;
}

// ---------------------------------------------------------------------------
// Normal forms

/// Symplectic S_D with S_D cov S_D^T = I for a pure covariance.
///
/// Canonical choice: S_D = cov^{-1/2}, the positive polar factor of any S with cov = S S^T.
/// It is symplectic whenever cov is pure, is the identity for cov = I and is diagonal for
/// diagonal input, so the output is deterministic.
inline SymplecticOp pure_normal_form(const Matrix& cov, double purity_tol = 1e-6) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0) {
        throw InvalidInput(fmt::format("covariance must be 2N x 2N, got {}x{}", cov.rows(), cov.cols()));
    }
    const Matrix sym = 0.5 * (cov + cov.transpose());
    for (double nu : symplectic_eigenvalues(sym)) {
        if (std::abs(nu - 1.0) > purity_tol) {
            throw MixedStateError(fmt::format("covariance is not pure: symplectic eigenvalue {:.12g}", nu), nu);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Matrix& q = eig.eigenvectors();
    const Vector inv_sqrt = eig.eigenvalues().array().rsqrt();
    return SymplecticOp::linear(q * inv_sqrt.asDiagonal() * q.transpose());
}

/// Passive (orthogonal symplectic) network of phase shifters and beamsplitters mapping d to
/// (|d|, 0, ..., 0). Each mode is first rotated to a real positive amplitude, then modes
/// 2..N are merged into mode 1 one at a time. d = 0 maps to the identity.
inline SymplecticOp concentrate_displacement(const Vector& d) {
    if (d.size() == 0 || d.size() % 2 != 0) throw InvalidInput("displacement must have even, nonzero length");
    if (!d.allFinite()) throw InvalidInput("displacement must be finite");
    const int n = static_cast<int>(d.size()) / 2;
    SymplecticOp op = SymplecticOp::identity(n);
    std::vector<double> magnitude(n);
    for (int k = 0; k < n; ++k) {
        const double x = d(2 * k);
        const double p = d(2 * k + 1);
        magnitude[k] = std::hypot(x, p);
        const double arg = std::atan2(p, x);
        if (magnitude[k] > 0.0 && arg != 0.0) op = phase_rotation(n, k, -arg).after(op);
    }
    double merged = magnitude[0];
    for (int k = 1; k < n; ++k) {
        if (magnitude[k] == 0.0) continue;
        const double theta = std::atan2(magnitude[k], merged);
        // rotate (a_1, a_k) = (merged, m_k) onto (rho, 0)
        op = beamsplitter(n, 0, k, -theta).after(op);
        merged = std::hypot(merged, magnitude[k]);
    }
    return op;
}

// ---------------------------------------------------------------------------
// POVM of a generic Gaussian measurement model

/// Effective Gaussian POVM on the signal modes of a model "append pure ancillas, apply a
/// Gaussian unitary, homodyne every mode". For homodyne outcome d_HD the element is
/// w(d_HD) * Pi(cov, delta(d_HD)) with delta affine in d_HD.
struct GaussianPovm {
    Matrix cov;         // covariance of each POVM element
    Matrix delta_gain;  // delta(d_HD) = delta_gain * d_HD + delta_offset
    Vector delta_offset;
    Matrix weight_gain; // ancilla-side residual v(d_HD) = weight_offset - weight_gain * d_HD
    Vector weight_offset;
    Matrix weight_cov;  // cov_aux + cov_B

    Vector delta(const Vector& d_hd) const { return delta_gain * d_hd + delta_offset; }

    double outcome_weight(const Vector& d_hd) const {
        if (weight_cov.rows() == 0) return 1.0;
        const GuardedSolve solve(weight_cov, "cov_aux + cov_B");
        return outcome_density(solve, weight_offset - weight_gain * d_hd);
    }
};

/// Derive the signal-side POVM of the physical model. `quadratures` selects which
/// quadrature each output mode's homodyne detector measures (default all x); homodyne is
/// approximated by squeezing `squeeze_r`.
///
/// The homodyne POVM is pulled back through the unitary: cov_S = S^{-1} G_HD S^{-T},
/// d_S = S^{-1} d_HD. Tracing the ancillas then gives the Schur complement
///   cov   = cov_A - cov_C (cov_aux + cov_B)^{-1} cov_C^T,
///   delta = d_A - cov_C (cov_aux + cov_B)^{-1} (d_B - d_aux).
inline GaussianPovm povm_from_physical_model(const SymplecticOp& unitary, int n_signal,
                                             std::span<const GaussianState> aux, double squeeze_r,
                                             std::span<const Quadrature> quadratures = {}) {
    if (!std::isfinite(squeeze_r)) throw InvalidInput("homodyne squeezing must be finite");
    int n_aux = 0;
    for (const auto& s : aux) {
        s.validate();
        if (!s.is_pure(1e-9)) throw InvalidInput("ancilla states must be pure");
        n_aux += s.n_modes;
    }
    const int total = n_signal + n_aux;
    if (n_signal < 1 || unitary.n_modes() != total) {
        throw InvalidInput(fmt::format("unitary acts on {} modes, expected {} signal + {} ancilla", unitary.n_modes(),
                                       n_signal, n_aux));
    }
    if (!quadratures.empty() && static_cast<int>(quadratures.size()) != total) {
        throw InvalidInput("one homodyne quadrature per output mode required");
    }

    Vector hd_diag(2 * total);
    for (int k = 0; k < total; ++k) {
        const bool measure_p = !quadratures.empty() && quadratures[k] == Quadrature::p;
        hd_diag(2 * k) = std::exp(measure_p ? 2.0 * squeeze_r : -2.0 * squeeze_r);
        hd_diag(2 * k + 1) = std::exp(measure_p ? -2.0 * squeeze_r : 2.0 * squeeze_r);
    }
    const Matrix s_inv = unitary.inverse().matrix;
    const Matrix cov_s = s_inv * hd_diag.asDiagonal() * s_inv.transpose();

    const int na = 2 * n_signal;
    const int nb = 2 * n_aux;
    GaussianPovm povm;
    if (n_aux == 0) {
        povm.cov = cov_s;
        povm.delta_gain = s_inv;
        povm.delta_offset = Vector::Zero(na);
        return povm;
    }

    Matrix aux_cov = Matrix::Zero(nb, nb);
    Vector aux_disp(nb);
    int at = 0;
    for (const auto& s : aux) {
        aux_cov.block(at, at, 2 * s.n_modes, 2 * s.n_modes) = s.cov;
        aux_disp.segment(at, 2 * s.n_modes) = s.disp;
        at += 2 * s.n_modes;
    }

    const auto [ga, gb, gc] = detail::split(cov_s, n_signal);
    povm.weight_cov = aux_cov + gb;
    const GuardedSolve solve(povm.weight_cov, "cov_aux + cov_B");
    const Matrix gain = solve.solve(gc.transpose()).transpose();
    povm.cov = ga - gain * gc.transpose();
    povm.cov = 0.5 * (povm.cov + povm.cov.transpose());

    const Matrix t_a = s_inv.topRows(na);
    const Matrix t_b = s_inv.bottomRows(nb);
    povm.delta_gain = t_a - gain * t_b;
    povm.delta_offset = gain * aux_disp;
    povm.weight_gain = t_b;
    povm.weight_offset = aux_disp;
    return povm;
}

// ---------------------------------------------------------------------------
// Bayes error of single-mode Gaussian measurements on the binary ensemble

/// Separation factor e(r, phi) = (1 + cosh 2r + sinh 2r cos phi) / (2 (1 + cosh 2r)), in [0, 1].
/// e = [(I + G_M)^{-1}]_{xx}: the squared signal-to-noise ratio of the measurement relative
/// to ideal x-homodyne (e -> 1 as r -> infinity at phi = 0).
inline double separation_factor(double r, double phi) {
    // (1 + G_pp) / det(I + G) scaled by e^{-2r}: (c^2 + e^{-2r} + e^{-4r} s^2) / (1 + e^{-2r})^2
    const double q = std::exp(-2.0 * r);
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    return (c * c + q + q * q * s * s) / ((1.0 + q) * (1.0 + q));
}

/// Minimum Bayes error for a Gaussian measurement whose squared signal-to-noise ratio is
/// `e` times that of ideal x-homodyne (e = 1). The erfc argument scales with sqrt(e).
inline double bayes_error_from_separation(const BinaryEnsemble& ensemble, double e) {
    ensemble.validate();
    if (!(e > 0.0 && e <= 1.0 + 1e-12)) throw InvalidInput(fmt::format("separation factor must lie in (0,1], got {}", e));
    const double pp = ensemble.p_plus;
    const double pm = ensemble.p_minus;
    if (ensemble.alpha == 0.0) return std::min(pp, pm);
    if (pp == 0.0 || pm == 0.0) return 0.0;
    const double z = std::sqrt(e) * std::numbers::sqrt2 * ensemble.alpha;
    const double bias = std::log(pp / pm) / (4.0 * z);
    return 0.5 * pp * std::erfc(z + bias) + 0.5 * pm * std::erfc(z - bias);
}

inline double bayes_error_gaussian(const BinaryEnsemble& ensemble, double r, double phi) {
    return bayes_error_from_separation(ensemble, separation_factor(r, phi));
}

} // namespace bpsk::gaussian
