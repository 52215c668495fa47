// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bpsk/bpsk.hpp"

using namespace bpsk;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double time_limit_s, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, fmt::format("exception: {}", e.what())};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = elapsed < time_limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    fmt::print("{} [{}] {}: {} ({:.3f} s, limit {} s{})\n", pass ? "PASS" : "FAIL", id, title, out.detail, elapsed,
               time_limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double width) {
    const bool rising = f(lo) < 0.0;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0.0) == rising ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome homodyne_error_free_crossing() {
    auto f = [](double a2) { return closed_forms::homodyne_error(std::sqrt(a2)) - 1e-9; };
    const bool at_ten = f(10.0) <= 0.0;
    const bool at_eight = f(8.0) > 0.0;
    if (!(f(7.0) > 0.0 && at_ten)) return {false, "no sign change of P - 1e-9 on (7, 10)"};
    const double root = bisect(f, 7.0, 10.0, 1e-6);
    const bool pass = at_ten && at_eight && root > 7.0 && root < 10.0;
    return {pass, fmt::format("P(10)={:.3e}, P(8)={:.3e}, crossing at alpha^2={:.4f}",
                              closed_forms::homodyne_error(std::sqrt(10.0)), closed_forms::homodyne_error(std::sqrt(8.0)), root)};
}

Outcome kennedy_homodyne_crossover() {
    auto f = [](double a2) { return 0.5 * std::exp(-4.0 * a2) - closed_forms::homodyne_error(std::sqrt(a2)); };
    const double root = bisect(f, 0.05, 2.0, 1e-10);
    return {root > 0.35 && root < 0.45, fmt::format("crossover at alpha^2={:.6f}", root)};
}

Outcome ideal_ordering() {
    const auto sweep = cli::run_sweep(cli::fig3_spec());
    if (!sweep.warnings.empty()) return {false, fmt::format("{} rows omitted", sweep.warnings.size())};
    std::map<double, std::map<std::string, double>> table;
    for (const auto& row : sweep.rows) table[row.alpha_sq][row.receiver] = row.p_error;
    int violations = 0;
    for (auto& [a2, p] : table) {
        const bool ok = p.at("helstrom") <= p.at("type1") + 1e-15 && p.at("type1") <= p.at("type2") + 1e-15 &&
                        p.at("type2") <= p.at("kennedy") + 1e-15 && p.at("type2") < p.at("homodyne");
        if (!ok) ++violations;
    }
    return {table.size() == 60 && violations == 0,
            fmt::format("{} grid points, {} ordering violations", table.size(), violations)};
}

Outcome type2_limits() {
    const double small = optimizer::solve_type2_gamma(1e-4, 1.0).value;
    const double large = optimizer::solve_type2_gamma(2.0, 1.0).value;
    const double d_small = std::abs(small - 1.0 / std::numbers::sqrt2);
    const double d_large = std::abs(large - 2.0);
    return {d_small < 1e-3 && d_large < 1e-6,
            fmt::format("|gamma(1e-4) - 1/sqrt2|={:.2e}, |gamma(2) - 2|={:.2e}", d_small, d_large)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int cases = 0;
    for (int i = 0; i < 50; ++i) {
        constexpr double etas[] = {0.5, 0.9, 1.0};
        constexpr double nus[] = {0.0, 1e-3};
        const double alpha = 0.05 + 1.95 * u(rng);
        const double beta = -0.8 + 1.6 * u(rng);
        const double r = -0.8 + 1.6 * u(rng);
        const double eta = etas[std::uniform_int_distribution<int>(0, 2)(rng)];
        const double nu = nus[std::uniform_int_distribution<int>(0, 1)(rng)];
        const double analytic = closed_forms::displaced_squeezed_error(alpha, beta, r, eta, nu);
        worst = std::max(worst, std::abs(analytic - fock::receiver_error_fock(alpha, beta, r, eta, nu).p_error));
        ++cases;
    }
    for (double alpha : {0.25, 0.5, 1.0}) {
        const auto t1 = optimizer::solve_type1_params(alpha, 1.0);
        const auto op = closed_forms::to_operator_parameters(t1.beta, t1.r);
        const double a1 = closed_forms::type1_objective(alpha, t1.beta, t1.r, 1.0, 0.0);
        worst = std::max(worst, std::abs(a1 - fock::receiver_error_fock(alpha, op.displacement, op.squeezing, 1.0, 0.0).p_error));

        const double gamma = optimizer::solve_type2_gamma(alpha, 1.0).value;
        const double a2 = closed_forms::displacement_error(alpha, gamma, DetectorModel::ideal());
        worst = std::max(worst, std::abs(a2 - fock::receiver_error_fock(alpha, gamma, 0.0, 1.0, 0.0).p_error));
        cases += 2;
    }
    return {worst < 1e-7, fmt::format("{} cases, max |analytic - number basis| = {:.2e}", cases, worst)};
}

Outcome gaussian_landscape() {
    const auto r_grid = cli::default_r_grid();
    const auto phi_grid = cli::default_phi_grid();
    bool pass = true;
    std::string detail;
    for (double alpha : {0.25, 1.0}) {
        const auto ens = BinaryEnsemble::equal_priors(alpha);
        const auto rep = optimizer::verify_gaussian_optimum(ens, r_grid, phi_grid);
        const auto& best = rep.points[rep.argmin];
        const double gap = std::abs(best.p_error - receivers::homodyne_limit(ens));
        pass = pass && rep.optimum_at_homodyne && !rep.degenerate && gap < 1e-6;
        detail += fmt::format("{}alpha={}: argmin (r={}, phi={}), |P - homodyne|={:.2e}", detail.empty() ? "" : "; ", alpha,
                              best.r, best.phi, gap);
    }
    return {pass, detail};
}

Outcome conditional_structure() {
    using namespace gaussian;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> modes(2, 4);
    std::uniform_real_distribution<double> amp(0.1, 1.5);
    std::uniform_real_distribution<double> sq(0.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.5);
    auto random_vec = [&](int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        return v;
    };
    double cov_dev = 0.0, affine_dev = 0.0, split_dev = 0.0, normal_dev = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = modes(rng);
        const int keep = std::uniform_int_distribution<int>(1, n - 1)(rng);
        auto op = random_symplectic(n, rng);
        op.offset = random_vec(2 * n);
        const BinaryEnsemble ens = BinaryEnsemble::equal_priors(amp(rng));
        std::vector<GaussianMeasurementSpec> parts;
        for (int k = keep; k < n; ++k) parts.push_back(GaussianMeasurementSpec::single_mode(sq(rng), ang(rng), random_vec(2)));
        auto m1 = GaussianMeasurementSpec::product(parts);
        auto m2 = m1;
        m2.outcome = random_vec(static_cast<int>(m1.outcome.size()));
        auto mid = m1;
        mid.outcome = 0.5 * (m1.outcome + m2.outcome);

        const auto o1 = binary_conditional_output(ens, op, m1);
        const auto o2 = binary_conditional_output(ens, op, m2);
        const auto om = binary_conditional_output(ens, op, mid);
        cov_dev = std::max(cov_dev, (o1.shared_cov - o2.shared_cov).cwiseAbs().maxCoeff());
        affine_dev = std::max({affine_dev, (o1.signal_disp - o2.signal_disp).cwiseAbs().maxCoeff(),
                               (o1.offset_disp + o2.offset_disp - 2.0 * om.offset_disp).cwiseAbs().maxCoeff()});
        for (int sign : {+1, -1}) {
            auto input = tensor_product(GaussianState::coherent(sign * ens.alpha), GaussianState::vacuum(n - 1));
            const auto direct = condition_on_partial_measurement(apply_gaussian_unitary(input, op), keep, m1);
            const Vector predicted = sign * o1.signal_disp + o1.offset_disp;
            split_dev = std::max({split_dev, (direct.state.disp - predicted).cwiseAbs().maxCoeff(),
                                  (direct.state.cov - o1.shared_cov).cwiseAbs().maxCoeff()});
        }
        const auto sd = pure_normal_form(o1.shared_cov);
        const Matrix id = sd.matrix * o1.shared_cov * sd.matrix.transpose();
        normal_dev = std::max({normal_dev, (id - Matrix::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff(),
                               sd.symplectic_defect()});
    }
    const bool pass = cov_dev < 1e-9 && affine_dev < 1e-9 && split_dev < 1e-9 && normal_dev < 1e-9;
    return {pass, fmt::format("200 models: covariance {:.1e}, affine {:.1e}, +-signal split {:.1e}, normal form {:.1e}",
                              cov_dev, affine_dev, split_dev, normal_dev)};
}

Outcome practical_detector() {
    auto spec = cli::fig4_spec();
    const auto sweep = cli::run_sweep(spec);
    std::map<double, std::map<std::string, double>> table;
    for (const auto& row : sweep.rows) table[row.alpha_sq][row.receiver] = row.p_error;
    int violations = 0;
    for (auto& [a2, p] : table) {
        if (!(p.at("type2_imperfect") < p.at("kennedy"))) ++violations;
    }

    const auto det = DetectorModel::practical();
    const double alpha = std::sqrt(0.5);
    montecarlo::McConfig mc;
    mc.trials = 1'000'000;
    mc.seed = 4242;
    mc.ensemble = BinaryEnsemble::equal_priors(alpha);
    mc.detector = det;
    mc.gamma = optimizer::solve_type2_gamma_imperfect(alpha, det).value;
    const auto est = montecarlo::simulate_type2(mc);
    const double exact = closed_forms::displacement_error(alpha, mc.gamma, det);
    const double z = (est.p_hat - exact) / est.std_err;
    const bool pass = table.size() == 60 && violations == 0 && std::abs(z) < 4.0;
    return {pass, fmt::format("{} points, {} violations; simulation {:.6f} +- {:.1e} vs {:.6f} (z={:.2f})", table.size(),
                              violations, est.p_hat, est.std_err, exact, z)};
}

Outcome type1_stationarity() {
    double worst = 0.0;
    const double h = 1e-6;
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double eta : {0.9, 1.0}) {
            const auto s = optimizer::solve_type1_params(alpha, eta);
            auto f = [&](double b, double r) { return closed_forms::type1_objective(alpha, b, r, eta, 0.0); };
            const double gb = (f(s.beta + h, s.r) - f(s.beta - h, s.r)) / (2 * h);
            const double gr = (f(s.beta, s.r + h) - f(s.beta, s.r - h)) / (2 * h);
            worst = std::max({worst, std::abs(gb), std::abs(gr)});
        }
    }
    return {worst < 1e-6, fmt::format("max |finite-difference gradient| = {:.2e}", worst)};
}

} // namespace

int main() {
    run(1, "homodyne limit reaches 1e-9 only for alpha^2 in (7, 10)", 1.0, homodyne_error_free_crossing);
    run(2, "Kennedy beats homodyne above alpha^2 in (0.35, 0.45)", 1.0, kennedy_homodyne_crossover);
    run(3, "ideal-detector ordering on the 60-point grid", 5.0, ideal_ordering);
    run(4, "displacement-receiver gamma limits", 0.1, type2_limits);
    run(5, "closed forms agree with the number-basis oracle", 60.0, oracle_equivalence);
    run(6, "Gaussian-measurement landscape minimum at homodyne", 1.0, gaussian_landscape);
    run(7, "conditional-output structure on random Gaussian models", 30.0, conditional_structure);
    run(8, "practical detector: optimised displacement beats Kennedy; simulation agrees", 30.0, practical_detector);
    run(9, "squeeze + displace optimum is stationary", 5.0, type1_stationarity);
    fmt::print("{} of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
