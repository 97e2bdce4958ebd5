// Acceptance suite: one pass/fail line per criterion, nonzero exit when a
// blocking criterion fails. Tolerances are pinned in the checks themselves.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ness/criticality.hpp"
#include "ness/experiments.hpp"
#include "ness/solver.hpp"

using namespace ness;
constexpr Complex II{0.0, 1.0};
constexpr double pi = std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

struct Gate {
    int failures = 0;

    void report(int id, bool pass, double seconds, double budget, const std::string& detail) {
        std::printf("CRITERION %2d: %s (%s; %.2f s / budget %.0f s)\n", id,
                    pass ? "PASS" : "FAIL", detail.c_str(), seconds, budget);
        if (!pass) ++failures;
    }
};

std::vector<SweepPoint> family_sweep(const LatticeModel& model, int coeff) {
    SweepSpec spec;
    spec.model = model;
    spec.generatorIndex = 0;
    spec.coeffIndex = coeff;
    spec.field = SweepSpec::Field::G;
    spec.start = 1e-4;
    spec.stop = 2e-2;
    spec.count = 25;
    spec.critical_value = 0.0;
    return sweep(spec);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

} // namespace

int main() {
    Gate gate;
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double lambda_two = 0.0, lambda_three = 0.0;
    std::vector<SweepPoint> sweep_two, sweep_three;

    // 1. two-site static exponent: lambda = 1.00 +- 0.02 on |g| in [1e-4, 1e-2]
    {
        const auto t0 = Clock::now();
        sweep_two = family_sweep(make_odd_model({1.0, 1.0}), 1);
        const ExponentFit fit = fit_static_exponent(sweep_two, 0.0, 1e-4, 1e-2);
        lambda_two = fit.exponent;
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(1, std::abs(fit.exponent - 1.0) <= 0.02 && dt < 10.0, dt, 10,
                    fmt("two-site lambda = %.4f +- %.1e", fit.exponent, fit.standard_error));
    }

    // 2. three-site slow family: lambda = 0.50 +- 0.02
    {
        const auto t0 = Clock::now();
        sweep_three = family_sweep(make_odd_model({1.0, 2.0, 1.0}), 1);
        const ExponentFit fit = fit_static_exponent(sweep_three, 0.0, 1e-4, 1e-2);
        lambda_three = fit.exponent;
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(2, std::abs(fit.exponent - 0.5) <= 0.02 && dt < 10.0, dt, 10,
                    fmt("three-site lambda = %.4f +- %.1e", fit.exponent, fit.standard_error));
    }

    // 3. three-site staircase family: lambda = 1.00 +- 0.02
    {
        const auto t0 = Clock::now();
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        const auto pts = family_sweep(make_odd_model({std::conj(w3), 1.0, w3}), 1);
        const ExponentFit fit = fit_static_exponent(pts, 0.0, 1e-4, 1e-2);
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(3, std::abs(fit.exponent - 1.0) <= 0.02 && dt < 10.0, dt, 10,
                    fmt("staircase lambda = %.4f +- %.1e", fit.exponent, fit.standard_error));
    }

    // 4. pump/loss family: xi slope 1.00 +- 0.02 and gap slope 2.00 +- 0.05
    {
        const auto t0 = Clock::now();
        const auto pts = family_sweep(make_quantum_optical_model(1.0, 1.0, 0.1), 1);
        const ExponentFit xi_fit = fit_static_exponent(pts, 0.0, 1e-4, 1e-2);
        const ExponentFit gap_fit = fit_dynamical_exponent(pts, 0.0, xi_fit.exponent, 1e-4, 1e-2);
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        const bool pass = std::abs(xi_fit.exponent - 1.0) <= 0.02 &&
                          std::abs(gap_fit.exponent - 2.0) <= 0.05 && dt < 20.0;
        gate.report(4, pass, dt, 20,
                    fmt("xi slope = %.4f, gap slope = %.4f, z = %.4f", xi_fit.exponent,
                        gap_fit.exponent, gap_fit.dynamical_z));
    }

    // 5. z * lambda = 2: fitted kappa*lambda at the minimal-exponent points
    {
        const auto t0 = Clock::now();
        const ExponentFit dyn_two = fit_dynamical_exponent(sweep_two, 0.0, lambda_two, 1e-4, 1e-2);
        const ExponentFit dyn_three =
            fit_dynamical_exponent(sweep_three, 0.0, lambda_three, 1e-4, 1e-2);
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        const bool pass = std::abs(dyn_two.exponent - 2.0) <= 0.05 &&
                          std::abs(dyn_three.exponent - 2.0) <= 0.05;
        gate.report(5, pass, dt, 10,
                    fmt("kappa*lambda = %.4f (two-site), %.4f (three-site)", dyn_two.exponent,
                        dyn_three.exponent));
    }

    // 6. exponent-set membership for 200 generators pushed onto criticality
    {
        const auto t0 = Clock::now();
        int produced = 0, in_set = 0;
        while (produced < 200) {
            const int N = 2 + static_cast<int>(unit(rng) * 4.0);
            Complex z0;
            int M;
            if (unit(rng) < 0.5 || N < 3) {
                z0 = unit(rng) < 0.5 ? Complex(1.0) : Complex(-1.0);
                M = 1 + static_cast<int>(unit(rng) * (N - 1));
            } else {
                z0 = std::polar(1.0, -pi + 2 * pi * unit(rng));
                M = 1 + static_cast<int>(unit(rng) * ((N - 1) / 2));
            }
            M = std::min(M, N - 1);
            CriticalSolutionFamily family;
            try {
                family = solve_critical_parameters(N, M, z0);
            } catch (const NoSolutionError&) {
                continue;
            }
            auto coeffs = family.coefficients;
            for (const auto& dir : family.freeDirections) {
                const Complex a = std::polar(0.5 * unit(rng), 2 * pi * unit(rng));
                for (size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += a * dir[j];
            }
            CriticalityReport report;
            try {
                report = predict_exponents(make_odd_generator(coeffs));
            } catch (const Error&) {
                continue;
            }
            if (!report.critical) continue;
            ++produced;
            for (int k = 1; k <= 4; ++k)
                if (std::abs(report.predictedLambda - 1.0 / k) < 1e-12) {
                    ++in_set;
                    break;
                }
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(6, in_set == 200 && dt < 60.0, dt, 60,
                    fmt("%.0f/200 predicted exponents in {1, 1/2, 1/3, 1/4}",
                        static_cast<double>(in_set)));
    }

    // 7. residue vs quadrature on 100 random gapped generators, sup_d <= 1e-10
    {
        const auto t0 = Clock::now();
        int done = 0;
        double worst = 0.0;
        while (done < 100) {
            const int N = 2 + static_cast<int>(unit(rng) * 4.0);
            std::vector<Complex> s{1.0};
            for (int j = 1; j < N; ++j)
                s.push_back(std::polar(0.2 + 1.3 * unit(rng), -pi + 2 * pi * unit(rng)));
            const auto frac = to_symbol_fraction(make_odd_generator(s));
            const RootSet rs = denominator_roots(frac);
            if (rs.has_on_circle()) continue;
            const auto closest = rs.closest_inside();
            if (closest && std::abs(closest->z) > 0.95) continue;
            CorrelationProfile pr, pq;
            try {
                pr = residue_correlations(frac, 15);
                pq = correlations_quadrature(symbol_evaluator(make_odd_model(s)), 15);
            } catch (const Error&) {
                continue;
            }
            for (int d = 0; d <= 15; ++d)
                worst = std::max(worst, std::abs(pr.values[static_cast<size_t>(d)] -
                                                 pq.values[static_cast<size_t>(d)]));
            ++done;
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(7, worst <= 1e-10 && dt < 60.0, dt, 60,
                    fmt("sup deviation = %.2e over 100 generators", worst));
    }

    // 8. periodic L = 256 steady state vs symbol quadrature, |d| <= 20 at 1e-8
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        bool densely_checked = false;
        const struct {
            bool odd_only;
            double a, b;
        } sets[5] = {{true, 1.0, 0.3},   // two-site odd-only, nu=1, g=0.3
                     {true, 0.7, 0.8},   // two-site odd-only, nu=0.7, g=0.8
                     {false, 0.5, 0.3},  // pump/loss nu, g
                     {false, 0.8, -0.6}, // pump/loss
                     {false, 0.4, 1.0}};
        for (const auto& p : sets) {
            const LatticeModel inf_model =
                p.odd_only ? make_odd_model({1.0, std::polar(p.a, p.b)})
                           : make_quantum_optical_model(1.0, p.a, p.b);
            LatticeModel fin_model = inf_model;
            fin_model.chain = ChainSpec::finite(256, true);
            CorrelationMatrix bulk = solve_lyapunov_circulant(fin_model);
            if (!densely_checked) {
                // one dense Schur-based solve confirms the fast path
                const CorrelationMatrix dense =
                    solve_lyapunov_finite(build_damping_matrices(fin_model));
                worst = std::max(worst, (dense.gamma - bulk.gamma).cwiseAbs().maxCoeff());
                densely_checked = true;
            }
            const CorrelationProfile quad =
                correlations_quadrature(symbol_evaluator(inf_model), 20);
            for (int d = 1; d <= 20; ++d) {
                const Complex forward = -II * bulk.gamma(0, 2 * d);
                const Complex backward = -II * bulk.gamma(2 * d, 0);
                worst = std::max(worst,
                                 std::abs(forward - quad.values[static_cast<size_t>(d)]));
                worst = std::max(worst,
                                 std::abs(backward + quad.values[static_cast<size_t>(d)]));
            }
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(8, worst <= 1e-8 && dt < 120.0, dt, 120,
                    fmt("sup deviation = %.2e over 5 parameter sets", worst));
    }

    // 9. exact Liouvillian at L = 3 vs Gaussian solver, two- and four-point
    {
        const auto t0 = Clock::now();
        double worst2 = 0.0, worst4 = 0.0;
        const double params[5][2] = {{0.5, 0.3}, {1.2, 0.7}, {0.8, -0.4}, {0.3, 1.0}, {1.0, 0.5}};
        for (const auto& p : params) {
            const auto model =
                make_quantum_optical_model(1.0, p[0], p[1], ChainSpec::finite(3, true));
            const auto oracle = exact_liouvillian_oracle(model);
            const auto gaussian = solve_lyapunov_finite(build_damping_matrices(model));
            worst2 = std::max(worst2, (oracle.gamma - gaussian.gamma).cwiseAbs().maxCoeff());
            for (const auto idx : std::vector<std::array<int, 4>>{
                     {0, 1, 2, 3}, {0, 2, 3, 5}, {1, 2, 4, 5}, {0, 1, 4, 5}, {2, 3, 4, 5}})
                worst4 = std::max(worst4, std::abs(wick_four_point(gaussian, idx) -
                                                   oracle.four_point(idx)));
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(9, worst2 <= 1e-8 && worst4 <= 1e-8 && dt < 60.0, dt, 60,
                    fmt("two-point dev = %.2e, four-point dev = %.2e", worst2, worst4));
    }

    // 10. structural invariants across the test-model zoo
    {
        const auto t0 = Clock::now();
        bool pass = true;
        std::string detail = "symbol bound, half filling, positivity all hold";
        std::vector<LatticeModel> zoo;
        zoo.push_back(make_odd_model({1.0, 1.0}));
        zoo.push_back(make_odd_model({1.0, std::polar(1.0, 0.1)}));
        zoo.push_back(make_odd_model({1.0, 2.0, 1.0}));
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        zoo.push_back(make_odd_model({std::conj(w3), 1.0, w3}));
        zoo.push_back(make_odd_model({1.0, II}));
        zoo.push_back(make_quantum_optical_model(1.0, 0.5, 0.3));
        zoo.push_back(make_quantum_optical_model(1.3, 0.8, -0.7));
        for (int k = 0; k < 10; ++k) {
            std::vector<Complex> s{1.0};
            const int N = 2 + static_cast<int>(unit(rng) * 4.0);
            for (int j = 1; j < N; ++j)
                s.push_back(std::polar(0.2 + 1.2 * unit(rng), -pi + 2 * pi * unit(rng)));
            zoo.push_back(make_odd_model(s));
        }

        for (const auto& model : zoo) {
            // symbol eigenvalues within [-1, 1] + 1e-9
            for (int k = 0; k < 64; ++k) {
                const double phi = -pi + 2 * pi * (k + 0.5) / 64;
                Eigen::Matrix2cd gamma;
                try {
                    gamma = solve_symbol_pointwise(model, phi);
                } catch (const NumericalError&) {
                    continue; // isolated critical momentum
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gamma,
                                                                   Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() < -1.0 - 1e-9 ||
                    es.eigenvalues().maxCoeff() > 1.0 + 1e-9) {
                    pass = false;
                    detail = "symbol eigenvalue bound violated";
                }
            }
            // occupation exactly one half for odd-only models
            if (model.is_odd_only()) {
                LatticeModel finite = model;
                finite.chain = ChainSpec::finite(24, true);
                const double n =
                    occupation(solve_lyapunov_finite(build_damping_matrices(finite)));
                if (std::abs(n - 0.5) > 1e-10) {
                    pass = false;
                    detail = "odd-only occupation deviates from one half";
                }
                // denominator positivity on 4096 circle samples
                const SymbolFraction frac = to_symbol_fraction(model);
                const double scale = std::max(1.0, frac.denominator.max_abs_coefficient());
                for (int k = 0; k < 4096; ++k) {
                    const double v =
                        frac.denominator.eval_circle(2 * pi * k / 4096.0).real();
                    if (v < -1e-12 * scale) {
                        pass = false;
                        detail = "denominator negativity on the unit circle";
                    }
                }
            }
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        gate.report(10, pass, dt, 60, detail);
    }

    // 11. manifold-dimension report (non-blocking)
    {
        const auto t0 = Clock::now();
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        struct Family {
            const char* name;
            LindbladGenerator gen;
            int formula;
        };
        const std::vector<Family> families = {
            {"two-site", make_odd_generator({1.0, -1.0}), 0},
            {"three-site slow", make_odd_generator({1.0, 2.0, 1.0}), 0},
            {"three-site staircase", make_odd_generator({std::conj(w3), 1.0, w3}), 2}};
        std::string detail;
        bool agree = true;
        for (const auto& fam : families) {
            int measured = -1;
            try {
                measured = empirical_manifold_dimension(fam.gen);
            } catch (const Error&) {
            }
            if (!detail.empty()) detail += ", ";
            detail += std::string(fam.name) + ": measured " + std::to_string(measured) +
                      " vs formula " + std::to_string(fam.formula);
            agree = agree && (measured == fam.formula);
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("CRITERION 11: %s (non-blocking report; %s; %.2f s)\n",
                    agree ? "PASS" : "REPORTED-DISCREPANCY", detail.c_str(), dt);
    }

    if (gate.failures == 0) {
        std::printf("ACCEPTANCE: all blocking criteria passed\n");
        return 0;
    }
    std::printf("ACCEPTANCE: %d blocking criteria failed\n", gate.failures);
    return 1;
}
