#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "ness/criticality.hpp"
#include "ness/experiments.hpp"

using namespace ness;
constexpr Complex II{0.0, 1.0};
constexpr double pi = std::numbers::pi;

namespace {

std::vector<Complex> random_gapped_coeffs(std::mt19937& rng, int maxN,
                                          double max_root_mod = 0.95) {
    std::uniform_real_distribution<double> nu(0.2, 1.5), ph(-pi, pi);
    std::uniform_int_distribution<int> span(2, maxN);
    while (true) {
        std::vector<Complex> s{1.0};
        const int N = span(rng);
        for (int j = 1; j < N; ++j) s.push_back(std::polar(nu(rng), ph(rng)));
        const auto frac = to_symbol_fraction(make_odd_generator(s));
        const RootSet rs = denominator_roots(frac);
        if (rs.has_on_circle()) continue;
        const auto closest = rs.closest_inside();
        if (closest && std::abs(closest->z) > max_root_mod) continue;
        return s;
    }
}

} // namespace

TEST_CASE("symbol fraction coefficients are assembled exactly") {
    SUBCASE("single site") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0}));
        CHECK(f.numerator.is_zero());
        CHECK(f.denominator.coefficients().size() == 1);
        CHECK(std::abs(f.denominator.coefficient(0) - Complex(2.0)) < 1e-15);
    }
    SUBCASE("two-site closed form") {
        const double nu = 0.8, g = 0.5;
        const auto f = to_symbol_fraction(make_odd_generator({1.0, std::polar(nu, g)}));
        CHECK(std::abs(f.denominator.coefficient(0) - Complex(2.0 * (1.0 + nu * nu))) < 1e-14);
        CHECK(std::abs(f.denominator.coefficient(1) - Complex(2.0 * nu * std::cos(g))) < 1e-14);
        CHECK(std::abs(f.denominator.coefficient(-1) - Complex(2.0 * nu * std::cos(g))) < 1e-14);
    }
    SUBCASE("circle values equal r(phi) + r(-phi)") {
        std::mt19937 rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const auto s = random_gapped_coeffs(rng, 5, 0.999);
            const auto gen = make_odd_generator(s);
            const auto f = to_symbol_fraction(gen);
            for (int k = 0; k < 32; ++k) {
                const double phi = 2 * pi * k / 32.0;
                const double expected = reservoir_symbol(gen, phi).real() +
                                        reservoir_symbol(gen, -phi).real();
                CHECK(std::abs(f.denominator.eval_circle(phi) - Complex(expected)) < 1e-12);
            }
        }
    }
    SUBCASE("even couplings are unsupported") {
        LindbladGenerator mixed = make_odd_generator({1.0, 0.4});
        mixed.evenCoeffs[1] = ComplexAmplitude::make(0.2, 0.0);
        CHECK_THROWS_AS(to_symbol_fraction(mixed), UnsupportedGeneratorError);
    }
}

TEST_CASE("pump/loss family denominator matches its closed trigonometric form") {
    const double chi = 1.0, nu = 0.7, g = 0.4;
    const SymbolFraction f = quantum_optical_fraction(chi, nu, g);
    for (int k = 0; k < 64; ++k) {
        const double phi = 2 * pi * k / 64.0;
        const double a = (1 + nu * nu) * (1 + chi * chi);
        const double b = 2 * nu * (chi * chi + std::cos(g));
        const double first = a + b * std::cos(phi);
        const double s = 2 * nu * std::sin(g) * std::sin(phi);
        CHECK(std::abs(f.denominator.eval_circle(phi) - Complex(first * first - s * s)) < 1e-12);
    }
}

TEST_CASE("denominator roots of the two-site family") {
    SUBCASE("gapped: the closed-form quadratic pair") {
        const double g = 0.1;
        const auto f = to_symbol_fraction(make_odd_generator({1.0, std::polar(1.0, g)}));
        const RootSet rs = denominator_roots(f);
        REQUIRE(rs.roots.size() == 2);
        const double inner = (-1.0 + std::sin(g)) / std::cos(g);
        const double outer = (-1.0 - std::sin(g)) / std::cos(g);
        CHECK(std::abs(rs.roots[1].z - Complex(inner)) < 1e-10);
        CHECK(std::abs(rs.roots[0].z - Complex(outer)) < 1e-10);
        CHECK(rs.roots[1].cls == RootClass::Inside);
        CHECK(rs.roots[0].cls == RootClass::Outside);
        CHECK(std::abs(std::abs(rs.roots[1].z) - 0.904685) < 2e-6);
    }
    SUBCASE("critical three-site family piles four roots at -1") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, 2.0, 1.0}));
        const RootSet rs = denominator_roots(f);
        CHECK(rs.cleared_degree == 4);
        int total = 0;
        for (const auto& r : rs.roots) {
            total += r.multiplicity;
            CHECK(std::abs(r.z - Complex(-1.0)) < 2e-3); // multiple-root scatter
        }
        CHECK(total == 4);
    }
    SUBCASE("vanishing cosine leaves a constant denominator") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, II}));
        const RootSet rs = denominator_roots(f);
        CHECK(rs.empty());
        CHECK(rs.cleared_degree == 0);
    }
    SUBCASE("roots come in reciprocal-conjugate pairs") {
        std::mt19937 rng(47);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f =
                to_symbol_fraction(make_odd_generator(random_gapped_coeffs(rng, 5, 0.999)));
            const RootSet rs = denominator_roots(f);
            for (const auto& r : rs.roots) {
                const Complex partner = 1.0 / std::conj(r.z);
                bool found = false;
                for (const auto& q : rs.roots)
                    if (std::abs(q.z - partner) < 1e-8) found = true;
                CHECK(found);
            }
        }
    }
}

TEST_CASE("residue correlations") {
    SUBCASE("strictly local symbol: only the numerator tail contributes") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, II}));
        const CorrelationProfile p = residue_correlations(f, 5);
        CHECK(std::abs(p.values[1] - Complex(0.0, 0.5)) < 1e-14);
        for (int d = 2; d <= 5; ++d) CHECK(std::abs(p.values[static_cast<size_t>(d)]) < 1e-14);
    }
    SUBCASE("two-site gapped family matches quadrature to 1e-10") {
        const auto s = std::vector<Complex>{1.0, std::polar(1.0, 0.1)};
        const auto f = to_symbol_fraction(make_odd_generator(s));
        const CorrelationProfile pr = residue_correlations(f, 10);
        const CorrelationProfile pq = correlations_quadrature(symbol_evaluator(make_odd_model(s)), 10);
        for (int d = 0; d <= 10; ++d)
            CHECK(std::abs(pr.values[static_cast<size_t>(d)] -
                           pq.values[static_cast<size_t>(d)]) < 1e-10);
    }
    SUBCASE("detuned staircase matches quadrature to 1e-10") {
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        const std::vector<Complex> s{std::conj(w3), std::polar(1.0, 0.15), w3};
        const auto f = to_symbol_fraction(make_odd_generator(s));
        const CorrelationProfile pr = residue_correlations(f, 10);
        const CorrelationProfile pq = correlations_quadrature(symbol_evaluator(make_odd_model(s)), 10);
        for (int d = 0; d <= 10; ++d)
            CHECK(std::abs(pr.values[static_cast<size_t>(d)] -
                           pq.values[static_cast<size_t>(d)]) < 1e-10);
    }
    SUBCASE("a pole on the circle raises the criticality error") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, 2.0, 1.0}));
        CHECK_THROWS_AS(residue_correlations(f, 5), CriticalityError);
    }
}

TEST_CASE("residues equal quadrature for random gapped generators") {
    std::mt19937 rng(2718);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = random_gapped_coeffs(rng, 5);
        const auto f = to_symbol_fraction(make_odd_generator(s));
        const CorrelationProfile pr = residue_correlations(f, 15);
        const CorrelationProfile pq =
            correlations_quadrature(symbol_evaluator(make_odd_model(s)), 15);
        for (int d = 0; d <= 15; ++d)
            CHECK(std::abs(pr.values[static_cast<size_t>(d)] -
                           pq.values[static_cast<size_t>(d)]) < 1e-10);
    }
}

TEST_CASE("correlation length") {
    SUBCASE("two-site closed form") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, std::polar(1.0, 0.1)}));
        const double expected = -std::log((1.0 - std::sin(0.1)) / std::cos(0.1));
        CHECK(correlation_length_inverse(f) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(correlation_length_inverse(f) == doctest::Approx(0.100167).epsilon(1e-5));
    }
    SUBCASE("approaches zero linearly in the detuning") {
        const double x1 = correlation_length_inverse(
            to_symbol_fraction(make_odd_generator({1.0, std::polar(1.0, 1e-3)})));
        const double x2 = correlation_length_inverse(
            to_symbol_fraction(make_odd_generator({1.0, std::polar(1.0, 2e-3)})));
        CHECK(x2 / x1 == doctest::Approx(2.0).epsilon(1e-2));
    }
    SUBCASE("strictly local correlations report the infinite sentinel") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, II}));
        CHECK(std::isinf(correlation_length_inverse(f)));
    }
    SUBCASE("exactly critical parameters give zero") {
        const auto f = to_symbol_fraction(make_odd_generator({1.0, 2.0, 1.0}));
        CHECK(correlation_length_inverse(f) == 0.0);
    }
}

TEST_CASE("matching the real-space decay: xi from roots vs log-slope fit") {
    std::mt19937 rng(1234);
    int accepted = 0;
    while (accepted < 5) {
        const auto s = random_gapped_coeffs(rng, 4, 0.9);
        const auto f = to_symbol_fraction(make_odd_generator(s));
        const RootSet rs = denominator_roots(f);
        // require a unique closest root so the asymptote is clean
        std::vector<double> mods;
        for (const auto& r : rs.roots)
            if (r.cls == RootClass::Inside) mods.push_back(std::abs(r.z));
        if (mods.empty()) continue;
        std::sort(mods.begin(), mods.end());
        if (mods.size() >= 2 && mods[mods.size() - 2] / mods.back() > 0.8) continue;
        if (f.numerator.is_zero()) continue;
        const double xi_inv = correlation_length_inverse(f);
        if (!(xi_inv > 0.1)) continue; // keep d = 60 above the noise floor

        const CorrelationProfile p = residue_correlations(f, 60);
        std::vector<double> xs, ys;
        for (int d = 20; d <= 60; ++d) {
            const double v = std::abs(p.values[static_cast<size_t>(d)]);
            if (v < 1e-280) break;
            xs.push_back(d);
            ys.push_back(std::log(v));
        }
        if (xs.size() < 10) continue;
        double sx = 0, sy = 0;
        for (size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
        }
        const double mx = sx / xs.size(), my = sy / xs.size();
        double sxx = 0, sxy = 0;
        for (size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        const double slope = -sxy / sxx;
        CHECK(slope == doctest::Approx(xi_inv).epsilon(0.01));
        ++accepted;
    }
}

TEST_CASE("damping spectrum closed forms") {
    std::vector<double> grid;
    for (int k = 0; k < 64; ++k) grid.push_back(2 * pi * k / 64.0);

    const auto single = damping_spectrum(make_odd_generator({1.0}), grid);
    for (double v : single) CHECK(v == doctest::Approx(-2.0).epsilon(1e-14));

    const auto two = damping_spectrum(make_odd_generator({1.0, 1.0}), grid);
    for (size_t k = 0; k < grid.size(); ++k) {
        CHECK(two[k] == doctest::Approx(-4.0 * (1.0 + std::cos(grid[k]))).epsilon(1e-12));
        CHECK(two[k] <= 1e-12);
    }
}

TEST_CASE("damping gap closed forms") {
    const auto f = to_symbol_fraction(make_odd_generator({1.0, std::polar(1.0, 0.1)}));
    const double expected = 8.0 * std::pow(std::sin(0.05), 2);
    CHECK(damping_gap(f) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(damping_gap(f) == doctest::Approx(0.0199834).epsilon(1e-5));

    CHECK(damping_gap(to_symbol_fraction(make_odd_generator({1.0}))) ==
          doctest::Approx(2.0).epsilon(1e-14));

    // pump/loss family at criticality: both the closed-form denominator and
    // the band minimum vanish
    CHECK(damping_gap(quantum_optical_fraction(1.0, 1.0, 0.0)) < 1e-12);
    CHECK(damping_gap_symbol(make_quantum_optical_model(1.0, 1.0, 0.0)) < 1e-12);
}

TEST_CASE("finite-size damping gap") {
    SUBCASE("single-site value") {
        const auto m = make_odd_model({1.0}, ChainSpec::finite(6, true));
        CHECK(damping_gap_finite(build_damping_matrices(m)) == doctest::Approx(2.0));
    }
    SUBCASE("discretization error against the band minimum") {
        const auto m = make_odd_model({1.0, std::polar(1.0, 0.1)}, ChainSpec::finite(64, true));
        const double fin = damping_gap_finite(build_damping_matrices(m));
        const double sym = damping_gap(to_symbol_fraction(make_odd_generator(
            {1.0, std::polar(1.0, 0.1)})));
        CHECK(std::abs(fin - sym) < 1e-3);
    }
    SUBCASE("critical parameters close as 1/L^2") {
        const auto m = make_odd_model({1.0, 1.0}, ChainSpec::finite(63, true));
        const double gap = damping_gap_finite(build_damping_matrices(m));
        CHECK(gap == doctest::Approx(2.0 * pi * pi / (63.0 * 63.0)).epsilon(1e-3));
    }
}

TEST_CASE("criticality conditions at the reference points") {
    const auto two = criticality_conditions(make_odd_generator({1.0, -1.0}), 1.0);
    CHECK(std::abs(two.first) < 1e-14);
    CHECK(std::abs(two.second) < 1e-14);

    const auto three = criticality_conditions(make_odd_generator({1.0, 2.0, 1.0}), -1.0);
    CHECK(std::abs(three.first) < 1e-14);
    CHECK(std::abs(three.second) < 1e-14);

    const auto single = criticality_conditions(make_odd_generator({1.0}), 1.0);
    CHECK(std::abs(single.first - Complex(1.0)) < 1e-14); // N=1 never critical
}

TEST_CASE("criticality conditions vanish iff d has a circle zero") {
    std::mt19937 rng(8);
    // critical direction: constructed solutions have a genuine circle zero
    for (int trial = 0; trial < 5; ++trial) {
        std::uniform_real_distribution<double> ph(-pi, pi);
        const Complex z0 = (trial % 2 == 0) ? Complex(-1.0) : Complex(1.0);
        const auto fam = solve_critical_parameters(3, 1, z0);
        auto coeffs = fam.coefficients;
        if (!fam.freeDirections.empty())
            for (size_t j = 0; j < coeffs.size(); ++j)
                coeffs[j] += 0.3 * std::polar(1.0, ph(rng)) * fam.freeDirections[0][j];
        const auto gen = make_odd_generator(coeffs);
        const auto conds = criticality_conditions(gen, z0);
        CHECK(std::abs(conds.first) < 1e-10);
        CHECK(std::abs(conds.second) < 1e-10);
        CHECK(damping_gap(to_symbol_fraction(gen)) < 1e-10);
    }
    // gapped direction: no circle zero and nonvanishing residuals everywhere
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_gapped_coeffs(rng, 4, 0.95);
        const auto gen = make_odd_generator(s);
        const auto frac = to_symbol_fraction(gen);
        const double gap = damping_gap(frac);
        CHECK(gap > 1e-8);
        for (int k = 0; k < 16; ++k) {
            const auto conds =
                criticality_conditions(gen, std::polar(1.0, 2 * pi * k / 16.0));
            const double r = std::max(std::abs(conds.first), std::abs(conds.second));
            CHECK(r > 1e-8);
        }
    }
}

TEST_CASE("moment conditions at the reference points") {
    SUBCASE("three-site slow family") {
        const auto mm = moment_conditions(make_odd_generator({1.0, 2.0, 1.0}), -1.0, 2);
        CHECK(mm[0].magnitude() < 1e-14);
        CHECK(mm[1].magnitude() < 1e-14);
        CHECK(std::abs(mm[2].at_z0 - Complex(2.0)) < 1e-14);
    }
    SUBCASE("staircase family") {
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        const auto mm = moment_conditions(make_odd_generator({std::conj(w3), 1.0, w3}), 1.0, 1);
        CHECK(mm[0].magnitude() < 1e-14);
        CHECK(mm[1].magnitude() > 0.5);
    }
    SUBCASE("sparse three-site generator at z0 = i") {
        const auto mm = moment_conditions(make_odd_generator({1.0, 0.0, 1.0}), II, 1);
        CHECK(mm[0].magnitude() < 1e-14);
        CHECK(std::abs(mm[1].at_z0 - Complex(-2.0)) < 1e-14);
    }
}

TEST_CASE("exponent prediction at the three reference families") {
    SUBCASE("two-site") {
        const auto r = predict_exponents(make_odd_generator({1.0, -1.0}));
        REQUIRE(r.critical);
        REQUIRE(r.candidates.size() == 1);
        CHECK(r.predictedLambda == doctest::Approx(1.0));
        CHECK(r.candidates[0].mergingRootCount == 2);
        CHECK(r.predictedManifoldDim == 0);
        CHECK(std::abs(r.candidates[0].z0 - Complex(1.0)) < 1e-9);
    }
    SUBCASE("three-site slow family") {
        const auto r = predict_exponents(make_odd_generator({1.0, 2.0, 1.0}));
        REQUIRE(r.critical);
        CHECK(r.predictedLambda == doctest::Approx(0.5));
        CHECK(r.candidates[0].mergingRootCount == 4);
        CHECK(r.predictedManifoldDim == 0);
    }
    SUBCASE("three-site staircase family") {
        const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
        const auto r = predict_exponents(make_odd_generator({std::conj(w3), 1.0, w3}));
        REQUIRE(r.critical);
        CHECK(r.predictedLambda == doctest::Approx(1.0));
        CHECK(r.predictedManifoldDim == 2);
    }
    SUBCASE("gapped generator reports non-critical with the attached length") {
        const auto r = predict_exponents(make_odd_generator({1.0, std::polar(1.0, 0.1)}));
        CHECK(!r.critical);
        CHECK(r.xi_inverse == doctest::Approx(0.100167).epsilon(1e-5));
    }
    SUBCASE("normalization factor is recorded") {
        const auto r = predict_exponents(make_odd_generator({2.0, -2.0}));
        REQUIRE(r.critical);
        CHECK(r.normalizationFactor == doctest::Approx(2.0));
        CHECK(r.predictedLambda == doctest::Approx(1.0));
    }
}

TEST_CASE("numerator vanishes at the critical point") {
    for (const auto& s : {std::vector<Complex>{1.0, -1.0}, std::vector<Complex>{1.0, 2.0, 1.0}}) {
        const auto r = predict_exponents(make_odd_generator(s));
        REQUIRE(r.critical);
        const auto f = to_symbol_fraction(make_odd_generator(s));
        if (f.numerator.is_zero()) continue;
        const double scale = f.numerator.max_abs_coefficient();
        CHECK(std::abs(f.numerator.eval(r.candidates[0].z0)) <= 1e-8 * scale);
    }
}

TEST_CASE("merging-root count times exponent equals two at minimal-exponent points") {
    for (const auto& s : {std::vector<Complex>{1.0, -1.0}, std::vector<Complex>{1.0, 2.0, 1.0},
                          std::vector<Complex>{1.0, 3.0, 3.0, 1.0}}) {
        const auto r = predict_exponents(make_odd_generator(s));
        REQUIRE(r.critical);
        int kappa = 0;
        for (const auto& c : r.candidates) kappa = std::max(kappa, c.mergingRootCount);
        CHECK(kappa * r.predictedLambda == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("denominator positivity on the circle for random odd-only generators") {
    std::mt19937 rng(606);
    std::uniform_real_distribution<double> nu(0.1, 1.5), ph(-pi, pi);
    std::uniform_int_distribution<int> span(1, 6);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<Complex> s;
        const int N = span(rng);
        for (int j = 0; j < N; ++j) s.push_back(std::polar(nu(rng), ph(rng)));
        const auto f = to_symbol_fraction(make_odd_generator(s));
        const double scale = std::max(1.0, f.denominator.max_abs_coefficient());
        for (int k = 0; k < 4096; ++k) {
            const Complex v = f.denominator.eval_circle(2 * pi * k / 4096.0);
            CHECK(v.real() > -1e-12 * scale);
            CHECK(std::abs(v.imag()) < 1e-12 * scale);
        }
    }
}

TEST_CASE("critical-parameter solver reference solutions") {
    SUBCASE("two sites, first order") {
        const auto f = solve_critical_parameters(2, 1, -1.0);
        CHECK(std::abs(f.coefficients[1] - Complex(1.0)) < 1e-12);
        CHECK(f.verified);
        CHECK(f.freeDirections.empty());
    }
    SUBCASE("three sites, second order") {
        const auto f = solve_critical_parameters(3, 2, -1.0);
        CHECK(std::abs(f.coefficients[1] - Complex(2.0)) < 1e-12);
        CHECK(std::abs(f.coefficients[2] - Complex(1.0)) < 1e-12);
        CHECK(f.verified);
    }
    SUBCASE("three sites, first order at z0 = i") {
        const auto f = solve_critical_parameters(3, 1, II);
        CHECK(std::abs(f.coefficients[1]) < 1e-12);
        CHECK(std::abs(f.coefficients[2] - Complex(1.0)) < 1e-12);
        CHECK(f.verified);
    }
    SUBCASE("inconsistent system reports no solution") {
        CHECK_THROWS_AS(solve_critical_parameters(2, 1, II), NoSolutionError);
    }
    SUBCASE("underdetermined system returns explicit free directions") {
        const auto f = solve_critical_parameters(4, 1, -1.0);
        CHECK(f.freeDirections.size() == 2);
        CHECK(f.verified);
        // points along the free directions stay critical
        auto coeffs = f.coefficients;
        for (size_t j = 0; j < coeffs.size(); ++j)
            coeffs[j] += 0.4 * f.freeDirections[0][j] - 0.2 * II * f.freeDirections[1][j];
        const auto conds = criticality_conditions(make_odd_generator(coeffs), -1.0);
        CHECK(std::abs(conds.first) < 1e-10);
        CHECK(std::abs(conds.second) < 1e-10);
    }
    SUBCASE("fixed coefficients are honored") {
        std::map<int, Complex> fixed{{1, Complex(2.0)}};
        const auto f = solve_critical_parameters(3, 2, -1.0, fixed);
        CHECK(std::abs(f.coefficients[1] - Complex(2.0)) < 1e-14);
        CHECK(std::abs(f.coefficients[2] - Complex(1.0)) < 1e-12);
    }
}

TEST_CASE("empirical manifold dimensions match the predicted formula") {
    CHECK(empirical_manifold_dimension(make_odd_generator({1.0, -1.0})) == 0);
    CHECK(empirical_manifold_dimension(make_odd_generator({1.0, 2.0, 1.0})) == 0);
    const Complex w3 = std::exp(II * (2.0 * pi / 3.0));
    CHECK(empirical_manifold_dimension(make_odd_generator({std::conj(w3), 1.0, w3})) == 2);
    CHECK_THROWS_AS(empirical_manifold_dimension(
                        make_odd_generator({1.0, std::polar(1.0, 0.2)})),
                    ValidationError);
}
