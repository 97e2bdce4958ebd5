#include "ness/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ness {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

// normalized coefficients s_j / s_0 with the discarded factor recorded
std::vector<Complex> normalized_coeffs(const LindbladGenerator& gen, Complex* factor) {
    gen.validate();
    if (!gen.is_odd_only())
        throw UnsupportedGeneratorError("criticality analysis requires odd-only generators");
    std::vector<Complex> s;
    for (const auto& c : gen.oddCoeffs) s.push_back(c.value());
    // strip exact zeros at the ends; they only shift the stencil anchor
    while (!s.empty() && s.back() == Complex(0.0)) s.pop_back();
    size_t lead = 0;
    while (lead < s.size() && s[lead] == Complex(0.0)) ++lead;
    s.erase(s.begin(), s.begin() + static_cast<long>(lead));
    if (s.empty()) throw ValidationError("generator has no nonzero odd coefficients");
    const Complex s0 = s[0];
    for (auto& v : s) v /= s0;
    if (factor) *factor = s0;
    return s;
}

// autocorrelation c_k = sum_l s_{l+k} conj(s_l) of the coefficient sequence
std::map<int, Complex> coefficient_autocorrelation(const std::vector<Complex>& s) {
    const int N = static_cast<int>(s.size());
    std::map<int, Complex> c;
    for (int k = -(N - 1); k <= N - 1; ++k) {
        Complex acc = 0.0;
        for (int l = 0; l < N; ++l) {
            const int m = l + k;
            if (m < 0 || m >= N) continue;
            acc += s[static_cast<size_t>(m)] * std::conj(s[static_cast<size_t>(l)]);
        }
        if (acc != Complex(0.0)) c[k] = acc;
    }
    return c;
}

SymbolFraction fraction_from_values(const std::vector<Complex>& s) {
    const auto c = coefficient_autocorrelation(s);
    SymbolFraction f;
    for (const auto& [k, v] : c) {
        // d picks up c_k + conj(c_k), n picks up conj(c_k) - c_k
        f.denominator.add_to_coefficient(k, v + std::conj(v));
        f.numerator.add_to_coefficient(k, std::conj(v) - v);
    }
    f.denominator.trim();
    f.numerator.trim();
    if (f.denominator.is_zero())
        throw ValidationError("denominator of the correlation symbol vanishes identically");
    return f;
}

} // namespace

double MomentResidual::magnitude() const {
    return std::max(std::abs(at_z0), std::abs(at_conj));
}

bool RootSet::has_on_circle() const {
    for (const auto& r : roots)
        if (r.cls == RootClass::OnCircle) return true;
    return false;
}

std::optional<RootRecord> RootSet::closest_inside() const {
    std::optional<RootRecord> best;
    for (const auto& r : roots) {
        if (r.cls != RootClass::Inside) continue;
        if (!best || std::abs(r.z) > std::abs(best->z)) best = r;
    }
    return best;
}

SymbolFraction to_symbol_fraction(const LindbladGenerator& gen) {
    gen.validate();
    if (!gen.is_odd_only())
        throw UnsupportedGeneratorError(
            "symbol fraction is defined for odd-only generators");
    std::vector<Complex> s;
    for (const auto& c : gen.oddCoeffs) s.push_back(c.value());
    return fraction_from_values(s);
}

SymbolFraction to_symbol_fraction(const LatticeModel& model) {
    model.validate();
    if (!model.is_odd_only())
        throw UnsupportedGeneratorError(
            "symbol fraction is defined for odd-only models");
    SymbolFraction total;
    bool first = true;
    for (const auto& gen : model.generators) {
        std::vector<Complex> s;
        for (const auto& c : gen.oddCoeffs) s.push_back(c.value());
        const auto c = coefficient_autocorrelation(s);
        for (const auto& [k, v] : c) {
            total.denominator.add_to_coefficient(k, v + std::conj(v));
            total.numerator.add_to_coefficient(k, std::conj(v) - v);
        }
        first = false;
    }
    (void)first;
    total.denominator.trim();
    total.numerator.trim();
    if (total.denominator.is_zero())
        throw ValidationError("denominator of the correlation symbol vanishes identically");
    return total;
}

RootSet denominator_roots(const SymbolFraction& frac) {
    const auto& tol = Tolerances::get();
    RootSet rs;
    if (frac.denominator.is_zero())
        throw ValidationError("zero denominator");
    const std::vector<Complex> p = frac.denominator.cleared_coefficients();
    int degree = static_cast<int>(p.size()) - 1;
    while (degree > 0 && std::abs(p[static_cast<size_t>(degree)]) == 0.0) --degree;
    rs.cleared_degree = degree;
    if (degree <= 0) return rs; // strictly local correlations

    const std::vector<Complex> raw = poly::roots(p);

    // greedy clustering into multiplicities
    std::vector<bool> used(raw.size(), false);
    for (size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        std::vector<Complex> cluster{raw[i]};
        used[i] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            Complex mean = 0.0;
            for (auto z : cluster) mean += z;
            mean /= static_cast<double>(cluster.size());
            for (size_t j = 0; j < raw.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(raw[j] - mean) < tol.root_merge) {
                    cluster.push_back(raw[j]);
                    used[j] = true;
                    grew = true;
                }
            }
        }
        Complex mean = 0.0;
        for (auto z : cluster) mean += z;
        mean /= static_cast<double>(cluster.size());
        RootRecord rec;
        rec.z = mean;
        rec.multiplicity = static_cast<int>(cluster.size());
        const double dist = std::abs(std::abs(mean) - 1.0);
        if (dist < tol.circle_classify)
            rec.cls = RootClass::OnCircle;
        else if (std::abs(mean) < 1.0)
            rec.cls = RootClass::Inside;
        else
            rec.cls = RootClass::Outside;
        rs.roots.push_back(rec);
    }
    std::sort(rs.roots.begin(), rs.roots.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    return rs;
}

namespace {

// residue of f(z)/P(z) at root a with multiplicity mu, where q = P/(z-a)^mu:
// coefficient mu-1 of the series (Taylor f at a) / (Taylor q at a)
Complex residue_at(const std::vector<Complex>& f, const std::vector<Complex>& q_taylor,
                   Complex a, int mu) {
    const std::vector<Complex> f_taylor = poly::taylor_at(f, a, mu - 1);
    const std::vector<Complex> series = poly::series_divide(f_taylor, q_taylor, mu - 1);
    return series[static_cast<size_t>(mu - 1)];
}

} // namespace

CorrelationProfile residue_correlations(const SymbolFraction& frac, int dmax) {
    if (dmax < 0) throw ValidationError("dmax must be nonnegative");
    const RootSet rs = denominator_roots(frac);

    const double dscale = frac.denominator.max_abs_coefficient();
    bool critical = rs.has_on_circle();
    if (!critical && !rs.empty()) {
        // exact criticality scatters multiple roots off the circle; the
        // polished circle minimum of d is the robust detector
        if (damping_gap(frac) < 1e-12 * std::max(1.0, dscale)) critical = true;
    }
    if (critical) {
        CriticalityReport report;
        report.critical = true;
        throw CriticalityError(
            "denominator vanishes on the unit circle; use quadrature or the "
            "criticality analysis", report);
    }

    CorrelationProfile profile;
    profile.achieved_error = 0.0;
    if (frac.numerator.is_zero()) {
        for (int d = 0; d <= dmax; ++d) {
            profile.distances.push_back(d);
            profile.values.push_back(d == 0 ? 1.0 : 0.0);
        }
        return profile;
    }

    // common clearing so both numerator and denominator become polynomials:
    // gamma(z) = M(z) / (z^extra * Pd(z)) with Pd(0) != 0
    const int Kd = std::max(0, -frac.denominator.min_exponent());
    const int Kn = std::max(0, -frac.numerator.min_exponent());
    const int K = std::max(Kd, Kn);
    const int extra = K - Kd;

    std::vector<Complex> M = (LaurentPolynomial::monomial(K, 1.0) * frac.numerator)
                                 .cleared_coefficients();
    std::vector<Complex> Pd = frac.denominator.cleared_coefficients();

    struct Pole {
        Complex a;
        int mu;
        std::vector<Complex> q_taylor; // Taylor of P/(z-a)^mu at a, order mu-1
    };
    std::vector<Pole> poles;

    // full denominator P(z) = z^extra * Pd(z)
    std::vector<Complex> P(static_cast<size_t>(extra), Complex(0.0));
    P.insert(P.end(), Pd.begin(), Pd.end());

    if (extra > 0) {
        Pole p0;
        p0.a = 0.0;
        p0.mu = extra;
        p0.q_taylor = poly::taylor_at(Pd, 0.0, extra - 1);
        poles.push_back(std::move(p0));
    }
    for (const auto& rec : rs.roots) {
        if (rec.cls != RootClass::Inside) continue;
        if (std::abs(rec.z) < 1e-14 && extra > 0) continue; // already covered
        Pole p;
        p.a = rec.z;
        p.mu = rec.multiplicity;
        const std::vector<Complex> q = poly::deflate(P, rec.z, rec.multiplicity);
        p.q_taylor = poly::taylor_at(q, rec.z, rec.multiplicity - 1);
        poles.push_back(std::move(p));
    }

    for (int d = 0; d <= dmax; ++d) {
        profile.distances.push_back(d);
        if (d == 0) {
            profile.values.push_back(1.0);
            continue;
        }
        // f(z) = z^{d-1} M(z)
        std::vector<Complex> f(static_cast<size_t>(d - 1), Complex(0.0));
        f.insert(f.end(), M.begin(), M.end());
        Complex acc = 0.0;
        for (const auto& p : poles) acc += residue_at(f, p.q_taylor, p.a, p.mu);
        profile.values.push_back(acc);
    }
    return profile;
}

double correlation_length_inverse(const SymbolFraction& frac) {
    const RootSet rs = denominator_roots(frac);
    if (rs.has_on_circle()) return 0.0;
    // exact criticality may scatter a merged circle root; detect via the gap
    if (!rs.empty()) {
        const double gap = damping_gap(frac);
        if (gap < 1e-12 * std::max(1.0, frac.denominator.max_abs_coefficient())) return 0.0;
    }
    const auto closest = rs.closest_inside();
    if (!closest) return std::numeric_limits<double>::infinity();
    return -std::log(std::abs(closest->z));
}

std::vector<double> damping_spectrum(const LindbladGenerator& gen,
                                     const std::vector<double>& phiGrid) {
    std::vector<double> out;
    out.reserve(phiGrid.size());
    for (double phi : phiGrid) {
        const double r1 = reservoir_symbol(gen, phi).real();
        const double r2 = reservoir_symbol(gen, -phi).real();
        out.push_back(-(r1 + r2));
    }
    return out;
}

namespace {

// Newton refinement of a local minimum of d(e^{i phi}) starting from a grid
// point; steps are capped at the grid spacing.
double polish_circle_minimum(const LaurentPolynomial& d, double phi, double cell) {
    auto D1 = [&](double p) {
        Complex acc = 0.0;
        for (const auto& [e, v] : d.coefficients())
            acc += v * (I * static_cast<double>(e)) * std::exp(I * (p * e));
        return acc.real();
    };
    auto D2 = [&](double p) {
        Complex acc = 0.0;
        for (const auto& [e, v] : d.coefficients())
            acc += v * (-static_cast<double>(e) * e) * std::exp(I * (p * e));
        return acc.real();
    };
    for (int it = 0; it < 24; ++it) {
        const double g1 = D1(phi);
        const double g2 = D2(phi);
        if (std::abs(g2) < 1e-300) break;
        const double step = g1 / g2;
        if (!std::isfinite(step) || std::abs(step) > cell) break;
        phi -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return phi;
}

} // namespace

double damping_gap(const SymbolFraction& frac) {
    if (frac.denominator.is_zero()) return 0.0;
    const LaurentPolynomial& d = frac.denominator;
    const int n = 4096;
    double best = std::numeric_limits<double>::infinity();
    double best_phi = 0.0;
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * pi * k / n;
        const double v = d.eval_circle(phi).real();
        if (v < best) {
            best = v;
            best_phi = phi;
        }
    }
    const double phi = polish_circle_minimum(d, best_phi, 2.0 * pi / n);
    best = std::min(best, d.eval_circle(phi).real());
    if (best < -Tolerances::get().psd_slack * std::max(1.0, d.max_abs_coefficient()))
        throw NumericalError("denominator negative on the unit circle", best);
    return std::max(best, 0.0);
}

double damping_gap_finite(const DampingMatrices& dm) {
    Eigen::MatrixXcd M = dm.R + dm.R.conjugate(); // Hamiltonian part excluded
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double scale = std::max(1e-300, ev.cwiseAbs().maxCoeff());
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) > 1e-10 * scale) gap = std::min(gap, std::abs(ev[i]));
    return std::isfinite(gap) ? gap : 0.0;
}

double damping_gap_symbol(const LatticeModel& model) {
    model.validate();
    LatticeModel bare = model;
    bare.chain = ChainSpec::infinite();
    bare.hamiltonian.reset(); // Hamiltonian contribution excluded

    auto bands = [&](double phi) {
        const SymbolPair sp = build_symbol_matrices(bare, phi);
        const Eigen::Matrix2cd sigma = -0.5 * (sp.x + sp.x.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(sigma, Eigen::EigenvaluesOnly);
        return std::pair<double, double>(es.eigenvalues()(0), es.eigenvalues()(1));
    };

    const int n = 4096;
    std::vector<double> lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
        const auto [a, b] = bands(2.0 * pi * k / n);
        lo[static_cast<size_t>(k)] = a;
        hi[static_cast<size_t>(k)] = b;
    }
    const double lo_max = *std::max_element(lo.begin(), lo.end());
    const double hi_max = *std::max_element(hi.begin(), hi.end());
    const double scale = std::max(1.0, hi_max);
    // a band that never lifts off zero is a decoupled sector, not a gap
    const bool lo_structural_zero = lo_max < 1e-12 * scale;
    auto band_at = [&](double phi) {
        const auto [a, b] = bands(phi);
        return lo_structural_zero ? b : a;
    };

    int kmin = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const double v = lo_structural_zero ? hi[static_cast<size_t>(k)]
                                            : lo[static_cast<size_t>(k)];
        if (v < best) {
            best = v;
            kmin = k;
        }
    }

    // golden-section refinement inside the bracketing grid cells
    const double h = 2.0 * pi / n;
    double a = (kmin - 1) * h, b = (kmin + 1) * h;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = band_at(x1), f2 = band_at(x2);
    while (b - a > 1e-8) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = band_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = band_at(x2);
        }
    }
    best = std::min({best, f1, f2});
    return std::max(best, 0.0);
}

namespace {

// moment sums sum_j s_j j^m z^j with 0^0 = 1
Complex moment_sum(const std::vector<Complex>& s, Complex z, int m) {
    Complex acc = 0.0;
    for (size_t j = 0; j < s.size(); ++j) {
        const double jm = (m == 0) ? 1.0 : std::pow(static_cast<double>(j), m);
        if (j == 0 && m > 0) continue;
        acc += s[j] * jm * std::pow(z, static_cast<int>(j));
    }
    return acc;
}

} // namespace

std::pair<Complex, Complex> criticality_conditions(const LindbladGenerator& gen, Complex z0) {
    if (std::abs(std::abs(z0) - 1.0) > 1e-6)
        throw ValidationError("criticality conditions require |z0| = 1");
    Complex factor;
    const std::vector<Complex> s = normalized_coeffs(gen, &factor);
    return {moment_sum(s, z0, 0), moment_sum(s, std::conj(z0), 0)};
}

std::vector<MomentResidual> moment_conditions(const LindbladGenerator& gen, Complex z0,
                                              int mMax) {
    if (std::abs(std::abs(z0) - 1.0) > 1e-6)
        throw ValidationError("moment conditions require |z0| = 1");
    Complex factor;
    const std::vector<Complex> s = normalized_coeffs(gen, &factor);
    const int N = static_cast<int>(s.size());
    std::vector<MomentResidual> out;
    bool any_nonzero = false;
    for (int m = 0; m <= mMax; ++m) {
        MomentResidual r;
        r.at_z0 = moment_sum(s, z0, m);
        r.at_conj = moment_sum(s, std::conj(z0), m);
        double scale = 0.0;
        for (size_t j = 0; j < s.size(); ++j)
            scale += std::abs(s[j]) * ((m == 0) ? 1.0 : std::pow(static_cast<double>(j), m));
        if (r.magnitude() > Tolerances::get().critical_residual * std::max(1.0, scale))
            any_nonzero = true;
        out.push_back(r);
    }
    if (!any_nonzero && mMax >= N - 1)
        throw ValidationError(
            "all moment conditions vanish: degenerate generator with identically "
            "zero symbol");
    return out;
}

namespace {

// local multiplicity of z0 as a root of the polynomial p via the magnitude
// pattern of the Taylor coefficients; robust against the eigenvalue scatter
// of multiple roots
int taylor_multiplicity(const std::vector<Complex>& p, Complex z0) {
    const int deg = static_cast<int>(p.size()) - 1;
    const std::vector<Complex> t = poly::taylor_at(p, z0, deg);
    double tmax = 0.0;
    for (const auto& v : t) tmax = std::max(tmax, std::abs(v));
    if (tmax == 0.0) return 0;
    for (int k = 0; k <= deg; ++k)
        if (std::abs(t[static_cast<size_t>(k)]) > 1e-5 * tmax) return k;
    return deg;
}

double moment_scale(const std::vector<Complex>& s, int m) {
    double scale = 0.0;
    for (size_t j = 0; j < s.size(); ++j)
        scale += std::abs(s[j]) * ((m == 0) ? 1.0 : std::pow(static_cast<double>(j), m));
    return std::max(1.0, scale);
}

// Sharpen a rough circle candidate and determine its moment order. The band
// minimum is flat to machine precision over a wide plateau at multiple zeros,
// so the position is recovered instead from the moment sums: for the correct
// order M the sum of order M-1 has a simple zero in the circle coordinate.
// Hypotheses are tried from the highest order down; each is accepted only if
// the refined point reproduces the full vanishing pattern.
struct RefinedCandidate {
    double theta = 0.0;
    int momentOrder = 0;
};

std::optional<RefinedCandidate> refine_candidate(const std::vector<Complex>& s,
                                                 double theta_rough) {
    const int N = static_cast<int>(s.size());
    auto E = [&](Complex theta, int m) {
        Complex acc = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == 0 && m > 0) continue;
            const double jm = (m == 0) ? 1.0 : std::pow(static_cast<double>(j), m);
            acc += s[static_cast<size_t>(j)] * jm * std::exp(I * (theta * static_cast<double>(j)));
        }
        return acc;
    };
    for (int mhyp = N - 1; mhyp >= 1; --mhyp) {
        Complex theta = theta_rough;
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            const Complex f = E(theta, mhyp - 1);
            const Complex df = I * E(theta, mhyp);
            if (std::abs(df) < 1e-300) break;
            const Complex step = f / df;
            theta -= step;
            if (std::abs(theta - Complex(theta_rough)) > 0.05) break;
            if (std::abs(step) < 1e-13) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        if (std::abs(theta.imag()) > 1e-6) continue;
        const double theta_star = theta.real();
        const Complex z0 = std::exp(I * theta_star);

        // both condition families: powers of z0 and of conj(z0) = e^{-i theta}
        bool pattern_ok = true;
        for (int m = 0; m < mhyp; ++m) {
            const double resid =
                std::max(std::abs(E(theta_star, m)), std::abs(E(-theta_star, m)));
            if (resid > 1e-8 * moment_scale(s, m)) pattern_ok = false;
        }
        const double at_order = std::max(std::abs(E(theta_star, mhyp)),
                                         std::abs(E(-theta_star, mhyp)));
        if (!pattern_ok || at_order <= 1e-8 * moment_scale(s, mhyp)) continue;
        (void)z0;
        return RefinedCandidate{theta_star, mhyp};
    }
    return std::nullopt;
}

} // namespace

CriticalityReport predict_exponents(const LindbladGenerator& gen) {
    const auto& tol = Tolerances::get();
    Complex factor;
    const std::vector<Complex> s = normalized_coeffs(gen, &factor);
    const int N = static_cast<int>(s.size());

    LindbladGenerator norm;
    for (const auto& v : s) norm.oddCoeffs.push_back(ComplexAmplitude::from_value(v));
    norm.evenCoeffs.assign(s.size(), ComplexAmplitude{});

    const SymbolFraction frac = fraction_from_values(s);
    CriticalityReport report;
    report.normalizationFactor = std::abs(factor);

    // candidate circle points: near-zero minima of the (nonnegative)
    // denominator band; every grid-local minimum gets Newton-polished before
    // thresholding, since a quadratic zero between grid nodes still reads
    // O(cell^2) on the grid
    const int n = 8192;
    const double dscale = std::max(1.0, frac.denominator.max_abs_coefficient());
    std::vector<double> D(n);
    for (int k = 0; k < n; ++k)
        D[static_cast<size_t>(k)] = frac.denominator.eval_circle(2.0 * pi * k / n).real();

    std::vector<double> candidate_phis;
    for (int k = 0; k < n; ++k) {
        const double prev = D[static_cast<size_t>((k + n - 1) % n)];
        const double next = D[static_cast<size_t>((k + 1) % n)];
        const double cur = D[static_cast<size_t>(k)];
        if (cur <= prev && cur <= next && cur < 1e-3 * dscale) {
            const double phi =
                polish_circle_minimum(frac.denominator, 2.0 * pi * k / n, 2.0 * pi / n);
            if (frac.denominator.eval_circle(phi).real() < 1e-10 * dscale)
                candidate_phis.push_back(phi);
        }
    }
    const std::vector<Complex> cleared = frac.denominator.cleared_coefficients();
    std::vector<double> accepted_thetas;
    for (double phi : candidate_phis) {
        const auto refined = refine_candidate(s, phi);
        if (!refined) continue;
        bool duplicate = false;
        for (double t : accepted_thetas) {
            double diff = std::abs(refined->theta - t);
            diff = std::min(diff, std::abs(diff - 2.0 * pi));
            if (diff < 1e-6) duplicate = true;
        }
        if (duplicate) continue;
        accepted_thetas.push_back(refined->theta);
        CriticalCandidate cand;
        cand.z0 = std::exp(I * refined->theta);
        cand.momentOrder = refined->momentOrder;
        cand.mergingRootCount = taylor_multiplicity(cleared, cand.z0);
        report.candidates.push_back(cand);
    }
    (void)tol;

    if (report.candidates.empty()) {
        report.critical = false;
        report.xi_inverse = correlation_length_inverse(frac);
        return report;
    }
    report.critical = true;
    int maxM = 0;
    for (const auto& c : report.candidates) maxM = std::max(maxM, c.momentOrder);
    maxM = std::min(maxM, N - 1);
    report.predictedLambda = 1.0 / maxM;
    report.predictedManifoldDim = 2 * (N - 1 - maxM);
    report.xi_inverse = 0.0;
    return report;
}

CriticalSolutionFamily solve_critical_parameters(int N, int targetM, Complex z0,
                                                 const std::map<int, Complex>& fixed) {
    if (N < 2) throw ValidationError("need at least two coupled sites");
    if (targetM < 1 || targetM > N - 1)
        throw ValidationError("moment order must satisfy 1 <= M <= N-1");
    if (std::abs(std::abs(z0) - 1.0) > 1e-9)
        throw ValidationError("z0 must lie on the unit circle");
    for (const auto& [j, v] : fixed)
        if (j < 1 || j > N - 1) throw ValidationError("fixed index out of range");

    std::vector<int> free_idx;
    for (int j = 1; j <= N - 1; ++j)
        if (!fixed.count(j)) free_idx.push_back(j);

    const int rows = 2 * targetM;
    const int cols = static_cast<int>(free_idx.size());
    Eigen::MatrixXcd A(rows, cols);
    Eigen::VectorXcd b(rows);
    for (int m = 0; m < targetM; ++m) {
        Complex rhs_plus = -((m == 0) ? Complex(1.0) : Complex(0.0));
        Complex rhs_minus = rhs_plus;
        for (const auto& [j, v] : fixed) {
            const double jm = std::pow(static_cast<double>(j), m);
            rhs_plus -= v * jm * std::pow(z0, j);
            rhs_minus -= v * jm * std::pow(std::conj(z0), j);
        }
        for (int cidx = 0; cidx < cols; ++cidx) {
            const int j = free_idx[static_cast<size_t>(cidx)];
            const double jm = std::pow(static_cast<double>(j), m);
            A(2 * m, cidx) = jm * std::pow(z0, j);
            A(2 * m + 1, cidx) = jm * std::pow(std::conj(z0), j);
        }
        b(2 * m) = rhs_plus;
        b(2 * m + 1) = rhs_minus;
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
    cod.setThreshold(1e-10);
    const Eigen::VectorXcd x = cod.solve(b);
    const double residual = (A * x - b).norm();
    if (residual > 1e-8 * std::max(1.0, b.norm()))
        throw NoSolutionError("critical-parameter equations are inconsistent", residual);

    CriticalSolutionFamily family;
    family.residual = residual;
    family.coefficients.assign(static_cast<size_t>(N), Complex(0.0));
    family.coefficients[0] = 1.0;
    for (const auto& [j, v] : fixed) family.coefficients[static_cast<size_t>(j)] = v;
    for (int cidx = 0; cidx < cols; ++cidx)
        family.coefficients[static_cast<size_t>(free_idx[static_cast<size_t>(cidx)])] = x(cidx);

    // nullspace basis of A: free directions of the solution family
    const int rank = static_cast<int>(cod.rank());
    if (rank < cols) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cut = 1e-10 * (sv.size() ? sv(0) : 1.0);
        for (int k = 0; k < cols; ++k) {
            if (k < sv.size() && sv(k) > cut) continue;
            std::vector<Complex> dir(static_cast<size_t>(N), Complex(0.0));
            for (int cidx = 0; cidx < cols; ++cidx)
                dir[static_cast<size_t>(free_idx[static_cast<size_t>(cidx)])] =
                    svd.matrixV()(cidx, k);
            family.freeDirections.push_back(std::move(dir));
        }
    }

    // verification through the implicit conditions
    LindbladGenerator gen;
    for (const auto& v : family.coefficients)
        gen.oddCoeffs.push_back(ComplexAmplitude::from_value(v));
    gen.evenCoeffs.assign(family.coefficients.size(), ComplexAmplitude{});
    const auto conds = criticality_conditions(gen, z0);
    const auto moments = moment_conditions(gen, z0, targetM - 1);
    family.verified = std::abs(conds.first) < 1e-8 && std::abs(conds.second) < 1e-8;
    for (const auto& m : moments) family.verified = family.verified && m.magnitude() < 1e-8;
    return family;
}

int empirical_manifold_dimension(const LindbladGenerator& gen,
                                 std::optional<Complex> z0_hint) {
    Complex factor;
    const std::vector<Complex> s = normalized_coeffs(gen, &factor);
    const int N = static_cast<int>(s.size());

    LindbladGenerator norm;
    for (const auto& v : s) norm.oddCoeffs.push_back(ComplexAmplitude::from_value(v));
    norm.evenCoeffs.assign(s.size(), ComplexAmplitude{});

    Complex z0;
    int M = 0;
    if (z0_hint) {
        z0 = *z0_hint / std::abs(*z0_hint);
        const auto moments = moment_conditions(norm, z0, N - 1);
        for (int m = 0; m < static_cast<int>(moments.size()); ++m) {
            if (moments[static_cast<size_t>(m)].magnitude() > 1e-8) {
                M = m;
                break;
            }
            M = m + 1;
        }
    } else {
        const CriticalityReport report = predict_exponents(norm);
        if (!report.critical)
            throw ValidationError("generator is not critical; no manifold to measure");
        const auto best = std::max_element(
            report.candidates.begin(), report.candidates.end(),
            [](const CriticalCandidate& a, const CriticalCandidate& b) {
                return a.momentOrder < b.momentOrder;
            });
        z0 = best->z0;
        M = best->momentOrder;
    }
    if (M < 1) throw ValidationError("point does not satisfy the criticality conditions");

    // Jacobian of the active constraints (orders 0..M-1, both circle points)
    // w.r.t. (nu_j, g_j)_{j=1..N-1} and the circle coordinate theta
    const int vars = 2 * (N - 1) + 1;
    auto jacobian_rank = [&](const std::vector<Complex>& sv, Complex z) {
        Eigen::MatrixXd J(4 * M, vars);
        for (int m = 0; m < M; ++m) {
            for (int j = 1; j <= N - 1; ++j) {
                const double jm = std::pow(static_cast<double>(j), m);
                const Complex ph = sv[static_cast<size_t>(j)] == Complex(0.0)
                                       ? Complex(1.0)
                                       : sv[static_cast<size_t>(j)] /
                                             std::abs(sv[static_cast<size_t>(j)]);
                const Complex dnu_p = ph * jm * std::pow(z, j);
                const Complex dg_p = I * sv[static_cast<size_t>(j)] * jm * std::pow(z, j);
                const Complex dnu_m = ph * jm * std::pow(std::conj(z), j);
                const Complex dg_m =
                    I * sv[static_cast<size_t>(j)] * jm * std::pow(std::conj(z), j);
                J(4 * m + 0, 2 * (j - 1) + 0) = dnu_p.real();
                J(4 * m + 1, 2 * (j - 1) + 0) = dnu_p.imag();
                J(4 * m + 2, 2 * (j - 1) + 0) = dnu_m.real();
                J(4 * m + 3, 2 * (j - 1) + 0) = dnu_m.imag();
                J(4 * m + 0, 2 * (j - 1) + 1) = dg_p.real();
                J(4 * m + 1, 2 * (j - 1) + 1) = dg_p.imag();
                J(4 * m + 2, 2 * (j - 1) + 1) = dg_m.real();
                J(4 * m + 3, 2 * (j - 1) + 1) = dg_m.imag();
            }
            const Complex dth_p = I * moment_sum(sv, z, m + 1);
            const Complex dth_m = -I * moment_sum(sv, std::conj(z), m + 1);
            J(4 * m + 0, vars - 1) = dth_p.real();
            J(4 * m + 1, vars - 1) = dth_p.imag();
            J(4 * m + 2, vars - 1) = dth_m.real();
            J(4 * m + 3, vars - 1) = dth_m.imag();
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& sing = svd.singularValues();
        const double cut = Tolerances::get().rank_rel * (sing.size() ? sing(0) : 0.0);
        // rank is only trustworthy with a clear spectral gap around the cutoff
        for (int k = 0; k < sing.size(); ++k)
            if (sing(k) > cut / 30.0 && sing(k) < cut * 30.0)
                throw IllConditionedError(
                    "constraint Jacobian has singular values at the rank cutoff",
                    sing(k));
        int rank = 0;
        for (int k = 0; k < sing.size(); ++k)
            if (sing(k) > cut) ++rank;
        return rank;
    };

    const int rank = jacobian_rank(s, z0);
    return vars - rank;
}

} // namespace ness
