#include "ness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace ness {

namespace {
constexpr Complex I{0.0, 1.0};
constexpr double pi = std::numbers::pi;
} // namespace

LindbladGenerator make_odd_generator(const std::vector<Complex>& s) {
    LindbladGenerator gen;
    for (const auto& v : s) gen.oddCoeffs.push_back(ComplexAmplitude::from_value(v));
    gen.evenCoeffs.assign(s.size(), ComplexAmplitude{});
    gen.validate();
    return gen;
}

LatticeModel make_odd_model(const std::vector<Complex>& s, ChainSpec chain) {
    LatticeModel m;
    m.generators.push_back(make_odd_generator(s));
    m.chain = chain;
    m.validate();
    return m;
}

namespace {

// Majorana coefficients of sum_m a_m c_{j+m} (+) with c = (w_o - i w_e)/2.
LindbladGenerator fermion_combination(const std::vector<Complex>& amps, bool creation) {
    LindbladGenerator gen;
    for (const auto& a : amps) {
        gen.oddCoeffs.push_back(ComplexAmplitude::from_value(0.5 * a));
        gen.evenCoeffs.push_back(
            ComplexAmplitude::from_value(creation ? 0.5 * I * a : -0.5 * I * a));
    }
    gen.validate();
    return gen;
}

} // namespace

LatticeModel make_quantum_optical_model(double chi, double nu, double g, ChainSpec chain) {
    if (!(chi > 0.0)) throw ValidationError("pump amplitude must be positive");
    if (!(nu >= 0.0)) throw ValidationError("nu must be nonnegative");
    LatticeModel m;
    m.generators.push_back(
        fermion_combination({Complex(1.0), std::polar(nu, g)}, false)); // loss
    m.generators.push_back(
        fermion_combination({Complex(chi), Complex(chi * nu)}, true)); // pump
    m.chain = chain;
    m.validate();
    return m;
}

std::optional<QuantumOpticalParams> match_quantum_optical(const LatticeModel& model) {
    if (model.generators.size() != 2 || model.hamiltonian) return std::nullopt;
    const double tol = 1e-12;

    struct FamilyInfo {
        bool creation = false;
        double scale = 0.0; // 2 * |odd[0]|
        double nu = 0.0;
        double g = 0.0;
    };
    std::vector<FamilyInfo> infos;
    for (const auto& gen : model.generators) {
        if (gen.span() != 2) return std::nullopt;
        const Complex o0 = gen.oddCoeffs[0].value();
        const Complex o1 = gen.oddCoeffs[1].value();
        const Complex e0 = gen.evenCoeffs[0].value();
        const Complex e1 = gen.evenCoeffs[1].value();
        if (std::abs(o0) == 0.0) return std::nullopt;
        bool creation;
        if (std::abs(e0 - I * o0) < tol * std::abs(o0) &&
            std::abs(e1 - I * o1) < tol * std::max(1.0, std::abs(o1)))
            creation = true;
        else if (std::abs(e0 + I * o0) < tol * std::abs(o0) &&
                 std::abs(e1 + I * o1) < tol * std::max(1.0, std::abs(o1)))
            creation = false;
        else
            return std::nullopt;
        FamilyInfo info;
        info.creation = creation;
        info.scale = 2.0 * std::abs(o0);
        info.nu = std::abs(o1) / std::abs(o0);
        info.g = std::arg(o1 / o0);
        infos.push_back(info);
    }
    if (infos[0].creation == infos[1].creation) return std::nullopt;
    const FamilyInfo& loss = infos[infos[0].creation ? 1 : 0];
    const FamilyInfo& pump = infos[infos[0].creation ? 0 : 1];
    if (std::abs(pump.nu - loss.nu) > 1e-10) return std::nullopt;
    if (std::abs(pump.g) > 1e-10) return std::nullopt;
    QuantumOpticalParams p;
    p.rate_scale = loss.scale;
    p.chi = pump.scale / loss.scale;
    p.nu = loss.nu;
    p.g = loss.g;
    return p;
}

namespace {

struct QuantumOpticalClosedForm {
    double chi, nu, g;
    double d(double phi) const {
        const double a = (1.0 + nu * nu) * (1.0 + chi * chi);
        const double b = 2.0 * nu * (chi * chi + std::cos(g));
        const double first = a + b * std::cos(phi);
        const double s = 2.0 * nu * std::sin(g) * std::sin(phi);
        return first * first - s * s;
    }
    double n11(double phi) const {
        // odd-odd numerator in the correlation-symbol convention (real)
        return 4.0 * nu * chi * chi * (1.0 + nu * nu + 2.0 * nu * std::cos(phi)) *
               std::sin(g) * std::sin(phi);
    }
    double n12(double phi) const {
        const double c = 1.0 + nu * nu + 2.0 * nu * std::cos(g) * std::cos(phi);
        const double s = 2.0 * nu * std::sin(g) * std::sin(phi);
        const double p = 1.0 + nu * nu + 2.0 * nu * std::cos(phi);
        return c * c - s * s - std::pow(chi, 4) * p * p;
    }
};

} // namespace

SymbolMatrix quantum_optical_reference(double chi, double nu, double g) {
    if (!(chi > 0.0)) throw ValidationError("pump amplitude must be positive");
    if (!(nu >= 0.0)) throw ValidationError("nu must be nonnegative");
    QuantumOpticalClosedForm cf{chi, nu, g};
    SymbolMatrix sym;
    sym.eval = [cf](double phi) {
        const double den = cf.d(phi);
        if (std::abs(den) < 1e-300)
            throw NumericalError("correlation symbol singular at this momentum (critical)",
                                 std::abs(den));
        const double p = cf.n11(phi) / den;
        const double q = cf.n12(phi) / den;
        Eigen::Matrix2cd m;
        m << Complex(p, 0.0), -I * q, I * q, Complex(p, 0.0);
        return m;
    };
    return sym;
}

SymbolFraction quantum_optical_fraction(double chi, double nu, double g) {
    using LP = LaurentPolynomial;
    // cos -> (z + 1/z)/2, sin -> -i (z - 1/z)/2
    LP cosphi;
    cosphi.set_coefficient(1, 0.5);
    cosphi.set_coefficient(-1, 0.5);
    LP sinphi;
    sinphi.set_coefficient(1, Complex(0.0, -0.5));
    sinphi.set_coefficient(-1, Complex(0.0, 0.5));

    const double a = (1.0 + nu * nu) * (1.0 + chi * chi);
    const double b = 2.0 * nu * (chi * chi + std::cos(g));
    LP first = LP::constant(a) + cosphi * Complex(b);
    LP strig = sinphi * Complex(2.0 * nu * std::sin(g));
    SymbolFraction f;
    f.denominator = first * first - strig * strig;
    f.denominator.trim();

    LP band = LP::constant(1.0 + nu * nu) + cosphi * Complex(2.0 * nu);
    f.numerator = band * sinphi * Complex(4.0 * nu * chi * chi * std::sin(g));
    f.numerator.trim();
    return f;
}

std::vector<Complex> quantum_optical_roots(double chi, double nu, double g) {
    // d = F^2 - S^2 with F = A + B cos(phi), S = 2 nu sin(g) sin(phi):
    // each factor F -+ S clears to the quadratic
    //   (B/2 +- i nu sin g) z^2 + A z + (B/2 -+ i nu sin g)
    const double A = (1.0 + nu * nu) * (1.0 + chi * chi);
    const double B = 2.0 * nu * (chi * chi + std::cos(g));
    const Complex s = Complex(0.0, nu * std::sin(g));
    std::vector<Complex> roots;
    for (int sign : {+1, -1}) {
        const Complex c2 = 0.5 * B + static_cast<double>(sign) * s;
        const Complex c0 = 0.5 * B - static_cast<double>(sign) * s;
        const Complex c1 = A;
        if (std::abs(c2) < 1e-300) {
            if (std::abs(c1) > 1e-300) roots.push_back(-c0 / c1);
            continue;
        }
        const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
        const Complex q = std::abs(c1 + disc) > std::abs(c1 - disc)
                              ? -0.5 * (c1 + disc)
                              : -0.5 * (c1 - disc);
        roots.push_back(q / c2);
        roots.push_back(c0 / q);
    }
    return roots;
}

double quantum_optical_xi_inverse(double chi, double nu, double g) {
    double best = 0.0;
    bool any = false;
    for (const Complex z : quantum_optical_roots(chi, nu, g)) {
        const double mod = std::abs(z);
        if (std::abs(mod - 1.0) < Tolerances::get().circle_classify) return 0.0;
        if (mod < 1.0 && mod > best) {
            best = mod;
            any = true;
        }
    }
    if (!any) return std::numeric_limits<double>::infinity();
    return -std::log(best);
}

void SweepSpec::validate() const {
    model.validate();
    if (generatorIndex < 0 || generatorIndex >= static_cast<int>(model.generators.size()))
        throw ValidationError("sweep generator index out of range");
    const auto& gen = model.generators[static_cast<size_t>(generatorIndex)];
    if (coeffIndex < 0 || coeffIndex >= gen.span())
        throw ValidationError("sweep coefficient index out of range");
    if (count < 2) throw ValidationError("sweep grid needs at least two points");
    if (start == stop) throw ValidationError("sweep grid must be strictly monotone");
}

namespace {

// Set the swept field; the even-species coefficient follows the odd one so
// that the species-relative structure (e.g. the pump/loss pattern) survives.
LatticeModel with_parameter(const LatticeModel& base, const SweepSpec& spec, double value) {
    LatticeModel m = base;
    auto& gen = m.generators[static_cast<size_t>(spec.generatorIndex)];
    auto& odd = gen.oddCoeffs[static_cast<size_t>(spec.coeffIndex)];
    auto& even = gen.evenCoeffs[static_cast<size_t>(spec.coeffIndex)];
    if (spec.field == SweepSpec::Field::Nu) {
        const double ratio = odd.nu > 0.0 ? even.nu / odd.nu : 0.0;
        odd = ComplexAmplitude::make(value, odd.g);
        if (!even.is_zero() || ratio > 0.0)
            even = ComplexAmplitude::make(value * ratio, even.g);
    } else {
        const double delta = value - odd.g;
        odd = ComplexAmplitude::make(odd.nu, value);
        if (!even.is_zero()) even = ComplexAmplitude::make(even.nu, even.g + delta);
    }
    return m;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(spec.count));
    if (!spec.log_toward_critical) {
        for (int k = 0; k < spec.count; ++k)
            grid.push_back(spec.start +
                           (spec.stop - spec.start) * k / (spec.count - 1));
        return grid;
    }
    const double pc = spec.critical_value.value_or(0.0);
    const double a = spec.start - pc;
    const double b = spec.stop - pc;
    if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0))
        throw ValidationError("log grid endpoints must sit on one side of the critical value");
    const double sgn = a > 0 ? 1.0 : -1.0;
    const double la = std::log(std::abs(a));
    const double lb = std::log(std::abs(b));
    for (int k = 0; k < spec.count; ++k)
        grid.push_back(pc + sgn * std::exp(la + (lb - la) * k / (spec.count - 1)));
    return grid;
}

SweepPoint evaluate_point(const SweepSpec& spec, double value) {
    SweepPoint pt;
    pt.parameter = value;
    try {
        const LatticeModel m = with_parameter(spec.model, spec, value);
        if (m.is_odd_only()) {
            const SymbolFraction frac = to_symbol_fraction(m);
            pt.gap = damping_gap(frac);
            pt.xi_inverse = correlation_length_inverse(frac);
            const RootSet rs = denominator_roots(frac);
            const auto closest = rs.closest_inside();
            pt.root_modulus =
                closest ? std::abs(closest->z) : std::numeric_limits<double>::quiet_NaN();
        } else if (auto qo = match_quantum_optical(m)) {
            pt.gap = damping_gap_symbol(m); // band gap at the physical rate scale
            pt.xi_inverse = quantum_optical_xi_inverse(qo->chi, qo->nu, qo->g);
            double best = 0.0;
            for (const Complex z : quantum_optical_roots(qo->chi, qo->nu, qo->g))
                if (std::abs(z) < 1.0) best = std::max(best, std::abs(z));
            pt.root_modulus = best > 0.0 ? best : std::numeric_limits<double>::quiet_NaN();
        } else {
            pt.gap = damping_gap_symbol(m);
            pt.xi_inverse = std::numeric_limits<double>::quiet_NaN();
            pt.root_modulus = std::numeric_limits<double>::quiet_NaN();
            pt.ok = false;
            pt.error = "correlation length unavailable for general mixed couplings";
            return pt;
        }
        pt.ok = true;
    } catch (const Error& e) {
        pt.ok = false;
        pt.error = e.what();
        pt.xi_inverse = std::numeric_limits<double>::quiet_NaN();
        pt.gap = std::numeric_limits<double>::quiet_NaN();
        pt.root_modulus = std::numeric_limits<double>::quiet_NaN();
    }
    return pt;
}

} // namespace

std::vector<SweepPoint> sweep(const SweepSpec& spec, int workers) {
    spec.validate();
    const std::vector<double> grid = sweep_grid(spec);
    std::vector<SweepPoint> points(grid.size());
    int nthreads = workers > 0 ? workers
                               : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::clamp(nthreads, 1, static_cast<int>(grid.size()));

    std::atomic<size_t> next{0};
    auto work = [&]() {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= grid.size()) break;
            points[k] = evaluate_point(spec, grid[k]);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return points;
}

ExponentFit fit_power_law(const std::vector<double>& abscissa,
                          const std::vector<double>& ordinate, double window_lo,
                          double window_hi) {
    if (abscissa.size() != ordinate.size())
        throw ValidationError("fit input lengths differ");
    std::vector<double> xs, ys;
    for (size_t k = 0; k < abscissa.size(); ++k) {
        const double x = abscissa[k];
        const double y = ordinate[k];
        if (!(x >= window_lo && x <= window_hi)) continue;
        if (!std::isfinite(x) || !std::isfinite(y) || y <= 0.0 || x <= 0.0) continue;
        xs.push_back(std::log(x));
        ys.push_back(std::log(y));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 6)
        throw FitWindowError("fit window contains fewer than 6 usable points");
    double sx = 0, sy = 0;
    for (int k = 0; k < n; ++k) {
        sx += xs[static_cast<size_t>(k)];
        sy += ys[static_cast<size_t>(k)];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        sxx += (xs[static_cast<size_t>(k)] - mx) * (xs[static_cast<size_t>(k)] - mx);
        sxy += (xs[static_cast<size_t>(k)] - mx) * (ys[static_cast<size_t>(k)] - my);
    }
    if (sxx == 0.0) throw FitWindowError("degenerate abscissa in fit window");
    ExponentFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ssr = 0;
    for (int k = 0; k < n; ++k) {
        const double r = ys[static_cast<size_t>(k)] -
                         (fit.intercept + fit.exponent * xs[static_cast<size_t>(k)]);
        ssr += r * r;
    }
    fit.standard_error = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    fit.points_used = n;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    return fit;
}

ExponentFit fit_static_exponent(const std::vector<SweepPoint>& points, double p_c,
                                double window_lo, double window_hi) {
    std::vector<double> xs, ys;
    for (const auto& pt : points) {
        if (!pt.ok) continue;
        xs.push_back(std::abs(pt.parameter - p_c));
        ys.push_back(pt.xi_inverse);
    }
    return fit_power_law(xs, ys, window_lo, window_hi);
}

ExponentFit fit_dynamical_exponent(const std::vector<SweepPoint>& points, double p_c,
                                   double lambda, double window_lo, double window_hi) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    std::vector<double> xs, ys;
    for (const auto& pt : points) {
        if (!pt.ok) continue;
        xs.push_back(std::abs(pt.parameter - p_c));
        ys.push_back(pt.gap);
    }
    ExponentFit fit = fit_power_law(xs, ys, window_lo, window_hi);
    fit.dynamical_z = fit.exponent / lambda;
    return fit;
}

namespace {

// Jordan-Wigner annihilation operators on the 2^L Fock space; basis state b
// occupies site j when bit j of b is set, with the parity string over lower
// sites.
std::vector<Eigen::MatrixXcd> fock_annihilators(int L) {
    const int dim = 1 << L;
    std::vector<Eigen::MatrixXcd> cs;
    for (int j = 0; j < L; ++j) {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim, dim);
        for (int b = 0; b < dim; ++b) {
            if (!(b & (1 << j))) continue;
            int lower = 0;
            for (int i = 0; i < j; ++i)
                if (b & (1 << i)) ++lower;
            const double sign = (lower % 2 == 0) ? 1.0 : -1.0;
            c(b ^ (1 << j), b) = sign;
        }
        cs.push_back(std::move(c));
    }
    return cs;
}

} // namespace

Complex LiouvillianOracleResult::four_point(const std::array<int, 4>& idx) const {
    Eigen::MatrixXcd prod = majorana[static_cast<size_t>(idx[0])];
    for (int k = 1; k < 4; ++k) prod = prod * majorana[static_cast<size_t>(idx[k])];
    return (rho * prod).trace();
}

double LiouvillianOracleResult::occupation() const {
    double acc = 0.0;
    for (int j = 0; j < L; ++j) acc += (1.0 - gamma(2 * j, 2 * j + 1)) / 2.0;
    return acc / L;
}

LiouvillianOracleResult exact_liouvillian_oracle(const LatticeModel& model,
                                                 bool allow_degenerate) {
    model.validate();
    if (!model.chain.is_finite())
        throw ValidationError("the exact oracle needs a finite chain");
    const int L = model.chain.L;
    if (L > 4) throw ValidationError("the exact oracle is limited to L <= 4");
    const int dim = 1 << L;

    const auto cs = fock_annihilators(L);
    std::vector<Eigen::MatrixXcd> w;
    for (int j = 0; j < L; ++j) {
        w.push_back(cs[static_cast<size_t>(j)].adjoint() + cs[static_cast<size_t>(j)]);
        w.push_back(I * (cs[static_cast<size_t>(j)] - cs[static_cast<size_t>(j)].adjoint()));
    }

    // Hamiltonian and generators from the same builders as the Gaussian path
    Eigen::MatrixXcd Hfock = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::MatrixXcd H = build_hamiltonian_matrix(model);
    for (int p = 0; p < 2 * L; ++p)
        for (int q = 0; q < 2 * L; ++q)
            if (H(p, q) != Complex(0.0))
                Hfock += H(p, q) * w[static_cast<size_t>(p)] * w[static_cast<size_t>(q)];

    std::vector<Eigen::MatrixXcd> lindblads;
    for (const auto& l : build_generator_vectors(model)) {
        Eigen::MatrixXcd Lop = Eigen::MatrixXcd::Zero(dim, dim);
        for (int a = 0; a < 2 * L; ++a)
            if (l[a] != Complex(0.0)) Lop += l[a] * w[static_cast<size_t>(a)];
        lindblads.push_back(std::move(Lop));
    }

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::MatrixXcd S = -I * (Eigen::kroneckerProduct(id, Hfock).eval() -
                               Eigen::kroneckerProduct(Hfock.transpose(), id).eval());
    for (const auto& Lop : lindblads) {
        const Eigen::MatrixXcd LdL = Lop.adjoint() * Lop;
        S += Eigen::kroneckerProduct(Lop.conjugate(), Lop).eval();
        S -= 0.5 * Eigen::kroneckerProduct(id, LdL).eval();
        S -= 0.5 * Eigen::kroneckerProduct(LdL.transpose(), id).eval();
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * (sv.size() ? sv(0) : 1.0);
    std::vector<int> kernel_cols;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) <= cut) kernel_cols.push_back(k);

    LiouvillianOracleResult result;
    result.L = L;
    result.kernel_dimension = static_cast<int>(kernel_cols.size());
    if (result.kernel_dimension == 0)
        throw NumericalError("Liouvillian kernel not found");
    if (result.kernel_dimension > 1 && !allow_degenerate)
        throw DegenerateSteadyStateError(
            "steady state degenerate: Liouvillian kernel dimension " +
                std::to_string(result.kernel_dimension),
            Complex(0.0), Complex(0.0));

    // pick the kernel element with the largest trace and normalize
    Eigen::MatrixXcd rho;
    double best_tr = -1.0;
    for (int col : kernel_cols) {
        Eigen::MatrixXcd cand = Eigen::Map<const Eigen::MatrixXcd>(
            svd.matrixV().col(col).data(), dim, dim);
        const double tr = std::abs(cand.trace());
        if (tr > best_tr) {
            best_tr = tr;
            rho = cand;
        }
    }
    if (best_tr < 1e-12)
        throw NumericalError("kernel element is traceless; no normalizable steady state");
    rho /= rho.trace();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    result.rho = rho;
    result.majorana = w;

    result.gamma = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    for (int a = 0; a < 2 * L; ++a)
        for (int b = 0; b < 2 * L; ++b) {
            if (a == b) continue;
            const Complex val =
                0.5 * I *
                (rho * (w[static_cast<size_t>(a)] * w[static_cast<size_t>(b)] -
                        w[static_cast<size_t>(b)] * w[static_cast<size_t>(a)]))
                    .trace();
            if (std::abs(val.imag()) > 1e-9)
                throw NumericalError("correlation matrix entry not real", val.imag());
            result.gamma(a, b) = val.real();
        }
    return result;
}

namespace {

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    out << "g,xi_inv,gap,root_mod\n";
    out.precision(17);
    for (const auto& pt : points) {
        out << pt.parameter << ',';
        if (std::isfinite(pt.xi_inverse))
            out << pt.xi_inverse;
        else
            out << (pt.xi_inverse > 0 ? "inf" : "nan");
        out << ',' << pt.gap << ',' << pt.root_modulus << '\n';
    }
}

std::vector<SweepPoint> both_sided_sweep(SweepSpec spec, double lo, double hi) {
    spec.start = -hi;
    spec.stop = -lo;
    spec.critical_value = 0.0;
    std::vector<SweepPoint> left = sweep(spec);
    spec.start = lo;
    spec.stop = hi;
    std::vector<SweepPoint> right = sweep(spec);
    std::sort(left.begin(), left.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.parameter < b.parameter; });
    std::sort(right.begin(), right.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.parameter < b.parameter; });
    left.insert(left.end(), right.begin(), right.end());
    return left;
}

} // namespace

std::vector<std::filesystem::path> reproduce_figure_data(FigureId id,
                                                         const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<std::filesystem::path> written;

    if (id == FigureId::TwoSiteReference) {
        SweepSpec spec;
        spec.model = make_quantum_optical_model(1.0, 1.0, 0.1);
        spec.generatorIndex = 0;
        spec.coeffIndex = 1;
        spec.field = SweepSpec::Field::G;
        spec.count = 25;
        const auto points = both_sided_sweep(spec, 1e-4, 1e-1);
        const auto curve = outdir / "two_site_reference_curves.csv";
        write_sweep_csv(curve, points);
        written.push_back(curve);

        const auto stub = outdir / "two_site_reference.gnuplot";
        std::ofstream gp(stub);
        gp << "set datafile separator ','\n"
              "set logscale y\n"
              "plot 'two_site_reference_curves.csv' using 1:2 with lines title 'xi^-1', \\\n"
              "     'two_site_reference_curves.csv' using 1:3 with lines title 'gap'\n";
        written.push_back(stub);
        return written;
    }

    // three-site families: slow family s = (1, 2 e^{ig}, 1), fast family
    // staircase phases with the middle phase perturbed
    struct Family {
        std::string name;
        std::function<LatticeModel(double)> at;
    };
    const Complex w3 = std::exp(I * (2.0 * pi / 3.0));
    std::vector<Family> families = {
        {"half", [](double g) {
             return make_odd_model({1.0, 2.0 * std::polar(1.0, g), 1.0});
         }},
        {"one", [w3](double g) {
             return make_odd_model({std::conj(w3), std::polar(1.0, g), w3});
         }}};

    for (const auto& fam : families) {
        std::vector<double> grid;
        const int npts = 20;
        for (int k = 0; k < npts; ++k)
            grid.push_back(std::exp(std::log(1e-3) +
                                    (std::log(0.5) - std::log(1e-3)) * k / (npts - 1)));

        const auto heat = outdir / ("three_site_" + fam.name + "_heatmap.csv");
        const auto curve = outdir / ("three_site_" + fam.name + "_xi.csv");
        std::ofstream hout(heat);
        hout << "g,d,abs_corr\n";
        hout.precision(17);
        std::ofstream cout_(curve);
        cout_ << "g,xi_inv,gap,root_mod\n";
        cout_.precision(17);
        for (double g : grid) {
            const LatticeModel m = fam.at(g);
            const SymbolFraction frac = to_symbol_fraction(m);
            const CorrelationProfile prof = residue_correlations(frac, 40);
            for (size_t k = 0; k < prof.distances.size(); ++k)
                hout << g << ',' << prof.distances[k] << ','
                     << std::abs(prof.values[k]) << '\n';
            const RootSet rs = denominator_roots(frac);
            const auto closest = rs.closest_inside();
            cout_ << g << ',' << correlation_length_inverse(frac) << ','
                  << damping_gap(frac) << ','
                  << (closest ? std::abs(closest->z)
                              : std::numeric_limits<double>::quiet_NaN())
                  << '\n';
        }
        written.push_back(heat);
        written.push_back(curve);
    }
    const auto stub = outdir / "three_site_families.gnuplot";
    std::ofstream gp(stub);
    gp << "set datafile separator ','\n"
          "set logscale xy\n"
          "plot 'three_site_half_xi.csv' using 1:2 with points title 'slow family', \\\n"
          "     'three_site_one_xi.csv' using 1:2 with points title 'fast family'\n";
    written.push_back(stub);
    return written;
}

} // namespace ness
