#include "ness/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace ness {

namespace {

constexpr Complex I{0.0, 1.0};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

void check_spectral_bound(const Eigen::MatrixXd& gamma) {
    Eigen::MatrixXcd ig = I * gamma.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ig, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -1.0 - 1e-9 || hi > 1.0 + 1e-9)
        throw NumericalError("correlation matrix violates the [-1, 1] spectral bound",
                             std::max(hi - 1.0, -1.0 - lo));
}

} // namespace

CorrelationMatrix CorrelationMatrix::vacuum(int L) {
    CorrelationMatrix c;
    c.L = L;
    c.gamma = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    for (int j = 0; j < L; ++j) {
        c.gamma(2 * j, 2 * j + 1) = 1.0;
        c.gamma(2 * j + 1, 2 * j) = -1.0;
    }
    return c;
}

CorrelationMatrix CorrelationMatrix::filled(int L) {
    CorrelationMatrix c = vacuum(L);
    c.gamma = -c.gamma;
    return c;
}

CorrelationMatrix CorrelationMatrix::completely_mixed(int L) {
    CorrelationMatrix c;
    c.L = L;
    c.gamma = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    return c;
}

void CorrelationMatrix::project_and_check() {
    gamma = 0.5 * (gamma - gamma.transpose()).eval();
    gamma.diagonal().setZero();
    check_spectral_bound(gamma);
}

CorrelationMatrix solve_lyapunov_finite(const DampingMatrices& dm) {
    const int n = 2 * dm.L;
    const double yscale = std::max(1.0, max_abs(dm.Y));
    const double xscale = std::max(1.0, max_abs(dm.X));

    // X is real in this convention; A = X^T turns the steady-state condition
    // into A G + G A^H = Y, which Schur form reduces to a triangular sweep.
    Eigen::MatrixXcd A = dm.X.transpose();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A);
    if (schur.info() != Eigen::Success)
        throw NumericalError("Schur decomposition failed");
    const Eigen::MatrixXcd& U = schur.matrixU();
    const Eigen::MatrixXcd& T = schur.matrixT();
    Eigen::MatrixXcd F = U.adjoint() * dm.Y * U;

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    const double sing_tol = 1e-12 * xscale;
    const double rhs_tol = 1e-8 * yscale;
    for (int i = n - 1; i >= 0; --i) {
        for (int j = n - 1; j >= 0; --j) {
            Complex rhs = F(i, j);
            if (i + 1 < n)
                rhs -= (T.row(i).segment(i + 1, n - 1 - i) *
                        G.col(j).segment(i + 1, n - 1 - i))
                           .value();
            if (j + 1 < n)
                rhs -= (G.row(i).segment(j + 1, n - 1 - j).array() *
                        T.row(j).segment(j + 1, n - 1 - j).array().conjugate())
                           .sum();
            const Complex denom = T(i, i) + std::conj(T(j, j));
            if (std::abs(denom) < sing_tol) {
                if (std::abs(rhs) > rhs_tol)
                    throw DegenerateSteadyStateError(
                        "steady state degenerate: damping eigenvalue pair sums to zero",
                        T(i, i), std::conj(T(j, j)));
                G(i, j) = 0.0; // decoupled sector, completely mixed completion
            } else {
                G(i, j) = rhs / denom;
            }
        }
    }

    Eigen::MatrixXcd Gamma = U * G * U.adjoint();
    CorrelationMatrix result;
    result.L = dm.L;
    result.gamma = Gamma.real();
    result.project_and_check();

    const Eigen::MatrixXcd resid = dm.X.transpose() * result.gamma.cast<Complex>() +
                                   result.gamma.cast<Complex>() * dm.X - dm.Y;
    const double rel = max_abs(resid) / yscale;
    if (rel > Tolerances::get().lyapunov_residual)
        throw NumericalError("steady-state residual above tolerance", rel);
    return result;
}

CorrelationMatrix solve_lyapunov_circulant(const LatticeModel& model) {
    model.validate();
    if (!model.chain.is_finite() || !model.chain.periodic)
        throw ValidationError("circulant solve needs a finite periodic chain");
    const int L = model.chain.L;

    // momentum blocks of X and Y from the infinite-chain stencil; on the
    // discrete grid these coincide with the DFT blocks of the circulant X, Y
    LatticeModel infinite = model;
    infinite.chain = ChainSpec::infinite();

    std::vector<Eigen::Matrix2cd> gamma_hat(static_cast<size_t>(L));
    for (int k = 0; k < L; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / L;
        const SymbolPair sp = build_symbol_matrices(infinite, phi);
        const SymbolPair sm = build_symbol_matrices(infinite, -phi);
        Eigen::Matrix2cd xT = sm.x.transpose();
        Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
        // vec(gamma) column-major: A gamma -> (I (x) A), gamma B -> (B^T (x) I)
        M.block<2, 2>(0, 0) += xT;
        M.block<2, 2>(2, 2) += xT;
        const Eigen::Matrix2cd BT = sp.x.transpose();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                M.block<2, 2>(2 * r, 2 * c) +=
                    BT(r, c) * Eigen::Matrix2cd::Identity();
        Eigen::Vector4cd rhs;
        const Eigen::Matrix2cd yeff = sp.y; // plain Y-symbol here
        rhs << yeff(0, 0), yeff(1, 0), yeff(0, 1), yeff(1, 1);
        Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix4cd> cod(M);
        Eigen::Vector4cd g = cod.solve(rhs);
        if ((M * g - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
            throw DegenerateSteadyStateError("singular momentum block in circulant solve",
                                             Complex(phi, 0.0), Complex(0.0, 0.0));
        Eigen::Matrix2cd gm;
        gm << g(0), g(2), g(1), g(3);
        gamma_hat[static_cast<size_t>(k)] = gm;
    }

    CorrelationMatrix result;
    result.L = L;
    result.gamma = Eigen::MatrixXd::Zero(2 * L, 2 * L);
    // Gamma block at offset d is the inverse transform of the momentum blocks
    std::vector<Eigen::Matrix2cd> blocks(static_cast<size_t>(L), Eigen::Matrix2cd::Zero());
    for (int d = 0; d < L; ++d) {
        Eigen::Matrix2cd b = Eigen::Matrix2cd::Zero();
        for (int k = 0; k < L; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / L;
            b += std::exp(I * (phi * d)) * gamma_hat[static_cast<size_t>(k)];
        }
        blocks[static_cast<size_t>(d)] = b / static_cast<double>(L);
    }
    for (int j = 0; j < L; ++j)
        for (int d = 0; d < L; ++d) {
            const int k = (j + d) % L;
            result.gamma.block<2, 2>(2 * j, 2 * k) = blocks[static_cast<size_t>(d)].real();
        }
    result.project_and_check();

    const DampingMatrices dm = build_damping_matrices(model);
    const Eigen::MatrixXcd resid = dm.X.transpose() * result.gamma.cast<Complex>() +
                                   result.gamma.cast<Complex>() * dm.X - dm.Y;
    const double rel = max_abs(resid) / std::max(1.0, max_abs(dm.Y));
    if (rel > Tolerances::get().lyapunov_residual)
        throw NumericalError("steady-state residual above tolerance", rel);
    return result;
}

namespace {

Eigen::MatrixXd rhs_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                           const Eigen::MatrixXd& gamma) {
    return X.transpose() * gamma + gamma * X - Y;
}

} // namespace

CorrelationMatrix evolve_finite(const DampingMatrices& dm, const CorrelationMatrix& gamma0,
                                double t, double dt) {
    if (!(dt > 0.0)) throw ValidationError("evolve_finite needs dt > 0");
    if (gamma0.L != dm.L) throw ValidationError("dimension mismatch in evolve_finite");
    const Eigen::MatrixXd X = dm.X.real();
    const Eigen::MatrixXd Y = dm.Y.real();

    // Dormand-Prince 5(4) with standard coefficients
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double rtol = Tolerances::get().ode_rel;
    const double atol = 1e-12;
    Eigen::MatrixXd g = gamma0.gamma;
    double time = 0.0;
    double h = std::min(dt, t);
    int steps = 0;
    while (time < t) {
        if (time + h > t) h = t - time;
        const Eigen::MatrixXd k1 = rhs_matrix(X, Y, g);
        const Eigen::MatrixXd k2 = rhs_matrix(X, Y, g + h * a21 * k1);
        const Eigen::MatrixXd k3 = rhs_matrix(X, Y, g + h * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXd k4 = rhs_matrix(X, Y, g + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXd k5 =
            rhs_matrix(X, Y, g + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXd k6 = rhs_matrix(
            X, Y, g + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::MatrixXd g5 = g + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXd k7 = rhs_matrix(X, Y, g5);
        const Eigen::MatrixXd err_m =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = atol + rtol * std::max(g.cwiseAbs().maxCoeff(),
                                                    g5.cwiseAbs().maxCoeff());
        const double err = err_m.cwiseAbs().maxCoeff() / scale;
        if (err <= 1.0) {
            time += h;
            g = g5;
        }
        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, t))
            throw IntegrationFailureError("step size underflow in evolve_finite", err);
        if (++steps > 2'000'000)
            throw IntegrationFailureError("step budget exhausted in evolve_finite", err);
    }
    CorrelationMatrix out;
    out.L = dm.L;
    out.gamma = g;
    out.project_and_check();
    return out;
}

CorrelationMatrix evolve_finite_expm(const DampingMatrices& dm,
                                     const CorrelationMatrix& gamma0, double t) {
    const CorrelationMatrix steady = solve_lyapunov_finite(dm);
    const Eigen::MatrixXd X = dm.X.real();
    const Eigen::MatrixXd E = (X * t).exp();
    CorrelationMatrix out;
    out.L = dm.L;
    out.gamma = steady.gamma + E.transpose() * (gamma0.gamma - steady.gamma) * E;
    out.project_and_check();
    return out;
}

namespace {

// Closed odd-only scalar gamma(phi) = (r(phi) - r(-phi)) / (r(phi) + r(-phi)),
// summed over families. Zero denominator flags a critical momentum.
double odd_only_scalar(const LatticeModel& model, double phi) {
    double rp = 0.0, rm = 0.0;
    for (const auto& gen : model.generators) {
        rp += reservoir_symbol(gen, phi).real();
        rm += reservoir_symbol(gen, -phi).real();
    }
    const double den = rp + rm;
    if (den < 1e-300)
        throw NumericalError("correlation symbol singular at this momentum (critical)", den);
    return (rp - rm) / den;
}

} // namespace

Eigen::Matrix2cd solve_symbol_pointwise(const LatticeModel& model, double phi) {
    model.validate();
    if (model.is_odd_only())
        return odd_only_scalar(model, phi) * Eigen::Matrix2cd::Identity();

    LatticeModel infinite = model;
    infinite.chain = ChainSpec::infinite();
    const SymbolPair sp = build_symbol_matrices(infinite, phi);
    const SymbolPair sm = build_symbol_matrices(infinite, -phi);

    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    const Eigen::Matrix2cd A = sm.x.transpose();
    M.block<2, 2>(0, 0) += A;
    M.block<2, 2>(2, 2) += A;
    const Eigen::Matrix2cd BT = sp.x.transpose();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            M.block<2, 2>(2 * r, 2 * c) += BT(r, c) * Eigen::Matrix2cd::Identity();

    const Eigen::Matrix2cd yeff = -I * sp.y;
    Eigen::Vector4cd rhs;
    rhs << yeff(0, 0), yeff(1, 0), yeff(0, 1), yeff(1, 1);

    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix4cd> cod(M);
    const Eigen::Vector4cd g = cod.solve(rhs);
    if ((M * g - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
        throw NumericalError("correlation symbol singular at this momentum (critical)",
                             (M * g - rhs).norm());

    Eigen::Matrix2cd gamma;
    gamma << g(0), g(2), g(1), g(3);
    // the correlation symbol is Hermitian in this convention
    const Eigen::Matrix2cd herm = 0.5 * (gamma + gamma.adjoint());
    if ((gamma - herm).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, herm.cwiseAbs().maxCoeff()))
        throw NumericalError("symbol Hermiticity violated beyond tolerance",
                             (gamma - herm).cwiseAbs().maxCoeff());
    return herm;
}

SymbolMatrix symbol_evaluator(const LatticeModel& model) {
    SymbolMatrix s;
    s.odd_only_scalar = model.is_odd_only();
    LatticeModel copy = model;
    s.eval = [copy](double phi) { return solve_symbol_pointwise(copy, phi); };
    return s;
}

CorrelationProfile correlations_quadrature(const SymbolMatrix& symbol, int dmax, int row,
                                           int col, double tol) {
    if (dmax < 0) throw ValidationError("dmax must be nonnegative");
    if (tol < 0.0) tol = Tolerances::get().quadrature_abs;
    const int max_points = 1 << 20;

    auto entry = [&](double phi) -> Complex {
        try {
            return symbol.eval(phi)(row, col);
        } catch (const NumericalError&) {
            // isolated singular momentum: nudge off the node
            return symbol.eval(phi + 1e-9)(row, col);
        }
    };

    int n = 64;
    while (n < 4 * (dmax + 1)) n *= 2;

    std::vector<Complex> samples;
    auto compute = [&](int npts) {
        samples.resize(static_cast<size_t>(npts));
        for (int k = 0; k < npts; ++k)
            samples[static_cast<size_t>(k)] = entry(2.0 * std::numbers::pi * k / npts);
        std::vector<Complex> coeffs(static_cast<size_t>(dmax) + 1, Complex(0.0));
        for (int d = 0; d <= dmax; ++d) {
            Complex acc = 0.0;
            for (int k = 0; k < npts; ++k)
                acc += samples[static_cast<size_t>(k)] *
                       std::exp(I * (2.0 * std::numbers::pi * k * d / npts));
            coeffs[static_cast<size_t>(d)] = acc / static_cast<double>(npts);
        }
        return coeffs;
    };

    std::vector<Complex> prev = compute(n);
    double achieved = std::numeric_limits<double>::infinity();
    while (true) {
        n *= 2;
        std::vector<Complex> next = compute(n);
        achieved = 0.0;
        for (size_t k = 0; k < next.size(); ++k)
            achieved = std::max(achieved, std::abs(next[k] - prev[k]));
        prev = std::move(next);
        if (achieved <= tol) break;
        if (n >= max_points)
            throw ToleranceNotMetError("quadrature did not reach target tolerance", achieved);
    }

    CorrelationProfile profile;
    profile.achieved_error = achieved;
    for (int d = 0; d <= dmax; ++d) {
        profile.distances.push_back(d);
        if (d == 0 && row == col)
            profile.values.push_back(1.0); // operator identity, not the integral
        else
            profile.values.push_back(prev[static_cast<size_t>(d)]);
    }
    return profile;
}

CorrelationProfile correlation_profile_finite(const CorrelationMatrix& gamma, int dmax,
                                              int row_species, int col_species) {
    const int L = gamma.L;
    if (dmax >= L) throw ValidationError("dmax must be below the chain length");
    CorrelationProfile profile;
    for (int d = 0; d <= dmax; ++d) {
        profile.distances.push_back(d);
        const int a = 2 * 0 + row_species;
        const int b = 2 * (d % L) + col_species;
        if (d == 0 && row_species == col_species)
            profile.values.push_back(1.0);
        else
            profile.values.push_back(-I * gamma.gamma(a, b));
    }
    return profile;
}

double occupation(const CorrelationMatrix& gamma) {
    double acc = 0.0;
    for (int j = 0; j < gamma.L; ++j) acc += (1.0 - gamma.gamma(2 * j, 2 * j + 1)) / 2.0;
    return acc / gamma.L;
}

double occupation(const SymbolMatrix& symbol) {
    // site-local <c^+ c> from the zero-distance odd-even block
    const CorrelationProfile p = correlations_quadrature(symbol, 0, 0, 1);
    const Complex c0 = p.values.at(0);
    const double gamma_oe = (I * c0).real();
    return (1.0 - gamma_oe) / 2.0;
}

namespace {

Complex two_point(const CorrelationMatrix& g, int a, int b) {
    if (a == b) return 1.0;
    return -I * g.gamma(a, b);
}

} // namespace

Complex wick_four_point(const CorrelationMatrix& gamma, const std::array<int, 4>& idx) {
    for (int v : idx)
        if (v < 0 || v >= 2 * gamma.L) throw ValidationError("Majorana index out of range");

    // reduce repeated indices via anticommutation and w^2 = 1
    std::vector<int> ops(idx.begin(), idx.end());
    double sign = 1.0;
    bool reduced = true;
    while (reduced) {
        reduced = false;
        for (size_t i = 0; i + 1 < ops.size() && !reduced; ++i) {
            for (size_t j = i + 1; j < ops.size(); ++j) {
                if (ops[i] != ops[j]) continue;
                // bubble ops[j] next to ops[i]; each swap of distinct
                // Majoranas flips the sign
                for (size_t k = j; k > i + 1; --k) {
                    std::swap(ops[k], ops[k - 1]);
                    sign = -sign;
                }
                ops.erase(ops.begin() + static_cast<long>(i),
                          ops.begin() + static_cast<long>(i) + 2);
                reduced = true;
                break;
            }
        }
    }

    if (ops.empty()) return sign;
    if (ops.size() == 2) return sign * two_point(gamma, ops[0], ops[1]);

    const Complex ab = two_point(gamma, ops[0], ops[1]);
    const Complex cd = two_point(gamma, ops[2], ops[3]);
    const Complex ac = two_point(gamma, ops[0], ops[2]);
    const Complex bd = two_point(gamma, ops[1], ops[3]);
    const Complex ad = two_point(gamma, ops[0], ops[3]);
    const Complex bc = two_point(gamma, ops[1], ops[2]);
    return sign * (ab * cd - ac * bd + ad * bc);
}

} // namespace ness
