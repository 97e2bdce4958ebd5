#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ness/lattice_model.hpp"

namespace ness {

// Majorana two-point correlations of a Gaussian state on a finite chain,
// stored in the real antisymmetric convention (see tolerances.hpp).
struct CorrelationMatrix {
    int L = 0;
    Eigen::MatrixXd gamma; // 2L x 2L, gamma^T = -gamma, zero diagonal

    static CorrelationMatrix vacuum(int L);
    static CorrelationMatrix filled(int L);
    static CorrelationMatrix completely_mixed(int L);

    // Antisymmetrize, zero the diagonal, check the spectral bound on i*gamma.
    void project_and_check();
};

// Momentum-space 2x2 correlation symbol gamma(phi). Closed forms carry a
// Laurent table per entry in addition to the evaluator.
struct SymbolMatrix {
    std::function<Eigen::Matrix2cd(double)> eval;
    bool odd_only_scalar = false; // gamma = scalar * identity

    Eigen::Matrix2cd operator()(double phi) const { return eval(phi); }
};

struct CorrelationProfile {
    std::vector<int> distances;
    std::vector<Complex> values; // <w_1 w_{1+2d}> per distance
    double achieved_error = 0.0;
};

// Steady state of dGamma/dt = X^T Gamma + Gamma X - Y via Schur-based
// back-substitution. Eigenvalue pairs of X summing to zero are tolerated only
// when the transformed right-hand side vanishes there (decoupled sectors get
// the completely mixed completion); otherwise a DegenerateSteadyStateError
// names the offending pair. The residual is asserted against the tolerance
// table before returning.
CorrelationMatrix solve_lyapunov_finite(const DampingMatrices& dm);

// Same steady state through per-momentum 2x2 solves; exact for periodic
// translation-invariant models and much faster for large L.
CorrelationMatrix solve_lyapunov_circulant(const LatticeModel& model);

// Adaptive embedded Runge-Kutta integration of the correlation dynamics from
// gamma0 over time t.
CorrelationMatrix evolve_finite(const DampingMatrices& dm, const CorrelationMatrix& gamma0,
                                double t, double dt);

// Exact propagation via the matrix exponential (validation path).
CorrelationMatrix evolve_finite_expm(const DampingMatrices& dm,
                                     const CorrelationMatrix& gamma0, double t);

// Pointwise correlation symbol: solves the 4-unknown linear system
// x(-phi)^T gamma + gamma x(phi) = -i y(phi). Odd-only models take the closed
// scalar route; the even sector is then fixed by the degeneracy-lifting
// convention (same scalar on both species).
Eigen::Matrix2cd solve_symbol_pointwise(const LatticeModel& model, double phi);

// Wraps solve_symbol_pointwise into an evaluator.
SymbolMatrix symbol_evaluator(const LatticeModel& model);

// Fourier coefficients <w_1 w_{1+2d}> of gamma_{ab} for d = 0..dmax by
// trapezoidal quadrature on periodic grids with grid doubling until the
// absolute tolerance; throws ToleranceNotMetError with the achieved error
// when doubling stalls.
CorrelationProfile correlations_quadrature(const SymbolMatrix& symbol, int dmax,
                                           int row = 0, int col = 0, double tol = -1.0);

// Bulk profile from a finite-chain correlation matrix (row anchored at site 0).
CorrelationProfile correlation_profile_finite(const CorrelationMatrix& gamma, int dmax,
                                              int row_species = 0, int col_species = 0);

// Mean density <c^+ c> per site.
double occupation(const CorrelationMatrix& gamma);
double occupation(const SymbolMatrix& symbol);

// <w_a w_b w_c w_d> by Wick contraction of the two-point functions; repeated
// indices reduce through w^2 = 1 first. Indices are 0-based Majorana labels.
Complex wick_four_point(const CorrelationMatrix& gamma, const std::array<int, 4>& idx);

} // namespace ness
