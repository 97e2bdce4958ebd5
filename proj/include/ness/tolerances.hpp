#pragma once

#include <cstdlib>
#include <string>

namespace ness {

// Numerical tolerances used across the library. Every value can be overridden
// through an environment variable NESS_TOL_<NAME> (upper-case field name),
// read once at first access.
struct Tolerances {
    double lyapunov_residual = 1e-10; // rel. to max(1, ||Y||_max)
    double quadrature_abs = 1e-12;    // absolute Fourier-coefficient target
    double circle_classify = 1e-9;    // | |z|-1 | below which a root is "on circle"
    double root_merge = 1e-7;         // cluster radius for root multiplicities
    double kappa_cluster = 1e-4;      // radius for merging-root counts at criticality
    double critical_residual = 1e-10; // criticality-condition magnitude threshold
    double trim_rel = 1e-14;          // Laurent coefficient trim, relative
    double psd_slack = 1e-12;         // allowed negativity for PSD checks
    double ode_rel = 1e-9;            // relative tolerance of the adaptive integrator
    double rank_rel = 1e-8;           // singular-value cutoff for numerical rank

    static const Tolerances& get();
};

// Convention table. All sign and factor choices of the Majorana machinery are
// fixed here, once, and locked by the exact-diagonalization oracle in the
// experiments module (tests/test_experiments.cpp exercises it end to end).
//
//   Site j (0-based) owns Majorana index 2j ("odd species", c^dag + c) and
//   2j+1 ("even species", i(c - c^dag)).  Hence
//       c_j    = (w_{2j} - i w_{2j+1}) / 2,
//       c_j^+  = (w_{2j} + i w_{2j+1}) / 2.
//
//   Correlation matrix (real antisymmetric, stored as double):
//       Gamma_{ab} = (i/2) < [w_a, w_b] >,   <w_a w_b> = delta_{ab} - i Gamma_{ab}.
//   Occupation:  <c^+ c>_j = (1 - Gamma_{2j,2j+1}) / 2.
//
//   Damping matrices for dGamma/dt = X^T Gamma + Gamma X - Y:
//       R = sum_mu l_mu l_mu^+,  X = 4iH - (R + R*),  Y = 2i(R - R*),
//   with H the antisymmetric imaginary coefficient matrix of the Hamiltonian
//   bilinear.  A stencil term (offset d, species (a,b), coefficient alpha)
//   contributes  alpha * i w_{(j,a)} w_{(j+d,b)}  per site j, i.e.
//       H_{(j,a),(j+d,b)} -= i alpha / 2,   H_{(j+d,b),(j,a)} += i alpha / 2.
//   The sign of the 4iH term is pinned by the exact-diagonalization oracle.
//
//   Symbols use the transform  s(phi) = sum_d B(d) e^{-i phi d}  of the block
//   at site offset d.  The correlation symbol gamma(phi) is the symbol of the
//   matrix <w w> without the identity part, i.e. of -i * Gamma; consequently
//       <w_1 w_{1+2d}> = (1/2pi) Int_0^{2pi} e^{i phi d} gamma_11(phi) dphi
//   for d != 0, the d = 0 value is the operator identity 1, and gamma solves
//       x(-phi)^T gamma(phi) + gamma(phi) x(phi) = -i y(phi)
//   with x, y the plain symbols of X and Y.  For generators containing only
//   odd-species Majorana operators this reduces to the closed scalar form
//       gamma(phi) = (r(phi) - r(-phi)) / (r(phi) + r(-phi)) * Identity,
//       r(phi) = |sum_m s_m e^{-i phi m}|^2.
namespace conventions {
inline constexpr int odd_index(int site) { return 2 * site; }
inline constexpr int even_index(int site) { return 2 * site + 1; }
} // namespace conventions

} // namespace ness
