#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ness/errors.hpp"
#include "ness/tolerances.hpp"

namespace ness {

using Complex = std::complex<double>;

// Polar representation of one reservoir coupling amplitude, value = nu e^{ig}.
struct ComplexAmplitude {
    double nu = 0.0; // magnitude, >= 0
    double g = 0.0;  // phase in radians, canonical range (-pi, pi]

    Complex value() const { return std::polar(nu, g); }
    bool is_zero() const { return nu == 0.0; }

    // Canonicalize: nonnegative magnitude, phase folded into (-pi, pi].
    static ComplexAmplitude make(double nu, double g);
    static ComplexAmplitude from_value(Complex s);
};

// One translation-invariant reservoir family coupling N adjacent sites.
// oddCoeffs[m] multiplies the odd-species Majorana of site j+m, evenCoeffs[m]
// the even-species one, for every anchor site j.
struct LindbladGenerator {
    std::vector<ComplexAmplitude> oddCoeffs;
    std::vector<ComplexAmplitude> evenCoeffs;
    bool normalized = false; // when set, oddCoeffs[0] must be exactly (1, 0)

    int span() const { return static_cast<int>(oddCoeffs.size()); }
    bool is_odd_only() const;
    void validate() const;

    Eigen::VectorXcd odd_values() const;
    Eigen::VectorXcd even_values() const;
};

enum class Species { Odd, Even };

// One translation-invariant Hamiltonian coupling: contributes the Hermitian
// term  coeff * i * w_{(j,a)} w_{(j+offset,b)}  for every site j.
struct HamiltonianTerm {
    int offset = 0;
    Species a = Species::Odd;
    Species b = Species::Even;
    double coeff = 0.0;
};

struct HamiltonianStencil {
    std::vector<HamiltonianTerm> couplings;
    int range() const;
    void validate() const;
};

struct ChainSpec {
    enum class Kind { Infinite, Finite };
    Kind kind = Kind::Infinite;
    int L = 0;            // site count, finite chains only
    bool periodic = true; // finite chains only

    static ChainSpec infinite() { return {}; }
    static ChainSpec finite(int L, bool periodic) {
        return {Kind::Finite, L, periodic};
    }
    bool is_finite() const { return kind == Kind::Finite; }
};

struct LatticeModel {
    std::vector<LindbladGenerator> generators;
    std::optional<HamiltonianStencil> hamiltonian;
    ChainSpec chain;

    bool is_odd_only() const;
    void validate() const;
};

// Finite-size damping matrices of dGamma/dt = X^T Gamma + Gamma X - Y.
// R is the reservoir matrix sum_mu l_mu l_mu^+; X and Y are real in the
// convention of the table in tolerances.hpp but stored complex.
struct DampingMatrices {
    int L = 0;
    Eigen::MatrixXcd X;
    Eigen::MatrixXcd Y;
    Eigen::MatrixXcd R;
};

// Momentum-space 2x2 blocks of X and Y in the (odd, even) species basis.
struct SymbolPair {
    Eigen::Matrix2cd x;
    Eigen::Matrix2cd y;
};

// One coefficient vector l_mu of length 2L per (generator family, anchor
// site). Periodic chains wrap; open chains drop boundary-truncated copies.
std::vector<Eigen::VectorXcd> build_generator_vectors(const LatticeModel& model);

DampingMatrices build_damping_matrices(const LatticeModel& model);

// The 2L x 2L Hamiltonian coefficient matrix H (antisymmetric, purely
// imaginary entries). Shared by the Gaussian machinery and the exact
// Fock-space oracle so that both sides use identical conventions.
Eigen::MatrixXcd build_hamiltonian_matrix(const LatticeModel& model);

// Momentum-space symbols of X and Y at momentum phi (infinite chains).
SymbolPair build_symbol_matrices(const LatticeModel& model, double phi);

// Reservoir symbol r(phi) = |sum_m s_m e^{-i phi m}|^2 of an odd-only
// generator; real and nonnegative.
Complex reservoir_symbol(const LindbladGenerator& gen, double phi);

} // namespace ness
