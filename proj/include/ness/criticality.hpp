#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ness/lattice_model.hpp"
#include "ness/laurent.hpp"
#include "ness/solver.hpp"

namespace ness {

// Correlation symbol as a rational function n(z)/d(z) on the unit circle,
// z = e^{i phi}. For odd-only generators d(e^{i phi}) = r(phi) + r(-phi) and
// n(e^{i phi}) = r(phi) - r(-phi).
struct SymbolFraction {
    LaurentPolynomial numerator;
    LaurentPolynomial denominator;
};

enum class RootClass { Inside, OnCircle, Outside };

struct RootRecord {
    Complex z;
    int multiplicity = 1;
    RootClass cls = RootClass::Inside;
};

struct RootSet {
    std::vector<RootRecord> roots;
    int cleared_degree = 0;

    bool empty() const { return roots.empty(); }
    bool has_on_circle() const;
    // inside root closest to the unit circle (largest modulus), if any
    std::optional<RootRecord> closest_inside() const;
};

// Residuals of the criticality conditions at unit-circle point z0, per moment
// order m: (sum_j s_j j^m z0^j, sum_j s_j j^m conj(z0)^j), s normalized to
// s_0 = 1. Both vanishing at m = 0 means critical at z0.
struct MomentResidual {
    Complex at_z0;
    Complex at_conj;
    double magnitude() const;
};

struct CriticalCandidate {
    Complex z0;
    int momentOrder = 0;       // smallest m with nonvanishing residual pair
    int mergingRootCount = 0;  // kappa: polynomial roots merging at z0
};

struct CriticalityReport {
    bool critical = false;
    std::vector<CriticalCandidate> candidates;
    double predictedLambda = 0.0;  // 1 / max momentOrder, 0 when not critical
    int predictedManifoldDim = -1; // 2 (N - 1 - 1/lambda)
    double xi_inverse = 0.0;       // attached for non-critical generators
    double normalizationFactor = 1.0;
};

// Solution family of the critical-parameter equations: particular least-norm
// point plus a basis of the complex nullspace (free directions).
struct CriticalSolutionFamily {
    std::vector<Complex> coefficients; // s_0..s_{N-1}, s_0 = 1
    std::vector<std::vector<Complex>> freeDirections;
    double residual = 0.0;
    bool verified = false;
};

// Exact Laurent assembly of the odd-only correlation fraction; the raw
// (unnormalized) coefficients are used so that d carries the physical rate
// scale.
SymbolFraction to_symbol_fraction(const LindbladGenerator& gen);

// Model-level variant summing all odd-only families.
SymbolFraction to_symbol_fraction(const LatticeModel& model);

// Roots of the exponent-cleared denominator polynomial, clustered into
// multiplicities and classified against the unit circle.
RootSet denominator_roots(const SymbolFraction& frac);

// Correlations <w_1 w_{1+2d}> for d = 0..dmax as residue sums over the poles
// of z^{d-1} n(z)/d(z) inside the unit circle. On-circle poles raise a
// CriticalityError carrying the report.
CorrelationProfile residue_correlations(const SymbolFraction& frac, int dmax);

// Inverse correlation length -ln|z0|; +infinity for strictly local
// correlations, exactly 0 when a pole sits on the circle.
double correlation_length_inverse(const SymbolFraction& frac);

// Relaxation-rate band -r(phi)-r(-phi) on the given momentum grid.
std::vector<double> damping_spectrum(const LindbladGenerator& gen,
                                     const std::vector<double>& phiGrid);

// Gap of the damping band: global minimum of d on the unit circle (dense
// sampling plus local polishing), clamped at zero.
double damping_gap(const SymbolFraction& frac);

// Minimum nonzero relaxation rate from the finite-size matrices; the
// Hamiltonian part is excluded.
double damping_gap_finite(const DampingMatrices& dm);

// Gap from the momentum-space bands of -(R + R*); works for generators of
// both species and reduces to damping_gap for odd-only models. Bands that
// vanish identically (decoupled sectors) are excluded.
double damping_gap_symbol(const LatticeModel& model);

// Criticality error carrying the diagnostic report.
class CriticalityError : public NumericalError {
  public:
    CriticalityError(const std::string& msg, CriticalityReport r)
        : NumericalError(msg), report(std::move(r)) {}
    const char* kind() const noexcept override { return "criticality"; }
    CriticalityReport report;
};

// Pair of residuals (1 + sum_j s_j z0^j, 1 + sum_j s_j conj(z0)^j) after
// normalizing s_0 = 1.
std::pair<Complex, Complex> criticality_conditions(const LindbladGenerator& gen, Complex z0);

// Residual pairs for m = 0..mMax; throws when every order up to span-1
// vanishes (degenerate generator, symbol identically zero).
std::vector<MomentResidual> moment_conditions(const LindbladGenerator& gen, Complex z0,
                                              int mMax);

// Full criticality analysis: unit-circle candidates located by minimizing d
// on the circle and confirmed against the implicit conditions, moment order
// and merging-root count per candidate, predicted exponent and manifold
// dimension.
CriticalityReport predict_exponents(const LindbladGenerator& gen);

// Solves the moment equations for orders m = 0..targetM-1 as a linear system
// in s_1..s_{N-1} (s_0 = 1), with optional fixed coefficients (index ->
// value). Least-norm particular solution plus nullspace basis.
CriticalSolutionFamily solve_critical_parameters(int N, int targetM, Complex z0,
                                                 const std::map<int, Complex>& fixed = {});

// Numerical rank of the active constraint Jacobian (parameters + circle
// coordinate) at a critical point; returns the empirical manifold dimension.
int empirical_manifold_dimension(const LindbladGenerator& gen,
                                 std::optional<Complex> z0_hint = std::nullopt);

} // namespace ness
