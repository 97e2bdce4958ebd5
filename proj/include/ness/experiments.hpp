#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ness/criticality.hpp"
#include "ness/lattice_model.hpp"
#include "ness/solver.hpp"

namespace ness {

// Model builders for the reference families used throughout the tests and
// the desk-scale reproductions.
LindbladGenerator make_odd_generator(const std::vector<Complex>& s);
LatticeModel make_odd_model(const std::vector<Complex>& s,
                            ChainSpec chain = ChainSpec::infinite());

// Two reservoir families per site: loss chi-independent (c_j + nu e^{ig}
// c_{j+1}) and pump chi (c_j^+ + nu c_{j+1}^+), written in Majorana
// coefficients through the convention table.
LatticeModel make_quantum_optical_model(double chi, double nu, double g,
                                        ChainSpec chain = ChainSpec::infinite());

struct QuantumOpticalParams {
    double chi = 0.0;
    double nu = 0.0;
    double g = 0.0;
    double rate_scale = 1.0; // overall magnitude of the loss family
};

// Recognize a model as the two-site pump/loss family; returns its parameters
// when the structure matches.
std::optional<QuantumOpticalParams> match_quantum_optical(const LatticeModel& model);

// Closed-form correlation symbol of the pump/loss family.
SymbolMatrix quantum_optical_reference(double chi, double nu, double g);

// Denominator (and odd-odd numerator) of that symbol as Laurent polynomials;
// drives root-based correlation lengths for this mixed-species family.
SymbolFraction quantum_optical_fraction(double chi, double nu, double g);

// Denominator roots from its exact two-factor split. The factored quadratics
// stay well conditioned where the assembled quartic has four roots merging at
// the same circle point.
std::vector<Complex> quantum_optical_roots(double chi, double nu, double g);

// Inverse correlation length of the pump/loss family from the factored roots.
double quantum_optical_xi_inverse(double chi, double nu, double g);

// --- parameter sweeps ------------------------------------------------------

struct SweepSpec {
    LatticeModel model;
    int generatorIndex = 0;
    int coeffIndex = 0;
    enum class Field { Nu, G } field = Field::G;
    double start = 0.0;
    double stop = 0.0;
    int count = 25;
    bool log_toward_critical = true;
    std::optional<double> critical_value; // defaults to 0 for log grids

    void validate() const;
};

struct SweepPoint {
    double parameter = 0.0;
    double xi_inverse = 0.0;
    double gap = 0.0;
    double root_modulus = 0.0;
    bool ok = false;
    std::string error;
};

// Independent per-point evaluation; per-point failures are recorded, never
// fatal. workers <= 0 selects the available hardware parallelism.
std::vector<SweepPoint> sweep(const SweepSpec& spec, int workers = 0);

// --- exponent fits ----------------------------------------------------------

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double standard_error = 0.0;
    int points_used = 0;
    double window_lo = 1e-4;
    double window_hi = 1e-2;
    double dynamical_z = 0.0; // filled by the dynamical fit
};

inline constexpr double kDefaultFitWindowLo = 1e-4;
inline constexpr double kDefaultFitWindowHi = 1e-2;

// Least-squares slope of log(xi^-1) against log|p - p_c| inside the window.
ExponentFit fit_static_exponent(const std::vector<SweepPoint>& points, double p_c,
                                double window_lo = kDefaultFitWindowLo,
                                double window_hi = kDefaultFitWindowHi);

// Slope of log(gap) against log|p - p_c|; the dynamical exponent is
// slope / lambda.
ExponentFit fit_dynamical_exponent(const std::vector<SweepPoint>& points, double p_c,
                                   double lambda,
                                   double window_lo = kDefaultFitWindowLo,
                                   double window_hi = kDefaultFitWindowHi);

// Generic power-law fit on (abscissa, ordinate) pairs, used by both fits and
// directly testable on synthetic data.
ExponentFit fit_power_law(const std::vector<double>& abscissa,
                          const std::vector<double>& ordinate, double window_lo,
                          double window_hi);

// --- exact Fock-space oracle -------------------------------------------------

struct LiouvillianOracleResult {
    int L = 0;
    int kernel_dimension = 1;
    Eigen::MatrixXd gamma; // 2L x 2L two-point correlations
    Eigen::MatrixXcd rho;  // steady density matrix, trace one
    std::vector<Eigen::MatrixXcd> majorana; // Fock-space Majorana operators

    Complex four_point(const std::array<int, 4>& idx) const;
    double occupation() const;
};

// Full Liouvillian in a fermionic Fock basis (L <= 4), steady state from its
// kernel. A kernel of dimension > 1 raises DegenerateSteadyStateError unless
// allow_degenerate is set, in which case the trace-normalizable kernel
// element is reported along with the dimension.
LiouvillianOracleResult exact_liouvillian_oracle(const LatticeModel& model,
                                                 bool allow_degenerate = false);

// --- figure-style data bundles ----------------------------------------------

enum class FigureId { TwoSiteReference, ThreeSiteFamilies };

// Emits CSV bundles (plus a gnuplot stub) for the desk-scale reproductions:
// TwoSiteReference: (g, xi_inv, gap, root_mod) for the pump/loss family;
// ThreeSiteFamilies: correlation heatmaps (g, d, abs_corr) and xi curves for
// both three-site critical families.
std::vector<std::filesystem::path> reproduce_figure_data(FigureId id,
                                                         const std::filesystem::path& outdir);

} // namespace ness
