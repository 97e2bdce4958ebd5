#include "ness/lattice_model.hpp"

#include <cmath>
#include <numbers>

namespace ness {

namespace {
constexpr Complex I{0.0, 1.0};

double fold_phase(double g) {
    const double two_pi = 2.0 * std::numbers::pi;
    double f = std::fmod(g, two_pi);
    if (f <= -std::numbers::pi) f += two_pi;
    if (f > std::numbers::pi) f -= two_pi;
    return f;
}
} // namespace

ComplexAmplitude ComplexAmplitude::make(double nu, double g) {
    if (!(nu >= 0.0) || !std::isfinite(nu))
        throw ValidationError("amplitude magnitude must be finite and nonnegative");
    if (!std::isfinite(g)) throw ValidationError("amplitude phase must be finite");
    if (nu == 0.0) return {0.0, 0.0};
    return {nu, fold_phase(g)};
}

ComplexAmplitude ComplexAmplitude::from_value(Complex s) {
    double nu = std::abs(s);
    if (nu == 0.0) return {0.0, 0.0};
    return {nu, std::arg(s)};
}

bool LindbladGenerator::is_odd_only() const {
    for (const auto& c : evenCoeffs)
        if (!c.is_zero()) return false;
    return true;
}

void LindbladGenerator::validate() const {
    if (oddCoeffs.empty())
        throw ValidationError("generator span must be a positive integer");
    if (oddCoeffs.size() != evenCoeffs.size())
        throw ValidationError("generator odd/even coefficient lists must have equal length");
    bool any = false;
    for (const auto& c : oddCoeffs) {
        if (!(c.nu >= 0.0)) throw ValidationError("generator magnitude must be nonnegative");
        any = any || !c.is_zero();
    }
    for (const auto& c : evenCoeffs) {
        if (!(c.nu >= 0.0)) throw ValidationError("generator magnitude must be nonnegative");
        any = any || !c.is_zero();
    }
    if (!any) throw ValidationError("generator must have at least one nonzero coefficient");
    if (normalized && (oddCoeffs[0].nu != 1.0 || oddCoeffs[0].g != 0.0))
        throw ValidationError("normalized generator requires oddCoeffs[0] == (1, 0)");
}

Eigen::VectorXcd LindbladGenerator::odd_values() const {
    Eigen::VectorXcd v(span());
    for (int m = 0; m < span(); ++m) v[m] = oddCoeffs[m].value();
    return v;
}

Eigen::VectorXcd LindbladGenerator::even_values() const {
    Eigen::VectorXcd v(span());
    for (int m = 0; m < span(); ++m) v[m] = evenCoeffs[m].value();
    return v;
}

int HamiltonianStencil::range() const {
    int r = 0;
    for (const auto& t : couplings) r = std::max(r, std::abs(t.offset));
    return r;
}

void HamiltonianStencil::validate() const {
    for (const auto& t : couplings) {
        if (!std::isfinite(t.coeff))
            throw ValidationError("Hamiltonian coefficient must be finite");
        if (t.offset == 0 && t.a == t.b)
            throw ValidationError("Hamiltonian term on equal Majorana indices is a constant");
    }
}

bool LatticeModel::is_odd_only() const {
    for (const auto& g : generators)
        if (!g.is_odd_only()) return false;
    return true;
}

void LatticeModel::validate() const {
    if (generators.empty())
        throw ValidationError("model must contain at least one generator family");
    for (const auto& g : generators) g.validate();
    if (hamiltonian) hamiltonian->validate();
    if (chain.is_finite()) {
        if (chain.L <= 0) throw ValidationError("finite chain needs L > 0");
        for (const auto& g : generators)
            if (g.span() > chain.L)
                throw ModelTooSmallError("generator span exceeds chain length");
        if (hamiltonian && hamiltonian->range() >= chain.L)
            throw ModelTooSmallError("Hamiltonian range exceeds chain length");
    }
}

std::vector<Eigen::VectorXcd> build_generator_vectors(const LatticeModel& model) {
    model.validate();
    if (!model.chain.is_finite())
        throw ValidationError("generator vectors require a finite chain");
    const int L = model.chain.L;
    std::vector<Eigen::VectorXcd> vectors;
    for (const auto& gen : model.generators) {
        const int N = gen.span();
        const int jmax = model.chain.periodic ? L : L - N + 1;
        for (int j = 0; j < jmax; ++j) {
            Eigen::VectorXcd l = Eigen::VectorXcd::Zero(2 * L);
            for (int m = 0; m < N; ++m) {
                const int site = (j + m) % L;
                l[conventions::odd_index(site)] += gen.oddCoeffs[m].value();
                l[conventions::even_index(site)] += gen.evenCoeffs[m].value();
            }
            vectors.push_back(std::move(l));
        }
    }
    return vectors;
}

Eigen::MatrixXcd build_hamiltonian_matrix(const LatticeModel& model) {
    if (!model.chain.is_finite())
        throw ValidationError("Hamiltonian matrix requires a finite chain");
    const int L = model.chain.L;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
    if (!model.hamiltonian) return H;
    auto majorana = [](int site, Species sp) {
        return sp == Species::Odd ? conventions::odd_index(site)
                                  : conventions::even_index(site);
    };
    for (const auto& term : model.hamiltonian->couplings) {
        for (int j = 0; j < L; ++j) {
            int k = j + term.offset;
            if (model.chain.periodic) {
                k = ((k % L) + L) % L;
            } else if (k < 0 || k >= L) {
                continue;
            }
            const int p = majorana(j, term.a);
            const int q = majorana(k, term.b);
            H(p, q) -= I * term.coeff * 0.5;
            H(q, p) += I * term.coeff * 0.5;
        }
    }
    return H;
}

DampingMatrices build_damping_matrices(const LatticeModel& model) {
    const auto vectors = build_generator_vectors(model);
    const int L = model.chain.L;
    const int n = 2 * L;
    DampingMatrices dm;
    dm.L = L;
    dm.R = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& l : vectors) dm.R += l * l.adjoint();
    // sign of the Hamiltonian term fixed by the exact-diagonalization oracle
    const Eigen::MatrixXcd H = build_hamiltonian_matrix(model);
    dm.X = 4.0 * I * H - (dm.R + dm.R.conjugate());
    dm.Y = 2.0 * I * (dm.R - dm.R.conjugate());
    return dm;
}

namespace {

// Per-family momentum amplitudes A_p(phi) = sum_m u_{p,m} e^{i phi m}.
Eigen::Vector2cd family_amplitude(const LindbladGenerator& gen, double phi) {
    Eigen::Vector2cd A = Eigen::Vector2cd::Zero();
    for (int m = 0; m < gen.span(); ++m) {
        const Complex mode = std::exp(I * (phi * m));
        A[0] += gen.oddCoeffs[m].value() * mode;
        A[1] += gen.evenCoeffs[m].value() * mode;
    }
    return A;
}

Eigen::Matrix2cd reservoir_block(const LatticeModel& model, double phi) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (const auto& gen : model.generators) {
        const Eigen::Vector2cd A = family_amplitude(gen, phi);
        rho += A * A.adjoint();
    }
    return rho;
}

Eigen::Matrix2cd hamiltonian_block(const LatticeModel& model, double phi) {
    Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
    if (!model.hamiltonian) return h;
    auto sp = [](Species s) { return s == Species::Odd ? 0 : 1; };
    for (const auto& term : model.hamiltonian->couplings) {
        const Complex fwd = std::exp(-I * (phi * term.offset));
        h(sp(term.a), sp(term.b)) -= I * term.coeff * 0.5 * fwd;
        h(sp(term.b), sp(term.a)) += I * term.coeff * 0.5 * std::conj(fwd);
    }
    return h;
}

} // namespace

SymbolPair build_symbol_matrices(const LatticeModel& model, double phi) {
    model.validate();
    if (model.chain.is_finite())
        throw ValidationError("symbol matrices are defined for infinite chains");
    const Eigen::Matrix2cd rho = reservoir_block(model, phi);
    const Eigen::Matrix2cd rho_star = reservoir_block(model, -phi).conjugate();
    const Eigen::Matrix2cd h = hamiltonian_block(model, phi);
    SymbolPair s;
    s.x = 4.0 * I * h - (rho + rho_star);
    s.y = 2.0 * I * (rho - rho_star);
    return s;
}

Complex reservoir_symbol(const LindbladGenerator& gen, double phi) {
    gen.validate();
    if (!gen.is_odd_only())
        throw UnsupportedGeneratorError(
            "reservoir symbol is defined for odd-only generators; "
            "use build_symbol_matrices for mixed couplings");
    Complex S = 0.0;
    for (int m = 0; m < gen.span(); ++m)
        S += gen.oddCoeffs[m].value() * std::exp(-I * (phi * m));
    return Complex(std::norm(S), 0.0);
}

} // namespace ness
