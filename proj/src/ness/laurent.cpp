#include "ness/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ness/errors.hpp"
#include "ness/tolerances.hpp"

namespace ness {

LaurentPolynomial::LaurentPolynomial(std::map<int, Complex> coeffs) : c_(std::move(coeffs)) {
    trim();
}

LaurentPolynomial LaurentPolynomial::constant(Complex c) {
    LaurentPolynomial p;
    p.set_coefficient(0, c);
    return p;
}

LaurentPolynomial LaurentPolynomial::monomial(int exponent, Complex c) {
    LaurentPolynomial p;
    p.set_coefficient(exponent, c);
    return p;
}

LaurentPolynomial::Complex LaurentPolynomial::coefficient(int exponent) const {
    auto it = c_.find(exponent);
    return it == c_.end() ? Complex(0.0, 0.0) : it->second;
}

void LaurentPolynomial::set_coefficient(int exponent, Complex value) {
    if (value == Complex(0.0, 0.0))
        c_.erase(exponent);
    else
        c_[exponent] = value;
}

void LaurentPolynomial::add_to_coefficient(int exponent, Complex value) {
    set_coefficient(exponent, coefficient(exponent) + value);
}

int LaurentPolynomial::min_exponent() const {
    if (c_.empty()) throw std::logic_error("zero Laurent polynomial has no support");
    return c_.begin()->first;
}

int LaurentPolynomial::max_exponent() const {
    if (c_.empty()) throw std::logic_error("zero Laurent polynomial has no support");
    return c_.rbegin()->first;
}

double LaurentPolynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, v] : c_) m = std::max(m, std::abs(v));
    return m;
}

LaurentPolynomial::Complex LaurentPolynomial::eval(Complex z) const {
    Complex acc = 0.0;
    for (const auto& [e, v] : c_) acc += v * std::pow(z, e);
    return acc;
}

LaurentPolynomial::Complex LaurentPolynomial::eval_circle(double phi) const {
    Complex acc = 0.0;
    for (const auto& [e, v] : c_)
        acc += v * std::exp(Complex(0.0, phi * e));
    return acc;
}

LaurentPolynomial LaurentPolynomial::derivative() const {
    LaurentPolynomial d;
    for (const auto& [e, v] : c_)
        if (e != 0) d.set_coefficient(e - 1, v * static_cast<double>(e));
    return d;
}

LaurentPolynomial LaurentPolynomial::conjugated() const {
    LaurentPolynomial r;
    for (const auto& [e, v] : c_) r.set_coefficient(e, std::conj(v));
    return r;
}

LaurentPolynomial LaurentPolynomial::reciprocal_argument() const {
    LaurentPolynomial r;
    for (const auto& [e, v] : c_) r.set_coefficient(-e, v);
    return r;
}

LaurentPolynomial& LaurentPolynomial::operator+=(const LaurentPolynomial& other) {
    for (const auto& [e, v] : other.c_) add_to_coefficient(e, v);
    return *this;
}

LaurentPolynomial& LaurentPolynomial::operator-=(const LaurentPolynomial& other) {
    for (const auto& [e, v] : other.c_) add_to_coefficient(e, -v);
    return *this;
}

LaurentPolynomial LaurentPolynomial::operator*(const LaurentPolynomial& other) const {
    LaurentPolynomial r;
    for (const auto& [e1, v1] : c_)
        for (const auto& [e2, v2] : other.c_) r.add_to_coefficient(e1 + e2, v1 * v2);
    return r;
}

LaurentPolynomial LaurentPolynomial::operator*(Complex scale) const {
    LaurentPolynomial r;
    for (const auto& [e, v] : c_) r.set_coefficient(e, v * scale);
    return r;
}

void LaurentPolynomial::trim(double rel) {
    if (rel < 0.0) rel = Tolerances::get().trim_rel;
    const double cutoff = rel * max_abs_coefficient();
    for (auto it = c_.begin(); it != c_.end();) {
        if (std::abs(it->second) <= cutoff)
            it = c_.erase(it);
        else
            ++it;
    }
}

std::vector<LaurentPolynomial::Complex>
LaurentPolynomial::cleared_coefficients(int* shift) const {
    if (c_.empty()) {
        if (shift) *shift = 0;
        return {};
    }
    const int K = std::max(0, -min_exponent());
    if (shift) *shift = K;
    std::vector<Complex> out(static_cast<size_t>(max_exponent() + K) + 1, Complex(0.0, 0.0));
    for (const auto& [e, v] : c_) out[static_cast<size_t>(e + K)] = v;
    return out;
}

namespace poly {

Complex eval(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::vector<Complex> derivative(const std::vector<Complex>& coeffs) {
    if (coeffs.size() <= 1) return {};
    std::vector<Complex> d(coeffs.size() - 1);
    for (size_t k = 1; k < coeffs.size(); ++k)
        d[k - 1] = coeffs[k] * static_cast<double>(k);
    return d;
}

std::vector<Complex> taylor_at(const std::vector<Complex>& coeffs, Complex a, int order) {
    std::vector<Complex> work = coeffs;
    std::vector<Complex> taylor;
    taylor.reserve(static_cast<size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        if (work.empty()) {
            taylor.push_back(0.0);
            continue;
        }
        // synthetic division of work by (z - a): remainder is the next
        // Taylor coefficient, quotient replaces work
        Complex rem = work.back();
        std::vector<Complex> quot(work.size() > 1 ? work.size() - 1 : 0);
        for (int i = static_cast<int>(work.size()) - 2; i >= 0; --i) {
            quot[static_cast<size_t>(i)] = rem;
            rem = work[static_cast<size_t>(i)] + rem * a;
        }
        taylor.push_back(rem);
        work = std::move(quot);
    }
    return taylor;
}

std::vector<Complex> deflate(const std::vector<Complex>& coeffs, Complex a, int multiplicity) {
    std::vector<Complex> work = coeffs;
    for (int k = 0; k < multiplicity; ++k) {
        if (work.size() <= 1) return {};
        std::vector<Complex> quot(work.size() - 1);
        Complex rem = work.back();
        for (int i = static_cast<int>(work.size()) - 2; i >= 0; --i) {
            quot[static_cast<size_t>(i)] = rem;
            rem = work[static_cast<size_t>(i)] + rem * a;
        }
        work = std::move(quot);
    }
    return work;
}

std::vector<Complex> series_divide(const std::vector<Complex>& num,
                                   const std::vector<Complex>& den, int order) {
    if (den.empty() || den[0] == Complex(0.0, 0.0))
        throw std::invalid_argument("series division needs nonzero constant term");
    std::vector<Complex> q(static_cast<size_t>(order) + 1, Complex(0.0, 0.0));
    for (int k = 0; k <= order; ++k) {
        Complex acc = k < static_cast<int>(num.size()) ? num[static_cast<size_t>(k)] : Complex(0.0);
        for (int j = 1; j <= k; ++j) {
            if (j < static_cast<int>(den.size()))
                acc -= den[static_cast<size_t>(j)] * q[static_cast<size_t>(k - j)];
        }
        q[static_cast<size_t>(k)] = acc / den[0];
    }
    return q;
}

std::vector<Complex> roots(const std::vector<Complex>& coeffs) {
    // strip leading (high-degree) zeros and factor out z^m from trailing zeros
    std::vector<Complex> c = coeffs;
    const double scale = [&] {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }();
    if (scale == 0.0) return {};
    while (!c.empty() && std::abs(c.back()) <= 1e-300) c.pop_back();
    std::vector<Complex> result;
    size_t lead_zeros = 0;
    while (lead_zeros < c.size() && c[lead_zeros] == Complex(0.0, 0.0)) ++lead_zeros;
    for (size_t k = 0; k < lead_zeros; ++k) result.push_back(0.0);
    c.erase(c.begin(), c.begin() + static_cast<long>(lead_zeros));
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return result;

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
        companion(i, n - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(n)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);

    const std::vector<Complex> dc = derivative(c);
    for (int i = 0; i < n; ++i) {
        Complex z = es.eigenvalues()[i];
        // Newton polish; keep only strict improvements of |p(z)|
        for (int it = 0; it < 4; ++it) {
            const Complex pz = eval(c, z);
            const Complex dz = eval(dc, z);
            if (std::abs(dz) < 1e-300) break;
            const Complex znew = z - pz / dz;
            if (std::abs(eval(c, znew)) < std::abs(pz))
                z = znew;
            else
                break;
        }
        result.push_back(z);
    }
    std::sort(result.begin(), result.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return result;
}

} // namespace poly

} // namespace ness
