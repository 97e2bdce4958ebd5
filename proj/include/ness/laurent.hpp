#pragma once

#include <complex>
#include <map>
#include <vector>

namespace ness {

// Finite-support Laurent polynomial sum_k c_k z^k with integer exponents of
// either sign. Coefficients below trim_rel of the largest magnitude are
// dropped by trim().
class LaurentPolynomial {
  public:
    using Complex = std::complex<double>;

    LaurentPolynomial() = default;
    explicit LaurentPolynomial(std::map<int, Complex> coeffs);
    static LaurentPolynomial constant(Complex c);
    static LaurentPolynomial monomial(int exponent, Complex c);

    const std::map<int, Complex>& coefficients() const { return c_; }
    Complex coefficient(int exponent) const;
    void set_coefficient(int exponent, Complex value);
    void add_to_coefficient(int exponent, Complex value);

    bool is_zero() const { return c_.empty(); }
    int min_exponent() const; // throws on zero polynomial
    int max_exponent() const;
    double max_abs_coefficient() const;

    Complex eval(Complex z) const;
    Complex eval_circle(double phi) const; // eval at e^{i phi}
    LaurentPolynomial derivative() const;
    LaurentPolynomial conjugated() const;          // coefficients conjugated
    LaurentPolynomial reciprocal_argument() const; // z -> 1/z

    LaurentPolynomial& operator+=(const LaurentPolynomial& other);
    LaurentPolynomial& operator-=(const LaurentPolynomial& other);
    LaurentPolynomial operator*(const LaurentPolynomial& other) const;
    LaurentPolynomial operator*(Complex scale) const;
    friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) {
        a += b;
        return a;
    }
    friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) {
        a -= b;
        return a;
    }

    void trim(double rel = -1.0); // default uses Tolerances::get().trim_rel

    // Ordinary polynomial coefficients of z^K * this, ascending in degree,
    // where K = -min_exponent() clears all negative powers (K >= 0; zero
    // polynomial gives an empty vector).
    std::vector<Complex> cleared_coefficients(int* shift = nullptr) const;

  private:
    std::map<int, Complex> c_;
};

namespace poly {

using Complex = std::complex<double>;

Complex eval(const std::vector<Complex>& coeffs, Complex z);
std::vector<Complex> derivative(const std::vector<Complex>& coeffs);

// Taylor coefficients of p around a up to (and including) order `order`,
// by repeated synthetic division.
std::vector<Complex> taylor_at(const std::vector<Complex>& coeffs, Complex a, int order);

// Deflate p by (z - a)^multiplicity, discarding remainders.
std::vector<Complex> deflate(const std::vector<Complex>& coeffs, Complex a, int multiplicity);

// Power-series quotient of num/den to the given order; den[0] must be nonzero.
std::vector<Complex> series_divide(const std::vector<Complex>& num,
                                   const std::vector<Complex>& den, int order);

// All roots of the polynomial via companion-matrix eigenvalues followed by a
// few Newton polishing steps. Leading/trailing zero coefficients handled.
std::vector<Complex> roots(const std::vector<Complex>& coeffs);

} // namespace poly

} // namespace ness
