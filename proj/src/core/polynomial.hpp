#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace adrceq {

/// Real-coefficient polynomial, coefficients in ascending degree:
/// coeffs[i] multiplies x^i. Trailing zeros are trimmed on construction;
/// the zero polynomial is represented as {0}.
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial one() { return Polynomial{1.0}; }
    static Polynomial zero() { return Polynomial{}; }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

    std::complex<double> eval(std::complex<double> x) const;
    double eval(double x) const;

    /// Largest |coefficient|; 0 for the zero polynomial.
    double max_abs_coeff() const;

private:
    void trim();
    std::vector<double> c_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Polynomial& a, double k);

/// (x - r) convenience factor.
Polynomial poly_linear_factor(double r);

bool poly_almost_equal(const Polynomial& a, const Polynomial& b, double rel_tol);

} // namespace adrceq
