#include "core/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace adrceq {

void Polynomial::trim() {
    if (c_.empty()) {
        c_ = {0.0};
        return;
    }
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

std::complex<double> Polynomial::eval(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Polynomial::eval(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial::zero();
    std::vector<double> out(a.coeffs().size() + b.coeffs().size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i)
        for (std::size_t j = 0; j < b.coeffs().size(); ++j)
            out[i + j] += a.coeffs()[i] * b.coeffs()[j];
    return Polynomial(std::move(out));
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    std::vector<double> out(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Polynomial(std::move(out));
}

Polynomial poly_scale(const Polynomial& a, double k) {
    std::vector<double> out = a.coeffs();
    for (double& v : out) v *= k;
    return Polynomial(std::move(out));
}

Polynomial poly_linear_factor(double r) { return Polynomial{-r, 1.0}; }

bool poly_almost_equal(const Polynomial& a, const Polynomial& b, double rel_tol) {
    const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
    if (scale == 0.0) return true;
    const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(a[i] - b[i]) > rel_tol * scale) return false;
    return true;
}

} // namespace adrceq
