#include <doctest.h>

#include <cmath>
#include <random>

#include "core/polynomial.hpp"

using namespace adrceq;

TEST_CASE("poly_mul identity and binomial cases") {
    CHECK(poly_mul(Polynomial{1.0}, Polynomial{0.0, 1.0}).coeffs() ==
          std::vector<double>{0.0, 1.0});
    CHECK(poly_mul(Polynomial{1.0, 1.0}, Polynomial{1.0, 1.0}).coeffs() ==
          std::vector<double>{1.0, 2.0, 1.0});
}

TEST_CASE("poly_mul hand convolution") {
    // (x - 0.9)^2 = x^2 - 1.8x + 0.81, convolved by hand
    const Polynomial p = poly_mul(Polynomial{-0.9, 1.0}, Polynomial{-0.9, 1.0});
    REQUIRE(p.degree() == 2);
    CHECK(p[0] == doctest::Approx(0.81).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(-1.8).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero polynomial and trailing-zero trim") {
    CHECK(Polynomial{0.0, 0.0, 0.0}.is_zero());
    CHECK(Polynomial{0.0}.degree() == 0);
    CHECK(Polynomial{1.0, 2.0, 0.0, 0.0}.degree() == 1);
    CHECK(poly_mul(Polynomial::zero(), Polynomial{1.0, 2.0}).is_zero());
    // degree(a*b) == degree(a) + degree(b) for nonzero operands
    CHECK(poly_mul(Polynomial{1.0, 2.0, 3.0}, Polynomial{4.0, 5.0}).degree() == 3);
}

TEST_CASE("poly_mul commutative and associative on random coefficients") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coeff(-1e6, 1e6);
    std::uniform_int_distribution<int> deg(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        auto make = [&] {
            std::vector<double> c(deg(rng) + 1);
            for (double& v : c) v = coeff(rng);
            return Polynomial(c);
        };
        const Polynomial a = make(), b = make(), c = make();
        const Polynomial ab = poly_mul(a, b), ba = poly_mul(b, a);
        for (int i = 0; i <= ab.degree(); ++i)
            CHECK(std::abs(ab[i] - ba[i]) <= 1e-12 * 1e12); // coeffs bounded by 1e6 each
        const Polynomial l = poly_mul(poly_mul(a, b), c);
        const Polynomial r = poly_mul(a, poly_mul(b, c));
        REQUIRE(l.degree() == r.degree());
        const double scale = l.max_abs_coeff();
        for (int i = 0; i <= l.degree(); ++i)
            CHECK(std::abs(l[i] - r[i]) <= 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("evaluation matches Horner against direct powers") {
    const Polynomial p{2.0, -1.0, 0.5, 3.0};
    const double x = 1.7;
    const double direct = 2.0 - 1.0 * x + 0.5 * x * x + 3.0 * x * x * x;
    CHECK(p.eval(x) == doctest::Approx(direct).epsilon(1e-14));
    const std::complex<double> z(0.3, -1.2);
    const std::complex<double> dz = 2.0 - z + 0.5 * z * z + 3.0 * z * z * z;
    CHECK(std::abs(p.eval(z) - dz) < 1e-13);
}
