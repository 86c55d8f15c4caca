#include <doctest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/rational_tf.hpp"

using namespace adrceq;

namespace {

RationalTF random_proper_tf(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    std::uniform_int_distribution<int> deg(1, 4);
    const int nd = deg(rng);
    std::uniform_int_distribution<int> ndeg(0, nd);
    std::vector<double> den(nd + 1), num(ndeg(rng) + 1);
    for (double& v : den) v = coeff(rng);
    for (double& v : num) v = coeff(rng);
    if (den.back() == 0.0) den.back() = 1.0;
    if (num.back() == 0.0) num.back() = 0.5;
    return RationalTF::continuous(Polynomial(num), Polynomial(den));
}

} // namespace

TEST_CASE("tf_series basics") {
    const RationalTF integ = RationalTF::continuous(Polynomial{1.0}, Polynomial{0.0, 1.0});
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0});
    const RationalTF prod = tf_series(integ, lag);
    CHECK(prod.num().coeffs() == std::vector<double>{1.0});
    CHECK(prod.den().coeffs() == std::vector<double>{0.0, 1.0, 1.0});

    const RationalTF same = tf_series(lag, RationalTF::constant(1.0));
    CHECK(same.num().coeffs() == lag.num().coeffs());
    CHECK(same.den().coeffs() == lag.den().coeffs());
}

TEST_CASE("tf_series adds delays and rejects mixed domains") {
    const RationalTF delayed = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0}, 0.2);
    const RationalTF more = tf_series(delayed, delayed);
    CHECK(more.delay() == doctest::Approx(0.4));
    const RationalTF disc = RationalTF::discrete(Polynomial{1.0}, Polynomial{1.0, 1.0}, 0.1);
    CHECK_THROWS_AS((void)tf_series(delayed, disc), Error);
}

TEST_CASE("tf_feedback textbook cases") {
    const RationalTF integ = RationalTF::continuous(Polynomial{1.0}, Polynomial{0.0, 1.0});
    const LoopTF cl = tf_feedback(integ, RationalTF::constant(1.0));
    CHECK_FALSE(cl.is_factored());
    CHECK(cl.as_rational().num().coeffs() == std::vector<double>{1.0});
    CHECK(cl.as_rational().den().coeffs() == std::vector<double>{1.0, 1.0});

    const LoopTF zero = tf_feedback(RationalTF::constant(0.0), integ);
    CHECK(zero.as_rational().num().is_zero());
}

TEST_CASE("tf_feedback algebraic loop detection") {
    // g = -1, h = 1: 1 + g*h == 0 identically
    CHECK_THROWS_AS((void)tf_feedback(RationalTF::constant(-1.0), RationalTF::constant(1.0)),
                    Error);
}

TEST_CASE("integral action forces zero DC disturbance gain") {
    const RationalTF gp2 = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 2.0, 1.0});
    // PID feedback (5s^2+30s+27)/(s(0.05s+1))
    const RationalTF cfb = RationalTF::continuous(
        Polynomial{27.0, 30.0, 5.0}, poly_mul(Polynomial{0.0, 1.0}, Polynomial{1.0, 0.05}));
    const LoopTF gyd = tf_feedback(gp2, cfb);
    const DcGain dc = dc_gain(gyd.as_rational());
    CHECK_FALSE(dc.infinite);
    CHECK(dc.value == doctest::Approx(0.0));
}

TEST_CASE("tf_inverse first-order and involution") {
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 0.5});
    const RationalTF inv = tf_inverse(lag);
    CHECK(inv.num().coeffs() == std::vector<double>{1.0, 0.5});
    CHECK(inv.den().coeffs() == std::vector<double>{1.0});
    const RationalTF back = tf_inverse(inv);
    CHECK(back.num().coeffs() == lag.num().coeffs());
    CHECK(back.den().coeffs() == lag.den().coeffs());
}

TEST_CASE("tf_inverse rejects zero numerator and delays") {
    CHECK_THROWS_AS((void)tf_inverse(RationalTF::constant(0.0)), Error);
    const RationalTF delayed = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0}, 0.2);
    CHECK_THROWS_AS((void)tf_inverse(delayed), Error);
}

TEST_CASE("freq_eval first-order corner and delay phase") {
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0});
    CHECK(std::abs(lag.eval_at(1.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    const RationalTF delayed = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0}, 0.2);
    CHECK(std::abs(delayed.eval_at(1.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    const RationalTF pure_delay = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0}, 0.2);
    CHECK(std::arg(pure_delay.eval_at(5.0)) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("discrete freq_eval enforces the Nyquist limit") {
    const RationalTF g = RationalTF::discrete(Polynomial{0.1}, Polynomial{-0.9, 1.0}, 0.1);
    CHECK_NOTHROW((void)g.eval_at(M_PI / 0.1 * 0.999));
    CHECK_THROWS_AS((void)g.eval_at(M_PI / 0.1 * 1.01), Error);
}

TEST_CASE("dc_gain integrator, unity, and indeterminate") {
    const RationalTF pi = RationalTF::continuous(Polynomial{2.5, 1.0}, Polynomial{0.0, 1.0});
    const DcGain inf = dc_gain(pi);
    CHECK(inf.infinite);

    const RationalTF unit = RationalTF::continuous(Polynomial{2.5, 0.7}, Polynomial{2.5, 1.0});
    CHECK(dc_gain(unit).value == doctest::Approx(1.0));

    const RationalTF ind = RationalTF::continuous(Polynomial{0.0, 1.0}, Polynomial{0.0, 1.0});
    CHECK_THROWS_AS((void)dc_gain(ind), Error);
}

TEST_CASE("series/feedback agree with direct complex arithmetic on random TFs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logw(-2.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const RationalTF g = random_proper_tf(rng);
        const RationalTF h = random_proper_tf(rng);
        const RationalTF prod = tf_series(g, h);
        for (int i = 0; i < 100; ++i) {
            const double w = std::pow(10.0, logw(rng));
            const std::complex<double> direct = g.eval_at(w) * h.eval_at(w);
            const std::complex<double> via = prod.eval_at(w);
            if (std::abs(direct) > 1e-12)
                CHECK(std::abs(via - direct) / std::abs(direct) < 1e-10);
        }
        const LoopTF cl = tf_feedback(g, h);
        for (int i = 0; i < 100; ++i) {
            const double w = std::pow(10.0, logw(rng));
            const std::complex<double> gv = g.eval_at(w), hv = h.eval_at(w);
            if (std::abs(1.0 + gv * hv) < 1e-8) continue;
            const std::complex<double> direct = gv / (1.0 + gv * hv);
            if (std::abs(direct) > 1e-12)
                CHECK(std::abs(cl.eval_at(w) - direct) / std::abs(direct) < 1e-10);
        }
    }
}

TEST_CASE("factored feedback evaluation with plant delay") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logw(-2.0, 2.0);
    const RationalTF g = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0}, 0.2);
    const RationalTF h = RationalTF::continuous(Polynomial{2.5, 1.0}, Polynomial{0.0, 1.0});
    const LoopTF cl = tf_feedback(g, h);
    CHECK(cl.is_factored());
    CHECK_THROWS_AS((void)cl.as_rational(), Error);
    for (int i = 0; i < 100; ++i) {
        const double w = std::pow(10.0, logw(rng));
        const std::complex<double> gv = g.eval_at(w), hv = h.eval_at(w);
        if (std::abs(1.0 + gv * hv) < 1e-8) continue;
        const std::complex<double> direct = gv / (1.0 + gv * hv);
        CHECK(std::abs(cl.eval_at(w) - direct) / std::abs(direct) < 1e-10);
    }
}

TEST_CASE("frequency grids must be strictly increasing") {
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0});
    CHECK_NOTHROW((void)freq_eval(lag, {0.1, 1.0, 10.0}));
    CHECK_THROWS_AS((void)freq_eval(lag, {1.0, 1.0}), Error);
    CHECK_THROWS_AS((void)freq_eval(lag, {2.0, 1.0}), Error);
}

TEST_CASE("simplify removes exact common factors only when asked") {
    // (s+2)(s+3) / (s+2)(s+5)
    const Polynomial num = poly_mul(Polynomial{2.0, 1.0}, Polynomial{3.0, 1.0});
    const Polynomial den = poly_mul(Polynomial{2.0, 1.0}, Polynomial{5.0, 1.0});
    const RationalTF g = RationalTF::continuous(num, den);
    CHECK(g.num().degree() == 2);
    const RationalTF s = simplify(g, 1e-9);
    CHECK(s.num().degree() == 1);
    CHECK(s.den().degree() == 1);
    CHECK(std::abs(s.eval_at(1.3) - g.eval_at(1.3)) < 1e-12);
}
