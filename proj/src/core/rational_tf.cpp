#include "core/rational_tf.hpp"

#include <cmath>

#include "core/error.hpp"

namespace adrceq {

RationalTF::RationalTF(Polynomial num, Polynomial den, Domain domain)
    : num_(std::move(num)), den_(std::move(den)), domain_(std::move(domain)) {
    if (den_.is_zero()) raise(Errc::invalid_argument, "rational TF denominator is the zero polynomial");
    if (auto* c = std::get_if<Continuous>(&domain_)) {
        if (c->delay < 0.0) raise(Errc::invalid_argument, "transport delay must be >= 0");
    } else {
        if (std::get<Discrete>(domain_).Ts <= 0.0)
            raise(Errc::invalid_argument, "discrete sample time must be > 0");
    }
}

double RationalTF::delay() const {
    if (auto* c = std::get_if<Continuous>(&domain_)) return c->delay;
    return 0.0;
}

double RationalTF::sample_time() const {
    if (auto* d = std::get_if<Discrete>(&domain_)) return d->Ts;
    return 0.0;
}

std::complex<double> RationalTF::eval_at(double omega) const {
    if (is_continuous()) {
        const std::complex<double> s(0.0, omega);
        std::complex<double> v = num_.eval(s) / den_.eval(s);
        const double tau = delay();
        if (tau > 0.0) v *= std::exp(std::complex<double>(0.0, -omega * tau));
        return v;
    }
    const double Ts = sample_time();
    if (omega > M_PI / Ts * (1.0 + 1e-12))
        raise(Errc::nyquist_exceeded, "frequency above Nyquist limit pi/Ts");
    const std::complex<double> z = std::exp(std::complex<double>(0.0, omega * Ts));
    return num_.eval(z) / den_.eval(z);
}

bool same_domain(const RationalTF& g, const RationalTF& h) {
    if (g.is_continuous() != h.is_continuous()) return false;
    if (g.is_discrete()) return g.sample_time() == h.sample_time();
    return true;
}

static void require_same_domain(const RationalTF& g, const RationalTF& h) {
    if (!same_domain(g, h))
        raise(Errc::domain_mismatch, "transfer functions live in different domains");
}

RationalTF tf_series(const RationalTF& g, const RationalTF& h) {
    require_same_domain(g, h);
    Domain d = g.domain();
    if (g.is_continuous()) d = Continuous{g.delay() + h.delay()};
    return RationalTF(poly_mul(g.num(), h.num()), poly_mul(g.den(), h.den()), d);
}

RationalTF tf_inverse(const RationalTF& g) {
    if (g.num().is_zero()) raise(Errc::zero_numerator, "cannot invert a zero transfer function");
    if (g.delay() != 0.0) raise(Errc::has_delay, "cannot invert a TF with transport delay");
    return RationalTF(g.den(), g.num(), g.domain());
}

RationalTF tf_scale(const RationalTF& g, double k) {
    return RationalTF(poly_scale(g.num(), k), g.den(), g.domain());
}

FrequencyResponse freq_eval(const RationalTF& g, const std::vector<double>& omegas) {
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (!(omegas[i] > omegas[i - 1]))
            raise(Errc::invalid_argument, "frequency grid must be strictly increasing");
    FrequencyResponse out;
    out.omegas = omegas;
    out.values.reserve(omegas.size());
    for (double w : omegas) out.values.push_back(g.eval_at(w));
    return out;
}

DcGain dc_gain(const RationalTF& g) {
    // Continuous: limit at s=0; discrete: limit at z=1.
    double n, d, scale_n, scale_d;
    if (g.is_continuous()) {
        n = g.num()[0];
        d = g.den()[0];
        scale_n = g.num().max_abs_coeff();
        scale_d = g.den().max_abs_coeff();
    } else {
        n = g.num().eval(1.0);
        d = g.den().eval(1.0);
        scale_n = g.num().max_abs_coeff();
        scale_d = g.den().max_abs_coeff();
    }
    const double tol = 1e-12;
    const bool n_zero = std::abs(n) <= tol * std::max(scale_n, 1e-300);
    const bool d_zero = std::abs(d) <= tol * std::max(scale_d, 1e-300);
    if (n_zero && d_zero)
        raise(Errc::indeterminate, "numerator and denominator both vanish at the DC point");
    if (d_zero) return DcGain{0.0, true};
    return DcGain{n / d, false};
}

LoopTF LoopTF::rational(RationalTF tf) {
    LoopTF out;
    out.factored_ = false;
    out.rat_ = std::move(tf);
    return out;
}

LoopTF LoopTF::factored(RationalTF g, RationalTF h) {
    LoopTF out;
    out.factored_ = true;
    out.g_ = std::move(g);
    out.h_ = std::move(h);
    return out;
}

const RationalTF& LoopTF::as_rational() const {
    if (factored_)
        raise(Errc::has_delay, "feedback loop with transport delay has no rational form");
    return rat_;
}

std::complex<double> LoopTF::eval_at(double omega) const {
    if (!factored_) return rat_.eval_at(omega);
    const std::complex<double> gv = g_.eval_at(omega);
    const std::complex<double> hv = h_.eval_at(omega);
    return gv / (1.0 + gv * hv);
}

FrequencyResponse LoopTF::freq_eval(const std::vector<double>& omegas) const {
    FrequencyResponse out;
    out.omegas = omegas;
    out.values.reserve(omegas.size());
    for (double w : omegas) out.values.push_back(eval_at(w));
    return out;
}

LoopTF tf_feedback(const RationalTF& g, const RationalTF& h) {
    require_same_domain(g, h);
    if (h.is_continuous() && h.delay() != 0.0)
        raise(Errc::has_delay, "feedback-path delay is not supported");
    if (g.is_continuous() && g.delay() != 0.0) {
        // 1 + g*h == 0 cannot happen identically with a nonzero delay term.
        return LoopTF::factored(g, h);
    }
    const Polynomial num = poly_mul(g.num(), h.den());
    const Polynomial den =
        poly_add(poly_mul(g.den(), h.den()), poly_mul(g.num(), h.num()));
    if (den.is_zero()) raise(Errc::algebraic_loop, "1 + g*h is identically zero");
    return LoopTF::rational(RationalTF(num, den, g.domain()));
}

namespace {

// Deflation by a real root: returns quotient, assumes p(r) ~ 0.
Polynomial deflate(const Polynomial& p, double r) {
    const auto& c = p.coeffs();
    std::vector<double> q(c.size() - 1, 0.0);
    double carry = c.back();
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) {
        q[i] = carry;
        carry = c[i] + carry * r;
    }
    return Polynomial(std::move(q));
}

std::vector<double> real_roots(const Polynomial& p) {
    // Only needs to find candidates for *exact* common factors; a coarse
    // Newton-from-grid search over a log range is adequate here.
    std::vector<double> roots;
    Polynomial cur = p;
    while (cur.degree() >= 1) {
        double best = 0.0;
        double best_val = std::abs(cur.eval(0.0));
        for (int sign : {-1, 1}) {
            for (int e = -9; e <= 9; ++e) {
                double x0 = sign * std::pow(10.0, e);
                for (int it = 0; it < 60; ++it) {
                    const double f = cur.eval(x0);
                    const double h = std::max(1e-9, std::abs(x0) * 1e-9);
                    const double df = (cur.eval(x0 + h) - cur.eval(x0 - h)) / (2 * h);
                    if (df == 0.0) break;
                    const double x1 = x0 - f / df;
                    if (!std::isfinite(x1)) break;
                    if (std::abs(x1 - x0) <= 1e-14 * std::max(1.0, std::abs(x1))) {
                        x0 = x1;
                        break;
                    }
                    x0 = x1;
                }
                const double v = std::abs(cur.eval(x0));
                if (v < best_val) {
                    best_val = v;
                    best = x0;
                }
            }
        }
        const double scale = cur.max_abs_coeff() * std::max(1.0, std::pow(std::abs(best), cur.degree()));
        if (best_val > 1e-9 * scale) break;
        roots.push_back(best);
        cur = deflate(cur, best);
    }
    return roots;
}

} // namespace

RationalTF simplify(const RationalTF& g, double tol) {
    Polynomial num = g.num(), den = g.den();
    for (double r : real_roots(g.num())) {
        const double dv = den.eval(r);
        const double scale = den.max_abs_coeff() * std::max(1.0, std::pow(std::abs(r), den.degree()));
        if (std::abs(dv) <= tol * scale && den.degree() >= 1 && num.degree() >= 1) {
            num = deflate(num, r);
            den = deflate(den, r);
        }
    }
    return RationalTF(num, den, g.domain());
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        raise(Errc::invalid_argument, "log grid needs 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return out;
}

} // namespace adrceq
