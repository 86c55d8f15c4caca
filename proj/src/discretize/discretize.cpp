#include "discretize/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace adrceq {

RationalTF euler_discretize(const RationalTF& g, double Ts) {
    if (!g.is_continuous()) raise(Errc::invalid_argument, "euler_discretize expects a continuous TF");
    if (g.delay() != 0.0) raise(Errc::has_delay, "cannot Euler-discretize a TF with transport delay");
    if (!(Ts > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");

    const int order = std::max(g.num().degree(), g.den().degree());
    auto substitute = [&](const Polynomial& p) {
        Polynomial acc = Polynomial::zero();
        Polynomial zm1_pow = Polynomial::one();
        for (int i = 0; i <= p.degree(); ++i) {
            acc = poly_add(acc, poly_scale(zm1_pow, p[static_cast<std::size_t>(i)] *
                                                        std::pow(Ts, order - i)));
            zm1_pow = poly_mul(zm1_pow, Polynomial{-1.0, 1.0});
        }
        return acc;
    };
    return RationalTF::discrete(substitute(g.num()), substitute(g.den()), Ts);
}

void QFormat::validate() const {
    if (frac_bits < 8 || frac_bits > 56)
        raise(Errc::invalid_argument, "frac_bits must lie in [8, 56]");
}

bool QFormat::saturates(double x) const {
    const double scaled = x * std::ldexp(1.0, frac_bits);
    return !(scaled > static_cast<double>(std::numeric_limits<std::int64_t>::min()) &&
             scaled < static_cast<double>(std::numeric_limits<std::int64_t>::max()));
}

std::int64_t QFormat::quantize_raw(double x) const {
    const double scaled = x * std::ldexp(1.0, frac_bits);
    if (scaled >= static_cast<double>(std::numeric_limits<std::int64_t>::max()))
        return std::numeric_limits<std::int64_t>::max();
    if (scaled <= static_cast<double>(std::numeric_limits<std::int64_t>::min()))
        return std::numeric_limits<std::int64_t>::min();
    // round half to even
    const double r = std::nearbyint(scaled);
    if (std::abs(scaled - std::trunc(scaled)) == 0.5) {
        const double lo = std::floor(scaled);
        return static_cast<std::int64_t>(std::fmod(lo, 2.0) == 0.0 ? lo : lo + 1.0);
    }
    return static_cast<std::int64_t>(r);
}

double QFormat::quantize(double x) const { return to_double(quantize_raw(x)); }

std::int64_t QFormat::mul(std::int64_t a, std::int64_t b) const {
    __int128 p = static_cast<__int128>(a) * static_cast<__int128>(b);
    const __int128 one = static_cast<__int128>(1) << frac_bits;
    const __int128 half = one >> 1;
    __int128 q = p >> frac_bits; // floor
    const __int128 rem = p - (q << frac_bits);
    if (rem > half || (rem == half && (q & 1))) q += 1;
    if (q > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
    if (q < std::numeric_limits<std::int64_t>::min()) return std::numeric_limits<std::int64_t>::min();
    return static_cast<std::int64_t>(q);
}

std::int64_t QFormat::add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        return a > 0 ? std::numeric_limits<std::int64_t>::max()
                     : std::numeric_limits<std::int64_t>::min();
    return out;
}

double QFormat::to_double(std::int64_t raw) const {
    return static_cast<double>(raw) * std::ldexp(1.0, -frac_bits);
}

namespace {

DiscreteController::Section make_section(const Polynomial& num, const Polynomial& den) {
    if (num.degree() > den.degree())
        raise(Errc::improper_result, "discrete section must be proper");
    const double lead = den.coeffs().back();
    if (lead == 0.0) raise(Errc::invalid_argument, "zero leading denominator coefficient");
    DiscreteController::Section s;
    s.den.resize(den.coeffs().size());
    for (std::size_t i = 0; i < s.den.size(); ++i) s.den[i] = den[i] / lead;
    s.num.assign(s.den.size(), 0.0);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(num.degree()); ++i)
        s.num[i] = num[i] / lead;
    return s;
}

} // namespace

DiscreteController::DiscreteController(std::vector<RawSection> sections, double Ts,
                                       std::string label)
    : Ts_(Ts), label_(std::move(label)) {
    if (!(Ts_ > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");
    Polynomial num = Polynomial::one(), den = Polynomial::one();
    for (const auto& raw : sections) {
        sections_.push_back(make_section(raw.num, raw.den));
        state_.emplace_back(sections_.back().den.size() - 1, 0.0);
        num = poly_mul(num, raw.num);
        den = poly_mul(den, raw.den);
    }
    tf_ = RationalTF::discrete(num, den, Ts_);
}

DiscreteController DiscreteController::from_tf(const RationalTF& tf, std::string label) {
    if (!tf.is_discrete()) raise(Errc::invalid_argument, "from_tf expects a discrete TF");
    std::vector<RawSection> secs{{tf.num(), tf.den()}};
    return DiscreteController(std::move(secs), tf.sample_time(), std::move(label));
}

double DiscreteController::step(double input) {
    if (!quant_) {
        double x = input;
        for (std::size_t si = 0; si < sections_.size(); ++si) {
            const auto& sec = sections_[si];
            auto& st = state_[si];
            const std::size_t order = st.size();
            // Coefficients are ascending in z; direct form II transposed uses
            // b_i = num[order-i], a_i = den[order-i].
            const double y = sec.num[order] * x + (order ? st[0] : 0.0);
            for (std::size_t i = 0; i + 1 < order; ++i)
                st[i] = sec.num[order - 1 - i] * x - sec.den[order - 1 - i] * y + st[i + 1];
            if (order) st[order - 1] = sec.num[0] * x - sec.den[0] * y;
            x = y;
        }
        return x;
    }
    const QFormat& q = *quant_;
    std::int64_t x = q.quantize_raw(input);
    for (std::size_t si = 0; si < sections_.size(); ++si) {
        auto& st = qstate_[si];
        const auto& bn = qnum_[si];
        const auto& ad = qden_[si];
        const std::size_t order = st.size();
        const std::int64_t y = QFormat::add(q.mul(bn[order], x), order ? st[0] : 0);
        for (std::size_t i = 0; i + 1 < order; ++i)
            st[i] = QFormat::add(QFormat::add(q.mul(bn[order - 1 - i], x),
                                              -q.mul(ad[order - 1 - i], y)),
                                 st[i + 1]);
        if (order) st[order - 1] = QFormat::add(q.mul(bn[0], x), -q.mul(ad[0], y));
        x = y;
    }
    return q.to_double(x);
}

void DiscreteController::reset() {
    for (auto& st : state_) std::fill(st.begin(), st.end(), 0.0);
    for (auto& st : qstate_) std::fill(st.begin(), st.end(), 0);
}

DiscreteController quantize_controller(const DiscreteController& c, const QFormat& q) {
    q.validate();
    DiscreteController out = c;
    out.reset();
    out.quant_ = q;
    out.qnum_.clear();
    out.qden_.clear();
    out.qstate_.clear();
    for (const auto& sec : out.sections_) {
        std::vector<std::int64_t> nq, dq;
        for (double v : sec.num) {
            if (q.saturates(v)) raise(Errc::overflow, "coefficient saturates the Q format");
            nq.push_back(q.quantize_raw(v));
        }
        for (double v : sec.den) {
            if (q.saturates(v)) raise(Errc::overflow, "coefficient saturates the Q format");
            dq.push_back(q.quantize_raw(v));
        }
        out.qnum_.push_back(std::move(nq));
        out.qden_.push_back(std::move(dq));
        out.qstate_.emplace_back(sec.den.size() - 1, 0);
    }
    // Quantized coefficients become the controller's coefficients so a second
    // quantization is a no-op.
    Polynomial num = Polynomial::one(), den = Polynomial::one();
    for (std::size_t si = 0; si < out.sections_.size(); ++si) {
        for (std::size_t i = 0; i < out.sections_[si].num.size(); ++i)
            out.sections_[si].num[i] = q.to_double(out.qnum_[si][i]);
        for (std::size_t i = 0; i < out.sections_[si].den.size(); ++i)
            out.sections_[si].den[i] = q.to_double(out.qden_[si][i]);
        num = poly_mul(num, Polynomial(out.sections_[si].num));
        den = poly_mul(den, Polynomial(out.sections_[si].den));
    }
    out.tf_ = RationalTF::discrete(num, den, c.Ts_);
    return out;
}

double max_freq_rel_dev(const RationalTF& a, const RationalTF& b, double lo, double hi,
                        int n_points) {
    const std::vector<double> grid = log_grid(lo, hi, n_points);
    double worst = 0.0;
    for (double w : grid) {
        const std::complex<double> va = a.eval_at(w);
        const std::complex<double> vb = b.eval_at(w);
        const double scale = std::max(std::abs(vb), 1e-300);
        worst = std::max(worst, std::abs(va - vb) / scale);
    }
    return worst;
}

namespace {

double coeff_rel_dev(const std::vector<double>& a_num, const std::vector<double>& a_den,
                     const std::vector<double>& b_num, const std::vector<double>& b_den) {
    // Normalize both to a unit leading denominator coefficient, then compare.
    auto normalize = [](std::vector<double> v, double lead) {
        for (double& x : v) x /= lead;
        return v;
    };
    const double la = a_den.back(), lb = b_den.back();
    const auto an = normalize(a_num, la), ad = normalize(a_den, la);
    const auto bn = normalize(b_num, lb), bd = normalize(b_den, lb);
    double scale = 0.0;
    for (double v : bn) scale = std::max(scale, std::abs(v));
    for (double v : bd) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    const std::size_t n = std::max(an.size(), bn.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < an.size() ? an[i] : 0.0;
        const double y = i < bn.size() ? bn[i] : 0.0;
        worst = std::max(worst, std::abs(x - y) / scale);
    }
    const std::size_t m = std::max(ad.size(), bd.size());
    for (std::size_t i = 0; i < m; ++i) {
        const double x = i < ad.size() ? ad[i] : 0.0;
        const double y = i < bd.size() ? bd[i] : 0.0;
        worst = std::max(worst, std::abs(x - y) / scale);
    }
    return worst;
}

AuditRecord make_audit(const std::string& builder, double Ts, const Polynomial& verb_num,
                       const Polynomial& verb_den, const RationalTF& oracle) {
    AuditRecord rec;
    rec.builder = builder;
    rec.Ts = Ts;
    rec.verbatim_num = verb_num.coeffs();
    rec.verbatim_den = verb_den.coeffs();
    rec.oracle_num = oracle.num().coeffs();
    rec.oracle_den = oracle.den().coeffs();
    rec.max_rel_coeff_dev =
        coeff_rel_dev(rec.verbatim_num, rec.verbatim_den, rec.oracle_num, rec.oracle_den);
    return rec;
}

} // namespace

DiscreteController pid_z(const PidParams& p, double Ts, AuditLog* audit) {
    if (p.Fy.kind != FilterSpec::Kind::first_order)
        raise(Errc::wrong_filter_kind, "pid_z requires a first-order output filter");
    if (!(Ts > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");
    const double Tf = p.Fy.T;

    const RationalTF oracle = euler_discretize(build_pid_fb(p), Ts);

    // Printed closed form, constant numerator term taken verbatim.
    const Polynomial verb_num{p.Kd - p.Kp * Ts + p.Kp * Ts * Ts, p.Kp * Ts - 2.0 * p.Kd, p.Kd};
    const Polynomial verb_den{Tf - Ts, Ts - 2.0 * Tf, Tf};

    AuditRecord rec = make_audit("pid_z", Ts, verb_num, verb_den, oracle);

    DiscreteController out = DiscreteController::from_tf(oracle, "PID(z)");
    out.set_audit(rec);
    if (audit) audit->append(std::move(rec));
    return out;
}

DiscreteController eadrc_fb_z(const AdrcGains& g, double Ts, AuditLog* audit) {
    g.validate();
    if (g.n != 2) raise(Errc::unsupported_order, "eadrc_fb_z is defined for n=2");
    if (!(Ts > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");
    const double k1 = g.k[0], k2 = g.k[1];
    const double l1 = g.l[0], l2 = g.l[1], l3 = g.l[2];

    const double M2 = k1 * l1 + k2 * l2 + l3;
    const double M1 = -2.0 * M2 + Ts * (k1 * l2 + k2 * l3);
    const double M0 = M2 - Ts * (k1 * l2 + k2 * l3) + Ts * Ts * k1 * l3;
    const double N1 = Ts * (k2 + l1) - 2.0;
    const double N0 = -N1 + Ts * Ts * (l2 + k1 + l1 * k2) - 1.0;

    const Polynomial quad_num{Ts / g.b0 * M0, Ts / g.b0 * M1, Ts / g.b0 * M2};
    const Polynomial quad_den{N0, N1, 1.0};

    const RationalTF oracle = euler_discretize(build_eadrc_fb(g), Ts);
    const Polynomial verb_num = quad_num;
    const Polynomial verb_den = poly_mul(quad_den, Polynomial{-1.0, 1.0});
    AuditRecord rec = make_audit("eadrc_fb_z", Ts, verb_num, verb_den, oracle);

    // Realized as quadratic section x exact integrator so the z=1 pole is kept
    // exact under quantization.
    std::vector<DiscreteController::RawSection> secs;
    secs.push_back({quad_num, quad_den});
    secs.push_back({Polynomial::one(), Polynomial{-1.0, 1.0}});
    DiscreteController out(std::move(secs), Ts, "eADRC_FB(z)");
    out.set_audit(rec);
    if (audit) audit->append(std::move(rec));
    return out;
}

DiscreteController ceq2_z(const AdrcGains& g, double Tf, double Ts, AuditLog* audit) {
    g.validate();
    if (g.n != 2) raise(Errc::unsupported_order, "ceq2_z is defined for n=2");
    if (!(Ts > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");
    if (!(Tf > 0.0)) raise(Errc::invalid_argument, "filter time constant must be > 0");
    const double k1 = g.k[0], k2 = g.k[1], l1 = g.l[0], l2 = g.l[1];
    const double P2 = 1.0 / (k2 * l1 + l2 + k1);

    // Printed coefficient list taken verbatim (including the Ts*k2*l1 terms).
    const double L1 = Ts * Tf;
    const double L0 = -L1 + Ts * Ts;
    const double P1 = P2 * (Ts * k2 * l1 - 2.0);
    const double P0 = P2 * (Ts * k2 * l1 + 1.0) + Ts * Ts;
    const Polynomial verb_num{L0, L1};
    const Polynomial verb_den{P0, P1, P2};

    const RationalTF oracle = euler_discretize(build_ceq(g, FilterSpec::first_order(Tf)), Ts);
    AuditRecord rec = make_audit("ceq2_z", Ts, verb_num, verb_den, oracle);

    DiscreteController out = DiscreteController::from_tf(oracle, "CEQ2(z)");
    out.set_audit(rec);
    if (audit) audit->append(std::move(rec));
    return out;
}

DiscreteController eadrc_pf_z(const AdrcGains& g, const PidParams& pid, double beta, double Tr,
                              double Ts, AuditLog* audit) {
    g.validate();
    if (g.n != 2) raise(Errc::unsupported_order, "eadrc_pf_z is defined for n=2");
    if (!(Tr > 0.0)) raise(Errc::invalid_argument, "reference filter time constant must be > 0");
    if (!(Ts > 0.0)) raise(Errc::invalid_argument, "sample time must be > 0");
    const double k1 = g.k[0], k2 = g.k[1], l1 = g.l[0], l2 = g.l[1];
    const double D = k2 * l1 + l2 + k1;
    const double Kp = pid.Kp, Ki = pid.Ki, Kd = pid.Kd;

    // Continuous prefilter with the F_Y pair cancelled:
    // (Kp*beta*s + Ki)(s^2 + (k2+l1)s + D) / ((Kd s^2 + Kp s + Ki)(Tr s + 1) D)
    const Polynomial cont_num =
        poly_mul(Polynomial{Ki, Kp * beta}, Polynomial{1.0, (k2 + l1) / D, 1.0 / D});
    const Polynomial cont_den = poly_mul(Polynomial{Ki, Kp, Kd}, Polynomial{1.0, Tr});
    const RationalTF oracle = euler_discretize(RationalTF::continuous(cont_num, cont_den), Ts);

    // Printed coefficient list, transcribed literally; the garbled "(k2+l+1)"
    // subterm is read as (k2+l1).
    const double H3 = Kp * beta / D;
    const double t1 = Ts * (Kp * beta + Ki * (k2 + l1)) / D;
    const double t2 = Ts * Ts * (Kp * beta + Ki * (k2 + l1) / D);
    const double H2 = -3.0 * H3 + t1;
    const double H1 = 3.0 * H3 - 2.0 * t1 + t2;
    const double H0 = -H3 + t1 - t2 - Ts * Ts * Ts * Ki;
    const double Q3 = Kd * Tr;
    const double Q2 = -3.0 * Q3 + Ts * (Kd + Kp * Tr);
    const double Q1 = 3.0 * Q3 - 2.0 * Ts * (Kd + Kp * Tr) + Ts * Ts * (Kp + Ki * Tr);
    const double Q0 = -Q3 + Ts * (Kd + Kp * Tr) - Ts * Ts * (Kp + Ki * Tr) + Ts * Ts * Ts * Ki;
    const Polynomial verb_num{H0, H1, H2, H3};
    const Polynomial verb_den{Q0, Q1, Q2, Q3};

    AuditRecord rec = make_audit("eadrc_pf_z", Ts, verb_num, verb_den, oracle);

    DiscreteController out = DiscreteController::from_tf(oracle, "eADRC_PF(z)");
    out.set_audit(rec);
    if (audit) audit->append(std::move(rec));
    return out;
}

std::string AuditLog::to_text() const {
    std::ostringstream os;
    char buf[48];
    auto emit = [&](const char* key, const std::vector<double>& v) {
        os << key << "=[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            os << (i ? "," : "") << buf;
        }
        os << "]\n";
    };
    for (const auto& r : records_) {
        os << "record builder=" << r.builder << " ts_s=";
        std::snprintf(buf, sizeof buf, "%.17g", r.Ts);
        os << buf << "\n";
        emit("  verbatim_num", r.verbatim_num);
        emit("  verbatim_den", r.verbatim_den);
        emit("  oracle_num", r.oracle_num);
        emit("  oracle_den", r.oracle_den);
        std::snprintf(buf, sizeof buf, "%.6g", r.max_rel_coeff_dev);
        os << "  max_rel_coeff_dev=" << buf << "\n";
    }
    return os.str();
}

void AuditLog::write_file(const std::string& path) const {
    std::ofstream f(path);
    if (!f) raise(Errc::invalid_argument, "cannot open audit file " + path);
    f << to_text();
}

} // namespace adrceq
