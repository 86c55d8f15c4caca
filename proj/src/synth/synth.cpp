#include "synth/synth.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace adrceq {

FilterSpec FilterSpec::first_order(double T) {
    if (!(T > 0.0)) raise(Errc::invalid_argument, "first-order filter needs T > 0");
    FilterSpec f;
    f.kind = Kind::first_order;
    f.T = T;
    return f;
}

FilterSpec FilterSpec::second_order(double a2, double a1) {
    if (!(a2 > 0.0) || !(a1 > 0.0))
        raise(Errc::invalid_argument, "second-order filter needs a2 > 0 and a1 > 0");
    FilterSpec f;
    f.kind = Kind::second_order;
    f.a2 = a2;
    f.a1 = a1;
    return f;
}

Polynomial FilterSpec::den_poly() const {
    switch (kind) {
        case Kind::unity: return Polynomial::one();
        case Kind::first_order: return Polynomial{1.0, T};
        case Kind::second_order: return Polynomial{1.0, a1, a2};
    }
    return Polynomial::one();
}

void AdrcGains::validate() const {
    if (n != 1 && n != 2)
        raise(Errc::unsupported_order, "plant order must be 1 or 2, got " + std::to_string(n));
    if (b0 == 0.0 || !std::isfinite(b0)) raise(Errc::invalid_argument, "b0 must be finite and nonzero");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(k[i])) raise(Errc::invalid_argument, "controller gains must be finite");
    for (int i = 0; i < n + 1; ++i)
        if (!std::isfinite(l[i])) raise(Errc::invalid_argument, "observer gains must be finite");
}

AdrcGains bandwidth_tune(int n, double omega_cl, double k_eso, double b0) {
    if (n != 1 && n != 2)
        raise(Errc::unsupported_order, "plant order must be 1 or 2, got " + std::to_string(n));
    if (!(omega_cl > 0.0)) raise(Errc::invalid_argument, "omega_cl must be > 0");
    if (!(k_eso > 0.0)) raise(Errc::invalid_argument, "k_eso must be > 0");

    auto expand = [](double root, int power) {
        Polynomial p = Polynomial::one();
        for (int i = 0; i < power; ++i) p = poly_mul(p, Polynomial{root, 1.0});
        return p; // ascending in the placement variable
    };

    AdrcGains g;
    g.n = n;
    g.b0 = b0;
    const Polynomial pc = expand(omega_cl, n);
    // k_i is the coefficient of x^(i-1): k_1 is the constant term.
    for (int i = 0; i < n; ++i) g.k[i] = pc[i];
    const Polynomial po = expand(k_eso * omega_cl, n + 1);
    // l_j is the coefficient of x^(n+1-j): l_1 multiplies x^n.
    for (int j = 0; j < n + 1; ++j) g.l[j] = po[n - j];
    g.validate();
    return g;
}

RationalTF build_pid_fb(const PidParams& p) {
    const Polynomial core{p.Ki, p.Kp, p.Kd};
    const Polynomial integrator{0.0, 1.0};
    return RationalTF::continuous(core, poly_mul(integrator, p.Fy.den_poly()));
}

RationalTF build_pid_pf(const PidParams& p) {
    // (Kp*beta*s + Ki) * F_R.num * F_Y.den over (Kd s^2 + Kp s + Ki) * F_R.den.
    const Polynomial num = poly_mul(Polynomial{p.Ki, p.Kp * p.beta}, p.Fy.den_poly());
    const Polynomial den = poly_mul(Polynomial{p.Ki, p.Kp, p.Kd}, p.Fr.den_poly());
    if (num.degree() > den.degree())
        raise(Errc::improper_result, "prefilter composition is improper");
    return RationalTF::continuous(num, den);
}

RationalTF build_eadrc_fb(const AdrcGains& g) {
    g.validate();
    const double b0 = g.b0;
    if (g.n == 1) {
        const double k1 = g.k[0], l1 = g.l[0], l2 = g.l[1];
        return RationalTF::continuous(
            Polynomial{k1 * l2 / b0, (k1 * l1 + l2) / b0},
            Polynomial{0.0, k1 + l2, 1.0});
    }
    const double k1 = g.k[0], k2 = g.k[1];
    const double l1 = g.l[0], l2 = g.l[1], l3 = g.l[2];
    return RationalTF::continuous(
        Polynomial{k1 * l3 / b0, (k1 * l2 + k2 * l3) / b0, (k1 * l1 + k2 * l2 + l3) / b0},
        Polynomial{0.0, l2 + k1 + l1 * k2, k2 + l1, 1.0});
}

namespace {

class DenseMatrix {
public:
    explicit DenseMatrix(int m) : m_(m), a_(static_cast<std::size_t>(m) * m, 0.0) {}
    double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * m_ + c]; }
    double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * m_ + c]; }
    int size() const { return m_; }

    static DenseMatrix identity(int m) {
        DenseMatrix out(m);
        for (int i = 0; i < m; ++i) out.at(i, i) = 1.0;
        return out;
    }

    DenseMatrix mul(const DenseMatrix& rhs) const {
        DenseMatrix out(m_);
        for (int i = 0; i < m_; ++i)
            for (int kk = 0; kk < m_; ++kk) {
                const double v = at(i, kk);
                if (v == 0.0) continue;
                for (int j = 0; j < m_; ++j) out.at(i, j) += v * rhs.at(kk, j);
            }
        return out;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < m_; ++i) t += at(i, i);
        return t;
    }

    double max_abs() const {
        double t = 0.0;
        for (double v : a_) t = std::max(t, std::abs(v));
        return t;
    }

private:
    int m_;
    std::vector<double> a_;
};

} // namespace

RationalTF eadrc_fb_resolvent(const std::vector<double>& k, const std::vector<double>& l,
                              double b0) {
    const int n = static_cast<int>(k.size());
    if (n < 1 || l.size() != k.size() + 1)
        raise(Errc::invalid_argument, "need n >= 1 controller gains and n+1 observer gains");
    if (b0 == 0.0) raise(Errc::invalid_argument, "b0 must be nonzero");
    const int m = n + 1;

    // Closed loop of the observer driven by the tracking error with the state
    // feedback law substituted: A_cl = A - l c^T - (1/b0) b (k^T 1).
    DenseMatrix A(m);
    for (int i = 0; i + 1 < m; ++i) A.at(i, i + 1) = 1.0;
    for (int i = 0; i < m; ++i) A.at(i, 0) -= l[i];
    for (int j = 0; j < n; ++j) A.at(n - 1, j) -= k[j];
    A.at(n - 1, m - 1) -= 1.0;

    // Leverrier-Faddeev: B_0 = I, N_j = A*B_{j-1}, c_j = tr(N_j)/j,
    // B_j = N_j - c_j I. det(sI - A) = s^m - c_1 s^(m-1) - ... - c_m and
    // adj(sI - A) = sum_j B_j s^(m-1-j).
    std::vector<DenseMatrix> B;
    B.push_back(DenseMatrix::identity(m));
    std::vector<double> c(m + 1, 0.0);
    for (int j = 1; j <= m; ++j) {
        DenseMatrix N = A.mul(B.back());
        c[j] = N.trace() / j;
        DenseMatrix Bj = N;
        for (int i = 0; i < m; ++i) Bj.at(i, i) -= c[j];
        if (j < m) {
            B.push_back(Bj);
        } else {
            const double residual = Bj.max_abs();
            const double scale = std::max(N.max_abs(), A.max_abs());
            if (residual > 1e-8 * std::max(scale, 1e-300))
                raise(Errc::unstable_evaluation, "characteristic-polynomial recursion residual too large");
        }
    }

    std::vector<double> den(m + 1, 0.0);
    den[m] = 1.0;
    for (int j = 1; j <= m; ++j) den[m - j] = -c[j];

    // Numerator coefficients: (k^T 1) B_j l is the coefficient of s^(m-1-j).
    std::vector<double> row(m);
    for (int j = 0; j < n; ++j) row[j] = k[j];
    row[m - 1] = 1.0;
    std::vector<double> num(m, 0.0);
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int r = 0; r < m; ++r) {
            double br = 0.0;
            for (int cix = 0; cix < m; ++cix) br += B[j].at(r, cix) * l[cix];
            acc += row[r] * br;
        }
        num[m - 1 - j] = acc / b0;
    }
    return RationalTF::continuous(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

RationalTF build_eadrc_fb_general(const AdrcGains& g) {
    g.validate();
    std::vector<double> k(g.k.begin(), g.k.begin() + g.n);
    std::vector<double> l(g.l.begin(), g.l.begin() + g.n + 1);
    return eadrc_fb_resolvent(k, l, g.b0);
}

RationalTF build_ceq(const AdrcGains& g, const FilterSpec& Fy) {
    g.validate();
    if (g.n == 1) {
        const double k1 = g.k[0], l2 = g.l[1];
        return RationalTF::continuous(Polynomial::one(), Polynomial{1.0, 1.0 / (l2 + k1)});
    }
    const double k1 = g.k[0], k2 = g.k[1], l1 = g.l[0], l2 = g.l[1];
    const double d = k2 * l1 + l2 + k1;
    return RationalTF::continuous(Fy.den_poly(), Polynomial{1.0, (k2 + l1) / d, 1.0 / d});
}

PidParams pid_from_adrc(const AdrcGains& g) {
    g.validate();
    PidParams p;
    if (g.n == 1) {
        const double k1 = g.k[0], l1 = g.l[0], l2 = g.l[1];
        const double d = g.b0 * (l2 + k1);
        p.Kp = (k1 * l1 + l2) / d;
        p.Ki = k1 * l2 / d;
        p.Kd = 0.0;
        return p;
    }
    const double k1 = g.k[0], k2 = g.k[1];
    const double l1 = g.l[0], l2 = g.l[1], l3 = g.l[2];
    const double d = g.b0 * (k2 * l1 + l2 + k1);
    // The proportional gain pairs k1 with l2: this is the form under which
    // PID * C_EQ2 reproduces the tabulated feedback TF identically.
    p.Kp = (k1 * l2 + k2 * l3) / d;
    p.Ki = k1 * l3 / d;
    p.Kd = (k1 * l1 + k2 * l2 + l3) / d;
    return p;
}

static RationalTF unity_tf() { return RationalTF::constant(1.0); }

TwoDofController make_pi_controller(const PidParams& p, int dof) {
    if (dof != 1 && dof != 2) raise(Errc::invalid_argument, "dof must be 1 or 2");
    if (p.Kd != 0.0 || !p.Fy.is_unity())
        raise(Errc::invalid_argument, "PI structure requires Kd == 0 and unity output filter");
    TwoDofController c;
    c.feedback = build_pid_fb(p);
    c.prefilter = dof == 1 ? unity_tf() : build_pid_pf(p);
    c.label = dof == 1 ? "1DOF PI" : "2DOF PI";
    return c;
}

TwoDofController make_pid_controller(const PidParams& p, int dof) {
    if (dof != 1 && dof != 2) raise(Errc::invalid_argument, "dof must be 1 or 2");
    TwoDofController c;
    c.feedback = build_pid_fb(p);
    c.prefilter = dof == 1 ? unity_tf() : build_pid_pf(p);
    c.label = dof == 1 ? "1DOF PID" : "2DOF PID";
    return c;
}

TwoDofController make_eadrc_controller(const AdrcGains& g, int dof, double beta,
                                       const FilterSpec& Fr, const FilterSpec& Fy,
                                       bool simplified) {
    if (dof != 1 && dof != 2) raise(Errc::invalid_argument, "dof must be 1 or 2");
    g.validate();
    TwoDofController c;
    c.feedback = build_eadrc_fb(g);
    c.label = (dof == 1 ? "1DOF eADRC n=" : "2DOF eADRC n=") + std::to_string(g.n);
    if (dof == 1) {
        c.prefilter = unity_tf();
        return c;
    }
    PidParams p = pid_from_adrc(g);
    p.beta = beta;
    p.Fr = Fr;
    p.Fy = Fy;
    if (simplified) {
        // F_Y cancels between the PI/PID prefilter and the inverse equivalence
        // factor; build the reduced form directly.
        PidParams q = p;
        q.Fy = FilterSpec::unity();
        const RationalTF base = build_pid_pf(q);
        RationalTF ceq_core = build_ceq(g, FilterSpec::unity());
        c.prefilter = tf_series(base, tf_inverse(ceq_core));
        return c;
    }
    c.prefilter = tf_series(build_pid_pf(p), tf_inverse(build_ceq(g, Fy)));
    return c;
}

TwoDofController make_controller(ControllerKind kind, int dof, const AdrcGains* gains,
                                 const PidParams* pid) {
    switch (kind) {
        case ControllerKind::pi:
            if (!pid) raise(Errc::invalid_argument, "PI controller needs PID parameters");
            return make_pi_controller(*pid, dof);
        case ControllerKind::pid:
            if (!pid) raise(Errc::invalid_argument, "PID controller needs PID parameters");
            return make_pid_controller(*pid, dof);
        case ControllerKind::eadrc: {
            if (!gains) raise(Errc::invalid_argument, "eADRC controller needs gain set");
            const double beta = pid ? pid->beta : 1.0;
            const FilterSpec fr = pid ? pid->Fr : FilterSpec::unity();
            const FilterSpec fy = pid ? pid->Fy : FilterSpec::unity();
            return make_eadrc_controller(*gains, dof, beta, fr, fy);
        }
    }
    raise(Errc::invalid_argument, "unknown controller kind");
}

CribSheet crib_sheet(const AdrcGains& gains, const PidParams& pid) {
    gains.validate();
    if (gains.n == 1 && (pid.Kd != 0.0 || !pid.Fy.is_unity()))
        raise(Errc::invalid_argument, "first-order crib sheet expects a PI parameter set");
    CribSheet sheet;
    sheet.n = gains.n;
    const std::string std_name = gains.n == 1 ? "PI" : "PID";
    auto std1 = gains.n == 1 ? make_pi_controller(pid, 1) : make_pid_controller(pid, 1);
    auto std2 = gains.n == 1 ? make_pi_controller(pid, 2) : make_pid_controller(pid, 2);
    auto ea1 = make_eadrc_controller(gains, 1);
    auto ea2 = make_eadrc_controller(gains, 2, pid.beta, pid.Fr, pid.Fy);
    sheet.rows.push_back({"1DOF " + std_name, std1.prefilter, std1.feedback});
    sheet.rows.push_back({"1DOF eADRC", ea1.prefilter, ea1.feedback});
    sheet.rows.push_back({"2DOF " + std_name, std2.prefilter, std2.feedback});
    sheet.rows.push_back({"2DOF eADRC", ea2.prefilter, ea2.feedback});
    return sheet;
}

static std::string poly_to_string(const Polynomial& p, const char* var) {
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        const double c = p[static_cast<std::size_t>(i)];
        if (c == 0.0 && !(first && i == 0)) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", c);
        if (!first) os << (c < 0 ? " - " : " + ");
        const std::string mag = (!first && c < 0) ? std::string(buf).substr(1) : buf;
        if (i == 0) {
            os << mag;
        } else {
            if (mag != "1") os << mag << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::string tf_to_string(const RationalTF& tf, const char* var) {
    const char* v = var ? var : (tf.is_discrete() ? "z" : "s");
    std::string num = poly_to_string(tf.num(), v);
    std::string den = poly_to_string(tf.den(), v);
    if (den == "1" && tf.delay() == 0.0) return num;
    std::string out = "(" + num + ") / (" + den + ")";
    if (tf.delay() > 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " * exp(-%.10g*s)", tf.delay());
        out += buf;
    }
    return out;
}

std::string CribSheet::to_text() const {
    std::vector<std::array<std::string, 3>> cells;
    cells.push_back({"Controller", "Pre-filter TF", "Feedback TF"});
    for (const auto& r : rows)
        cells.push_back({r.name, tf_to_string(r.prefilter), tf_to_string(r.feedback)});
    std::array<std::size_t, 3> width{};
    for (const auto& row : cells)
        for (int i = 0; i < 3; ++i) width[i] = std::max(width[i], row[i].size());
    std::ostringstream os;
    os << "Controller structures for plant order n=" << n << "\n";
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (int i = 0; i < 3; ++i) {
            os << cells[r][i];
            if (i < 2) os << std::string(width[i] - cells[r][i].size() + 2, ' ');
        }
        os << "\n";
        if (r == 0) os << std::string(width[0] + width[1] + width[2] + 4, '-') << "\n";
    }
    return os.str();
}

std::string CribSheet::to_json() const {
    nlohmann::json j;
    j["order"] = n;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["name"] = r.name;
        row["prefilter"] = {{"num", r.prefilter.num().coeffs()}, {"den", r.prefilter.den().coeffs()}};
        row["feedback"] = {{"num", r.feedback.num().coeffs()}, {"den", r.feedback.den().coeffs()}};
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

} // namespace adrceq
