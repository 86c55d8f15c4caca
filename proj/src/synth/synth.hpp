#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/rational_tf.hpp"

namespace adrceq {

/// Low-pass filter with unit DC gain: 1, 1/(T s + 1) or 1/(a2 s^2 + a1 s + 1).
struct FilterSpec {
    enum class Kind { unity, first_order, second_order };
    Kind kind = Kind::unity;
    double T = 0.0;
    double a2 = 0.0, a1 = 0.0;

    static FilterSpec unity() { return {}; }
    static FilterSpec first_order(double T);
    static FilterSpec second_order(double a2, double a1);

    bool is_unity() const { return kind == Kind::unity; }
    Polynomial den_poly() const;
    RationalTF as_tf() const { return RationalTF::continuous(Polynomial::one(), den_poly()); }
};

/// Observer/controller gain set for the error-driven disturbance-rejection
/// controller of plant order n (1 or 2): k has n entries, l has n+1.
struct AdrcGains {
    int n = 1;
    std::array<double, 2> k{};
    std::array<double, 3> l{};
    double b0 = 1.0;

    void validate() const;
};

struct PidParams {
    double Kp = 0.0;
    double Ki = 0.0;
    double Kd = 0.0;
    double beta = 1.0;
    FilterSpec Fy = FilterSpec::unity();
    FilterSpec Fr = FilterSpec::unity();
};

/// Two degree-of-freedom controller pair; control law u = C_FB (C_PF r - y).
/// 1DOF structures carry prefilter == 1.
struct TwoDofController {
    RationalTF prefilter;
    RationalTF feedback;
    std::string label;
};

enum class ControllerKind { pi, pid, eadrc };

/// Gains from placing all controller poles at -omega_cl and all observer poles
/// at -k_eso*omega_cl: k from expanding (x + omega_cl)^n, l from expanding
/// (x + k_eso*omega_cl)^(n+1), mapped positionally (k_n multiplies x^(n-1),
/// l_1 multiplies x^n).
AdrcGains bandwidth_tune(int n, double omega_cl, double k_eso, double b0);

/// (Kd s^2 + Kp s + Ki)/s * F_Y(s).
RationalTF build_pid_fb(const PidParams& p);

/// (Kp*beta*s + Ki)/(Kd s^2 + Kp s + Ki) * F_R(s)/F_Y(s).
RationalTF build_pid_pf(const PidParams& p);

/// Tabulated closed-form feedback TF of the error-driven controller,
/// order 1 or 2.
RationalTF build_eadrc_fb(const AdrcGains& g);

/// Same TF obtained from the closed-loop observer/state-feedback matrix
/// resolvent via the Leverrier-Faddeev recursion. Arbitrary gain vectors.
RationalTF eadrc_fb_resolvent(const std::vector<double>& k, const std::vector<double>& l,
                              double b0);
RationalTF build_eadrc_fb_general(const AdrcGains& g);

/// Series equivalence factor turning the PI/PID feedback TF into the
/// error-driven controller feedback TF. Fy is consulted only for n=2
/// (the 1/F_Y factor).
RationalTF build_ceq(const AdrcGains& g, const FilterSpec& Fy = FilterSpec::unity());

/// PI/PID gain map induced by the equivalence; beta and filters are left at
/// caller defaults.
PidParams pid_from_adrc(const AdrcGains& g);

TwoDofController make_pi_controller(const PidParams& p, int dof);
TwoDofController make_pid_controller(const PidParams& p, int dof);
/// For dof == 2, the prefilter composes the mapped PI/PID prefilter with the
/// inverse equivalence factor. `simplified` cancels the F_Y/F_Y pair
/// analytically at the filter-spec level instead of carrying both factors.
TwoDofController make_eadrc_controller(const AdrcGains& g, int dof, double beta = 1.0,
                                       const FilterSpec& Fr = FilterSpec::unity(),
                                       const FilterSpec& Fy = FilterSpec::unity(),
                                       bool simplified = false);

TwoDofController make_controller(ControllerKind kind, int dof, const AdrcGains* gains,
                                 const PidParams* pid);

struct CribSheet {
    struct Row {
        std::string name;
        RationalTF prefilter;
        RationalTF feedback;
    };
    int n = 1;
    std::vector<Row> rows;

    std::string to_text() const;
    std::string to_json() const;
};

/// All four structures (PI/PID and error-driven, 1DOF and 2DOF) for the given
/// order, with numeric coefficients.
CribSheet crib_sheet(const AdrcGains& gains, const PidParams& pid);

std::string tf_to_string(const RationalTF& tf, const char* var = nullptr);

} // namespace adrceq
