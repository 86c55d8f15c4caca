#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "core/polynomial.hpp"

namespace adrceq {

/// s-domain with optional transport delay (seconds).
struct Continuous {
    double delay = 0.0;
};

/// z-domain with sample time (seconds).
struct Discrete {
    double Ts = 0.0;
};

using Domain = std::variant<Continuous, Discrete>;

struct FrequencyResponse {
    std::vector<double> omegas; // rad/s, strictly increasing
    std::vector<std::complex<double>> values;
};

/// Rational transfer function num/den over a continuous or discrete domain.
/// Immutable value type; all operations return new objects.
class RationalTF {
public:
    RationalTF() : num_(Polynomial::zero()), den_(Polynomial::one()), domain_(Continuous{}) {}
    RationalTF(Polynomial num, Polynomial den, Domain domain);

    static RationalTF continuous(Polynomial num, Polynomial den, double delay = 0.0) {
        return RationalTF(std::move(num), std::move(den), Continuous{delay});
    }
    static RationalTF discrete(Polynomial num, Polynomial den, double Ts) {
        return RationalTF(std::move(num), std::move(den), Discrete{Ts});
    }
    static RationalTF constant(double k, Domain domain = Continuous{}) {
        return RationalTF(Polynomial{k}, Polynomial::one(), domain);
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    const Domain& domain() const { return domain_; }

    bool is_continuous() const { return std::holds_alternative<Continuous>(domain_); }
    bool is_discrete() const { return std::holds_alternative<Discrete>(domain_); }
    double delay() const;   // 0 for discrete
    double sample_time() const; // 0 for continuous

    bool proper() const { return num_.degree() <= den_.degree(); }
    bool strictly_proper() const { return num_.degree() < den_.degree(); }

    std::complex<double> eval_at(double omega) const;

private:
    Polynomial num_;
    Polynomial den_;
    Domain domain_;
};

bool same_domain(const RationalTF& g, const RationalTF& h);

RationalTF tf_series(const RationalTF& g, const RationalTF& h);
RationalTF tf_inverse(const RationalTF& g);
RationalTF tf_scale(const RationalTF& g, double k);

FrequencyResponse freq_eval(const RationalTF& g, const std::vector<double>& omegas);

struct DcGain {
    double value = 0.0;
    bool infinite = false;
};

DcGain dc_gain(const RationalTF& g);

/// Result of a feedback interconnection g/(1+g*h). When g carries a transport
/// delay the loop is not rational; the result is then kept factored and
/// supports frequency evaluation only.
class LoopTF {
public:
    static LoopTF rational(RationalTF tf);
    static LoopTF factored(RationalTF g, RationalTF h);

    bool is_factored() const { return factored_; }
    const RationalTF& as_rational() const; // throws Errc::has_delay when factored

    std::complex<double> eval_at(double omega) const;
    FrequencyResponse freq_eval(const std::vector<double>& omegas) const;

private:
    LoopTF() = default;
    bool factored_ = false;
    RationalTF rat_;
    RationalTF g_, h_;
};

LoopTF tf_feedback(const RationalTF& g, const RationalTF& h);

/// Removes exact common linear factors shared by num and den (root match within
/// tol, relative). Explicit opt-in; nothing in the toolkit calls this
/// implicitly.
RationalTF simplify(const RationalTF& g, double tol);

std::vector<double> log_grid(double lo, double hi, int n);

} // namespace adrceq
