#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/rational_tf.hpp"
#include "discretize/discretize.hpp"
#include "synth/synth.hpp"

namespace adrceq {

/// Strictly proper continuous TF plant, optionally with input transport delay.
struct LinearTFPlant {
    RationalTF tf;
};

/// ydd = -a1*yd - a0*y + b*(u + w), disturbance entering at the input.
struct SecondOrderPlant {
    double a1 = 0.0;
    double a0 = 0.0;
    double b = 1.0;
};

using PlantModel = std::variant<LinearTFPlant, SecondOrderPlant>;

struct DisturbanceSegment {
    enum class Shape { step, ramp, sine };
    double t_start = 0.0;
    Shape shape = Shape::step;
    double level = 0.0;    // step
    double rate = 0.0;     // ramp, per second
    double amp = 0.0;      // sine
    double freq_hz = 0.0;  // sine
    double phase = 0.0;    // sine, radians

    static DisturbanceSegment step_at(double t, double level);
    static DisturbanceSegment ramp_at(double t, double rate);
    static DisturbanceSegment sine_at(double t, double amp, double freq_hz, double phase = 0.0);
};

/// Additive superposition of segments; evaluable at any t >= 0.
struct DisturbanceProfile {
    std::vector<DisturbanceSegment> segments;
    double eval(double t) const;
    void push(DisturbanceSegment seg); // keeps t_start non-decreasing
};

/// Band-limited white noise convention: zero-mean Gaussian sample-and-hold
/// sequence at period Tn with variance Pn/Tn, active from t_on.
struct NoiseSpec {
    double Pn = 0.0;
    double Tn = 0.0;
    std::uint64_t seed = 0;
    double t_on = 0.0;
};

struct ReferenceSpec {
    enum class Kind { step, square };
    Kind kind = Kind::step;
    double amplitude = 1.0;
    double period = 10.0; // square
    double duty = 0.5;    // square
    RationalTF shaping = RationalTF::constant(1.0);

    double raw(double t) const;
};

/// Serial discrete blocks for the feedback path and (optionally) the
/// reference prefilter path.
struct ControllerPipeline {
    std::vector<DiscreteController> prefilter;
    std::vector<DiscreteController> feedback;
    std::string label;
};

ControllerPipeline pipeline_from_controller(const TwoDofController& c, double Ts);

struct MetricWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

struct SimScenario {
    PlantModel plant;
    ControllerPipeline controller;
    ReferenceSpec reference;
    DisturbanceProfile disturbance;
    NoiseSpec noise;
    double Ts = 1e-3;
    double t_end = 10.0;
    int substeps = 10;
    std::string label;
    MetricWindow reference_window; // disturbance-free reference-tracking phase
    AuditLog audit;                // verbatim-vs-oracle records of the builders used
};

struct SimTrace {
    double Ts = 0.0;
    int substeps_used = 0;
    std::vector<double> t, r, y, y_meas, u, e, d;

    std::string to_csv() const; // header t,r,y,y_meas,u,e,d
};

/// Sampled-controller, continuous-plant loop: controller output zero-order
/// held over each period, plant integrated with fixed-step RK4 at
/// `substeps` per period, transport delay realized as a sample FIFO at the
/// substep rate. Deterministic for a given scenario (including seed).
SimTrace run_closed_loop(const SimScenario& sc);

struct Metrics {
    double iae = 0.0;
    double overshoot_pct = 0.0;
    double u_peak = 0.0;
    double steady_state_error = 0.0; // mean |e| over final 5% of the run
    double rise_time_s = 0.0;        // 10% -> 90% within the reference window

    std::string to_kv() const;
};

Metrics compute_metrics(const SimTrace& trace, const MetricWindow& reference_window);

enum class Scenario1Variant { pid, eadrc, pid_plus_ceq2 };
enum class Scenario2Variant { eadrc_1dof, eadrc_2dof };

/// Buck-converter voltage loop: R=50, C=0.001, L=0.01, Vin=20,
/// omega_cl=45, k_eso=45, b0=Vin/(C*L), Ts=1e-4, square reference shaped by
/// 1/(0.1s+1)^2, noise Pn=1e-7 at Tn=Ts. Disturbance amplitudes are
/// reproduction defaults, scaled from the nominal control level.
SimScenario scenario_one(Scenario1Variant variant, double Tf, std::uint64_t seed);

/// DC-motor speed loop: Ra=8.9, La=4.5e-3, Je=8e-5, Fe=12e-5,
/// kem=kme=0.105, omega_cl=50, k_eso=12, b0=kem/(Je*La), beta=0.6, Ts=1e-3,
/// square reference shaped by 1/(0.05s+1)^2, noise Pn=1e-5 at Tn=Ts.
SimScenario scenario_two(Scenario2Variant variant, double Tr, std::uint64_t seed);

enum class TransientKind { standard, eadrc };

/// Step-reference transient test benches: first-order plant with delay or the
/// normalized second-order plant, PI/PID or error-driven controller, 1DOF or
/// 2DOF, controller sampled at 1 ms.
SimScenario transient_bench_scenario(int n, TransientKind kind, int dof, double beta,
                                     std::uint64_t seed);

RationalTF plant_gp1();
RationalTF plant_gp2();

} // namespace adrceq
