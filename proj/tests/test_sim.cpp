#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"
#include "sim/noise.hpp"
#include "sim/sim.hpp"

using namespace adrceq;

namespace {

SimScenario transient(int n, TransientKind kind, int dof, double beta = 0.7,
                      std::uint64_t seed = 5) {
    return transient_bench_scenario(n, kind, dof, beta, seed);
}

double rel_rms(const std::vector<double>& a, const std::vector<double>& b, std::size_t i0 = 0) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = i0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

} // namespace

TEST_CASE("equilibrium: zero reference, disturbance and noise give a zero trace") {
    SimScenario sc = transient(2, TransientKind::eadrc, 1);
    sc.reference.amplitude = 0.0;
    sc.disturbance.segments.clear();
    sc.noise.Pn = 0.0;
    sc.t_end = 2.0;
    const SimTrace tr = run_closed_loop(sc);
    for (double v : tr.y) CHECK(v == 0.0);
    for (double v : tr.u) CHECK(v == 0.0);
}

TEST_CASE("first-order transient bench settles in every phase") {
    // Reference phase ends at the disturbance onset (t=10), the disturbance
    // phase before the noise switch-on (t=15).
    for (TransientKind kind : {TransientKind::standard, TransientKind::eadrc}) {
        SimScenario sc = transient(1, kind, 1);
        const SimTrace tr = run_closed_loop(sc);
        const auto at = [&](double t) {
            return std::abs(tr.e[static_cast<std::size_t>(std::lround(t / sc.Ts)) - 1]);
        };
        CHECK(at(10.0) < 1e-3);
        CHECK(at(15.0) < 1e-3);
    }
}

TEST_CASE("second-order transient bench settles in every phase") {
    for (TransientKind kind : {TransientKind::standard, TransientKind::eadrc}) {
        SimScenario sc = transient(2, kind, 1);
        const SimTrace tr = run_closed_loop(sc);
        const auto at = [&](double t) {
            return std::abs(tr.e[static_cast<std::size_t>(std::lround(t / sc.Ts)) - 1]);
        };
        CHECK(at(10.0) < 1e-3);
        CHECK(at(15.0) < 1e-3);
    }
}

TEST_CASE("identical scenarios produce bitwise identical traces") {
    const SimTrace a = run_closed_loop(transient(1, TransientKind::eadrc, 2, 0.7, 99));
    const SimTrace b = run_closed_loop(transient(1, TransientKind::eadrc, 2, 0.7, 99));
    CHECK(a.y == b.y);
    CHECK(a.u == b.u);
    CHECK(a.y_meas == b.y_meas);
    const SimTrace c = run_closed_loop(transient(1, TransientKind::eadrc, 2, 0.7, 100));
    CHECK(a.y_meas != c.y_meas);
}

TEST_CASE("disturbance response does not depend on the prefilter") {
    for (int n : {1, 2}) {
        // step reference, late disturbance, no noise
        auto build = [&](int dof, bool with_dist) {
            SimScenario sc = transient(n, TransientKind::eadrc, dof, 0.7, 3);
            sc.noise.Pn = 0.0;
            sc.disturbance.segments.clear();
            if (with_dist) sc.disturbance.push(DisturbanceSegment::step_at(24.0, 0.05));
            sc.t_end = 32.0;
            return sc;
        };
        const SimTrace y1d = run_closed_loop(build(1, true));
        const SimTrace y2d = run_closed_loop(build(2, true));
        const SimTrace y1n = run_closed_loop(build(1, false));
        const SimTrace y2n = run_closed_loop(build(2, false));

        // Raw traces coincide over the disturbance window once the reference
        // transients have decayed; the floor is the sampled prefilter's
        // realized DC gain, which matches 1 only to coefficient-cancellation
        // precision.
        const std::size_t i0 = static_cast<std::size_t>(std::lround(24.0 / y1d.Ts));
        double raw_gap = 0.0;
        for (std::size_t i = i0; i < y1d.y.size(); ++i)
            raw_gap = std::max(raw_gap, std::abs(y1d.y[i] - y2d.y[i]));
        CHECK(raw_gap < 1e-8);

        // The isolated disturbance responses agree down to accumulated
        // floating-point divergence between the two loop realizations.
        std::vector<double> d1(y1d.y.size()), d2(y1d.y.size());
        for (std::size_t i = 0; i < d1.size(); ++i) {
            d1[i] = y1d.y[i] - y1n.y[i];
            d2[i] = y2d.y[i] - y2n.y[i];
        }
        CHECK(rel_rms(d1, d2) < 1e-8);
    }
}

TEST_CASE("halving the substep changes the trace by less than 1e-6 relative") {
    SimScenario sc = transient(1, TransientKind::eadrc, 1);
    sc.noise.Pn = 0.0;
    sc.t_end = 12.0;
    const SimTrace coarse = run_closed_loop(sc);
    sc.substeps = 20;
    const SimTrace fine = run_closed_loop(sc);
    CHECK(rel_rms(coarse.y, fine.y) < 1e-6);

    SimScenario s1 = scenario_one(Scenario1Variant::eadrc, 0.005, 3);
    s1.t_end = 2.0;
    const SimTrace c1 = run_closed_loop(s1);
    s1.substeps = 20;
    const SimTrace f1 = run_closed_loop(s1);
    CHECK(rel_rms(c1.y, f1.y) < 1e-6);

    SimScenario s2 = scenario_two(Scenario2Variant::eadrc_2dof, 0.03, 3);
    s2.t_end = 5.0;
    const SimTrace c2 = run_closed_loop(s2);
    s2.substeps = 2 * s2.substeps;
    const SimTrace f2 = run_closed_loop(s2);
    CHECK(rel_rms(c2.y, f2.y) < 1e-6);
}

TEST_CASE("measurement noise has the band-limited-white variance and is seeded") {
    SimScenario sc = transient(1, TransientKind::standard, 1, 0.7, 1234);
    sc.noise.t_on = 0.0;
    sc.t_end = 20.0;
    const SimTrace tr = run_closed_loop(sc);
    std::vector<double> nz(tr.y.size());
    for (std::size_t i = 0; i < nz.size(); ++i) nz[i] = tr.y_meas[i] - tr.y[i];
    const double mean = std::accumulate(nz.begin(), nz.end(), 0.0) / nz.size();
    double var = 0.0;
    for (double v : nz) var += (v - mean) * (v - mean);
    var /= nz.size() - 1;
    const double expect = sc.noise.Pn / sc.noise.Tn;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(expect / nz.size()));
    CHECK(var == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("transport delay must stay commensurate with the substep") {
    SimScenario sc = transient(1, TransientKind::standard, 1);
    sc.noise.Pn = 0.0;
    sc.Ts = 3e-3;
    sc.substeps = 1;
    sc.t_end = 1.0;
    sc.controller = pipeline_from_controller(
        make_pi_controller([] {
            PidParams p;
            p.Kp = 1.0;
            p.Ki = 2.5;
            return p;
        }(), 1),
        sc.Ts);
    const SimTrace tr = run_closed_loop(sc);
    // 0.2 s / (3 ms / m) is an integer for m = 3.
    CHECK(tr.substeps_used == 3);
}

TEST_CASE("state divergence is reported with its timestamp") {
    SimScenario sc = transient(2, TransientKind::standard, 1);
    sc.noise.Pn = 0.0;
    // wrong-sign static controller: u = -10 e destabilizes the unity-gain plant
    TwoDofController bad;
    bad.feedback = RationalTF::constant(-10.0);
    bad.prefilter = RationalTF::constant(1.0);
    sc.controller = pipeline_from_controller(bad, sc.Ts);
    sc.t_end = 60.0;
    try {
        (void)run_closed_loop(sc);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::nonfinite_state);
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
}

TEST_CASE("scenario presets carry the published physical constants") {
    const SimScenario s1 = scenario_one(Scenario1Variant::eadrc, 0.005, 1);
    const auto& buck = std::get<SecondOrderPlant>(s1.plant);
    CHECK(std::sqrt(buck.a0) == doctest::Approx(316.2278).epsilon(1e-4));
    CHECK(buck.b == doctest::Approx(2e6));
    CHECK(buck.a1 == doctest::Approx(20.0));
    CHECK(s1.Ts == doctest::Approx(1e-4));
    CHECK(s1.noise.Pn == doctest::Approx(1e-7));

    const SimScenario s2 = scenario_two(Scenario2Variant::eadrc_2dof, 0.03, 1);
    const auto& motor = std::get<SecondOrderPlant>(s2.plant);
    CHECK(motor.b == doctest::Approx(0.105 / (8e-5 * 4.5e-3)).epsilon(1e-12));
    CHECK(motor.b == doctest::Approx(291666.67).epsilon(1e-6));
    CHECK(motor.a0 == doctest::Approx((8.9 * 12e-5 + 0.105 * 0.105) / (4.5e-3 * 8e-5)).epsilon(1e-12));
    CHECK(s2.Ts == doctest::Approx(1e-3));
    CHECK(s2.noise.Pn == doctest::Approx(1e-5));
    CHECK(s2.controller.prefilter.size() == 1);
}

TEST_CASE("serial factorization and the single-block controller simulate alike") {
    // quick version of the full-length equivalence run
    SimScenario a = scenario_one(Scenario1Variant::eadrc, 0.005, 7);
    SimScenario b = scenario_one(Scenario1Variant::pid_plus_ceq2, 0.005, 7);
    a.t_end = 1.0;
    b.t_end = 1.0;
    const SimTrace ta = run_closed_loop(a);
    const SimTrace tb = run_closed_loop(b);
    CHECK(rel_rms(ta.y, tb.y) < 1e-6);
    CHECK(rel_rms(ta.u, tb.u) < 1e-4);
}

TEST_CASE("compute_metrics on a settled constant trace and an empty trace") {
    SimTrace tr;
    tr.Ts = 0.1;
    for (int i = 0; i < 100; ++i) {
        tr.t.push_back(i * 0.1);
        tr.r.push_back(1.0);
        tr.y.push_back(1.0);
        tr.y_meas.push_back(1.0);
        tr.u.push_back(0.5);
        tr.e.push_back(0.0);
        tr.d.push_back(0.0);
    }
    const Metrics m = compute_metrics(tr, MetricWindow{0.0, 10.0});
    CHECK(m.iae == 0.0);
    CHECK(m.overshoot_pct == 0.0);
    CHECK(m.u_peak == doctest::Approx(0.5));
    CHECK(m.steady_state_error == 0.0);

    CHECK_THROWS_AS((void)compute_metrics(SimTrace{}, MetricWindow{0.0, 1.0}), Error);
}

TEST_CASE("disturbance profiles superpose step, ramp and sine segments") {
    DisturbanceProfile d;
    d.push(DisturbanceSegment::step_at(1.0, 0.5));
    d.push(DisturbanceSegment::ramp_at(2.0, 0.1));
    d.push(DisturbanceSegment::sine_at(3.0, 0.2, 0.25)); // quarter-hertz
    CHECK(d.eval(0.5) == 0.0);
    CHECK(d.eval(1.5) == doctest::Approx(0.5));
    CHECK(d.eval(2.5) == doctest::Approx(0.5 + 0.05));
    CHECK(d.eval(4.0) == doctest::Approx(0.5 + 0.2 + 0.2 * std::sin(2 * M_PI * 0.25)));
    CHECK_THROWS_AS(d.push(DisturbanceSegment::step_at(0.5, 1.0)), Error);
}

TEST_CASE("buck loop stays stable with the fast output filter choice") {
    SimScenario sc = scenario_one(Scenario1Variant::pid, 0.0003, 1);
    sc.t_end = 1.0;
    sc.noise.Pn = 0.0;
    const SimTrace tr = run_closed_loop(sc);
    for (double v : tr.y) CHECK(std::abs(v) < 10.0);
    CHECK(std::abs(tr.e.back()) < 1e-2);
}

TEST_CASE("pipeline blocks must share the scenario sample time") {
    SimScenario sc = scenario_one(Scenario1Variant::eadrc, 0.005, 1);
    sc.Ts = 2e-4; // blocks were built for 1e-4
    CHECK_THROWS_AS((void)run_closed_loop(sc), Error);
}

TEST_CASE("trace CSV shape") {
    SimScenario sc = transient(2, TransientKind::eadrc, 1);
    sc.t_end = 0.01;
    const SimTrace tr = run_closed_loop(sc);
    const std::string csv = tr.to_csv();
    CHECK(csv.rfind("t,r,y,y_meas,u,e,d\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("improper prefilters cannot enter the sampled pipeline") {
    const AdrcGains g = bandwidth_tune(1, 2.7, 15.0, 1.0);
    // with a unity reference filter the inverse equivalence factor leaves the
    // prefilter improper
    const TwoDofController c = make_eadrc_controller(g, 2, 0.7);
    CHECK_THROWS_AS((void)pipeline_from_controller(c, 1e-3), Error);
}
