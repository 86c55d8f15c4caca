#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "analysis/analysis.hpp"
#include "core/error.hpp"
#include "sim/sim.hpp"

using namespace adrceq;

namespace {

TwoDofController pi_bench(int dof = 1, double beta = 0.7) {
    PidParams p;
    p.Kp = 1.0;
    p.Ki = 2.5;
    p.beta = beta;
    if (dof == 2) p.Fr = FilterSpec::first_order(0.001);
    return make_pi_controller(p, dof);
}

TwoDofController pid_bench(int dof = 1, double beta = 0.65, double Tf = 0.05) {
    PidParams p;
    p.Kp = 30.0;
    p.Ki = 27.0;
    p.Kd = 5.0;
    p.beta = beta;
    p.Fy = FilterSpec::first_order(Tf);
    if (dof == 2) p.Fr = FilterSpec::first_order(0.001);
    return make_pid_controller(p, dof);
}

TwoDofController eadrc_n1(int dof = 1, double beta = 0.7) {
    return make_eadrc_controller(bandwidth_tune(1, 2.7, 15.0, 1.0), dof, beta,
                                 dof == 2 ? FilterSpec::first_order(0.001) : FilterSpec::unity());
}

TwoDofController eadrc_n2(int dof = 1, double beta = 0.75) {
    return make_eadrc_controller(bandwidth_tune(2, 4.0, 7.0, 1.0), dof, beta,
                                 dof == 2 ? FilterSpec::first_order(0.001) : FilterSpec::unity(),
                                 FilterSpec::first_order(0.05));
}

} // namespace

TEST_CASE("ms_index open loop is exactly one") {
    PidParams zero;
    zero.beta = 1.0;
    TwoDofController c;
    c.feedback = RationalTF::constant(0.0);
    c.prefilter = RationalTF::constant(1.0);
    const MsResult r = ms_index(LoopAssembly{plant_gp1(), c});
    CHECK(r.ms == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ms_index on the four reference tunings") {
    // Values frozen from an independent grid+Brent search over the same
    // sensitivity definition.
    const MsResult pi = ms_index(LoopAssembly{plant_gp1(), pi_bench()});
    CHECK(pi.ms == doctest::Approx(1.506405).epsilon(2e-5));
    CHECK(pi.omega_peak == doctest::Approx(2.2358).epsilon(1e-3));

    const MsResult ea1 = ms_index(LoopAssembly{plant_gp1(), eadrc_n1()});
    CHECK(ea1.ms == doctest::Approx(1.507856).epsilon(2e-5));

    const MsResult pid = ms_index(LoopAssembly{plant_gp2(), pid_bench()});
    CHECK(pid.ms == doctest::Approx(1.462715).epsilon(2e-5));
    CHECK(pid.omega_peak == doctest::Approx(7.5447).epsilon(1e-3));

    const MsResult ea2 = ms_index(LoopAssembly{plant_gp2(), eadrc_n2()});
    CHECK(ea2.ms == doctest::Approx(1.458607).epsilon(2e-5));
    CHECK(ea2.omega_peak == doctest::Approx(26.7203).epsilon(1e-3));
}

TEST_CASE("matching tunings give matching robustness indices") {
    const double pi = ms_index(LoopAssembly{plant_gp1(), pi_bench()}).ms;
    const double ea = ms_index(LoopAssembly{plant_gp1(), eadrc_n1()}).ms;
    CHECK(std::abs(pi - ea) < 0.01);
}

TEST_CASE("ms_index is prefilter-independent across DOF") {
    const auto pairs = {
        std::pair{pi_bench(1), pi_bench(2)},
        std::pair{eadrc_n1(1), eadrc_n1(2)},
        std::pair{pid_bench(1), pid_bench(2)},
        std::pair{eadrc_n2(1), eadrc_n2(2)},
    };
    int idx = 0;
    for (const auto& [a, b] : pairs) {
        const RationalTF plant = idx++ < 2 ? plant_gp1() : plant_gp2();
        const double ma = ms_index(LoopAssembly{plant, a}).ms;
        const double mb = ms_index(LoopAssembly{plant, b}).ms;
        CHECK(std::abs(ma - mb) < 1e-9);
    }
}

TEST_CASE("ms refinement never undershoots the grid maximum") {
    const LoopAssembly asm_{plant_gp1(), pi_bench()};
    const MsResult r = ms_index(asm_);
    double grid_best = 0.0;
    for (double w : log_grid(1e-3, 1e3, 2000)) {
        const std::complex<double> L =
            asm_.controller.feedback.eval_at(w) * asm_.plant.eval_at(w);
        grid_best = std::max(grid_best, 1.0 / std::abs(1.0 + L));
    }
    CHECK(r.ms >= grid_best);
}

TEST_CASE("disturbance channel: zero DC gain under integral action") {
    const ChannelResponse yd = channel_yd(LoopAssembly{plant_gp2(), pid_bench()});
    const RationalTF r = yd.as_rational();
    CHECK(dc_gain(r).value == doctest::Approx(0.0));
    // factored evaluation required when the plant carries delay
    const ChannelResponse yd1 = channel_yd(LoopAssembly{plant_gp1(), pi_bench()});
    CHECK(yd1.has_delay());
    CHECK_THROWS_AS((void)yd1.as_rational(), Error);
    CHECK(std::abs(yd1.eval_at(1e-6)) < 1e-4);
}

TEST_CASE("error-driven controller rejects high-frequency disturbance better than PID") {
    const double ea = std::abs(channel_yd(LoopAssembly{plant_gp2(), eadrc_n2()}).eval_at(1e3));
    const double pid = std::abs(channel_yd(LoopAssembly{plant_gp2(), pid_bench()}).eval_at(1e3));
    CHECK(ea < pid);
}

TEST_CASE("noise channel: zero for zero controller, fast filter amplifies noise") {
    TwoDofController open;
    open.feedback = RationalTF::constant(0.0);
    open.prefilter = RationalTF::constant(1.0);
    CHECK(std::abs(channel_un(LoopAssembly{plant_gp2(), open}).eval_at(10.0)) == 0.0);

    const double pid_fast =
        std::abs(channel_un(LoopAssembly{plant_gp2(), pid_bench(1, 0.65, 0.0003)}).eval_at(1e4));
    const double ea = std::abs(channel_un(LoopAssembly{plant_gp2(), eadrc_n2()}).eval_at(1e4));
    CHECK(pid_fast > ea);
}

TEST_CASE("disturbance and noise channels are identical across DOF at every grid point") {
    const std::vector<double> grid = log_grid(1e-3, 1e4, 200);
    const auto check_pair = [&](const RationalTF& plant, const TwoDofController& a,
                                const TwoDofController& b) {
        const auto ga = channel_yd(LoopAssembly{plant, a}).freq_eval(grid);
        const auto gb = channel_yd(LoopAssembly{plant, b}).freq_eval(grid);
        const auto ua = channel_un(LoopAssembly{plant, a}).freq_eval(grid);
        const auto ub = channel_un(LoopAssembly{plant, b}).freq_eval(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(ga.values[i] - gb.values[i]) <= 1e-12 * std::abs(gb.values[i]));
            CHECK(std::abs(ua.values[i] - ub.values[i]) <= 1e-12 * std::abs(ub.values[i]));
        }
    };
    check_pair(plant_gp1(), pi_bench(1), pi_bench(2));
    check_pair(plant_gp1(), eadrc_n1(1), eadrc_n1(2));
    check_pair(plant_gp2(), pid_bench(1), pid_bench(2));
    check_pair(plant_gp2(), eadrc_n2(1), eadrc_n2(2));
}

TEST_CASE("tracking channel DC behavior") {
    const ChannelResponse er1 = channel_er(LoopAssembly{plant_gp2(), pid_bench(1)});
    CHECK(std::abs(er1.eval_at(1e-8)) < 1e-6);
    const ChannelResponse er2 = channel_er(LoopAssembly{plant_gp2(), pid_bench(2)});
    CHECK(std::abs(er2.eval_at(1e-8)) < 1e-6);
}

TEST_CASE("complementary identity at every grid frequency") {
    const LoopAssembly asm_{plant_gp2(), pid_bench(1)};
    const ChannelResponse er = channel_er(asm_);
    for (double w : log_grid(1e-3, 1e4, 200)) {
        const std::complex<double> L =
            asm_.controller.feedback.eval_at(w) * asm_.plant.eval_at(w);
        const std::complex<double> T = L / (1.0 + L);
        CHECK(std::abs(er.eval_at(w) + T - 1.0) < 1e-10);
    }
}

TEST_CASE("lower reference weight raises the midband tracking error") {
    const auto ger = [&](const TwoDofController& c, double w) {
        return std::abs(channel_er(LoopAssembly{plant_gp1(), c}).eval_at(w));
    };
    const TwoDofController lo_pi = pi_bench(2, 0.3), hi_pi = pi_bench(2, 0.7);
    const TwoDofController lo_ea = eadrc_n1(2, 0.3), hi_ea = eadrc_n1(2, 0.7);
    for (double w : log_grid(0.01, 1.0, 40)) {
        CHECK(ger(lo_pi, w) > ger(hi_pi, w));
        CHECK(ger(lo_ea, w) > ger(hi_ea, w));
    }
}

TEST_CASE("bode_export hand-checked magnitudes and CSV shape") {
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0});
    const BodeDataset ds =
        bode_export({LabeledResponse::from_tf("lag", lag)}, 0.1, 10.0, 3);
    REQUIRE(ds.omega.size() == 3);
    CHECK(20.0 * std::log10(std::abs(ds.values[0][0])) == doctest::Approx(-0.0432).epsilon(1e-2));
    CHECK(20.0 * std::log10(std::abs(ds.values[0][1])) == doctest::Approx(-3.0103).epsilon(1e-3));
    CHECK(20.0 * std::log10(std::abs(ds.values[0][2])) == doctest::Approx(-20.0432).epsilon(1e-3));

    const std::string csv = ds.to_csv();
    CHECK(csv.rfind("omega_rad_s,lag_mag_db,lag_phase_deg\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const BodeDataset empty = bode_export({}, 0.1, 10.0, 3);
    CHECK(empty.to_csv() == "omega_rad_s\n0.1\n1\n10\n");
}

TEST_CASE("bode_export rejects duplicate labels") {
    const RationalTF lag = RationalTF::continuous(Polynomial{1.0}, Polynomial{1.0, 1.0});
    CHECK_THROWS_AS((void)bode_export({LabeledResponse::from_tf("x", lag),
                                       LabeledResponse::from_tf("x", lag)},
                                      0.1, 10.0, 3),
                    Error);
}
