// Command-line front end for the adrceq shared library: controller tuning,
// equivalence verification, robustness/Bode analysis, and closed-loop
// simulation with CSV/SVG output. Talks to the library through the C API
// only.
//
// Exit codes: 0 success, 1 analytical/simulation failure, 2 usage or
// configuration error.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adrceq.h"

namespace {

struct TfHandle {
    adrceq_tf* p = nullptr;
    ~TfHandle() { adrceq_tf_free(p); }
};
struct ControllerHandle {
    adrceq_controller* p = nullptr;
    ~ControllerHandle() { adrceq_controller_free(p); }
};
struct ResponseHandle {
    adrceq_response* p = nullptr;
    ~ResponseHandle() { adrceq_response_free(p); }
};
struct ScenarioHandle {
    adrceq_scenario* p = nullptr;
    ~ScenarioHandle() { adrceq_scenario_free(p); }
};
struct TraceHandle {
    adrceq_trace* p = nullptr;
    ~TraceHandle() { adrceq_trace_free(p); }
};
struct AuditHandle {
    adrceq_audit* p = nullptr;
    ~AuditHandle() { adrceq_audit_free(p); }
};

struct CliError {
    int exit_code;
    std::string message;
};

void check(adrceq_status st, const char* what) {
    if (st != ADRCEQ_OK)
        throw CliError{2, std::string(what) + ": " + adrceq_last_error()};
}

std::string take_string(adrceq_status st, char* s, const char* what) {
    if (st != ADRCEQ_OK) throw CliError{2, std::string(what) + ": " + adrceq_last_error()};
    std::string out(s);
    adrceq_string_free(s);
    return out;
}

std::string tf_string(const adrceq_tf* tf) {
    size_t len = 0;
    adrceq_tf_to_string(tf, nullptr, 0, &len);
    std::string out(len + 1, '\0');
    adrceq_tf_to_string(tf, out.data(), out.size(), &len);
    out.resize(len);
    return out;
}

// ----------------------------------------------------------------------
// Flat key = value configuration with [section] headers. Unknown keys in
// the active section are rejected.
// ----------------------------------------------------------------------
class ConfigSection {
public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& fallback) {
        consumed_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    double get_num(const std::string& key, double fallback) {
        consumed_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw CliError{2, "config key '" + key + "' is not a number: " + it->second};
        }
    }

    bool get_bool(const std::string& key, bool fallback) {
        consumed_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        if (it->second == "on" || it->second == "true" || it->second == "1") return true;
        if (it->second == "off" || it->second == "false" || it->second == "0") return false;
        throw CliError{2, "config key '" + key + "' must be on/off: " + it->second};
    }

    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (!consumed_.count(key))
                throw CliError{2, "unknown config key '" + key + "'"};
    }

private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> consumed_;
};

std::map<std::string, ConfigSection> parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CliError{2, "cannot open config file " + path};
    std::map<std::string, ConfigSection> out;
    std::string line, section = "global";
    int lineno = 0;
    auto strip = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CliError{2, path + ":" + std::to_string(lineno) + ": expected key = value"};
        out[section].set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return out;
}

// ----------------------------------------------------------------------
// Presets.
// ----------------------------------------------------------------------
struct TunePreset {
    int n;
    double omega_cl, k_eso, b0;
};

TunePreset tune_preset(const std::string& name) {
    if (name == "paper-n1") return {1, 2.7, 15.0, 1.0};
    if (name == "paper-n2") return {2, 4.0, 7.0, 1.0};
    if (name == "scenario-1") return {2, 45.0, 45.0, 20.0 / (0.001 * 0.01)};
    if (name == "scenario-2") return {2, 50.0, 12.0, 0.105 / (8e-5 * 4.5e-3)};
    throw CliError{2, "unknown preset '" + name +
                          "' (expected paper-n1, paper-n2, scenario-1 or scenario-2)"};
}

adrceq_pid preset_pi() {
    adrceq_pid p{};
    p.kp = 1.0;
    p.ki = 2.5;
    p.beta = 1.0;
    p.fy.kind = ADRCEQ_FILTER_UNITY;
    p.fr.kind = ADRCEQ_FILTER_UNITY;
    return p;
}

adrceq_pid preset_pid() {
    adrceq_pid p{};
    p.kp = 30.0;
    p.ki = 27.0;
    p.kd = 5.0;
    p.beta = 1.0;
    p.fy.kind = ADRCEQ_FILTER_FIRST_ORDER;
    p.fy.T = 0.05;
    p.fr.kind = ADRCEQ_FILTER_UNITY;
    return p;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw CliError{2, "cannot write " + path};
    f << content;
}

// ----------------------------------------------------------------------
// tune
// ----------------------------------------------------------------------
int cmd_tune(ConfigSection cfg) {
    const std::string preset = cfg.get_str("preset", "");
    int n = static_cast<int>(cfg.get_num("n", 0));
    double omega = cfg.get_num("omega_cl_rad_s", 0.0);
    double keso = cfg.get_num("k_eso", 0.0);
    double b0 = cfg.get_num("b0", 1.0);
    cfg.reject_unknown();
    if (!preset.empty()) {
        const TunePreset p = tune_preset(preset);
        n = p.n;
        omega = p.omega_cl;
        keso = p.k_eso;
        b0 = p.b0;
    }

    adrceq_gains g{};
    check(adrceq_bandwidth_tune(n, omega, keso, b0, &g), "bandwidth tuning failed");
    adrceq_pid pid{};
    check(adrceq_pid_from_adrc(&g, &pid), "gain mapping failed");
    TfHandle ceq;
    adrceq_filter unity{ADRCEQ_FILTER_UNITY, 0, 0, 0};
    check(adrceq_build_ceq(&g, &unity, &ceq.p), "equivalence factor failed");

    std::printf("order n            : %d\n", g.n);
    std::printf("omega_cl [rad/s]   : %.10g\n", omega);
    std::printf("k_eso              : %.10g\n", keso);
    std::printf("b0                 : %.10g\n", g.b0);
    std::printf("controller gains k : ");
    for (int i = 0; i < g.n; ++i) std::printf("%s%.10g", i ? ", " : "", g.k[i]);
    std::printf("\nobserver gains l   : ");
    for (int i = 0; i < g.n + 1; ++i) std::printf("%s%.10g", i ? ", " : "", g.l[i]);
    std::printf("\nmapped Kp          : %.10g\n", pid.kp);
    std::printf("mapped Ki          : %.10g\n", pid.ki);
    std::printf("mapped Kd          : %.10g\n", pid.kd);
    std::printf("C_EQ%d              : %s\n", g.n, tf_string(ceq.p).c_str());
    return 0;
}

// ----------------------------------------------------------------------
// equiv-check
// ----------------------------------------------------------------------
int cmd_equiv_check(ConfigSection cfg) {
    const std::string preset = cfg.get_str("preset", "");
    int n = static_cast<int>(cfg.get_num("n", 0));
    double omega = cfg.get_num("omega_cl_rad_s", 0.0);
    double keso = cfg.get_num("k_eso", 0.0);
    double b0 = cfg.get_num("b0", 1.0);
    double fy_tf = cfg.get_num("fy_tf_s", 0.0);
    const double kp_perturb_pct = cfg.get_num("kp_perturb_pct", 0.0);
    cfg.reject_unknown();
    if (!preset.empty()) {
        const TunePreset p = tune_preset(preset);
        n = p.n;
        omega = p.omega_cl;
        keso = p.k_eso;
        b0 = p.b0;
        if (n == 2 && fy_tf == 0.0) fy_tf = 0.05;
    }

    adrceq_gains g{};
    check(adrceq_bandwidth_tune(n, omega, keso, b0, &g), "bandwidth tuning failed");
    adrceq_pid pid{};
    check(adrceq_pid_from_adrc(&g, &pid), "gain mapping failed");
    adrceq_filter fy{ADRCEQ_FILTER_UNITY, 0, 0, 0};
    if (n == 2 && fy_tf > 0.0) {
        fy.kind = ADRCEQ_FILTER_FIRST_ORDER;
        fy.T = fy_tf;
        pid.fy = fy;
    }
    pid.kp *= 1.0 + kp_perturb_pct / 100.0;

    TfHandle lhs, pid_fb, ceq, rhs;
    check(adrceq_build_eadrc_fb(&g, &lhs.p), "feedback TF failed");
    check(adrceq_build_pid_fb(&pid, &pid_fb.p), "PID feedback failed");
    check(adrceq_build_ceq(&g, &fy, &ceq.p), "equivalence factor failed");
    check(adrceq_tf_series(pid_fb.p, ceq.p, &rhs.p), "series composition failed");

    constexpr int kPoints = 200;
    std::vector<double> omegas(kPoints), re_a(kPoints), im_a(kPoints), re_b(kPoints), im_b(kPoints);
    for (int i = 0; i < kPoints; ++i)
        omegas[i] = std::pow(10.0, -3.0 + 7.0 * i / (kPoints - 1));
    check(adrceq_tf_freq_eval(lhs.p, omegas.data(), kPoints, re_a.data(), im_a.data()),
          "frequency sweep failed");
    check(adrceq_tf_freq_eval(rhs.p, omegas.data(), kPoints, re_b.data(), im_b.data()),
          "frequency sweep failed");

    double worst = 0.0, worst_w = omegas[0];
    for (int i = 0; i < kPoints; ++i) {
        const double mag = std::hypot(re_a[i], im_a[i]);
        const double dev = std::hypot(re_a[i] - re_b[i], im_a[i] - im_b[i]) / std::max(mag, 1e-300);
        if (dev > worst) {
            worst = dev;
            worst_w = omegas[i];
        }
    }
    std::printf("equivalence sweep: n=%d, %d log-spaced points on [1e-3, 1e4] rad/s\n", n, kPoints);
    std::printf("max relative deviation: %.3e at omega = %.6g rad/s\n", worst, worst_w);
    if (worst < 1e-9) {
        std::printf("PASS (deviation < 1e-9)\n");
        return 0;
    }
    std::printf("FAIL (deviation >= 1e-9)\n");
    return 1;
}

// ----------------------------------------------------------------------
// ms
// ----------------------------------------------------------------------
int cmd_ms(ConfigSection cfg, const std::string& out_dir, bool want_csv) {
    const std::string preset = cfg.get_str("preset", "");
    const double lo = cfg.get_num("omega_lo_rad_s", 1e-3);
    const double hi = cfg.get_num("omega_hi_rad_s", 1e3);
    cfg.reject_unknown();
    if (preset.empty()) throw CliError{2, "ms requires --preset"};

    TfHandle plant;
    ControllerHandle ctrl;
    if (preset == "paper-n1-pi") {
        check(adrceq_plant_gp1(&plant.p), "plant");
        const adrceq_pid p = preset_pi();
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_PI, 1, nullptr, &p, &ctrl.p), "controller");
    } else if (preset == "paper-n1-eadrc") {
        check(adrceq_plant_gp1(&plant.p), "plant");
        adrceq_gains g{};
        check(adrceq_bandwidth_tune(1, 2.7, 15.0, 1.0, &g), "tune");
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_EADRC, 1, &g, nullptr, &ctrl.p),
              "controller");
    } else if (preset == "paper-n2-pid") {
        check(adrceq_plant_gp2(&plant.p), "plant");
        const adrceq_pid p = preset_pid();
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_PID, 1, nullptr, &p, &ctrl.p), "controller");
    } else if (preset == "paper-n2-eadrc") {
        check(adrceq_plant_gp2(&plant.p), "plant");
        adrceq_gains g{};
        check(adrceq_bandwidth_tune(2, 4.0, 7.0, 1.0, &g), "tune");
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_EADRC, 1, &g, nullptr, &ctrl.p),
              "controller");
    } else if (preset == "open-loop") {
        check(adrceq_plant_gp1(&plant.p), "plant");
        adrceq_pid p{};
        p.beta = 1.0;
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_PI, 1, nullptr, &p, &ctrl.p), "controller");
    } else {
        throw CliError{2, "unknown ms preset '" + preset + "'"};
    }

    double ms = 0.0, wpeak = 0.0;
    const adrceq_status st = adrceq_ms_index(plant.p, ctrl.p, lo, hi, &ms, &wpeak);
    if (st != ADRCEQ_OK) {
        std::fprintf(stderr, "ms evaluation failed: %s\n", adrceq_last_error());
        return 1;
    }
    std::printf("Ms = %.6g at omega = %.6g rad/s (search range [%g, %g] rad/s)\n", ms, wpeak, lo,
                hi);

    if (want_csv && !out_dir.empty()) {
        TfHandle fb;
        check(adrceq_controller_feedback(ctrl.p, &fb.p), "feedback");
        constexpr int kPoints = 2000;
        std::ostringstream os;
        os << "omega_rad_s,sensitivity_mag\n";
        char buf[64];
        for (int i = 0; i < kPoints; ++i) {
            const double w = std::pow(10.0, std::log10(lo) +
                                                (std::log10(hi) - std::log10(lo)) * i / (kPoints - 1));
            double re_c, im_c, re_p, im_p;
            check(adrceq_tf_freq_eval(fb.p, &w, 1, &re_c, &im_c), "sweep");
            check(adrceq_tf_freq_eval(plant.p, &w, 1, &re_p, &im_p), "sweep");
            const double lr = 1.0 + (re_c * re_p - im_c * im_p);
            const double li = re_c * im_p + im_c * re_p;
            std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", w, 1.0 / std::hypot(lr, li));
            os << buf;
        }
        const std::string path = out_dir + "/sensitivity.csv";
        write_text_file(path, os.str());
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

// ----------------------------------------------------------------------
// bode
// ----------------------------------------------------------------------
int cmd_bode(ConfigSection cfg, const std::string& out_dir) {
    const std::string preset = cfg.get_str("preset", "");
    const double lo = cfg.get_num("omega_lo_rad_s", 1e-2);
    const double hi = cfg.get_num("omega_hi_rad_s", 1e4);
    const int points = static_cast<int>(cfg.get_num("points", 400));
    cfg.reject_unknown();
    if (preset != "paper-n1" && preset != "paper-n2")
        throw CliError{2, "bode requires --preset paper-n1 or paper-n2"};
    const bool first_order = preset == "paper-n1";

    TfHandle plant;
    ControllerHandle std_ctrl, ea_ctrl;
    if (first_order) {
        check(adrceq_plant_gp1(&plant.p), "plant");
        const adrceq_pid p = preset_pi();
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_PI, 1, nullptr, &p, &std_ctrl.p), "ctrl");
        adrceq_gains g{};
        check(adrceq_bandwidth_tune(1, 2.7, 15.0, 1.0, &g), "tune");
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_EADRC, 1, &g, nullptr, &ea_ctrl.p), "ctrl");
    } else {
        check(adrceq_plant_gp2(&plant.p), "plant");
        const adrceq_pid p = preset_pid();
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_PID, 1, nullptr, &p, &std_ctrl.p), "ctrl");
        adrceq_gains g{};
        check(adrceq_bandwidth_tune(2, 4.0, 7.0, 1.0, &g), "tune");
        check(adrceq_make_controller(ADRCEQ_CONTROLLER_EADRC, 1, &g, nullptr, &ea_ctrl.p), "ctrl");
    }

    const char* std_name = first_order ? "pi" : "pid";
    std::vector<ResponseHandle> handles(6);
    const adrceq_channel_kind kinds[3] = {ADRCEQ_CHANNEL_YD, ADRCEQ_CHANNEL_UN, ADRCEQ_CHANNEL_ER};
    const char* kind_names[3] = {"gyd", "gun", "ger"};
    std::vector<const adrceq_response*> ptrs;
    for (int i = 0; i < 3; ++i) {
        check(adrceq_response_from_channel((std::string(kind_names[i]) + "_" + std_name).c_str(),
                                           plant.p, std_ctrl.p, kinds[i], &handles[i].p),
              "channel");
        check(adrceq_response_from_channel((std::string(kind_names[i]) + "_eadrc").c_str(),
                                           plant.p, ea_ctrl.p, kinds[i], &handles[3 + i].p),
              "channel");
    }
    for (auto& h : handles) ptrs.push_back(h.p);

    char* csv = nullptr;
    check(adrceq_bode_csv(ptrs.data(), ptrs.size(), lo, hi, points, &csv), "bode export");
    const std::string data = take_string(ADRCEQ_OK, csv, "bode");
    if (out_dir.empty()) {
        std::fputs(data.c_str(), stdout);
    } else {
        const std::string path = out_dir + "/bode_" + preset + ".csv";
        write_text_file(path, data);
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

// ----------------------------------------------------------------------
// simulate
// ----------------------------------------------------------------------
int cmd_simulate(ConfigSection cfg, const std::string& out_dir, bool plot, uint64_t seed,
                 bool seed_given) {
    const std::string preset = cfg.get_str("preset", "");
    const std::string variant = cfg.get_str("variant", "");
    const double tf_s = cfg.get_num("tf_s", 0.005);
    const double tr_s = cfg.get_num("tr_s", 0.03);
    const double beta = cfg.get_num("beta", 0.7);
    const int dof = static_cast<int>(cfg.get_num("dof", 1));
    const double t_end = cfg.get_num("t_end_s", 0.0);
    const bool noise = cfg.get_bool("noise", true);
    const uint64_t cfg_seed = static_cast<uint64_t>(cfg.get_num("seed", 0));
    cfg.reject_unknown();
    const uint64_t use_seed = seed_given ? seed : cfg_seed;

    ScenarioHandle sc;
    AuditHandle audit;
    check(adrceq_audit_create(&audit.p), "audit");

    if (preset == "scenario-1") {
        adrceq_scn1_variant v;
        if (variant == "pid") v = ADRCEQ_SCN1_PID;
        else if (variant == "eadrc" || variant.empty()) v = ADRCEQ_SCN1_EADRC;
        else if (variant == "pid-plus-ceq2") v = ADRCEQ_SCN1_PID_PLUS_CEQ2;
        else throw CliError{2, "scenario-1 variant must be pid, eadrc or pid-plus-ceq2"};
        check(adrceq_scenario_one(v, tf_s, use_seed, &sc.p), "scenario");
    } else if (preset == "scenario-2") {
        adrceq_scn2_variant v;
        if (variant == "eadrc-1dof" || variant.empty()) v = ADRCEQ_SCN2_EADRC_1DOF;
        else if (variant == "eadrc-2dof") v = ADRCEQ_SCN2_EADRC_2DOF;
        else throw CliError{2, "scenario-2 variant must be eadrc-1dof or eadrc-2dof"};
        check(adrceq_scenario_two(v, tr_s, use_seed, &sc.p), "scenario");
    } else if (preset == "paper-n1" || preset == "paper-n2") {
        const int n = preset == "paper-n1" ? 1 : 2;
        int kind;
        if (variant == "pi" || variant == "pid") kind = 0;
        else if (variant == "eadrc" || variant.empty()) kind = 1;
        else throw CliError{2, "transient variant must be pi, pid or eadrc"};
        check(adrceq_scenario_transient(n, kind, dof, beta, use_seed, &sc.p), "scenario");
    } else {
        throw CliError{2,
                       "simulate requires --preset scenario-1|scenario-2|paper-n1|paper-n2"};
    }
    if (t_end > 0.0) check(adrceq_scenario_set_t_end(sc.p, t_end), "t_end");
    if (!noise) check(adrceq_scenario_set_noise_enabled(sc.p, 0), "noise");

    TraceHandle trace;
    const adrceq_status st = adrceq_run(sc.p, &trace.p);
    if (st == ADRCEQ_ERR_NONFINITE_STATE) {
        std::fprintf(stderr, "simulation diverged: %s\n", adrceq_last_error());
        return 1;
    }
    check(st, "simulation failed");

    size_t len = 0;
    adrceq_trace_len(trace.p, &len);
    adrceq_metrics m{};
    double win_t0 = 0.0, win_t1 = 0.0;
    check(adrceq_scenario_reference_window(sc.p, &win_t0, &win_t1), "window");
    check(adrceq_compute_metrics(trace.p, win_t0, win_t1, &m), "metrics");

    std::printf("steps              : %zu\n", len);
    std::printf("iae                : %.6g\n", m.iae);
    std::printf("overshoot_pct      : %.6g\n", m.overshoot_pct);
    std::printf("u_peak             : %.6g\n", m.u_peak);
    std::printf("steady_state_error : %.6g\n", m.steady_state_error);
    std::printf("rise_time_s        : %.6g\n", m.rise_time_s);

    if (!out_dir.empty()) {
        char* csv = nullptr;
        check(adrceq_trace_csv(trace.p, &csv), "trace csv");
        write_text_file(out_dir + "/trace.csv", take_string(ADRCEQ_OK, csv, "csv"));
        char metrics_buf[640];
        std::snprintf(metrics_buf, sizeof metrics_buf,
                      "iae=%.12g\novershoot_pct=%.12g\nu_peak=%.12g\nsteady_state_error=%.12g\n"
                      "rise_time_s=%.12g\nseed=%" PRIu64 "\n"
                      "note=disturbance profile and reference shaping are configurable toolkit "
                      "defaults\n",
                      m.iae, m.overshoot_pct, m.u_peak, m.steady_state_error, m.rise_time_s,
                      use_seed);
        write_text_file(out_dir + "/metrics.txt", metrics_buf);
        std::printf("wrote %s/trace.csv and %s/metrics.txt\n", out_dir.c_str(), out_dir.c_str());
        char* audit_text = nullptr;
        check(adrceq_scenario_audit_text(sc.p, &audit_text), "audit");
        const std::string audit_str = take_string(ADRCEQ_OK, audit_text, "audit");
        if (!audit_str.empty()) {
            write_text_file(out_dir + "/audit.log", audit_str);
            std::printf("wrote %s/audit.log\n", out_dir.c_str());
        }
        if (plot) {
            char* svg = nullptr;
            char label[128];
            size_t label_len = 0;
            adrceq_scenario_label(sc.p, label, sizeof label, &label_len);
            check(adrceq_trace_svg(trace.p, label, &svg), "svg");
            write_text_file(out_dir + "/trace.svg", take_string(ADRCEQ_OK, svg, "svg"));
            std::printf("wrote %s/trace.svg\n", out_dir.c_str());
        }
    }
    return 0;
}

// ----------------------------------------------------------------------
// crib
// ----------------------------------------------------------------------
int cmd_crib(ConfigSection cfg, const std::string& out_dir) {
    const std::string preset = cfg.get_str("preset", "");
    int n = static_cast<int>(cfg.get_num("n", 0));
    double omega = cfg.get_num("omega_cl_rad_s", 0.0);
    double keso = cfg.get_num("k_eso", 0.0);
    double b0 = cfg.get_num("b0", 1.0);
    const double beta = cfg.get_num("beta", 1.0);
    const double fr_tf = cfg.get_num("fr_tf_s", 0.0);
    const double fy_tf = cfg.get_num("fy_tf_s", 0.0);
    cfg.reject_unknown();
    if (!preset.empty()) {
        const TunePreset p = tune_preset(preset);
        n = p.n;
        omega = p.omega_cl;
        keso = p.k_eso;
        b0 = p.b0;
    }

    adrceq_gains g{};
    check(adrceq_bandwidth_tune(n, omega, keso, b0, &g), "bandwidth tuning failed");
    adrceq_pid pid{};
    check(adrceq_pid_from_adrc(&g, &pid), "gain mapping failed");
    pid.beta = beta;
    if (fr_tf > 0.0) {
        pid.fr.kind = ADRCEQ_FILTER_FIRST_ORDER;
        pid.fr.T = fr_tf;
    }
    if (n == 2 && fy_tf > 0.0) {
        pid.fy.kind = ADRCEQ_FILTER_FIRST_ORDER;
        pid.fy.T = fy_tf;
    }

    char* text = nullptr;
    check(adrceq_crib_sheet_text(&g, &pid, &text), "crib sheet failed");
    const std::string table = take_string(ADRCEQ_OK, text, "crib");
    std::fputs(table.c_str(), stdout);
    if (!out_dir.empty()) {
        write_text_file(out_dir + "/crib.txt", table);
        char* json = nullptr;
        check(adrceq_crib_sheet_json(&g, &pid, &json), "crib json failed");
        write_text_file(out_dir + "/crib.json", take_string(ADRCEQ_OK, json, "crib"));
        std::printf("wrote %s/crib.txt and %s/crib.json\n", out_dir.c_str(), out_dir.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adrceq: PI/PID and error-driven disturbance-rejection controller toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, variant, format = "csv";
    uint64_t seed = 0;
    bool plot = false;
    double omega_cl = 0.0, k_eso = 0.0, b0 = 1.0, tf_s = 0.0, tr_s = 0.0, beta = 0.0;
    double lo = 0.0, hi = 0.0;
    int n = 0, dof = 0, points = 0;
    bool no_noise = false;
    double kp_perturb = 0.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--preset", preset, "named preset");
        cmd->add_option("--format", format)->check(CLI::IsMember({"csv"}));
    };

    CLI::App* tune = app.add_subcommand("tune", "bandwidth-parameterized gains and PI/PID map");
    add_common(tune);
    tune->add_option("--n", n, "plant order (1 or 2)");
    tune->add_option("--omega-cl", omega_cl, "closed-loop bandwidth [rad/s]");
    tune->add_option("--k-eso", k_eso, "observer/controller bandwidth ratio");
    tune->add_option("--b0", b0, "input gain estimate");

    CLI::App* equiv = app.add_subcommand("equiv-check",
                                         "verify the PI/PID x C_EQ factorization by sweep");
    add_common(equiv);
    equiv->add_option("--n", n);
    equiv->add_option("--omega-cl", omega_cl);
    equiv->add_option("--k-eso", k_eso);
    equiv->add_option("--b0", b0);
    equiv->add_option("--fy-tf", tf_s, "first-order output filter time constant [s]");
    equiv->add_option("--kp-perturb-pct", kp_perturb, "perturb mapped Kp by this percentage");

    CLI::App* ms = app.add_subcommand("ms", "sensitivity peak of a plant/controller preset");
    add_common(ms);
    ms->add_option("--lo", lo, "search range low end [rad/s]");
    ms->add_option("--hi", hi, "search range high end [rad/s]");

    CLI::App* bode = app.add_subcommand("bode", "closed-loop channel frequency responses (CSV)");
    add_common(bode);
    bode->add_option("--lo", lo);
    bode->add_option("--hi", hi);
    bode->add_option("--points", points);

    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop time-domain run");
    add_common(simulate);
    simulate->add_option("--variant", variant, "scenario variant");
    simulate->add_option("--tf", tf_s, "PID output filter time constant [s]");
    simulate->add_option("--tr", tr_s, "reference filter time constant [s]");
    simulate->add_option("--beta", beta, "reference weight");
    simulate->add_option("--dof", dof, "1 or 2");
    simulate->add_option("--t-end", hi, "simulation end time [s]")->group("");
    simulate->add_option("--seed", seed, "noise seed");
    simulate->add_flag("--plot", plot, "write an SVG plot");
    simulate->add_flag("--no-noise", no_noise, "disable measurement noise");

    CLI::App* crib = app.add_subcommand("crib", "controller structure table for a tuning");
    add_common(crib);
    crib->add_option("--n", n);
    crib->add_option("--omega-cl", omega_cl);
    crib->add_option("--k-eso", k_eso);
    crib->add_option("--b0", b0);
    crib->add_option("--beta", beta);
    crib->add_option("--fr-tf", tr_s, "reference filter time constant [s]");
    crib->add_option("--fy-tf", tf_s, "output filter time constant [s]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const std::string name = active->get_name();

        ConfigSection cfg;
        if (!config_path.empty()) {
            auto sections = parse_config(config_path);
            if (sections.count(name)) cfg = sections[name];
            for (const auto& [sec, _] : sections)
                if (sec != name && sec != "global")
                    throw CliError{2, "config section [" + sec + "] does not match command " + name};
        }
        // Flags override the config file.
        auto override_num = [&](const char* flag, const char* key, double v) {
            const CLI::Option* opt = active->get_option_no_throw(flag);
            if (opt && opt->count() > 0) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                cfg.set(key, buf);
            }
        };
        if (!preset.empty()) cfg.set("preset", preset);
        if (!variant.empty()) cfg.set("variant", variant);
        override_num("--n", "n", n);
        override_num("--omega-cl", "omega_cl_rad_s", omega_cl);
        override_num("--k-eso", "k_eso", k_eso);
        override_num("--b0", "b0", b0);
        override_num("--lo", "omega_lo_rad_s", lo);
        override_num("--hi", "omega_hi_rad_s", hi);
        override_num("--points", "points", points);
        override_num("--beta", "beta", beta);
        override_num("--dof", "dof", dof);
        if (name == "simulate") {
            override_num("--tf", "tf_s", tf_s);
            override_num("--tr", "tr_s", tr_s);
            override_num("--t-end", "t_end_s", hi);
            if (no_noise) cfg.set("noise", "off");
        } else {
            override_num("--fy-tf", "fy_tf_s", tf_s);
            override_num("--fr-tf", "fr_tf_s", tr_s);
            override_num("--kp-perturb-pct", "kp_perturb_pct", kp_perturb);
        }

        if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

        if (name == "tune") return cmd_tune(std::move(cfg));
        if (name == "equiv-check") return cmd_equiv_check(std::move(cfg));
        if (name == "ms") return cmd_ms(std::move(cfg), out_dir, format == "csv");
        if (name == "bode") return cmd_bode(std::move(cfg), out_dir);
        if (name == "simulate")
            return cmd_simulate(std::move(cfg), out_dir, plot, seed,
                                simulate->count("--seed") > 0);
        if (name == "crib") return cmd_crib(std::move(cfg), out_dir);
        throw CliError{2, "unknown command"};
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
