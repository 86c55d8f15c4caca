#include "adrceq.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "analysis/analysis.hpp"
#include "core/error.hpp"
#include "core/rational_tf.hpp"
#include "discretize/discretize.hpp"
#include "io/svg.hpp"
#include "sim/sim.hpp"
#include "synth/synth.hpp"

using namespace adrceq;

struct adrceq_tf {
    RationalTF tf;
};
struct adrceq_controller {
    TwoDofController ctrl;
};
struct adrceq_response {
    LabeledResponse resp;
};
struct adrceq_discrete {
    DiscreteController ctrl;
};
struct adrceq_audit {
    AuditLog log;
};
struct adrceq_scenario {
    SimScenario sc;
};
struct adrceq_trace {
    SimTrace tr;
};

namespace {

thread_local std::string g_last_error;

adrceq_status status_of(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return ADRCEQ_ERR_INVALID_ARGUMENT;
        case Errc::domain_mismatch: return ADRCEQ_ERR_DOMAIN_MISMATCH;
        case Errc::algebraic_loop: return ADRCEQ_ERR_ALGEBRAIC_LOOP;
        case Errc::zero_numerator: return ADRCEQ_ERR_ZERO_NUMERATOR;
        case Errc::has_delay: return ADRCEQ_ERR_HAS_DELAY;
        case Errc::nyquist_exceeded: return ADRCEQ_ERR_NYQUIST_EXCEEDED;
        case Errc::indeterminate: return ADRCEQ_ERR_INDETERMINATE;
        case Errc::unsupported_order: return ADRCEQ_ERR_UNSUPPORTED_ORDER;
        case Errc::improper_result: return ADRCEQ_ERR_IMPROPER_RESULT;
        case Errc::wrong_filter_kind: return ADRCEQ_ERR_WRONG_FILTER_KIND;
        case Errc::overflow: return ADRCEQ_ERR_OVERFLOW;
        case Errc::unstable_evaluation: return ADRCEQ_ERR_UNSTABLE_EVALUATION;
        case Errc::nonfinite_state: return ADRCEQ_ERR_NONFINITE_STATE;
        case Errc::empty_trace: return ADRCEQ_ERR_EMPTY_TRACE;
        case Errc::duplicate_label: return ADRCEQ_ERR_DUPLICATE_LABEL;
        case Errc::config_error: return ADRCEQ_ERR_CONFIG;
    }
    return ADRCEQ_ERR_INTERNAL;
}

template <typename Fn>
adrceq_status guarded(Fn&& fn) {
    try {
        fn();
        return ADRCEQ_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ADRCEQ_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ADRCEQ_ERR_INTERNAL;
    }
}

adrceq_status require(bool cond, const char* msg) {
    if (cond) return ADRCEQ_OK;
    g_last_error = msg;
    return ADRCEQ_ERR_INVALID_ARGUMENT;
}

Polynomial poly_from(const double* c, size_t n) {
    if (!c || n == 0) raise(Errc::invalid_argument, "coefficient array must be non-empty");
    return Polynomial(std::vector<double>(c, c + n));
}

FilterSpec filter_from(const adrceq_filter& f) {
    switch (f.kind) {
        case ADRCEQ_FILTER_UNITY: return FilterSpec::unity();
        case ADRCEQ_FILTER_FIRST_ORDER: return FilterSpec::first_order(f.T);
        case ADRCEQ_FILTER_SECOND_ORDER: return FilterSpec::second_order(f.a2, f.a1);
    }
    raise(Errc::invalid_argument, "unknown filter kind");
}

AdrcGains gains_from(const adrceq_gains& g) {
    AdrcGains out;
    out.n = g.n;
    out.k = {g.k[0], g.k[1]};
    out.l = {g.l[0], g.l[1], g.l[2]};
    out.b0 = g.b0;
    out.validate();
    return out;
}

PidParams pid_from(const adrceq_pid& p) {
    PidParams out;
    out.Kp = p.kp;
    out.Ki = p.ki;
    out.Kd = p.kd;
    out.beta = p.beta;
    out.Fy = filter_from(p.fy);
    out.Fr = filter_from(p.fr);
    return out;
}

adrceq_status copy_out(const std::vector<double>& src, double* buf, size_t cap, size_t* len) {
    if (len) *len = src.size();
    if (buf) {
        const size_t n = std::min(cap, src.size());
        std::memcpy(buf, src.data(), n * sizeof(double));
    }
    return ADRCEQ_OK;
}

adrceq_status copy_string(const std::string& s, char* buf, size_t cap, size_t* len) {
    if (len) *len = s.size();
    if (buf && cap > 0) {
        const size_t n = std::min(cap - 1, s.size());
        std::memcpy(buf, s.data(), n);
        buf[n] = '\0';
    }
    return ADRCEQ_OK;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) raise(Errc::invalid_argument, "allocation failed");
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* adrceq_last_error(void) { return g_last_error.c_str(); }

const char* adrceq_version(void) { return "1.0.0"; }

adrceq_status adrceq_tf_create_continuous(const double* num, size_t num_len, const double* den,
                                          size_t den_len, double delay_s, adrceq_tf** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_tf{
            RationalTF::continuous(poly_from(num, num_len), poly_from(den, den_len), delay_s)};
    });
}

adrceq_status adrceq_tf_create_discrete(const double* num, size_t num_len, const double* den,
                                        size_t den_len, double ts_s, adrceq_tf** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_tf{
            RationalTF::discrete(poly_from(num, num_len), poly_from(den, den_len), ts_s)};
    });
}

void adrceq_tf_free(adrceq_tf* tf) { delete tf; }

adrceq_status adrceq_tf_clone(const adrceq_tf* tf, adrceq_tf** out) {
    if (auto s = require(tf && out, "tf and out must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{tf->tf}; });
}

adrceq_status adrceq_tf_num(const adrceq_tf* tf, double* buf, size_t cap, size_t* len) {
    if (auto s = require(tf != nullptr, "tf must not be NULL")) return s;
    return copy_out(tf->tf.num().coeffs(), buf, cap, len);
}

adrceq_status adrceq_tf_den(const adrceq_tf* tf, double* buf, size_t cap, size_t* len) {
    if (auto s = require(tf != nullptr, "tf must not be NULL")) return s;
    return copy_out(tf->tf.den().coeffs(), buf, cap, len);
}

adrceq_status adrceq_tf_delay(const adrceq_tf* tf, double* delay_s) {
    if (auto s = require(tf && delay_s, "tf and delay_s must not be NULL")) return s;
    *delay_s = tf->tf.delay();
    return ADRCEQ_OK;
}

adrceq_status adrceq_tf_sample_time(const adrceq_tf* tf, double* ts_s) {
    if (auto s = require(tf && ts_s, "tf and ts_s must not be NULL")) return s;
    *ts_s = tf->tf.sample_time();
    return ADRCEQ_OK;
}

adrceq_status adrceq_tf_series(const adrceq_tf* g, const adrceq_tf* h, adrceq_tf** out) {
    if (auto s = require(g && h && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{tf_series(g->tf, h->tf)}; });
}

adrceq_status adrceq_tf_feedback(const adrceq_tf* g, const adrceq_tf* h, adrceq_tf** out) {
    if (auto s = require(g && h && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{tf_feedback(g->tf, h->tf).as_rational()}; });
}

adrceq_status adrceq_tf_inverse(const adrceq_tf* g, adrceq_tf** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{tf_inverse(g->tf)}; });
}

adrceq_status adrceq_tf_freq_eval(const adrceq_tf* g, const double* omegas, size_t n, double* re,
                                  double* im) {
    if (auto s = require(g && omegas && re && im, "arguments must not be NULL")) return s;
    return guarded([&] {
        for (size_t i = 0; i < n; ++i) {
            const std::complex<double> v = g->tf.eval_at(omegas[i]);
            re[i] = v.real();
            im[i] = v.imag();
        }
    });
}

adrceq_status adrceq_tf_dc_gain(const adrceq_tf* g, double* value, int* is_inf) {
    if (auto s = require(g && value && is_inf, "arguments must not be NULL")) return s;
    return guarded([&] {
        const DcGain dc = dc_gain(g->tf);
        *value = dc.value;
        *is_inf = dc.infinite ? 1 : 0;
    });
}

adrceq_status adrceq_tf_to_string(const adrceq_tf* g, char* buf, size_t cap, size_t* len) {
    if (auto s = require(g != nullptr, "tf must not be NULL")) return s;
    return guarded([&] { copy_string(tf_to_string(g->tf), buf, cap, len); });
}

adrceq_status adrceq_bandwidth_tune(int n, double omega_cl_rad_s, double k_eso, double b0,
                                    adrceq_gains* out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        const AdrcGains g = bandwidth_tune(n, omega_cl_rad_s, k_eso, b0);
        *out = adrceq_gains{g.n, {g.k[0], g.k[1]}, {g.l[0], g.l[1], g.l[2]}, g.b0};
    });
}

adrceq_status adrceq_pid_from_adrc(const adrceq_gains* g, adrceq_pid* out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        const PidParams p = pid_from_adrc(gains_from(*g));
        *out = adrceq_pid{};
        out->kp = p.Kp;
        out->ki = p.Ki;
        out->kd = p.Kd;
        out->beta = p.beta;
        out->fy.kind = ADRCEQ_FILTER_UNITY;
        out->fr.kind = ADRCEQ_FILTER_UNITY;
    });
}

adrceq_status adrceq_build_pid_fb(const adrceq_pid* p, adrceq_tf** out) {
    if (auto s = require(p && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{build_pid_fb(pid_from(*p))}; });
}

adrceq_status adrceq_build_pid_pf(const adrceq_pid* p, adrceq_tf** out) {
    if (auto s = require(p && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{build_pid_pf(pid_from(*p))}; });
}

adrceq_status adrceq_build_eadrc_fb(const adrceq_gains* g, adrceq_tf** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{build_eadrc_fb(gains_from(*g))}; });
}

adrceq_status adrceq_build_eadrc_fb_general(const adrceq_gains* g, adrceq_tf** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{build_eadrc_fb_general(gains_from(*g))}; });
}

adrceq_status adrceq_build_ceq(const adrceq_gains* g, const adrceq_filter* fy, adrceq_tf** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        const FilterSpec f = fy ? filter_from(*fy) : FilterSpec::unity();
        *out = new adrceq_tf{build_ceq(gains_from(*g), f)};
    });
}

adrceq_status adrceq_make_controller(adrceq_controller_kind kind, int dof,
                                     const adrceq_gains* gains_or_null,
                                     const adrceq_pid* pid_or_null, adrceq_controller** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        ControllerKind k = kind == ADRCEQ_CONTROLLER_PI    ? ControllerKind::pi
                           : kind == ADRCEQ_CONTROLLER_PID ? ControllerKind::pid
                                                           : ControllerKind::eadrc;
        std::optional<AdrcGains> g;
        if (gains_or_null) g = gains_from(*gains_or_null);
        std::optional<PidParams> p;
        if (pid_or_null) p = pid_from(*pid_or_null);
        *out = new adrceq_controller{
            make_controller(k, dof, g ? &*g : nullptr, p ? &*p : nullptr)};
    });
}

void adrceq_controller_free(adrceq_controller* c) { delete c; }

adrceq_status adrceq_controller_prefilter(const adrceq_controller* c, adrceq_tf** out) {
    if (auto s = require(c && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{c->ctrl.prefilter}; });
}

adrceq_status adrceq_controller_feedback(const adrceq_controller* c, adrceq_tf** out) {
    if (auto s = require(c && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{c->ctrl.feedback}; });
}

adrceq_status adrceq_controller_label(const adrceq_controller* c, char* buf, size_t cap,
                                      size_t* len) {
    if (auto s = require(c != nullptr, "controller must not be NULL")) return s;
    return copy_string(c->ctrl.label, buf, cap, len);
}

adrceq_status adrceq_crib_sheet_text(const adrceq_gains* g, const adrceq_pid* pid, char** out) {
    if (auto s = require(g && pid && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = dup_string(crib_sheet(gains_from(*g), pid_from(*pid)).to_text()); });
}

adrceq_status adrceq_crib_sheet_json(const adrceq_gains* g, const adrceq_pid* pid, char** out) {
    if (auto s = require(g && pid && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = dup_string(crib_sheet(gains_from(*g), pid_from(*pid)).to_json()); });
}

void adrceq_string_free(char* s) { std::free(s); }

adrceq_status adrceq_response_from_tf(const char* label, const adrceq_tf* tf,
                                      adrceq_response** out) {
    if (auto s = require(label && tf && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_response{LabeledResponse::from_tf(label, tf->tf)}; });
}

adrceq_status adrceq_response_from_channel(const char* label, const adrceq_tf* plant,
                                           const adrceq_controller* controller,
                                           adrceq_channel_kind kind, adrceq_response** out) {
    if (auto s = require(label && plant && controller && out, "arguments must not be NULL"))
        return s;
    return guarded([&] {
        LoopAssembly asm_{plant->tf, controller->ctrl};
        ChannelResponse ch = kind == ADRCEQ_CHANNEL_YD   ? channel_yd(asm_)
                             : kind == ADRCEQ_CHANNEL_UN ? channel_un(asm_)
                                                         : channel_er(asm_);
        *out = new adrceq_response{LabeledResponse::from_channel(label, ch)};
    });
}

void adrceq_response_free(adrceq_response* r) { delete r; }

adrceq_status adrceq_response_eval(const adrceq_response* r, const double* omegas, size_t n,
                                   double* re, double* im) {
    if (auto s = require(r && omegas && re && im, "arguments must not be NULL")) return s;
    return guarded([&] {
        for (size_t i = 0; i < n; ++i) {
            const std::complex<double> v = r->resp.eval(omegas[i]);
            re[i] = v.real();
            im[i] = v.imag();
        }
    });
}

adrceq_status adrceq_ms_index(const adrceq_tf* plant, const adrceq_controller* controller,
                              double lo_rad_s, double hi_rad_s, double* ms, double* omega_peak) {
    if (auto s = require(plant && controller && ms && omega_peak, "arguments must not be NULL"))
        return s;
    return guarded([&] {
        LoopAssembly asm_{plant->tf, controller->ctrl};
        const MsResult r = ms_index(asm_, lo_rad_s, hi_rad_s);
        *ms = r.ms;
        *omega_peak = r.omega_peak;
    });
}

adrceq_status adrceq_bode_csv(const adrceq_response* const* responses, size_t n, double lo_rad_s,
                              double hi_rad_s, int n_points, char** out_csv) {
    if (auto s = require(responses && out_csv, "arguments must not be NULL")) return s;
    return guarded([&] {
        std::vector<LabeledResponse> rs;
        for (size_t i = 0; i < n; ++i) {
            if (!responses[i]) raise(Errc::invalid_argument, "NULL response in list");
            rs.push_back(responses[i]->resp);
        }
        *out_csv = dup_string(bode_export(rs, lo_rad_s, hi_rad_s, n_points).to_csv());
    });
}

adrceq_status adrceq_audit_create(adrceq_audit** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_audit{}; });
}

void adrceq_audit_free(adrceq_audit* a) { delete a; }

adrceq_status adrceq_audit_text(const adrceq_audit* a, char** out) {
    if (auto s = require(a && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = dup_string(a->log.to_text()); });
}

adrceq_status adrceq_audit_write_file(const adrceq_audit* a, const char* path) {
    if (auto s = require(a && path, "arguments must not be NULL")) return s;
    return guarded([&] { a->log.write_file(path); });
}

adrceq_status adrceq_euler_discretize(const adrceq_tf* g, double ts_s, adrceq_tf** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{euler_discretize(g->tf, ts_s)}; });
}

adrceq_status adrceq_discrete_from_tf(const adrceq_tf* tf, adrceq_discrete** out) {
    if (auto s = require(tf && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_discrete{DiscreteController::from_tf(tf->tf)}; });
}

adrceq_status adrceq_pid_z(const adrceq_pid* p, double ts_s, adrceq_audit* audit_or_null,
                           adrceq_discrete** out) {
    if (auto s = require(p && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_discrete{
            pid_z(pid_from(*p), ts_s, audit_or_null ? &audit_or_null->log : nullptr)};
    });
}

adrceq_status adrceq_eadrc_fb_z(const adrceq_gains* g, double ts_s, adrceq_audit* audit_or_null,
                                adrceq_discrete** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_discrete{
            eadrc_fb_z(gains_from(*g), ts_s, audit_or_null ? &audit_or_null->log : nullptr)};
    });
}

adrceq_status adrceq_ceq2_z(const adrceq_gains* g, double tf_s, double ts_s,
                            adrceq_audit* audit_or_null, adrceq_discrete** out) {
    if (auto s = require(g && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_discrete{
            ceq2_z(gains_from(*g), tf_s, ts_s, audit_or_null ? &audit_or_null->log : nullptr)};
    });
}

adrceq_status adrceq_eadrc_pf_z(const adrceq_gains* g, const adrceq_pid* pid, double beta,
                                double tr_s, double ts_s, adrceq_audit* audit_or_null,
                                adrceq_discrete** out) {
    if (auto s = require(g && pid && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_discrete{eadrc_pf_z(gains_from(*g), pid_from(*pid), beta, tr_s, ts_s,
                                              audit_or_null ? &audit_or_null->log : nullptr)};
    });
}

void adrceq_discrete_free(adrceq_discrete* d) { delete d; }

adrceq_status adrceq_discrete_step(adrceq_discrete* d, double input, double* output) {
    if (auto s = require(d && output, "arguments must not be NULL")) return s;
    return guarded([&] { *output = d->ctrl.step(input); });
}

adrceq_status adrceq_discrete_reset(adrceq_discrete* d) {
    if (auto s = require(d != nullptr, "d must not be NULL")) return s;
    return guarded([&] { d->ctrl.reset(); });
}

adrceq_status adrceq_discrete_tf(const adrceq_discrete* d, adrceq_tf** out) {
    if (auto s = require(d && out, "arguments must not be NULL")) return s;
    return guarded([&] { *out = new adrceq_tf{d->ctrl.tf()}; });
}

adrceq_status adrceq_quantize(const adrceq_discrete* d, int frac_bits, adrceq_discrete** out) {
    if (auto s = require(d && out, "arguments must not be NULL")) return s;
    return guarded([&] {
        QFormat q;
        q.frac_bits = frac_bits;
        *out = new adrceq_discrete{quantize_controller(d->ctrl, q)};
    });
}

adrceq_status adrceq_scenario_one(adrceq_scn1_variant variant, double tf_s, uint64_t seed,
                                  adrceq_scenario** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        Scenario1Variant v = variant == ADRCEQ_SCN1_PID     ? Scenario1Variant::pid
                             : variant == ADRCEQ_SCN1_EADRC ? Scenario1Variant::eadrc
                                                            : Scenario1Variant::pid_plus_ceq2;
        *out = new adrceq_scenario{scenario_one(v, tf_s, seed)};
    });
}

adrceq_status adrceq_scenario_two(adrceq_scn2_variant variant, double tr_s, uint64_t seed,
                                  adrceq_scenario** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        Scenario2Variant v = variant == ADRCEQ_SCN2_EADRC_1DOF ? Scenario2Variant::eadrc_1dof
                                                               : Scenario2Variant::eadrc_2dof;
        *out = new adrceq_scenario{scenario_two(v, tr_s, seed)};
    });
}

adrceq_status adrceq_scenario_transient(int n, int kind, int dof, double beta, uint64_t seed,
                                        adrceq_scenario** out) {
    if (auto s = require(out != nullptr, "out must not be NULL")) return s;
    return guarded([&] {
        *out = new adrceq_scenario{transient_bench_scenario(
            n, kind == 0 ? TransientKind::standard : TransientKind::eadrc, dof, beta, seed)};
    });
}

void adrceq_scenario_free(adrceq_scenario* s) { delete s; }

adrceq_status adrceq_scenario_set_t_end(adrceq_scenario* s, double t_end_s) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    if (auto st = require(t_end_s > 0.0, "t_end must be > 0")) return st;
    s->sc.t_end = t_end_s;
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_set_substeps(adrceq_scenario* s, int substeps) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    if (auto st = require(substeps >= 1, "substeps must be >= 1")) return st;
    s->sc.substeps = substeps;
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_set_noise_enabled(adrceq_scenario* s, int enabled) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    if (!enabled && s->sc.noise.Pn > 0.0) {
        s->sc.noise.t_on = 2.0 * s->sc.t_end + 1.0;
    } else if (enabled) {
        s->sc.noise.t_on = std::min(s->sc.noise.t_on, s->sc.t_end);
    }
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_set_seed(adrceq_scenario* s, uint64_t seed) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    s->sc.noise.seed = seed;
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_clear_disturbance(adrceq_scenario* s) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    s->sc.disturbance.segments.clear();
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_add_step_disturbance(adrceq_scenario* s, double t_s, double level) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    return guarded([&] { s->sc.disturbance.push(DisturbanceSegment::step_at(t_s, level)); });
}

adrceq_status adrceq_scenario_add_sine_disturbance(adrceq_scenario* s, double t_s, double amp,
                                                   double freq_hz) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    return guarded([&] { s->sc.disturbance.push(DisturbanceSegment::sine_at(t_s, amp, freq_hz)); });
}

adrceq_status adrceq_scenario_label(const adrceq_scenario* s, char* buf, size_t cap, size_t* len) {
    if (auto st = require(s != nullptr, "s must not be NULL")) return st;
    return copy_string(s->sc.label, buf, cap, len);
}

adrceq_status adrceq_scenario_reference_window(const adrceq_scenario* s, double* t0_s,
                                               double* t1_s) {
    if (auto st = require(s && t0_s && t1_s, "arguments must not be NULL")) return st;
    *t0_s = s->sc.reference_window.t0;
    *t1_s = std::min(s->sc.reference_window.t1, s->sc.t_end);
    return ADRCEQ_OK;
}

adrceq_status adrceq_scenario_audit_text(const adrceq_scenario* s, char** out) {
    if (auto st = require(s && out, "arguments must not be NULL")) return st;
    return guarded([&] { *out = dup_string(s->sc.audit.to_text()); });
}

adrceq_status adrceq_run(const adrceq_scenario* s, adrceq_trace** out) {
    if (auto st = require(s && out, "arguments must not be NULL")) return st;
    return guarded([&] { *out = new adrceq_trace{run_closed_loop(s->sc)}; });
}

void adrceq_trace_free(adrceq_trace* t) { delete t; }

adrceq_status adrceq_trace_len(const adrceq_trace* t, size_t* len) {
    if (auto st = require(t && len, "arguments must not be NULL")) return st;
    *len = t->tr.t.size();
    return ADRCEQ_OK;
}

adrceq_status adrceq_trace_col_copy(const adrceq_trace* t, adrceq_trace_col col, double* buf,
                                    size_t cap, size_t* len) {
    if (auto st = require(t != nullptr, "trace must not be NULL")) return st;
    const std::vector<double>* src = nullptr;
    switch (col) {
        case ADRCEQ_COL_T: src = &t->tr.t; break;
        case ADRCEQ_COL_R: src = &t->tr.r; break;
        case ADRCEQ_COL_Y: src = &t->tr.y; break;
        case ADRCEQ_COL_Y_MEAS: src = &t->tr.y_meas; break;
        case ADRCEQ_COL_U: src = &t->tr.u; break;
        case ADRCEQ_COL_E: src = &t->tr.e; break;
        case ADRCEQ_COL_D: src = &t->tr.d; break;
    }
    if (auto st = require(src != nullptr, "unknown trace column")) return st;
    return copy_out(*src, buf, cap, len);
}

adrceq_status adrceq_trace_csv(const adrceq_trace* t, char** out) {
    if (auto st = require(t && out, "arguments must not be NULL")) return st;
    return guarded([&] { *out = dup_string(t->tr.to_csv()); });
}

adrceq_status adrceq_trace_svg(const adrceq_trace* t, const char* title, char** out) {
    if (auto st = require(t && title && out, "arguments must not be NULL")) return st;
    return guarded([&] {
        std::vector<PlotSeries> series{{"r", &t->tr.t, &t->tr.r},
                                       {"y", &t->tr.t, &t->tr.y},
                                       {"u", &t->tr.t, &t->tr.u}};
        *out = dup_string(render_line_plot(title, "t [s]", "signal", series));
    });
}

adrceq_status adrceq_compute_metrics(const adrceq_trace* t, double window_t0_s, double window_t1_s,
                                     adrceq_metrics* out) {
    if (auto st = require(t && out, "arguments must not be NULL")) return st;
    return guarded([&] {
        const Metrics m = compute_metrics(t->tr, MetricWindow{window_t0_s, window_t1_s});
        *out = adrceq_metrics{m.iae, m.overshoot_pct, m.u_peak, m.steady_state_error,
                              m.rise_time_s};
    });
}

adrceq_status adrceq_plant_gp1(adrceq_tf** out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    return guarded([&] { *out = new adrceq_tf{plant_gp1()}; });
}

adrceq_status adrceq_plant_gp2(adrceq_tf** out) {
    if (auto st = require(out != nullptr, "out must not be NULL")) return st;
    return guarded([&] { *out = new adrceq_tf{plant_gp2()}; });
}

} // extern "C"
