#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rational_tf.hpp"
#include "synth/synth.hpp"

namespace adrceq {

/// Euler substitution s = (z-1)/Ts with the common Ts powers cleared.
/// Proper iff the input is proper; rejects TFs with transport delay.
RationalTF euler_discretize(const RationalTF& g, double Ts);

/// 64-bit fixed point with frac_bits fractional bits, round-half-to-even,
/// saturation at the int64 bounds.
struct QFormat {
    static constexpr int total_bits = 64;
    int frac_bits = 40;

    void validate() const;
    std::int64_t quantize_raw(double x) const;      // saturating
    bool saturates(double x) const;
    double quantize(double x) const;                // round-trip through raw
    std::int64_t mul(std::int64_t a, std::int64_t b) const;
    static std::int64_t add(std::int64_t a, std::int64_t b);
    double to_double(std::int64_t raw) const;
};

/// One verbatim-vs-oracle comparison from a closed-form discrete builder.
struct AuditRecord {
    std::string builder;
    double Ts = 0.0;
    std::vector<double> verbatim_num, verbatim_den;
    std::vector<double> oracle_num, oracle_den;
    double max_rel_coeff_dev = 0.0; // after leading-den normalization
};

class AuditLog {
public:
    void append(AuditRecord rec) { records_.push_back(std::move(rec)); }
    const std::vector<AuditRecord>& records() const { return records_; }
    std::string to_text() const;
    void write_file(const std::string& path) const;

private:
    std::vector<AuditRecord> records_;
};

/// Cascade of direct-form-II-transposed sections. Stateful stepper: one
/// instance per signal path, not shareable across threads.
class DiscreteController {
public:
    struct Section {
        std::vector<double> num; // ascending in z, padded to den size
        std::vector<double> den; // ascending in z, leading coefficient 1
    };
    struct RawSection {
        Polynomial num;
        Polynomial den;
    };

    DiscreteController() = default;
    DiscreteController(std::vector<RawSection> sections, double Ts, std::string label);

    static DiscreteController from_tf(const RationalTF& tf, std::string label = {});

    double step(double input);
    void reset();

    const std::vector<Section>& sections() const { return sections_; }
    double sample_time() const { return Ts_; }
    const std::string& label() const { return label_; }
    bool quantized() const { return quant_.has_value(); }
    const std::optional<QFormat>& qformat() const { return quant_; }

    /// Transfer function of the whole cascade, exactly as built (the stepper
    /// runs on leading-coefficient-normalized sections; quantized controllers
    /// report the quantized coefficients).
    const RationalTF& tf() const { return tf_; }

    /// Audit record attached by the closed-form builders, if any.
    const std::optional<AuditRecord>& audit() const { return audit_; }
    void set_audit(AuditRecord rec) { audit_ = std::move(rec); }

    friend DiscreteController quantize_controller(const DiscreteController& c, const QFormat& q);

private:
    std::vector<Section> sections_;
    RationalTF tf_;
    double Ts_ = 0.0;
    std::string label_;
    std::optional<AuditRecord> audit_;

    // double-precision state, one vector per section
    std::vector<std::vector<double>> state_;
    // fixed-point mirror used when quant_ is set
    std::optional<QFormat> quant_;
    std::vector<std::vector<std::int64_t>> qnum_, qden_;
    std::vector<std::vector<std::int64_t>> qstate_;
};

/// Discrete PID feedback controller with first-order output filter.
/// Coefficients come from Euler substitution of the continuous (Kd s^2 +
/// Kp s + Ki)/s * 1/(Tf s + 1); the printed closed-form coefficient table is
/// evaluated verbatim alongside and the difference is recorded in `audit`.
DiscreteController pid_z(const PidParams& p, double Ts, AuditLog* audit = nullptr);

/// Discrete second-order error-driven feedback controller, realized as a
/// quadratic section cascaded with an exact 1/(z-1) integrator section so the
/// z=1 root survives quantization.
DiscreteController eadrc_fb_z(const AdrcGains& g, double Ts, AuditLog* audit = nullptr);

/// Discrete equivalence factor for n=2 with first-order output filter Tf.
DiscreteController ceq2_z(const AdrcGains& g, double Tf, double Ts, AuditLog* audit = nullptr);

/// Discrete 2DOF prefilter for n=2 with first-order reference filter Tr.
DiscreteController eadrc_pf_z(const AdrcGains& g, const PidParams& pid, double beta, double Tr,
                              double Ts, AuditLog* audit = nullptr);

/// Copy with coefficients and all stepper arithmetic in the given Q format.
/// Throws Errc::overflow if any coefficient saturates at load time.
DiscreteController quantize_controller(const DiscreteController& c, const QFormat& q);

/// Max relative frequency-response deviation between two discrete TFs over a
/// log grid (relative to |b|).
double max_freq_rel_dev(const RationalTF& a, const RationalTF& b, double lo, double hi,
                        int n_points);

} // namespace adrceq
