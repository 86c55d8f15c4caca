#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/rational_tf.hpp"
#include "synth/synth.hpp"

namespace adrceq {

struct LoopAssembly {
    RationalTF plant; // may carry transport delay
    TwoDofController controller;
};

struct MsResult {
    double ms = 1.0;
    double omega_peak = 0.0;
    std::string grid; // description of search grid and refinement
};

/// Peak of |1/(1 + C_FB(jw) G_P(jw))| over a 2000-point log grid on
/// [lo, hi], refined around the discrete argmax by golden-section search to
/// relative frequency tolerance 1e-4. Delay in the plant is evaluated
/// exactly.
MsResult ms_index(const LoopAssembly& asm_, double lo = 1e-3, double hi = 1e3);

/// Closed-loop channel, evaluable at any frequency; rational form available
/// only when the plant carries no delay.
class ChannelResponse {
public:
    enum class Kind { yd, un, er };

    ChannelResponse(Kind kind, RationalTF plant, RationalTF cfb, RationalTF cpf);

    std::complex<double> eval_at(double omega) const;
    FrequencyResponse freq_eval(const std::vector<double>& omegas) const;

    bool has_delay() const { return plant_.delay() > 0.0; }
    /// Multiplied-out rational TF; throws Errc::has_delay when factored-only.
    RationalTF as_rational() const;

    Kind kind() const { return kind_; }

private:
    Kind kind_;
    RationalTF plant_, cfb_, cpf_;
};

/// Disturbance (at plant input) to output: G_P/(1 + C_FB G_P).
ChannelResponse channel_yd(const LoopAssembly& asm_);
/// Measurement noise to control signal: -C_FB/(1 + C_FB G_P).
ChannelResponse channel_un(const LoopAssembly& asm_);
/// Reference to tracking error: 1 - C_PF C_FB G_P/(1 + C_FB G_P).
ChannelResponse channel_er(const LoopAssembly& asm_);

struct LabeledResponse {
    std::string label;
    std::function<std::complex<double>(double)> eval;

    static LabeledResponse from_tf(const std::string& label, const RationalTF& tf);
    static LabeledResponse from_channel(const std::string& label, const ChannelResponse& ch);
};

struct BodeDataset {
    std::vector<double> omega;
    std::vector<std::string> labels;
    std::vector<std::vector<std::complex<double>>> values; // [label][row]

    /// CSV with header omega_rad_s,<label>_mag_db,<label>_phase_deg,...
    /// 12 significant digits.
    std::string to_csv() const;
};

BodeDataset bode_export(const std::vector<LabeledResponse>& responses, double lo, double hi,
                        int n_points);

} // namespace adrceq
