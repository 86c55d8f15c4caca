#include "analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace adrceq {

namespace {

double sensitivity_mag(const RationalTF& plant, const RationalTF& cfb, double omega) {
    const std::complex<double> loop = cfb.eval_at(omega) * plant.eval_at(omega);
    const double denom = std::abs(1.0 + loop);
    if (denom < 1e-12)
        raise(Errc::unstable_evaluation, "loop on stability boundary: |1+L| < 1e-12 at omega=" +
                                             std::to_string(omega));
    return 1.0 / denom;
}

} // namespace

MsResult ms_index(const LoopAssembly& asm_, double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo)) raise(Errc::invalid_argument, "need 0 < lo < hi");
    constexpr int kGridPoints = 2000;
    const std::vector<double> grid = log_grid(lo, hi, kGridPoints);
    const RationalTF& plant = asm_.plant;
    const RationalTF& cfb = asm_.controller.feedback;

    double best = 0.0;
    int best_i = 0;
    for (int i = 0; i < kGridPoints; ++i) {
        const double v = sensitivity_mag(plant, cfb, grid[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }

    // Golden-section refinement on log-frequency around the discrete argmax.
    double a = std::log(grid[std::max(0, best_i - 1)]);
    double b = std::log(grid[std::min(kGridPoints - 1, best_i + 1)]);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = sensitivity_mag(plant, cfb, std::exp(c));
    double fd = sensitivity_mag(plant, cfb, std::exp(d));
    // the gap in log-frequency is the relative frequency tolerance
    while ((b - a) > 1e-4) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sensitivity_mag(plant, cfb, std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sensitivity_mag(plant, cfb, std::exp(d));
        }
    }
    const double wref = std::exp(0.5 * (a + b));
    const double fref = sensitivity_mag(plant, cfb, wref);

    MsResult out;
    if (fref >= best) {
        out.ms = fref;
        out.omega_peak = wref;
    } else {
        out.ms = best;
        out.omega_peak = grid[best_i];
    }
    char note[160];
    std::snprintf(note, sizeof note,
                  "2000-point log grid on [%g, %g] rad/s, golden-section refinement to 1e-4 relative",
                  lo, hi);
    out.grid = note;
    return out;
}

ChannelResponse::ChannelResponse(Kind kind, RationalTF plant, RationalTF cfb, RationalTF cpf)
    : kind_(kind), plant_(std::move(plant)), cfb_(std::move(cfb)), cpf_(std::move(cpf)) {}

std::complex<double> ChannelResponse::eval_at(double omega) const {
    const std::complex<double> gp = plant_.eval_at(omega);
    const std::complex<double> c = cfb_.eval_at(omega);
    const std::complex<double> den = 1.0 + c * gp;
    switch (kind_) {
        case Kind::yd: return gp / den;
        case Kind::un: return -c / den;
        case Kind::er: return 1.0 - cpf_.eval_at(omega) * c * gp / den;
    }
    return 0.0;
}

FrequencyResponse ChannelResponse::freq_eval(const std::vector<double>& omegas) const {
    FrequencyResponse out;
    out.omegas = omegas;
    out.values.reserve(omegas.size());
    for (double w : omegas) out.values.push_back(eval_at(w));
    return out;
}

RationalTF ChannelResponse::as_rational() const {
    if (has_delay())
        raise(Errc::has_delay, "channel with plant delay has no rational form");
    const Polynomial closed = poly_add(poly_mul(plant_.den(), cfb_.den()),
                                       poly_mul(plant_.num(), cfb_.num()));
    switch (kind_) {
        case Kind::yd:
            return RationalTF::continuous(poly_mul(plant_.num(), cfb_.den()), closed);
        case Kind::un:
            return RationalTF::continuous(poly_scale(poly_mul(cfb_.num(), plant_.den()), -1.0),
                                          closed);
        case Kind::er: {
            // 1 - C_PF * C_FB G_P / (1 + C_FB G_P)
            const Polynomial t_num = poly_mul(plant_.num(), cfb_.num());
            const Polynomial num = poly_add(
                poly_mul(closed, cpf_.den()),
                poly_scale(poly_mul(t_num, cpf_.num()), -1.0));
            return RationalTF::continuous(num, poly_mul(closed, cpf_.den()));
        }
    }
    raise(Errc::invalid_argument, "unknown channel kind");
}

static void check_assembly(const LoopAssembly& asm_) {
    if (!asm_.plant.is_continuous() || !asm_.controller.feedback.is_continuous())
        raise(Errc::domain_mismatch, "loop assembly requires continuous plant and controller");
}

ChannelResponse channel_yd(const LoopAssembly& asm_) {
    check_assembly(asm_);
    return ChannelResponse(ChannelResponse::Kind::yd, asm_.plant, asm_.controller.feedback,
                           asm_.controller.prefilter);
}

ChannelResponse channel_un(const LoopAssembly& asm_) {
    check_assembly(asm_);
    return ChannelResponse(ChannelResponse::Kind::un, asm_.plant, asm_.controller.feedback,
                           asm_.controller.prefilter);
}

ChannelResponse channel_er(const LoopAssembly& asm_) {
    check_assembly(asm_);
    return ChannelResponse(ChannelResponse::Kind::er, asm_.plant, asm_.controller.feedback,
                           asm_.controller.prefilter);
}

LabeledResponse LabeledResponse::from_tf(const std::string& label, const RationalTF& tf) {
    return {label, [tf](double w) { return tf.eval_at(w); }};
}

LabeledResponse LabeledResponse::from_channel(const std::string& label,
                                              const ChannelResponse& ch) {
    return {label, [ch](double w) { return ch.eval_at(w); }};
}

BodeDataset bode_export(const std::vector<LabeledResponse>& responses, double lo, double hi,
                        int n_points) {
    if (n_points < 2) raise(Errc::invalid_argument, "bode export needs n_points >= 2");
    std::set<std::string> seen;
    for (const auto& r : responses)
        if (!seen.insert(r.label).second)
            raise(Errc::duplicate_label, "duplicate label '" + r.label + "'");
    BodeDataset out;
    out.omega = log_grid(lo, hi, n_points);
    for (const auto& r : responses) {
        out.labels.push_back(r.label);
        std::vector<std::complex<double>> col;
        col.reserve(out.omega.size());
        for (double w : out.omega) col.push_back(r.eval(w));
        out.values.push_back(std::move(col));
    }
    return out;
}

std::string BodeDataset::to_csv() const {
    std::ostringstream os;
    os << "omega_rad_s";
    for (const auto& l : labels) os << "," << l << "_mag_db," << l << "_phase_deg";
    os << "\n";
    char buf[48];
    for (std::size_t i = 0; i < omega.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", omega[i]);
        os << buf;
        for (std::size_t c = 0; c < values.size(); ++c) {
            const std::complex<double> v = values[c][i];
            std::snprintf(buf, sizeof buf, "%.12g", 20.0 * std::log10(std::abs(v)));
            os << "," << buf;
            std::snprintf(buf, sizeof buf, "%.12g", std::arg(v) * 180.0 / M_PI);
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace adrceq
