#ifndef COWU_CORE_HPP
#define COWU_CORE_HPP

// Core domain types for the pull/push coexistence MAC model: system
// parameters, query ranges, the observation model and the frame split
// controlled by the reservation ratio alpha.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cowu {

inline constexpr const char* kVersion = "0.1.0";

/// Protocol, population and radio parameters shared by analysis and
/// simulation. Defaults follow the common evaluation setup: 3.2 ms slots,
/// 55/50 mW transmit/receive power, p = 0.0606, observations on [0, 1].
struct SystemConfig {
    int n_pull = 25;              ///< number of pull (wake-up) nodes N_w
    int n_push = 25;              ///< number of push nodes N_u
    int slots_per_frame = 50;     ///< uplink slots per frame L
    double slot_duration = 3.2e-3;  ///< T_s [s]
    double tx_prob = 0.0606;      ///< per-slot transmission probability p
    double arrival_rate = 0.0;    ///< push Poisson rate lambda [packets/slot]
    double power_tx = 55e-3;      ///< xi_T [W]
    double power_rx = 50e-3;      ///< xi_R [W]
    double v_min = 0.0;           ///< observation support lower edge
    double v_max = 1.0;           ///< observation support upper edge

    void validate() const {
        if (n_pull < 0) throw std::invalid_argument("n_pull must be >= 0");
        if (n_push < 0) throw std::invalid_argument("n_push must be >= 0");
        if (slots_per_frame < 1)
            throw std::invalid_argument("slots_per_frame must be >= 1");
        if (!(slot_duration > 0.0))
            throw std::invalid_argument("slot_duration must be > 0");
        if (!(tx_prob > 0.0) || tx_prob > 1.0)
            throw std::invalid_argument("tx_prob must be in (0, 1]");
        if (!(arrival_rate >= 0.0))
            throw std::invalid_argument("arrival_rate must be >= 0");
        if (!(power_tx > 0.0)) throw std::invalid_argument("power_tx must be > 0");
        if (!(power_rx > 0.0)) throw std::invalid_argument("power_rx must be > 0");
        if (!(v_min < v_max))
            throw std::invalid_argument("observation support requires v_min < v_max");
    }
};

/// Content range [lower, upper] embedded in the wake-up signal.
struct QueryRange {
    double lower = 0.0;
    double upper = 1.0;
};

/// Distribution of the per-node observed value. Holds the CDF in closed
/// form plus a quantile function so the simulator can sample from it.
/// Ships with the uniform special case; any other distribution plugs in
/// through the general constructor.
class ObservationModel {
public:
    using Func = std::function<double(double)>;

    ObservationModel(double v_min, double v_max, Func cdf, Func quantile)
        : v_min_(v_min), v_max_(v_max),
          cdf_(std::move(cdf)), quantile_(std::move(quantile)) {
        if (!(v_min_ < v_max_))
            throw std::invalid_argument("observation support requires v_min < v_max");
    }

    static ObservationModel uniform(double v_min, double v_max) {
        const double span = v_max - v_min;
        return ObservationModel(
            v_min, v_max,
            [v_min, v_max, span](double v) {
                if (v <= v_min) return 0.0;
                if (v >= v_max) return 1.0;
                return (v - v_min) / span;
            },
            [v_min, span](double u) { return v_min + u * span; });
    }

    static ObservationModel uniform(const SystemConfig& cfg) {
        return uniform(cfg.v_min, cfg.v_max);
    }

    double v_min() const { return v_min_; }
    double v_max() const { return v_max_; }
    double cdf(double v) const { return cdf_(v); }
    /// Inverse CDF; maps a uniform(0,1) draw to an observed value.
    double quantile(double u) const { return quantile_(u); }

private:
    double v_min_;
    double v_max_;
    Func cdf_;
    Func quantile_;
};

/// Partition of the L uplink slots into tau_w reserved pull slots
/// {1, ..., floor(alpha L)} and tau_u = L - tau_w shared slots.
struct FrameSplit {
    double alpha = 0.0;
    int reserved_len = 0;   ///< tau_w
    int shared_start = 1;   ///< t_c = min(L, tau_w + 1)
    int shared_len = 0;     ///< tau_u
};

/// Builds the frame split for a reservation ratio alpha in [0, 1].
/// tau_u is the cardinality of the shared slot set {tau_w + 1, ..., L},
/// so alpha = 0 gives tau_u = L and alpha = 1 gives tau_u = 0.
inline FrameSplit make_frame_split(double alpha, int slots_per_frame) {
    if (!(alpha >= 0.0) || alpha > 1.0)
        throw std::domain_error("alpha must be in [0, 1]");
    if (slots_per_frame < 1)
        throw std::domain_error("slots_per_frame must be >= 1");
    FrameSplit split;
    split.alpha = alpha;
    split.reserved_len = static_cast<int>(std::floor(alpha * slots_per_frame));
    split.shared_start = std::min(slots_per_frame, split.reserved_len + 1);
    split.shared_len = slots_per_frame - split.reserved_len;
    return split;
}

/// P_w: probability that a pull node's observation falls inside the
/// queried range, i.e. CDF(V_U) - CDF(V_L).
inline double wake_probability(const ObservationModel& model,
                               const QueryRange& range) {
    if (range.lower < model.v_min() || range.upper > model.v_max() ||
        range.lower > range.upper)
        throw std::domain_error("query range outside observation support");
    return model.cdf(range.upper) - model.cdf(range.lower);
}

/// p_lambda = 1 - exp(-lambda L): probability that a push node generated
/// at least one packet during the previous frame.
inline double push_activity_probability(double lambda, int slots_per_frame) {
    if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
    if (slots_per_frame < 1)
        throw std::domain_error("slots_per_frame must be >= 1");
    return -std::expm1(-lambda * slots_per_frame);
}

}  // namespace cowu

#endif  // COWU_CORE_HPP
