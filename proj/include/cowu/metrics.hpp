#ifndef COWU_METRICS_HPP
#define COWU_METRICS_HPP

// Closed-form coexistence metrics: push success probability gamma_u,
// pull retrieval accuracy gamma_w and total pull energy, plus the
// Round-Robin baseline. All three are nested expectations over the
// wake-up binomial, the push-activity binomial and the contention
// chain's transient distributions.

#include <cmath>
#include <stdexcept>

#include "cowu/chain.hpp"
#include "cowu/core.hpp"

namespace cowu {

namespace detail {

// Binomial coefficient as an incremental product; populations here stay
// around 100, well inside double range.
inline double binom_coeff(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

inline double binom_pmf(int k, int n, double q) {
    if (k < 0 || k > n) return 0.0;
    if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (q >= 1.0) return k == n ? 1.0 : 0.0;
    return binom_coeff(n, k) * std::pow(q, k) * std::pow(1.0 - q, n - k);
}

// Weights below this threshold are dropped from the outer sums; with
// populations <= ~100 the truncation error stays under 1e-13.
inline constexpr double kWeightCutoff = 1e-16;

}  // namespace detail

/// P_d(w): binomial pmf of the number of woken pull nodes.
inline double pull_wake_pmf(int w, int n_pull, double p_wake) {
    if (w < 0 || w > n_pull) throw std::domain_error("require 0 <= w <= n_pull");
    return detail::binom_pmf(w, n_pull, p_wake);
}

/// P_u(u): binomial pmf of the number of active push nodes.
inline double push_active_pmf(int u, int n_push, double p_lambda) {
    if (u < 0 || u > n_push) throw std::domain_error("require 0 <= u <= n_push");
    return detail::binom_pmf(u, n_push, p_lambda);
}

/// P_beta(z_u | y, u, r_w): hypergeometric split of the y shared-window
/// successes between push (z_u) and residual pull (y - z_u) packets.
/// Combinatorially impossible arguments yield 0; y > r_w + u is a
/// structural violation.
inline double push_split_pmf(int z_u, int y, int u, int r_w) {
    if (z_u < 0 || y < 0 || u < 0 || r_w < 0)
        throw std::domain_error("counts must be >= 0");
    if (y > r_w + u) throw std::domain_error("require y <= r_w + u");
    if (z_u > u || z_u > y || y - z_u > r_w) return 0.0;
    return detail::binom_coeff(u, z_u) * detail::binom_coeff(r_w, y - z_u) /
           detail::binom_coeff(r_w + u, y);
}

/// P_iota(z_u | u): fraction of active push nodes that delivered; 1 for
/// a frame with no active push node.
inline double push_success_ratio(int z_u, int u) {
    if (z_u < 0 || u < 0) throw std::domain_error("counts must be >= 0");
    if (u == 0) {
        if (z_u != 0) throw std::domain_error("require z_u = 0 when u = 0");
        return 1.0;
    }
    if (z_u > u) throw std::domain_error("require z_u <= u");
    return static_cast<double>(z_u) / u;
}

/// P_gamma(r_w | y, u, r_w): probability that all r_w residual pull
/// packets are among the y shared-window successes. 0 when y < r_w.
inline double pull_complete_prob(int r_w, int y, int u) {
    if (r_w < 0 || y < 0 || u < 0) throw std::domain_error("counts must be >= 0");
    if (y > r_w + u) throw std::domain_error("require y <= r_w + u");
    if (y < r_w) return 0.0;
    return detail::binom_coeff(u, y - r_w) / detail::binom_coeff(r_w + u, y);
}

/// psi_s: expected energy of one slot with s backlogged pull nodes.
/// Each transmits (xi_T) with probability p, otherwise listens (xi_R),
/// so psi_s = s T_s (p xi_T + (1-p) xi_R).
inline double state_energy(int s, const SystemConfig& cfg) {
    if (s < 0) throw std::domain_error("state must be >= 0");
    return s * cfg.slot_duration *
           (cfg.tx_prob * cfg.power_tx + (1.0 - cfg.tx_prob) * cfg.power_rx);
}

/// c(r_w, u): pull share of the shared-window energy, r_w / (r_w + u).
inline double shared_energy_weight(int r_w, int u) {
    if (r_w < 0 || u < 0) throw std::domain_error("counts must be >= 0");
    if (r_w + u == 0) return 0.0;
    return static_cast<double>(r_w) / (r_w + u);
}

/// Bundles a configuration with its query range and frame split, plus
/// the two derived activity probabilities.
struct MetricInputs {
    SystemConfig config;
    QueryRange range;
    FrameSplit split;
    double p_wake;    // P_w(V_th)
    double p_lambda;  // 1 - exp(-lambda L)

    MetricInputs(const SystemConfig& cfg, const ObservationModel& model,
                 const QueryRange& rng, const FrameSplit& spl)
        : config(cfg), range(rng), split(spl),
          p_wake(wake_probability(model, rng)),
          p_lambda(push_activity_probability(cfg.arrival_rate,
                                             cfg.slots_per_frame)) {
        cfg.validate();
    }

    static MetricInputs at_alpha(const SystemConfig& cfg,
                                 const ObservationModel& model,
                                 const QueryRange& rng, double alpha) {
        return MetricInputs(cfg, model, rng,
                            make_frame_split(alpha, cfg.slots_per_frame));
    }
};

struct CoexistenceReport {
    double gamma_w = 1.0;
    double gamma_u = 1.0;
    double e_tot = 0.0;  // joules
};

namespace detail {

// Shared scaffolding for the three metrics: the reserved-window chain
// over the woken pull nodes and the shared-window chain over residual
// pull plus active push packets.
struct MetricTables {
    SuccessTable reserved;
    SuccessTable shared;

    explicit MetricTables(const MetricInputs& in)
        : reserved(in.config.n_pull, in.split.reserved_len, in.config.tx_prob),
          shared(in.config.n_pull + in.config.n_push, in.split.shared_len,
                 in.config.tx_prob) {}
};

// Sum over the window of the expected per-slot energy, using the state
// at the beginning of each slot (Phi(0)..Phi(tau-1)); this matches both
// the simulator's accounting and the reference curves.
inline double window_energy(const SuccessTable& table, int chain_size,
                            int window_len, const SystemConfig& cfg) {
    const double per_packet =
        cfg.slot_duration *
        (cfg.tx_prob * cfg.power_tx + (1.0 - cfg.tx_prob) * cfg.power_rx);
    double total = 0.0;
    for (int t = 0; t < window_len; ++t) {
        double expected_backlog = 0.0;
        for (int s = 1; s <= chain_size; ++s)
            expected_backlog += table.phi(chain_size, t, s) * s;
        total += expected_backlog;
    }
    return total * per_packet;
}

}  // namespace detail

/// gamma_u: expected fraction of active push nodes delivering their
/// packet within the frame (frames with no active push node count 1).
inline double gamma_u(const MetricInputs& in) {
    const detail::MetricTables tables(in);
    const int tau_w = in.split.reserved_len;
    const int tau_u = in.split.shared_len;
    double result = 0.0;
    for (int w = 0; w <= in.config.n_pull; ++w) {
        const double pd = pull_wake_pmf(w, in.config.n_pull, in.p_wake);
        if (pd < detail::kWeightCutoff) continue;
        for (int u = 0; u <= in.config.n_push; ++u) {
            const double pu = push_active_pmf(u, in.config.n_push, in.p_lambda);
            if (pu < detail::kWeightCutoff) continue;
            if (u == 0) {  // P_iota(0|0) = 1 regardless of the pull outcome
                result += pd * pu;
                continue;
            }
            for (int r_w = 0; r_w <= w; ++r_w) {
                const double ps_res = tables.reserved.lookup(w - r_w, w, tau_w);
                if (ps_res < detail::kWeightCutoff) continue;
                const int pool = r_w + u;
                for (int y = 1; y <= pool; ++y) {
                    const double ps_sh = tables.shared.lookup(y, pool, tau_u);
                    if (ps_sh == 0.0) continue;
                    double inner = 0.0;
                    const int z_lo = std::max(0, y - r_w);
                    const int z_hi = std::min(u, y);
                    for (int z_u = z_lo; z_u <= z_hi; ++z_u)
                        inner += push_split_pmf(z_u, y, u, r_w) *
                                 push_success_ratio(z_u, u);
                    result += pd * pu * ps_res * ps_sh * inner;
                }
            }
        }
    }
    return result;
}

/// gamma_w: probability that every woken pull node delivers its reading
/// by the end of the frame (the retrieved set equals the target set).
inline double gamma_w(const MetricInputs& in) {
    const detail::MetricTables tables(in);
    const int tau_w = in.split.reserved_len;
    const int tau_u = in.split.shared_len;
    double result = 0.0;
    for (int w = 0; w <= in.config.n_pull; ++w) {
        const double pd = pull_wake_pmf(w, in.config.n_pull, in.p_wake);
        if (pd < detail::kWeightCutoff) continue;
        for (int u = 0; u <= in.config.n_push; ++u) {
            const double pu = push_active_pmf(u, in.config.n_push, in.p_lambda);
            if (pu < detail::kWeightCutoff) continue;
            for (int r_w = 0; r_w <= w; ++r_w) {
                const double ps_res = tables.reserved.lookup(w - r_w, w, tau_w);
                if (ps_res < detail::kWeightCutoff) continue;
                const int pool = r_w + u;
                for (int y = r_w; y <= pool; ++y) {
                    const double ps_sh = tables.shared.lookup(y, pool, tau_u);
                    if (ps_sh == 0.0) continue;
                    result += pd * pu * ps_res * ps_sh *
                              pull_complete_prob(r_w, y, u);
                }
            }
        }
    }
    return result;
}

/// E_tot: expected pull-side energy over the frame — the reserved-window
/// term over the chain of woken nodes plus the c(r_w, u)-weighted share
/// of the shared-window contention energy.
inline double pull_energy_total(const MetricInputs& in) {
    const detail::MetricTables tables(in);
    const int tau_w = in.split.reserved_len;
    const int tau_u = in.split.shared_len;
    double result = 0.0;
    for (int w = 0; w <= in.config.n_pull; ++w) {
        const double pd = pull_wake_pmf(w, in.config.n_pull, in.p_wake);
        if (pd < detail::kWeightCutoff) continue;
        double frame_energy =
            detail::window_energy(tables.reserved, w, tau_w, in.config);
        for (int u = 0; u <= in.config.n_push; ++u) {
            const double pu = push_active_pmf(u, in.config.n_push, in.p_lambda);
            if (pu < detail::kWeightCutoff) continue;
            for (int r_w = 0; r_w <= w; ++r_w) {
                if (r_w + u == 0) continue;
                const double ps_res = tables.reserved.lookup(w - r_w, w, tau_w);
                if (ps_res < detail::kWeightCutoff) continue;
                const double weight = shared_energy_weight(r_w, u);
                if (weight == 0.0) continue;
                frame_energy += pu * ps_res * weight *
                                detail::window_energy(tables.shared, r_w + u,
                                                      tau_u, in.config);
            }
        }
        result += pd * frame_energy;
    }
    return result;
}

/// Evaluates all three metrics for one (config, range, split).
inline CoexistenceReport evaluate(const MetricInputs& in) {
    CoexistenceReport report;
    report.gamma_w = gamma_w(in);
    report.gamma_u = gamma_u(in);
    report.e_tot = pull_energy_total(in);
    return report;
}

/// Round-Robin baseline: every pull node gets one dedicated slot, so the
/// pull energy is exactly N_w T_s xi_T.
inline double rr_pull_energy(int n_pull, const SystemConfig& cfg) {
    if (n_pull < 0) throw std::domain_error("n_pull must be >= 0");
    if (n_pull > cfg.slots_per_frame)
        throw std::domain_error("Round-Robin infeasible: n_pull > slots_per_frame");
    return n_pull * cfg.slot_duration * cfg.power_tx;
}

/// Round-Robin push success probability: push nodes contend over the
/// L - N_w slots left after the TDMA pull phase.
inline double rr_gamma_u(int n_pull, const SystemConfig& cfg) {
    if (n_pull < 0) throw std::domain_error("n_pull must be >= 0");
    if (n_pull > cfg.slots_per_frame)
        throw std::domain_error("Round-Robin infeasible: n_pull > slots_per_frame");
    const int shared = cfg.slots_per_frame - n_pull;
    const double p_lambda =
        push_activity_probability(cfg.arrival_rate, cfg.slots_per_frame);
    SuccessTable table(cfg.n_push, shared, cfg.tx_prob);
    double result = 0.0;
    for (int u = 0; u <= cfg.n_push; ++u) {
        const double pu = push_active_pmf(u, cfg.n_push, p_lambda);
        if (pu < detail::kWeightCutoff) continue;
        double inner = 0.0;
        for (int z_u = 0; z_u <= u; ++z_u)
            inner += table.lookup(z_u, u, shared) * push_success_ratio(z_u, u);
        result += pu * inner;
    }
    return result;
}

}  // namespace cowu

#endif  // COWU_METRICS_HPP
