#ifndef COWU_SIM_HPP
#define COWU_SIM_HPP

// Frame-level Monte Carlo simulator of the coexistence protocol:
// observation sampling, content-based wake-up, reserved/shared slotted
// p-persistent contention with collisions and immediate ACKs, push
// arrivals, and per-node pull energy accounting. Serves as the
// independent oracle for the closed-form metrics.
//
// Each frame's random stream is a pure function of (master_seed, frame
// index), so campaign results do not depend on execution parallelism.
// Estimates are accumulated in fixed-size chunks combined in index
// order, which makes serial and threaded runs bit-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "cowu/core.hpp"

namespace cowu {

/// Result of one simulated frame.
struct FrameOutcome {
    int woken = 0;                ///< w: pull nodes activated by the query
    int push_active = 0;          ///< u: push nodes holding a packet
    std::vector<std::pair<int, int>> pull_success_slots;  ///< (node, slot)
    int push_successes = 0;       ///< z_u
    double pull_energy = 0.0;     ///< joules, pull side only
    bool accuracy_indicator = false;  ///< all woken nodes delivered by slot L
    double push_ratio = 1.0;      ///< 1 if u = 0, else z_u / u
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for frame i derived from the master seed; O(1) per frame.
inline std::mt19937_64 frame_rng(uint64_t master_seed, uint64_t frame_index) {
    return std::mt19937_64(
        splitmix64(master_seed ^ splitmix64(frame_index + 1)));
}

}  // namespace detail

/// Simulates one frame. Pull nodes sample their observation once at
/// wake-up; contenders transmit independently with probability p each
/// slot; exactly one transmitter yields a success and an immediate ACK.
/// Push nodes contend only in the shared slots. Energy is accounted per
/// slot for every still-active pull node: T_s xi_T when transmitting,
/// T_s xi_R otherwise.
inline FrameOutcome run_frame(const SystemConfig& cfg,
                              const ObservationModel& model,
                              const QueryRange& range, const FrameSplit& split,
                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FrameOutcome out;

    // Wake-up phase: one observation per pull node.
    std::vector<int> pull_pending;  // node ids of woken, not-yet-ACKed nodes
    pull_pending.reserve(static_cast<size_t>(cfg.n_pull));
    for (int n = 0; n < cfg.n_pull; ++n) {
        const double v = model.quantile(unit(rng));
        if (v >= range.lower && v <= range.upper) pull_pending.push_back(n);
    }
    out.woken = static_cast<int>(pull_pending.size());

    // Push arrivals from the previous frame; only the latest packet is kept.
    const double p_lambda =
        push_activity_probability(cfg.arrival_rate, cfg.slots_per_frame);
    int push_pending = 0;
    for (int n = 0; n < cfg.n_push; ++n)
        if (unit(rng) < p_lambda) ++push_pending;
    out.push_active = push_pending;

    const double slot_tx = cfg.slot_duration * cfg.power_tx;
    const double slot_rx = cfg.slot_duration * cfg.power_rx;
    std::vector<char> transmitted(pull_pending.size());

    for (int slot = 1; slot <= cfg.slots_per_frame; ++slot) {
        const bool shared = slot > split.reserved_len;
        int transmitters = 0;

        for (size_t i = 0; i < pull_pending.size(); ++i) {
            transmitted[i] = unit(rng) < cfg.tx_prob;
            if (transmitted[i]) ++transmitters;
        }
        int push_transmitters = 0;
        if (shared) {
            for (int i = 0; i < push_pending; ++i)
                if (unit(rng) < cfg.tx_prob) ++push_transmitters;
            transmitters += push_transmitters;
        }

        for (size_t i = 0; i < pull_pending.size(); ++i)
            out.pull_energy += transmitted[i] ? slot_tx : slot_rx;

        if (transmitters == 1) {
            if (push_transmitters == 1) {
                --push_pending;
                ++out.push_successes;
            } else {
                size_t winner = 0;
                while (!transmitted[winner]) ++winner;
                out.pull_success_slots.emplace_back(pull_pending[winner], slot);
                pull_pending.erase(pull_pending.begin() +
                                   static_cast<long>(winner));
                transmitted.resize(pull_pending.size());
            }
        }
        // Collision or silence: every backlogged packet stays.
    }

    out.accuracy_indicator =
        static_cast<int>(out.pull_success_slots.size()) == out.woken;
    out.push_ratio = out.push_active == 0
                         ? 1.0
                         : static_cast<double>(out.push_successes) /
                               out.push_active;
    return out;
}

/// Aggregated Monte Carlo estimates with standard errors. Standard
/// errors are NaN for a single frame.
struct SimEstimates {
    long frames = 0;
    double gamma_w_hat = 0.0, gamma_w_se = 0.0;
    double gamma_u_hat = 0.0, gamma_u_se = 0.0;
    double e_tot_hat = 0.0, e_tot_se = 0.0;
    uint64_t master_seed = 0;
};

namespace detail {

// Frames per accumulation chunk. Chunk totals are combined in chunk
// order under any thread count, so the final sums are reproducible.
inline constexpr long kChunkFrames = 1024;

struct Moments {
    double sum_w = 0, sum_w2 = 0;
    double sum_u = 0, sum_u2 = 0;
    double sum_e = 0, sum_e2 = 0;

    void add(const FrameOutcome& out) {
        const double a = out.accuracy_indicator ? 1.0 : 0.0;
        sum_w += a;
        sum_w2 += a * a;
        sum_u += out.push_ratio;
        sum_u2 += out.push_ratio * out.push_ratio;
        sum_e += out.pull_energy;
        sum_e2 += out.pull_energy * out.pull_energy;
    }
    void combine(const Moments& o) {
        sum_w += o.sum_w;
        sum_w2 += o.sum_w2;
        sum_u += o.sum_u;
        sum_u2 += o.sum_u2;
        sum_e += o.sum_e;
        sum_e2 += o.sum_e2;
    }
};

template <typename FrameFn>
inline SimEstimates aggregate(FrameFn&& simulate_frame, long frames,
                              uint64_t master_seed, int n_threads) {
    if (frames < 1) throw std::invalid_argument("frames must be >= 1");
    if (n_threads < 1) n_threads = 1;

    const long n_chunks = (frames + kChunkFrames - 1) / kChunkFrames;
    std::vector<Moments> chunks(static_cast<size_t>(n_chunks));

    auto run_chunk = [&](long c) {
        Moments m;
        const long begin = c * kChunkFrames;
        const long end = std::min(frames, begin + kChunkFrames);
        for (long i = begin; i < end; ++i) {
            auto rng = frame_rng(master_seed, static_cast<uint64_t>(i));
            m.add(simulate_frame(rng));
        }
        chunks[static_cast<size_t>(c)] = m;
    };

    if (n_threads == 1 || n_chunks == 1) {
        for (long c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (long c = t; c < n_chunks; c += n_threads) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    Moments total;
    for (const auto& m : chunks) total.combine(m);

    const double n = static_cast<double>(frames);
    auto finish = [n](double sum, double sum2, double& mean, double& se) {
        mean = sum / n;
        if (n < 2) {
            se = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));
        se = std::sqrt(var / n);
    };

    SimEstimates est;
    est.frames = frames;
    est.master_seed = master_seed;
    finish(total.sum_w, total.sum_w2, est.gamma_w_hat, est.gamma_w_se);
    finish(total.sum_u, total.sum_u2, est.gamma_u_hat, est.gamma_u_se);
    finish(total.sum_e, total.sum_e2, est.e_tot_hat, est.e_tot_se);
    return est;
}

}  // namespace detail

/// Runs `frames` independent frames at the given alpha and averages the
/// per-frame accuracy indicator, push ratio and pull energy.
inline SimEstimates run_campaign(const SystemConfig& cfg,
                                 const ObservationModel& model,
                                 const QueryRange& range, double alpha,
                                 long frames, uint64_t master_seed,
                                 int n_threads = 1) {
    cfg.validate();
    const FrameSplit split = make_frame_split(alpha, cfg.slots_per_frame);
    return detail::aggregate(
        [&](std::mt19937_64& rng) {
            return run_frame(cfg, model, range, split, rng);
        },
        frames, master_seed, n_threads);
}

/// Round-Robin baseline campaign: the pull phase is a deterministic TDMA
/// schedule (always accurate, energy exactly N_w T_s xi_T); push nodes
/// contend in the remaining L - N_w slots.
inline SimEstimates run_rr_campaign(const SystemConfig& cfg, long frames,
                                    uint64_t master_seed, int n_threads = 1) {
    cfg.validate();
    if (cfg.n_pull > cfg.slots_per_frame)
        throw std::domain_error("Round-Robin infeasible: n_pull > slots_per_frame");
    const double p_lambda =
        push_activity_probability(cfg.arrival_rate, cfg.slots_per_frame);
    const double pull_energy = cfg.n_pull * cfg.slot_duration * cfg.power_tx;
    const int shared_slots = cfg.slots_per_frame - cfg.n_pull;

    return detail::aggregate(
        [&](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            FrameOutcome out;
            out.woken = cfg.n_pull;
            out.pull_energy = pull_energy;
            out.accuracy_indicator = true;
            int pending = 0;
            for (int n = 0; n < cfg.n_push; ++n)
                if (unit(rng) < p_lambda) ++pending;
            out.push_active = pending;
            for (int slot = 0; slot < shared_slots; ++slot) {
                int transmitters = 0;
                for (int i = 0; i < pending; ++i)
                    if (unit(rng) < cfg.tx_prob) ++transmitters;
                if (transmitters == 1) {
                    --pending;
                    ++out.push_successes;
                }
            }
            out.push_ratio = out.push_active == 0
                                 ? 1.0
                                 : static_cast<double>(out.push_successes) /
                                       out.push_active;
            return out;
        },
        frames, master_seed, n_threads);
}

}  // namespace cowu

#endif  // COWU_SIM_HPP
