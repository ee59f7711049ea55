#ifndef COWU_CHAIN_HPP
#define COWU_CHAIN_HPP

// Absorbing Markov chain over the number of packets still awaiting
// transmission under slotted p-persistent contention. With s packets
// backlogged, the chain moves to s-1 when exactly one node transmits
// (probability s p (1-p)^{s-1}) and stays at s otherwise; state 0 is
// absorbing. The transition matrix is bidiagonal, so one step is a
// single backward sweep.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cowu {

/// p_{s,s-1} = s p (1-p)^{s-1}; zero for the absorbing state s = 0.
inline double transition_success_prob(int s, double p) {
    if (s < 0) throw std::domain_error("state must be >= 0");
    if (s == 0) return 0.0;
    return s * p * std::pow(1.0 - p, s - 1);
}

/// Transient distribution over the states {J, ..., 1, 0} after a given
/// number of slots. remaining[s] is the probability that s packets are
/// still backlogged.
struct StateDistribution {
    std::vector<double> remaining;  // index s = packets left, size J+1
    int elapsed_steps = 0;

    double prob(int s) const { return remaining.at(static_cast<size_t>(s)); }
};

class ContentionChain {
public:
    ContentionChain(int max_packets, double tx_prob)
        : max_packets_(max_packets), tx_prob_(tx_prob) {
        if (max_packets < 0)
            throw std::invalid_argument("max_packets must be >= 0");
        if (!(tx_prob > 0.0) || tx_prob > 1.0)
            throw std::invalid_argument("tx_prob must be in (0, 1]");
    }

    int max_packets() const { return max_packets_; }
    double tx_prob() const { return tx_prob_; }

    /// Phi(steps) starting from Phi(0) = [1, 0, ..., 0] (all J packets
    /// backlogged). Each step costs O(J).
    StateDistribution propagate(int steps) const {
        if (steps < 0) throw std::domain_error("steps must be >= 0");
        StateDistribution dist;
        dist.remaining.assign(static_cast<size_t>(max_packets_) + 1, 0.0);
        dist.remaining[static_cast<size_t>(max_packets_)] = 1.0;
        for (int t = 0; t < steps; ++t) step(dist.remaining);
        dist.elapsed_steps = steps;
        return dist;
    }

    /// Advances phi by one slot in place.
    void step(std::vector<double>& phi) const {
        for (int s = 1; s <= max_packets_; ++s) {
            const double move = phi[static_cast<size_t>(s)] *
                                transition_success_prob(s, tx_prob_);
            phi[static_cast<size_t>(s)] -= move;
            phi[static_cast<size_t>(s) - 1] += move;
        }
    }

private:
    int max_packets_;
    double tx_prob_;
};

/// P_s(j | J, zeta): probability that exactly j of J packets complete
/// within zeta slots. Equals phi_{J-j}(zeta).
inline double success_pmf(int j, int J, int zeta, double p) {
    if (j < 0 || j > J) throw std::domain_error("require 0 <= j <= J");
    if (zeta < 0) throw std::domain_error("zeta must be >= 0");
    return ContentionChain(J, p).propagate(zeta).prob(J - j);
}

/// Precomputed Phi trajectories for every chain size J <= J_max over
/// t = 0..zeta_max slots. Backs the nested sums of the coexistence
/// metrics, which need both the final distributions and the full
/// per-slot trajectory for the energy terms.
class SuccessTable {
public:
    SuccessTable(int j_max, int zeta_max, double p)
        : j_max_(j_max), zeta_max_(zeta_max), p_(p) {
        if (j_max < 0 || zeta_max < 0)
            throw std::invalid_argument("table bounds must be >= 0");
        traj_.resize(static_cast<size_t>(j_max) + 1);
        for (int J = 0; J <= j_max; ++J) {
            ContentionChain chain(J, p);
            auto& rows = traj_[static_cast<size_t>(J)];
            rows.assign(static_cast<size_t>(zeta_max + 1) *
                            static_cast<size_t>(J + 1),
                        0.0);
            std::vector<double> phi(static_cast<size_t>(J) + 1, 0.0);
            phi[static_cast<size_t>(J)] = 1.0;
            for (int t = 0; t <= zeta_max; ++t) {
                for (int s = 0; s <= J; ++s)
                    rows[idx(J, t, s)] = phi[static_cast<size_t>(s)];
                if (t < zeta_max) chain.step(phi);
            }
        }
    }

    int j_max() const { return j_max_; }
    int zeta_max() const { return zeta_max_; }
    double tx_prob() const { return p_; }

    /// phi_s(t) for the chain of size J.
    double phi(int J, int t, int s) const {
        check(J, t);
        if (s < 0 || s > J) throw std::domain_error("state out of range");
        return traj_[static_cast<size_t>(J)][idx(J, t, s)];
    }

    /// P_s(j | J, t); identical to success_pmf for every in-range triple.
    double lookup(int j, int J, int t) const {
        check(J, t);
        if (j < 0 || j > J) throw std::domain_error("require 0 <= j <= J");
        return traj_[static_cast<size_t>(J)][idx(J, t, J - j)];
    }

private:
    void check(int J, int t) const {
        if (J < 0 || J > j_max_) throw std::domain_error("chain size out of range");
        if (t < 0 || t > zeta_max_) throw std::domain_error("step out of range");
    }
    static size_t idx(int J, int t, int s) {
        return static_cast<size_t>(t) * static_cast<size_t>(J + 1) +
               static_cast<size_t>(s);
    }

    int j_max_;
    int zeta_max_;
    double p_;
    // traj_[J][t*(J+1)+s] = phi_s(t) for the chain of size J
    std::vector<std::vector<double>> traj_;
};

}  // namespace cowu

#endif  // COWU_CHAIN_HPP
