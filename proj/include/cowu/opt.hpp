#ifndef COWU_OPT_HPP
#define COWU_OPT_HPP

// Constrained grid searches over (alpha, lambda): the maximum acceptable
// push traffic lambda_max, the energy-minimizing split alpha_opt, and
// the CoWu/Round-Robin energy ratio eta. All evaluations use the
// closed-form metrics; infeasibility is a result, not an error.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cowu/metrics.hpp"

namespace cowu {

/// Search grid plus the acceptance threshold gamma_th applied to both
/// gamma_w and gamma_u. Grid points are generated by integer index so
/// floor(alpha L) never shifts from accumulated rounding.
struct GridSpec {
    std::vector<double> alpha_values;
    std::vector<double> lambda_values;
    double gamma_th = 0.8;

    /// Default grids: alpha in {0, 0.05, ..., 1.0}, lambda in
    /// {0.005, 0.010, ..., 0.050}.
    static GridSpec defaults(double gamma_th_ = 0.8) {
        GridSpec g;
        g.gamma_th = gamma_th_;
        for (int k = 0; k <= 20; ++k) g.alpha_values.push_back(k / 20.0);
        for (int k = 1; k <= 10; ++k) g.lambda_values.push_back(k / 200.0);
        return g;
    }

    void validate() const {
        if (alpha_values.empty() || lambda_values.empty())
            throw std::invalid_argument("grid must be non-empty");
        if (!std::is_sorted(alpha_values.begin(), alpha_values.end()) ||
            !std::is_sorted(lambda_values.begin(), lambda_values.end()))
            throw std::invalid_argument("grid values must be sorted ascending");
        for (double a : alpha_values)
            if (a < 0.0 || a > 1.0)
                throw std::invalid_argument("alpha grid values must be in [0, 1]");
        if (lambda_values.front() < 0.0)
            throw std::invalid_argument("lambda grid values must be >= 0");
        if (gamma_th < 0.0 || gamma_th > 1.0)
            throw std::invalid_argument("gamma_th must be in [0, 1]");
    }
};

struct SweepCell {
    double alpha = 0.0;
    double lambda = 0.0;
    double gamma_w = 0.0;
    double gamma_u = 0.0;
    double e_tot = 0.0;
    bool feasible = false;  // gamma_w >= gamma_th and gamma_u >= gamma_th
};

struct SweepResult {
    std::vector<SweepCell> cells;  // row-major: lambda outer, alpha inner
};

namespace detail {

inline SystemConfig with_lambda(SystemConfig cfg, double lambda) {
    cfg.arrival_rate = lambda;
    return cfg;
}

// Feasibility of a single (alpha, lambda) cell. gamma_w is the cheaper
// sum, so it gates the gamma_u evaluation.
inline bool cell_feasible(const SystemConfig& cfg, const ObservationModel& model,
                          const QueryRange& range, double alpha, double lambda,
                          double gamma_th) {
    const auto in =
        MetricInputs::at_alpha(with_lambda(cfg, lambda), model, range, alpha);
    if (gamma_w(in) < gamma_th) return false;
    return gamma_u(in) >= gamma_th;
}

}  // namespace detail

/// Evaluates every (alpha, lambda) grid cell.
inline SweepResult sweep(const SystemConfig& cfg, const ObservationModel& model,
                         const QueryRange& range, const GridSpec& grid) {
    grid.validate();
    SweepResult result;
    result.cells.reserve(grid.alpha_values.size() * grid.lambda_values.size());
    for (double lambda : grid.lambda_values) {
        for (double alpha : grid.alpha_values) {
            const auto in = MetricInputs::at_alpha(
                detail::with_lambda(cfg, lambda), model, range, alpha);
            const CoexistenceReport rep = evaluate(in);
            SweepCell cell;
            cell.alpha = alpha;
            cell.lambda = lambda;
            cell.gamma_w = rep.gamma_w;
            cell.gamma_u = rep.gamma_u;
            cell.e_tot = rep.e_tot;
            cell.feasible =
                rep.gamma_w >= grid.gamma_th && rep.gamma_u >= grid.gamma_th;
            result.cells.push_back(cell);
        }
    }
    return result;
}

struct LambdaMaxResult {
    double lambda_max = 0.0;
    std::vector<double> feasible_alphas;  // empty when nothing is feasible
};

/// Largest grid lambda for which some grid alpha satisfies both
/// gamma-constraints, together with the full feasible alpha set at that
/// lambda. Returns 0 with an empty set when no cell is feasible.
inline LambdaMaxResult lambda_max(const SystemConfig& cfg,
                                  const ObservationModel& model,
                                  const QueryRange& range,
                                  const GridSpec& grid) {
    grid.validate();
    for (auto it = grid.lambda_values.rbegin(); it != grid.lambda_values.rend();
         ++it) {
        std::vector<double> feasible;
        for (double alpha : grid.alpha_values)
            if (detail::cell_feasible(cfg, model, range, alpha, *it,
                                      grid.gamma_th))
                feasible.push_back(alpha);
        if (!feasible.empty()) return {*it, std::move(feasible)};
    }
    return {};
}

/// Round-Robin counterpart of lambda_max: feasibility at a given lambda
/// is gamma_u^RR >= gamma_th (pull accuracy is always 1). There is no
/// alpha to tune, so the result is the largest feasible grid lambda.
inline double rr_lambda_max(const SystemConfig& cfg, const GridSpec& grid) {
    grid.validate();
    if (cfg.n_pull > cfg.slots_per_frame)
        throw std::domain_error("Round-Robin infeasible: n_pull > slots_per_frame");
    for (auto it = grid.lambda_values.rbegin(); it != grid.lambda_values.rend();
         ++it)
        if (rr_gamma_u(cfg.n_pull, detail::with_lambda(cfg, *it)) >=
            grid.gamma_th)
            return *it;
    return 0.0;
}

struct AlphaOptResult {
    bool feasible = false;
    double alpha = 0.0;
    double e_tot = 0.0;
};

/// Energy-minimizing alpha at a fixed lambda, subject to both
/// gamma-constraints. Energy ties within 1e-12 go to the smaller alpha.
inline AlphaOptResult alpha_opt(const SystemConfig& cfg,
                                const ObservationModel& model,
                                const QueryRange& range, double lambda,
                                const GridSpec& grid) {
    grid.validate();
    AlphaOptResult best;
    const SystemConfig at = detail::with_lambda(cfg, lambda);
    for (double alpha : grid.alpha_values) {
        const auto in = MetricInputs::at_alpha(at, model, range, alpha);
        if (gamma_w(in) < grid.gamma_th) continue;
        if (gamma_u(in) < grid.gamma_th) continue;
        const double e = pull_energy_total(in);
        if (!best.feasible || e < best.e_tot - 1e-12) {
            best.feasible = true;
            best.alpha = alpha;
            best.e_tot = e;
        }
    }
    return best;
}

struct EnergyRatioResult {
    bool feasible = false;
    double eta = 0.0;
    double alpha_opt = 0.0;
};

/// eta = E_tot(alpha_opt(lambda)) / E_tot^RR; infeasibility of alpha_opt
/// propagates.
inline EnergyRatioResult energy_ratio(const SystemConfig& cfg,
                                      const ObservationModel& model,
                                      const QueryRange& range, double lambda,
                                      const GridSpec& grid) {
    const double rr_energy = rr_pull_energy(cfg.n_pull, cfg);
    const AlphaOptResult opt = alpha_opt(cfg, model, range, lambda, grid);
    if (!opt.feasible) return {};
    return {true, opt.e_tot / rr_energy, opt.alpha};
}

}  // namespace cowu

#endif  // COWU_OPT_HPP
