#include <catch2/catch_amalgamated.hpp>

#include "cowu/opt.hpp"

using namespace cowu;

namespace {

SystemConfig paper_config() {
    SystemConfig cfg;
    cfg.n_pull = 25;
    cfg.n_push = 25;
    cfg.slots_per_frame = 50;
    return cfg;
}

const QueryRange kNarrowRange{0.94, 0.98};

}  // namespace

TEST_CASE("default grid matches the reference sweep") {
    auto grid = GridSpec::defaults();
    REQUIRE(grid.alpha_values.size() == 21);
    CHECK(grid.alpha_values.front() == 0.0);
    CHECK(grid.alpha_values.back() == Catch::Approx(1.0));
    REQUIRE(grid.lambda_values.size() == 10);
    CHECK(grid.lambda_values.front() == Catch::Approx(0.005));
    CHECK(grid.lambda_values.back() == Catch::Approx(0.05));
}

TEST_CASE("grid validation") {
    auto grid = GridSpec::defaults();
    grid.alpha_values = {0.4, 0.2};
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
    grid = GridSpec::defaults();
    grid.gamma_th = 1.5;
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
    grid = GridSpec::defaults();
    grid.lambda_values.clear();
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
}

TEST_CASE("zero threshold saturates lambda_max") {
    auto cfg = paper_config();
    auto model = ObservationModel::uniform(cfg);
    auto res = lambda_max(cfg, model, kNarrowRange, GridSpec::defaults(0.0));
    CHECK(res.lambda_max == Catch::Approx(0.05));
    CHECK(res.feasible_alphas.size() == 21);
}

TEST_CASE("lambda_max reference point") {
    auto cfg = paper_config();
    auto model = ObservationModel::uniform(cfg);
    auto res = lambda_max(cfg, model, kNarrowRange, GridSpec::defaults(0.8));
    CHECK(res.lambda_max == Catch::Approx(0.025));
    CHECK_FALSE(res.feasible_alphas.empty());
    // the reported feasible set really is feasible
    for (double alpha : res.feasible_alphas) {
        auto at = cfg;
        at.arrival_rate = res.lambda_max;
        auto in = MetricInputs::at_alpha(at, model, kNarrowRange, alpha);
        CHECK(gamma_w(in) >= 0.8);
        CHECK(gamma_u(in) >= 0.8);
    }
}

TEST_CASE("round robin lambda_max reference point") {
    auto cfg = paper_config();
    CHECK(rr_lambda_max(cfg, GridSpec::defaults(0.8)) == 0.0);
    cfg.n_pull = 5;
    cfg.n_push = 15;
    CHECK(rr_lambda_max(cfg, GridSpec::defaults(0.8)) == Catch::Approx(0.05));
}

TEST_CASE("feasibility shrinks as the threshold rises") {
    auto cfg = paper_config();
    auto model = ObservationModel::uniform(cfg);
    GridSpec coarse;
    coarse.gamma_th = 0.0;
    for (int k = 0; k <= 10; ++k) coarse.alpha_values.push_back(k * 0.1);
    coarse.lambda_values = {0.005, 0.015, 0.025};
    auto base = sweep(cfg, model, kNarrowRange, coarse);
    for (double th : {0.5, 0.8, 0.95}) {
        auto tighter = coarse;
        tighter.gamma_th = th;
        auto res = sweep(cfg, model, kNarrowRange, tighter);
        REQUIRE(res.cells.size() == base.cells.size());
        for (size_t i = 0; i < res.cells.size(); ++i) {
            if (res.cells[i].feasible) CHECK(base.cells[i].feasible);
            CHECK(res.cells[i].feasible ==
                  (res.cells[i].gamma_w >= th && res.cells[i].gamma_u >= th));
        }
    }
}

TEST_CASE("alpha_opt reference points") {
    auto cfg = paper_config();
    auto model = ObservationModel::uniform(cfg);
    const auto grid = GridSpec::defaults(0.8);
    auto at_low = alpha_opt(cfg, model, kNarrowRange, 0.005, grid);
    REQUIRE(at_low.feasible);
    CHECK(at_low.alpha == Catch::Approx(0.35));
    auto at_high = alpha_opt(cfg, model, kNarrowRange, 0.025, grid);
    REQUIRE(at_high.feasible);
    CHECK(at_high.alpha == Catch::Approx(0.05));
    auto wide = alpha_opt(cfg, model, {0.92, 1.0}, 0.015, grid);
    CHECK_FALSE(wide.feasible);
}

TEST_CASE("energy ratio reference points") {
    auto cfg = paper_config();
    auto model = ObservationModel::uniform(cfg);
    const auto grid = GridSpec::defaults(0.8);
    auto res = energy_ratio(cfg, model, kNarrowRange, 0.005, grid);
    REQUIRE(res.feasible);
    CHECK(res.eta == Catch::Approx(0.625749132016461).epsilon(5e-3));
    auto infeasible = energy_ratio(cfg, model, {0.92, 1.0}, 0.015, grid);
    CHECK_FALSE(infeasible.feasible);
}

TEST_CASE("tie breaking prefers the smaller alpha") {
    // with no pull nodes the energy is identically zero, so every
    // feasible alpha ties and the smallest must win
    auto cfg = paper_config();
    cfg.n_pull = 0;
    auto model = ObservationModel::uniform(cfg);
    auto res = alpha_opt(cfg, model, {0.4, 0.6}, 0.005, GridSpec::defaults(0.0));
    REQUIRE(res.feasible);
    CHECK(res.alpha == 0.0);
    CHECK(res.e_tot == 0.0);
}
