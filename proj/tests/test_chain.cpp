#include <catch2/catch_amalgamated.hpp>

#include "cowu/chain.hpp"
#include "oracles.hpp"

using namespace cowu;

TEST_CASE("transition success probability") {
    CHECK(transition_success_prob(1, 0.0606) == Catch::Approx(0.0606));
    CHECK(transition_success_prob(2, 0.0606) ==
          Catch::Approx(0.11385528).margin(1e-8));
    CHECK(transition_success_prob(0, 0.0606) == 0.0);
}

TEST_CASE("rows of the implied transition matrix sum to 1") {
    for (double p : {0.0606, 0.3, 1.0}) {
        for (int s = 0; s <= 40; ++s) {
            const double go = transition_success_prob(s, p);
            const double stay = s == 0 ? 1.0 : 1.0 - go;
            CHECK(go + stay == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("propagate hand values") {
    {
        auto d = ContentionChain(3, 0.3).propagate(0);
        CHECK(d.prob(3) == 1.0);
        CHECK(d.prob(0) == 0.0);
    }
    {
        auto d = ContentionChain(1, 0.0606).propagate(1);
        CHECK(d.prob(1) == Catch::Approx(0.9394));
        CHECK(d.prob(0) == Catch::Approx(0.0606));
    }
    {
        // only success path: both transitions fire back to back
        auto d = ContentionChain(2, 0.0606).propagate(2);
        CHECK(d.prob(0) == Catch::Approx(0.11385528 * 0.0606).margin(1e-5));
    }
}

TEST_CASE("propagated distributions are normalized and absorbing") {
    ContentionChain chain(6, 0.0606);
    double prev_absorbed = 0.0;
    for (int t = 0; t <= 40; ++t) {
        auto d = chain.propagate(t);
        double total = 0.0;
        for (int s = 0; s <= 6; ++s) {
            CHECK(d.prob(s) >= 0.0);
            total += d.prob(s);
        }
        CHECK(total == Catch::Approx(1.0).margin(1e-12));
        CHECK(d.prob(0) >= prev_absorbed);  // phi_0 nondecreasing in t
        prev_absorbed = d.prob(0);
    }
}

TEST_CASE("success pmf examples") {
    CHECK(success_pmf(0, 5, 0, 0.0606) == 1.0);
    CHECK(success_pmf(1, 1, 1, 0.0606) == Catch::Approx(0.0606));
    CHECK(success_pmf(2, 2, 1, 0.0606) == 0.0);  // one success per slot
    CHECK_THROWS_AS(success_pmf(3, 2, 1, 0.0606), std::domain_error);
}

TEST_CASE("success pmf support and normalization") {
    for (int J : {0, 1, 3, 5}) {
        for (int zeta : {0, 1, 2, 4, 9}) {
            double total = 0.0;
            for (int j = 0; j <= J; ++j) {
                const double v = success_pmf(j, J, zeta, 0.3);
                if (j > zeta) CHECK(v == 0.0);
                total += v;
            }
            CHECK(total == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("enumeration oracle matches the chain") {
    for (double p : {0.0606, 0.3, 1.0}) {
        for (int J = 0; J <= 3; ++J) {
            for (int zeta = 0; zeta <= 4; ++zeta) {
                const auto dist = cowu_test::chain_remaining_dist(J, zeta, p);
                for (int j = 0; j <= J; ++j)
                    CHECK(success_pmf(j, J, zeta, p) ==
                          Catch::Approx(dist[static_cast<size_t>(J - j)])
                              .margin(1e-10));
            }
        }
    }
}

TEST_CASE("absorption approaches certainty") {
    const double p = 0.0606;
    for (int J : {1, 2, 4}) {
        double prev = 0.0;
        for (int zeta = 0; zeta <= 30; ++zeta) {
            const double v = success_pmf(J, J, zeta, p);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        const int horizon = static_cast<int>(10.0 * J / p);
        CHECK(success_pmf(J, J, horizon, p) == Catch::Approx(1.0).margin(0.01));
    }
}

TEST_CASE("success table agrees with success_pmf") {
    SuccessTable table(4, 4, 0.0606);
    CHECK(table.lookup(0, 0, 4) == 1.0);
    for (int J = 0; J <= 4; ++J) {
        for (int t = 0; t <= 4; ++t) {
            double row = 0.0;
            for (int j = 0; j <= J; ++j) {
                CHECK(table.lookup(j, J, t) ==
                      Catch::Approx(success_pmf(j, J, t, 0.0606)).margin(0.0));
                row += table.lookup(j, J, t);
            }
            CHECK(row == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("success table exposes the full trajectory") {
    SuccessTable table(3, 5, 0.3);
    ContentionChain chain(3, 0.3);
    for (int t = 0; t <= 5; ++t) {
        auto d = chain.propagate(t);
        for (int s = 0; s <= 3; ++s)
            CHECK(table.phi(3, t, s) == Catch::Approx(d.prob(s)).margin(0.0));
    }
}
