#include <doctest.h>

#include "pfl/errors.hpp"
#include "pfl/limits.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace pfl;

namespace {

Profile make_profile(std::vector<double> values, MetricKind kind = MetricKind::PFE,
                     double q = 0.95) {
    std::vector<int> days;
    for (std::size_t i = 0; i < values.size(); ++i) days.push_back(static_cast<int>(i) * 21);
    return Profile{TimeGrid(std::move(days)), std::move(values), kind, q, ""};
}

LimitSpec spec_of(MetricKind kind, double limit, double q = 0.95) {
    return LimitSpec{"CP", "NS", kind, q, limit};
}

} // namespace

TEST_CASE("check_limit: clean profile, breach with utilization, zero limit") {
    const auto clean = check_limit(make_profile({0.0, 0.0, 0.0}), spec_of(MetricKind::PFE, 1e6));
    CHECK(!clean.breached());
    CHECK(clean.max_utilization == 0.0);
    for (double h : clean.headroom) CHECK(h == 1e6);

    const auto breach =
        check_limit(make_profile({5e6, 12e6, 9e6}), spec_of(MetricKind::PFE, 10e6));
    CHECK(breach.breached());
    CHECK(*breach.first_breach_time == doctest::Approx(21.0 / 252.0));
    CHECK(breach.max_utilization == doctest::Approx(1.2));

    const auto zero = check_limit(make_profile({0.0, 1.0}), spec_of(MetricKind::PFE, 0.0));
    CHECK(zero.breached());
    CHECK(std::isinf(zero.max_utilization));
}

TEST_CASE("check_limit rejects metric and quantile mismatches") {
    CHECK_THROWS_AS(check_limit(make_profile({1.0}, MetricKind::PFL), spec_of(MetricKind::PFE, 1.0)),
                    ConfigError);
    CHECK_THROWS_AS(check_limit(make_profile({1.0}, MetricKind::PFE, 0.95),
                                spec_of(MetricKind::PFE, 1.0, 0.99)),
                    ConfigError);
}

TEST_CASE("adjust_limit shifts aPFL limits and floors at zero") {
    const auto unchanged = adjust_limit(spec_of(MetricKind::aPFL, 1e7), IncurredCVA{0.0});
    CHECK(unchanged.spec.limit == 1e7);
    CHECK(!unchanged.capacity_exhausted);

    const auto shifted = adjust_limit(spec_of(MetricKind::aPFL, 1e7), IncurredCVA{3e6});
    CHECK(shifted.spec.limit == 7e6);

    const auto exhausted = adjust_limit(spec_of(MetricKind::paPFL, 1e6), IncurredCVA{2e6});
    CHECK(exhausted.spec.limit == 0.0);
    CHECK(exhausted.capacity_exhausted);

    CHECK_THROWS_AS(adjust_limit(spec_of(MetricKind::PFE, 1e7), IncurredCVA{1.0}), ConfigError);
    CHECK_THROWS_AS(adjust_limit(spec_of(MetricKind::PFL, 1e7), IncurredCVA{1.0}), ConfigError);
}

TEST_CASE("capacity never grows with incurred CVA under the paired adjustment") {
    // Trading capacity is the clamped headroom max(limit - value, 0): the
    // profile shift saturates at 0 but the limit shift does not, so capacity
    // can only shrink as incurred losses mount.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> losses(5);
        for (auto& v : losses) v = u(rng);
        const double limit = u(rng) + 2.0;
        double prev_capacity = 1e300;
        for (double x = 0.0; x <= 12.0; x += 1.5) {
            std::vector<double> adjusted;
            for (double v : losses) adjusted.push_back(std::max(v - x, 0.0));
            const double adj_limit = std::max(limit - x, 0.0);
            double min_headroom = 1e300;
            for (double v : adjusted) min_headroom = std::min(min_headroom, adj_limit - v);
            const double capacity = std::max(min_headroom, 0.0);
            CHECK(capacity <= prev_capacity + 1e-12);
            prev_capacity = capacity;
        }
    }
}

TEST_CASE("allocate_appetite splits proportionally and conserves the total") {
    const auto single = allocate_appetite(1e8, {{"A", 1.0}});
    REQUIRE(single.size() == 1);
    CHECK(single[0].limit == 1e8);

    const auto three = allocate_appetite(1e8, {{"A", 1.0}, {"B", 1.0}, {"C", 2.0}});
    CHECK(three[0].limit == doctest::Approx(2.5e7));
    CHECK(three[1].limit == doctest::Approx(2.5e7));
    CHECK(three[2].limit == doctest::Approx(5e7));

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 7.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<std::string, double>> weights;
        for (int i = 0; i < 6; ++i) weights.emplace_back("cp" + std::to_string(i), u(rng));
        weights[0].second += 0.1; // keep the sum positive
        const auto specs = allocate_appetite(1e9, weights);
        double total = 0.0;
        for (const auto& s : specs) total += s.limit;
        CHECK(total == doctest::Approx(1e9).epsilon(1e-12));
        // scale equivariance
        const auto doubled = allocate_appetite(2e9, weights);
        for (std::size_t i = 0; i < specs.size(); ++i)
            CHECK(doubled[i].limit == doctest::Approx(2.0 * specs[i].limit).epsilon(1e-12));
    }

    CHECK_THROWS_AS(allocate_appetite(1e8, {{"A", 0.0}, {"B", 0.0}}), ConfigError);
    CHECK_THROWS_AS(allocate_appetite(1e8, {{"A", -1.0}, {"B", 2.0}}), ConfigError);
}

TEST_CASE("limits CSV round trip") {
    const std::string path = "/tmp/pfl_test_limits.csv";
    {
        std::ofstream out(path);
        out << "counterparty,netting_set,metric,q,limit\n";
        out << "CP-1,NS-1,pfe,0.95,20000000\n";
        out << "CP-1,NS-1,apfl,0.99,1.5e7\n";
    }
    const auto specs = load_limits_csv(path);
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].metric == MetricKind::PFE);
    CHECK(specs[0].limit == 2e7);
    CHECK(specs[1].metric == MetricKind::aPFL);
    CHECK(specs[1].q == 0.99);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_limits_csv("/tmp/definitely_missing_limits.csv"), ConfigError);
}
