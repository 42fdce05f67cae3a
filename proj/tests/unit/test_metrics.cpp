#include <doctest.h>

#include "pfl/errors.hpp"
#include "pfl/math.hpp"
#include "pfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace pfl;

namespace {

// Hand-rolled cube for metric tests: values[d][p].
ExposureCube toy_cube(const std::vector<std::vector<double>>& values,
                      const std::vector<double>& shocks = {}) {
    std::vector<int> days;
    for (std::size_t d = 0; d < values.size(); ++d) days.push_back(static_cast<int>(d) * 21);
    ExposureCube cube(TimeGrid(std::move(days)), values.front().size(), 0, "toy", !shocks.empty());
    for (std::size_t d = 0; d < values.size(); ++d)
        for (std::size_t p = 0; p < values[d].size(); ++p)
            cube.set(d, p, values[d][p], shocks.empty() ? 0.0 : shocks[p]);
    return cube;
}

std::vector<double> iota_samples(int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1.0;
    return v;
}

// Independent enumeration oracle: full sort, 1-based ceil indices computed
// by scanning integers.
double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    std::size_t k = n;
    for (std::size_t i = 1; i <= n; ++i) {
        if (static_cast<double>(i) + 1e-9 >= q * static_cast<double>(n)) {
            k = i;
            break;
        }
    }
    return v[k - 1];
}

double oracle_es(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    std::size_t m = n;
    for (std::size_t i = 1; i <= n; ++i) {
        if (static_cast<double>(i) + 1e-9 >= (1.0 - q) * static_cast<double>(n)) {
            m = i;
            break;
        }
    }
    double sum = 0.0;
    for (std::size_t i = n - m; i < n; ++i) sum += v[i];
    return sum / static_cast<double>(m);
}

} // namespace

TEST_CASE("empirical quantile: order statistic at ceil(qn)") {
    CHECK(empirical_quantile(iota_samples(100), 0.95) == 95.0);
    CHECK(empirical_quantile(std::vector<double>{1, 2, 3}, 0.5) == 2.0);
    const std::vector<double> constant(17, 4.25);
    for (double q : {0.01, 0.5, 0.99}) CHECK(empirical_quantile(constant, q) == 4.25);
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), InputError);
    CHECK_THROWS_AS(empirical_quantile(iota_samples(3), 1.0), InputError);
}

TEST_CASE("expected shortfall: mean of the worst ceil((1-q)n)") {
    CHECK(expected_shortfall(iota_samples(100), 0.95) == doctest::Approx(98.0).epsilon(1e-15));
    const std::vector<double> constant(9, -2.5);
    CHECK(expected_shortfall(constant, 0.5) == -2.5);
    CHECK_THROWS_AS(expected_shortfall({}, 0.5), InputError);
}

TEST_CASE("ES dominates the quantile on any sample set") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 10.0);
    std::uniform_real_distribution<double> uq(0.05, 0.99);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> v(1 + rng() % 40);
        for (auto& x : v) x = u(rng);
        const double q = uq(rng);
        CHECK(expected_shortfall(v, q) >= empirical_quantile(v, q) - 1e-12);
    }
}

TEST_CASE("quantile and ES are monotone in q") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> v(257);
    for (auto& x : v) x = u(rng);
    double prev_q = -1e300, prev_es = -1e300;
    for (double q = 0.05; q < 1.0; q += 0.05) {
        const double eq = empirical_quantile(v, q);
        const double es = expected_shortfall(v, q);
        CHECK(eq >= prev_q);
        CHECK(es >= prev_es);
        prev_q = eq;
        prev_es = es;
    }
}

TEST_CASE("pfe profile of a deterministic cube is the constant value") {
    const auto cube = toy_cube({{7.0, 7.0, 7.0, 7.0}, {3.0, 3.0, 3.0, 3.0}});
    const auto prof = pfe_profile(cube, 0.95);
    CHECK(prof.values == std::vector<double>{7.0, 3.0});
    CHECK(prof.kind == MetricKind::PFE);
}

TEST_CASE("unit LGD collapses PFL to the ES of floored exposure") {
    const auto cube = toy_cube({{-1.0, 5.0, 2.0, 8.0, -3.0}});
    const auto pfl = pfl_profile(cube, ConstantLgd{1.0}, 0.6);
    const std::vector<double> floored{0.0, 5.0, 2.0, 8.0, 0.0};
    CHECK(pfl.values[0] == expected_shortfall(floored, 0.6));
}

TEST_CASE("constant LGD factors out of PFL exactly") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(1.0, 4.0);
    std::vector<std::vector<double>> rows(3, std::vector<double>(101));
    for (auto& row : rows)
        for (auto& x : row) x = g(rng);
    const auto cube = toy_cube(rows);
    for (double q : {0.5, 0.8, 0.95}) {
        const auto unit = pfl_profile(cube, ConstantLgd{1.0}, q);
        const auto scaled = pfl_profile(cube, ConstantLgd{0.6}, q);
        for (std::size_t d = 0; d < unit.values.size(); ++d)
            CHECK(scaled.values[d] == 0.6 * unit.values[d]); // bit exact
    }
}

TEST_CASE("correlated LGD with positive loading raises PFL on a long position") {
    // Exposure increasing in the shock: comonotone LGD loading fattens the tail.
    std::vector<double> shocks(64), raw(64);
    for (int i = 0; i < 64; ++i) {
        shocks[i] = (i - 31.5) / 16.0;
        raw[i] = 100.0 + 40.0 * shocks[i];
    }
    const auto cube = toy_cube({raw}, shocks);
    const auto base = pfl_profile(cube, ConstantLgd{0.6}, 0.75);
    const auto corr = pfl_profile(cube, CorrelatedLgd{0.6, 0.15}, 0.75);
    CHECK(corr.values[0] > base.values[0]);
}

TEST_CASE("aPFL reduces to PFL at x = 0, bit-identically") {
    const auto cube = toy_cube({{-2.0, 1.0, 4.0, 9.0}, {0.5, 0.25, 8.0, -1.0}});
    const auto pfl = pfl_profile(cube, ConstantLgd{0.6}, 0.5);
    const auto apfl = apfl_profile(cube, ConstantLgd{0.6}, IncurredCVA{0.0}, 0.5);
    CHECK(apfl.values == pfl.values);
    CHECK(apfl.kind == MetricKind::aPFL);
}

TEST_CASE("aPFL with x above every loss is identically zero") {
    const auto cube = toy_cube({{1.0, 2.0, 3.0}, {0.5, 0.1, 2.0}});
    const auto apfl = apfl_profile(cube, ConstantLgd{1.0}, IncurredCVA{10.0}, 0.5);
    for (double v : apfl.values) CHECK(v == 0.0);
}

TEST_CASE("aPFL two-path toys from first principles") {
    // losses {10, 0}, q = 0.5, x = 4: tail block is {6}, aPFL = 6
    const auto cube_a = toy_cube({{10.0, 0.0}});
    CHECK(apfl_profile(cube_a, ConstantLgd{1.0}, IncurredCVA{4.0}, 0.5).values[0] == 6.0);
    // losses {10, 2}: shifted {6, 0}, top block {6}
    const auto cube_b = toy_cube({{10.0, 2.0}});
    CHECK(apfl_profile(cube_b, ConstantLgd{1.0}, IncurredCVA{4.0}, 0.5).values[0] == 6.0);
    // losses {10, -2}: PFL = 10 but aPFL = 6; the shift acts before flooring
    const auto cube_c = toy_cube({{10.0, -2.0}});
    CHECK(pfl_profile(cube_c, ConstantLgd{1.0}, 0.5).values[0] == 10.0);
    CHECK(apfl_profile(cube_c, ConstantLgd{1.0}, IncurredCVA{4.0}, 0.5).values[0] == 6.0);
}

TEST_CASE("paPFL reduces to aPFL when protection is zero, bit-identically") {
    const auto cube = toy_cube({{-2.0, 1.0, 4.0, 9.0}, {0.5, 0.25, 8.0, -1.0}});
    const auto apfl = apfl_profile(cube, ConstantLgd{0.6}, IncurredCVA{0.7}, 0.5);
    const auto papfl =
        papfl_profile(cube, ConstantLgd{0.6}, IncurredCVA{0.7}, ProtectionProfile{}, 0.5);
    CHECK(papfl.values == apfl.values);
}

TEST_CASE("full protection floors paPFL to zero") {
    const auto cube = toy_cube({{5.0, 3.0}, {2.0, 1.0}});
    const auto y = protection_profile(100.0, 10.0, 1.0); // 100 of cover
    const auto papfl = papfl_profile(cube, ConstantLgd{1.0}, IncurredCVA{0.0}, y, 0.5);
    for (double v : papfl.values) CHECK(v == 0.0);
}

TEST_CASE("reduction chain paPFL(0,0) = aPFL(0) = PFL holds bit for bit") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(2.0, 6.0);
    std::vector<std::vector<double>> rows(4, std::vector<double>(83));
    for (auto& row : rows)
        for (auto& x : row) x = g(rng);
    const auto cube = toy_cube(rows);
    const auto pfl = pfl_profile(cube, ConstantLgd{0.6}, 0.9);
    const auto apfl = apfl_profile(cube, ConstantLgd{0.6}, IncurredCVA{0.0}, 0.9);
    const auto papfl =
        papfl_profile(cube, ConstantLgd{0.6}, IncurredCVA{0.0}, ProtectionProfile{}, 0.9);
    CHECK(pfl.values == apfl.values);
    CHECK(apfl.values == papfl.values);
}

TEST_CASE("doubling every currency input doubles the metrics exactly") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g(1.0, 3.0);
    std::vector<std::vector<double>> rows(2, std::vector<double>(64));
    for (auto& row : rows)
        for (auto& x : row) x = g(rng);
    auto doubled = rows;
    for (auto& row : doubled)
        for (auto& x : row) x *= 2.0;

    const auto cube1 = toy_cube(rows);
    const auto cube2 = toy_cube(doubled);
    const double q = 0.8;
    const auto lgd = ConstantLgd{0.6};
    const auto y1 = protection_profile(3.0, 0.25, 1.0);
    const auto y2 = protection_profile(6.0, 0.25, 1.0);

    const auto pfe1 = pfe_profile(cube1, q), pfe2 = pfe_profile(cube2, q);
    const auto pfl1 = pfl_profile(cube1, lgd, q), pfl2 = pfl_profile(cube2, lgd, q);
    const auto ap1 = apfl_profile(cube1, lgd, IncurredCVA{0.5}, q);
    const auto ap2 = apfl_profile(cube2, lgd, IncurredCVA{1.0}, q);
    const auto pap1 = papfl_profile(cube1, lgd, IncurredCVA{0.5}, y1, q);
    const auto pap2 = papfl_profile(cube2, lgd, IncurredCVA{1.0}, y2, q);
    for (std::size_t d = 0; d < pfe1.values.size(); ++d) {
        CHECK(pfe2.values[d] == 2.0 * pfe1.values[d]);
        CHECK(pfl2.values[d] == 2.0 * pfl1.values[d]);
        CHECK(ap2.values[d] == 2.0 * ap1.values[d]);
        CHECK(pap2.values[d] == 2.0 * pap1.values[d]);
    }
}

TEST_CASE("all metrics match exhaustive enumeration on tiny cubes") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> uq(0.05, 0.95);
    std::uniform_real_distribution<double> ux(0.0, 5.0);

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n_paths = 1 + rng() % 8;
        const std::size_t n_dates = 1 + rng() % 4;
        std::vector<std::vector<double>> rows(n_dates, std::vector<double>(n_paths));
        for (auto& row : rows)
            for (auto& x : row) x = u(rng);
        const auto cube = toy_cube(rows);
        const double q = uq(rng);
        const double lgd = 0.1 + 0.9 * uq(rng);
        const double x = ux(rng);
        const double y = ux(rng);
        const auto prot = protection_profile(y, 100.0, 1.0);

        const auto pfe = pfe_profile(cube, q);
        const auto pfl = pfl_profile(cube, ConstantLgd{lgd}, q);
        const auto apfl = apfl_profile(cube, ConstantLgd{lgd}, IncurredCVA{x}, q);
        const auto papfl = papfl_profile(cube, ConstantLgd{lgd}, IncurredCVA{x}, prot, q);

        for (std::size_t d = 0; d < n_dates; ++d) {
            std::vector<double> floored(n_paths), losses(n_paths), adj(n_paths), padj(n_paths);
            for (std::size_t p = 0; p < n_paths; ++p) {
                floored[p] = std::max(rows[d][p], 0.0);
                losses[p] = std::max(lgd * rows[d][p], 0.0);
                adj[p] = std::max(lgd * rows[d][p] - x, 0.0);
                padj[p] = std::max(lgd * rows[d][p] - x - y, 0.0);
            }
            CHECK(pfe.values[d] == oracle_quantile(floored, q));
            CHECK(pfl.values[d] == doctest::Approx(oracle_es(losses, q)).epsilon(1e-15));
            CHECK(apfl.values[d] == doctest::Approx(oracle_es(adj, q)).epsilon(1e-15));
            CHECK(papfl.values[d] == doctest::Approx(oracle_es(padj, q)).epsilon(1e-15));
        }
    }
}

TEST_CASE("incurred CVA is zero without spread and closed-form for flat exposure") {
    // Exposure pinned at E over a fine grid: X = lgd E (1 - e^{-hazard T}).
    const std::size_t n_dates = 400;
    std::vector<std::vector<double>> rows(n_dates, std::vector<double>(3, 2.5e6));
    std::vector<int> days;
    for (std::size_t d = 0; d < n_dates; ++d) days.push_back(static_cast<int>(d + 1) * 6);
    ExposureCube cube(TimeGrid(std::move(days)), 3, 0, "flat", false);
    for (std::size_t d = 0; d < n_dates; ++d)
        for (std::size_t p = 0; p < 3; ++p) cube.set(d, p, 2.5e6);

    CHECK(incurred_cva(cube, CreditCurve{0.0, 0.6}, ConstantLgd{0.6}).x == 0.0);

    const CreditCurve curve{0.15, 0.6};
    CHECK(curve.hazard() == doctest::Approx(0.25).epsilon(1e-15));
    const double T = cube.grid().years().back();
    const double expected = 0.6 * 2.5e6 * (1.0 - std::exp(-0.25 * T));
    // telescoping survival sum makes this exact for flat exposure
    CHECK(incurred_cva(cube, curve, ConstantLgd{0.6}).x ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("forward CVA schedule is the remaining tail of the survival sum") {
    const auto cube = toy_cube({{1e6, 2e6}, {1.5e6, 0.5e6}, {2e6, 1e6}});
    const CreditCurve curve{0.15, 0.6};
    const auto lgd = ConstantLgd{0.6};
    const auto sched = forward_cva_schedule(cube, curve, lgd);
    const double total = incurred_cva(cube, curve, lgd).x;
    REQUIRE(sched.size() == 3);
    CHECK(sched.back() == 0.0);
    // the grid starts at t = 0 where no survival mass has decayed yet
    CHECK(sched.front() == doctest::Approx(total).epsilon(1e-12));
    CHECK(sched[1] < sched.front());
    for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] <= sched[i - 1]);
}

TEST_CASE("protection profile: flat to maturity, zero after, additive") {
    const auto y = protection_profile(1e7, 5.0, 0.6);
    CHECK(y.at(0.0) == 6e6);
    CHECK(y.at(5.0) == 6e6); // inclusive at maturity
    CHECK(y.at(5.0 + 1e-9) == 0.0);
    CHECK(protection_profile(0.0, 5.0, 0.6).at(1.0) == 0.0);

    const auto sum = combine({protection_profile(1e7, 3.0, 0.5), protection_profile(2e7, 7.0, 0.6)});
    CHECK(sum.at(2.0) == doctest::Approx(5e6 + 1.2e7));
    CHECK(sum.at(5.0) == doctest::Approx(1.2e7));
    CHECK(sum.at(8.0) == 0.0);
}

TEST_CASE("lgd models stay inside [0, 1] and step correctly") {
    CHECK_THROWS_AS(validate_lgd(ConstantLgd{1.5}), ConfigError);
    TermStructureLgd ts{{{0.0, 0.4}, {2.0, 0.7}}};
    CHECK(lgd_value(ts, 1.0, 0.0) == 0.4);
    CHECK(lgd_value(ts, 2.0, 0.0) == 0.7);
    CHECK(lgd_value(ts, 9.0, 0.0) == 0.7);
    const CorrelatedLgd c{0.6, 0.5};
    CHECK(lgd_value(c, 1.0, 10.0) == 1.0);  // clamped above
    CHECK(lgd_value(c, 1.0, -10.0) == 0.0); // clamped below
    CHECK(lgd_value(c, 1.0, 0.2) == doctest::Approx(0.7));
}
