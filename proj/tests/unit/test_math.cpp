#include <doctest.h>

#include "pfl/errors.hpp"
#include "pfl/math.hpp"

#include <cmath>
#include <random>

using namespace pfl;

TEST_CASE("inverse normal CDF hits reference values") {
    // Reference points from the standard normal table at double precision.
    CHECK(inverse_norm_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(inverse_norm_cdf(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-12));
    CHECK(inverse_norm_cdf(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-12));
    CHECK(inverse_norm_cdf(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
    CHECK(inverse_norm_cdf(0.0001) == doctest::Approx(-3.719016485455709).epsilon(1e-11));
    CHECK(inverse_norm_cdf(0.25) == doctest::Approx(-inverse_norm_cdf(0.75)).epsilon(1e-13));
}

TEST_CASE("inverse normal CDF round-trips through the CDF") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-8, 1.0 - 1e-8);
    for (int i = 0; i < 2000; ++i) {
        const double p = u(rng);
        CHECK(norm_cdf(inverse_norm_cdf(p)) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("inverse normal CDF rejects out-of-range probabilities") {
    CHECK_THROWS_AS(inverse_norm_cdf(0.0), InputError);
    CHECK_THROWS_AS(inverse_norm_cdf(1.0), InputError);
    CHECK_THROWS_AS(inverse_norm_cdf(-0.2), InputError);
}

TEST_CASE("quantile index uses the ceil convention and survives fp noise") {
    CHECK(quantile_index(0.95, 100) == 95);  // 0.95*100 must not round up to 96
    CHECK(quantile_index(0.5, 3) == 2);      // ceil(1.5)
    CHECK(quantile_index(0.99, 1000000) == 990000);
    CHECK(quantile_index(0.999, 10) == 10);  // clamp to n
    CHECK(quantile_index(1e-9, 5) == 1);     // clamp to 1
    CHECK(quantile_index(0.05, 100) == 5);   // (1-q) side of the ES block
    CHECK(quantile_index(0.8, 5) == 4);
    CHECK(quantile_index(0.801, 5) == 5);    // strictly above an integer boundary
}

TEST_CASE("norm_pdf matches the density at the usual points") {
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(norm_pdf(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-13));
}
