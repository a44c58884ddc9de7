#include <doctest.h>

#include <cmath>

#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/weight.hpp"

using namespace gelfand;

TEST_CASE("weight factories validate parameters") {
    CHECK_THROWS_AS(Weight::constant(0.0), InvalidParam);
    CHECK_THROWS_AS(Weight::constant(-1.0), InvalidParam);
    CHECK_THROWS_AS(Weight::polynomial(-0.5), InvalidParam);
    CHECK_THROWS_AS(Weight::stretched_exp(0.0, 1.0), InvalidParam);
    CHECK_THROWS_AS(Weight::stretched_exp(1.0, 0.0), InvalidParam);
    CHECK_NOTHROW(Weight::polynomial(0.0));  // degenerates to K = 1
}

TEST_CASE("weight closed forms") {
    const Weight c = Weight::constant(4.0);
    CHECK(c.value(3.0) == 4.0);
    CHECK(c.sqrt_value(3.0) == 2.0);
    CHECK(c.dlog_half(3.0) == 0.0);

    const Weight p = Weight::polynomial(1.0);  // K = (1 + x^2)^{-1}
    CHECK(p.value(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.dlog_half(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(p.dlog_half(-1.0) == doctest::Approx(0.5).epsilon(1e-15));

    const Weight e = Weight::stretched_exp(1.0, 1.0);  // K = e^{-x^2}
    CHECK(e.value(2.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
    CHECK(e.dlog_half(2.0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(e.dlog_half(0.0) == 0.0);
    CHECK(e.dlog_half(-2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("hypothesis gate accepts the admissible families") {
    const HalfGrid g = make_grid(20.0, 256);
    CHECK(validate_assumption_a(Weight::constant(1.0), g).admissible);
    CHECK(validate_assumption_a(Weight::polynomial(2.0), g).admissible);
    CHECK(validate_assumption_a(Weight::stretched_exp(1.0, 1.0), g).admissible);
    CHECK(validate_assumption_a(Weight::stretched_exp(0.5, 0.75), g).admissible);
}

TEST_CASE("hypothesis gate rejects the sharp-cusp stretched exponential") {
    // m <= 1/2 makes d/dx sqrt(K) unbounded at the origin.
    const HalfGrid g = make_grid(20.0, 256);
    const auto rep = validate_assumption_a(Weight::stretched_exp(1.0, 0.25), g);
    CHECK_FALSE(rep.admissible);
    CHECK_FALSE(rep.dsqrt_bounded_ok);
    CHECK(rep.positive_ok);
    CHECK(rep.monotone_ok);
    CHECK(rep.first_violation >= 0);
}

TEST_CASE("slow-decay classification") {
    CHECK(slow_decay_class(Weight::constant(2.0)));
    CHECK(slow_decay_class(Weight::polynomial(1.0)));
    CHECK(slow_decay_class(Weight::stretched_exp(1.0, 0.25)));
    CHECK_FALSE(slow_decay_class(Weight::stretched_exp(1.0, 1.0)));
}

TEST_CASE("describe names the family") {
    CHECK(Weight::constant(1.0).describe().find("const") != std::string::npos);
    CHECK(Weight::polynomial(1.0).describe().find("poly") != std::string::npos);
    CHECK(Weight::stretched_exp(1.0, 1.0).describe().find("stretched") !=
          std::string::npos);
}
