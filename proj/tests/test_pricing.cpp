#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "provol/calibration.hpp"
#include "provol/pricing.hpp"

using namespace provol;
using namespace provol::pricing;

namespace {

const double kStepVol02 = 0.2 / std::sqrt(252.0); // per-step vol for 20% annual

Poly constant_poly(double c) { return Poly{{c}}; }

McConfig config_with(std::uint64_t paths, std::uint64_t seed, int threads = 1) {
    McConfig c;
    c.paths = paths;
    c.seed = seed;
    c.threads = threads;
    return c;
}

} // namespace

TEST_SUITE("pricing") {

TEST_CASE("closed-form call reference values") {
    CHECK(bs_call(100.0, 100.0, 0.03, 1.0, 0.2) ==
          doctest::Approx(9.4134033838530162).epsilon(1e-14));
    CHECK(bs_call(1459.37, 800.0, 0.03, 5.0, 0.25) ==
          doctest::Approx(793.41139273159956).epsilon(1e-14));
}

TEST_CASE("closed-form call: forward-at-the-money identity") {
    // With K = P*exp(rT) the call equals P*(Phi(s/2) - Phi(-s/2)), s = sigma*sqrt(T).
    const double P = 100.0, r = 0.03, T = 1.0, sigma = 0.2;
    const double K = P * std::exp(r * T);
    CHECK(bs_call(P, K, r, T, sigma) ==
          doctest::Approx(P * 0.079655674554057963).epsilon(1e-13));
}

TEST_CASE("closed-form call: limits and monotonicity") {
    // vanishing volatility recovers the discounted intrinsic value
    CHECK(bs_call(100.0, 80.0, 0.0, 1.0, 1e-9) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(bs_call(100.0, 120.0, 0.0, 1.0, 1e-9) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    double prev = 0.0;
    for (double sigma = 0.05; sigma <= 1.0; sigma += 0.05) {
        const double c = bs_call(100.0, 100.0, 0.03, 1.0, sigma);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(bs_call(-1.0, 100.0, 0.0, 1.0, 0.2), std::domain_error);
    CHECK_THROWS_AS(bs_call(100.0, 100.0, 0.0, 0.0, 0.2), std::domain_error);
}

TEST_CASE("sensitivity to volatility: log-space evaluation") {
    SUBCASE("deep in-the-money short-dated value survives underflow") {
        const double v = bs_vega(1459.37, 800.0, 0.03, 1.0 / 12.0, 0.15);
        CHECK(v == doctest::Approx(7.8245412959830813e-41).epsilon(1e-13));
        CHECK(v > 0.0);
    }
    SUBCASE("agrees with the direct density formula where that is representable") {
        const double P = 100.0, K = 110.0, r = 0.02, T = 0.5, sigma = 0.3;
        const double st = sigma * std::sqrt(T);
        const double d1 = (std::log(P / K) + (r + 0.5 * sigma * sigma) * T) / st;
        const double direct =
            P * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * M_PI) * std::sqrt(T);
        CHECK(bs_vega(P, K, r, T, sigma) == doctest::Approx(direct).epsilon(1e-12));
    }
    SUBCASE("matches a central finite difference of the call price") {
        const double P = 120.0, K = 100.0, r = 0.04, T = 2.0, sigma = 0.25, h = 1e-6;
        const double fd =
            (bs_call(P, K, r, T, sigma + h) - bs_call(P, K, r, T, sigma - h)) / (2.0 * h);
        CHECK(bs_vega(P, K, r, T, sigma) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("implied volatility round trip") {
    const double P = 100.0, K = 105.0, r = 0.03, T = 1.5, sigma = 0.27;
    const IvResult iv = implied_vol(bs_call(P, K, r, T, sigma), P, K, r, T);
    REQUIRE(iv.valid);
    CHECK(iv.reason == IvFailure::none);
    CHECK(iv.sigma == doctest::Approx(sigma).epsilon(1e-9));
    CHECK(iv.vega > 0.0);
}

TEST_CASE("implied volatility round trips across random contracts") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> uP(50.0, 2000.0);
    std::uniform_real_distribution<double> uk(0.5, 2.0);
    std::uniform_real_distribution<double> uT(1.0 / 12.0, 5.0);
    std::uniform_real_distribution<double> us(0.05, 0.5);
    std::uniform_real_distribution<double> ur(0.0, 0.06);
    int recovered = 0;
    for (int i = 0; i < 100; ++i) {
        const double P = uP(gen), K = uk(gen) * P, T = uT(gen), sigma = us(gen), r = ur(gen);
        const IvResult iv = implied_vol(bs_call(P, K, r, T, sigma), P, K, r, T);
        if (iv.valid) {
            CHECK(std::fabs(iv.sigma - sigma) <= 1e-7);
            ++recovered;
        } else {
            // Only vanishing sensitivity may excuse a failure: either the
            // guard fired, or the price collapsed onto the intrinsic value
            // in double precision (deep in the money, negligible Vega).
            CHECK((iv.reason == IvFailure::vega_guard ||
                   iv.reason == IvFailure::arbitrage_bound));
            CHECK(bs_vega(P, K, r, T, sigma) < 2.0 * default_vega_guard);
        }
    }
    CHECK(recovered >= 60); // most random contracts are informative
}

TEST_CASE("implied volatility failure taxonomy") {
    const double P = 1459.37, K = 800.0, r = 0.03, T = 1.0 / 12.0;
    const double intrinsic = P - K * std::exp(-r * T);

    SUBCASE("at or below intrinsic value") {
        const IvResult a = implied_vol(intrinsic, P, K, r, T);
        CHECK_FALSE(a.valid);
        CHECK(a.reason == IvFailure::arbitrage_bound);
        const IvResult b = implied_vol(intrinsic - 1e-12, P, K, r, T);
        CHECK(b.reason == IvFailure::arbitrage_bound);
        const IvResult c = implied_vol(P, P, K, r, T); // at the spot bound
        CHECK(c.reason == IvFailure::arbitrage_bound);
    }
    SUBCASE("a hair above intrinsic: root exists but is insensitive") {
        const IvResult iv = implied_vol(intrinsic + 1e-12, P, K, r, T);
        CHECK_FALSE(iv.valid);
        CHECK(iv.reason == IvFailure::vega_guard);
        CHECK(iv.sigma > 0.0); // the root is still reported
        CHECK(iv.vega < default_vega_guard);
    }
    SUBCASE("below the lower bracket price") {
        const IvResult iv = implied_vol(0.001, 100.0, 100.0, 0.0, 1.0);
        CHECK_FALSE(iv.valid);
        CHECK(iv.reason == IvFailure::no_bracket);
    }
    SUBCASE("above the upper bracket price") {
        const IvResult iv = implied_vol(99.0, 100.0, 100.0, 0.0, 1.0);
        CHECK_FALSE(iv.valid);
        CHECK(iv.reason == IvFailure::no_bracket);
    }
    SUBCASE("a raised guard rejects an otherwise healthy root") {
        const double price = bs_call(100.0, 100.0, 0.0, 1.0, 0.25);
        const IvResult iv = implied_vol(price, 100.0, 100.0, 0.0, 1.0, 1e9);
        CHECK_FALSE(iv.valid);
        CHECK(iv.reason == IvFailure::vega_guard);
        CHECK(iv.sigma == doctest::Approx(0.25).epsilon(1e-9));
    }
    SUBCASE("failure labels") {
        CHECK(std::string(to_string(IvFailure::none)) == "");
        CHECK(std::string(to_string(IvFailure::arbitrage_bound)) == "arbitrage-bound");
        CHECK(std::string(to_string(IvFailure::no_bracket)) == "no-bracket");
        CHECK(std::string(to_string(IvFailure::vega_guard)) == "vega-guard");
    }
}

TEST_CASE("monte carlo with constant per-step volatility matches the closed form") {
    const Poly g = constant_poly(kStepVol02);
    const Poly f = constant_poly(0.0);
    for (double K : {80.0, 100.0, 120.0}) {
        const OptionSpec spec{K, 1.0, 0.03, 100.0, 100.0};
        const McResult mc = mc_euro_call(f, g, spec, config_with(20000, 1));
        const double bs = bs_call(100.0, K, 0.03, 1.0, 0.2);
        CAPTURE(K);
        CHECK(std::fabs(mc.price - bs) <= 3.0 * mc.std_error);
        CHECK(mc.std_error > 0.0);
        CHECK(mc.paths == 20000);
        CHECK(mc.clamp_count == 0);
    }
}

TEST_CASE("a zero-strike call is the discounted expected terminal price (martingale check)") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec spec{0.0, 1.0, 0.03, 1462.42, 1459.37};
    const McResult mc = mc_euro_call(f_tilde, g_tilde, spec, config_with(50000, 2));
    CHECK(std::fabs(mc.price - 1459.37) <= 3.0 * mc.std_error);
}

TEST_CASE("martingale property holds across random surrogate volatilities") {
    // ten random per-step volatility levels inside (0, 0.6*sqrt(dt))
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> uvol(1e-3, 0.6 / std::sqrt(252.0));
    std::uniform_real_distribution<double> uf(-0.5, 0.5);
    for (int i = 0; i < 10; ++i) {
        const Poly g = constant_poly(uvol(gen));
        const Poly f{{uf(gen), uf(gen)}}; // arbitrary; must not affect pricing
        const OptionSpec spec{0.0, 1.0 / 12.0, 0.03, 100.0, 101.0};
        const McResult mc =
            mc_euro_call(f, g, spec, config_with(8000, static_cast<std::uint64_t>(i)));
        CAPTURE(i);
        CHECK(std::fabs(mc.price - 101.0) <= 3.0 * mc.std_error);
    }
}

TEST_CASE("pathwise put-call parity") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const double K = 800.0, T = 1.0 / 12.0, r = 0.03;
    const OptionSpec spec{K, T, r, 1462.42, 1459.37};
    const OptionSpec spec0{0.0, T, r, 1462.42, 1459.37};
    const McConfig cfg = config_with(20000, 3);
    const McResult call = mc_euro_call(f_tilde, g_tilde, spec, cfg);
    const McResult put = mc_euro_put(f_tilde, g_tilde, spec, cfg);
    const McResult forward = mc_euro_call(f_tilde, g_tilde, spec0, cfg);
    const double lhs = call.price - put.price;
    const double rhs = forward.price - K * std::exp(-r * T);
    CHECK(std::fabs(lhs - rhs) <= 1e-10);
}

TEST_CASE("maturities must be whole numbers of trading-day steps") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const McConfig cfg = config_with(16, 0);
    OptionSpec spec{800.0, 1.3 / 252.0, 0.03, 1462.42, 1459.37};
    CHECK_THROWS_AS(mc_euro_call(f_tilde, g_tilde, spec, cfg), std::domain_error);
    spec.maturity_years = -1.0;
    CHECK_THROWS_AS(mc_euro_call(f_tilde, g_tilde, spec, cfg), std::domain_error);
    spec.maturity_years = 0.0;
    CHECK_THROWS_AS(mc_euro_call(f_tilde, g_tilde, spec, cfg), std::domain_error);

    // one month is exactly 21 steps: the two spellings price identically
    spec.maturity_years = 1.0 / 12.0;
    const McResult a = mc_euro_call(f_tilde, g_tilde, spec, cfg);
    spec.maturity_years = 21.0 / 252.0;
    const McResult b = mc_euro_call(f_tilde, g_tilde, spec, cfg);
    CHECK(a.price == b.price);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("volatility-floor activations are counted per step") {
    // a surrogate that is negative everywhere clamps on every step of every path
    const Poly g = constant_poly(-1.0);
    const Poly f = constant_poly(0.0);
    const OptionSpec spec{100.0, 1.0 / 12.0, 0.03, 100.0, 100.0};
    const McResult mc = mc_euro_call(f, g, spec, config_with(100, 0));
    CHECK(mc.clamp_count == 100 * 21);
}

TEST_CASE("worker count never changes the result") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec spec{800.0, 1.0 / 12.0, 0.03, 1462.42, 1459.37};
    const McResult one = mc_euro_call(f_tilde, g_tilde, spec, config_with(20000, 5, 1));
    const McResult three = mc_euro_call(f_tilde, g_tilde, spec, config_with(20000, 5, 3));
    CHECK(one.price == three.price);
    CHECK(one.std_error == three.std_error);
    CHECK(one.clamp_count == three.clamp_count);
}

TEST_CASE("antithetic pairing stays unbiased") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec spec{1459.37, 1.0 / 12.0, 0.03, 1462.42, 1459.37};
    McConfig plain = config_with(20000, 11);
    McConfig anti = plain;
    anti.antithetic = true;
    const McResult a = mc_euro_call(f_tilde, g_tilde, spec, plain);
    const McResult b = mc_euro_call(f_tilde, g_tilde, spec, anti);
    CHECK(std::fabs(a.price - b.price) <= 4.0 * (a.std_error + b.std_error));
    const McResult b2 = mc_euro_call(f_tilde, g_tilde, spec, anti);
    CHECK(b.price == b2.price);
}

TEST_CASE("surface cells equal independent per-cell pricing bit for bit") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec base{0.0, 0.0, 0.03, 1462.42, 1459.37};
    const McConfig cfg = config_with(16384, 9);
    const std::vector<double> strikes{800.0, 1500.0};
    const std::vector<int> months{1, 2};
    const IvSurface surface = iv_surface(f_tilde, g_tilde, base, strikes, months, cfg);
    REQUIRE(surface.cells.size() == 4);
    for (std::size_t t = 0; t < months.size(); ++t) {
        for (std::size_t k = 0; k < strikes.size(); ++k) {
            const OptionSpec spec{strikes[k], months[t] / 12.0, 0.03, 1462.42, 1459.37};
            const McResult cell = mc_euro_call(f_tilde, g_tilde, spec, cfg);
            CHECK(surface.mc_prices[t * strikes.size() + k] == cell.price);
            CHECK(surface.mc_std_errors[t * strikes.size() + k] == cell.std_error);
        }
    }
}

TEST_CASE("surface recovers a constant volatility within tolerance") {
    const Poly g = constant_poly(kStepVol02);
    const Poly f = constant_poly(0.0);
    const OptionSpec base{0.0, 0.0, 0.03, 100.0, 100.0};
    const IvSurface surface =
        iv_surface(f, g, base, {90.0, 100.0, 110.0}, {12}, config_with(50000, 4));
    for (std::size_t k = 0; k < 3; ++k) {
        const IvResult& cell = surface.at(0, k);
        REQUIRE(cell.valid);
        CHECK(std::fabs(cell.sigma - 0.2) < 0.01);
    }
}

TEST_CASE("at-the-money total implied variance grows with maturity") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec base{0.0, 0.0, 0.03, 1462.42, 1459.37};
    const IvSurface surface =
        iv_surface(f_tilde, g_tilde, base, {1459.37}, {12, 24}, config_with(50000, 6));
    REQUIRE(surface.at(0, 0).valid);
    REQUIRE(surface.at(1, 0).valid);
    const double var12 = surface.at(0, 0).sigma * surface.at(0, 0).sigma * 1.0;
    const double var24 = surface.at(1, 0).sigma * surface.at(1, 0).sigma * 2.0;
    CHECK(var24 > var12);
}

TEST_CASE("constant-vol surrogate: total implied variance is nondecreasing per strike") {
    const Poly g = constant_poly(kStepVol02);
    const Poly f = constant_poly(0.0);
    const OptionSpec base{0.0, 0.0, 0.03, 100.0, 100.0};
    const std::vector<double> strikes{90.0, 100.0, 110.0};
    const std::vector<int> months{6, 12};
    const IvSurface surface = iv_surface(f, g, base, strikes, months, config_with(50000, 8));
    for (std::size_t k = 0; k < strikes.size(); ++k) {
        REQUIRE(surface.at(0, k).valid);
        REQUIRE(surface.at(1, k).valid);
        const double v6 = surface.at(0, k).sigma * surface.at(0, k).sigma * 0.5;
        const double v12 = surface.at(1, k).sigma * surface.at(1, k).sigma * 1.0;
        CAPTURE(k);
        CHECK(v12 >= v6 - 1e-4); // equality up to MC noise for a flat vol
    }
}

TEST_CASE("surface input validation") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec base{0.0, 0.0, 0.03, 1462.42, 1459.37};
    const McConfig cfg = config_with(64, 0);
    CHECK_THROWS_AS(iv_surface(f_tilde, g_tilde, base, {}, {1}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(iv_surface(f_tilde, g_tilde, base, {100.0}, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(iv_surface(f_tilde, g_tilde, base, {-5.0}, {1}, cfg), std::domain_error);
    CHECK_THROWS_AS(iv_surface(f_tilde, g_tilde, base, {100.0}, {0}, cfg), std::domain_error);
}

TEST_CASE("sensitivity map matches pointwise evaluation") {
    const VegaMap map = vega_map(1459.37, 0.03, 0.15, {800.0, 1000.0}, {1, 2});
    REQUIRE(map.values.size() == 4);
    CHECK(map.values[0] == bs_vega(1459.37, 800.0, 0.03, 1.0 / 12.0, 0.15));
    CHECK(map.values[1] == bs_vega(1459.37, 1000.0, 0.03, 1.0 / 12.0, 0.15));
    CHECK(map.values[2] == bs_vega(1459.37, 800.0, 0.03, 2.0 / 12.0, 0.15));
    CHECK(map.values[3] == bs_vega(1459.37, 1000.0, 0.03, 2.0 / 12.0, 0.15));
}

TEST_CASE("convergence study: identical seeds have zero spread, distinct seeds do not") {
    auto [f_tilde, g_tilde] = calibration::equity_surrogates();
    const OptionSpec spec{800.0, 1.0 / 12.0, 0.03, 1462.42, 1459.37};
    const std::vector<std::uint64_t> counts{1000, 4000};

    const auto same = convergence_study(f_tilde, g_tilde, spec, counts,
                                        std::vector<std::uint64_t>{7, 7, 7});
    REQUIRE(same.size() == 2);
    CHECK(same[0].paths == 1000);
    CHECK(same[0].std_dev == 0.0);
    CHECK(same[1].std_dev == 0.0);

    const auto spread = convergence_study(f_tilde, g_tilde, spec, counts, 8, 5);
    CHECK(spread[0].std_dev > 0.0);
    CHECK(spread[1].std_dev > 0.0);
    CHECK(spread[0].std_dev > spread[1].std_dev); // more paths, less spread

    const auto replay = convergence_study(f_tilde, g_tilde, spec, counts, 8, 5);
    CHECK(spread[0].std_dev == replay[0].std_dev);

    CHECK_THROWS_AS(
        convergence_study(f_tilde, g_tilde, spec, counts, std::vector<std::uint64_t>{1}),
        std::invalid_argument);
}

} // TEST_SUITE
