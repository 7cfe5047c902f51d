#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/diagnostics.hpp"
#include "rwre/errors.hpp"

using namespace rwre;

TEST_CASE("sample statistics")
{
    std::vector<double> v = {1, 2, 3, 4};
    auto s = sample_stats(v);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.std_error == doctest::Approx(std::sqrt((5.0 / 3) / 4)));
    std::vector<double> one = {7};
    CHECK(sample_stats(one).std_error == 0.0);
}

TEST_CASE("replica estimates are ordered and reproducible")
{
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 3);
    auto a = replica_log_w(m, 30, 16, 99);
    auto b = replica_log_w(m, 30, 16, 99);
    CHECK(a == b);
    for (int r = 0; r < 16; ++r)
        CHECK(a[r] == run_walk(replica_model(m, 99, r), 30).records.back().log_w);
    auto g = gap_estimate(m, 30, 16, 99);
    CHECK(g.mean_gap == doctest::Approx(sample_stats(a).mean / 30));
    CHECK(g.epsilon == 0.5);
    CHECK_THROWS_AS(gap_estimate(m, 30, 1, 99), DomainError);

    auto zero = gap_estimate(m, 0.0, 30, 8, 99);
    CHECK(zero.mean_gap == 0.0);
    CHECK(zero.std_error == 0.0);
}

TEST_CASE("fractional moment")
{
    std::vector<double> lw = {0.0, std::log(4.0)};
    auto f = fractional_from_log_w(lw, 2, 0.5);
    CHECK(f.value == doctest::Approx(std::log(1.5) / 1.0));
    CHECK_THROWS_AS(fractional_from_log_w(lw, 2, 1.5), DomainError);

    // theta = 1 estimates log E[W_n] / n, close to 0 since E[W_n] = 1
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.3, SharedSign{}, 1);
    auto one = fractional_moment(m, 10, 1.0, 400, 5);
    CHECK(std::abs(one.value) < 4 * one.std_error + 1e-12);
}

TEST_CASE("Doob split reproduces -log W_n")
{
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 12);
    auto s = run_walk(m, 25);
    DoobOptions opt;
    opt.resamples = 64;
    auto dd = doob_decompose(s, m, opt);
    REQUIRE(dd.steps.size() == 25);
    for (std::size_t k = 0; k < dd.steps.size(); ++k)
    {
        const auto& st = dd.steps[k];
        CHECK(std::abs(st.m + st.a + s.records[k].log_w) < 1e-10);
        CHECK(st.cond_neglog >= 0);
        CHECK(st.i_n == s.records[k].i);
    }
    // Level 0 has a single site: U_1 = eps xi exactly
    CHECK(dd.steps[0].cond_u2 == doctest::Approx(0.25));
    CHECK(dd.steps[0].cond_u2_se == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dd.sigma2 == doctest::Approx(0.25));

    opt.resamples = 8;
    CHECK_THROWS_AS(doob_decompose(s, m, opt), DomainError);
    opt.resamples = 32;
    CHECK_THROWS_AS(doob_decompose(s, m.with_seed(13), opt), InvariantError);
}

TEST_CASE("second moment: one dimension closed form")
{
    for (double eps : {0.0, 0.2, 0.5, 0.9})
    {
        auto m = EnvironmentModel::perturbed(1, uniform_alpha(1), eps, SharedSign{}, 0);
        auto c = second_moment_exact(m, 50);
        for (int n = 1; n <= 50; ++n)
            CHECK(oracle::rel_diff(c.ew2[n - 1], std::pow(1 + eps * eps, n)) < 1e-10);
    }
}

TEST_CASE("second moment: pair enumeration and environment enumeration")
{
    for (int d : {2, 3})
    {
        for (double eps : {0.3, 0.8})
        {
            auto m = EnvironmentModel::perturbed(d, uniform_alpha(d), eps, SharedSign{}, 0);
            auto c = second_moment_exact(m, 4);
            auto s = second_moment_serial(m, 4);
            for (int n = 1; n <= 4; ++n)
            {
                double o = oracle::pair_second_moment(m, n);
                CHECK(oracle::rel_diff(c.ew2[n - 1], o) < 1e-10);
                CHECK(oracle::rel_diff(s.ew2[n - 1], o) < 1e-10);
            }
        }
    }
    // The pair factorization itself against averaging W_n^2 over all environments
    auto m = EnvironmentModel::finite_iid(
        2, {{0.1, 0.5, 0.2, 0.2}, {0.4, 0.3, 0.2, 0.1}, {0.3, 0.3, 0.2, 0.2}},
        {0.2, 0.5, 0.3}, 0);
    auto c = second_moment_exact(m, 3);
    for (int n = 1; n <= 3; ++n)
    {
        double e = oracle::enumerated_second_moment(m, n);
        CHECK(oracle::rel_diff(oracle::pair_second_moment(m, n), e) < 1e-12);
        CHECK(oracle::rel_diff(c.ew2[n - 1], e) < 1e-10);
    }
}

TEST_CASE("second moment: gather kernel matches scatter reference")
{
    std::vector<double> alpha = {0.3, 0.1, 0.1, 0.2, 0.2, 0.1};  // SharedSign-compatible
    auto m = EnvironmentModel::perturbed(3, alpha, 0.6, SharedSign{}, 0);
    auto a = second_moment_exact(m, 40);
    auto b = second_moment_serial(m, 40);
    for (std::size_t k = 0; k < a.ew2.size(); ++k)
        CHECK(oracle::rel_diff(a.ew2[k], b.ew2[k]) < 1e-10);
}

TEST_CASE("second moment: degenerate laws stay at one")
{
    auto flat = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.0, SharedSign{}, 0);
    for (double v : second_moment_exact(flat, 30).ew2)
        CHECK(v == 1.0);
    FiniteTable bal{{{1, -1, 1, -1}, {-1, 1, -1, 1}}, {0.5, 0.5}};
    auto b = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.7, bal, 0);
    for (double v : second_moment_exact(b, 30).ew2)
        CHECK(v == 1.0);
}

TEST_CASE("second moment: growth classification")
{
    auto d2 = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 0);
    auto c2 = second_moment_exact(d2, 400);
    CHECK(classify_growth(c2) == GrowthTag::diverging_trend);

    auto d4 = EnvironmentModel::perturbed(4, uniform_alpha(4), 0.1, SharedSign{}, 0);
    auto c4 = second_moment_exact(d4, 40);
    CHECK(classify_growth(c4) == GrowthTag::bounded_trend);
    CHECK(c4.slope >= 0);

    auto short_curve = second_moment_exact(d4, 10);
    CHECK_THROWS_AS(classify_growth(short_curve), DomainError);
    CHECK_THROWS_AS(second_moment_exact(d4, 200, 1 << 20), ResourceError);
    CHECK(to_string(GrowthTag::bounded_trend) == "bounded-trend");
}
