#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/errors.hpp"
#include "rwre/transfer.hpp"

using namespace rwre;

namespace
{

SliceField sweep_to(const EnvironmentModel& m, int n)
{
    SliceField f = SliceField::origin(m.dim());
    for (int k = 0; k < n; ++k)
        f = forward_step(f, m);
    return f;
}

}  // namespace

TEST_CASE("logsumexp is stable")
{
    std::vector<double> v = {1000.0, 1000.0};
    CHECK(logsumexp(v) == doctest::Approx(1000.0 + std::log(2.0)));
    std::vector<double> w = {-1e308, 0.0};
    CHECK(logsumexp(w) == doctest::Approx(0.0));
    CHECK(std::isinf(logsumexp({})));
}

TEST_CASE("psi/pi split")
{
    std::vector<double> w = {0.1, 0.3, 0.4, 0.2};
    auto s = psi_pi_split(WeightVector(w));
    CHECK(s.psi == doctest::Approx(std::log(0.4)));
    CHECK(s.pi[0] == doctest::Approx(0.25));
    CHECK(s.pi[1] == doctest::Approx(0.75));
}

TEST_CASE("forward sweep matches path enumeration")
{
    for (int d : {1, 2, 3})
    {
        for (std::uint64_t seed : {1ULL, 2ULL, 77ULL})
        {
            auto m = EnvironmentModel::perturbed(d, uniform_alpha(d), 0.6, SharedSign{}, seed);
            const int nmax = d == 3 ? 6 : 8;
            Walker walker(m);
            for (int n = 1; n <= nmax; ++n)
            {
                const auto& rec = walker.step();
                auto z = oracle::partition(m, n);
                const auto& f = walker.field();
                REQUIRE(f.logz.size() == z.size());
                for (const auto& [x, v] : z)
                    CHECK(oracle::rel_diff(std::exp(f.logz[f.indexer.index_of(x)]), v) < 1e-12);
                auto o = oracle::overlap(m, n);
                CHECK(oracle::rel_diff(std::exp(rec.log_w), o.w) < 1e-12);
                CHECK(oracle::rel_diff(rec.j, o.j) < 1e-12);
                CHECK(oracle::rel_diff(rec.i, o.i) < 1e-12);
            }
        }
    }
}

TEST_CASE("general finite law matches path enumeration")
{
    auto m = EnvironmentModel::finite_iid(
        2, {{0.1, 0.5, 0.2, 0.2}, {0.4, 0.3, 0.2, 0.1}, {0.25, 0.25, 0.25, 0.25}},
        {0.2, 0.5, 0.3}, 19);
    auto series = run_walk(m, 7);
    for (int n = 1; n <= 7; ++n)
    {
        auto o = oracle::overlap(m, n);
        CHECK(oracle::rel_diff(std::exp(series.records[n - 1].log_w), o.w) < 1e-12);
    }
}

TEST_CASE("parallel and serial kernels agree bit for bit")
{
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    for (int d : {2, 3, 4})
    {
        auto m = EnvironmentModel::perturbed(d, uniform_alpha(d), 0.7, SharedSign{}, 5);
        const int level = d == 2 ? 3000 : d == 3 ? 90 : 30;  // slices above the grain
        auto f = sweep_to(m, level);
        REQUIRE(f.logz.size() > 2048);
        auto a = forward_step(f, m);
        auto b = forward_step_serial(f, m);
        CHECK(a.logz == b.logz);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("step records satisfy their invariants")
{
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.9, SharedSign{}, 3);
    auto s = run_walk(m, 200);
    CHECK(s.records.front().j == 1.0);
    CHECK(s.records.front().i == 1.0);
    double sj = 0;
    for (const auto& r : s.records)
    {
        CHECK(r.j * r.j <= r.i + 1e-12);
        CHECK(r.i <= r.j + 1e-12);
        sj += r.j;
        CHECK(r.cesaro_j == doctest::Approx(sj / r.n));
        // W_n = P(X_n on slice n) / c^n
        CHECK(r.log_w == doctest::Approx(r.log_p_boundary - r.n * m.stats().lambda).epsilon(1e-10));
        CHECK(r.argmax_site.size() == 2);
        CHECK(r.argmax_site[0] + r.argmax_site[1] == r.n - 1);
    }
}

TEST_CASE("degenerate laws give W_n identically one")
{
    auto flat = EnvironmentModel::perturbed(3, uniform_alpha(3), 0.0, SharedSign{}, 3);
    for (const auto& r : run_walk(flat, 40).records)
        CHECK(r.log_w == 0.0);
    FiniteTable bal{{{1, -1, 1, -1}, {-1, 1, -1, 1}}, {0.5, 0.5}};
    auto b = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.7, bal, 3);
    for (const auto& r : run_walk(b, 60).records)
        CHECK(r.log_w == 0.0);
}

TEST_CASE("memory budget is enforced")
{
    auto m = EnvironmentModel::perturbed(4, uniform_alpha(4), 0.5, SharedSign{}, 1);
    WalkOptions opt{1 << 16};
    CHECK_THROWS_AS(run_walk(m, 200, opt), ResourceError);
    Walker w(m, opt);
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 200; ++k)
                w.step();
        }(),
        ResourceError);
    CHECK_THROWS_AS(run_walk(m, 0), DomainError);
}
