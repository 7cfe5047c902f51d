#include <doctest.h>

#include <cmath>
#include <string>

#include "rwre/env.hpp"
#include "rwre/errors.hpp"

using namespace rwre;

namespace
{

FiniteTable balanced_table()
{
    // Psi is constant: the xi mass moves between +e_1 and +e_2 only.
    return FiniteTable{{{1, -1, 1, -1}, {-1, 1, -1, 1}}, {0.5, 0.5}};
}

}  // namespace

TEST_CASE("shared sign weights and exact statistics")
{
    const double eps = 0.3;
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), eps, SharedSign{}, 11);
    REQUIRE(m.support_size() == 2);
    CHECK(m.support_weights(0).plus(0) == doctest::Approx(0.25 * 1.3));
    CHECK(m.support_weights(0).minus(0) == doctest::Approx(0.25 * 0.7));
    CHECK(m.support_weights(1).plus(1) == doctest::Approx(0.25 * 0.7));

    const auto& st = m.stats();
    CHECK(st.c == doctest::Approx(0.5));
    CHECK(st.lambda == doctest::Approx(std::log(0.5)));
    CHECK(st.kappa == doctest::Approx(0.25 * 0.7));
    CHECK(st.sigma2 == doctest::Approx(eps * eps));
    CHECK(st.psi_nondegenerate);
    CHECK(st.rho_at(0, 1) == doctest::Approx(1 + eps * eps));
    // (E[e^{2 Psi}] - c^2) / c = c eps^2
    CHECK(st.second_moment_const == doctest::Approx(0.5 * eps * eps));
    CHECK(m.support_xi(0) == 1.0);
    CHECK(m.support_xi(1) == -1.0);
}

TEST_CASE("zero disorder and balanced xi are degenerate")
{
    auto flat = EnvironmentModel::perturbed(3, uniform_alpha(3), 0.0, SharedSign{}, 1);
    CHECK_FALSE(flat.stats().psi_nondegenerate);
    CHECK(flat.stats().sigma2 == 0.0);
    CHECK(flat.support_excess(0) == 0.0);

    auto bal = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.8, balanced_table(), 1);
    CHECK_FALSE(bal.stats().psi_nondegenerate);
    CHECK(bal.stats().sigma2 == 0.0);
    CHECK(bal.stats().second_moment_const == 0.0);
    CHECK(bal.support_excess(0) == 0.0);
    CHECK(bal.support_excess(1) == 0.0);
}

TEST_CASE("validation rejects malformed laws")
{
    auto a = uniform_alpha(2);
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, a, 1.0, SharedSign{}, 0), DomainError);
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, a, -0.1, SharedSign{}, 0), DomainError);
    CHECK_THROWS_AS(EnvironmentModel::perturbed(0, {}, 0.1, SharedSign{}, 0), DomainError);

    std::vector<double> bad_sum = {0.3, 0.3, 0.3, 0.3};
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, bad_sum, 0.1, SharedSign{}, 0), DomainError);

    // SharedSign needs equal alpha mass on V+ and V-
    std::vector<double> skew = {0.3, 0.3, 0.2, 0.2};
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, skew, 0.1, SharedSign{}, 0), DomainError);

    // sup |r| must be 1
    FiniteTable small{{{0.5, -0.5, 0.5, -0.5}, {-0.5, 0.5, -0.5, 0.5}}, {0.5, 0.5}};
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, a, 0.1, small, 0), DomainError);

    // not mean zero
    FiniteTable biased{{{1, -1, 1, -1}, {-1, 1, -1, 1}}, {0.7, 0.3}};
    CHECK_THROWS_AS(EnvironmentModel::perturbed(2, a, 0.1, biased, 0), DomainError);

    // iid weights must be probability vectors with positive entries
    CHECK_THROWS_AS(EnvironmentModel::finite_iid(1, {{0.5, 0.6}}, {1.0}, 0), DomainError);
    CHECK_THROWS_AS(EnvironmentModel::finite_iid(1, {{1.0, 0.0}}, {1.0}, 0), DomainError);
    CHECK_NOTHROW(EnvironmentModel::finite_iid(1, {{0.6, 0.4}, {0.2, 0.8}}, {0.5, 0.5}, 0));
}

TEST_CASE("site sampling is a pure function of seed and site")
{
    auto m = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 42);
    auto m2 = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 42);
    int plus = 0;
    const int side = 200;
    for (int a = 0; a < side; ++a)
    {
        for (int b = 0; b < side; ++b)
        {
            int x[2] = {a, b};
            auto k = m.site_index(x);
            CHECK(k == m2.site_index(x));
            plus += k == 0;
        }
    }
    // Binomial(40000, 1/2): 5 sigma is 500
    CHECK(std::abs(plus - side * side / 2) < 500);

    auto other = m.with_seed(43);
    int differ = 0;
    for (int a = 0; a < 100; ++a)
    {
        int x[2] = {a, 7};
        differ += m.site_index(x) != other.site_index(x);
    }
    CHECK(differ > 20);
}

TEST_CASE("with_epsilon keeps the environment draw")
{
    auto m = EnvironmentModel::perturbed(3, uniform_alpha(3), 0.2, SharedSign{}, 5);
    auto m9 = m.with_epsilon(0.9);
    for (int a = 0; a < 50; ++a)
    {
        int x[3] = {a, 2 * a, 3};
        CHECK(m.site_index(x) == m9.site_index(x));
    }
    CHECK(m9.epsilon() == 0.9);
    CHECK(m9.stats().sigma2 == doctest::Approx(0.81));
}

TEST_CASE("face reflection permutes into the face frame")
{
    std::vector<double> alpha = {0.4, 0.1, 0.1, 0.4};  // +e1 +e2 -e1 -e2
    auto m = EnvironmentModel::perturbed(2, alpha, 0.0, SharedSign{}, 3);
    auto f = m.on_face({-1, 1});
    CHECK(f.support_weights(0).plus(0) == doctest::Approx(0.1));
    CHECK(f.support_weights(0).minus(0) == doctest::Approx(0.4));
    CHECK(f.support_weights(0).plus(1) == doctest::Approx(0.1));
    CHECK(f.stats().c == doctest::Approx(0.2));

    // Face site x reads the physical site (s_1 x_1, s_2 x_2).
    auto g = EnvironmentModel::perturbed(2, uniform_alpha(2), 0.5, SharedSign{}, 9);
    auto gf = g.on_face({-1, 1});
    for (int a = 1; a < 30; ++a)
    {
        int face_x[2] = {a, 4};
        int phys_x[2] = {-a, 4};
        CHECK(gf.site_index(face_x) == g.site_index(phys_x));
    }
    CHECK_THROWS_AS(g.on_face({1, 0}), DomainError);
}

TEST_CASE("eps_max keeps kappa-ellipticity")
{
    auto a = uniform_alpha(2);
    CHECK(eps_max(a, 0.125) == doctest::Approx(0.5));
    CHECK(eps_max(a, 1.0 / 2000) == doctest::Approx(1 - 4.0 / 2000));
    CHECK_THROWS_AS(eps_max(a, 0.25), DomainError);
    CHECK_THROWS_AS(eps_max(a, 0.0), DomainError);

    const double e = eps_max(a, 0.05);
    auto m = EnvironmentModel::perturbed(2, a, e, SharedSign{}, 0);
    CHECK(m.stats().kappa == doctest::Approx(0.05));
}

TEST_CASE("symmetric alpha from a face direction")
{
    std::vector<double> y = {0.97, 0.01, 0.01, 0.01};
    auto a = symmetric_alpha_from_direction(y);
    REQUIRE(a.size() == 8);
    CHECK(a[0] == doctest::Approx(0.485));
    CHECK(a[4] == doctest::Approx(0.485));
    CHECK(a[1] == doctest::Approx(0.005));
    auto m = EnvironmentModel::perturbed(4, a, 0.95, SharedSign{}, 0);
    CHECK(m.stats().c == doctest::Approx(0.5));
}
