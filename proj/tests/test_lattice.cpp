#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"

using namespace rwre;

TEST_CASE("slice sizes are binomial")
{
    CHECK(slice_size(1, 7) == 1);
    CHECK(slice_size(2, 7) == 8);
    CHECK(slice_size(3, 4) == 15);
    CHECK(slice_size(4, 400) == 10827401ULL);  // C(403, 3)
    CHECK(slice_size(5, 0) == 1);
    CHECK_THROWS_AS(slice_size(0, 3), DomainError);
}

TEST_CASE("indexer is a dense bijection in lexicographic order")
{
    for (int d = 1; d <= 5; ++d)
    {
        for (int n = 0; n <= 7; ++n)
        {
            SliceIndexer ix(d, n);
            REQUIRE(ix.size() == slice_size(d, n));
            std::set<Coords> seen;
            Coords walk = ix.point_of(0);
            Coords prev;
            for (std::size_t k = 0; k < ix.size(); ++k)
            {
                Coords x = ix.point_of(k);
                CHECK(std::accumulate(x.begin(), x.end(), 0) == n);
                for (int v : x)
                    CHECK(v >= 0);
                CHECK(ix.index_of(x) == k);
                CHECK(x == walk);
                if (k > 0)
                    CHECK(prev < x);
                seen.insert(x);
                prev = x;
                bool more = SliceIndexer::next(walk);
                CHECK(more == (k + 1 < ix.size()));
            }
            CHECK(seen.size() == ix.size());
        }
    }
}

TEST_CASE("round_to_slice lands on the slice")
{
    std::vector<double> y = {0.97, 0.01, 0.01, 0.01};
    auto x = round_to_slice(y, 400);
    CHECK(x == Coords{388, 4, 4, 4});

    std::vector<double> third = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(round_to_slice(third, 10) == Coords{4, 3, 3});  // tie goes to index 0
    CHECK(round_to_slice(third, 9) == Coords{3, 3, 3});

    std::vector<double> half = {0.5, 0.5};
    CHECK(round_to_slice(half, 7) == Coords{4, 3});

    for (int n = 1; n < 60; ++n)
    {
        std::vector<double> z = {0.123, 0.456, 0.421};
        auto r = round_to_slice(z, n);
        CHECK(std::accumulate(r.begin(), r.end(), 0) == n);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(r[i] - n * z[i]) < 1.0);
    }

    std::vector<double> bad = {0.6, 0.6};
    CHECK_THROWS_AS(round_to_slice(bad, 4), DomainError);
    std::vector<double> neg = {1.5, -0.5};
    CHECK_THROWS_AS(round_to_slice(neg, 4), DomainError);
}

TEST_CASE("multinomial path count")
{
    int x[3] = {2, 1, 1};
    CHECK(std::exp(multinomial_log_count(x)) == doctest::Approx(12.0));
    int y[2] = {5, 0};
    CHECK(multinomial_log_count(y) == doctest::Approx(0.0));
}
