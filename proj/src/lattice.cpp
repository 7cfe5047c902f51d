#include "rwre/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwre/errors.hpp"

namespace rwre
{

std::uint64_t slice_size(int d, int n)
{
    if (d < 1 || n < 0)
        throw DomainError("slice_size: need d >= 1 and n >= 0");
    // C(n+d-1, d-1) with exact intermediate division
    std::uint64_t r = 1;
    for (int k = 1; k < d; ++k)
        r = r * static_cast<std::uint64_t>(n + k) / static_cast<std::uint64_t>(k);
    return r;
}

//---------------------------------------------------------------------------//
SliceIndexer::SliceIndexer(int d, int n) : d_(d), n_(n)
{
    if (d < 1 || n < 0)
        throw DomainError("SliceIndexer: need d >= 1 and n >= 0");
    const int rows = n + d + 1;
    const int cols = d + 1;
    binom_.assign(static_cast<std::size_t>(rows) * cols, 0);
    for (int a = 0; a < rows; ++a)
    {
        binom_[a * cols] = 1;
        for (int b = 1; b <= std::min(a, d); ++b)
        {
            binom_[a * cols + b] = binom_[(a - 1) * cols + b - 1]
                                   + (b <= a - 1 ? binom_[(a - 1) * cols + b] : 0);
        }
    }
    size_ = static_cast<std::size_t>(count(d, n));
}

std::uint64_t SliceIndexer::count(int m, int r) const
{
    // C(r + m - 1, m - 1)
    if (m == 0)
        return r == 0 ? 1 : 0;
    if (r < 0)
        return 0;
    return binom_[static_cast<std::size_t>(r + m - 1) * (d_ + 1) + (m - 1)];
}

std::size_t SliceIndexer::index_of(std::span<const int> x) const
{
    // Points with a smaller value in coordinate j (equal prefix) number
    // sum_{v < x_j} count(m, r - v) = count(m + 1, r) - count(m + 1, r - x_j)
    // with m = d - j - 1 trailing parts (hockey stick).
    std::uint64_t idx = 0;
    int r = n_;
    for (int j = 0; j + 1 < d_; ++j)
    {
        int m = d_ - j - 1;
        idx += count(m + 1, r) - count(m + 1, r - x[j]);
        r -= x[j];
    }
    return static_cast<std::size_t>(idx);
}

void SliceIndexer::point_of(std::size_t index, std::span<int> out) const
{
    std::uint64_t rem = index;
    int r = n_;
    for (int j = 0; j + 1 < d_; ++j)
    {
        int m = d_ - j - 1;
        int v = 0;
        while (true)
        {
            std::uint64_t block = count(m, r - v);
            if (rem < block)
                break;
            rem -= block;
            ++v;
        }
        out[j] = v;
        r -= v;
    }
    out[d_ - 1] = r;
}

Coords SliceIndexer::point_of(std::size_t index) const
{
    Coords x(static_cast<std::size_t>(d_));
    point_of(index, x);
    return x;
}

bool SliceIndexer::next(std::span<int> x)
{
    const std::size_t d = x.size();
    if (d <= 1)
        return false;
    // Find rightmost j < d-1 that can be incremented: needs x_{j+1..d-1}
    // to hold at least one unit.
    int tail = x[d - 1];
    for (std::size_t jj = d - 1; jj-- > 0;)
    {
        if (tail > 0)
        {
            ++x[jj];
            --tail;
            for (std::size_t k = jj + 1; k + 1 < d; ++k)
                x[k] = 0;
            x[d - 1] = tail;
            return true;
        }
        tail += x[jj];
    }
    return false;
}

//---------------------------------------------------------------------------//
void check_boundary_direction(std::span<const double> y)
{
    if (y.empty())
        throw DomainError("boundary direction must be non-empty");
    double total = 0;
    for (double v : y)
    {
        if (!(v >= 0))
            throw DomainError("boundary direction entries must be >= 0");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("boundary direction must sum to 1");
}

Coords round_to_slice(std::span<const double> y, int n)
{
    check_boundary_direction(y);
    if (n < 1)
        throw DomainError("round_to_slice: n must be >= 1");
    const std::size_t d = y.size();
    Coords x(d);
    std::vector<double> rem(d);
    int assigned = 0;
    for (std::size_t i = 0; i < d; ++i)
    {
        double t = n * y[i];
        // Absorb representation error so exact multiples land on integers
        double f = std::floor(t + 1e-9);
        x[i] = static_cast<int>(f);
        rem[i] = std::max(0.0, t - f);
        assigned += x[i];
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rem[a] > rem[b];
    });
    for (int k = 0; assigned < n; ++k, ++assigned)
        ++x[order[static_cast<std::size_t>(k) % d]];
    // Overshoot can only come from the floor tolerance
    for (std::size_t i = d; assigned > n && i-- > 0;)
    {
        while (assigned > n && x[i] > 0)
        {
            --x[i];
            --assigned;
        }
    }
    return x;
}

double multinomial_log_count(std::span<const int> x)
{
    long n = 0;
    double s = 0;
    for (int v : x)
    {
        if (v < 0)
            throw DomainError("slice point coordinates must be >= 0");
        n += v;
        s -= std::lgamma(v + 1.0);
    }
    return std::lgamma(n + 1.0) + s;
}

}  // namespace rwre
