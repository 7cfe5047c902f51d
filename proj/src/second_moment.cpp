// Exact second moment of W_n through the replica difference walk.
//
// The difference D = X - X' of two directed replicas lives on
// {z in Z^d : sum z = 0}; it is stored by its first d-1 coordinates in a
// cube [-R, R]^{d-1}, R = N + 1. After k steps only [-k, k]^{d-1} is
// populated.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rwre/diagnostics.hpp"
#include "rwre/errors.hpp"

namespace rwre
{
namespace
{

// Active regions smaller than this are swept by the calling thread.
constexpr double kParallelCells = 4096;

struct DiffLattice
{
    int m{0};        // stored coordinates, d - 1
    int radius{0};   // R
    std::size_t width{1};
    std::vector<std::size_t> stride;
    std::size_t cells{1};
    std::size_t origin{0};

    DiffLattice(int d, int steps) : m(d - 1), radius(steps + 1)
    {
        width = 2 * static_cast<std::size_t>(radius) + 1;
        stride.assign(static_cast<std::size_t>(m), 1);
        for (int a = m - 1; a >= 0; --a)
        {
            stride[a] = cells;
            cells *= width;
        }
        for (int a = 0; a < m; ++a)
            origin += static_cast<std::size_t>(radius) * stride[a];
    }

    // Linear shift of the stored coordinates under the step e_i - e_j.
    std::ptrdiff_t shift(int i, int j) const
    {
        std::ptrdiff_t s = 0;
        if (i < m)
            s += static_cast<std::ptrdiff_t>(stride[i]);
        if (j < m)
            s -= static_cast<std::ptrdiff_t>(stride[j]);
        return s;
    }

    // Visit each cell of [-ext, ext]^m; rows are indexed by the first coordinate.
    template<class F>
    void for_each_in_row(int ext, int row, F&& f) const
    {
        if (m == 0)
        {
            f(origin);
            return;
        }
        std::size_t base = static_cast<std::size_t>(row + radius) * stride[0];
        std::array<int, kMaxDim> z;
        z.fill(-ext);
        while (true)
        {
            std::size_t idx = base;
            for (int a = 1; a < m; ++a)
                idx += static_cast<std::size_t>(z[a] + radius) * stride[a];
            f(idx);
            int a = m - 1;
            for (; a >= 1; --a)
            {
                if (++z[a] <= ext)
                    break;
                z[a] = -ext;
            }
            if (a < 1)
                return;
        }
    }
};

struct PairWeights
{
    std::vector<double> qhat;
    double stay{0};  // sum_i qhat_i^2
};

PairWeights pair_weights(const EnvironmentModel& model)
{
    const auto& st = model.stats();
    PairWeights pw;
    for (int i = 0; i < model.dim(); ++i)
    {
        pw.qhat.push_back(st.q[i] / st.c);
        pw.stay += pw.qhat.back() * pw.qhat.back();
    }
    return pw;
}

void check_budget(int d, int steps, std::size_t budget)
{
    if (steps < 1)
        throw DomainError("second moment: N must be >= 1");
    if (d > 6)
        throw DomainError("second moment: dim must be <= 6");
    std::size_t need = second_moment_memory_bytes(d, steps);
    if (need > budget)
    {
        throw ResourceError("difference lattice for N=" + std::to_string(steps)
                            + " needs " + std::to_string(need)
                            + " bytes, over memory_budget of "
                            + std::to_string(budget) + " bytes");
    }
}

}  // namespace

std::size_t second_moment_memory_bytes(int d, int steps)
{
    double cells = std::pow(2.0 * (steps + 1) + 1, d - 1);
    return static_cast<std::size_t>(2 * sizeof(double) * cells);
}

std::string to_string(GrowthTag tag)
{
    return tag == GrowthTag::diverging_trend ? "diverging-trend" : "bounded-trend";
}

SecondMomentCurve second_moment_exact(const EnvironmentModel& model,
                                      int steps,
                                      std::size_t memory_budget)
{
    const int d = model.dim();
    check_budget(d, steps, memory_budget);
    const auto& st = model.stats();
    const auto pw = pair_weights(model);
    const DiffLattice lat(d, steps);

    struct Move
    {
        std::ptrdiff_t shift;
        double weight;
    };
    std::vector<Move> moves;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j)
                moves.push_back({lat.shift(i, j), pw.qhat[i] * pw.qhat[j]});

    std::vector<double> cur(lat.cells, 0.0), nxt(lat.cells, 0.0);
    cur[lat.origin] = 1.0;
    SecondMomentCurve curve;
    double log_scale = 0;

    for (int k = 0; k < steps; ++k)
    {
        const int ext = k + 1;
        const int rows = lat.m == 0 ? 1 : 2 * ext + 1;
        const bool wide = std::pow(2.0 * ext + 1, lat.m) > kParallelCells;
        // Off-diagonal kernel, gathered per destination
#pragma omp parallel for schedule(static) if (wide)
        for (int r = 0; r < rows; ++r)
        {
            int row = lat.m == 0 ? 0 : r - ext;
            lat.for_each_in_row(ext, row, [&](std::size_t idx) {
                double v = pw.stay * cur[idx];
                for (const auto& mv : moves)
                    v += mv.weight * cur[idx - mv.shift];
                nxt[idx] = v;
            });
        }
        // Collision factors out of the shared site
        const double at0 = cur[lat.origin];
        for (int i = 0; i < d; ++i)
        {
            for (int j = 0; j < d; ++j)
            {
                double extra = at0 * pw.qhat[i] * pw.qhat[j] * (st.rho_at(i, j) - 1.0);
                nxt[lat.origin + lat.shift(i, j)] += extra;
            }
        }
        // The off-diagonal kernel conserves mass, so the collision term alone
        // sets E[W_{k+1}^2] / E[W_k^2] = 1 + P(D_k = 0) sigma^2.
        const double growth = at0 * st.sigma2;
        const double inv = 1.0 / (1.0 + growth);
#pragma omp parallel for schedule(static) if (wide)
        for (int r = 0; r < rows; ++r)
        {
            int row = lat.m == 0 ? 0 : r - ext;
            lat.for_each_in_row(ext, row, [&](std::size_t idx) { nxt[idx] *= inv; });
        }
        log_scale += std::log1p(growth);
        std::swap(cur, nxt);
        curve.n.push_back(k + 1);
        curve.log_ew2.push_back(log_scale);
        curve.ew2.push_back(std::exp(log_scale));
    }
    return curve;
}

SecondMomentCurve second_moment_serial(const EnvironmentModel& model,
                                       int steps,
                                       std::size_t memory_budget)
{
    const int d = model.dim();
    check_budget(d, steps, memory_budget);
    const auto& st = model.stats();
    const auto pw = pair_weights(model);
    const DiffLattice lat(d, steps);

    std::vector<double> cur(lat.cells, 0.0), nxt(lat.cells, 0.0);
    cur[lat.origin] = 1.0;
    SecondMomentCurve curve;
    for (int k = 0; k < steps; ++k)
    {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t idx = 0; idx < lat.cells; ++idx)
        {
            if (cur[idx] == 0.0)
                continue;
            const bool shared = idx == lat.origin;
            for (int i = 0; i < d; ++i)
            {
                for (int j = 0; j < d; ++j)
                {
                    double w = pw.qhat[i] * pw.qhat[j];
                    if (shared)
                        w *= st.rho_at(i, j);
                    nxt[idx + lat.shift(i, j)] += w * cur[idx];
                }
            }
        }
        std::swap(cur, nxt);
        double total = 0;
        for (double v : cur)
            total += v;
        curve.n.push_back(k + 1);
        curve.ew2.push_back(total);
        curve.log_ew2.push_back(std::log(total));
    }
    return curve;
}

GrowthTag classify_growth(SecondMomentCurve& curve, double threshold)
{
    if (curve.log_ew2.size() < 20)
        throw DomainError("classify_growth: curve length must be >= 20");
    const std::size_t len = curve.log_ew2.size();
    // Tail = second half of the increments log E[W_n^2] - log E[W_{n-1}^2]
    const std::size_t first = len / 2;
    double sum = 0;
    for (std::size_t k = first; k < len; ++k)
        sum += curve.log_ew2[k] - curve.log_ew2[k - 1];
    curve.slope = sum / static_cast<double>(len - first);
    curve.threshold = threshold;
    curve.tag = curve.slope > threshold ? GrowthTag::diverging_trend
                                        : GrowthTag::bounded_trend;
    return curve.tag;
}

}  // namespace rwre
