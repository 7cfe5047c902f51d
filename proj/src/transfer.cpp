#include "rwre/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "rwre/errors.hpp"

namespace rwre
{
namespace
{

// Below this many points a slice is swept by the calling thread.
constexpr std::size_t kParallelGrain = 2048;

constexpr double kSandwichSlack = 1e-12;

// Contiguous [begin, end) block of the calling thread.
std::pair<std::size_t, std::size_t> thread_block(std::size_t size)
{
    auto nt = static_cast<std::size_t>(omp_get_num_threads());
    auto t = static_cast<std::size_t>(omp_get_thread_num());
    return {size * t / nt, size * (t + 1) / nt};
}

}  // namespace

SliceField SliceField::origin(int d)
{
    return SliceField{SliceIndexer(d, 0), std::vector<double>{0.0}};
}

PsiPiSplit psi_pi_split(const WeightVector& w)
{
    PsiPiSplit out;
    double s = w.positive_sum();
    out.psi = std::log(s);
    out.pi.resize(static_cast<std::size_t>(w.dim()));
    for (int i = 0; i < w.dim(); ++i)
        out.pi[i] = w.plus(i) / s;
    return out;
}

double logsumexp(std::span<const double> v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v)
        m = std::max(m, x);
    if (!std::isfinite(m))
        return m;
    double s = 0;
    for (double x : v)
        s += std::exp(x - m);
    return m + std::log(s);
}

std::vector<std::uint32_t> slice_sites(const SliceField& field,
                                       const EnvironmentModel& model)
{
    const auto& ix = field.indexer;
    const std::size_t size = ix.size();
    std::vector<std::uint32_t> sites(size);
#pragma omp parallel if (size > kParallelGrain)
    {
        auto [begin, end] = thread_block(size);
        if (begin < end)
        {
            std::array<int, kMaxDim> x{};
            std::span<int> xs(x.data(), static_cast<std::size_t>(ix.dim()));
            ix.point_of(begin, xs);
            for (std::size_t k = begin; k < end; ++k)
            {
                sites[k] = model.site_index(xs);
                SliceIndexer::next(xs);
            }
        }
    }
    return sites;
}

SliceField forward_step(const SliceField& prev,
                        std::span<const std::uint32_t> sites,
                        const EnvironmentModel& model)
{
    const int d = prev.indexer.dim();
    SliceField next{SliceIndexer(d, prev.n() + 1), {}};
    const std::size_t size = next.indexer.size();
    next.logz.resize(size);
#pragma omp parallel if (size > kParallelGrain)
    {
        auto [begin, end] = thread_block(size);
        if (begin < end)
        {
            std::array<int, kMaxDim> x{};
            std::array<double, kMaxDim> terms{};
            std::span<int> xs(x.data(), static_cast<std::size_t>(d));
            next.indexer.point_of(begin, xs);
            for (std::size_t k = begin; k < end; ++k)
            {
                int nt = 0;
                for (int i = 0; i < d; ++i)
                {
                    if (x[i] == 0)
                        continue;
                    --x[i];
                    std::size_t src = prev.indexer.index_of(xs);
                    ++x[i];
                    terms[nt++] = prev.logz[src]
                                  + model.support_log_weight(sites[src], i);
                }
                next.logz[k] = logsumexp({terms.data(), std::size_t(nt)});
                SliceIndexer::next(xs);
            }
        }
    }
    return next;
}

SliceField forward_step(const SliceField& prev, const EnvironmentModel& model)
{
    auto sites = slice_sites(prev, model);
    return forward_step(prev, sites, model);
}

SliceField forward_step_serial(const SliceField& prev,
                               const EnvironmentModel& model)
{
    const int d = prev.indexer.dim();
    SliceField next{SliceIndexer(d, prev.n() + 1), {}};
    next.logz.resize(next.indexer.size());
    std::vector<double> terms;
    for (std::size_t k = 0; k < next.indexer.size(); ++k)
    {
        Coords x = next.indexer.point_of(k);
        terms.clear();
        for (int i = 0; i < d; ++i)
        {
            if (x[i] == 0)
                continue;
            Coords src = x;
            --src[i];
            WeightVector w = model.site_weights(src);
            terms.push_back(prev.logz[prev.indexer.index_of(src)]
                            + std::log(w.plus(i)));
        }
        next.logz[k] = logsumexp(terms);
    }
    return next;
}

std::vector<double> endpoint_distribution(const SliceField& field)
{
    const double total = logsumexp(field.logz);
    const std::size_t size = field.logz.size();
    std::vector<double> p(size);
#pragma omp parallel for schedule(static) if (size > kParallelGrain)
    for (std::size_t k = 0; k < size; ++k)
        p[k] = std::exp(field.logz[k] - total);
    return p;
}

//---------------------------------------------------------------------------//
std::size_t walk_memory_bytes(int d, int n)
{
    auto cur = static_cast<std::size_t>(slice_size(d, n));
    auto prev = static_cast<std::size_t>(slice_size(d, std::max(n - 1, 0)));
    return cur * sizeof(double) + prev * (2 * sizeof(double) + sizeof(std::uint32_t));
}

Walker::Walker(EnvironmentModel model, WalkOptions options)
    : model_(std::move(model))
    , options_(options)
    , field_(SliceField::origin(model_.dim()))
    , last_indexer_(model_.dim(), 0)
{
}

const StepRecord& Walker::step()
{
    const int n = field_.n() + 1;
    const int d = model_.dim();
    if (walk_memory_bytes(d, n) > options_.memory_budget)
    {
        throw ResourceError("slice at level " + std::to_string(n)
                            + " exceeds memory_budget of "
                            + std::to_string(options_.memory_budget) + " bytes");
    }

    last_sites_ = slice_sites(field_, model_);
    last_p_ = endpoint_distribution(field_);

    double jmax = -1;
    std::size_t arg = 0;
    double overlap = 0;
    double u = 0;
    for (std::size_t k = 0; k < last_p_.size(); ++k)
    {
        double p = last_p_[k];
        if (p > jmax)
        {
            jmax = p;
            arg = k;
        }
        overlap += p * p;
        u += p * model_.support_excess(last_sites_[k]);
    }

    if (!(jmax * jmax <= overlap + kSandwichSlack && overlap <= jmax + kSandwichSlack))
    {
        throw InvariantError("J_n^2 <= I_n <= J_n violated at n=" + std::to_string(n));
    }

    StepRecord rec;
    rec.n = n;
    rec.j = jmax;
    rec.i = overlap;
    rec.argmax_site = field_.indexer.point_of(arg);
    log_w_ += std::log1p(u);
    rec.log_w = log_w_;

    last_indexer_ = field_.indexer;
    field_ = forward_step(field_, last_sites_, model_);
    rec.log_p_boundary = logsumexp(field_.logz);

    sum_j_ += rec.j;
    sum_i_ += rec.i;
    rec.cesaro_j = sum_j_ / n;
    rec.cesaro_i = sum_i_ / n;
    series_.records.push_back(std::move(rec));
    return series_.records.back();
}

LocalizationSeries run_walk(const EnvironmentModel& model,
                            int steps,
                            WalkOptions options)
{
    if (steps < 1)
        throw DomainError("run_walk: N must be >= 1");
    if (walk_memory_bytes(model.dim(), steps) > options.memory_budget)
    {
        throw ResourceError("walk to N=" + std::to_string(steps)
                            + " exceeds memory_budget of "
                            + std::to_string(options.memory_budget) + " bytes");
    }
    Walker walker(model, options);
    for (int n = 1; n <= steps; ++n)
        walker.step();
    return walker.series();
}

}  // namespace rwre
