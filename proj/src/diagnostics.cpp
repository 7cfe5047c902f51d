#include "rwre/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"
#include "rwre/parallel.hpp"

namespace rwre
{

SampleStats sample_stats(std::span<const double> v)
{
    SampleStats s;
    if (v.empty())
        return s;
    double sum = 0;
    for (double x : v)
        sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1)
    {
        double ss = 0;
        for (double x : v)
            ss += (x - s.mean) * (x - s.mean);
        double var = ss / static_cast<double>(v.size() - 1);
        s.std_error = std::sqrt(var / static_cast<double>(v.size()));
    }
    return s;
}

EnvironmentModel replica_model(const EnvironmentModel& model,
                               std::uint64_t seed,
                               int replica)
{
    return model.with_seed(
        derive_seed(seed, kReplicaStream, static_cast<std::uint64_t>(replica)));
}

std::vector<double> replica_log_w(const EnvironmentModel& model,
                                  int n,
                                  int replicas,
                                  std::uint64_t seed,
                                  WalkOptions options)
{
    if (n < 1)
        throw DomainError("n must be >= 1");
    if (replicas < 1)
        throw DomainError("replicas must be >= 1");
    if (walk_memory_bytes(model.dim(), n) > options.memory_budget)
    {
        throw ResourceError("walk to n=" + std::to_string(n)
                            + " exceeds memory_budget of "
                            + std::to_string(options.memory_budget) + " bytes");
    }
    std::vector<double> out(static_cast<std::size_t>(replicas));
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicas; ++r)
    {
        slot.run([&] {
            Walker walker(replica_model(model, seed, r), options);
            for (int k = 1; k < n; ++k)
                walker.step();
            out[r] = walker.step().log_w;
        });
    }
    slot.rethrow();
    return out;
}

GapEstimate gap_from_log_w(std::span<const double> log_w, int n, double epsilon)
{
    std::vector<double> scaled(log_w.begin(), log_w.end());
    for (double& v : scaled)
        v /= n;
    auto st = sample_stats(scaled);
    return GapEstimate{n, epsilon, st.mean, st.std_error,
                       static_cast<int>(log_w.size())};
}

GapEstimate gap_estimate(const EnvironmentModel& model,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         WalkOptions options)
{
    if (replicas < 2)
        throw DomainError("gap_estimate: replicas must be >= 2");
    auto lw = replica_log_w(model, n, replicas, seed, options);
    return gap_from_log_w(lw, n, model.epsilon());
}

GapEstimate gap_estimate(const EnvironmentModel& family,
                         double epsilon,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         WalkOptions options)
{
    return gap_estimate(family.with_epsilon(epsilon), n, replicas, seed, options);
}

FractionalMoment fractional_from_log_w(std::span<const double> log_w,
                                       int n,
                                       double theta)
{
    if (!(theta > 0 && theta <= 1))
        throw DomainError("theta must lie in (0, 1]");
    std::vector<double> powered(log_w.size());
    for (std::size_t k = 0; k < log_w.size(); ++k)
        powered[k] = std::exp(theta * log_w[k]);
    auto st = sample_stats(powered);
    FractionalMoment fm;
    fm.theta = theta;
    fm.value = std::log(st.mean) / (theta * n);
    fm.std_error = st.std_error / st.mean / (theta * n);
    return fm;
}

FractionalMoment fractional_moment(const EnvironmentModel& model,
                                   int n,
                                   double theta,
                                   int replicas,
                                   std::uint64_t seed,
                                   WalkOptions options)
{
    if (replicas < 2)
        throw DomainError("fractional_moment: replicas must be >= 2");
    auto lw = replica_log_w(model, n, replicas, seed, options);
    return fractional_from_log_w(lw, n, theta);
}

//---------------------------------------------------------------------------//
DoobDecomposition doob_decompose(const LocalizationSeries& series,
                                 const EnvironmentModel& model,
                                 DoobOptions options)
{
    if (options.resamples < 16)
        throw DomainError("doob_decompose: resamples must be >= 16");
    if (series.records.empty())
        throw DomainError("doob_decompose: empty series");

    const int d = model.dim();
    const int kres = options.resamples;
    const std::uint64_t base = derive_seed(model.seed() ^ options.resample_seed,
                                           kResampleStream);

    DoobDecomposition out;
    out.sigma2 = model.stats().sigma2;
    out.ratio_bound = options.ratio_bound;
    out.overlap_ratio_min = std::numeric_limits<double>::infinity();
    out.overlap_ratio_max = -std::numeric_limits<double>::infinity();

    Walker walker(model, options.walk);
    double prev_log_w = 0;
    double m = 0;
    double a = 0;
    double sum_i = 0;
    std::vector<double> us(static_cast<std::size_t>(kres));
    for (const auto& rec : series.records)
    {
        const auto& replay = walker.step();
        if (replay.n != rec.n || std::abs(replay.log_w - rec.log_w) > 1e-12)
        {
            throw InvariantError("doob_decompose: series does not match a walk "
                                 "on the given model at n="
                                 + std::to_string(rec.n));
        }
        const auto& p = walker.last_distribution();
        const auto& ix = walker.last_indexer();

        // Fresh draws of the level-(n-1) sites, earlier levels held fixed
        ExceptionSlot slot;
#pragma omp parallel for schedule(static)
        for (int k = 0; k < kres; ++k)
        {
            slot.run([&] {
                auto fresh = model.with_seed(
                    derive_seed(base, static_cast<std::uint64_t>(rec.n),
                                static_cast<std::uint64_t>(k)));
                std::array<int, kMaxDim> x{};
                std::span<int> xs(x.data(), static_cast<std::size_t>(d));
                ix.point_of(0, xs);
                double u = 0;
                for (std::size_t j = 0; j < p.size(); ++j)
                {
                    u += p[j] * fresh.support_excess(fresh.site_index(xs));
                    SliceIndexer::next(xs);
                }
                us[k] = u;
            });
        }
        slot.rethrow();

        std::vector<double> u2(us.size()), cv(us.size());
        for (std::size_t k = 0; k < us.size(); ++k)
        {
            u2[k] = us[k] * us[k];
            // u - log(1+u) >= 0 pointwise and has the same conditional mean
            // as -log(1+u) because E[U_n | F_{n-1}] = 0.
            cv[k] = us[k] - std::log1p(us[k]);
        }
        auto su = sample_stats(us);
        auto su2 = sample_stats(u2);
        auto scv = sample_stats(cv);

        DoobStep st;
        st.n = rec.n;
        st.u = std::expm1(rec.log_w - prev_log_w);
        st.i_n = rec.i;
        st.cond_u = su.mean;
        st.cond_u_se = su.std_error;
        st.cond_u2 = su2.mean;
        st.cond_u2_se = su2.std_error;
        st.cond_neglog = scv.mean;
        st.cond_neglog_se = scv.std_error;
        a += scv.mean;
        m += -std::log1p(st.u) - scv.mean;
        st.a = a;
        st.m = m;
        st.ratio = st.cond_neglog / st.i_n;
        st.ratio_in_bounds = st.ratio >= 1.0 / options.ratio_bound
                             && st.ratio <= options.ratio_bound;
        sum_i += rec.i;
        st.overlap_ratio = -rec.log_w / sum_i;
        out.overlap_ratio_min = std::min(out.overlap_ratio_min, st.overlap_ratio);
        out.overlap_ratio_max = std::max(out.overlap_ratio_max, st.overlap_ratio);
        out.steps.push_back(st);
        prev_log_w = rec.log_w;
    }
    return out;
}

}  // namespace rwre
