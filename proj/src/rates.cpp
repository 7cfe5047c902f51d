#include "rwre/rates.hpp"

#include <cmath>
#include <limits>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"

namespace rwre
{

double annealed_rate(std::span<const double> y, std::span<const double> q)
{
    check_boundary_direction(y);
    if (q.size() < y.size())
        throw DomainError("annealed_rate: q shorter than y");
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        if (y[i] == 0)
            continue;
        if (!(q[i] > 0))
            throw DomainError("annealed_rate: q(e_i) must be > 0");
        s += y[i] * std::log(y[i] / q[i]);
    }
    return s;
}

double annealed_point_logprob(std::span<const int> x, std::span<const double> q)
{
    double s = multinomial_log_count(x);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0)
            s += x[i] * std::log(q[i]);
    return s;
}

double annealed_finite_rate(std::span<const double> y,
                            std::span<const double> q,
                            int n)
{
    auto x = round_to_slice(y, n);
    return -annealed_point_logprob(x, q) / n;
}

std::vector<double> annealed_minimizer(const DisorderStats& stats)
{
    const std::size_t d = stats.q.size() / 2;
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i)
        y[i] = stats.q[i] / stats.c;
    return y;
}

//---------------------------------------------------------------------------//
std::vector<RateReport> quenched_rate_profile(const std::vector<std::vector<double>>& ys,
                                              const EnvironmentModel& model,
                                              int n,
                                              int replicas,
                                              std::uint64_t seed,
                                              RateOptions options)
{
    if (n < 10)
        throw DomainError("quenched rate: n must be >= 10");
    if (replicas < 2)
        throw DomainError("quenched rate: replicas must be >= 2");
    const int d = model.dim();
    const int half = n / 2;
    const auto& q = model.stats().q;

    std::vector<std::size_t> at_n, at_half;
    const SliceIndexer ix_n(d, n), ix_half(d, half);
    for (const auto& y : ys)
    {
        if (static_cast<int>(y.size()) != d)
            throw DomainError("quenched rate: direction length must equal dim");
        at_n.push_back(ix_n.index_of(round_to_slice(y, n)));
        at_half.push_back(ix_half.index_of(round_to_slice(y, half)));
    }

    const std::size_t ny = ys.size();
    std::vector<double> iq(ny * replicas), iq_half(ny * replicas);
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicas; ++r)
    {
        slot.run([&] {
            Walker walker(replica_model(model, seed, r), options.walk);
            while (walker.level() < n)
            {
                walker.step();
                if (walker.level() == half)
                    for (std::size_t k = 0; k < ny; ++k)
                        iq_half[k * replicas + r] = -walker.field().logz[at_half[k]] / half;
            }
            for (std::size_t k = 0; k < ny; ++k)
                iq[k * replicas + r] = -walker.field().logz[at_n[k]] / n;
        });
    }
    slot.rethrow();

    std::vector<RateReport> out;
    for (std::size_t k = 0; k < ny; ++k)
    {
        RateReport rep;
        rep.y = ys[k];
        rep.ia = annealed_rate(ys[k], q);
        rep.ia_n = annealed_finite_rate(ys[k], q, n);
        rep.stirling_correction = std::abs(rep.ia - rep.ia_n);
        auto st = sample_stats({iq.data() + k * replicas, std::size_t(replicas)});
        rep.iq_mean = st.mean;
        rep.iq_std_error = st.std_error;
        rep.n_used = n;
        rep.replicas = replicas;
        rep.bias_note = "finite-n estimate at n=" + std::to_string(n)
                        + ", bias O(log n / n), not corrected";
        if (options.extrapolate)
        {
            auto sh = sample_stats({iq_half.data() + k * replicas, std::size_t(replicas)});
            rep.has_extrapolation = true;
            rep.iq_extrapolated = 2 * st.mean - sh.mean;
        }
        out.push_back(std::move(rep));
    }
    return out;
}

RateReport quenched_rate_estimate(std::span<const double> y,
                                  const EnvironmentModel& model,
                                  int n,
                                  int replicas,
                                  std::uint64_t seed,
                                  RateOptions options)
{
    return quenched_rate_profile({std::vector<double>(y.begin(), y.end())},
                                 model, n, replicas, seed, options)
        .front();
}

std::vector<std::vector<double>> boundary_grid(int d, int m)
{
    if (d < 1 || m < 1)
        throw DomainError("boundary_grid: need d >= 1 and m >= 1");
    std::vector<std::vector<double>> out;
    SliceIndexer ix(d, m);
    for (std::size_t k = 0; k < ix.size(); ++k)
    {
        auto x = ix.point_of(k);
        std::vector<double> y(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            y[i] = static_cast<double>(x[i]) / m;
        out.push_back(std::move(y));
    }
    return out;
}

//---------------------------------------------------------------------------//
std::string to_string(Verdict v)
{
    switch (v)
    {
    case Verdict::localized:
        return "localized";
    case Verdict::delocalized:
        return "delocalized";
    default:
        return "inconclusive";
    }
}

CriterionReport criterion_from_gap(const GapEstimate& gap, double lambda)
{
    CriterionReport rep;
    rep.gap = gap;
    rep.inf_ia = -lambda;
    rep.inf_iq_est = -(lambda + gap.mean_gap);
    rep.inf_iq_std_error = gap.std_error;
    if (gap.std_error > 0)
        rep.z_score = -gap.mean_gap / gap.std_error;
    else
        rep.z_score = gap.mean_gap < 0 ? std::numeric_limits<double>::infinity() : 0.0;

    if (rep.inf_ia < rep.inf_iq_est - 4 * gap.std_error)
        rep.verdict = Verdict::localized;
    else if (gap.mean_gap >= -2 * gap.std_error)
        rep.verdict = Verdict::delocalized;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

CriterionReport criterion_report(const EnvironmentModel& model,
                                 int n,
                                 int replicas,
                                 std::uint64_t seed,
                                 WalkOptions options)
{
    auto gap = gap_estimate(model, n, replicas, seed, options);
    return criterion_from_gap(gap, model.stats().lambda);
}

}  // namespace rwre
