#include "rwre/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"
#include "rwre/lattice.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rates.hpp"

namespace rwre
{

SweepTable epsilon_sweep(const EnvironmentModel& family,
                         std::span<const double> grid,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         SweepOptions options)
{
    if (!family.is_perturbed())
        throw DomainError("epsilon_sweep requires a perturbed model");
    if (grid.empty())
        throw DomainError("epsilon_sweep: empty grid");
    if (replicas < 50)
        throw DomainError("epsilon_sweep: replicas must be >= 50");

    SweepTable table;
    if (options.kappa_target)
        table.eps_max = eps_max(std::get<PerturbedLaw>(family.law()).alpha,
                                *options.kappa_target);
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        if (k > 0 && !(grid[k] > grid[k - 1]))
            throw DomainError("epsilon_sweep: grid must be strictly increasing");
        bool over = options.kappa_target ? grid[k] > table.eps_max : grid[k] >= 1.0;
        if (grid[k] < 0 || over)
        {
            std::ostringstream msg;
            msg << "epsilon " << grid[k] << " violates the ellipticity constraint";
            if (options.kappa_target)
                msg << " eps <= eps_max = " << table.eps_max << " (kappa = "
                    << *options.kappa_target << ")";
            else
                msg << " 0 <= eps < 1";
            throw DomainError(msg.str());
        }
        if (k > 0)
            table.resolution = std::max(table.resolution, grid[k] - grid[k - 1]);
    }

    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        std::uint64_t s = options.common_noise
                              ? seed
                              : derive_seed(seed, kGridStream, k);
        SweepRow row;
        row.epsilon = grid[k];
        row.gap = gap_estimate(family, grid[k], n, replicas, s, options.walk);
        row.localized =
            row.gap.mean_gap + 4 * row.gap.std_error < -options.threshold;
        if (row.localized && !table.eps_bar_detected)
        {
            table.eps_bar_detected = true;
            table.eps_bar_upper = grid[k];
            table.eps_bar_lower = k > 0 ? grid[k - 1] : grid[k];
        }
        table.rows.push_back(row);
    }
    for (std::size_t k = 0; k + 1 < table.rows.size(); ++k)
    {
        const auto& a = table.rows[k].gap;
        const auto& b = table.rows[k + 1].gap;
        double joint = std::hypot(a.std_error, b.std_error);
        if (b.mean_gap - a.mean_gap > 2 * joint)
            table.monotonicity_violations.emplace_back(k, k + 1);
    }
    return table;
}

std::vector<double> parse_grid(const std::string& text)
{
    auto fail = [&]() -> DomainError {
        return DomainError("eps grid '" + text
                           + "' must be 'a:b:step' with step > 0 and b >= a");
    };
    std::vector<double> parts;
    std::size_t pos = 0;
    while (true)
    {
        std::size_t colon = text.find(':', pos);
        std::string tok = text.substr(pos, colon == std::string::npos ? colon : colon - pos);
        try
        {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw fail();
        }
        catch (const std::logic_error&)
        {
            throw fail();
        }
        if (colon == std::string::npos)
            break;
        pos = colon + 1;
    }
    if (parts.size() != 3)
        throw fail();
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0) || b < a)
        throw fail();
    std::vector<double> out;
    auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= count; ++k)
        out.push_back(std::min(b, a + static_cast<double>(k) * step));
    if (b - out.back() > 0.5 * step)
        out.push_back(b);
    return out;
}

//---------------------------------------------------------------------------//
double lpp_max_field(std::span<const int> target,
                     const std::function<double(std::span<const int>)>& g,
                     std::size_t memory_budget)
{
    const std::size_t d = target.size();
    long n = 0;
    std::vector<std::size_t> extent(d), stride(d);
    std::size_t cells = 1;
    for (std::size_t i = d; i-- > 0;)
    {
        if (target[i] < 0)
            throw DomainError("lpp: target coordinates must be >= 0");
        extent[i] = static_cast<std::size_t>(target[i]) + 1;
        stride[i] = cells;
        cells *= extent[i];
        n += target[i];
    }
    if (n < 1)
        throw DomainError("lpp: target must have |x|_1 >= 1");
    if (cells * sizeof(double) > memory_budget)
        throw ResourceError("lpp box of " + std::to_string(cells)
                            + " cells exceeds memory_budget");

    // Row-major order visits every predecessor x - e_i before x
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> best(cells, ninf);
    std::vector<int> x(d, 0);
    for (std::size_t idx = 0; idx < cells; ++idx)
    {
        if (idx == 0)
        {
            best[0] = 0;
        }
        else
        {
            double b = ninf;
            for (std::size_t i = 0; i < d; ++i)
            {
                if (x[i] == 0)
                    continue;
                std::size_t src = idx - stride[i];
                --x[i];
                b = std::max(b, best[src] + g(x));
                ++x[i];
            }
            best[idx] = b;
        }
        for (std::size_t i = d; i-- > 0;)
        {
            if (++x[i] < static_cast<int>(extent[i]))
                break;
            x[i] = 0;
        }
    }
    return best[cells - 1] / static_cast<double>(n);
}

double lpp_max(const EnvironmentModel& model,
               std::span<const double> y,
               int n,
               std::size_t memory_budget)
{
    if (!model.is_shared_sign())
        throw DomainError("lpp_max requires a SharedSign perturbed model");
    if (static_cast<int>(y.size()) != model.dim())
        throw DomainError("lpp_max: direction length must equal dim");
    const double eps = model.epsilon();
    const double gain[2] = {std::log1p(eps * model.support_xi(0)),
                            std::log1p(eps * model.support_xi(1))};
    auto target = round_to_slice(y, n);
    return lpp_max_field(
        target,
        [&](std::span<const int> x) { return gain[model.site_index(x)]; },
        memory_budget);
}

double direction_entropy(std::span<const double> y)
{
    double f = 0;
    for (double v : y)
        if (v > 0)
            f -= v * std::log(v);
    return f;
}

double hoeffding_threshold(double f_y, double epsilon)
{
    return std::log((1 + epsilon) / (1 - epsilon)) * std::sqrt(f_y / 2);
}

double bound_margin(double f_y, double epsilon)
{
    return hoeffding_threshold(f_y, epsilon)
           + 0.5 * (std::log1p(epsilon) + std::log1p(-epsilon));
}

ExampleD4Report example_d4_verify(std::span<const double> y,
                                  double epsilon,
                                  int n,
                                  int seeds,
                                  std::uint64_t master_seed,
                                  std::size_t memory_budget)
{
    check_boundary_direction(y);
    if (seeds < 1 || n < 1)
        throw DomainError("example_d4: need n >= 1 and seeds >= 1");
    const int d = static_cast<int>(y.size());
    auto family = EnvironmentModel::perturbed(
        d, symmetric_alpha_from_direction(y), epsilon, SharedSign{}, master_seed);

    ExampleD4Report rep;
    rep.y.assign(y.begin(), y.end());
    rep.epsilon = epsilon;
    rep.n = n;
    rep.f_y = direction_entropy(y);
    rep.ia_y = annealed_rate(y, family.stats().q);
    rep.lambda = family.stats().lambda;
    rep.a_star = hoeffding_threshold(rep.f_y, epsilon);
    rep.mean_log_term = 0.5 * (std::log1p(epsilon) + std::log1p(-epsilon));
    rep.bound_margin = bound_margin(rep.f_y, epsilon);
    rep.hoeffding_level = rep.mean_log_term + rep.a_star;

    rep.lpp.resize(static_cast<std::size_t>(seeds));
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < seeds; ++s)
    {
        slot.run([&] {
            auto m = family.with_seed(
                derive_seed(master_seed, kReplicaStream, static_cast<std::uint64_t>(s)));
            rep.lpp[s] = lpp_max(m, y, n, memory_budget);
        });
    }
    slot.rethrow();
    int within = 0;
    double sum = 0;
    rep.lpp_max = -std::numeric_limits<double>::infinity();
    const double cap = std::log1p(epsilon);
    for (double v : rep.lpp)
    {
        sum += v;
        rep.lpp_max = std::max(rep.lpp_max, v);
        if (v <= rep.hoeffding_level)
            ++within;
        if (v > cap)
            rep.lpp_bounded_by_log1p = false;
    }
    rep.lpp_mean = sum / seeds;
    rep.lpp_fraction_within = static_cast<double>(within) / seeds;
    rep.verdict = rep.bound_margin < 0 ? "certified-localized" : "inconclusive";
    return rep;
}

}  // namespace rwre
