#pragma once

//! \file sweep.hpp
//! Disorder-strength sweeps and the last-passage certificate on the face.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rwre/diagnostics.hpp"
#include "rwre/env.hpp"

namespace rwre
{

struct SweepRow
{
    double epsilon{0};
    GapEstimate gap;
    bool localized{false};  //!< gap + 4 se < -threshold
};

struct SweepTable
{
    std::vector<SweepRow> rows;
    bool eps_bar_detected{false};
    double eps_bar_lower{0};  //!< last grid point before detection
    double eps_bar_upper{0};  //!< first grid point with a detected gap
    double resolution{0};     //!< largest grid spacing
    std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations;
    double eps_max{1};
};

struct SweepOptions
{
    bool common_noise{true};
    //! When set, grid points must not exceed eps_max(alpha, kappa).
    std::optional<double> kappa_target;
    double threshold{0};
    WalkOptions walk{};
};

SweepTable epsilon_sweep(const EnvironmentModel& family,
                         std::span<const double> grid,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         SweepOptions options = {});

//! Expand "a:b:step" into a grid including both ends (within half a step).
std::vector<double> parse_grid(const std::string& text);

//---------------------------------------------------------------------------//
//! max over directed paths 0 -> target of (1/n) sum_{i<n} g(x_i).
double lpp_max_field(std::span<const int> target,
                     const std::function<double(std::span<const int>)>& g,
                     std::size_t memory_budget = kDefaultMemoryBudget);

//! Path maximum of (1/n) sum log(1 + eps xi(x_i)) towards round_to_slice(y, n).
double lpp_max(const EnvironmentModel& model,
               std::span<const double> y,
               int n,
               std::size_t memory_budget = kDefaultMemoryBudget);

//! -sum y_i log y_i
double direction_entropy(std::span<const double> y);

//! log((1+eps)/(1-eps)) sqrt(f/2)
double hoeffding_threshold(double f_y, double epsilon);

//! a*(eps) + (log(1+eps) + log(1-eps)) / 2
double bound_margin(double f_y, double epsilon);

struct ExampleD4Report
{
    std::vector<double> y;
    double epsilon{0};
    int n{0};
    double f_y{0};
    double ia_y{0};
    double lambda{0};
    double a_star{0};
    double mean_log_term{0};  //!< E[log(1 + eps xi)]
    double bound_margin{0};
    double hoeffding_level{0};  //!< mean_log_term + a_star
    std::vector<double> lpp;    //!< one value per seed
    double lpp_mean{0};
    double lpp_max{0};
    double lpp_fraction_within{0};  //!< share of seeds with lpp <= hoeffding_level
    bool lpp_bounded_by_log1p{true};
    std::string verdict;  //!< "certified-localized" or "inconclusive"
};

ExampleD4Report example_d4_verify(std::span<const double> y,
                                  double epsilon,
                                  int n,
                                  int seeds,
                                  std::uint64_t master_seed,
                                  std::size_t memory_budget = kDefaultMemoryBudget);

}  // namespace rwre
