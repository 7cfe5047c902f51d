#pragma once

//! \file diagnostics.hpp
//! Replica estimators of the free-energy gap, fractional moments, the Doob
//! split of -log W_n, and the exact second moment E[W_n^2].

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/transfer.hpp"

namespace rwre
{

//! Mean and standard error of a replica sample.
struct SampleStats
{
    double mean{0};
    double std_error{0};
};

SampleStats sample_stats(std::span<const double> v);

struct GapEstimate
{
    int n{0};
    double epsilon{0};
    double mean_gap{0};  //!< mean of (1/n) log W_n
    double std_error{0};
    int replicas{0};
};

//! Model for replica r: same law, seed hashed from (seed, r).
EnvironmentModel replica_model(const EnvironmentModel& model,
                               std::uint64_t seed,
                               int replica);

//! log W_n for each replica, in replica order.
std::vector<double> replica_log_w(const EnvironmentModel& model,
                                  int n,
                                  int replicas,
                                  std::uint64_t seed,
                                  WalkOptions options = {});

GapEstimate gap_from_log_w(std::span<const double> log_w, int n, double epsilon);

GapEstimate gap_estimate(const EnvironmentModel& model,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         WalkOptions options = {});

//! Member of a perturbed family at the given disorder strength.
GapEstimate gap_estimate(const EnvironmentModel& family,
                         double epsilon,
                         int n,
                         int replicas,
                         std::uint64_t seed,
                         WalkOptions options = {});

struct FractionalMoment
{
    double theta{1};
    double value{0};  //!< (1/(theta n)) log mean W_n^theta
    double std_error{0};  //!< delta-method
};

FractionalMoment fractional_from_log_w(std::span<const double> log_w,
                                       int n,
                                       double theta);

FractionalMoment fractional_moment(const EnvironmentModel& model,
                                   int n,
                                   double theta,
                                   int replicas,
                                   std::uint64_t seed,
                                   WalkOptions options = {});

//---------------------------------------------------------------------------//
struct DoobStep
{
    int n{0};
    double u{0};  //!< W_n / W_{n-1} - 1
    double m{0};  //!< martingale part M_n
    double a{0};  //!< compensator A_n
    double i_n{0};
    double cond_u{0}, cond_u_se{0};   //!< E[U_n | F_{n-1}]
    double cond_u2{0}, cond_u2_se{0};  //!< E[U_n^2 | F_{n-1}]
    double cond_neglog{0}, cond_neglog_se{0};  //!< E[-log(1+U_n) | F_{n-1}]
    double ratio{0};  //!< cond_neglog / I_n
    bool ratio_in_bounds{false};
    double overlap_ratio{0};  //!< (-log W_n) / sum_{k<=n} I_k
};

struct DoobDecomposition
{
    std::vector<DoobStep> steps;
    double sigma2{0};
    double ratio_bound{0};
    double overlap_ratio_min{0};
    double overlap_ratio_max{0};
};

struct DoobOptions
{
    int resamples{256};
    double ratio_bound{100.0};  //!< C in 1/C <= ratio <= C
    std::uint64_t resample_seed{0};
    WalkOptions walk{};
};

//! Conditional moments by resampling the level-(n-1) sites K times.
DoobDecomposition doob_decompose(const LocalizationSeries& series,
                                 const EnvironmentModel& model,
                                 DoobOptions options = {});

//---------------------------------------------------------------------------//
enum class GrowthTag
{
    bounded_trend,
    diverging_trend
};

std::string to_string(GrowthTag tag);

struct SecondMomentCurve
{
    std::vector<int> n;
    std::vector<double> log_ew2;  //!< log E[W_n^2]
    std::vector<double> ew2;
    GrowthTag tag{GrowthTag::bounded_trend};
    double slope{0};  //!< tail mean of the log increments
    double threshold{0};
};

//! Bytes used by the difference-walk lattice for N steps.
std::size_t second_moment_memory_bytes(int d, int steps);

/*!
 * Exact E[W_n^2], n = 1..N, by the difference walk of two annealed replicas.
 *
 * Each replica steps with law q(e)/c; a step pair (e, e') out of a shared
 * site carries the extra factor rho(e, e').
 */
SecondMomentCurve second_moment_exact(const EnvironmentModel& model,
                                      int steps,
                                      std::size_t memory_budget = kDefaultMemoryBudget);

//! Scatter-form reference of the same recursion (single-threaded).
SecondMomentCurve second_moment_serial(const EnvironmentModel& model,
                                       int steps,
                                       std::size_t memory_budget = kDefaultMemoryBudget);

//! Heuristic: diverging when the tail mean increment exceeds the threshold.
GrowthTag classify_growth(SecondMomentCurve& curve, double threshold = 1e-4);

}  // namespace rwre
