#pragma once

//! \file rates.hpp
//! Rate functions on the boundary face and the infima comparison.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwre/diagnostics.hpp"
#include "rwre/env.hpp"
#include "rwre/lattice.hpp"

namespace rwre
{

//! sum_i y_i log(y_i / q(e_i)), with 0 log 0 = 0.
double annealed_rate(std::span<const double> y, std::span<const double> q);

//! log P_0(X_n = x): path count times the product of mean weights.
double annealed_point_logprob(std::span<const int> x, std::span<const double> q);

//! -(1/n) log P_0(X_n = round_to_slice(y, n)).
double annealed_finite_rate(std::span<const double> y,
                            std::span<const double> q,
                            int n);

//! Minimizer of the annealed rate on the face, q restricted to V+ over c.
std::vector<double> annealed_minimizer(const DisorderStats& stats);

struct RateReport
{
    std::vector<double> y;
    double ia{0};
    double ia_n{0};  //!< annealed rate at the rounded point, finite n
    double stirling_correction{0};  //!< |ia - ia_n|
    double iq_mean{0};
    double iq_std_error{0};
    int n_used{0};
    int replicas{0};
    //! 2 I_q(n) - I_q(n/2); experimental, only when requested.
    bool has_extrapolation{false};
    double iq_extrapolated{0};
    std::string bias_note;
};

struct RateOptions
{
    bool extrapolate{false};
    WalkOptions walk{};
};

//! Quenched point-rate estimates at several directions from one sweep per replica.
std::vector<RateReport> quenched_rate_profile(const std::vector<std::vector<double>>& ys,
                                              const EnvironmentModel& model,
                                              int n,
                                              int replicas,
                                              std::uint64_t seed,
                                              RateOptions options = {});

RateReport quenched_rate_estimate(std::span<const double> y,
                                  const EnvironmentModel& model,
                                  int n,
                                  int replicas,
                                  std::uint64_t seed,
                                  RateOptions options = {});

//! Face points with coordinates in {0, 1/m, ..., 1}.
std::vector<std::vector<double>> boundary_grid(int d, int m);

enum class Verdict
{
    localized,
    delocalized,
    inconclusive
};

std::string to_string(Verdict v);

struct CriterionReport
{
    double inf_ia{0};  //!< -lambda
    double inf_iq_est{0};  //!< -(lambda + mean gap)
    double inf_iq_std_error{0};
    GapEstimate gap;
    double z_score{0};  //!< -mean_gap / std_error (inf when std_error = 0 < -gap)
    Verdict verdict{Verdict::inconclusive};
};

//! localized: gap < -4 se; delocalized: gap >= -2 se; otherwise inconclusive.
CriterionReport criterion_from_gap(const GapEstimate& gap, double lambda);

CriterionReport criterion_report(const EnvironmentModel& model,
                                 int n,
                                 int replicas,
                                 std::uint64_t seed,
                                 WalkOptions options = {});

}  // namespace rwre
