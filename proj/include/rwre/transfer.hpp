#pragma once

//! \file transfer.hpp
//! Quenched transfer-matrix sweep over directed slices.
//!
//! The field at level n holds log Z_n(x) = log P_{0,omega}(X_n = x) for x on
//! the slice |x|_1 = n, x >= 0. Each step reads the previous slice and the
//! positive-step weights of its sites.

#include <cstdint>
#include <span>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/lattice.hpp"

namespace rwre
{

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t(1) << 30;

struct SliceField
{
    SliceIndexer indexer;
    std::vector<double> logz;

    int n() const { return indexer.level(); }
    //! Z_0 = delta_0.
    static SliceField origin(int d);
};

struct PsiPiSplit
{
    std::vector<double> pi;  //!< normalized positive-step kernel
    double psi{0};           //!< log of the positive-step mass
};

PsiPiSplit psi_pi_split(const WeightVector& w);

//! Stable log(sum exp(v)); -inf for an empty span.
double logsumexp(std::span<const double> v);

//! Support index of every site on the field's slice.
std::vector<std::uint32_t> slice_sites(const SliceField& field,
                                       const EnvironmentModel& model);

//! One forward step, data-parallel over destination points.
SliceField forward_step(const SliceField& prev, const EnvironmentModel& model);
SliceField forward_step(const SliceField& prev,
                        std::span<const std::uint32_t> sites,
                        const EnvironmentModel& model);

//! Single-threaded reference used to check the parallel kernel.
SliceField forward_step_serial(const SliceField& prev,
                               const EnvironmentModel& model);

//! Polymer endpoint law Z_n(x) / sum Z_n.
std::vector<double> endpoint_distribution(const SliceField& field);

struct StepRecord
{
    int n{0};
    double log_w{0};  //!< log W_n
    double j{0};      //!< J_n, max endpoint mass at level n-1
    double i{0};      //!< I_n, endpoint overlap at level n-1
    Coords argmax_site;  //!< maximizer at level n-1, lowest index on ties
    double log_p_boundary{0};  //!< log P_{0,omega}(X_n in slice n)
    double cesaro_j{0};
    double cesaro_i{0};
};

struct LocalizationSeries
{
    std::vector<StepRecord> records;
};

struct WalkOptions
{
    std::size_t memory_budget{kDefaultMemoryBudget};
};

//! Bytes resident while sweeping to level n in dimension d.
std::size_t walk_memory_bytes(int d, int n);

/*!
 * Incremental walk over one environment.
 *
 * step() moves from level n-1 to level n. W_n is accumulated through the
 * one-step ratios W_n / W_{n-1} = 1 + U_n with
 * U_n = sum_x p_{n-1}(x) (e^{Psi(x) - lambda} - 1), which keeps log W_n at
 * exactly zero whenever Psi is constant.
 */
class Walker
{
  public:
    explicit Walker(EnvironmentModel model, WalkOptions options = {});

    const StepRecord& step();

    int level() const { return field_.n(); }
    const SliceField& field() const { return field_; }
    const EnvironmentModel& model() const { return model_; }
    //! Endpoint law and sites of level n-1 used by the last step.
    const std::vector<double>& last_distribution() const { return last_p_; }
    const std::vector<std::uint32_t>& last_sites() const { return last_sites_; }
    const SliceIndexer& last_indexer() const { return last_indexer_; }
    const LocalizationSeries& series() const { return series_; }

  private:
    EnvironmentModel model_;
    WalkOptions options_;
    SliceField field_;
    SliceIndexer last_indexer_;
    std::vector<double> last_p_;
    std::vector<std::uint32_t> last_sites_;
    LocalizationSeries series_;
    double log_w_{0};
    double sum_j_{0};
    double sum_i_{0};
};

LocalizationSeries run_walk(const EnvironmentModel& model,
                            int steps,
                            WalkOptions options = {});

}  // namespace rwre
