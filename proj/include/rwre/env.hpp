#pragma once

//! \file env.hpp
//! Environment laws for i.i.d. uniformly elliptic nearest-neighbour walks.
//!
//! Steps are indexed 0..2d-1: index i < d is +e_{i+1}, index d+i is
//! -e_{i+1}. Site weight vectors are a pure function of (seed, site): a
//! counter-based hash of the site picks a support point of the law by
//! inverse CDF, so the same environment is seen across slices, replicas
//! and horizons.

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace rwre
{

inline constexpr int kMaxDim = 8;
inline constexpr double kValidationTol = 1e-12;

class WeightVector
{
  public:
    WeightVector() = default;
    explicit WeightVector(std::span<const double> w);

    int dim() const { return dim_; }
    std::size_t size() const { return 2 * static_cast<std::size_t>(dim_); }
    double operator[](std::size_t k) const { return w_[k]; }
    double plus(int i) const { return w_[i]; }
    double minus(int i) const { return w_[dim_ + i]; }
    double positive_sum() const;
    std::span<const double> values() const { return {w_.data(), size()}; }

  private:
    int dim_{0};
    std::array<double, 2 * kMaxDim> w_{};
};

//! xi(x,e) = xi(x) on V+, xi(x,-e) = -xi(x,e), xi(x) Rademacher.
struct SharedSign
{
};

//! Explicit finite law of xi vectors, each of length 2d.
struct FiniteTable
{
    std::vector<std::vector<double>> r;
    std::vector<double> p;
};

using XiLaw = std::variant<SharedSign, FiniteTable>;

//! omega_eps(x,e) = alpha(e) (1 + eps xi(x,e)).
struct PerturbedLaw
{
    std::vector<double> alpha;
    double epsilon{0};
    XiLaw xi;
};

//! General i.i.d. law with finite support of weight vectors.
struct FiniteIidLaw
{
    std::vector<std::vector<double>> weights;
    std::vector<double> p;
};

using EnvironmentLaw = std::variant<PerturbedLaw, FiniteIidLaw>;

struct DisorderStats
{
    std::vector<double> q;  //!< mean weight, length 2d
    double c{0};            //!< sum of q over V+
    double lambda{0};       //!< log c
    double kappa{0};        //!< ellipticity constant
    bool psi_nondegenerate{false};  //!< Psi(omega,0) non-degenerate
    double sigma2{0};               //!< E[(e^{Psi-lambda} - 1)^2]
    double second_moment_const{0};  //!< (E[e^{2 Psi}] - c^2) / c
    std::vector<double> rho;  //!< d x d row-major E[w(e)w(e')]/(q(e)q(e'))

    double rho_at(int i, int j) const
    {
        return rho[static_cast<std::size_t>(i) * q.size() / 2 + j];
    }
};

class EnvironmentModel
{
  public:
    static EnvironmentModel perturbed(int dim,
                                      std::vector<double> alpha,
                                      double epsilon,
                                      XiLaw xi,
                                      std::uint64_t seed);
    static EnvironmentModel finite_iid(int dim,
                                       std::vector<std::vector<double>> weights,
                                       std::vector<double> p,
                                       std::uint64_t seed);

    EnvironmentModel with_seed(std::uint64_t seed) const;
    //! Same alpha and xi law, different disorder strength.
    EnvironmentModel with_epsilon(double epsilon) const;
    //! Reflect onto the face with sign vector s (entries +-1).
    EnvironmentModel on_face(std::vector<int> signs) const;

    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    const EnvironmentLaw& law() const { return law_; }
    bool is_perturbed() const;
    bool is_shared_sign() const;
    double epsilon() const;
    std::span<const int> face() const { return face_; }

    std::size_t support_size() const { return cdf_.size(); }
    double support_probability(std::size_t k) const { return prob_[k]; }
    //! Support weight vector in the face frame.
    const WeightVector& support_weights(std::size_t k) const
    {
        return weights_[k];
    }
    //! log omega(x, +e_i) for a site drawing support point k.
    double support_log_weight(std::size_t k, int i) const
    {
        return log_plus_[k * dim_ + i];
    }
    //! e^{Psi}/c - 1 for support point k; exactly 0 when |e^Psi - c| <= tol.
    double support_excess(std::size_t k) const { return excess_[k]; }
    //! Scalar xi of a SharedSign support point (+1 or -1).
    double support_xi(std::size_t k) const;

    //! Support point drawn at face-frame site x.
    std::uint32_t site_index(std::span<const int> x) const;
    WeightVector site_weights(std::span<const int> x) const
    {
        return weights_[site_index(x)];
    }

    const DisorderStats& stats() const { return stats_; }

  private:
    EnvironmentModel() = default;
    void build();

    int dim_{0};
    std::uint64_t seed_{0};
    EnvironmentLaw law_;
    std::vector<int> face_;

    std::vector<double> prob_;
    std::vector<double> cdf_;
    std::vector<WeightVector> weights_;
    std::vector<double> log_plus_;
    std::vector<double> excess_;
    DisorderStats stats_;
};

inline DisorderStats disorder_stats(const EnvironmentModel& model)
{
    return model.stats();
}

//! Largest eps keeping the perturbed family kappa-elliptic.
double eps_max(std::span<const double> alpha, double kappa);

//! Uniform alpha on V (each 1/(2d)).
std::vector<double> uniform_alpha(int dim);

//! alpha(e_i) = alpha(-e_i) = y_i / (2 sum y).
std::vector<double> symmetric_alpha_from_direction(std::span<const double> y);

}  // namespace rwre
