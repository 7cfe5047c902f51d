#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/hash.hpp"

namespace rwre
{
namespace
{

void require(bool cond, const std::string& msg)
{
    if (!cond)
        throw DomainError(msg);
}

void check_dim(int dim)
{
    require(dim >= 1 && dim <= kMaxDim,
            "dim must be in [1, " + std::to_string(kMaxDim) + "]");
}

void check_probability_list(std::span<const double> p, const char* what)
{
    require(!p.empty(), std::string(what) + ": empty support");
    double total = 0;
    for (double v : p)
    {
        require(v >= 0 && std::isfinite(v),
                std::string(what) + ": probabilities must be >= 0");
        total += v;
    }
    require(std::abs(total - 1.0) <= kValidationTol,
            std::string(what) + ": probabilities must sum to 1");
}

// Validate r against E_alpha: entries in [-1,1], sum r alpha = 0, sup |r| = 1.
void check_xi_vector(std::span<const double> r, std::span<const double> alpha)
{
    require(r.size() == alpha.size(), "xi vector must have length 2*dim");
    double dot = 0;
    double sup = 0;
    for (std::size_t e = 0; e < r.size(); ++e)
    {
        require(std::abs(r[e]) <= 1.0 + kValidationTol,
                "xi entries must lie in [-1, 1]");
        dot += r[e] * alpha[e];
        sup = std::max(sup, std::abs(r[e]));
    }
    require(std::abs(dot) <= kValidationTol,
            "xi vector violates sum_e r(e) alpha(e) = 0");
    require(std::abs(sup - 1.0) <= kValidationTol,
            "xi vector violates sup_e |r(e)| = 1");
}

}  // namespace

//---------------------------------------------------------------------------//
WeightVector::WeightVector(std::span<const double> w)
{
    require(w.size() % 2 == 0 && !w.empty()
                && w.size() <= 2 * static_cast<std::size_t>(kMaxDim),
            "weight vector must have length 2*dim");
    dim_ = static_cast<int>(w.size() / 2);
    std::copy(w.begin(), w.end(), w_.begin());
}

double WeightVector::positive_sum() const
{
    double s = 0;
    for (int i = 0; i < dim_; ++i)
        s += w_[i];
    return s;
}

//---------------------------------------------------------------------------//
EnvironmentModel EnvironmentModel::perturbed(int dim,
                                             std::vector<double> alpha,
                                             double epsilon,
                                             XiLaw xi,
                                             std::uint64_t seed)
{
    EnvironmentModel m;
    m.dim_ = dim;
    m.seed_ = seed;
    m.law_ = PerturbedLaw{std::move(alpha), epsilon, std::move(xi)};
    m.face_.assign(static_cast<std::size_t>(std::max(dim, 0)), 1);
    m.build();
    return m;
}

EnvironmentModel
EnvironmentModel::finite_iid(int dim,
                             std::vector<std::vector<double>> weights,
                             std::vector<double> p,
                             std::uint64_t seed)
{
    EnvironmentModel m;
    m.dim_ = dim;
    m.seed_ = seed;
    m.law_ = FiniteIidLaw{std::move(weights), std::move(p)};
    m.face_.assign(static_cast<std::size_t>(std::max(dim, 0)), 1);
    m.build();
    return m;
}

EnvironmentModel EnvironmentModel::with_seed(std::uint64_t seed) const
{
    EnvironmentModel m = *this;
    m.seed_ = seed;
    return m;
}

EnvironmentModel EnvironmentModel::with_epsilon(double epsilon) const
{
    require(is_perturbed(), "with_epsilon requires a perturbed law");
    EnvironmentModel m = *this;
    std::get<PerturbedLaw>(m.law_).epsilon = epsilon;
    m.build();
    return m;
}

EnvironmentModel EnvironmentModel::on_face(std::vector<int> signs) const
{
    require(signs.size() == static_cast<std::size_t>(dim_),
            "face sign vector must have length dim");
    for (int s : signs)
        require(s == 1 || s == -1, "face signs must be +1 or -1");
    EnvironmentModel m = *this;
    m.face_ = std::move(signs);
    m.build();
    return m;
}

bool EnvironmentModel::is_perturbed() const
{
    return std::holds_alternative<PerturbedLaw>(law_);
}

bool EnvironmentModel::is_shared_sign() const
{
    const auto* p = std::get_if<PerturbedLaw>(&law_);
    return p && std::holds_alternative<SharedSign>(p->xi);
}

double EnvironmentModel::epsilon() const
{
    const auto* p = std::get_if<PerturbedLaw>(&law_);
    return p ? p->epsilon : 0.0;
}

double EnvironmentModel::support_xi(std::size_t k) const
{
    require(is_shared_sign(), "support_xi requires a SharedSign law");
    return k == 0 ? 1.0 : -1.0;
}

std::uint32_t EnvironmentModel::site_index(std::span<const int> x) const
{
    std::array<int, kMaxDim> phys{};
    for (int i = 0; i < dim_; ++i)
        phys[i] = face_[i] * x[i];
    double u = to_unit(hash_site(seed_, {phys.data(), std::size_t(dim_)}));
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        --it;
    return static_cast<std::uint32_t>(it - cdf_.begin());
}

//---------------------------------------------------------------------------//
void EnvironmentModel::build()
{
    check_dim(dim_);
    const std::size_t nsteps = 2 * static_cast<std::size_t>(dim_);

    // Support in the physical frame
    std::vector<std::vector<double>> phys;
    prob_.clear();
    if (const auto* pl = std::get_if<PerturbedLaw>(&law_))
    {
        require(pl->alpha.size() == nsteps, "alpha must have length 2*dim");
        check_probability_list(pl->alpha, "alpha");
        for (double a : pl->alpha)
            require(a > 0, "alpha entries must be strictly positive");
        require(pl->epsilon >= 0 && pl->epsilon < 1,
                "epsilon must lie in [0, 1)");

        std::vector<std::vector<double>> rs;
        if (std::holds_alternative<SharedSign>(pl->xi))
        {
            for (double sign : {1.0, -1.0})
            {
                std::vector<double> r(nsteps);
                for (int i = 0; i < dim_; ++i)
                {
                    r[i] = sign;
                    r[dim_ + i] = -sign;
                }
                rs.push_back(std::move(r));
            }
            prob_ = {0.5, 0.5};
        }
        else
        {
            const auto& tab = std::get<FiniteTable>(pl->xi);
            require(tab.r.size() == tab.p.size(),
                    "xi table: r and p must have equal length");
            check_probability_list(tab.p, "xi table");
            rs = tab.r;
            prob_ = tab.p;
        }
        for (const auto& r : rs)
            check_xi_vector(r, pl->alpha);
        for (std::size_t e = 0; e < nsteps; ++e)
        {
            double mean = 0;
            for (std::size_t k = 0; k < rs.size(); ++k)
                mean += prob_[k] * rs[k][e];
            require(std::abs(mean) <= kValidationTol,
                    "xi law must have mean zero componentwise");
        }
        for (const auto& r : rs)
        {
            std::vector<double> w(nsteps);
            for (std::size_t e = 0; e < nsteps; ++e)
                w[e] = pl->alpha[e] * (1.0 + pl->epsilon * r[e]);
            phys.push_back(std::move(w));
        }
    }
    else
    {
        const auto& fl = std::get<FiniteIidLaw>(law_);
        require(fl.weights.size() == fl.p.size(),
                "iid support: weights and p must have equal length");
        check_probability_list(fl.p, "iid support");
        for (const auto& w : fl.weights)
        {
            require(w.size() == nsteps, "weight vector must have length 2*dim");
            check_probability_list(w, "weight vector");
            for (double v : w)
                require(v > 0, "weight vectors must be uniformly elliptic");
        }
        phys = fl.weights;
        prob_ = fl.p;
    }

    // Reflect into the face frame: w_face(+e_i) = w_phys(s_i e_i).
    weights_.clear();
    for (const auto& w : phys)
    {
        std::vector<double> f(nsteps);
        for (int i = 0; i < dim_; ++i)
        {
            bool flip = face_[i] < 0;
            f[i] = w[flip ? dim_ + i : i];
            f[dim_ + i] = w[flip ? i : dim_ + i];
        }
        weights_.emplace_back(f);
    }

    const std::size_t ns = weights_.size();
    cdf_.resize(ns);
    double acc = 0;
    for (std::size_t k = 0; k < ns; ++k)
    {
        acc += prob_[k];
        cdf_[k] = acc;
    }
    cdf_.back() = 1.0;

    log_plus_.resize(ns * dim_);
    for (std::size_t k = 0; k < ns; ++k)
        for (int i = 0; i < dim_; ++i)
            log_plus_[k * dim_ + i] = std::log(weights_[k].plus(i));

    // Exact statistics over the finite support
    DisorderStats st;
    st.q.assign(nsteps, 0.0);
    st.kappa = 1.0;
    for (std::size_t k = 0; k < ns; ++k)
    {
        for (std::size_t e = 0; e < nsteps; ++e)
        {
            st.q[e] += prob_[k] * weights_[k][e];
            if (prob_[k] > 0)
                st.kappa = std::min(st.kappa, weights_[k][e]);
        }
    }
    for (int i = 0; i < dim_; ++i)
        st.c += st.q[i];
    st.lambda = std::log(st.c);

    excess_.resize(ns);
    double e2psi = 0;
    st.psi_nondegenerate = false;
    for (std::size_t k = 0; k < ns; ++k)
    {
        double s = weights_[k].positive_sum();
        e2psi += prob_[k] * s * s;
        excess_[k] = std::abs(s - st.c) <= kValidationTol ? 0.0 : s / st.c - 1.0;
        if (prob_[k] > 0 && excess_[k] != 0.0)
            st.psi_nondegenerate = true;
        st.sigma2 += prob_[k] * excess_[k] * excess_[k];
    }
    st.second_moment_const =
        st.psi_nondegenerate ? (e2psi - st.c * st.c) / st.c : 0.0;

    st.rho.assign(static_cast<std::size_t>(dim_) * dim_, 0.0);
    for (int i = 0; i < dim_; ++i)
    {
        for (int j = 0; j < dim_; ++j)
        {
            double m = 0;
            for (std::size_t k = 0; k < ns; ++k)
                m += prob_[k] * weights_[k].plus(i) * weights_[k].plus(j);
            st.rho[i * dim_ + j] = m / (st.q[i] * st.q[j]);
        }
    }
    stats_ = std::move(st);
}

//---------------------------------------------------------------------------//
double eps_max(std::span<const double> alpha, double kappa)
{
    require(!alpha.empty(), "alpha must be non-empty");
    double amin = *std::min_element(alpha.begin(), alpha.end());
    if (!(kappa > 0 && kappa < amin))
        throw DomainError("eps_max: kappa must satisfy 0 < kappa < min alpha ("
                          + std::to_string(amin) + ")");
    return 1.0 - kappa / amin;
}

std::vector<double> uniform_alpha(int dim)
{
    check_dim(dim);
    return std::vector<double>(2 * static_cast<std::size_t>(dim),
                               1.0 / (2.0 * dim));
}

std::vector<double> symmetric_alpha_from_direction(std::span<const double> y)
{
    check_dim(static_cast<int>(y.size()));
    double total = std::accumulate(y.begin(), y.end(), 0.0);
    require(total > 0, "direction must have positive mass");
    const std::size_t d = y.size();
    std::vector<double> a(2 * d);
    for (std::size_t i = 0; i < d; ++i)
    {
        require(y[i] > 0, "direction entries must be positive for alpha");
        a[i] = a[d + i] = y[i] / (2.0 * total);
    }
    return a;
}

}  // namespace rwre
