#pragma once

// Brute-force references. Exponential cost; only for tiny n.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/lattice.hpp"

namespace oracle
{

using rwre::Coords;
using rwre::EnvironmentModel;

// Visit every directed path of n steps from 0 as its site sequence x_0..x_n.
inline void for_each_path(int d, int n, const std::function<void(const std::vector<Coords>&)>& f)
{
    std::vector<Coords> path(static_cast<std::size_t>(n) + 1, Coords(d, 0));
    std::function<void(int)> rec = [&](int k) {
        if (k == n)
        {
            f(path);
            return;
        }
        for (int i = 0; i < d; ++i)
        {
            path[k + 1] = path[k];
            ++path[k + 1][i];
            rec(k + 1);
        }
    };
    rec(0);
}

// Z_n(x) = P_omega(X_n = x) as a product of weights along each path.
inline std::map<Coords, double> partition(const EnvironmentModel& model, int n)
{
    std::map<Coords, double> z;
    const int d = model.dim();
    for_each_path(d, n, [&](const std::vector<Coords>& p) {
        double w = 1;
        for (int k = 0; k < n; ++k)
        {
            int step = 0;
            while (p[k + 1][step] == p[k][step])
                ++step;
            w *= model.site_weights(p[k]).plus(step);
        }
        z[p[n]] += w;
    });
    return z;
}

struct Overlap
{
    double w{0};  // W_n
    double j{0};  // max endpoint mass at level n-1
    double i{0};  // endpoint overlap at level n-1
};

inline Overlap overlap(const EnvironmentModel& model, int n)
{
    Overlap o;
    const double c = model.stats().c;
    double total = 0;
    for (const auto& [x, v] : partition(model, n))
        total += v;
    o.w = total / std::pow(c, n);
    auto prev = partition(model, n - 1);
    double s = 0;
    for (const auto& [x, v] : prev)
        s += v;
    for (const auto& [x, v] : prev)
    {
        o.j = std::max(o.j, v / s);
        o.i += (v / s) * (v / s);
    }
    return o;
}

// E[W_n^2] over pairs of paths; each site is used once per path, and a
// site shared by both paths contributes E[w(e) w(e')] for its two steps.
inline double pair_second_moment(const EnvironmentModel& model, int n)
{
    const auto& st = model.stats();
    const int d = model.dim();
    std::vector<std::vector<int>> steps;
    for_each_path(d, n, [&](const std::vector<Coords>& p) {
        std::vector<int> s;
        for (int k = 0; k < n; ++k)
        {
            int i = 0;
            while (p[k + 1][i] == p[k][i])
                ++i;
            s.push_back(i);
        }
        steps.push_back(s);
    });
    double total = 0;
    for (const auto& a : steps)
    {
        for (const auto& b : steps)
        {
            Coords xa(d, 0), xb(d, 0);
            double w = 1;
            for (int k = 0; k < n; ++k)
            {
                double pa = st.q[a[k]] / st.c;
                double pb = st.q[b[k]] / st.c;
                w *= pa * pb * (xa == xb ? st.rho_at(a[k], b[k]) : 1.0);
                ++xa[a[k]];
                ++xb[b[k]];
            }
            total += w;
        }
    }
    return total;
}

// E[W_n^2] by enumerating every support assignment of the sites below level n.
inline double enumerated_second_moment(const EnvironmentModel& model, int n)
{
    const int d = model.dim();
    const double c = model.stats().c;
    std::vector<Coords> sites;
    for (int level = 0; level < n; ++level)
    {
        rwre::SliceIndexer ix(d, level);
        for (std::size_t k = 0; k < ix.size(); ++k)
            sites.push_back(ix.point_of(k));
    }
    std::map<Coords, std::size_t> where;
    for (std::size_t s = 0; s < sites.size(); ++s)
        where[sites[s]] = s;

    const std::size_t m = model.support_size();
    std::vector<std::size_t> assign(sites.size(), 0);
    double total = 0;
    while (true)
    {
        double prob = 1;
        for (auto k : assign)
            prob *= model.support_probability(k);
        double z = 0;
        for_each_path(d, n, [&](const std::vector<Coords>& p) {
            double w = 1;
            for (int k = 0; k < n; ++k)
            {
                int i = 0;
                while (p[k + 1][i] == p[k][i])
                    ++i;
                w *= model.support_weights(assign[where[p[k]]]).plus(i);
            }
            z += w;
        });
        double wn = z / std::pow(c, n);
        total += prob * wn * wn;

        std::size_t pos = 0;
        while (pos < assign.size() && ++assign[pos] == m)
            assign[pos++] = 0;
        if (pos == assign.size())
            break;
    }
    return total;
}

// max over directed paths of (1/n) sum_{k<n} g(x_k), by enumeration to target.
inline double lpp(const Coords& target, const std::function<double(const Coords&)>& g)
{
    int n = 0;
    for (int v : target)
        n += v;
    const int d = static_cast<int>(target.size());
    double best = -INFINITY;
    for_each_path(d, n, [&](const std::vector<Coords>& p) {
        if (p[n] != target)
            return;
        double s = 0;
        for (int k = 0; k < n; ++k)
            s += g(p[k]);
        best = std::max(best, s / n);
    });
    return best;
}

inline double rel_diff(double a, double b)
{
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
