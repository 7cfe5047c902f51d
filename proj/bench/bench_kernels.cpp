// Wall-clock comparison of the parallel kernels against their serial references.
// The references are written for clarity (per-point allocation, scatter form),
// so the ratio mixes threading gains with implementation differences.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "rwre/diagnostics.hpp"
#include "rwre/transfer.hpp"

namespace
{

template<class F>
double seconds(F&& f, int reps)
{
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
           / reps;
}

}  // namespace

int main()
{
    using namespace rwre;
    std::printf("threads: %d\n", omp_get_max_threads());

    for (int d : {2, 3, 4})
    {
        const int level = d == 2 ? 4000 : d == 3 ? 300 : 60;
        auto model = EnvironmentModel::perturbed(d, uniform_alpha(d), 0.5, SharedSign{}, 1);
        SliceField field = SliceField::origin(d);
        for (int k = 0; k < level; ++k)
            field = forward_step(field, model);
        volatile double sink = 0;
        double tp = seconds([&] { sink = sink + forward_step(field, model).logz[0]; }, 5);
        double ts = seconds([&] { sink = sink + forward_step_serial(field, model).logz[0]; }, 5);
        std::printf("forward_step   d=%d slice=%zu  parallel %.3e s  serial %.3e s  ratio %.2f\n",
                    d, field.logz.size(), tp, ts, ts / tp);
    }

    for (int d : {2, 3})
    {
        const int steps = d == 2 ? 2000 : 120;
        auto model = EnvironmentModel::perturbed(d, uniform_alpha(d), 0.3, SharedSign{}, 1);
        double tp = seconds([&] { second_moment_exact(model, steps); }, 1);
        double ts = seconds([&] { second_moment_serial(model, steps); }, 1);
        std::printf("second_moment  d=%d N=%d  parallel %.3e s  serial %.3e s  ratio %.2f\n",
                    d, steps, tp, ts, ts / tp);
    }
    return 0;
}
