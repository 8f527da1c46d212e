// Throughput comparison of the OpenMP kernels against their serial reference
// twins. Run with OMP_NUM_THREADS to vary the worker count.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "vmdiff/kernels.hpp"

using namespace vmdiff;

namespace {

double time_ms(const std::function<void()>& fn, int iters) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

void report(const char* name, double serial_ms, double parallel_ms,
            double max_diff) {
    std::printf("%-22s %10.3f ms %10.3f ms %8.2fx   max |d| %.2e\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

template <typename C>
double max_abs_diff(const C& a, const C& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp",
                "speedup");
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto fill = [&](auto& v) {
        for (auto& x : v) x = static_cast<typename std::decay_t<decltype(v)>::value_type>(nd(gen));
    };

    {  // conv3x3 forward, float, 64x64x32 -> 32
        const int hw = 64, c = 32;
        std::vector<float> in(hw * hw * c), w(9 * c * c), b(c),
            o1(hw * hw * c), o2(o1.size());
        fill(in);
        fill(w);
        fill(b);
        const double ts = time_ms(
            [&] {
                kernels::serial::conv3x3_forward(in.data(), hw, hw, c,
                                                 w.data(), b.data(), c,
                                                 o1.data());
            },
            20);
        const double tp = time_ms(
            [&] {
                kernels::conv3x3_forward(in.data(), hw, hw, c, w.data(),
                                         b.data(), c, o2.data());
            },
            20);
        report("conv3x3 fwd f32", ts, tp, max_abs_diff(o1, o2));
    }
    {  // conv3x3 weight gradient
        const int hw = 64, c = 32;
        std::vector<float> in(hw * hw * c), go(hw * hw * c), g1(9 * c * c),
            g2(g1.size()), b1(c), b2(c);
        fill(in);
        fill(go);
        const double ts = time_ms(
            [&] {
                kernels::serial::conv3x3_grad_weights(in.data(), go.data(), hw,
                                                      hw, c, c, g1.data(),
                                                      b1.data());
            },
            20);
        const double tp = time_ms(
            [&] {
                kernels::conv3x3_grad_weights(in.data(), go.data(), hw, hw, c,
                                              c, g2.data(), b2.data());
            },
            20);
        report("conv3x3 grad-w f32", ts, tp, max_abs_diff(g1, g2));
    }
    {  // hankel round trip on a 64x64x3 patch, k=8
        const int side = 64, ch = 3, k = 8;
        const int wr = side - k + 1;
        std::vector<double> patch(side * side * ch),
            m1(static_cast<size_t>(wr) * wr * ch * k * k), m2(m1.size()),
            p1(patch.size()), p2(patch.size());
        fill(patch);
        const double ts = time_ms(
            [&] {
                kernels::serial::hankel_lift(patch.data(), side, side, ch, k,
                                             m1.data());
                kernels::serial::hankel_unlift(m1.data(), side, side, ch, k,
                                               p1.data());
            },
            20);
        const double tp = time_ms(
            [&] {
                kernels::hankel_lift(patch.data(), side, side, ch, k,
                                     m2.data());
                kernels::hankel_unlift(m2.data(), side, side, ch, k,
                                       p2.data());
            },
            20);
        report("hankel lift+unlift", ts, tp,
               std::max(max_abs_diff(m1, m2), max_abs_diff(p1, p2)));
    }
    {  // ssim window statistics, 256x256x3
        const int side = 256, ch = 3, k = 11;
        std::vector<double> x(side * side * ch), y(x.size()), win(k * k);
        fill(x);
        fill(y);
        double total = 0.0;
        for (auto& v : win) total += (v = 1.0);
        for (auto& v : win) v /= total;
        double r1 = 0, r2 = 0;
        const double ts = time_ms(
            [&] {
                r1 = kernels::serial::ssim_windows(x.data(), y.data(), side,
                                                   side, ch, win.data(), k,
                                                   1e-4, 9e-4);
            },
            3);
        const double tp = time_ms(
            [&] {
                r2 = kernels::ssim_windows(x.data(), y.data(), side, side, ch,
                                           win.data(), k, 1e-4, 9e-4);
            },
            3);
        report("ssim windows", ts, tp, std::abs(r1 - r2));
    }
    {  // reductions over 4M doubles
        std::vector<double> v(4 << 20);
        fill(v);
        double r1 = 0, r2 = 0;
        const double ts = time_ms(
            [&] { r1 = kernels::serial::sum_squares(v.data(), v.size()); }, 50);
        const double tp =
            time_ms([&] { r2 = kernels::sum_squares(v.data(), v.size()); }, 50);
        report("sum of squares", ts, tp,
               std::abs(r1 - r2) / std::max(1.0, std::abs(r1)));
    }
    return 0;
}
