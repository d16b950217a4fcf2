// Cost of the weighted least-squares path and the t-distribution tail.

#include <benchmark/benchmark.h>

#include <wagedecomp/numeric.hpp>
#include <wagedecomp/regression.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace {

using namespace wagedecomp;

struct System {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
};

System make_system(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    const auto u01 = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };

    System s;
    s.X.resize(n, p);
    s.X.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 1; j < p; ++j)
            s.X(i, j) = -3.0 + 6.0 * u01();
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j)
        beta[j] = -1.0 + 2.0 * u01();
    s.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = inverse_normal_cdf((static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53);
        s.y[i] = s.X.row(i).dot(beta) + 0.3 * z;
    }
    s.w = Eigen::VectorXd::Ones(n);
    return s;
}

void bm_fit_wls(benchmark::State &state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto p = static_cast<Eigen::Index>(state.range(1));
    const System s = make_system(n, p, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_wls(s.X, s.y, s.w));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(bm_fit_wls)->Args({1000, 4})->Args({10000, 4})->Args({100000, 8});

void bm_student_t_sf(benchmark::State &state) {
    const double df = static_cast<double>(state.range(0));
    double t = 0.0;
    for (auto _ : state) {
        t = t >= 10.0 ? 0.0 : t + 0.125;
        benchmark::DoNotOptimize(student_t_sf(t, df));
    }
}
BENCHMARK(bm_student_t_sf)->Arg(5)->Arg(30)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
