#include <benchmark/benchmark.h>

#include "mbda/classify.hpp"
#include "mbda/discriminant.hpp"
#include "mbda/eigensolve.hpp"
#include "mbda/gabor.hpp"
#include "mbda/tensor.hpp"

#include <random>
#include <vector>

namespace {

mbda::Tensor random_tensor(const std::vector<mbda::Index>& dims, unsigned seed) {
    mbda::Tensor t(dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (mbda::Index i = 0; i < t.size(); ++i) {
        t.values()[i] = dist(rng);
    }
    return t;
}

void BM_Unfold(benchmark::State& state) {
    const mbda::Tensor t = random_tensor({57, 102, 16, 4}, 1);
    const int mode = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::unfold(t, mode));
    }
}
BENCHMARK(BM_Unfold)->DenseRange(0, 3);

void BM_ModeProduct(benchmark::State& state) {
    const mbda::Tensor t = random_tensor({57, 102, 16, 4}, 2);
    const mbda::Matrix w = mbda::Matrix::Random(3, 57);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::mode_product(t, w, 0));
    }
}
BENCHMARK(BM_ModeProduct);

void BM_GeneralizedEig(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    mbda::Matrix a(n, n), b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = dist(rng);
            b(i, j) = dist(rng);
        }
    }
    const mbda::Matrix s_y = a * a.transpose();
    const mbda::Matrix s_x = b * b.transpose() + mbda::Matrix::Identity(n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::solve_generalized(s_y, s_x, n, 1e-8));
    }
}
BENCHMARK(BM_GeneralizedEig)->Arg(16)->Arg(57)->Arg(102);

void BM_GaborResponse(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    mbda::Matrix image(32, 56);
    for (mbda::Index r = 0; r < 32; ++r) {
        for (mbda::Index c = 0; c < 56; ++c) {
            image(r, c) = dist(rng);
        }
    }
    const mbda::GaborBank bank = mbda::make_bank(4, static_cast<int>(state.range(0)), 3.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::response(image, bank));
    }
}
BENCHMARK(BM_GaborResponse)->Arg(1)->Arg(2);

void BM_FitAlternating(benchmark::State& state) {
    std::vector<mbda::Tensor> pos, neg;
    for (unsigned i = 0; i < 8; ++i) {
        pos.push_back(random_tensor({16, 28, 8, 4}, 100 + i));
        neg.push_back(random_tensor({16, 28, 8, 4}, 200 + i));
    }
    mbda::MbdaConfig config;
    config.target_dims = {3, 4, 1, 1};
    config.max_iterations = static_cast<int>(state.range(0));
    config.tolerance = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::fit_mbda(pos, neg, config));
    }
}
BENCHMARK(BM_FitAlternating)->Arg(1)->Arg(5);

void BM_TrainSvm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<mbda::Vector> x;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        const double shift = i % 2 == 0 ? 1.0 : -1.0;
        mbda::Vector v(20);
        for (mbda::Index j = 0; j < 20; ++j) {
            v[j] = shift + noise(rng);
        }
        x.push_back(v);
        y.push_back(i % 2 == 0 ? 1 : -1);
    }
    mbda::SvmConfig config;
    config.gamma = mbda::default_gamma(x);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mbda::train_svm(x, y, config));
    }
}
BENCHMARK(BM_TrainSvm)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
