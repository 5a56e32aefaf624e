#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "psun/logistic_kolmogorov.hpp"
#include "psun/mixing_laws.hpp"
#include "psun/psun.hpp"
#include "psun/regression.hpp"
#include "psun/tmvn.hpp"

using namespace psun;

namespace {

void BM_LkDensity(benchmark::State& state) {
  const double v = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(lk_density(v));
}
BENCHMARK(BM_LkDensity)->Arg(5)->Arg(19)->Arg(20)->Arg(80);

void BM_KolmogorovCdf(benchmark::State& state) {
  const double x = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov_cdf(x));
}
BENCHMARK(BM_KolmogorovCdf)->Arg(5)->Arg(10)->Arg(20);

void BM_SampleVGivenT(benchmark::State& state) {
  RngStream rng(1);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_v_given_t(t, rng).v);
}
BENCHMARK(BM_SampleVGivenT)->Arg(0)->Arg(10)->Arg(1000);

void BM_LkPriorSample(benchmark::State& state) {
  RngStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(lk_prior_sample(rng));
}
BENCHMARK(BM_LkPriorSample);

void BM_GigSample(benchmark::State& state) {
  RngStream rng(3);
  const double lambda = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(gig_sample(lambda, 2.0, 1.0, rng));
}
BENCHMARK(BM_GigSample)->Arg(5)->Arg(3)->Arg(30);

void BM_TmvnExact(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RngStream rng(4);
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd sigma = a * a.transpose();
  sigma.diagonal().array() += 1.0;
  TruncationSpec spec{Eigen::VectorXd::Zero(k), sigma};
  TiltedSequentialSampler sampler(spec);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_TmvnExact)->Arg(10)->Arg(25)->Arg(74);

void BM_TmvnKernel(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RngStream rng(5);
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd sigma = a * a.transpose();
  sigma.diagonal().array() += 1.0;
  TruncationSpec spec{Eigen::VectorXd::Zero(k), sigma};
  TmvnGibbsKernel kernel;
  kernel.reset(Eigen::VectorXd::Constant(k, -1.0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel.step(spec, 5, rng));
}
BENCHMARK(BM_TmvnKernel)->Arg(25)->Arg(74)->Arg(250);

void BM_GibbsIterationExpressionShaped(benchmark::State& state) {
  // n = 74, p = 517 logit-Laplace posterior, one full Gibbs scan.
  const int n = 74, p = 517;
  RngStream rng(6);
  BinaryDesign d;
  d.link = Link::kLogit;
  d.x.resize(n, p);
  d.x.col(0).setOnes();
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < p; ++j) d.x(i, j) = rng.normal();
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.y[i] = i % 2;
  for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
  const PriorSpec prior = prior_from_recipe(Link::kLogit, PriorFamily::kLaplaceIndep, p);
  const PosteriorPsun post = build_posterior(d, prior);
  GibbsChain chain(post.dist, GibbsConfig{}, RngStream(7));
  for (auto _ : state) {
    chain.step();
    benchmark::DoNotOptimize(chain.state().y.sum());
  }
}
BENCHMARK(BM_GibbsIterationExpressionShaped)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
