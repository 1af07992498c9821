#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "skm/linalg.hpp"
#include "skm/math_utils.hpp"
#include "skm/rng.hpp"

using namespace skm;

TEST_CASE("normal cdf reference values") {
  CHECK(gauss_to_uniform(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  // high-precision value of Phi(1.96)
  CHECK(gauss_to_uniform(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(gauss_to_uniform(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  // symmetry on sampled points
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double z = 4.0 * (rng.uniform() - 0.5);
    CHECK(gauss_to_uniform(-z) == doctest::Approx(1.0 - gauss_to_uniform(z)).epsilon(1e-12));
  }
  // clamped tails stay strictly inside (0,1)
  CHECK(gauss_to_uniform(40.0) < 1.0);
  CHECK(gauss_to_uniform(-40.0) > 0.0);
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  for (double z : {-8.0, -3.5, -1.0, 0.3, 2.2}) {
    CHECK(norm_quantile(norm_cdf(z)) == doctest::Approx(z).epsilon(1e-9));
  }
  // the upper tail is limited by the spacing of doubles near 1, not by the
  // quantile algorithm; the round trip there is only ulp(1)/phi(z) accurate
  CHECK(norm_quantile(norm_cdf(6.0)) == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("poisson quantile small cases") {
  CHECK(poisson_quantile(0.0, 0.3) == 0);
  CHECK(poisson_quantile(0.0, 0.99) == 0);
  // lambda=1: P(X<=0)=0.3679 < 0.5 <= 0.7358=P(X<=1)
  CHECK(poisson_quantile(1.0, 0.5) == 1);
  CHECK(poisson_quantile(1.0, 0.36) == 0);
  CHECK(poisson_quantile(1.0, 0.37) == 1);
}

TEST_CASE("poisson quantile matches cumulative-sum oracle") {
  // brute-force CDF inversion oracle
  auto oracle = [](double lambda, double p) {
    long double term = std::exp(-(long double)lambda);
    long double cum = term;
    long long k = 0;
    while (cum < p) {
      ++k;
      term *= lambda / (long double)k;
      cum += term;
    }
    return k;
  };
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
  for (double lambda : {0.3, 1.7, 5.0, 29.9, 31.0, 80.0, 400.0}) {
    for (int i = 0; i < 200; ++i) {
      const double p = unif(gen);
      CHECK(poisson_quantile(lambda, p) == oracle(lambda, p));
    }
  }
}

TEST_CASE("poisson quantile monotone in p") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(1e-8, 1.0 - 1e-8);
  for (double lambda : {0.5, 3.0, 120.0}) {
    for (int i = 0; i < 300; ++i) {
      double p1 = unif(gen), p2 = unif(gen);
      if (p1 > p2) std::swap(p1, p2);
      CHECK(poisson_quantile(lambda, p1) <= poisson_quantile(lambda, p2));
    }
  }
}

TEST_CASE("poisson quantile large-lambda fallback") {
  // above the inversion threshold the continuity-corrected normal holds
  const double lambda = 2e6;
  const long long q = poisson_quantile(lambda, 0.5);
  CHECK(std::abs(q - 2e6) < 3.0);
  CHECK(poisson_quantile(lambda, 1e-12) < q);
}

TEST_CASE("pairwise sum and log-sum-exp") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double direct = [&] {
    long double s = 0;
    for (double x : v) s += x;
    return (double)s;
  }();
  CHECK(pairwise_sum(v) == doctest::Approx(direct).epsilon(1e-14));

  std::vector<double> lw = {-1000.0, -1001.0, -999.5};
  const double lse = log_sum_exp(lw);
  CHECK(lse == doctest::Approx(-999.5 + std::log(1.0 + std::exp(-0.5) + std::exp(-1.5)))
                   .epsilon(1e-12));
  std::vector<double> none;
  CHECK(std::isinf(log_sum_exp(none)));
}

TEST_CASE("psd_sqrt basics") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  CHECK((psd_sqrt(eye) - eye).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  Eigen::MatrixXd r = psd_sqrt(d);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(r(0, 1)) < 1e-14);

  // reconstruction on a random PSD matrix
  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  Eigen::MatrixXd b = psd_sqrt(a);
  CHECK((b * b.transpose() - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b - b.transpose()).cwiseAbs().maxCoeff() < 1e-10);  // symmetric root

  // asymmetric input rejected
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(psd_sqrt(bad), std::invalid_argument);

  // tiny negative eigenvalues are clamped quietly
  Eigen::MatrixXd nearpsd(2, 2);
  nearpsd << 1.0, 1.0, 1.0, 1.0 - 1e-12;
  PsdSqrtInfo info;
  Eigen::MatrixXd rooted = psd_sqrt(nearpsd, &info);
  CHECK(info.clamped);
  CHECK(!info.large_clamp);
}

TEST_CASE("gaussian logpdf scalar against closed form") {
  Eigen::VectorXd x(1), mu(1);
  Eigen::MatrixXd v(1, 1);
  x << 6.0;
  mu << 5.0;
  v << 4.0;
  const double expect = -std::log(2.0 * std::sqrt(2.0 * M_PI)) - 0.125;
  CHECK(*gaussian_logpdf(x, mu, v) == doctest::Approx(expect).epsilon(1e-12));
  v << 0.0;
  CHECK(!gaussian_logpdf(x, mu, v).has_value());
}

TEST_CASE("rng stream reproducibility") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  Rng c(43);
  CHECK(a.uniform() != c.uniform());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}
