#include <doctest.h>

#include <cmath>
#include <random>

#include "asymarket/agents.hpp"
#include "asymarket/kernels.hpp"
#include "oracles.hpp"

using namespace asymarket;

TEST_SUITE("kernels") {
  TEST_CASE("block sum is reproducible and near the serial sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (std::size_t n : {std::size_t{1}, std::size_t{2047}, std::size_t{2048},
                          std::size_t{2049}, std::size_t{100000}}) {
      std::vector<double> xs(n);
      for (auto& x : xs) x = unif(rng);
      const double a = kernels::parallel::sum(xs);
      const double b = kernels::parallel::sum(xs);
      CHECK(a == b);  // bitwise stable across calls
      CHECK(a == doctest::Approx(kernels::serial::sum(xs)).epsilon(1e-12));
    }
  }

  TEST_CASE("serial and parallel steps agree") {
    std::mt19937_64 rng(9);
    oracles::InstanceOptions opt;
    opt.min_outcomes = 3;
    opt.max_outcomes = 4000;
    for (int k = 0; k < 10; ++k) {
      const auto inst = oracles::random_instance(rng, opt);
      const std::size_t n = inst.n_outcomes();
      std::vector<double> l0(n, 0.0);
      std::vector<double> s_next(n), s_r(n), s_l(n), p_next(n), p_r(n), p_l(n);
      double sp, sd, ssum, pp, pd, psum;

      std::vector<double> s_lambda = l0, p_lambda = l0;
      double s_res = 0.0, p_res = 0.0;
      const double rho = 1e-4;
      for (int it = 0; it < 50; ++it) {
        s_res = kernels::serial::step(inst, s_lambda, rho, s_next, s_r, s_l, sp, sd, ssum);
        s_lambda.swap(s_next);
        p_res = kernels::parallel::step(inst, p_lambda, rho, p_next, p_r, p_l, pp, pd, psum);
        p_lambda.swap(p_next);
      }
      CHECK(s_res == doctest::Approx(p_res).epsilon(1e-10));
      CHECK(sp == doctest::Approx(pp).epsilon(1e-12));
      CHECK(sd == doctest::Approx(pd).epsilon(1e-12));
      double max_diff = 0.0;
      for (std::size_t w = 0; w < n; ++w)
        max_diff = std::max(max_diff, std::abs(s_lambda[w] - p_lambda[w]));
      CHECK(max_diff <= 1e-10);
    }
  }

  TEST_CASE("parallel step is bitwise reproducible") {
    std::mt19937_64 rng(13);
    oracles::InstanceOptions opt;
    opt.min_outcomes = 5000;
    opt.max_outcomes = 5000;
    const auto inst = oracles::random_instance(rng, opt);
    const std::size_t n = inst.n_outcomes();

    auto run = [&] {
      std::vector<double> lambda(n, 0.0), next(n), r(n), l(n);
      double p, d, sum, res = 0.0;
      for (int it = 0; it < 30; ++it) {
        res = kernels::parallel::step(inst, lambda, 1e-4, next, r, l, p, d, sum);
        lambda.swap(next);
      }
      return std::pair{lambda, res};
    };
    const auto [l1, r1] = run();
    const auto [l2, r2] = run();
    CHECK(l1 == l2);
    CHECK(r1 == r2);
  }

  TEST_CASE("step composes the agent responses and the price update") {
    std::mt19937_64 rng(17);
    oracles::InstanceOptions opt;
    opt.max_outcomes = 40;
    for (int k = 0; k < 25; ++k) {
      const auto inst = oracles::random_instance(rng, opt);
      const std::size_t n = inst.n_outcomes();
      PriceVector prices{std::vector<double>(n)};
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& v : prices.lambda) v = unif(rng);

      const double rho = 3e-4;
      const auto prod = producer_best_response(prices, inst);
      const auto cons = consumer_best_response(prices, inst);
      const DispatchSchedule dispatch{prod.p, prod.r, cons.d, cons.l};
      const auto updated = price_update(prices, dispatch, inst, rho);

      std::vector<double> next(n), r(n), l(n);
      double p, d, sum;
      const double res = kernels::serial::step(inst, prices.lambda, rho, next, r, l, p, d, sum);

      CHECK(p == doctest::Approx(prod.p).epsilon(1e-13));
      CHECK(d == doctest::Approx(cons.d).epsilon(1e-13));
      double worst = 0.0, worst_imb = 0.0;
      for (std::size_t w = 0; w < n; ++w) {
        worst = std::max(worst, std::abs(next[w] - updated.lambda[w]));
        const double imb = prod.p + prod.r[w] + inst.outcomes[w] - cons.d - cons.l[w];
        worst_imb = std::max(worst_imb, imb * imb);
      }
      CHECK(worst <= 1e-12);
      CHECK(res == doctest::Approx(worst_imb).epsilon(1e-10));
    }
  }

  TEST_CASE("demand excess kernels agree and match the closed form") {
    const auto inst = oracles::reference_two_outcome();
    std::vector<double> z(2);
    kernels::serial::demand_excess(inst, std::vector<double>{0.0, 0.0}, z);
    CHECK(z[0] == doctest::Approx(2.0 * 5.0 / 0.3 - 1.0).epsilon(1e-12));  // 33.33 - xi
    CHECK(z[1] == doctest::Approx(2.0 * 5.0 / 0.3 - 3.0).epsilon(1e-12));

    std::mt19937_64 rng(23);
    oracles::InstanceOptions opt;
    opt.min_outcomes = 100;
    opt.max_outcomes = 3000;
    for (int k = 0; k < 5; ++k) {
      const auto big = oracles::random_instance(rng, opt);
      const std::size_t n = big.n_outcomes();
      std::vector<double> lambda(n), zs(n), zp(n);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& v : lambda) v = unif(rng);
      kernels::serial::demand_excess(big, lambda, zs);
      kernels::parallel::demand_excess(big, lambda, zp);
      for (std::size_t w = 0; w < n; ++w)
        CHECK(zs[w] == doctest::Approx(zp[w]).epsilon(1e-11));
    }
  }
}
