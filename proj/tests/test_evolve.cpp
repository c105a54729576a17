#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "degenlog/errors.hpp"
#include "degenlog/evolve.hpp"
#include "degenlog/spectral.hpp"

using namespace degenlog;

namespace {

constexpr double pi = std::numbers::pi;

Scenario square_scenario(int n) {
  Scenario s;
  s.domain = DomainSpec{Rectangle{point(0, 0), point(1, 1)}};
  s.resolution = n;
  s.params.lambda = 10.0;
  s.params.rho = 2.0;
  s.params.nu = NuProfile{Saturating{1.0, 0.05}, 1.0};
  s.params.moving_set = StaticSet{Ball{point(0.5, 0.5), 0.2}};
  s.scheme.dt = 1e-3;
  s.scheme.solve_tol = 1e-12;
  s.t0 = 0.0;
  s.t_end = 0.1;
  return s;
}

Eigen::VectorXd random_field(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  Eigen::VectorXd v(g.size());
  for (Index k = 0; k < g.size(); ++k) v(k) = u(rng);
  return v;
}

}  // namespace

TEST_CASE("zero is an equilibrium") {
  auto g = build_grid(DomainSpec{Rectangle{point(0, 0), point(1, 1)}}, 16);
  const Eigen::VectorXd n = Eigen::VectorXd::Ones(g->size());
  CHECK(imex_step(*g, Eigen::VectorXd::Zero(g->size()), n, 5.0, 2.0, 1e-3, 1e-10).isZero(0.0));
}

TEST_CASE("linear step on an eigenvector is a rational multiplier") {
  auto g = build_grid(DomainSpec{Rectangle{point(0, 0), point(1, 1)}}, 32);
  const double h = g->h();
  const double lam_h = 8.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
  const Eigen::VectorXd phi = sample(*g, [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); });
  const double lambda = 30.0, dt = 2e-3;
  Eigen::VectorXd u = phi;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g->size());
  for (int m = 0; m < 40; ++m) u = imex_step(*g, u, zero, lambda, 2.0, dt, 1e-14);
  const double factor = std::pow((1 + dt * lambda) / (1 + dt * lam_h), 40);
  CHECK((u - factor * phi).lpNorm<Eigen::Infinity>() <= 1e-10 * factor);
}

TEST_CASE("spatially constant n tracks the logistic ODE") {
  const double lambda = 2.0, nu0 = 1.5, rho = 2.0, w0 = 0.2, t_end = 2.0;
  // RK4 oracle for W' = lambda W - nu0 W^rho.
  auto rk4 = [&](double t) {
    const int steps = 20000;
    const double h = t / steps;
    double w = w0;
    auto f = [&](double y) { return lambda * y - nu0 * std::pow(y, rho); };
    for (int i = 0; i < steps; ++i) {
      const double k1 = f(w), k2 = f(w + h / 2 * k1), k3 = f(w + h / 2 * k2), k4 = f(w + h * k3);
      w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return w;
  };
  double prev_err = 1e300;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    Scenario s;
    s.domain = DomainSpec{Interval{-1000.0, 1000.0}};
    s.resolution = 200;
    s.params = {lambda, rho, NuProfile{Saturating{1.0, 1.0}, nu0}, StaticSet{EmptySet{}}};
    s.scheme.dt = dt;
    s.t_end = t_end;
    s.initial.kind = ConstantInit{w0};
    s.outputs.sample_every = 100000;
    auto g = build_grid(s.domain, s.resolution);
    Field u0 = initial_field(s, g);
    const Trajectory tr = run(s, g, u0);
    const double err = std::abs(tr.sup_norms.back() - rk4(t_end));
    CHECK(err <= 2.0 * dt);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("run bookkeeping") {
  Scenario s = square_scenario(16);
  s.t_end = s.t0;
  CHECK(run(s).size() == 1);

  s = square_scenario(16);
  s.outputs.sample_every = 10;
  s.t_end = 0.105;
  const Trajectory tr = run(s);
  CHECK(tr.size() == 12);
  CHECK(tr.times.back() == doctest::Approx(0.105));
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  CHECK(tr.growth_cap == doctest::Approx(1e4));

  s.params.rho = 0.5;
  CHECK_THROWS_AS(run(s), ConfigError);
  s = square_scenario(16);
  s.scheme.dt = 0.1;
  CHECK_THROWS_AS(run(s), ConfigError);
  s = square_scenario(16);
  s.params.moving_set = StaticSet{Ball{point(0.95, 0.5), 0.2}};
  CHECK_THROWS_AS(run(s), ConfigError);
}

TEST_CASE("decay below the principal eigenvalue") {
  Scenario s = square_scenario(16);
  auto g = build_grid(s.domain, s.resolution);
  const double lam1 = principal_eigenpair(g, g->full_mask()).value;
  s.params.lambda = 0.5 * lam1;
  s.params.nu = NuProfile{Saturating{1.0, 0.05}, 1.0};
  s.scheme.dt = 4e-3;
  s.t_end = 40.0 / (lam1 - s.params.lambda);
  s.outputs.sample_every = 50;
  const Trajectory tr = run(s);
  CHECK(tr.sup_norms.back() < 1e-6 * tr.sup_norms.front());
}

TEST_CASE("grow-up above lambda_0 of a static ball") {
  Scenario s = square_scenario(32);
  auto g = build_grid(s.domain, s.resolution);
  const double lam0 = lambda0_of_set(g, Ball{point(0.5, 0.5), 0.2}).value;
  s.params.lambda = 1.5 * lam0;
  s.scheme.dt = 1e-3;
  s.t_end = 10.0;
  const Trajectory tr = run(s);
  REQUIRE(tr.cap_hit.has_value());
  const std::size_t from = tr.size() * 4 / 5;
  for (std::size_t i = from + 1; i < tr.size(); ++i) CHECK(tr.sup_norms[i] >= tr.sup_norms[i - 1]);
}

TEST_CASE("positivity, comparison and scaling on random data") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto g = build_grid(DomainSpec{Rectangle{point(0, 0), point(1, 1)}}, 16);
  const double dt = 2e-3, lambda = 40.0, rho = 2.0, tol = 1e-13;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd n2 = random_field(*g, rng, 3.0);
    const Eigen::VectorXd n1 = n2 + random_field(*g, rng, 2.0);
    Eigen::VectorXd a = random_field(*g, rng, 2.0), b = a;
    Eigen::VectorXd v = a + random_field(*g, rng);
    Eigen::VectorXd up = 2.0 * a, down = 0.5 * a;
    for (int k = 0; k < 50; ++k) {
      a = imex_step(*g, a, n1, lambda, rho, dt, tol);
      b = imex_step(*g, b, n2, lambda, rho, dt, tol);
      v = imex_step(*g, v, n1, lambda, rho, dt, tol);
      up = imex_step(*g, up, n1, lambda, rho, dt, tol);
      down = imex_step(*g, down, n1, lambda, rho, dt, tol);
      CHECK(a.minCoeff() >= -1e-12);
      CHECK((b - a).minCoeff() >= -1e-10);
      CHECK((v - a).minCoeff() >= -1e-10);
      CHECK((2.0 * a - up).minCoeff() >= -1e-10);
      CHECK((down - 0.5 * a).minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("fault injection breaks comparison") {
  std::mt19937_64 rng(9);
  auto g = build_grid(DomainSpec{Rectangle{point(0, 0), point(1, 1)}}, 16);
  const Eigen::VectorXd n2 = Eigen::VectorXd::Zero(g->size());
  const Eigen::VectorXd n1 = Eigen::VectorXd::Constant(g->size(), 5.0);
  Eigen::VectorXd a = random_field(*g, rng), b = a;
  for (int k = 0; k < 20; ++k) {
    a = imex_step(*g, a, n1, 10.0, 2.0, 1e-3, 1e-12, true);
    b = imex_step(*g, b, n2, 10.0, 2.0, 1e-3, 1e-12, true);
  }
  CHECK((b - a).minCoeff() < -1e-6);
}
