// SPDX-License-Identifier: MIT

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ttoi/pde_gen.hpp"

using namespace ttoi;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sample(const GridSpec2d& g,
                       double (*f)(double, double)) {
  Eigen::VectorXd u(g.size());
  for (Index i = 0; i < g.nx; ++i) {
    for (Index j = 0; j < g.ny; ++j) {
      u(i * g.ny + j) = f(g.x0 + i * g.dx(), g.y0 + j * g.dy());
    }
  }
  return u;
}

double wave(double x, double y) { return std::cos(2.0 * kPi * (x + y)); }

double smooth(double x, double y) {
  return std::exp(std::sin(0.5 * kPi * (x + y)));
}

}  // namespace

TEST_SUITE_BEGIN("pde_gen");

TEST_CASE("grid nodes nest under refinement") {
  const GridSpec2d coarse{10, 10, 0.0, 2.0, 0.0, 2.0};
  const GridSpec2d fine{20, 20, 0.0, 2.0, 0.0, 2.0};
  for (Index i = 0; i < coarse.nx; ++i) {
    CHECK(coarse.x0 + i * coarse.dx() ==
          doctest::Approx(fine.x0 + 2 * i * fine.dx()).epsilon(1e-15));
  }
}

TEST_CASE("diffusion stencil reaches fourth order") {
  const double mu = 0.01;
  std::vector<double> errs;
  for (Index n : {20, 40, 80}) {
    const GridSpec2d g{n, n, 0.0, 1.0, 0.0, 1.0};
    const Eigen::VectorXd u = sample(g, wave);
    const Eigen::VectorXd got = heat_rhs(u, g, mu);
    const Eigen::VectorXd exact = -8.0 * kPi * kPi * mu * u;
    errs.push_back((got - exact).lpNorm<Eigen::Infinity>());
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 > 3.7);
  CHECK(order1 < 4.3);
  CHECK(order2 > 3.7);
  CHECK(order2 < 4.3);
}

TEST_CASE("diffusion telescopes to a zero domain sum") {
  const GridSpec2d g{16, 16, 0.0, 1.0, 0.0, 1.0};
  const Eigen::VectorXd u = sample(g, smooth);
  const Eigen::VectorXd r = heat_rhs(u, g, 0.37);
  CHECK(std::abs(r.sum()) < 1e-12 * r.lpNorm<Eigen::Infinity>() * g.size());
}

TEST_CASE("convective flux reaches fifth order") {
  std::vector<double> errs;
  for (Index n : {32, 64, 128}) {
    const GridSpec2d g{n, n, 0.0, 4.0, 0.0, 4.0};
    const Eigen::VectorXd u = sample(g, smooth);
    // -(d/dx + d/dy)(u^2/2) with u = exp(sin(pi (x+y)/2))
    Eigen::VectorXd exact(g.size());
    for (Index i = 0; i < g.nx; ++i) {
      for (Index j = 0; j < g.ny; ++j) {
        const double s = g.x0 + i * g.dx() + g.y0 + j * g.dy();
        const double uv = std::exp(std::sin(0.5 * kPi * s));
        const double du = 0.5 * kPi * std::cos(0.5 * kPi * s) * uv;
        exact(i * g.ny + j) = -2.0 * uv * du;
      }
    }
    const Eigen::VectorXd got = burgers_convective(u, g);
    errs.push_back((got - exact).lpNorm<Eigen::Infinity>());
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 > 4.5);
  CHECK(order1 < 5.5);
  CHECK(order2 > 4.5);
  CHECK(order2 < 5.5);
}

TEST_CASE("initial conditions match their closed forms") {
  const GridSpec2d g{8, 8, 0.0, 1.0, 0.0, 1.0};
  PdeProblem heat;
  const Eigen::VectorXd u = initial_condition(heat, g);
  CHECK(u(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u(1 * 8 + 2) ==
        doctest::Approx(std::cos(2.0 * kPi * (0.125 + 0.25))).epsilon(1e-14));

  const GridSpec2d gb{8, 8, 0.0, 4.0, 0.0, 4.0};
  PdeProblem burg;
  burg.kind = PdeProblem::Kind::burgers;
  const Eigen::VectorXd v = initial_condition(burg, gb);
  const double x = 0.5, y = 1.0;
  const double s = 0.5 * kPi * (x + y);
  CHECK(v(1 * 8 + 2) ==
        doctest::Approx(kPi * std::sin(s) / (2.0 + std::cos(s)))
            .epsilon(1e-14));
}

TEST_CASE("snapshot generation records the requested grid of times") {
  const GridSpec2d g{8, 8, 0.0, 1.0, 0.0, 1.0};
  PdeProblem p;
  p.mu = 0.05;
  p.t_final = 0.1;
  p.dt_snapshot = 0.02;
  const SnapshotSet s = generate_snapshots(p, g);
  CHECK(s.layout == SnapshotSet::Layout::structured);
  CHECK(s.state_dims == std::vector<Index>{8, 8, 1, 1});
  CHECK(s.count == 6);
  CHECK(s.t0 == 0.0);
  CHECK(s.dt == 0.02);
  const Eigen::VectorXd ic = initial_condition(p, g);
  CHECK((s.snapshot(0) - ic).norm() == 0.0);
  // diffusion only damps this initial profile
  CHECK(s.snapshot(5).lpNorm<Eigen::Infinity>() <
        ic.lpNorm<Eigen::Infinity>());
}

TEST_SUITE_END();
