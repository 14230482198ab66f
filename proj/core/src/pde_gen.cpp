// SPDX-License-Identifier: MIT

#include "ttoi/pde_gen.hpp"

#include <cmath>

namespace ttoi {
namespace {

void check_grid(const GridSpec2d& g) {
  if (g.nx < 8 || g.ny < 8) {
    throw InvalidInputError("grid: need at least 8 cells per direction");
  }
  if (g.x1 <= g.x0 || g.y1 <= g.y0) {
    throw InvalidInputError("grid: empty domain");
  }
}

inline Index wrap(Index i, Index n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// One periodic line of the composed 4th-order laplacian:
// face gradients g[i] between nodes i, i+1, then their flux divergence.
template <class Get, class Add>
void laplacian_line(Index n, double h, double coeff, Get u, Add add) {
  std::vector<double> face(static_cast<std::size_t>(n));
  const double c = 1.0 / (24.0 * h);
  for (Index i = 0; i < n; ++i) {
    face[static_cast<std::size_t>(i)] =
        c * (27.0 * (u(wrap(i + 1, n)) - u(i)) -
             (u(wrap(i + 2, n)) - u(wrap(i - 1, n))));
  }
  const double cd = coeff / (24.0 * h);
  for (Index i = 0; i < n; ++i) {
    const double f0 = face[static_cast<std::size_t>(wrap(i - 2, n))];
    const double f1 = face[static_cast<std::size_t>(wrap(i - 1, n))];
    const double f2 = face[static_cast<std::size_t>(i)];
    const double f3 = face[static_cast<std::size_t>(wrap(i + 1, n))];
    add(i, cd * (27.0 * (f2 - f1) - (f3 - f0)));
  }
}

// 5th-order upwind-biased interpolation of the flux q = u^2/2 to faces,
// then a conservative two-point difference.
template <class Get, class Add>
void convective_line(Index n, double h, Get u, Add add) {
  std::vector<double> face(static_cast<std::size_t>(n));
  auto q = [&](Index i) {
    const double v = u(wrap(i, n));
    return 0.5 * v * v;
  };
  for (Index i = 0; i < n; ++i) {
    const double wind = 0.5 * (u(i) + u(wrap(i + 1, n)));
    double f;
    if (wind >= 0.0) {
      f = (2.0 * q(i - 2) - 13.0 * q(i - 1) + 47.0 * q(i) + 27.0 * q(i + 1) -
           3.0 * q(i + 2)) /
          60.0;
    } else {
      f = (2.0 * q(i + 3) - 13.0 * q(i + 2) + 47.0 * q(i + 1) + 27.0 * q(i) -
           3.0 * q(i - 1)) /
          60.0;
    }
    face[static_cast<std::size_t>(i)] = f;
  }
  for (Index i = 0; i < n; ++i) {
    add(i, -(face[static_cast<std::size_t>(i)] -
             face[static_cast<std::size_t>(wrap(i - 1, n))]) /
               h);
  }
}

}  // namespace

Eigen::VectorXd heat_rhs(const Eigen::VectorXd& u, const GridSpec2d& g,
                         double mu) {
  check_grid(g);
  if (u.size() != g.size()) throw ShapeError("heat_rhs: field size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (Index j = 0; j < g.ny; ++j) {
    laplacian_line(
        g.nx, g.dx(), mu, [&](Index i) { return u(i * g.ny + j); },
        [&](Index i, double v) { out(i * g.ny + j) += v; });
  }
  for (Index i = 0; i < g.nx; ++i) {
    laplacian_line(
        g.ny, g.dy(), mu, [&](Index j) { return u(i * g.ny + j); },
        [&](Index j, double v) { out(i * g.ny + j) += v; });
  }
  return out;
}

Eigen::VectorXd burgers_convective(const Eigen::VectorXd& u,
                                   const GridSpec2d& g) {
  check_grid(g);
  if (u.size() != g.size()) {
    throw ShapeError("burgers_convective: field size mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (Index j = 0; j < g.ny; ++j) {
    convective_line(
        g.nx, g.dx(), [&](Index i) { return u(i * g.ny + j); },
        [&](Index i, double v) { out(i * g.ny + j) += v; });
  }
  for (Index i = 0; i < g.nx; ++i) {
    convective_line(
        g.ny, g.dy(), [&](Index j) { return u(i * g.ny + j); },
        [&](Index j, double v) { out(i * g.ny + j) += v; });
  }
  return out;
}

Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, const GridSpec2d& g) {
  Eigen::VectorXd out = burgers_convective(u, g);
  out += heat_rhs(u, g, 1.0);
  return out;
}

Eigen::VectorXd initial_condition(const PdeProblem& p, const GridSpec2d& g) {
  check_grid(g);
  Eigen::VectorXd u(g.size());
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < g.nx; ++i) {
    const double x = g.x0 + g.dx() * static_cast<double>(i);
    for (Index j = 0; j < g.ny; ++j) {
      const double y = g.y0 + g.dy() * static_cast<double>(j);
      if (p.kind == PdeProblem::Kind::heat) {
        u(i * g.ny + j) = std::cos(2.0 * pi * (x + y));
      } else {
        const double s = 0.5 * pi * (x + y);
        u(i * g.ny + j) = pi * std::sin(s) / (2.0 + std::cos(s));
      }
    }
  }
  return u;
}

SnapshotSet generate_snapshots(const PdeProblem& p, const GridSpec2d& g,
                               const Rk45Options& integrator) {
  check_grid(g);
  if (p.t_final <= 0 || p.dt_snapshot <= 0) {
    throw InvalidInputError("generate_snapshots: nonpositive times");
  }
  const double ratio = p.t_final / p.dt_snapshot;
  const Index steps = static_cast<Index>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9) {
    throw InvalidInputError(
        "generate_snapshots: dt_snapshot must divide t_final");
  }

  std::vector<double> times(static_cast<std::size_t>(steps + 1));
  for (Index k = 0; k <= steps; ++k) {
    times[static_cast<std::size_t>(k)] = p.dt_snapshot * static_cast<double>(k);
  }

  auto rhs = [&](double, const Eigen::VectorXd& u) {
    return p.kind == PdeProblem::Kind::heat ? heat_rhs(u, g, p.mu)
                                            : burgers_rhs(u, g);
  };
  auto sol = rk45(rhs, initial_condition(p, g), times, integrator);

  SnapshotSet out(SnapshotSet::Layout::structured, {g.nx, g.ny, 1, 1},
                  steps + 1, 0.0, p.dt_snapshot);
  for (Index k = 0; k <= steps; ++k) {
    out.set_snapshot(k, sol.states[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace ttoi
