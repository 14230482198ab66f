// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>

#include "ttoi/integrate.hpp"
#include "ttoi/snapshot_io.hpp"

namespace ttoi {

/// Uniform periodic box. Nodes sit at x0 + i*dx, i = 0..nx-1, with
/// dx = (x1 - x0) / nx; fields are flattened row-major, y fastest.
struct GridSpec2d {
  Index nx = 20;
  Index ny = 20;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  [[nodiscard]] double dx() const { return (x1 - x0) / static_cast<double>(nx); }
  [[nodiscard]] double dy() const { return (y1 - y0) / static_cast<double>(ny); }
  [[nodiscard]] Index size() const { return nx * ny; }
};

struct PdeProblem {
  enum class Kind { heat, burgers };
  Kind kind = Kind::heat;
  double mu = 0.01;  // heat diffusion coefficient (Burgers uses 1)
  double t_final = 1.0;
  double dt_snapshot = 0.01;
};

/// mu * laplacian(u) via a composed 4th-order conservative scheme: 4th-order
/// face gradients followed by a 4th-order flux divergence. Telescopes to an
/// exactly zero domain sum.
Eigen::VectorXd heat_rhs(const Eigen::VectorXd& u, const GridSpec2d& g,
                         double mu);

/// -(d/dx + d/dy)(u^2/2) + laplacian(u): 5th-order upwind-biased flux
/// interpolation for the convective part (wind direction from the face
/// average of u), the same 4th-order scheme for the diffusive part.
Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, const GridSpec2d& g);

/// The convective flux difference alone (for convergence studies).
Eigen::VectorXd burgers_convective(const Eigen::VectorXd& u,
                                   const GridSpec2d& g);

/// Benchmark initial states: heat uses cos(2 pi (x+y)); Burgers uses
/// pi sin(pi (x+y)/2) / (2 + cos(pi (x+y)/2)).
Eigen::VectorXd initial_condition(const PdeProblem& p, const GridSpec2d& g);

/// Integrates the full-order model with RK45 and records snapshots every
/// dt_snapshot, returning a structured set with state dims (nx, ny, 1, 1).
SnapshotSet generate_snapshots(const PdeProblem& p, const GridSpec2d& g,
                               const Rk45Options& integrator = {});

}  // namespace ttoi
