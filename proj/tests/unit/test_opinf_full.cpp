// SPDX-License-Identifier: MIT

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ttoi/errors.hpp"
#include "ttoi/opinf_full.hpp"
#include "ttoi/opinf_rom.hpp"
#include "ttoi/snapshot_io.hpp"

using namespace ttoi;
using testing::rel_diff;

namespace {

/// Smooth well-conditioned snapshots: orthonormal random spatial modes
/// carrying random cubic time polynomials.
SnapshotSet smooth_snapshots(const std::vector<Index>& dims, Index count,
                             Index nmodes, std::mt19937& rng) {
  SnapshotSet s(SnapshotSet::Layout::structured, dims, count, 0.0, 0.01);
  const Index n = s.state_size();
  std::normal_distribution<double> normal;

  Eigen::MatrixXd raw(n, nmodes);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < nmodes; ++j) raw(i, j) = normal(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd modes =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, nmodes);

  Eigen::MatrixXd coeff(4, nmodes);
  for (Index c = 0; c < 4; ++c) {
    for (Index j = 0; j < nmodes; ++j) coeff(c, j) = normal(rng);
  }
  for (Index k = 0; k < count; ++k) {
    const double tau =
        2.0 * static_cast<double>(k) / static_cast<double>(count - 1) - 1.0;
    Eigen::VectorXd weights(nmodes);
    for (Index j = 0; j < nmodes; ++j) {
      weights(j) = coeff(0, j) + coeff(1, j) * tau + coeff(2, j) * tau * tau +
                   coeff(3, j) * tau * tau * tau;
    }
    s.set_snapshot(k, modes * weights);
  }
  return s;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_SUITE_BEGIN("opinf_full");

TEST_CASE("the data tensor holds states, squares, and zero cross terms") {
  std::mt19937 rng(3);
  const SnapshotSet s = smooth_snapshots({2, 2, 1, 1}, 6, 2, rng);
  const DenseTensor d = assemble_data_tensor(s);
  const auto entry = [&](std::vector<Index> idx) { return d.at(idx); };

  // modes: state (2,2,1,1), augmented (3,3,2,2), time 6
  REQUIRE(d.shape() == std::vector<Index>{2, 2, 1, 1, 3, 3, 2, 2, 6});

  for (Index k = 0; k < 6; ++k) {
    const Eigen::VectorXd x = s.snapshot(k);
    // augmented block all zero: the state itself
    CHECK(entry({1, 0, 0, 0, 0, 0, 0, 0, k}) == x(2));
    // augmented block all >= 1: the kronecker square shifted by one
    CHECK(entry({1, 0, 0, 0, 2, 2, 1, 1, k}) ==
          doctest::Approx(x(2) * x(3)).epsilon(1e-14));
    CHECK(entry({0, 1, 0, 0, 1, 1, 1, 1, k}) ==
          doctest::Approx(x(1) * x(0)).epsilon(1e-14));
    // mixed augmented indices vanish
    CHECK(entry({1, 0, 0, 0, 2, 0, 1, 1, k}) == 0.0);
    CHECK(entry({0, 1, 0, 0, 0, 1, 1, 1, k}) == 0.0);
  }
}

TEST_CASE("exact train assembly matches the dense data tensor") {
  std::mt19937 rng(7);
  const SnapshotSet s = smooth_snapshots({3, 2, 1, 1}, 8, 3, rng);
  const DenseTensor dense = assemble_data_tensor(s);
  const TtTensor tt = assemble_data_tensor(tt_svd(s.tensor(), {0.0}), {0.0});
  CHECK(rel_diff(full(tt), dense) < 1e-12);
}

TEST_CASE("derivative tensors agree with the matrix stencil") {
  std::mt19937 rng(11);
  const SnapshotSet s = smooth_snapshots({2, 3, 1, 1}, 9, 2, rng);
  const DenseTensor r = derivative_tensor(s, 4);
  const Eigen::MatrixXd targets =
      derivative_targets(s.matrix().transpose(), s.dt, 4);  // count x nstate
  REQUIRE(r.shape() == std::vector<Index>{2, 3, 1, 1, 9});
  for (Index i = 0; i < 6; ++i) {
    for (Index k = 0; k < 9; ++k) {
      CHECK(r.data()[i * 9 + k] ==
            doctest::Approx(targets(k, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("full-order learning reproduces linear dynamics") {
  // dx/dt = A x with a known symmetric A, snapshots from the exact flow
  std::mt19937 rng(13);
  const Index n = 6;
  std::normal_distribution<double> normal;
  Eigen::MatrixXd sym(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) sym(i, j) = normal(rng);
  }
  const Eigen::MatrixXd a_true =
      0.25 * (sym + sym.transpose()) - 2.0 * Eigen::MatrixXd::Identity(n, n);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_true);
  const Eigen::MatrixXd expm_step =
      eig.eigenvectors() *
      (0.01 * eig.eigenvalues()).array().exp().matrix().asDiagonal() *
      eig.eigenvectors().transpose();

  SnapshotSet s(SnapshotSet::Layout::structured, {3, 2, 1, 1}, 40, 0.0, 0.01);
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = normal(rng);
  for (Index k = 0; k < 40; ++k) {
    s.set_snapshot(k, x);
    x = expm_step * x;
  }

  const FullOperators ops = ft_learn(s, 0.0, 4);
  double worst = 0.0;
  for (Index k = 0; k < 40; ++k) {
    const Eigen::VectorXd xi = s.snapshot(k);
    const Eigen::VectorXd got = full_rhs(ops, xi);
    const Eigen::VectorXd ref = a_true * xi;
    worst = std::max(worst, (got - ref).norm() / ref.norm());
  }
  CHECK(worst < 1e-5);  // stencil-limited
}

TEST_CASE("dense and train learning produce the same operators") {
  std::mt19937 rng(17);
  const SnapshotSet s = smooth_snapshots({4, 4, 1, 1}, 20, 4, rng);
  for (double gamma : {0.0, 1e-6}) {
    const FullOperators ft = ft_learn(s, gamma, 4);
    const FullOperators tt = tt_learn(s, {1e-12}, gamma, 4);

    const Eigen::MatrixXd a_tt = full(tt.a_tt).unfold(4);
    CHECK(max_abs_diff(ft.a, a_tt) <= 1e-6 * ft.a.lpNorm<Eigen::Infinity>());

    const Eigen::MatrixXd f_ft = ft.f_dense();
    const Eigen::MatrixXd f_tt = full(tt.f_tt).unfold(4);
    CHECK((f_ft - f_tt).norm() <= 1e-6 * f_ft.norm());
  }
}

TEST_CASE("rhs assembly matches the flat operator blocks") {
  std::mt19937 rng(19);
  const SnapshotSet s = smooth_snapshots({2, 2, 1, 1}, 10, 2, rng);
  const FullOperators learned = ft_learn(s, 1e-8, 4);

  const Eigen::VectorXd probe = s.snapshot(3);
  Eigen::VectorXd xx(probe.size() * probe.size());
  for (Index p = 0; p < probe.size(); ++p) {
    for (Index q = 0; q < probe.size(); ++q) {
      xx(p * probe.size() + q) = probe(p) * probe(q);
    }
  }
  const Eigen::VectorXd direct = learned.a * probe + learned.f_dense() * xx;
  const Eigen::VectorXd via = full_rhs(learned, probe);
  CHECK((direct - via).norm() <= 1e-12 * direct.norm());
}

TEST_CASE("train rhs evaluation matches the dense path") {
  std::mt19937 rng(23);
  const SnapshotSet s = smooth_snapshots({3, 2, 1, 1}, 14, 3, rng);
  const FullOperators ops = tt_learn(s, {1e-12}, 1e-8, 4);
  const FullOperators ref = ft_learn(s, 1e-8, 4);

  const Eigen::VectorXd probe = s.snapshot(6);
  DenseTensor xt({3, 2, 1, 1});
  for (Index i = 0; i < probe.size(); ++i) xt.data()[i] = probe(i);
  const TtTensor x_tt = tt_svd(xt, {0.0});

  const DenseTensor y = full(full_rhs(ops, x_tt, {1e-12}));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), y.size());
  const Eigen::VectorXd y_ref = full_rhs(ref, probe);
  CHECK((yv - y_ref).norm() <= 1e-6 * y_ref.norm());
}

TEST_CASE("time slices of the compressed train match raw snapshots") {
  std::mt19937 rng(29);
  const SnapshotSet s = smooth_snapshots({3, 3, 1, 1}, 12, 3, rng);
  const TtTensor x_tt = tt_svd(s.tensor(), {0.0});
  for (Index k : {Index(0), Index(7), Index(11)}) {
    const TtTensor state = snapshot_state(x_tt, k);
    const DenseTensor d = full(state);
    const Eigen::Map<const Eigen::VectorXd> v(d.data(), d.size());
    CHECK((v - s.snapshot(k)).norm() <= 1e-12 * s.snapshot(k).norm());
  }
}

TEST_CASE("mode factorizations follow the layout") {
  std::mt19937 rng(31);
  const SnapshotSet heat = smooth_snapshots({20, 20, 1, 1}, 5, 2, rng);
  CHECK(qtt_modes(heat, FactorPolicy::ascending_primes) ==
        std::vector<Index>{2, 2, 2, 2, 5, 5});

  SnapshotSet flat(SnapshotSet::Layout::unstructured, {60}, 4, 0.0, 0.1);
  CHECK(qtt_modes(flat, FactorPolicy::ascending_primes) ==
        std::vector<Index>{2, 2, 3, 5});

  SnapshotSet channeled(SnapshotSet::Layout::unstructured, {60, 3}, 4, 0.0,
                        0.1);
  CHECK(qtt_modes(channeled, FactorPolicy::ascending_primes) ==
        std::vector<Index>{2, 2, 3, 5, 3});

  CHECK(qtt_modes(heat, FactorPolicy::merged).size() <
        qtt_modes(heat, FactorPolicy::ascending_primes).size());
}

TEST_CASE("quantized learning agrees with the flat fit") {
  std::mt19937 rng(37);
  const SnapshotSet s = smooth_snapshots({4, 3, 1, 1}, 16, 3, rng);
  const FullOperators q = qtt_learn(s, {1e-12}, 1e-8);
  const FullOperators ref = ft_learn(s, 1e-8, 4);

  const Eigen::VectorXd probe = s.snapshot(8);
  // quantized operators act on the quantized state
  const std::vector<Index> modes = qtt_modes(s, FactorPolicy::ascending_primes);
  DenseTensor xq(modes);
  for (Index i = 0; i < probe.size(); ++i) xq.data()[i] = probe(i);
  const TtTensor x_tt = tt_svd(xq, {0.0});
  const DenseTensor y = full(full_rhs(q, x_tt, {1e-12}));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), y.size());
  const Eigen::VectorXd y_ref = full_rhs(ref, probe);
  CHECK((yv - y_ref).norm() <= 1e-6 * y_ref.norm());
}

TEST_CASE("oversized dense assemblies are refused") {
  SnapshotSet s(SnapshotSet::Layout::structured, {80, 80, 1, 1}, 3, 0.0, 0.1);
  CHECK_THROWS_AS((void)assemble_data_tensor(s), CapacityError);
}

TEST_SUITE_END();
