// SPDX-License-Identifier: MIT

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ttoi/lstsq.hpp"

using namespace ttoi;
using testing::random_tt;

namespace {

/// Rows-first matricization of a TT at the given split.
Eigen::MatrixXd unfold_dense(const TtTensor& t, Index split) {
  const DenseTensor d = full(t);
  return d.unfold(split);
}

Eigen::MatrixXd dense_filtered_pinv(const Eigen::MatrixXd& m, double gamma) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) <= 1e-14 * s(0)) continue;
    w(i) = gamma > 0.0 ? s(i) / (s(i) * s(i) + gamma) : 1.0 / s(i);
  }
  return svd.matrixV() * w.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

TEST_SUITE_BEGIN("lstsq");

TEST_CASE("pseudoinverse satisfies the defining identities") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const TtTensor t = random_tt({3, 4, 2, 3}, {2, 3, 2}, rng);
    const Index split = 2;
    const Eigen::MatrixXd a = unfold_dense(t, split);

    const TtTensor p_tt = tt_pinv(t, split, 0.0);
    // result modes are [cols..., rows...], so its unfolding at the column
    // count transposes back onto a's pseudoinverse
    const Eigen::MatrixXd p =
        unfold_dense(p_tt, t.ndims() - split);

    CHECK((a * p * a - a).norm() <= 1e-10 * a.norm());
    CHECK((p * a * p - p).norm() <= 1e-10 * p.norm());
    CHECK((a * p - (a * p).transpose()).norm() <= 1e-10 * (a * p).norm());
    CHECK((p * a - (p * a).transpose()).norm() <= 1e-10 * (p * a).norm());
  }
}

TEST_CASE("ridge filtering matches the dense formula") {
  std::mt19937 rng(5);
  const TtTensor t = random_tt({4, 3, 3, 2}, {3, 2, 2}, rng);
  const Index split = 2;
  const Eigen::MatrixXd a = unfold_dense(t, split);
  const double gamma = 1e-2;
  const Eigen::MatrixXd p =
      unfold_dense(tt_pinv(t, split, gamma), t.ndims() - split);
  const Eigen::MatrixXd oracle = dense_filtered_pinv(a, gamma);
  CHECK((p - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("operator fit matches the dense least-squares solution") {
  std::mt19937 rng(9);
  // design over (in modes..., K), targets over (out modes..., K)
  const TtTensor design = random_tt({3, 4, 20}, {3, 4}, rng);
  const TtTensor targets = random_tt({2, 3, 20}, {2, 4}, rng);

  const TtTensor o = tt_ls_solve(design, targets, 0.0);
  REQUIRE(o.mode_sizes() == std::vector<Index>{2, 3, 3, 4});

  // dense oracle: O = T * pinv(D) over the K-columns matricization
  const Eigen::MatrixXd d = unfold_dense(design, 2);   // (3*4) x 20
  const Eigen::MatrixXd t = unfold_dense(targets, 2);  // (2*3) x 20
  const Eigen::MatrixXd oracle = t * dense_filtered_pinv(d, 0.0);
  const Eigen::MatrixXd got = unfold_dense(o, 2);
  CHECK((got - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("dense operator solver recovers an exact generator") {
  std::mt19937 rng(13);
  std::normal_distribution<double> normal;
  const Index n = 4;
  const Index k = 30;
  Eigen::MatrixXd o_true(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) o_true(i, j) = normal(rng);
  }
  Eigen::MatrixXd design(n, k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) design(i, j) = normal(rng);
  }
  const Eigen::MatrixXd targets = o_true * design;
  const Eigen::MatrixXd o = solve_operator(design, targets, 0.0);
  CHECK((o - o_true).norm() <= 1e-10 * o_true.norm());
}

TEST_SUITE_END();
