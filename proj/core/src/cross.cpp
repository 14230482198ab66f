// SPDX-License-Identifier: MIT

#include "ttoi/cross.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "tt_internal.hpp"

namespace ttoi {
namespace {

using MultiIndex = std::vector<Index>;

class CachedOracle {
 public:
  CachedOracle(const EntryFn& f, const std::vector<Index>& modes)
      : f_(f), strides_(modes.size(), 1) {
    cacheable_ = true;
    Index total = 1;
    for (std::size_t k = modes.size(); k-- > 0;) {
      strides_[k] = total;
      if (total > (Index{1} << 60) / modes[k]) {
        cacheable_ = false;
        break;
      }
      total *= modes[k];
    }
  }

  double operator()(const MultiIndex& idx) {
    if (!cacheable_) {
      ++calls_;
      return f_(idx);
    }
    Index flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) flat += idx[k] * strides_[k];
    auto it = cache_.find(flat);
    if (it != cache_.end()) return it->second;
    ++calls_;
    const double v = f_(idx);
    cache_.emplace(flat, v);
    return v;
  }

  [[nodiscard]] Index calls() const { return calls_; }

 private:
  const EntryFn& f_;
  std::vector<Index> strides_;
  bool cacheable_;
  Index calls_ = 0;
  std::unordered_map<Index, double> cache_;
};

// Dominant-row selection: returns r pivot rows of u ((m x r), m >= r) such
// that every entry of u * inv(u[piv]) is bounded by tol in magnitude.
std::vector<Index> maxvol(const Eigen::MatrixXd& u, double tol,
                          Index max_iters) {
  const Index m = u.rows();
  const Index r = u.cols();
  std::vector<Index> piv;
  piv.reserve(static_cast<std::size_t>(r));

  // greedy partial-pivot elimination for the starting set
  Eigen::MatrixXd w = u;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (Index c = 0; c < r; ++c) {
    Index best = -1;
    double best_abs = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double a = std::abs(w(i, c));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0 || best_abs < 1e-300) {
      throw DegeneratePivotError("maxvol: rank-deficient pivot column");
    }
    used[static_cast<std::size_t>(best)] = true;
    piv.push_back(best);
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      w.row(i) -= (w(i, c) / w(best, c)) * w.row(best);
    }
  }

  for (Index iter = 0; iter < max_iters; ++iter) {
    Eigen::MatrixXd upiv(r, r);
    for (Index j = 0; j < r; ++j) upiv.row(j) = u.row(piv[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(upiv.transpose());
    if (!lu.isInvertible()) {
      throw DegeneratePivotError("maxvol: singular pivot block");
    }
    Eigen::MatrixXd b = lu.solve(u.transpose()).transpose();  // m x r
    Index bi = 0, bj = 0;
    const double bmax = b.cwiseAbs().maxCoeff(&bi, &bj);
    if (bmax <= tol) break;
    piv[static_cast<std::size_t>(bj)] = bi;
  }
  return piv;
}

struct SweepState {
  std::vector<std::vector<MultiIndex>> left;   // left[k]: rows for core k
  std::vector<std::vector<MultiIndex>> right;  // right[k]: cols for core k-1
};

Eigen::MatrixXd sample_supercore(CachedOracle& oracle,
                                 const std::vector<Index>& modes, Index k,
                                 const std::vector<MultiIndex>& lset,
                                 const std::vector<MultiIndex>& rset) {
  const Index d = static_cast<Index>(modes.size());
  const Index nk = modes[static_cast<std::size_t>(k)];
  const Index nk1 = modes[static_cast<std::size_t>(k + 1)];
  const Index rows = static_cast<Index>(lset.size()) * nk;
  const Index cols = nk1 * static_cast<Index>(rset.size());
  Eigen::MatrixXd a(rows, cols);
  MultiIndex idx(static_cast<std::size_t>(d));
  for (std::size_t l = 0; l < lset.size(); ++l) {
    std::copy(lset[l].begin(), lset[l].end(), idx.begin());
    for (Index i = 0; i < nk; ++i) {
      idx[static_cast<std::size_t>(k)] = i;
      for (Index j = 0; j < nk1; ++j) {
        idx[static_cast<std::size_t>(k + 1)] = j;
        for (std::size_t rr = 0; rr < rset.size(); ++rr) {
          std::copy(rset[rr].begin(), rset[rr].end(),
                    idx.begin() + static_cast<std::ptrdiff_t>(k + 2));
          a(static_cast<Index>(l) * nk + i,
            j * static_cast<Index>(rset.size()) + static_cast<Index>(rr)) =
              oracle(idx);
        }
      }
    }
  }
  return a;
}

}  // namespace

CrossResult tt_cross(const std::vector<Index>& modes, const EntryFn& f,
                     const CrossOptions& opts) {
  const Index d = static_cast<Index>(modes.size());
  if (d == 0) throw InvalidInputError("tt_cross: no modes");
  for (Index n : modes) {
    if (n <= 0) throw InvalidInputError("tt_cross: nonpositive mode size");
  }
  if (opts.epsilon <= 0 || opts.initial_rank < 1 || opts.max_rank < 1) {
    throw InvalidInputError("tt_cross: bad options");
  }

  CachedOracle oracle(f, modes);
  CrossResult res;

  if (d == 1) {
    TtCore c(1, modes[0], 1);
    MultiIndex idx(1);
    for (Index i = 0; i < modes[0]; ++i) {
      idx[0] = i;
      c.a[static_cast<std::size_t>(i)] = oracle(idx);
    }
    res.tensor = TtTensor({std::move(c)});
    res.oracle_calls = oracle.calls();
    res.converged = true;
    return res;
  }

  std::mt19937_64 rng(opts.seed);
  auto random_multi = [&](Index from, Index to) {
    MultiIndex m(static_cast<std::size_t>(to - from));
    for (Index k = from; k < to; ++k) {
      std::uniform_int_distribution<Index> u(
          0, modes[static_cast<std::size_t>(k)] - 1);
      m[static_cast<std::size_t>(k - from)] = u(rng);
    }
    return m;
  };

  // validation set, fixed for the whole run
  const Index nval = std::max<Index>(opts.validation_samples, 1);
  std::vector<MultiIndex> vpts;
  std::vector<double> vvals;
  vpts.reserve(static_cast<std::size_t>(nval));
  for (Index s = 0; s < nval; ++s) {
    vpts.push_back(random_multi(0, d));
    vvals.push_back(oracle(vpts.back()));
  }
  double vref = 0.0;
  for (double v : vvals) vref += v * v;
  vref = std::sqrt(vref / static_cast<double>(nval));

  // random nested starting sets; right[k] pairs with bond k-1
  SweepState st;
  st.left.resize(static_cast<std::size_t>(d));
  st.right.resize(static_cast<std::size_t>(d + 1));
  st.left[0] = {MultiIndex{}};
  st.right[static_cast<std::size_t>(d)] = {MultiIndex{}};
  const auto saturated_space = [&](Index from, Index to) {
    Index space = 1;
    for (Index k = from; k < to; ++k) {
      space *= modes[static_cast<std::size_t>(k)];
      if (space > (Index{1} << 30)) return Index{1} << 30;
    }
    return space;
  };
  for (Index b = 1; b < d; ++b) {
    const Index nl = std::min(
        {opts.initial_rank, saturated_space(0, b), opts.max_rank});
    const Index nr = std::min(
        {opts.initial_rank, saturated_space(b, d), opts.max_rank});
    std::vector<MultiIndex> ls, rs;
    auto sample_into = [&](std::vector<MultiIndex>& dst, Index count,
                           Index from, Index to) {
      int tries = 0;
      while (static_cast<Index>(dst.size()) < count) {
        MultiIndex cand = random_multi(from, to);
        if (std::find(dst.begin(), dst.end(), cand) == dst.end() ||
            ++tries > 256) {
          dst.push_back(std::move(cand));
        }
      }
    };
    sample_into(ls, nl, 0, b);
    sample_into(rs, nr, b, d);
    st.left[static_cast<std::size_t>(b)] = std::move(ls);
    st.right[static_cast<std::size_t>(b)] = std::move(rs);
  }

  const double eps_local = opts.epsilon / std::sqrt(static_cast<double>(d - 1));
  Index forced_min = 1;
  double prev_err = std::numeric_limits<double>::infinity();
  std::vector<TtCore> chain(static_cast<std::size_t>(d));

  auto pick_rank = [&](const Eigen::VectorXd& s, Index rows,
                       Index cols) -> Index {
    const double delta = eps_local * s.norm();
    Index rank = detail::truncation_rank(s, delta, detail::kSigmaFloorRel);
    const Index cap = std::min({rows, cols, opts.max_rank});
    rank = std::min(rank, cap);
    rank = std::max(rank, std::min(forced_min, cap));
    return rank;
  };

  auto check_convergence = [&](const TtTensor& estimate) -> double {
    double se = 0.0;
    for (std::size_t s = 0; s < vpts.size(); ++s) {
      const double e = estimate.entry(vpts[s]) - vvals[s];
      se += e * e;
    }
    const double rms = std::sqrt(se / static_cast<double>(vpts.size()));
    return rms / std::max(vref, 1e-300);
  };

  for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    // forward half-sweep: refresh left sets, build interpolation cores
    for (Index k = 0; k + 1 < d; ++k) {
      const auto& lset = st.left[static_cast<std::size_t>(k)];
      const auto& rset = st.right[static_cast<std::size_t>(k + 2)];
      Eigen::MatrixXd a = sample_supercore(oracle, modes, k, lset, rset);
      const Index nk = modes[static_cast<std::size_t>(k)];
      detail::SvdEcon svd = detail::svd_econ(a);
      TtCore qcore(static_cast<Index>(lset.size()), nk, 1);
      std::vector<MultiIndex> newl;
      if (svd.s(0) == 0.0) {
        // zero block: keep a trivial pivot, emit a zero core
        qcore = TtCore(static_cast<Index>(lset.size()), nk, 1);
        newl.push_back(lset[0]);
        newl.back().push_back(0);
        if (k == d - 2) {
          chain[static_cast<std::size_t>(d - 1)] =
              TtCore(1, modes[static_cast<std::size_t>(d - 1)], 1);
        }
      } else {
        const Index rank = pick_rank(svd.s, a.rows(), a.cols());
        Eigen::MatrixXd u = svd.u.leftCols(rank);
        std::vector<Index> piv = maxvol(u, opts.maxvol_tol, 100);
        Eigen::MatrixXd upiv(rank, rank);
        for (Index j = 0; j < rank; ++j) upiv.row(j) = u.row(piv[j]);
        Eigen::MatrixXd q =
            upiv.transpose().fullPivLu().solve(u.transpose()).transpose();
        qcore = TtCore(static_cast<Index>(lset.size()), nk, rank);
        qcore.left() = q;
        for (Index j = 0; j < rank; ++j) {
          const Index l = piv[j] / nk;
          const Index i = piv[j] % nk;
          newl.push_back(lset[static_cast<std::size_t>(l)]);
          newl.back().push_back(i);
        }
        if (k == d - 2) {
          // the sampled block restricted to pivot rows is the closing core
          TtCore last(rank, modes[static_cast<std::size_t>(d - 1)], 1);
          for (Index j = 0; j < rank; ++j) {
            for (Index i2 = 0; i2 < last.n; ++i2) {
              last.at(j, i2, 0) = a(piv[j], i2);
            }
          }
          chain[static_cast<std::size_t>(d - 1)] = std::move(last);
        }
      }
      chain[static_cast<std::size_t>(k)] = std::move(qcore);
      st.left[static_cast<std::size_t>(k + 1)] = std::move(newl);
    }
    ++res.sweeps;
    res.tensor = TtTensor(chain);
    res.validation_error = check_convergence(res.tensor);
    if (res.validation_error <= opts.epsilon) {
      res.converged = true;
      break;
    }
    if (std::abs(prev_err - res.validation_error) <= 0.1 * opts.epsilon) {
      forced_min = std::min(forced_min + opts.rank_increment, opts.max_rank);
    }
    prev_err = res.validation_error;

    // backward half-sweep: refresh right sets
    for (Index k = d - 2; k >= 0; --k) {
      const auto& lset = st.left[static_cast<std::size_t>(k)];
      const auto& rset = st.right[static_cast<std::size_t>(k + 2)];
      Eigen::MatrixXd a = sample_supercore(oracle, modes, k, lset, rset);
      const Index nk1 = modes[static_cast<std::size_t>(k + 1)];
      detail::SvdEcon svd = detail::svd_econ(a);
      std::vector<MultiIndex> newr;
      TtCore pcore(1, nk1, static_cast<Index>(rset.size()));
      if (svd.s(0) == 0.0) {
        pcore = TtCore(1, nk1, static_cast<Index>(rset.size()));
        MultiIndex m{0};
        m.insert(m.end(), rset[0].begin(), rset[0].end());
        newr.push_back(std::move(m));
        if (k == 0) chain[0] = TtCore(1, modes[0], 1);
      } else {
        const Index rank = pick_rank(svd.s, a.rows(), a.cols());
        Eigen::MatrixXd v = svd.v.leftCols(rank);
        std::vector<Index> piv = maxvol(v, opts.maxvol_tol, 100);
        Eigen::MatrixXd vpiv(rank, rank);
        for (Index j = 0; j < rank; ++j) vpiv.row(j) = v.row(piv[j]);
        // core = (v * inv(v[piv]))^T, exact identity at pivot columns
        Eigen::MatrixXd p =
            vpiv.transpose().fullPivLu().solve(v.transpose());  // rank x cols
        pcore = TtCore(rank, nk1, static_cast<Index>(rset.size()));
        for (Index j = 0; j < rank; ++j) {
          for (Index i2 = 0; i2 < nk1; ++i2) {
            for (std::size_t rr = 0; rr < rset.size(); ++rr) {
              pcore.at(j, i2, static_cast<Index>(rr)) =
                  p(j, i2 * static_cast<Index>(rset.size()) +
                           static_cast<Index>(rr));
            }
          }
        }
        for (Index j = 0; j < rank; ++j) {
          const Index i2 = piv[j] / static_cast<Index>(rset.size());
          const Index rr = piv[j] % static_cast<Index>(rset.size());
          MultiIndex m{i2};
          m.insert(m.end(), rset[static_cast<std::size_t>(rr)].begin(),
                   rset[static_cast<std::size_t>(rr)].end());
          newr.push_back(std::move(m));
        }
        if (k == 0) {
          TtCore first(1, modes[0], rank);
          for (Index i2 = 0; i2 < modes[0]; ++i2) {
            for (Index j = 0; j < rank; ++j) {
              first.at(0, i2, j) = a(i2, piv[j]);
            }
          }
          chain[0] = std::move(first);
        }
      }
      chain[static_cast<std::size_t>(k + 1)] = std::move(pcore);
      st.right[static_cast<std::size_t>(k + 1)] = std::move(newr);
    }
    ++res.sweeps;
    res.tensor = TtTensor(chain);
    res.validation_error = check_convergence(res.tensor);
    if (res.validation_error <= opts.epsilon) {
      res.converged = true;
      break;
    }
    if (std::abs(prev_err - res.validation_error) <= 0.1 * opts.epsilon) {
      forced_min = std::min(forced_min + opts.rank_increment, opts.max_rank);
    }
    prev_err = res.validation_error;
  }

  res.oracle_calls = oracle.calls();
  return res;
}

}  // namespace ttoi
