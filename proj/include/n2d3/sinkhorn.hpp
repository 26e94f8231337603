#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace n2d3 {

// Entropic transport plan over anchor/negative index pairs. The diagonal
// (anchor paired with its own location) is structurally excluded: those
// entries are exactly zero, never merely small.
struct TransportPlan {
  int k = 0;
  std::vector<double> w;  // k*k row-major
  double residual = std::numeric_limits<double>::infinity();
  int sweeps = 0;
  bool converged = false;
  std::vector<double> residual_history;  // per sweep at the target epsilon

  double at(int i, int j) const {
    return w[static_cast<size_t>(i) * static_cast<size_t>(k) +
             static_cast<size_t>(j)];
  }
};

// Pairwise exponentiated similarities exp(<v_i, v-_j>/tau), row i = anchor,
// column j = negative. The diagonal entries are computed like any other but
// carry the "excluded" convention consumed by ot_reweight.
inline std::vector<double> similarity_block(const std::vector<double>& anchors,
                                            const std::vector<double>& negatives,
                                            int k, int dim, double tau) {
  if (k < 2) throw std::invalid_argument("similarity_block: k < 2");
  if (dim < 1) throw std::invalid_argument("similarity_block: dim < 1");
  if (!(tau > 0.0)) throw std::invalid_argument("similarity_block: tau <= 0");
  const size_t need = static_cast<size_t>(k) * static_cast<size_t>(dim);
  if (anchors.size() != need || negatives.size() != need)
    throw std::invalid_argument("similarity_block: size mismatch");
  std::vector<double> block(static_cast<size_t>(k) * static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double d = 0.0;
      for (int c = 0; c < dim; ++c)
        d += anchors[static_cast<size_t>(i) * static_cast<size_t>(dim) +
                     static_cast<size_t>(c)] *
             negatives[static_cast<size_t>(j) * static_cast<size_t>(dim) +
                       static_cast<size_t>(c)];
      block[static_cast<size_t>(i) * static_cast<size_t>(k) +
            static_cast<size_t>(j)] = std::exp(d / tau);
    }
  return block;
}

namespace detail {

// log-sum-exp over the off-diagonal entries of one row/column
inline double lse(const std::vector<double>& t) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : t) m = std::max(m, v);
  double s = 0.0;
  for (double v : t) s += std::exp(v - m);
  return m + std::log(s);
}

// In-place dense Cholesky solve of A x = b for a symmetric positive definite
// n x n system; A and b are scratch. Returns false if a pivot degenerates,
// which a Tikhonov-shifted caller never triggers in practice.
inline bool cholesky_solve(std::vector<double>& A, std::vector<double>& b,
                           std::vector<double>& x, int n) {
  auto a = [&](int r, int c2) -> double& {
    return A[static_cast<size_t>(r) * static_cast<size_t>(n) +
             static_cast<size_t>(c2)];
  };
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int t = 0; t < j; ++t) d -= a(j, t) * a(j, t);
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int t = 0; t < j; ++t) s -= a(i, t) * a(j, t);
      a(i, j) = s / l;
    }
  }
  x.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {  // forward: L y = b
    double s = b[static_cast<size_t>(i)];
    for (int t = 0; t < i; ++t) s -= a(i, t) * x[static_cast<size_t>(t)];
    x[static_cast<size_t>(i)] = s / a(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {  // backward: L^T x = y
    double s = x[static_cast<size_t>(i)];
    for (int t = i + 1; t < n; ++t) s -= a(t, i) * x[static_cast<size_t>(t)];
    x[static_cast<size_t>(i)] = s / a(i, i);
  }
  return true;
}

}  // namespace detail

// Doubly stochastic (unit marginals) entropic plan over a zero-diagonal
// kernel, solved by log-domain Sinkhorn. Small epsilons are reached through a
// divide-by-5 annealing schedule that warm-starts the potentials, so the
// near-LP regime converges in a handful of sweeps. `negate_cost` flips the
// objective direction (minimize vs maximize the weighted cost sum).
inline TransportPlan ot_reweight(const std::vector<double>& cost, int k,
                                 double epsilon, int max_sweeps = 1000,
                                 double tol = 1e-6, bool negate_cost = false) {
  if (k < 2) throw std::invalid_argument("ot_reweight: k < 2");
  if (cost.size() != static_cast<size_t>(k) * static_cast<size_t>(k))
    throw std::invalid_argument("ot_reweight: cost is not k*k");
  if (!(epsilon > 0.0)) throw std::invalid_argument("ot_reweight: epsilon <= 0");
  if (max_sweeps < 1) throw std::invalid_argument("ot_reweight: max_sweeps < 1");
  for (double c : cost)
    if (!std::isfinite(c))
      throw std::invalid_argument("ot_reweight: non-finite cost");

  TransportPlan plan;
  plan.k = k;
  plan.w.assign(static_cast<size_t>(k) * static_cast<size_t>(k), 0.0);

  if (k == 2) {
    // the unique feasible zero-diagonal doubly stochastic plan
    plan.w[1] = 1.0;
    plan.w[2] = 1.0;
    plan.residual = 0.0;
    plan.converged = true;
    return plan;
  }

  std::vector<double> c(cost);
  if (negate_cost)
    for (double& v : c) v = -v;

  auto C = [&](int i, int j) {
    return c[static_cast<size_t>(i) * static_cast<size_t>(k) +
             static_cast<size_t>(j)];
  };

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) {
        lo = std::min(lo, C(i, j));
        hi = std::max(hi, C(i, j));
      }
  const double spread = hi - lo;

  std::vector<double> stages;
  for (double e = spread; e > epsilon && spread > 0.0; e /= 5.0)
    stages.push_back(e);
  stages.push_back(epsilon);

  std::vector<double> f(static_cast<size_t>(k), 0.0),
      g(static_cast<size_t>(k), 0.0), terms;
  terms.reserve(static_cast<size_t>(k) - 1);

  auto sweep = [&](double e) {
    for (int i = 0; i < k; ++i) {
      terms.clear();
      for (int j = 0; j < k; ++j)
        if (j != i) terms.push_back((g[static_cast<size_t>(j)] - C(i, j)) / e);
      f[static_cast<size_t>(i)] = -e * detail::lse(terms);
    }
    for (int j = 0; j < k; ++j) {
      terms.clear();
      for (int i = 0; i < k; ++i)
        if (i != j) terms.push_back((f[static_cast<size_t>(i)] - C(i, j)) / e);
      g[static_cast<size_t>(j)] = -e * detail::lse(terms);
    }
  };
  auto fill_plan = [&](double e) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        plan.w[static_cast<size_t>(i) * static_cast<size_t>(k) +
               static_cast<size_t>(j)] =
            i == j ? 0.0
                   : std::exp((f[static_cast<size_t>(i)] +
                               g[static_cast<size_t>(j)] - C(i, j)) /
                              e);
  };
  auto measure = [&]() {
    double r = 0.0;
    for (int i = 0; i < k; ++i) {
      double rs = 0.0, cs = 0.0;
      for (int j = 0; j < k; ++j) {
        rs += plan.at(i, j);
        cs += plan.at(j, i);
      }
      r = std::max(r, std::max(std::abs(rs - 1.0), std::abs(cs - 1.0)));
    }
    return r;
  };

  // annealing gets a bounded slice of the budget; the target stage the rest
  const int anneal_cap = std::max(1, max_sweeps / 2);
  int used = 0;
  for (size_t st = 0; st + 1 < stages.size(); ++st) {
    const int per_stage = std::max(
        1, std::min(4, (anneal_cap - used) /
                           std::max(1, static_cast<int>(stages.size() - 1 - st))));
    if (used >= anneal_cap) break;
    for (int s = 0; s < per_stage && used < anneal_cap; ++s, ++used)
      sweep(stages[st]);
  }
  plan.sweeps = used;

  // Phase 1: alternating projections at the target epsilon. Fast when the
  // entropic optimum is dominated by a single derangement, but the linear
  // rate collapses when competing permutations tie within ~epsilon, so bail
  // to Newton once the residual decay flattens out.
  bool stalled = false;
  while (plan.sweeps < max_sweeps) {
    sweep(epsilon);
    ++plan.sweeps;
    fill_plan(epsilon);
    plan.residual = measure();
    plan.residual_history.push_back(plan.residual);
    if (plan.residual < tol) {
      plan.converged = true;
      break;
    }
    const size_t h = plan.residual_history.size();
    if (h >= 20 &&
        plan.residual_history[h - 11] < 1.5 * plan.residual_history[h - 1]) {
      stalled = true;
      break;
    }
  }

  // Phase 2: damped Newton on the entropic dual. The objective is smooth and
  // concave with Hessian -(1/e)[[diag(r),P],[P^T,diag(c)]]; that block matrix
  // is PSD (it contracts to sum P_ij (a_i + b_j)^2), so a Tikhonov-shifted
  // Cholesky solve always goes through. Quadratic convergence is immune to
  // the near-tie stall; steps are only accepted when the measured residual
  // strictly drops, which keeps the history monotone and `converged` honest.
  if (stalled && !plan.converged) {
    const int m = 2 * k;
    std::vector<double> P(static_cast<size_t>(k) * static_cast<size_t>(k));
    std::vector<double> A(static_cast<size_t>(m) * static_cast<size_t>(m));
    std::vector<double> rhs(static_cast<size_t>(m)), step(static_cast<size_t>(m));
    while (plan.sweeps < max_sweeps) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          P[static_cast<size_t>(i) * static_cast<size_t>(k) +
            static_cast<size_t>(j)] =
              i == j ? 0.0
                     : std::exp((f[static_cast<size_t>(i)] +
                                 g[static_cast<size_t>(j)] - C(i, j)) /
                                epsilon);
      std::fill(A.begin(), A.end(), 0.0);
      double trace = 0.0;
      for (int i = 0; i < k; ++i) {
        double rs = 0.0;
        for (int j = 0; j < k; ++j) {
          const double p = P[static_cast<size_t>(i) * static_cast<size_t>(k) +
                             static_cast<size_t>(j)];
          rs += p;
          A[static_cast<size_t>(i) * static_cast<size_t>(m) +
            static_cast<size_t>(k + j)] = p / epsilon;
          A[static_cast<size_t>(k + j) * static_cast<size_t>(m) +
            static_cast<size_t>(i)] = p / epsilon;
        }
        A[static_cast<size_t>(i) * static_cast<size_t>(m) +
          static_cast<size_t>(i)] = rs / epsilon;
        trace += rs / epsilon;
        rhs[static_cast<size_t>(i)] = 1.0 - rs;
      }
      for (int j = 0; j < k; ++j) {
        double cs = 0.0;
        for (int i = 0; i < k; ++i)
          cs += P[static_cast<size_t>(i) * static_cast<size_t>(k) +
                  static_cast<size_t>(j)];
        A[static_cast<size_t>(k + j) * static_cast<size_t>(m) +
          static_cast<size_t>(k + j)] = cs / epsilon;
        trace += cs / epsilon;
        rhs[static_cast<size_t>(k + j)] = 1.0 - cs;
      }
      const double mu = std::max(1e-300, 1e-12 * trace / m);
      for (int d = 0; d < m; ++d)
        A[static_cast<size_t>(d) * static_cast<size_t>(m) +
          static_cast<size_t>(d)] += mu;
      if (!detail::cholesky_solve(A, rhs, step, m)) break;

      // backtrack on the plan residual itself
      const std::vector<double> f0 = f, g0 = g;
      const double before = plan.residual;
      bool accepted = false;
      for (double t = 1.0; t >= 1.0 / 64.0; t *= 0.5) {
        for (int i = 0; i < k; ++i)
          f[static_cast<size_t>(i)] = f0[static_cast<size_t>(i)] +
                                      t * step[static_cast<size_t>(i)];
        for (int j = 0; j < k; ++j)
          g[static_cast<size_t>(j)] = g0[static_cast<size_t>(j)] +
                                      t * step[static_cast<size_t>(k + j)];
        fill_plan(epsilon);
        const double r = measure();
        if (r < before) {
          plan.residual = r;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // Newton direction exhausted; fall back to one projection sweep
        f = f0;
        g = g0;
        sweep(epsilon);
        fill_plan(epsilon);
        plan.residual = measure();
      }
      ++plan.sweeps;
      plan.residual_history.push_back(plan.residual);
      if (plan.residual < tol) {
        plan.converged = true;
        break;
      }
    }
  }

  if (!plan.converged) {
    fill_plan(epsilon);
    plan.residual = measure();
  }
  return plan;
}

// linear transport cost <w, C> of a plan against a cost block
inline double linear_cost(const TransportPlan& plan,
                          const std::vector<double>& cost) {
  double s = 0.0;
  for (size_t i = 0; i < plan.w.size(); ++i) s += plan.w[i] * cost[i];
  return s;
}

}  // namespace n2d3
