#include "reserves/simplex_lsq.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "reserves/errors.hpp"

namespace reserves {

namespace {

constexpr double kShareTol = 1e-12;

// Equality-constrained least squares on the free coordinates: minimize
// ||G_F b - y||^2 subject to sum(b) = 1, via the KKT system. A rank-deficient
// system gets a small ridge, whose limit is the minimum-norm minimizer.
struct EqSolve {
  Eigen::VectorXd beta;
  bool deficient = false;
};

EqSolve solve_equality(const Eigen::MatrixXd& h, const Eigen::VectorXd& c) {
  const Eigen::Index m = h.rows();
  Eigen::MatrixXd kkt(m + 1, m + 1);
  kkt.setZero();
  kkt.topLeftCorner(m, m) = 2.0 * h;
  kkt.topRightCorner(m, 1).setOnes();
  kkt.bottomLeftCorner(1, m).setOnes();
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = 2.0 * c;
  rhs(m) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-10);
  EqSolve out;
  if (lu.rank() == m + 1) {
    Eigen::VectorXd sol = lu.solve(rhs);
    out.beta = sol.head(m);
    return out;
  }
  out.deficient = true;
  double scale = std::max(1.0, h.trace() / double(m));
  Eigen::MatrixXd ridge = kkt;
  ridge.topLeftCorner(m, m) += 1e-10 * scale * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(ridge).solve(rhs);
  out.beta = sol.head(m);
  return out;
}

double objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& beta) {
  return (g * beta - y).squaredNorm();
}

// Force the result onto the simplex exactly: clip, renormalize, and absorb
// the remaining rounding into the largest component until the left-to-right
// sum is bit-exactly one.
void snap_to_simplex(std::vector<double>& beta) {
  double total = 0.0;
  for (double& b : beta) {
    if (b < 0.0) b = 0.0;
    total += b;
  }
  if (!(total > 0.0))
    std::fill(beta.begin(), beta.end(), 1.0 / double(beta.size()));
  else
    for (double& b : beta) b /= total;
  auto biggest = std::max_element(beta.begin(), beta.end());
  for (int pass = 0; pass < 8; ++pass) {
    double sum = std::accumulate(beta.begin(), beta.end(), 0.0);
    if (sum == 1.0) break;
    *biggest += 1.0 - sum;
  }
}

}  // namespace

WindowSolution solve_window(const WindowProblem& problem, double tol) {
  const std::size_t n = problem.n_ccy;
  const std::size_t rows = problem.rows;
  if (n == 0 || rows == 0) throw DataError("solve_window: empty problem");
  if (problem.g.size() != rows * n || problem.y.size() != rows)
    throw DataError("solve_window: shape mismatch");

  Eigen::MatrixXd g(rows, n);
  Eigen::VectorXd y(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    y(Eigen::Index(t)) = problem.y[t];
    for (std::size_t i = 0; i < n; ++i)
      g(Eigen::Index(t), Eigen::Index(i)) = problem.g[t * n + i];
  }
  Eigen::MatrixXd h = g.transpose() * g;
  Eigen::VectorXd c = g.transpose() * y;
  double grad_scale = std::max(1.0, 2.0 * (h.lpNorm<Eigen::Infinity>() +
                                           c.lpNorm<Eigen::Infinity>()));

  WindowSolution out;
  std::vector<bool> active(n, false);  // pinned at zero
  Eigen::VectorXd beta = Eigen::VectorXd::Constant(Eigen::Index(n), 1.0 / double(n));
  bool deficient = false;

  const int max_iter = 64 * int(n) + 64;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<Eigen::Index> free;
    for (std::size_t i = 0; i < n; ++i)
      if (!active[i]) free.push_back(Eigen::Index(i));
    if (free.empty()) throw NumericError("solve_window: all coordinates pinned");

    Eigen::MatrixXd hf(free.size(), free.size());
    Eigen::VectorXd cf(free.size());
    for (std::size_t a = 0; a < free.size(); ++a) {
      cf(Eigen::Index(a)) = c(free[a]);
      for (std::size_t b = 0; b < free.size(); ++b)
        hf(Eigen::Index(a), Eigen::Index(b)) = h(free[a], free[b]);
    }
    EqSolve eq = solve_equality(hf, cf);
    deficient = deficient || eq.deficient;

    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(Eigen::Index(n));
    for (std::size_t a = 0; a < free.size(); ++a)
      candidate(free[a]) = eq.beta(Eigen::Index(a));

    double feas_tol = 1e-12;
    double min_free = 0.0;
    for (Eigen::Index i : free) min_free = std::min(min_free, candidate(i));
    if (min_free >= -feas_tol) {
      beta = candidate;
      // Dual feasibility of the pinned coordinates.
      Eigen::VectorXd grad = 2.0 * (h * beta - c);
      double lambda = 0.0;
      for (Eigen::Index i : free) lambda += grad(i);
      lambda /= double(free.size());
      Eigen::Index worst = -1;
      double worst_val = -tol * grad_scale;
      for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        double mult = grad(Eigen::Index(i)) - lambda;
        if (mult < worst_val) {
          worst_val = mult;
          worst = Eigen::Index(i);
        }
      }
      if (worst < 0) break;
      active[std::size_t(worst)] = false;
      continue;
    }

    // Partial step toward the candidate; pin the blocking coordinate.
    double step = 1.0;
    Eigen::Index blocker = -1;
    for (Eigen::Index i : free) {
      if (candidate(i) < -feas_tol && beta(i) > candidate(i)) {
        double s = beta(i) / (beta(i) - candidate(i));
        if (s < step) {
          step = s;
          blocker = i;
        }
      }
    }
    if (blocker < 0) throw NumericError("solve_window: no blocking coordinate");
    beta += step * (candidate - beta);
    beta(blocker) = 0.0;
    active[std::size_t(blocker)] = true;
  }
  if (iter == max_iter)
    throw NumericError("solve_window: active-set iteration limit");

  out.beta.assign(beta.data(), beta.data() + n);
  snap_to_simplex(out.beta);
  for (std::size_t i = 0; i < n; ++i) beta(Eigen::Index(i)) = out.beta[i];
  out.sse = objective(g, y, beta);
  out.nonunique = deficient;

  // KKT residual at the returned point.
  Eigen::VectorXd grad = 2.0 * (h * beta - c);
  double lambda = 0.0;
  int n_free = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (out.beta[i] > kShareTol) {
      lambda += grad(Eigen::Index(i));
      ++n_free;
    }
  lambda /= std::max(1, n_free);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = grad(Eigen::Index(i)) - lambda;
    if (out.beta[i] > kShareTol)
      res = std::max(res, std::abs(m) / grad_scale);
    else
      res = std::max(res, std::max(0.0, -m) / grad_scale);
  }
  out.kkt_residual = res;
  return out;
}

BaselineSeries rolling_optimize(const ObservationSeries& obs,
                                const ReturnPanel& returns,
                                std::span<const double> equity_share,
                                int window_len) {
  const std::size_t T = obs.size();
  const std::size_t n = returns.n_ccy;
  if (window_len < 1) throw ConfigError("baseline window must be >= 1");
  if (returns.size() != T || returns.start != obs.start)
    throw DataError("rolling_optimize: returns misaligned with observations");
  if (equity_share.size() != T)
    throw DataError("rolling_optimize: equity share series misaligned");
  if (std::size_t(window_len) > T)
    throw DataError("rolling_optimize: window longer than the series");

  // Blended per-currency regressors: (1 + r_i) de_i + r_i with the equity
  // and bond legs mixed by the quarter's equity share.
  std::vector<double> g(T * n);
  for (std::size_t t = 0; t < T; ++t) {
    double x = equity_share[t];
    auto re = returns.eq_row(t);
    auto rb = returns.bond_row(t);
    auto de = returns.fx_row(t);
    for (std::size_t i = 0; i < n; ++i) {
      double r = x * re[i] + (1.0 - x) * rb[i];
      g[t * n + i] = (1.0 + r) * de[i] + r;
    }
  }

  const std::size_t L = std::size_t(window_len);
  BaselineSeries out;
  out.start = obs.quarter(L - 1);
  out.n_ccy = n;
  const std::size_t windows = T - L + 1;
  out.shares.resize(windows * n);
  out.nonunique.resize(windows);
  out.sse.resize(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    WindowProblem problem;
    problem.rows = L;
    problem.n_ccy = n;
    problem.g.assign(g.begin() + w * n, g.begin() + (w + L) * n);
    problem.y.assign(obs.y.begin() + w, obs.y.begin() + w + L);
    WindowSolution sol = solve_window(problem);
    std::copy(sol.beta.begin(), sol.beta.end(), out.shares.begin() + w * n);
    out.nonunique[w] = sol.nonunique ? 1 : 0;
    out.sse[w] = sol.sse;
  }
  return out;
}

}  // namespace reserves
