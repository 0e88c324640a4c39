#include "influence/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace influence {

CascadeProblem::CascadeProblem(const BipartiteGraph& g, int k, double uniform_p)
    : graph_(&g), k_(k), uniform_(true), p_(uniform_p) {
  if (!(uniform_p > 0.0 && uniform_p < 1.0))
    throw std::invalid_argument("arc probability must lie strictly in (0,1)");
  build(std::vector<double>(static_cast<std::size_t>(g.num_arcs()), uniform_p));
}

CascadeProblem::CascadeProblem(const BipartiteGraph& g, int k,
                               std::vector<double> arc_p)
    : graph_(&g), k_(k), uniform_(false) {
  if (static_cast<std::int64_t>(arc_p.size()) != g.num_arcs())
    throw std::invalid_argument("per-arc probability vector length != num arcs");
  for (double p : arc_p)
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("arc probability must lie strictly in (0,1)");
  build(std::move(arc_p));
}

double CascadeProblem::uniform_p() const {
  if (!uniform_)
    throw std::logic_error("per-arc problem has no uniform probability");
  return p_;
}

void CascadeProblem::build(std::vector<double> arc_p_sender_major) {
  const BipartiteGraph& g = *graph_;
  if (k_ < 1 || k_ > g.num_senders())
    throw std::invalid_argument("k must lie in [1, num_senders]");
  q_sm_.resize(arc_p_sender_major.size());
  for (std::size_t a = 0; a < arc_p_sender_major.size(); ++a)
    q_sm_[a] = 1.0 - arc_p_sender_major[a];

  // Re-bucket into receiver-major order; sender-major iteration emits each
  // receiver's senders in ascending order, matching senders_of().
  std::vector<int> next(g.num_receivers(), 0);
  for (int j = 0; j < g.num_receivers(); ++j)
    next[j] = (j == 0) ? 0 : next[j - 1] + g.indegree(j - 1);
  log_q_rm_.assign(arc_p_sender_major.size(), 0.0);
  std::size_t a = 0;
  for (int i = 0; i < g.num_senders(); ++i)
    for (int j : g.receivers_of(i)) log_q_rm_[next[j]++] = std::log(q_sm_[a++]);
}

namespace {

// Per-receiver exponent S_j = sum over arcs (i,j) of x_i log(1-p_ij).
// Products are evaluated as exp(S_j); (1-p) in (0,1) keeps S_j <= 0.
void receiver_exponents(const CascadeProblem& prob, std::span<const double> x,
                        std::vector<double>& s) {
  const BipartiteGraph& g = prob.graph();
  if (static_cast<int>(x.size()) != g.num_senders())
    throw DimensionError("selection length != num_senders");
  s.assign(g.num_receivers(), 0.0);
  const auto logq = prob.log_q_receiver_major();
  std::size_t a = 0;
  for (int j = 0; j < g.num_receivers(); ++j) {
    double acc = 0.0;
    for (int i : g.senders_of(j)) acc += x[i] * logq[a++];
    s[j] = acc;
  }
}

}  // namespace

double objective(const CascadeProblem& prob, std::span<const double> x) {
  std::vector<double> s;
  receiver_exponents(prob, x, s);
  double g = 0.0;
  for (double v : s) g += std::exp(v);
  return g;
}

std::vector<double> gradient(const CascadeProblem& prob, std::span<const double> x) {
  const BipartiteGraph& g = prob.graph();
  std::vector<double> s;
  receiver_exponents(prob, x, s);
  std::vector<double> grad(g.num_senders(), 0.0);
  const auto logq = prob.log_q_receiver_major();
  std::size_t a = 0;
  for (int j = 0; j < g.num_receivers(); ++j) {
    const double pj = std::exp(s[j]);
    for (int i : g.senders_of(j)) grad[i] += logq[a++] * pj;
  }
  return grad;
}

double expected_spread(const CascadeProblem& prob, std::span<const double> x) {
  std::vector<double> s;
  receiver_exponents(prob, x, s);
  double spread = 0.0;
  for (double v : s) spread -= std::expm1(v);  // 1 - exp(v)
  return spread;
}

std::vector<double> project_capped_simplex(std::span<const double> y, int k) {
  const int m = static_cast<int>(y.size());
  if (k > m || k < 0) throw std::invalid_argument("projection requires 0 <= k <= len(y)");
  std::vector<double> x(m);
  if (k == m) {
    std::fill(x.begin(), x.end(), 1.0);
    return x;
  }
  const auto mass = [&](double tau) {
    double acc = 0.0;
    for (double v : y) acc += std::clamp(v - tau, 0.0, 1.0);
    return acc;
  };
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  double lo = *mn - 1.0, hi = *mx;  // mass(lo) = m >= k, mass(hi) = 0 <= k
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in double
    if (mass(mid) >= k)
      lo = mid;
    else
      hi = mid;
  }
  double tau = 0.5 * (lo + hi);

  // Polish: resolve tau exactly for the clamp pattern found by bisection.
  int ones = 0, interior = 0;
  double interior_sum = 0.0;
  for (double v : y) {
    const double d = v - tau;
    if (d >= 1.0)
      ++ones;
    else if (d > 0.0) {
      ++interior;
      interior_sum += v;
    }
  }
  if (interior > 0) {
    const double tau_exact = (interior_sum + ones - k) / interior;
    if (std::abs(mass(tau_exact) - k) <= std::abs(mass(tau) - k)) tau = tau_exact;
  }
  for (int i = 0; i < m; ++i) x[i] = std::clamp(y[i] - tau, 0.0, 1.0);
  return x;
}

namespace {

// Newton step on the free coordinates with the budget row pinned. Used when
// the Armijo search stalls at floating-point precision, which happens at
// interior optima: the achievable decrease falls below the rounding of g
// while the projected-gradient residual is still around sqrt(eps). The
// polish lands on the stationary point directly.
bool newton_polish(const CascadeProblem& prob, std::vector<double>& x,
                   double& fx, std::vector<double>& grad, double resid) {
  constexpr int kMaxFree = 64;
  const BipartiteGraph& g = prob.graph();
  const int m = g.num_senders();
  std::vector<int> free_idx;
  for (int i = 0; i < m; ++i)
    if (x[i] > 1e-10 && x[i] < 1.0 - 1e-10) free_idx.push_back(i);
  const int f = static_cast<int>(free_idx.size());
  if (f < 2 || f > kMaxFree) return false;

  std::vector<int> local(m, -1);
  for (int c = 0; c < f; ++c) local[free_idx[c]] = c;

  // Hessian block: H_ab = sum over shared receivers of lnq_a lnq_b P_j.
  std::vector<double> s(g.num_receivers(), 0.0);
  const auto logq = prob.log_q_receiver_major();
  {
    std::size_t a = 0;
    for (int j = 0; j < g.num_receivers(); ++j) {
      double acc = 0.0;
      for (int i : g.senders_of(j)) acc += x[i] * logq[a++];
      s[j] = acc;
    }
  }
  const int dim = f + 1;  // trailing budget-row multiplier
  std::vector<double> kkt(static_cast<std::size_t>(dim) * dim, 0.0);
  {
    std::size_t a = 0;
    std::vector<int> touched;
    std::vector<double> coef(f, 0.0);
    for (int j = 0; j < g.num_receivers(); ++j) {
      const double pj = std::exp(s[j]);
      touched.clear();
      for (int i : g.senders_of(j)) {
        const double lq = logq[a++];
        if (local[i] >= 0) {
          coef[local[i]] = lq;
          touched.push_back(local[i]);
        }
      }
      for (int a1 : touched)
        for (int a2 : touched)
          kkt[static_cast<std::size_t>(a1) * dim + a2] += coef[a1] * coef[a2] * pj;
      for (int a1 : touched) coef[a1] = 0.0;
    }
  }
  std::vector<double> rhs(dim, 0.0);
  for (int c = 0; c < f; ++c) {
    kkt[static_cast<std::size_t>(c) * dim + f] = 1.0;
    kkt[static_cast<std::size_t>(f) * dim + c] = 1.0;
    rhs[c] = -grad[free_idx[c]];
  }

  // dense Gaussian elimination with partial pivoting
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(kkt[static_cast<std::size_t>(r) * dim + col]) >
          std::abs(kkt[static_cast<std::size_t>(piv) * dim + col]))
        piv = r;
    if (std::abs(kkt[static_cast<std::size_t>(piv) * dim + col]) < 1e-14)
      return false;
    if (piv != col) {
      for (int c = 0; c < dim; ++c)
        std::swap(kkt[static_cast<std::size_t>(piv) * dim + c],
                  kkt[static_cast<std::size_t>(col) * dim + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (int r = col + 1; r < dim; ++r) {
      const double fmul = kkt[static_cast<std::size_t>(r) * dim + col] /
                          kkt[static_cast<std::size_t>(col) * dim + col];
      if (fmul == 0.0) continue;
      for (int c = col; c < dim; ++c)
        kkt[static_cast<std::size_t>(r) * dim + c] -=
            fmul * kkt[static_cast<std::size_t>(col) * dim + c];
      rhs[r] -= fmul * rhs[col];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < dim; ++c)
      acc -= kkt[static_cast<std::size_t>(r) * dim + c] * rhs[c];
    rhs[r] = acc / kkt[static_cast<std::size_t>(r) * dim + r];
  }

  const auto resid_at = [&](const std::vector<double>& v) {
    const auto gr = gradient(prob, v);
    std::vector<double> step(m);
    for (int i = 0; i < m; ++i) step[i] = v[i] - gr[i];
    const auto target = project_capped_simplex(step, prob.k());
    double r = 0.0;
    for (int i = 0; i < m; ++i) r = std::max(r, std::abs(v[i] - target[i]));
    return r;
  };

  for (double gamma = 1.0; gamma >= 1.0 / 16; gamma *= 0.5) {
    std::vector<double> cand = x;
    for (int c = 0; c < f; ++c) cand[free_idx[c]] += gamma * rhs[c];
    cand = project_capped_simplex(cand, prob.k());
    const double cand_obj = objective(prob, cand);
    if (cand_obj > fx + 1e-12 * std::max(1.0, std::abs(fx))) continue;
    if (resid_at(cand) < 0.5 * resid) {
      x = std::move(cand);
      fx = cand_obj;
      grad = gradient(prob, x);
      return true;
    }
  }
  return false;
}

}  // namespace

CascadeSolution solve_cascade(const CascadeProblem& prob,
                              const CascadeConfig& config) {
  const int m = prob.graph().num_senders();
  CascadeSolution sol;
  sol.x.assign(m, static_cast<double>(prob.k()) / m);
  sol.objective = objective(prob, sol.x);
  sol.gradient = gradient(prob, sol.x);

  for (sol.iterations = 0; sol.iterations < config.max_iterations;
       ++sol.iterations) {
    std::vector<double> step(m);
    for (int i = 0; i < m; ++i) step[i] = sol.x[i] - sol.gradient[i];
    const auto target = project_capped_simplex(step, prob.k());
    double resid = 0.0;
    for (int i = 0; i < m; ++i)
      resid = std::max(resid, std::abs(sol.x[i] - target[i]));
    sol.stationarity = resid;
    if (resid <= config.tol) {
      sol.converged = true;
      break;
    }

    // Armijo backtracking along the projection arc.
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
      std::vector<double> trial(m);
      for (int i = 0; i < m; ++i) trial[i] = sol.x[i] - alpha * sol.gradient[i];
      auto cand = project_capped_simplex(trial, prob.k());
      double linear = 0.0;
      for (int i = 0; i < m; ++i)
        linear += sol.gradient[i] * (cand[i] - sol.x[i]);
      if (linear >= 0.0) continue;  // halving until descent direction appears
      const double cand_obj = objective(prob, cand);
      if (cand_obj <= sol.objective + 1e-4 * linear) {
        sol.x = std::move(cand);
        sol.objective = cand_obj;
        sol.gradient = gradient(prob, sol.x);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // line search exhausted at floating-point precision
      if (!newton_polish(prob, sol.x, sol.objective, sol.gradient, resid)) break;
    }
  }
  return sol;
}

std::vector<double> round_threshold(std::span<const double> x, double xi_round,
                                    int k) {
  if (!(xi_round >= 0.0 && xi_round < 1.0 / (2.0 * k + 1.0)))
    throw std::invalid_argument("xi_round must lie in [0, 1/(2k+1))");
  const double threshold = 0.5 - xi_round / 2.0;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= threshold) out[i] = 1.0;
  return out;
}

std::vector<double> round_topk(std::span<const double> x, int k) {
  const int m = static_cast<int>(x.size());
  if (k < 0 || k > m) throw std::invalid_argument("k out of range for top-k rounding");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x[a] != x[b]) return x[a] > x[b];
    return a < b;
  });
  if (k > 0 && k < m && x[order[k - 1]] == x[order[k]])
    throw AmbiguousRoundingError(x[order[k - 1]]);
  std::vector<double> out(m, 0.0);
  for (int r = 0; r < k; ++r) out[order[r]] = 1.0;
  return out;
}

CascadeKktReport kkt_check_cascade(const CascadeProblem& prob,
                                   std::span<const double> x, double tol) {
  const int m = static_cast<int>(x.size());
  const auto grad = gradient(prob, x);
  constexpr double kActive = 1e-9;

  // Stationarity grad g + lambda e - u + v = 0 with u, v >= 0 holds by
  // construction once u = max(0, grad + lambda), v = max(0, -grad - lambda);
  // the violation lives in the complementarity products. lambda is the
  // midpoint of the tightest interval [max_{x_i<1}(-grad_i), min_{x_i>0}(-grad_i)].
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    if (x[i] < 1.0 - kActive) lo = std::max(lo, -grad[i]);
    if (x[i] > kActive) hi = std::min(hi, -grad[i]);
  }
  CascadeKktReport rep;
  if (std::isinf(lo))
    rep.lambda = hi;
  else if (std::isinf(hi))
    rep.lambda = lo;
  else
    rep.lambda = 0.5 * (lo + hi);

  double viol = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = std::max(0.0, grad[i] + rep.lambda);
    const double v = std::max(0.0, -grad[i] - rep.lambda);
    viol = std::max({viol, u * std::max(0.0, x[i]), v * std::max(0.0, 1.0 - x[i])});
  }
  rep.max_violation = viol;

  double sum = 0.0, box = 0.0;
  for (int i = 0; i < m; ++i) {
    sum += x[i];
    box = std::max({box, -x[i], x[i] - 1.0});
  }
  rep.primal_residual = std::max(box, std::abs(sum - prob.k()));
  rep.pass = rep.max_violation <= tol;
  return rep;
}

namespace {

// LMO of the cut polytope {0<=s<=1, e^T s = k, sum_{i in supp} s_i <= k-1}:
// the k cheapest coordinates overall unless they are exactly the support,
// in which case the costliest support member is swapped for the cheapest
// outsider. The constraint matrix is an interval matrix, so vertices are
// integral and this greedy is exact.
std::vector<double> cut_lmo(std::span<const double> cost,
                            const std::vector<char>& in_supp, int k) {
  const int m = static_cast<int>(cost.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cost[a] != cost[b]) return cost[a] < cost[b];
    return a < b;
  });
  std::vector<int> take(order.begin(), order.begin() + k);
  int inside = 0;
  for (int i : take) inside += in_supp[i];
  if (inside >= k) {
    // top-k is exactly the support: drop its costliest member, add the
    // cheapest outsider.
    int drop = -1;
    for (int r = k - 1; r >= 0; --r)
      if (in_supp[take[r]]) {
        drop = r;
        break;
      }
    int add = -1;
    for (int r = k; r < m; ++r)
      if (!in_supp[order[r]]) {
        add = order[r];
        break;
      }
    take[drop] = add;
  }
  std::vector<double> s(m, 0.0);
  for (int i : take) s[i] = 1.0;
  return s;
}

}  // namespace

CutCertificate certify_by_cut(const CascadeProblem& prob,
                              std::span<const double> x_solution) {
  constexpr double kMargin = 1e-9;
  constexpr int kMaxIters = 100000;
  const int m = static_cast<int>(x_solution.size());
  const int k = prob.k();

  CutCertificate cert;
  cert.rounded = round_topk(x_solution, k);  // propagates ambiguity errors
  cert.rounded_objective = objective(prob, cert.rounded);

  if (k == m) {
    // y~ = e is the only feasible point of the relaxation; the cut polytope
    // is empty and y~ is trivially optimal.
    cert.verdict = CutVerdict::CertifiedOptimal;
    cert.reason = "cut infeasible: budget selects every sender";
    cert.cut_lower_bound = std::numeric_limits<double>::infinity();
    return cert;
  }

  std::vector<char> in_supp(m, 0);
  for (int i = 0; i < m; ++i) in_supp[i] = cert.rounded[i] > 0.5;

  // Per-receiver exponents are linear in x, so the line search derivative
  // needs only the receiver aggregates of the current point and direction.
  const BipartiteGraph& g = prob.graph();
  const auto logq = prob.log_q_receiver_major();
  const auto exponents = [&](std::span<const double> v) {
    std::vector<double> s(g.num_receivers(), 0.0);
    std::size_t a = 0;
    for (int j = 0; j < g.num_receivers(); ++j) {
      double acc = 0.0;
      for (int i : g.senders_of(j)) acc += v[i] * logq[a++];
      s[j] = acc;
    }
    return s;
  };

  std::vector<double> x = cut_lmo(gradient(prob, std::vector<double>(m, double(k) / m)),
                                  in_supp, k);
  double fx = objective(prob, x);
  cert.cut_best_objective = fx;

  for (int it = 0; it < kMaxIters; ++it) {
    cert.iterations = it;
    const auto grad = gradient(prob, x);
    const auto s = cut_lmo(grad, in_supp, k);
    double gap = 0.0;
    for (int i = 0; i < m; ++i) gap += grad[i] * (x[i] - s[i]);
    cert.cut_lower_bound = fx - gap;
    cert.cut_best_objective = fx;

    if (cert.cut_lower_bound > cert.rounded_objective + kMargin) {
      cert.verdict = CutVerdict::CertifiedOptimal;
      cert.reason = "cut optimum strictly above g at the rounded vertex";
      return cert;
    }
    if (fx <= cert.rounded_objective + kMargin) {
      cert.verdict = CutVerdict::NotCertified;
      cert.reason = "cut polytope contains a point at least as good as the rounded vertex";
      return cert;
    }
    if (gap <= 1e-12 * std::max(1.0, std::abs(fx))) break;

    // Exact line search on [0,1]: bisection on phi'(gamma).
    std::vector<double> d(m);
    for (int i = 0; i < m; ++i) d[i] = s[i] - x[i];
    const auto sx = exponents(x);
    const auto sd = exponents(d);
    const auto dphi = [&](double gamma) {
      double acc = 0.0;
      for (int j = 0; j < g.num_receivers(); ++j)
        acc += sd[j] * std::exp(sx[j] + gamma * sd[j]);
      return acc;
    };
    double gamma = 1.0;
    if (dphi(1.0) > 0.0) {
      double a = 0.0, b = 1.0;
      while (b - a > 1e-12) {
        const double mid = 0.5 * (a + b);
        (dphi(mid) <= 0.0 ? a : b) = mid;
      }
      gamma = 0.5 * (a + b);
    }
    for (int i = 0; i < m; ++i) x[i] += gamma * d[i];
    fx = objective(prob, x);
  }

  cert.verdict = CutVerdict::NotCertified;
  cert.reason = "frank-wolfe did not separate the bound within the iteration cap";
  return cert;
}

std::string dump_cascade_solution(const CascadeSolution& sol,
                                  std::span<const double> rounded,
                                  const std::string& verdict,
                                  double arc_probability) {
  nlohmann::json j;
  j["model"] = "cascade";
  j["x"] = sol.x;
  j["objective"] = sol.objective;
  j["gradient"] = sol.gradient;
  j["stationarity"] = sol.stationarity;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  if (!rounded.empty())
    j["rounded"] = std::vector<double>(rounded.begin(), rounded.end());
  if (!verdict.empty()) j["certificate"] = verdict;
  if (arc_probability > 0.0) j["p"] = arc_probability;
  return j.dump(2) + "\n";
}

CascadeSolution parse_cascade_solution(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  CascadeSolution sol;
  sol.x = j.at("x").get<std::vector<double>>();
  sol.objective = j.at("objective").get<double>();
  sol.gradient = j.value("gradient", std::vector<double>{});
  sol.stationarity = j.value("stationarity", 0.0);
  sol.iterations = j.value("iterations", 0);
  sol.converged = j.value("converged", false);
  return sol;
}

}  // namespace influence
