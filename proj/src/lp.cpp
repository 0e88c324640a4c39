#include "influence/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "influence/rng.hpp"
#include "influence/simplex.hpp"

namespace influence {

LpProblem build_lp(const BipartiteGraph& g, int k) {
  if (k < 1 || k > g.num_senders())
    throw std::invalid_argument("k must lie in [1, num_senders]");
  return LpProblem{&g, k};
}

namespace {

// Greedy max-coverage warm start. A raw top-outdegree pick can land far
// from the optimum on forest-fire graphs (heavy subordinates out-degree
// influencers), which costs thousands of degenerate pivots; greedy
// coverage starts at a near-optimal vertex.
std::vector<int> greedy_cover_start(const BipartiteGraph& g, int k) {
  std::vector<char> covered(g.num_receivers(), 0);
  std::vector<char> taken(g.num_senders(), 0);
  std::vector<int> picks;
  for (int round = 0; round < k; ++round) {
    int best = -1, best_gain = -1;
    for (int i = 0; i < g.num_senders(); ++i) {
      if (taken[i]) continue;
      int gain = 0;
      for (int j : g.receivers_of(i)) gain += !covered[j];
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    taken[best] = 1;
    picks.push_back(best);
    for (int j : g.receivers_of(best)) covered[j] = 1;
  }
  return picks;
}

}  // namespace

LpSolution solve_lp(const LpProblem& p, const LpConfig& config) {
  const BipartiteGraph& g = *p.graph;
  const int m = g.num_senders();
  const int n = g.num_receivers();

  // Variable layout: x (m), t (n), coupling slacks s (n), one fixed
  // artificial on the equality row. Rows: n coupling rows then the
  // equality row.
  const int var_x = 0, var_t = m, var_s = m + n, var_art = m + 2 * n;
  const int num_vars = m + 2 * n + 1;
  const int eq_row = n;

  std::vector<std::vector<BoundedSimplex::Entry>> cols(num_vars);
  std::vector<double> cost(num_vars, 0.0), lo(num_vars, 0.0), hi(num_vars, 1.0);
  for (int i = 0; i < m; ++i) {
    auto& col = cols[var_x + i];
    for (int j : g.receivers_of(i)) col.push_back({j, -1.0});
    col.push_back({eq_row, 1.0});
  }
  for (int j = 0; j < n; ++j) {
    cols[var_t + j].push_back({j, 1.0});
    cost[var_t + j] = 1.0;
    cols[var_s + j].push_back({j, 1.0});
    hi[var_s + j] = BoundedSimplex::kInfinity;
  }
  cols[var_art].push_back({eq_row, 1.0});
  hi[var_art] = 0.0;  // fixed; phase-1 fallback kept in the basis start

  std::vector<double> rhs(n + 1, 0.0);
  rhs[eq_row] = static_cast<double>(p.k);

  // Dual ties among the t columns (all cost 1) make Dantzig pricing thrash
  // on these massively degenerate coverage rows. A tiny deterministic cost
  // perturbation breaks the ties; the perturbation is removed afterwards and
  // the solve finishes under the true costs from the warm basis.
  std::vector<double> perturbed = cost;
  {
    Rng tie_breaker = Rng::child(0xC057, static_cast<std::uint64_t>(n));
    for (int j = 0; j < n; ++j)
      perturbed[var_t + j] += 1e-7 * tie_breaker.next_double();
  }

  // Starting point: x = indicator of a greedy max-coverage k-subset,
  // t = min(e, A^T x). Always primal feasible, so no phase 1 is needed.
  std::vector<BoundedSimplex::VarState> state(num_vars, BoundedSimplex::kAtLower);
  std::vector<double> x0(m, 0.0);
  for (int i : greedy_cover_start(g, p.k)) {
    state[var_x + i] = BoundedSimplex::kAtUpper;
    x0[i] = 1.0;
  }
  std::vector<int> basic_of_row(n + 1);
  for (int j = 0; j < n; ++j) {
    double cov = 0.0;
    for (int i : g.senders_of(j)) cov += x0[i];
    if (cov >= 1.0) state[var_t + j] = BoundedSimplex::kAtUpper;
    basic_of_row[j] = var_s + j;  // slack carries the row
    state[var_s + j] = BoundedSimplex::kBasic;
  }
  basic_of_row[eq_row] = var_art;
  state[var_art] = BoundedSimplex::kBasic;

  BoundedSimplex simplex(n + 1, std::move(cols), perturbed, std::move(lo),
                         std::move(hi), std::move(rhs));
  BoundedSimplex::Config scfg;
  scfg.max_iterations = config.max_iterations;
  scfg.bland_after_degenerate = 5 * (m + n);
  auto res = simplex.solve(std::move(state), std::move(basic_of_row), scfg);
  int total_iterations = res.iterations;
  if (res.status == BoundedSimplex::Status::Optimal) {
    simplex.set_cost(cost);
    res = simplex.solve(std::move(res.state), std::move(res.basic_of_row), scfg);
    total_iterations += res.iterations;
  }

  LpSolution sol;
  sol.status = res.status == BoundedSimplex::Status::Optimal
                   ? LpStatus::Optimal
                   : LpStatus::IterationLimit;
  sol.iterations = total_iterations;
  sol.x.assign(res.values.begin() + var_x, res.values.begin() + var_x + m);
  sol.t.assign(res.values.begin() + var_t, res.values.begin() + var_t + n);
  sol.objective = std::accumulate(sol.t.begin(), sol.t.end(), 0.0);

  // Dual extraction. lambda = coupling-row duals, xi = equality-row dual;
  // mu and nu are the reduced costs of t and x columns held at their upper
  // bound (zero elsewhere by complementarity).
  sol.lambda.assign(res.row_duals.begin(), res.row_duals.begin() + n);
  sol.xi_dual = res.row_duals[eq_row];
  sol.mu.assign(n, 0.0);
  sol.nu.assign(m, 0.0);
  for (int j = 0; j < n; ++j)
    if (sol.t[j] >= 1.0 - 1e-9) sol.mu[j] = std::max(0.0, res.reduced_costs[var_t + j]);
  for (int i = 0; i < m; ++i)
    if (sol.x[i] >= 1.0 - 1e-9) sol.nu[i] = std::max(0.0, res.reduced_costs[var_x + i]);
  return sol;
}

DualCertificate noiseless_duals(const PlantedInstance& inst) {
  if (!satisfies_noiseless_assumptions(inst))
    throw std::invalid_argument("noiseless_duals: instance violates A1-A3");
  const int n = inst.graph.num_receivers();
  const int m = inst.graph.num_senders();

  DualCertificate cert;
  cert.lambda.assign(n, 0.0);
  cert.mu.assign(n, 0.0);
  cert.nu.assign(m, 0.0);
  int n_max = 0;
  for (int l = 1; l <= inst.k; ++l)
    n_max = std::max(n_max, static_cast<int>(inst.receiver_groups[l].size()));
  const double delta = 1.0 / n_max;
  for (int l = 1; l <= inst.k; ++l) {
    const double lam = 1.0 / static_cast<double>(inst.receiver_groups[l].size());
    for (int j : inst.receiver_groups[l]) {
      cert.lambda[j] = lam;
      cert.mu[j] = 1.0 - lam;
    }
  }
  for (int i : inst.influencers) cert.nu[i] = delta;
  cert.xi_dual = 1.0 - delta;
  return cert;
}

DualCertificate noisy_duals(const PlantedInstance& inst) {
  if (!satisfies_a1_prime(inst))
    throw std::invalid_argument("noisy_duals: instance violates A1'");
  const int n = inst.graph.num_receivers();
  const int m = inst.graph.num_senders();
  const auto sgroup = inst.sender_group_ids();
  const auto rgroup = inst.receiver_group_ids();

  int n_min = 0;
  for (int l = 1; l <= inst.k; ++l) {
    const int n_l = static_cast<int>(inst.receiver_groups[l].size());
    n_min = (l == 1) ? n_l : std::min(n_min, n_l);
  }

  DualCertificate cert;
  cert.lambda.assign(n, 0.0);
  cert.mu.assign(n, 0.0);
  cert.nu.assign(m, 0.0);
  // lambda/mu per the proof table; H_l is the maximal valid choice.
  for (int j = 0; j < n; ++j) {
    const int l = rgroup[j];
    if (l == 0) {
      cert.lambda[j] = 1.0;
      cert.mu[j] = 0.0;
      continue;
    }
    bool pure = true;
    for (int i : inst.graph.senders_of(j))
      if (sgroup[i] != l) {
        pure = false;
        break;
      }
    if (pure) {
      const double lam =
          static_cast<double>(n_min) / inst.receiver_groups[l].size();
      cert.lambda[j] = lam;
      cert.mu[j] = 1.0 - lam;
    } else {
      cert.lambda[j] = 0.0;
      cert.mu[j] = 1.0;
    }
  }

  std::vector<double> score(m, 0.0);  // A(i,:) lambda
  for (int i = 0; i < m; ++i)
    for (int j : inst.graph.receivers_of(i)) score[i] += cert.lambda[j];
  std::vector<char> is_influencer(m, 0);
  for (int i : inst.influencers) is_influencer[i] = 1;
  double max_sub = 0.0, min_infl = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    if (is_influencer[i])
      min_infl = std::min(min_infl, score[i]);
    else
      max_sub = std::max(max_sub, score[i]);
  if (!(min_infl > max_sub))
    throw CertificateError(
        "noisy_duals: influencer scores do not dominate subordinate scores "
        "(min influencer " +
        std::to_string(min_infl) + " <= max subordinate " +
        std::to_string(max_sub) + ")");

  const double omega = 0.5 * (max_sub + min_infl);
  for (int i : inst.influencers) cert.nu[i] = score[i] - omega;
  cert.xi_dual = omega;
  return cert;
}

LpSolution certificate_solution(const PlantedInstance& inst,
                                const DualCertificate& cert) {
  LpSolution sol;
  sol.x = inst.x_star().values;
  sol.t.assign(inst.graph.num_receivers(), 1.0);
  for (int j : inst.receiver_groups[0]) sol.t[j] = 0.0;
  sol.objective = std::accumulate(sol.t.begin(), sol.t.end(), 0.0);
  sol.lambda = cert.lambda;
  sol.mu = cert.mu;
  sol.nu = cert.nu;
  sol.xi_dual = cert.xi_dual;
  sol.status = LpStatus::Optimal;
  return sol;
}

KktReport kkt_check(const LpProblem& p, const LpSolution& sol, double tol) {
  const BipartiteGraph& g = *p.graph;
  const int m = g.num_senders();
  const int n = g.num_receivers();

  KktReport rep;
  const auto coverage = apply_incidence_transpose(g, std::span<const double>(sol.x));
  std::vector<double> a_lambda(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j : g.receivers_of(i)) a_lambda[i] += sol.lambda[j];

  double cs1 = 0, cs2 = 0, cs4 = 0;
  for (int j = 0; j < n; ++j) {
    cs1 += sol.lambda[j] * (sol.t[j] - coverage[j]);
    cs2 += sol.mu[j] * (1.0 - sol.t[j]);
    cs4 += sol.t[j] * (sol.lambda[j] + sol.mu[j] - 1.0);
    rep.dual_feas_t = std::max(rep.dual_feas_t, 1.0 - sol.lambda[j] - sol.mu[j]);
    rep.dual_nonneg = std::max({rep.dual_nonneg, -sol.lambda[j], -sol.mu[j]});
  }
  double cs3 = 0, cs5 = 0;
  for (int i = 0; i < m; ++i) {
    cs3 += sol.nu[i] * (1.0 - sol.x[i]);
    const double station = -a_lambda[i] + sol.nu[i] + sol.xi_dual;
    cs5 += sol.x[i] * station;
    rep.dual_feas_x = std::max(rep.dual_feas_x, -station);
    rep.dual_nonneg = std::max(rep.dual_nonneg, -sol.nu[i]);
  }
  rep.comp_coupling = std::abs(cs1);
  rep.comp_t_upper = std::abs(cs2);
  rep.comp_x_upper = std::abs(cs3);
  rep.comp_t_sum = std::abs(cs4);
  rep.comp_x_sum = std::abs(cs5);
  rep.dual_feas_t = std::max(0.0, rep.dual_feas_t);
  rep.dual_feas_x = std::max(0.0, rep.dual_feas_x);
  rep.dual_nonneg = std::max(0.0, rep.dual_nonneg);

  double primal = 0.0;
  double sum_x = 0.0;
  for (int i = 0; i < m; ++i) {
    sum_x += sol.x[i];
    primal = std::max({primal, -sol.x[i], sol.x[i] - 1.0});
  }
  for (int j = 0; j < n; ++j)
    primal = std::max({primal, -sol.t[j], sol.t[j] - 1.0, sol.t[j] - coverage[j]});
  rep.primal_residual = std::max(primal, std::abs(sum_x - p.k));

  rep.max_violation =
      std::max({rep.comp_coupling, rep.comp_t_upper, rep.comp_x_upper,
                rep.comp_t_sum, rep.comp_x_sum, rep.dual_feas_t, rep.dual_feas_x,
                rep.dual_nonneg});
  rep.pass = rep.max_violation <= tol;
  rep.primal_objective = std::accumulate(sol.t.begin(), sol.t.end(), 0.0);
  rep.dual_objective = std::accumulate(sol.mu.begin(), sol.mu.end(), 0.0) +
                       std::accumulate(sol.nu.begin(), sol.nu.end(), 0.0) +
                       p.k * sol.xi_dual;
  return rep;
}

namespace {

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

}  // namespace

std::string dump_lp_solution(const LpSolution& sol) {
  nlohmann::json j;
  j["model"] = "lp";
  j["x"] = sol.x;
  j["t"] = sol.t;
  j["lambda"] = sol.lambda;
  j["mu"] = sol.mu;
  j["nu"] = sol.nu;
  j["xi_dual"] = sol.xi_dual;
  j["objective"] = sol.objective;
  j["status"] = status_name(sol.status);
  j["iterations"] = sol.iterations;
  return j.dump(2) + "\n";
}

LpSolution parse_lp_solution(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  LpSolution sol;
  sol.x = j.at("x").get<std::vector<double>>();
  sol.t = j.at("t").get<std::vector<double>>();
  sol.lambda = j.at("lambda").get<std::vector<double>>();
  sol.mu = j.at("mu").get<std::vector<double>>();
  sol.nu = j.at("nu").get<std::vector<double>>();
  sol.xi_dual = j.at("xi_dual").get<double>();
  sol.objective = j.at("objective").get<double>();
  sol.iterations = j.value("iterations", 0);
  const std::string st = j.at("status").get<std::string>();
  sol.status = st == "optimal" ? LpStatus::Optimal
               : st == "infeasible" ? LpStatus::Infeasible
                                    : LpStatus::IterationLimit;
  return sol;
}

}  // namespace influence
