#pragma once

#include <string>
#include <vector>

#include "influence/graph.hpp"
#include "influence/planted.hpp"

namespace influence {

/// Raised when the explicit dual construction cannot be completed, i.e. the
/// recovery theorem's score gap does not hold on the given instance.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };

/// The coverage LP: maximize e^T t subject to t <= A^T x, e^T x = k,
/// 0 <= x <= e, 0 <= t <= e. Variables are the x block (length
/// num_senders) followed by the t block (length num_receivers).
struct LpProblem {
  const BipartiteGraph* graph = nullptr;
  int k = 0;

  int num_x() const { return graph->num_senders(); }
  int num_t() const { return graph->num_receivers(); }
  int num_coupling_rows() const { return graph->num_receivers(); }
};

LpProblem build_lp(const BipartiteGraph& g, int k);

struct LpSolution {
  std::vector<double> x;
  std::vector<double> t;
  double objective = 0.0;
  std::vector<double> lambda;  // coupling-row duals
  std::vector<double> mu;      // t upper-bound duals
  std::vector<double> nu;      // x upper-bound duals
  double xi_dual = 0.0;        // equality-row dual
  LpStatus status = LpStatus::Optimal;
  int iterations = 0;
};

struct LpConfig {
  int max_iterations = 0;  // 0 = automatic
};

/// Solves to a vertex of the feasible polytope with a bounded-variable
/// revised primal simplex; duals are read from the final basis.
LpSolution solve_lp(const LpProblem& p, const LpConfig& config = {});

struct DualCertificate {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> nu;
  double xi_dual = 0.0;
};

/// Explicit optimal duals for a noiseless A1-A3 instance:
/// lambda block-constant 1/n_l, mu = e - lambda, nu = delta x* with
/// delta = 1/max_l n_l, xi = 1 - delta. Throws std::invalid_argument when
/// A1-A3 do not hold.
DualCertificate noiseless_duals(const PlantedInstance& inst);

/// Explicit duals for the noisy deterministic case: lambda is n_min/n_l on
/// H_l, 0 on G_l \ H_l and 1 on G_0; nu_i = A(i,:) lambda - omega at
/// influencers with omega the midpoint of [max subordinate score,
/// min influencer score]. Throws CertificateError when the score intervals
/// overlap (the theorem's conditions were not actually met).
DualCertificate noisy_duals(const PlantedInstance& inst);

/// The certified primal-dual pair (x*, t*) for a planted instance:
/// t* is 1 on interest groups and 0 on G_0.
LpSolution certificate_solution(const PlantedInstance& inst,
                                const DualCertificate& cert);

struct KktReport {
  // complementarity products, absolute values
  double comp_coupling = 0.0;  // lambda^T (t - A^T x)
  double comp_t_upper = 0.0;   // mu^T (e - t)
  double comp_x_upper = 0.0;   // nu^T (e - x)
  double comp_t_sum = 0.0;     // t^T (lambda + mu - e)
  double comp_x_sum = 0.0;     // x^T (-A lambda + nu + xi e)
  // dual feasibility violations (0 when satisfied)
  double dual_feas_t = 0.0;  // lambda + mu >= e
  double dual_feas_x = 0.0;  // -A lambda + nu + xi e >= 0
  double dual_nonneg = 0.0;  // lambda, mu, nu >= 0
  double primal_residual = 0.0;  // informational, not part of max_violation
  double max_violation = 0.0;
  bool pass = false;
  double primal_objective = 0.0;
  double dual_objective = 0.0;  // e^T mu + e^T nu + k xi
};

KktReport kkt_check(const LpProblem& p, const LpSolution& sol, double tol);

std::string dump_lp_solution(const LpSolution& sol);
LpSolution parse_lp_solution(const std::string& json_text);

}  // namespace influence
