#pragma once

#include <span>
#include <string>
#include <vector>

#include "influence/graph.hpp"

namespace influence {

/// Raised by top-k rounding when the k-th and (k+1)-th largest entries tie.
class AmbiguousRoundingError : public std::runtime_error {
 public:
  explicit AmbiguousRoundingError(double tied)
      : std::runtime_error("top-k rounding is ambiguous: boundary entries tie at " +
                           std::to_string(tied)),
        tied_value_(tied) {}
  double tied_value() const { return tied_value_; }

 private:
  double tied_value_;
};

/// Independent-cascade relaxation data: minimize
///   g(x) = sum_j prod_{(i,j) in E} (1-p_ij)^{x_i}
/// over the capped simplex {0 <= x <= 1, sum x = k}. Probabilities are
/// either uniform or per-arc, all strictly inside (0,1).
class CascadeProblem {
 public:
  CascadeProblem(const BipartiteGraph& g, int k, double uniform_p);
  /// arc_p in sender-major (lexicographic) arc order.
  CascadeProblem(const BipartiteGraph& g, int k, std::vector<double> arc_p);

  const BipartiteGraph& graph() const { return *graph_; }
  int k() const { return k_; }
  bool is_uniform() const { return uniform_; }
  double uniform_p() const;

  /// log(1-p) per arc, receiver-major order (j ascending, senders ascending).
  std::span<const double> log_q_receiver_major() const { return log_q_rm_; }
  /// Failure probability 1-p per arc, sender-major order.
  std::span<const double> q_sender_major() const { return q_sm_; }

 private:
  void build(std::vector<double> arc_p_sender_major);

  const BipartiteGraph* graph_;
  int k_;
  bool uniform_;
  double p_ = 0.0;
  std::vector<double> log_q_rm_;
  std::vector<double> q_sm_;
};

double objective(const CascadeProblem& prob, std::span<const double> x);
std::vector<double> gradient(const CascadeProblem& prob, std::span<const double> x);
/// Expected number of receivers reached: sum_j (1 - prod (1-p_ij)^{x_i}).
double expected_spread(const CascadeProblem& prob, std::span<const double> x);

/// Euclidean projection onto {0 <= x <= 1, sum x = k}: monotone bisection on
/// the shift tau with x_i = clamp(y_i - tau, 0, 1).
std::vector<double> project_capped_simplex(std::span<const double> y, int k);

struct CascadeSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> gradient;
  double stationarity = 0.0;  // ||x - proj(x - grad g(x))||_inf
  int iterations = 0;
  bool converged = false;
};

struct CascadeConfig {
  double tol = 1e-9;
  int max_iterations = 50000;
};

/// Projected gradient with Armijo backtracking (sufficient decrease 1e-4,
/// halving, initial step 1, at most 60 backtracks) from x0 = (k/m) e.
CascadeSolution solve_cascade(const CascadeProblem& prob,
                              const CascadeConfig& config = {});

/// Threshold rounding y_xi: 1 where x_i >= 0.5 - xi/2. xi must lie in
/// [0, 1/(2k+1)); the result may have any number of ones.
std::vector<double> round_threshold(std::span<const double> x, double xi_round,
                                    int k);

/// Indicator of the k largest entries; throws AmbiguousRoundingError when
/// the boundary entries tie.
std::vector<double> round_topk(std::span<const double> x, int k);

struct CascadeKktReport {
  double lambda = 0.0;       // equality-row multiplier, midpoint choice
  double max_violation = 0.0;  // complementarity products of the box duals
  double primal_residual = 0.0;
  bool pass = false;
};

CascadeKktReport kkt_check_cascade(const CascadeProblem& prob,
                                   std::span<const double> x, double tol);

enum class CutVerdict { CertifiedOptimal, NotCertified };

struct CutCertificate {
  CutVerdict verdict = CutVerdict::NotCertified;
  std::string reason;
  std::vector<double> rounded;     // y~ = top-k rounding of the input
  double rounded_objective = 0.0;  // g(y~)
  double cut_lower_bound = 0.0;    // certified lower bound on min g over the cut
  double cut_best_objective = 0.0; // best cut-feasible point found
  int iterations = 0;
};

/// The one-vertex cut certificate: minimizes g over the feasible region with
/// y~^T x <= k-1 added (which excludes exactly the vertex y~) by Frank-Wolfe
/// with a greedy linear minimization oracle and exact line search. Certifies
/// y~ optimal for the integer problem when the Frank-Wolfe lower bound
/// exceeds g(y~) + 1e-9.
CutCertificate certify_by_cut(const CascadeProblem& prob,
                              std::span<const double> x_solution);

std::string dump_cascade_solution(const CascadeSolution& sol,
                                  std::span<const double> rounded = {},
                                  const std::string& verdict = "",
                                  double arc_probability = 0.0);
CascadeSolution parse_cascade_solution(const std::string& json_text);

}  // namespace influence
