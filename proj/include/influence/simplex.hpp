#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace influence {

/// Revised primal simplex for box-constrained LPs in equality form:
///
///   maximize c^T z   subject to  A z = b,  lo <= z <= hi,
///
/// with nonbasic variables held at a finite bound. The caller supplies a
/// starting basis (one basic variable per row) and bound assignments that
/// are primal feasible; for the coverage LPs built here such a basis always
/// exists directly, the equality row carries a fixed artificial column as a
/// phase-1 fallback.
///
/// The basis is factorized by splitting off singleton columns (slacks, the
/// artificial, coverage variables), which cover their rows triangularly;
/// only the remaining block is kept as a dense LU with partial pivoting.
/// Pricing is Dantzig (largest reduced cost, lowest index on ties) with a
/// switch to Bland's rule after a configurable run of degenerate pivots,
/// which guarantees termination. Identical input always produces the
/// identical pivot sequence.
class BoundedSimplex {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  struct Entry {
    int row;
    double value;
  };

  struct Config {
    double tol_feas = 1e-9;
    double tol_dual = 1e-9;
    double tol_pivot = 1e-10;  // ratio-test pivot threshold
    int max_iterations = 0;    // 0 = automatic
    int bland_after_degenerate = 0;  // 0 = automatic
    int revalue_period = 100;  // recompute basic values from scratch
  };

  enum class Status { Optimal, IterationLimit };
  enum VarState : std::uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

  struct Result {
    Status status = Status::Optimal;
    int iterations = 0;
    std::vector<double> values;    // primal values, all variables
    std::vector<double> row_duals; // y = B^{-T} c_B
    std::vector<double> reduced_costs;
    double objective = 0.0;
    // final basis, usable to warm-start another solve
    std::vector<VarState> state;
    std::vector<int> basic_of_row;
  };

  BoundedSimplex(int num_rows, std::vector<std::vector<Entry>> columns,
                 std::vector<double> cost, std::vector<double> lower,
                 std::vector<double> upper, std::vector<double> rhs);

  /// `state` per variable; `basic_of_row[r]` gives the basic variable of row
  /// r (its state must be kBasic). Nonbasic values are implied by bounds.
  Result solve(std::vector<VarState> state, std::vector<int> basic_of_row,
               const Config& config);

  /// Replaces the objective vector; the next solve may warm-start from a
  /// previous result's basis (used to remove cost perturbations).
  void set_cost(std::vector<double> cost);

 private:
  struct Lu;
  struct Factor;

  int num_rows_;
  int num_vars_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<double> cost_, lower_, upper_, rhs_;
};

}  // namespace influence
