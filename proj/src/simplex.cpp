#include "influence/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace influence {

namespace {

// Dense LU with partial pivoting, column-major, for the non-singleton block.
struct DenseLu {
  int n = 0;
  std::vector<double> a;   // n x n, column-major, holds L\U
  std::vector<int> perm;   // row permutation

  void factor(std::vector<double> m, int size) {
    n = size;
    a = std::move(m);
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
      int pivot = col;
      double best = std::abs(a[col * n + col]);
      for (int r = col + 1; r < n; ++r) {
        const double v = std::abs(a[col * n + r]);
        if (v > best) {
          best = v;
          pivot = r;
        }
      }
      if (best < 1e-13) throw std::runtime_error("simplex basis numerically singular");
      if (pivot != col) {
        std::swap(perm[col], perm[pivot]);
        for (int c = 0; c < n; ++c) std::swap(a[c * n + col], a[c * n + pivot]);
      }
      const double d = a[col * n + col];
      for (int r = col + 1; r < n; ++r) a[col * n + r] /= d;
      for (int c = col + 1; c < n; ++c) {
        const double f = a[c * n + col];
        if (f == 0.0) continue;
        for (int r = col + 1; r < n; ++r) a[c * n + r] -= f * a[col * n + r];
      }
    }
  }

  // x := A^{-1} b
  void solve(std::vector<double>& x) const {
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = x[perm[i]];
    for (int c = 0; c < n; ++c) {  // forward, unit lower
      const double v = b[c];
      if (v == 0.0) continue;
      for (int r = c + 1; r < n; ++r) b[r] -= a[c * n + r] * v;
    }
    for (int c = n - 1; c >= 0; --c) {  // backward
      b[c] /= a[c * n + c];
      const double v = b[c];
      if (v == 0.0) continue;
      for (int r = 0; r < c; ++r) b[r] -= a[c * n + r] * v;
    }
    x = std::move(b);
  }

  // x := A^{-T} b
  void solve_transpose(std::vector<double>& x) const {
    std::vector<double> b = x;
    for (int r = 0; r < n; ++r) {  // forward with U^T (lower)
      double acc = b[r];
      for (int c = 0; c < r; ++c) acc -= a[r * n + c] * b[c];
      b[r] = acc / a[r * n + r];
    }
    for (int r = n - 1; r >= 0; --r) {  // backward with L^T (unit upper)
      double acc = b[r];
      for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * b[c];
      b[r] = acc;
    }
    for (int i = 0; i < n; ++i) x[perm[i]] = b[i];
  }
};

}  // namespace

// Factorization of the current basis. The basis is an ordered set of
// columns (positions); a column with a single entry covers that entry's
// row triangularly, the remaining columns and rows form a dense block.
// Position and row indices are distinct spaces: w vectors are indexed by
// basis position, y vectors by row.
struct BoundedSimplex::Lu {
  std::vector<int> cover_pos;       // row -> covering singleton position, or -1
  std::vector<double> cover_coeff;  // row -> that singleton's coefficient
  std::vector<int> multi_pos;       // positions of the dense block
  std::vector<int> multi_rows;      // rows of the dense block
  std::vector<int> row_to_local;    // row -> index in multi_rows, or -1
  DenseLu lu;

  void refactor(const std::vector<std::vector<Entry>>& cols,
                const std::vector<int>& basic_of_row, int num_rows) {
    cover_pos.assign(num_rows, -1);
    cover_coeff.assign(num_rows, 0.0);
    multi_pos.clear();
    multi_rows.clear();
    row_to_local.assign(num_rows, -1);
    for (int p = 0; p < num_rows; ++p) {
      const auto& col = cols[basic_of_row[p]];
      if (col.size() == 1) {
        if (cover_pos[col[0].row] != -1)
          throw std::runtime_error("simplex basis is structurally singular");
        cover_pos[col[0].row] = p;
        cover_coeff[col[0].row] = col[0].value;
      } else {
        multi_pos.push_back(p);
      }
    }
    for (int r = 0; r < num_rows; ++r)
      if (cover_pos[r] == -1) {
        row_to_local[r] = static_cast<int>(multi_rows.size());
        multi_rows.push_back(r);
      }
    const int b = static_cast<int>(multi_pos.size());
    if (static_cast<int>(multi_rows.size()) != b)
      throw std::runtime_error("simplex basis is structurally singular");
    std::vector<double> dense(static_cast<std::size_t>(b) * b, 0.0);
    for (int c = 0; c < b; ++c)
      for (const auto& e : cols[basic_of_row[multi_pos[c]]]) {
        const int loc = row_to_local[e.row];
        if (loc >= 0) dense[static_cast<std::size_t>(c) * b + loc] = e.value;
      }
    lu.factor(std::move(dense), b);
  }

  // w (indexed by basis position) with sum_p w_p * col(basic_of_row[p]) = a.
  std::vector<double> ftran(const std::vector<std::vector<Entry>>& cols,
                            const std::vector<int>& basic_of_row,
                            const std::vector<double>& a) const {
    const int b = static_cast<int>(multi_pos.size());
    std::vector<double> rhs(b);
    for (int c = 0; c < b; ++c) rhs[c] = a[multi_rows[c]];
    lu.solve(rhs);
    std::vector<double> w(a.size(), 0.0);
    std::vector<double> acc = a;
    for (int c = 0; c < b; ++c) {
      const double wc = rhs[c];
      w[multi_pos[c]] = wc;
      if (wc == 0.0) continue;
      for (const auto& e : cols[basic_of_row[multi_pos[c]]])
        if (cover_pos[e.row] != -1) acc[e.row] -= e.value * wc;
    }
    for (std::size_t r = 0; r < a.size(); ++r)
      if (cover_pos[r] != -1) w[cover_pos[r]] = acc[r] / cover_coeff[r];
    return w;
  }

  // y (indexed by row) with B^T y = u, u indexed by basis position.
  std::vector<double> btran_vec(const std::vector<std::vector<Entry>>& cols,
                                const std::vector<int>& basic_of_row,
                                const std::vector<double>& u) const {
    std::vector<double> y(basic_of_row.size(), 0.0);
    for (std::size_t r = 0; r < basic_of_row.size(); ++r)
      if (cover_pos[r] != -1) y[r] = u[cover_pos[r]] / cover_coeff[r];
    const int b = static_cast<int>(multi_pos.size());
    std::vector<double> rhs(b);
    for (int c = 0; c < b; ++c) {
      double acc = u[multi_pos[c]];
      for (const auto& e : cols[basic_of_row[multi_pos[c]]])
        if (cover_pos[e.row] != -1) acc -= e.value * y[e.row];
      rhs[c] = acc;
    }
    lu.solve_transpose(rhs);
    for (int c = 0; c < b; ++c) y[multi_rows[c]] = rhs[c];
    return y;
  }
};

BoundedSimplex::BoundedSimplex(int num_rows, std::vector<std::vector<Entry>> columns,
                               std::vector<double> cost, std::vector<double> lower,
                               std::vector<double> upper, std::vector<double> rhs)
    : num_rows_(num_rows),
      num_vars_(static_cast<int>(columns.size())),
      cols_(std::move(columns)),
      cost_(std::move(cost)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      rhs_(std::move(rhs)) {
  if (static_cast<int>(cost_.size()) != num_vars_ ||
      static_cast<int>(lower_.size()) != num_vars_ ||
      static_cast<int>(upper_.size()) != num_vars_ ||
      static_cast<int>(rhs_.size()) != num_rows_)
    throw std::invalid_argument("simplex: inconsistent problem dimensions");
}

// Product-form update chain on top of the base factorization: after a pivot
// replacing the basic variable at position p with a column whose ftran image
// is w, B_new = B_old E with E = I + (w - e_p) e_p^T. Solves apply the base
// factor and then the eta chain; the base is refactorized periodically.
struct BoundedSimplex::Factor {
  Lu base;
  struct Eta {
    int pivot_pos;
    double pivot_value;
    std::vector<std::pair<int, double>> entries;  // nonzeros of w, excl. pivot
  };
  std::vector<Eta> etas;

  void refactor(const std::vector<std::vector<Entry>>& cols,
                const std::vector<int>& basic_of_row, int num_rows) {
    base.refactor(cols, basic_of_row, num_rows);
    etas.clear();
  }

  void push(const std::vector<double>& w, int pivot_pos) {
    Eta eta;
    eta.pivot_pos = pivot_pos;
    eta.pivot_value = w[pivot_pos];
    for (int i = 0; i < static_cast<int>(w.size()); ++i)
      if (i != pivot_pos && w[i] != 0.0) eta.entries.push_back({i, w[i]});
    etas.push_back(std::move(eta));
  }

  std::vector<double> ftran(const std::vector<std::vector<Entry>>& cols,
                            const std::vector<int>& base_basic,
                            const std::vector<double>& a) const {
    auto z = base.ftran(cols, base_basic, a);
    for (const auto& eta : etas) {
      const double zp = z[eta.pivot_pos] / eta.pivot_value;
      z[eta.pivot_pos] = zp;
      if (zp == 0.0) continue;
      for (const auto& [i, wi] : eta.entries) z[i] -= wi * zp;
    }
    return z;
  }

  std::vector<double> btran(const std::vector<std::vector<Entry>>& cols,
                            const std::vector<double>& cost,
                            const std::vector<int>& base_basic,
                            const std::vector<int>& basic_of_row) const {
    // c_B in position space, reduced through the eta chain in reverse.
    std::vector<double> u(basic_of_row.size());
    for (std::size_t p = 0; p < basic_of_row.size(); ++p)
      u[p] = cost[basic_of_row[p]];
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double dot = 0.0;
      for (const auto& [i, wi] : it->entries) dot += wi * u[i];
      u[it->pivot_pos] = (u[it->pivot_pos] - dot) / it->pivot_value;
    }
    return base.btran_vec(cols, base_basic, u);
  }
};

BoundedSimplex::Result BoundedSimplex::solve(std::vector<VarState> state,
                                             std::vector<int> basic_of_row,
                                             const Config& config) {
  const int max_iters = config.max_iterations > 0
                            ? config.max_iterations
                            : 200 * (num_rows_ + 1) + 20 * num_vars_ + 5000;
  const int bland_after = config.bland_after_degenerate > 0
                              ? config.bland_after_degenerate
                              : 5 * (num_rows_ + num_vars_);

  std::vector<double> val(num_vars_, 0.0);
  for (int p = 0; p < num_vars_; ++p)
    val[p] = (state[p] == kAtUpper) ? upper_[p] : lower_[p];

  // Pricing normalizes reduced costs by the column 2-norm; raw Dantzig is
  // biased toward wide structural columns on coverage LPs and wanders their
  // degenerate plateaus.
  std::vector<double> col_norm(num_vars_, 1.0);
  for (int p = 0; p < num_vars_; ++p) {
    double acc = 0.0;
    for (const auto& e : cols_[p]) acc += e.value * e.value;
    col_norm[p] = std::sqrt(std::max(1.0, acc));
  }

  Factor factor;
  std::vector<int> base_basic = basic_of_row;  // basis at last refactorization
  factor.refactor(cols_, base_basic, num_rows_);

  // Basic values from scratch: z_B = B^{-1} (b - N z_N).
  const auto revalue = [&] {
    std::vector<double> r = rhs_;
    for (int p = 0; p < num_vars_; ++p) {
      if (state[p] == kBasic || val[p] == 0.0) continue;
      for (const auto& e : cols_[p]) r[e.row] -= e.value * val[p];
    }
    const auto w = factor.ftran(cols_, base_basic, r);
    for (int row = 0; row < num_rows_; ++row) val[basic_of_row[row]] = w[row];
  };
  revalue();

  Result res;
  res.status = Status::IterationLimit;
  int degenerate_run = 0;

  for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
    // Bland's rule while stuck on a degenerate plateau; Dantzig otherwise.
    // Plateaus are left in finitely many steps (no cycling under Bland) and
    // the objective is nondecreasing, so the alternation terminates.
    const bool bland = degenerate_run > bland_after;
    const auto y = factor.btran(cols_, cost_, base_basic, basic_of_row);

    // Pricing. Dantzig on norm-scaled reduced costs, lowest index wins ties;
    // Bland: first eligible index. Eligibility itself uses the raw value.
    int entering = -1;
    double best = 0.0;
    for (int p = 0; p < num_vars_; ++p) {
      if (state[p] == kBasic || upper_[p] - lower_[p] <= 0.0) continue;
      double d = cost_[p];
      for (const auto& e : cols_[p]) d -= e.value * y[e.row];
      const bool eligible = (state[p] == kAtLower) ? d > config.tol_dual
                                                   : d < -config.tol_dual;
      if (!eligible) continue;
      if (bland) {
        entering = p;
        break;
      }
      const double score = std::abs(d) / col_norm[p];
      if (score > best) {
        best = score;
        entering = p;
      }
    }
    if (entering == -1) {
      res.status = Status::Optimal;
      break;
    }

    const double sigma = (state[entering] == kAtLower) ? 1.0 : -1.0;
    std::vector<double> a(num_rows_, 0.0);
    for (const auto& e : cols_[entering]) a[e.row] = e.value;
    const auto w = factor.ftran(cols_, base_basic, a);

    // Ratio test over the three limits: entering bound flip, basic variable
    // hitting its lower bound, basic variable hitting its upper bound.
    double limit = upper_[entering] - lower_[entering];
    int leave_row = -1;
    double leave_pivot = 0.0;
    for (int row = 0; row < num_rows_; ++row) {
      const double wr = w[row];
      if (std::abs(wr) <= config.tol_pivot) continue;
      const int bv = basic_of_row[row];
      const double rate = sigma * wr;
      double room = (rate > 0.0) ? val[bv] - lower_[bv] : upper_[bv] - val[bv];
      if (room < 0.0) room = 0.0;  // numerical dip below a bound
      const double delta = room / std::abs(rate);
      const bool better =
          delta < limit - 1e-12 ||
          (delta < limit + 1e-12 && leave_row != -1 &&
           (bland ? bv < basic_of_row[leave_row]
                  : std::abs(wr) > std::abs(leave_pivot) + 1e-15));
      if (leave_row == -1 ? delta < limit - 1e-12 : better) {
        limit = delta;
        leave_row = row;
        leave_pivot = wr;
      }
    }
    if (limit == kInfinity)
      throw std::runtime_error("simplex: unbounded direction in bounded problem");

    if (limit <= 1e-12)
      ++degenerate_run;
    else
      degenerate_run = 0;

    // Apply the step.
    for (int row = 0; row < num_rows_; ++row) {
      const double wr = w[row];
      if (wr != 0.0) val[basic_of_row[row]] -= sigma * limit * wr;
    }
    if (leave_row == -1) {
      // bound flip
      state[entering] = (state[entering] == kAtLower) ? kAtUpper : kAtLower;
      val[entering] = (state[entering] == kAtUpper) ? upper_[entering]
                                                    : lower_[entering];
      continue;
    }
    const int leaving = basic_of_row[leave_row];
    const bool to_lower = sigma * leave_pivot > 0.0;
    state[leaving] = to_lower ? kAtLower : kAtUpper;
    val[leaving] = to_lower ? lower_[leaving] : upper_[leaving];
    val[entering] = ((state[entering] == kAtLower) ? lower_[entering]
                                                   : upper_[entering]) +
                    sigma * limit;
    state[entering] = kBasic;
    basic_of_row[leave_row] = entering;

    // Refactorize on schedule, and eagerly when the update pivot is small
    // enough to degrade the product-form chain.
    if (static_cast<int>(factor.etas.size()) + 1 >= config.revalue_period ||
        std::abs(w[leave_row]) < 1e-7) {
      base_basic = basic_of_row;
      factor.refactor(cols_, base_basic, num_rows_);
      revalue();
    } else {
      factor.push(w, leave_row);
    }
  }
  revalue();
  res.values = std::move(val);
  res.row_duals = factor.btran(cols_, cost_, base_basic, basic_of_row);
  res.reduced_costs.assign(num_vars_, 0.0);
  for (int p = 0; p < num_vars_; ++p) {
    double d = cost_[p];
    for (const auto& e : cols_[p]) d -= e.value * res.row_duals[e.row];
    res.reduced_costs[p] = (state[p] == kBasic) ? 0.0 : d;
  }
  res.objective = 0.0;
  for (int p = 0; p < num_vars_; ++p) res.objective += cost_[p] * res.values[p];
  res.state = std::move(state);
  res.basic_of_row = std::move(basic_of_row);
  return res;
}

void BoundedSimplex::set_cost(std::vector<double> cost) {
  if (static_cast<int>(cost.size()) != num_vars_)
    throw std::invalid_argument("cost size mismatch");
  cost_ = std::move(cost);
}

}  // namespace influence
