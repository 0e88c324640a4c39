#pragma once

#include <vector>

#include "influence/generators.hpp"
#include "influence/planted.hpp"
#include "influence/rng.hpp"

#include <limits>

namespace testsupport {

// The two hand-sized counterexample instances used throughout: two groups,
// one subordinate each, senders laid out [infl1, sub1, infl2, sub2] and
// receivers as G_1 then G_2. Subordinate l covers the first cover_l
// receivers of its group.
inline influence::PlantedInstance two_group_instance(int n1, int n2, int cover1,
                                                     int cover2) {
  std::vector<influence::Arc> arcs;
  for (int j = 0; j < n1; ++j) arcs.push_back({0, j});
  for (int j = 0; j < cover1; ++j) arcs.push_back({1, j});
  for (int j = 0; j < n2; ++j) arcs.push_back({2, n1 + j});
  for (int j = 0; j < cover2; ++j) arcs.push_back({3, n1 + j});

  influence::PlantedInstance inst{
      influence::BipartiteGraph(4, n1 + n2, std::move(arcs)), 2,
      {{0, 1}, {2, 3}},
      {{}, {}, {}},
      {0, 2}};
  for (int j = 0; j < n1; ++j) inst.receiver_groups[1].push_back(j);
  for (int j = 0; j < n2; ++j) inst.receiver_groups[2].push_back(n1 + j);
  inst.validate();
  return inst;
}

// First counterexample: disparate group sizes, the heavy subordinate beats
// the small group's influencer under the cascade model.
inline influence::PlantedInstance example_one() {
  return two_group_instance(100, 20, 99, 10);
}

// Second counterexample: the integer optimum picks both influencers but the
// relaxation has a strictly better fractional point.
inline influence::PlantedInstance example_two() {
  return two_group_instance(100, 44, 80, 40);
}

// Independent projection oracle: enumerate all 3^m clamp patterns
// (lower / interior / upper), solve the shift exactly for each consistent
// pattern, keep the closest point.
inline std::vector<double> projection_oracle(const std::vector<double>& y, int k) {
  const int m = static_cast<int>(y.size());
  std::vector<int> pattern(m, 0);
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  const auto consider = [&](const std::vector<double>& x) {
    double dist = 0.0;
    for (int i = 0; i < m; ++i) dist += (x[i] - y[i]) * (x[i] - y[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  };
  for (;;) {
    int ones = 0, interior = 0;
    double interior_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      if (pattern[i] == 2) ++ones;
      if (pattern[i] == 1) {
        ++interior;
        interior_sum += y[i];
      }
    }
    if (interior > 0) {
      const double tau = (interior_sum + ones - k) / interior;
      bool ok = true;
      std::vector<double> x(m);
      for (int i = 0; i < m; ++i) {
        const double v = y[i] - tau;
        if (pattern[i] == 0) x[i] = 0.0, ok = ok && v <= 1e-12;
        if (pattern[i] == 1) x[i] = v, ok = ok && v >= -1e-12 && v <= 1 + 1e-12;
        if (pattern[i] == 2) x[i] = 1.0, ok = ok && v >= 1 - 1e-12;
      }
      if (ok) consider(x);
    } else if (ones == k) {
      // pure bound pattern; feasible iff some tau separates the groups
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      std::vector<double> x(m);
      for (int i = 0; i < m; ++i) {
        if (pattern[i] == 0) hi = std::min(hi, y[i]), x[i] = 0.0;
        if (pattern[i] == 2) lo = std::max(lo, y[i] - 1.0), x[i] = 1.0;
      }
      if (lo <= hi + 1e-12) consider(x);
    }
    int pos = 0;
    while (pos < m && pattern[pos] == 2) pattern[pos++] = 0;
    if (pos == m) break;
    ++pattern[pos];
  }
  return best;
}

// Family used for the cascade recovery checks: equal-scale groups, full
// theta, fixed subordinate coverage well below half the group.
inline influence::PlantedInstance cascade_recovery_instance(int k,
                                                            std::uint64_t seed) {
  influence::Rng rng = influence::Rng::child(seed, 0xfa31);
  std::vector<int> n(k), r(k), zc(k, 0);
  std::vector<double> theta(k, 1.0), beta(k, 0.4);
  for (int l = 0; l < k; ++l) {
    n[l] = 15 + rng.below_int(11);  // 15..25
    r[l] = 1 + rng.below_int(3);    // 1..3
  }
  return influence::gen_deterministic_noisy(k, n, r, 0, theta, beta, zc, seed);
}

}  // namespace testsupport
