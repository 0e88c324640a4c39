#include "influence/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "influence/rng.hpp"

namespace influence {

namespace {

std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > 4.0 * static_cast<double>(cap)) return 4 * cap;  // clamp, enough to refuse
  }
  return static_cast<std::int64_t>(std::llround(acc));
}

// Depth-first k-subset enumeration in lexicographic order with add/remove
// hooks; the first maximum found is the lexicographically smallest.
template <typename Add, typename Remove, typename Leaf>
void enumerate_subsets(int m, int k, Add&& add, Remove&& remove, Leaf&& leaf) {
  std::vector<int> chosen;
  chosen.reserve(k);
  const auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(chosen.size()) == k) {
      leaf(chosen);
      return;
    }
    const int needed = k - static_cast<int>(chosen.size());
    for (int i = start; i <= m - needed; ++i) {
      add(i);
      chosen.push_back(i);
      self(self, i + 1);
      chosen.pop_back();
      remove(i);
    }
  };
  rec(rec, 0);
}

void record_candidate(OracleResult& res, const std::vector<int>& set, double value) {
  if (res.ties.empty() || value > res.best_value) {
    res.best_value = value;
    res.best_set = set;
    res.ties.clear();
    res.ties.push_back(set);
  } else if (value == res.best_value) {
    res.ties.push_back(set);
  }
}

}  // namespace

OracleResult brute_force_deterministic(const BipartiteGraph& g, int k,
                                       std::int64_t cap) {
  if (k < 0 || k > g.num_senders())
    throw std::invalid_argument("k out of range");
  const std::int64_t count = binomial_capped(g.num_senders(), k, cap);
  if (count > cap) throw EnumerationCapError(count, cap);

  OracleResult res;
  std::vector<int> cover(g.num_receivers(), 0);
  int covered = 0;
  enumerate_subsets(
      g.num_senders(), k,
      [&](int i) {
        for (int j : g.receivers_of(i))
          if (cover[j]++ == 0) ++covered;
      },
      [&](int i) {
        for (int j : g.receivers_of(i))
          if (--cover[j] == 0) --covered;
      },
      [&](const std::vector<int>& set) {
        ++res.num_evaluated;
        record_candidate(res, set, static_cast<double>(covered));
      });
  return res;
}

OracleResult brute_force_cascade(const CascadeProblem& prob, std::int64_t cap) {
  const BipartiteGraph& g = prob.graph();
  const int k = prob.k();
  const std::int64_t count = binomial_capped(g.num_senders(), k, cap);
  if (count > cap) throw EnumerationCapError(count, cap);

  // log-failure mass per receiver, updated incrementally; the spread is
  // recomputed at each leaf for accuracy.
  std::vector<double> logq_by_sender(g.num_arcs());
  {
    const auto q = prob.q_sender_major();
    for (std::int64_t a = 0; a < g.num_arcs(); ++a)
      logq_by_sender[a] = std::log(q[a]);
  }
  std::vector<int> arc_base(g.num_senders() + 1, 0);
  for (int i = 0; i < g.num_senders(); ++i)
    arc_base[i + 1] = arc_base[i] + g.outdegree(i);

  OracleResult res;
  std::vector<double> logmass(g.num_receivers(), 0.0);
  enumerate_subsets(
      g.num_senders(), k,
      [&](int i) {
        const auto nbrs = g.receivers_of(i);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
          logmass[nbrs[a]] += logq_by_sender[arc_base[i] + a];
      },
      [&](int i) {
        const auto nbrs = g.receivers_of(i);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
          logmass[nbrs[a]] -= logq_by_sender[arc_base[i] + a];
      },
      [&](const std::vector<int>& set) {
        ++res.num_evaluated;
        double spread = 0.0;
        for (double v : logmass) spread -= std::expm1(v);
        record_candidate(res, set, spread);
      });
  return res;
}

namespace {

struct LazyEntry {
  double gain;
  int sender;
  int round;
};

struct LazyCompare {
  bool operator()(const LazyEntry& a, const LazyEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;  // max-heap on gain
    return a.sender > b.sender;                    // lowest index wins ties
  }
};

}  // namespace

std::vector<int> greedy_deterministic(const BipartiteGraph& g, int k) {
  if (k < 0 || k > g.num_senders())
    throw std::invalid_argument("k out of range");
  std::priority_queue<LazyEntry, std::vector<LazyEntry>, LazyCompare> heap;
  for (int i = 0; i < g.num_senders(); ++i)
    heap.push({static_cast<double>(g.outdegree(i)), i, 0});

  std::vector<char> covered(g.num_receivers(), 0);
  std::vector<int> picks;
  for (int round = 1; round <= k; ++round) {
    for (;;) {
      LazyEntry top = heap.top();
      heap.pop();
      if (top.round == round) {
        for (int j : g.receivers_of(top.sender)) covered[j] = 1;
        picks.push_back(top.sender);
        break;
      }
      int gain = 0;
      for (int j : g.receivers_of(top.sender)) gain += !covered[j];
      heap.push({static_cast<double>(gain), top.sender, round});
    }
  }
  return picks;
}

std::vector<int> greedy_cascade(const CascadeProblem& prob) {
  const BipartiteGraph& g = prob.graph();
  const auto q = prob.q_sender_major();
  std::vector<int> arc_base(g.num_senders() + 1, 0);
  for (int i = 0; i < g.num_senders(); ++i)
    arc_base[i + 1] = arc_base[i] + g.outdegree(i);

  std::vector<double> mass(g.num_receivers(), 1.0);  // current failure product
  const auto marginal = [&](int i) {
    const auto nbrs = g.receivers_of(i);
    double gain = 0.0;
    for (std::size_t a = 0; a < nbrs.size(); ++a)
      gain += mass[nbrs[a]] * (1.0 - q[arc_base[i] + a]);
    return gain;
  };

  std::priority_queue<LazyEntry, std::vector<LazyEntry>, LazyCompare> heap;
  for (int i = 0; i < g.num_senders(); ++i) heap.push({marginal(i), i, 1});

  std::vector<int> picks;
  for (int round = 1; round <= prob.k(); ++round) {
    for (;;) {
      LazyEntry top = heap.top();
      heap.pop();
      if (top.round == round) {
        const auto nbrs = g.receivers_of(top.sender);
        for (std::size_t a = 0; a < nbrs.size(); ++a)
          mass[nbrs[a]] *= q[arc_base[top.sender] + a];
        picks.push_back(top.sender);
        break;
      }
      heap.push({marginal(top.sender), top.sender, round});
    }
  }
  return picks;
}

SpreadEstimate monte_carlo_spread(const CascadeProblem& prob,
                                  std::span<const int> senders,
                                  std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const BipartiteGraph& g = prob.graph();
  const auto q = prob.q_sender_major();
  std::vector<int> arc_base(g.num_senders() + 1, 0);
  for (int i = 0; i < g.num_senders(); ++i)
    arc_base[i + 1] = arc_base[i] + g.outdegree(i);

  Rng rng = Rng::child(seed, 0x6d63);
  std::vector<std::int64_t> stamp(g.num_receivers(), -1);
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    int reached = 0;
    for (int i : senders) {
      const auto nbrs = g.receivers_of(i);
      for (std::size_t a = 0; a < nbrs.size(); ++a) {
        if (stamp[nbrs[a]] == t) continue;
        if (rng.bernoulli(1.0 - q[arc_base[i] + a])) {
          stamp[nbrs[a]] = t;
          ++reached;
        }
      }
    }
    sum += reached;
    sum_sq += static_cast<double>(reached) * reached;
  }
  SpreadEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
    est.std_error = std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

}  // namespace influence
