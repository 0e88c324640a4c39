#include "influence/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "influence/rng.hpp"

namespace influence {

namespace {

struct Layout {
  std::vector<std::vector<int>> sender_groups;
  std::vector<std::vector<int>> receiver_groups;  // [0] = G_0
  std::vector<int> influencers;
  int num_senders = 0;
  int num_receivers = 0;
};

// Senders laid out group by group with the influencer first; receivers as
// G_1..G_k blocks followed by G_0 at the end.
Layout make_layout(int k, const std::vector<int>& group_sizes,
                   const std::vector<int>& subordinate_counts, int g0_size) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (static_cast<int>(group_sizes.size()) != k ||
      static_cast<int>(subordinate_counts.size()) != k)
    throw std::invalid_argument("group_sizes / subordinate_counts must have length k");
  for (int l = 0; l < k; ++l) {
    if (group_sizes[l] < 1)
      throw std::invalid_argument("group size n_" + std::to_string(l + 1) + " must be >= 1");
    if (subordinate_counts[l] < 0)
      throw std::invalid_argument("subordinate count must be >= 0");
  }
  if (g0_size < 0) throw std::invalid_argument("g0 size must be >= 0");

  Layout lay;
  lay.sender_groups.resize(k);
  lay.receiver_groups.resize(k + 1);
  int sender = 0;
  for (int l = 0; l < k; ++l) {
    lay.influencers.push_back(sender);
    for (int s = 0; s <= subordinate_counts[l]; ++s)
      lay.sender_groups[l].push_back(sender++);
  }
  int receiver = 0;
  for (int l = 1; l <= k; ++l)
    for (int j = 0; j < group_sizes[l - 1]; ++j)
      lay.receiver_groups[l].push_back(receiver++);
  for (int j = 0; j < g0_size; ++j) lay.receiver_groups[0].push_back(receiver++);
  lay.num_senders = sender;
  lay.num_receivers = receiver;
  return lay;
}

PlantedInstance finish(Layout lay, std::vector<Arc> arcs) {
  const int k = static_cast<int>(lay.sender_groups.size());
  PlantedInstance inst{
      BipartiteGraph(lay.num_senders, lay.num_receivers, std::move(arcs)),
      k, {}, {}, {}};
  inst.k = k;
  inst.sender_groups = std::move(lay.sender_groups);
  inst.receiver_groups = std::move(lay.receiver_groups);
  inst.influencers = std::move(lay.influencers);
  inst.validate();
  return inst;
}

}  // namespace

PlantedInstance gen_noiseless(int k, const std::vector<int>& group_sizes,
                              const std::vector<int>& subordinate_counts,
                              std::uint64_t seed) {
  Layout lay = make_layout(k, group_sizes, subordinate_counts, 0);
  Rng rng = Rng::child(seed, 0x6e6f6973);
  std::vector<Arc> arcs;
  for (int l = 1; l <= k; ++l) {
    const auto& senders = lay.sender_groups[l - 1];
    const auto& receivers = lay.receiver_groups[l];
    const int n_l = static_cast<int>(receivers.size());
    for (int j : receivers) arcs.emplace_back(senders[0], j);  // A1
    for (std::size_t s = 1; s < senders.size(); ++s) {
      // A3: proper subset, size uniform on [0, n_l - 1].
      const int size = rng.below_int(n_l);
      for (int idx : rng.sample_without_replacement(n_l, size))
        arcs.emplace_back(senders[s], receivers[idx]);
    }
  }
  return finish(std::move(lay), std::move(arcs));
}

PlantedInstance gen_deterministic_noisy(int k, const std::vector<int>& group_sizes,
                                        const std::vector<int>& subordinate_counts,
                                        int g0_size,
                                        const std::vector<double>& theta_targets,
                                        const std::vector<double>& beta_targets,
                                        const std::vector<int>& z_caps,
                                        std::uint64_t seed) {
  Layout lay = make_layout(k, group_sizes, subordinate_counts, g0_size);
  if (static_cast<int>(theta_targets.size()) != k ||
      static_cast<int>(beta_targets.size()) != k ||
      static_cast<int>(z_caps.size()) != k)
    throw std::invalid_argument("theta/beta/z_cap vectors must have length k");

  std::vector<int> h_sizes(k);
  std::vector<int> h_arcs_per_sub(k);
  for (int l = 0; l < k; ++l) {
    const double theta = theta_targets[l];
    const double beta = beta_targets[l];
    if (theta <= 0.0 || theta > 1.0)
      throw std::invalid_argument("theta target must lie in (0, 1]");
    if (beta <= 0.0 || beta >= 1.0)
      throw std::invalid_argument("beta target must lie in (0, 1)");
    if (z_caps[l] < 0) throw std::invalid_argument("z cap must be >= 0");
    // theta_l n_l rounded down, theta re-derived from the integral size.
    h_sizes[l] = static_cast<int>(std::floor(theta * group_sizes[l] + 1e-12));
    if (h_sizes[l] < 1)
      throw std::invalid_argument("theta target too small: H_" + std::to_string(l + 1) +
                                  " would be empty");
    h_arcs_per_sub[l] = static_cast<int>(std::floor(beta * h_sizes[l] + 1e-12));
    if (k == 1 && h_sizes[l] < group_sizes[l])
      throw std::invalid_argument(
          "theta < 1 cannot be realized with k = 1: no out-of-group sender exists");
    if (h_sizes[l] < group_sizes[l]) {
      int outside_subs = 0;
      for (int l2 = 0; l2 < k; ++l2)
        if (l2 != l) outside_subs += subordinate_counts[l2];
      if (outside_subs == 0)
        throw std::invalid_argument(
            "theta < 1 requires at least one subordinate outside group " +
            std::to_string(l + 1));
    }
  }

  Rng rng = Rng::child(seed, 0x6e7379);
  std::vector<Arc> arcs;

  // Designated H_l: random subset of each block. Receivers of G_l \ H_l take
  // arcs from every out-of-group subordinate, so the realized maximal H_l
  // equals the designated one.
  std::vector<std::vector<int>> h_members(k), rest_members(k);
  for (int l = 0; l < k; ++l) {
    const auto& block = lay.receiver_groups[l + 1];
    const int n_l = static_cast<int>(block.size());
    std::vector<char> in_h(n_l, 0);
    for (int idx : rng.sample_without_replacement(n_l, h_sizes[l])) in_h[idx] = 1;
    for (int idx = 0; idx < n_l; ++idx)
      (in_h[idx] ? h_members[l] : rest_members[l]).push_back(block[idx]);
  }

  for (int l = 0; l < k; ++l) {
    const auto& senders = lay.sender_groups[l];
    for (int j : lay.receiver_groups[l + 1]) arcs.emplace_back(senders[0], j);  // A1'

    for (std::size_t s = 1; s < senders.size(); ++s) {
      const int sub = senders[s];
      // A3': capped random coverage of the designated H_l.
      for (int idx : rng.sample_without_replacement(h_sizes[l], h_arcs_per_sub[l]))
        arcs.emplace_back(sub, h_members[l][idx]);
      // Arcs outside the capped categories are taken in full.
      for (int j : rest_members[l]) arcs.emplace_back(sub, j);
      for (int l2 = 0; l2 < k; ++l2)
        if (l2 != l)
          for (int j : rest_members[l2]) arcs.emplace_back(sub, j);
      // Up to z_cap arcs into G_0.
      const int z = std::min(z_caps[l], g0_size);
      for (int idx : rng.sample_without_replacement(g0_size, z))
        arcs.emplace_back(sub, lay.receiver_groups[0][idx]);
    }
  }
  return finish(std::move(lay), std::move(arcs));
}

PlantedInstance gen_random_planted(const RandomPlantedSpec& spec) {
  Layout lay = make_layout(spec.k, spec.group_sizes, spec.subordinate_counts,
                           spec.g0_size);
  if (spec.q < 0.0 || spec.s < 0.0)
    throw std::invalid_argument("q and s must be nonnegative");

  const int r = std::accumulate(spec.subordinate_counts.begin(),
                                spec.subordinate_counts.end(), 0) +
                spec.k;
  int r_min = 0;
  {
    auto it = std::min_element(spec.subordinate_counts.begin(),
                               spec.subordinate_counts.end());
    r_min = (it == spec.subordinate_counts.end()) ? 0 : *it;
  }

  const double p_cross = spec.q / r;
  const double p_g0 = (r > 0) ? spec.s * r_min / r : 0.0;
  if (p_cross > 1.0)
    throw std::invalid_argument("rule 3 probability q/r exceeds 1");
  if (p_g0 > 1.0)
    throw std::invalid_argument("rule 4 probability s*r_min/r exceeds 1");
  for (int l = 0; l < spec.k; ++l) {
    if (spec.subordinate_counts[l] > 0 &&
        spec.s * r_min / spec.subordinate_counts[l] > 1.0)
      throw std::invalid_argument("rule 2 probability s*r_min/r_l exceeds 1 for group " +
                                  std::to_string(l + 1));
  }

  Rng rng = Rng::child(spec.seed, 0x72616e64);
  const auto sgroup_of = [&] {
    std::vector<int> ids(lay.num_senders, 0);
    for (int l = 0; l < spec.k; ++l)
      for (int i : lay.sender_groups[l]) ids[i] = l + 1;
    return ids;
  }();
  std::vector<char> is_influencer(lay.num_senders, 0);
  for (int i : lay.influencers) is_influencer[i] = 1;

  std::vector<Arc> arcs;
  for (int l = 1; l <= spec.k; ++l) {
    const double p_sub = (spec.subordinate_counts[l - 1] > 0)
                             ? spec.s * r_min / spec.subordinate_counts[l - 1]
                             : 0.0;
    for (int j : lay.receiver_groups[l]) {
      arcs.emplace_back(lay.influencers[l - 1], j);  // rule 1
      for (int i = 0; i < lay.num_senders; ++i) {
        if (i == lay.influencers[l - 1]) continue;
        if (sgroup_of[i] == l) {
          if (rng.bernoulli(p_sub)) arcs.emplace_back(i, j);  // rule 2
        } else {
          if (rng.bernoulli(p_cross)) arcs.emplace_back(i, j);  // rule 3
        }
      }
    }
  }
  // Rule 4: G_0 receivers draw from subordinates only (influencer arcs into
  // G_0 would contradict A1').
  for (int j : lay.receiver_groups[0])
    for (int i = 0; i < lay.num_senders; ++i)
      if (!is_influencer[i] && rng.bernoulli(p_g0)) arcs.emplace_back(i, j);

  return finish(std::move(lay), std::move(arcs));
}

ForestFireResult gen_forest_fire(const ForestFireSpec& spec) {
  if (spec.k <= 0) throw std::invalid_argument("k must be positive");
  if (!(spec.p1 > 0.0 && spec.p1 < 1.0))
    throw std::invalid_argument("p1 must lie in (0,1)");
  if (!(spec.p2 > 0.0 && spec.p2 < 1.0))
    throw std::invalid_argument("p2 must lie in (0,1)");
  if (spec.sigma_pct < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (spec.sender_cap < spec.k || spec.receiver_cap < spec.k)
    throw std::invalid_argument("caps must be at least k");

  Rng rng = Rng::child(spec.seed, 0x66697265);

  // Growing adjacency; converted to BipartiteGraph at the end.
  std::vector<std::vector<int>> out_of(spec.sender_cap);   // sender -> receivers
  std::vector<std::vector<int>> in_of(spec.receiver_cap);  // receiver -> senders
  std::int64_t arc_count = 0;
  const auto add_arc = [&](int i, int j) {
    out_of[i].push_back(j);
    in_of[j].push_back(i);
    ++arc_count;
  };
  const auto has = [&](const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  int num_senders = spec.k;
  int num_receivers = spec.k;
  for (int l = 0; l < spec.k; ++l) add_arc(l, l);  // influencer l paired with receiver l

  // Uniform pick from v excluding the node under construction; -1 when no
  // usable neighbour remains.
  const auto pick_other = [&](const std::vector<int>& v, int self, Rng& r) {
    const int n = static_cast<int>(v.size());
    int idx = r.below_int(n);
    if (v[idx] != self) return v[idx];
    if (n == 1) return -1;
    idx = r.below_int(n - 1);  // re-draw among the others
    int seen = 0;
    for (int x : v) {
      if (x == self) continue;
      if (seen++ == idx) return x;
    }
    return -1;
  };

  // Burn chain for a new receiver j: hop receiver -> sender -> receiver -> ...
  // adding an arc from each visited sender. Duplicate arcs are skipped but the
  // chain continues; a hop with no usable neighbour terminates it. Chain
  // length is capped at the current node count as a safety bound.
  const auto grow_receiver = [&](int j) {
    const int cap = num_senders + num_receivers;
    const int j_cur = rng.below_int(j);  // existing receivers are 0..j-1
    int i_cur = in_of[j_cur][rng.below_int(static_cast<int>(in_of[j_cur].size()))];
    add_arc(i_cur, j);  // first arc, never a duplicate: j is new
    for (int step = 0; step < cap && rng.bernoulli(spec.p2); ++step) {
      const int pick = pick_other(out_of[i_cur], j, rng);
      if (pick < 0) break;
      const auto& senders = in_of[pick];
      const int i_next = senders[rng.below_int(static_cast<int>(senders.size()))];
      if (!has(in_of[j], i_next)) add_arc(i_next, j);
      i_cur = i_next;
    }
  };

  // Mirror image for a new subordinate i: hop sender -> receiver -> sender.
  const auto grow_subordinate = [&](int i) {
    const int cap = num_senders + num_receivers;
    const int i_cur0 = rng.below_int(i);  // existing senders are 0..i-1
    int j_cur = out_of[i_cur0][rng.below_int(static_cast<int>(out_of[i_cur0].size()))];
    add_arc(i, j_cur);
    for (int step = 0; step < cap && rng.bernoulli(spec.p2); ++step) {
      const int pick = pick_other(in_of[j_cur], i, rng);
      if (pick < 0) break;
      const auto& receivers = out_of[pick];
      const int j_next = receivers[rng.below_int(static_cast<int>(receivers.size()))];
      if (!has(out_of[i], j_next)) add_arc(i, j_next);
      j_cur = j_next;
    }
  };

  while (num_senders < spec.sender_cap || num_receivers < spec.receiver_cap) {
    bool add_receiver;
    if (num_senders >= spec.sender_cap)
      add_receiver = true;
    else if (num_receivers >= spec.receiver_cap)
      add_receiver = false;
    else
      add_receiver = rng.bernoulli(spec.p1);
    if (add_receiver) {
      const int j = num_receivers++;
      grow_receiver(j);
    } else {
      const int i = num_senders++;
      grow_subordinate(i);
    }
  }

  // Tweak: any receiver not adjacent to an influencer attaches to a uniformly
  // random one, so the k influencers stay most influential.
  for (int j = 0; j < num_receivers; ++j) {
    bool covered = false;
    for (int i : in_of[j])
      if (i < spec.k) {
        covered = true;
        break;
      }
    if (!covered) add_arc(rng.below_int(spec.k), j);
  }
  const std::int64_t arcs_before_noise = arc_count;

  // sigma% of the complement, drawn uniformly without replacement by
  // rejection against the current arc set; the complement is never built.
  const std::int64_t complement =
      static_cast<std::int64_t>(num_senders) * num_receivers - arcs_before_noise;
  const std::int64_t noise_target = static_cast<std::int64_t>(
      std::floor(spec.sigma_pct / 100.0 * static_cast<double>(complement)));
  std::set<Arc> noise;
  while (static_cast<std::int64_t>(noise.size()) < noise_target) {
    const int i = rng.below_int(num_senders);
    const int j = rng.below_int(num_receivers);
    if (has(out_of[i], j)) continue;
    noise.emplace(i, j);
  }
  for (const auto& [i, j] : noise) add_arc(i, j);

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(arc_count));
  for (int i = 0; i < num_senders; ++i)
    for (int j : out_of[i]) arcs.emplace_back(i, j);

  // Group labels are for reporting only: each receiver belongs to the first
  // influencer it is adjacent to. G_0 stays empty; solvers never read this.
  Layout lay;
  lay.num_senders = num_senders;
  lay.num_receivers = num_receivers;
  lay.sender_groups.resize(spec.k);
  lay.receiver_groups.resize(spec.k + 1);
  for (int l = 0; l < spec.k; ++l) {
    lay.influencers.push_back(l);
    lay.sender_groups[l].push_back(l);
  }
  for (int i = spec.k; i < num_senders; ++i)
    lay.sender_groups[i % spec.k].push_back(i);
  for (int j = 0; j < num_receivers; ++j) {
    int group = -1;
    for (int i : in_of[j])
      if (i < spec.k && (group == -1 || i < group)) group = i;
    lay.receiver_groups[group + 1].push_back(j);
  }

  ForestFireResult result{finish(std::move(lay), std::move(arcs)),
                          arcs_before_noise,
                          static_cast<std::int64_t>(noise.size())};
  return result;
}

DeterministicRecoveryReport check_deterministic_recovery(const PlantedInstance& inst) {
  const int k = inst.k;
  const auto rgroup = inst.receiver_group_ids();
  const auto sgroup = inst.sender_group_ids();

  DeterministicRecoveryReport rep;
  rep.a1_prime_ok = satisfies_a1_prime(inst);
  rep.h_sizes.assign(k, 0);
  rep.theta.assign(k, 0.0);
  rep.beta_max.assign(k, 0.0);

  // Maximal H_l: receivers of G_l whose senders all lie in L_l.
  std::vector<char> in_h(inst.graph.num_receivers(), 0);
  for (int l = 1; l <= k; ++l) {
    for (int j : inst.receiver_groups[l]) {
      bool pure = true;
      for (int i : inst.graph.senders_of(j))
        if (sgroup[i] != l) {
          pure = false;
          break;
        }
      if (pure) {
        in_h[j] = 1;
        ++rep.h_sizes[l - 1];
      }
    }
    rep.theta[l - 1] =
        static_cast<double>(rep.h_sizes[l - 1]) / inst.receiver_groups[l].size();
  }

  rep.n_min = 0;
  for (int l = 1; l <= k; ++l) {
    const int n_l = static_cast<int>(inst.receiver_groups[l].size());
    rep.n_min = (l == 1) ? n_l : std::min(rep.n_min, n_l);
  }

  const double theta_min = *std::min_element(rep.theta.begin(), rep.theta.end());
  const double theta_max = *std::max_element(rep.theta.begin(), rep.theta.end());
  rep.rho_defined = theta_min > 0.0;
  rep.rho = rep.rho_defined ? theta_min / theta_max : 0.0;

  bool cond_beta = rep.rho_defined;
  bool cond_z = true;
  for (int l = 1; l <= k; ++l) {
    const auto& senders = inst.sender_groups[l - 1];
    for (std::size_t s = 1; s < senders.size(); ++s) {
      const int sub = senders[s];
      int h_cov = 0, z_i = 0;
      for (int j : inst.graph.receivers_of(sub)) {
        if (in_h[j] && rgroup[j] == l) ++h_cov;
        if (rgroup[j] == 0) ++z_i;
      }
      const double beta = rep.h_sizes[l - 1] > 0
                              ? static_cast<double>(h_cov) / rep.h_sizes[l - 1]
                              : 1.0;
      rep.beta_max[l - 1] = std::max(rep.beta_max[l - 1], beta);
      rep.z.push_back(z_i);
      if (!(beta < rep.rho / 2.0)) cond_beta = false;            // (3), strict
      if (!(z_i <= rep.n_min * rep.theta[l - 1] * rep.rho / 2.0))  // (4)
        cond_z = false;
    }
  }
  rep.cond_beta = cond_beta && rep.rho_defined;
  rep.cond_z = cond_z && rep.rho_defined;
  rep.pass = rep.a1_prime_ok && rep.cond_beta && rep.cond_z;
  return rep;
}

CascadeRecoveryReport check_cascade_recovery(const PlantedInstance& inst, double p, double xi_round) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("p must lie in (0,1)");
  if (!(xi_round >= 0.0 && xi_round < 1.0 / (2.0 * inst.k + 1.0)))
    throw std::invalid_argument("xi_round must lie in [0, 1/(2k+1))");

  const int k = inst.k;
  const auto rgroup = inst.receiver_group_ids();
  const auto sgroup = inst.sender_group_ids();

  CascadeRecoveryReport rep;
  rep.xi_round = xi_round;
  rep.n_hat.assign(k, 0);
  rep.alpha.assign(k, 0);
  rep.gamma.assign(k, 0);

  bool premise = satisfies_a1_prime(inst);
  for (int l = 1; l <= k; ++l) {
    for (int j : inst.receiver_groups[l]) {
      bool pure = true;
      for (int i : inst.graph.senders_of(j))
        if (sgroup[i] != l) {
          pure = false;
          break;
        }
      if (pure) ++rep.n_hat[l - 1];
    }
    const auto& senders = inst.sender_groups[l - 1];
    for (std::size_t s = 1; s < senders.size(); ++s) {
      int in_group = 0, out_group = 0;
      for (int j : inst.graph.receivers_of(senders[s]))
        (rgroup[j] == l ? in_group : out_group)++;
      rep.alpha[l - 1] = std::max(rep.alpha[l - 1], in_group);
      rep.gamma[l - 1] = std::max(rep.gamma[l - 1], out_group);
    }
    if (rep.alpha[l - 1] >= static_cast<int>(inst.receiver_groups[l].size()))
      premise = false;  // needs alpha_l < n_l
  }
  rep.premise_ok = premise;

  const double one_minus_p = 1.0 - p;
  double min_nhat = rep.n_hat[0];
  double max_mix = 0.0;
  bool swap_ok = true;
  for (int l = 0; l < k; ++l) {
    min_nhat = std::min(min_nhat, static_cast<double>(rep.n_hat[l]));
    max_mix = std::max(max_mix, rep.alpha[l] + rep.gamma[l] / one_minus_p);
    const double n_l = static_cast<double>(inst.receiver_groups[l + 1].size());
    if (!(n_l - rep.alpha[l] >
          std::pow(one_minus_p, -static_cast<double>(k)) * rep.gamma[l]))
      swap_ok = false;  // strict
  }
  rep.cond_min_nhat =
      min_nhat >= std::pow(one_minus_p, 0.5 + xi_round / 2.0) * max_mix;
  rep.cond_swap = swap_ok;
  rep.pass = rep.premise_ok && rep.cond_min_nhat && rep.cond_swap;
  return rep;
}

}  // namespace influence
