#include <doctest.h>

#include <cmath>
#include <set>

#include "influence/generators.hpp"
#include "influence/rng.hpp"
#include "support.hpp"

using namespace influence;

TEST_CASE("gen_noiseless satisfies A1-A3 by construction") {
  SUBCASE("single influencer, single receiver") {
    const auto inst = gen_noiseless(1, {1}, {0}, 3);
    CHECK(inst.graph.num_arcs() == 1);
    CHECK(inst.graph.has_arc(0, 0));
    CHECK(satisfies_noiseless_assumptions(inst));
  }
  SUBCASE("two groups with subordinates") {
    const auto inst = gen_noiseless(2, {3, 4}, {1, 1}, 5);
    int influencer_arcs = 0;
    for (int i : inst.influencers) influencer_arcs += inst.graph.outdegree(i);
    CHECK(influencer_arcs == 7);
    CHECK(satisfies_noiseless_assumptions(inst));
  }
  SUBCASE("random shapes always satisfy the predicate") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng = Rng::child(seed, 1);
      const int k = 1 + rng.below_int(4);
      std::vector<int> n(k), r(k);
      for (int l = 0; l < k; ++l) {
        n[l] = 1 + rng.below_int(8);
        r[l] = rng.below_int(4);
      }
      const auto inst = gen_noiseless(k, n, r, seed);
      CHECK(satisfies_noiseless_assumptions(inst));
      int total = 0;
      for (int v : n) total += v;
      CHECK(reachable_count(inst.graph, inst.influencers) == total);
    }
  }
  SUBCASE("empty group is invalid") {
    CHECK_THROWS_AS(gen_noiseless(1, {0}, {0}, 0), std::invalid_argument);
  }
}

TEST_CASE("gen_deterministic_noisy realizes its targets") {
  SUBCASE("theta 1 with no G_0 reduces to a noiseless instance") {
    const auto inst =
        gen_deterministic_noisy(2, {6, 5}, {2, 1}, 0, {1.0, 1.0}, {0.5, 0.5},
                                {0, 0}, 9);
    CHECK(satisfies_noiseless_assumptions(inst));
  }
  SUBCASE("pass instance of the recovery conditions") {
    const auto inst = gen_deterministic_noisy(2, {40, 40}, {3, 2}, 10,
                                              {0.5, 0.5}, {0.2, 0.2}, {4, 4}, 1);
    const auto rep = check_deterministic_recovery(inst);
    CHECK(rep.pass);
    CHECK(rep.theta[0] == doctest::Approx(0.5));
    CHECK(rep.theta[1] == doctest::Approx(0.5));
    CHECK(rep.rho == doctest::Approx(1.0));
    CHECK(rep.beta_max[0] == doctest::Approx(0.2));
    for (int z : rep.z) CHECK(z <= 4);
  }
  SUBCASE("beta 0.6 fails the strict half condition") {
    const auto inst = gen_deterministic_noisy(2, {40, 40}, {3, 2}, 10,
                                              {0.5, 0.5}, {0.6, 0.6}, {4, 4}, 1);
    const auto rep = check_deterministic_recovery(inst);
    CHECK(!rep.cond_beta);
    CHECK(!rep.pass);
  }
  SUBCASE("invalid targets") {
    CHECK_THROWS_AS(gen_deterministic_noisy(2, {10, 10}, {1, 1}, 0, {0.5, 0.5},
                                            {-0.1, 0.5}, {0, 0}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_deterministic_noisy(1, {10}, {1}, 0, {0.5}, {0.2}, {0}, 0),
                    std::invalid_argument);  // theta < 1 impossible at k = 1
  }
}

TEST_CASE("check_deterministic_recovery on hand-built instances") {
  SUBCASE("noiseless: theta 1, rho 1, passes iff coverage below half") {
    // equal groups; every subordinate covers 2 of 6 < 3
    const auto inst = testsupport::two_group_instance(6, 6, 2, 2);
    const auto rep = check_deterministic_recovery(inst);
    CHECK(rep.rho == doctest::Approx(1.0));
    CHECK(rep.theta[0] == doctest::Approx(1.0));
    CHECK(rep.z == std::vector<int>{0, 0});
    CHECK(rep.pass);
  }
  SUBCASE("subordinate covering its whole block fails") {
    const auto inst = testsupport::two_group_instance(6, 6, 6, 2);
    CHECK(!check_deterministic_recovery(inst).pass);  // beta = 1 >= rho/2
  }
  SUBCASE("half coverage fails strictly") {
    const auto inst = testsupport::two_group_instance(6, 6, 3, 2);
    CHECK(!check_deterministic_recovery(inst).pass);  // beta = 1/2, needs < 1/2
  }
}

TEST_CASE("check_deterministic_recovery pass flag is monotone under own-group and G_0 noise") {
  // adding an own-group or G_0 arc to a subordinate can only raise beta or z,
  // never flip fail -> pass (cross-group arcs can, via rho, and are excluded)
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = gen_deterministic_noisy(2, {20, 20}, {2, 2}, 6, {0.5, 0.5},
                                        {0.3, 0.3}, {2, 2}, seed);
    const bool before = check_deterministic_recovery(inst).pass;
    // rebuild with one extra own-group arc from the first subordinate
    auto arcs = inst.graph.arcs();
    const int sub = inst.sender_groups[0][1];
    int added = -1;
    for (int j : inst.receiver_groups[1])
      if (!inst.graph.has_arc(sub, j)) {
        added = j;
        break;
      }
    if (added < 0) continue;
    arcs.push_back({sub, added});
    PlantedInstance noisier{BipartiteGraph(inst.graph.num_senders(),
                                           inst.graph.num_receivers(), arcs),
                            inst.k, inst.sender_groups, inst.receiver_groups,
                            inst.influencers};
    const bool after = check_deterministic_recovery(noisier).pass;
    CHECK(!(before == false && after == true));
  }
}

TEST_CASE("gen_random_planted follows the arc rules") {
  RandomPlantedSpec spec;
  spec.k = 3;
  spec.group_sizes = {20, 20, 20};
  spec.subordinate_counts = {4, 4, 4};
  spec.g0_size = 10;
  spec.q = 0.5;
  spec.s = 0.3;
  spec.seed = 2;

  SUBCASE("same seed, same graph") {
    const auto a = gen_random_planted(spec);
    const auto b = gen_random_planted(spec);
    CHECK(a.graph.arcs() == b.graph.arcs());
  }
  SUBCASE("no G_0 receiver is adjacent to an influencer") {
    const auto inst = gen_random_planted(spec);
    std::set<int> influencers(inst.influencers.begin(), inst.influencers.end());
    for (int j : inst.receiver_groups[0])
      for (int i : inst.graph.senders_of(j)) CHECK(!influencers.count(i));
    CHECK(satisfies_a1_prime(inst));
  }
  SUBCASE("q = 0 removes all cross-group arcs") {
    auto s2 = spec;
    s2.q = 0.0;
    const auto inst = gen_random_planted(s2);
    const auto rgroup = inst.receiver_group_ids();
    const auto sgroup = inst.sender_group_ids();
    for (int l = 1; l <= s2.k; ++l)
      for (int j : inst.receiver_groups[l])
        for (int i : inst.graph.senders_of(j)) CHECK(sgroup[i] == rgroup[j]);
  }
  SUBCASE("invalid rule probabilities are rejected") {
    auto s2 = spec;
    s2.s = 2.0;  // s * r_min / r_l = 2 > 1
    CHECK_THROWS_AS(gen_random_planted(s2), std::invalid_argument);
  }
  SUBCASE("empirical indegree matches the rule probabilities") {
    // mean indegree of an interest-group receiver over 200 instances vs
    // 1 + s*r_min + q*(r - r_l - 1)/r, within three standard errors
    RandomPlantedSpec ms;
    ms.k = 3;
    ms.group_sizes = {60, 60, 60};
    ms.subordinate_counts = {5, 5, 5};
    ms.g0_size = 20;
    ms.q = 0.5;
    ms.s = 0.2;
    const int r = 3 * 5 + 3;
    const double expected = 1.0 + 0.2 * 5 + 0.5 * (r - 5 - 1) / r;
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      ms.seed = seed;
      const auto inst = gen_random_planted(ms);
      for (int l = 1; l <= ms.k; ++l)
        for (int j : inst.receiver_groups[l]) {
          const double d = inst.graph.indegree(j);
          sum += d;
          sum_sq += d * d;
          ++count;
        }
    }
    const double mean = sum / count;
    const double var = (sum_sq - sum * sum / count) / (count - 1);
    const double se = std::sqrt(var / count);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
  }
}

TEST_CASE("gen_forest_fire") {
  ForestFireSpec spec;
  spec.k = 5;
  spec.sender_cap = 30;
  spec.receiver_cap = 120;
  spec.p1 = 0.4;
  spec.p2 = 0.8;
  spec.sigma_pct = 0.0;
  spec.seed = 4;

  SUBCASE("sigma 0 adds no noise") {
    const auto res = gen_forest_fire(spec);
    CHECK(res.noise_arcs == 0);
    CHECK(res.arcs_before_noise == res.instance.graph.num_arcs());
  }
  SUBCASE("after the tweak every receiver touches an influencer") {
    const auto res = gen_forest_fire(spec);
    CHECK(reachable_count(res.instance.graph, res.instance.influencers) ==
          spec.receiver_cap);
    for (int j = 0; j < res.instance.graph.num_receivers(); ++j) {
      bool touched = false;
      for (int i : res.instance.graph.senders_of(j))
        if (i < spec.k) touched = true;
      CHECK(touched);
    }
  }
  SUBCASE("noise count is the floor of sigma% of the complement") {
    auto s2 = spec;
    s2.sigma_pct = 2.0;
    const auto res = gen_forest_fire(s2);
    const std::int64_t complement =
        static_cast<std::int64_t>(30) * 120 - res.arcs_before_noise;
    CHECK(res.noise_arcs == complement * 2 / 100);
    CHECK(res.instance.graph.num_arcs() == res.arcs_before_noise + res.noise_arcs);
  }
  SUBCASE("same seed reproduces the graph") {
    const auto a = gen_forest_fire(spec);
    const auto b = gen_forest_fire(spec);
    CHECK(a.instance.graph.arcs() == b.instance.graph.arcs());
  }
  SUBCASE("caps are validated") {
    auto s2 = spec;
    s2.sender_cap = 3;
    CHECK_THROWS_AS(gen_forest_fire(s2), std::invalid_argument);
  }
}

TEST_CASE("forest-fire arc counts land in the reference regime") {
  // k=20, ui=200, uf=2000, p1=0.3, p2=0.9, sigma=0.5 over 10 seeds:
  // mean arcs before noise near 9338, noise arcs near 1953
  double sum_orig = 0.0, sum_noise = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ForestFireSpec spec;
    spec.k = 20;
    spec.sender_cap = 200;
    spec.receiver_cap = 2000;
    spec.p1 = 0.3;
    spec.p2 = 0.9;
    spec.sigma_pct = 0.5;
    spec.seed = 7000 + seed;
    const auto res = gen_forest_fire(spec);
    sum_orig += static_cast<double>(res.arcs_before_noise);
    sum_noise += static_cast<double>(res.noise_arcs);
  }
  CHECK(std::abs(sum_orig / 10 - 9338.0) <= 0.15 * 9338.0);
  CHECK(std::abs(sum_noise / 10 - 1953.0) <= 0.05 * 1953.0);
}

TEST_CASE("check_cascade_recovery") {
  SUBCASE("no noise arcs: reduces to min n >= sqrt(1-p) max alpha") {
    // alpha = 10, n = 40: passes for p = 0.5 (40 >= 7.07)
    const auto inst = testsupport::two_group_instance(40, 40, 10, 10);
    const auto rep = check_cascade_recovery(inst, 0.5, 0.0);
    CHECK(rep.premise_ok);
    CHECK(rep.n_hat == std::vector<int>{40, 40});
    CHECK(rep.alpha == std::vector<int>{10, 10});
    CHECK(rep.gamma == std::vector<int>{0, 0});
    CHECK(rep.pass);
  }
  SUBCASE("heavy cross-group noise fails the strict swap condition") {
    // subordinates also cover 20 receivers of the other group
    auto inst = testsupport::two_group_instance(40, 40, 10, 10);
    auto arcs = inst.graph.arcs();
    for (int j = 0; j < 20; ++j) arcs.push_back({1, 40 + j});  // sub1 -> G_2
    for (int j = 0; j < 20; ++j) arcs.push_back({3, j});       // sub2 -> G_1
    PlantedInstance noisy{BipartiteGraph(4, 80, arcs), 2, inst.sender_groups,
                          inst.receiver_groups, inst.influencers};
    const auto rep = check_cascade_recovery(noisy, 0.5, 0.0);
    CHECK(rep.gamma == std::vector<int>{20, 20});
    CHECK(!rep.cond_swap);  // 30 > 4 * 20 is false
    CHECK(!rep.pass);
  }
  SUBCASE("rounding parameter is validated") {
    const auto inst = testsupport::two_group_instance(10, 10, 2, 2);
    CHECK_THROWS_AS(check_cascade_recovery(inst, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check_cascade_recovery(inst, 1.5, 0.0), std::invalid_argument);
  }
  SUBCASE("monotone under any subordinate noise arc") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto inst = testsupport::cascade_recovery_instance(3, seed);
      const bool before = check_cascade_recovery(inst, 0.9, 0.0).pass;
      auto arcs = inst.graph.arcs();
      // one cross-group arc from the first subordinate
      const int sub = inst.sender_groups[0][1];
      int target = -1;
      for (int j : inst.receiver_groups[2])
        if (!inst.graph.has_arc(sub, j)) {
          target = j;
          break;
        }
      REQUIRE(target >= 0);
      arcs.push_back({sub, target});
      PlantedInstance noisy{BipartiteGraph(inst.graph.num_senders(),
                                           inst.graph.num_receivers(), arcs),
                            inst.k, inst.sender_groups, inst.receiver_groups,
                            inst.influencers};
      const bool after = check_cascade_recovery(noisy, 0.9, 0.0).pass;
      CHECK(!(before == false && after == true));
    }
  }
}

TEST_CASE("instance bundles round-trip through disk") {
  const auto inst = gen_deterministic_noisy(2, {12, 9}, {2, 1}, 4, {0.5, 1.0},
                                            {0.3, 0.3}, {1, 1}, 21);
  const std::string dir = "/tmp/influence_test_bundle";
  save_instance(inst, dir, {{"kind", "noisy"}, {"seed", "21"}});
  const auto loaded = load_instance(dir);
  CHECK(loaded.k == inst.k);
  CHECK(loaded.influencers == inst.influencers);
  CHECK(loaded.graph.arcs() == inst.graph.arcs());
  CHECK(loaded.receiver_groups == inst.receiver_groups);
  const auto meta = load_instance_meta(dir);
  CHECK(meta.at("kind") == "noisy");
}
