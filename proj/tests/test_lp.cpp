#include <doctest.h>

#include <cmath>

#include "influence/generators.hpp"
#include "influence/lp.hpp"
#include "influence/oracles.hpp"
#include "influence/rng.hpp"
#include "support.hpp"

using namespace influence;

TEST_CASE("build_lp validates k") {
  BipartiteGraph g(3, 2, {{0, 0}, {1, 1}});
  CHECK_THROWS_AS(build_lp(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_lp(g, 4), std::invalid_argument);
  const auto p = build_lp(g, 2);
  CHECK(p.num_x() == 3);
  CHECK(p.num_t() == 2);
}

TEST_CASE("one-arc problem solves to the unit vertex") {
  BipartiteGraph g(1, 1, {{0, 0}});
  const auto sol = solve_lp(build_lp(g, 1));
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.t[0] == doctest::Approx(1.0));
}

TEST_CASE("k = m selects everyone; isolated receivers stay uncovered") {
  BipartiteGraph g(3, 4, {{0, 0}, {1, 1}, {2, 1}, {2, 2}});  // receiver 3 isolated
  const auto sol = solve_lp(build_lp(g, 3));
  CHECK(sol.objective == doctest::Approx(3.0));
  for (double v : sol.x) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("noiseless instances recover the influencers exactly") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng = Rng::child(seed, 12);
    const int k = 1 + rng.below_int(5);
    std::vector<int> n(k), r(k);
    for (int l = 0; l < k; ++l) {
      n[l] = 2 + rng.below_int(20);
      r[l] = rng.below_int(5);
    }
    const auto inst = gen_noiseless(k, n, r, seed);
    const auto problem = build_lp(inst.graph, k);
    const auto sol = solve_lp(problem);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(inst.recovery_error(sol.x) < 1e-8);
    int total = 0;
    for (int v : n) total += v;
    CHECK(sol.objective == doctest::Approx(total));
    for (double v : sol.t) CHECK(v == doctest::Approx(1.0));
    // the returned solution is a vertex: every x is at a bound here
    for (double v : sol.x)
      CHECK((std::abs(v) < 1e-9 || std::abs(v - 1.0) < 1e-9));
    const auto rep = kkt_check(problem, sol, 1e-7);
    CHECK(rep.pass);
    CHECK(rep.primal_residual <= 1e-8);
    CHECK(std::abs(rep.dual_objective - rep.primal_objective) <= 1e-7);
  }
}

TEST_CASE("deterministic counterexample graph treated as coverage LP") {
  const auto inst = testsupport::example_one();
  const auto sol = solve_lp(build_lp(inst.graph, 2));
  CHECK(sol.objective == doctest::Approx(120.0));
  CHECK(inst.recovery_error(sol.x) < 1e-8);  // A1-A3 hold, so theorem 1 applies
}

TEST_CASE("noiseless_duals certificate") {
  SUBCASE("single group of four") {
    const auto inst = gen_noiseless(1, {4}, {1}, 8);
    const auto cert = noiseless_duals(inst);
    for (double l : cert.lambda) CHECK(l == doctest::Approx(0.25));
    CHECK(cert.nu[inst.influencers[0]] == doctest::Approx(0.25));
    CHECK(cert.xi_dual == doctest::Approx(0.75));
    const auto rep = kkt_check(build_lp(inst.graph, 1),
                               certificate_solution(inst, cert), 1e-9);
    CHECK(rep.pass);
  }
  SUBCASE("unequal groups") {
    const auto inst = gen_noiseless(2, {2, 5}, {1, 2}, 3);
    const auto cert = noiseless_duals(inst);
    CHECK(cert.lambda[inst.receiver_groups[1][0]] == doctest::Approx(0.5));
    CHECK(cert.lambda[inst.receiver_groups[2][0]] == doctest::Approx(0.2));
    CHECK(cert.nu[inst.influencers[0]] == doctest::Approx(0.2));
    CHECK(cert.nu[inst.influencers[1]] == doctest::Approx(0.2));
    CHECK(cert.xi_dual == doctest::Approx(0.8));
    const auto rep = kkt_check(build_lp(inst.graph, 2),
                               certificate_solution(inst, cert), 1e-9);
    CHECK(rep.pass);
  }
  SUBCASE("random noiseless instances always certify at 1e-9") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = gen_noiseless(3, {4, 7, 5}, {2, 0, 1}, seed);
      const auto rep = kkt_check(build_lp(inst.graph, 3),
                                 certificate_solution(inst, noiseless_duals(inst)),
                                 1e-9);
      CHECK(rep.pass);
    }
  }
  SUBCASE("refuses instances violating the assumptions") {
    auto inst = testsupport::two_group_instance(6, 6, 6, 2);  // subordinate = full group
    CHECK_THROWS_AS(noiseless_duals(inst), std::invalid_argument);
  }
}

TEST_CASE("kkt_check flags broken complementarity") {
  const auto inst = gen_noiseless(2, {4, 4}, {1, 1}, 2);
  const auto problem = build_lp(inst.graph, 2);
  auto sol = certificate_solution(inst, noiseless_duals(inst));
  REQUIRE(kkt_check(problem, sol, 1e-9).pass);
  sol.nu[inst.sender_groups[0][1]] += 1.0;  // subordinate has x = 0 < 1
  CHECK(!kkt_check(problem, sol, 1e-9).pass);
}

TEST_CASE("noisy_duals certificate") {
  SUBCASE("noiseless reduction: lambda blocks n_min/n_l") {
    const auto inst = gen_noiseless(2, {4, 6}, {1, 1}, 13);
    const auto cert = noisy_duals(inst);
    CHECK(cert.lambda[inst.receiver_groups[1][0]] == doctest::Approx(1.0));
    CHECK(cert.lambda[inst.receiver_groups[2][0]] == doctest::Approx(4.0 / 6));
    const auto rep = kkt_check(build_lp(inst.graph, 2),
                               certificate_solution(inst, cert), 1e-9);
    CHECK(rep.pass);
  }
  SUBCASE("noisy pass instances certify at 1e-9") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto inst = gen_deterministic_noisy(
          3, {30, 36, 33}, {2, 3, 2}, 12, {0.5, 0.5, 0.5}, {0.25, 0.25, 0.25},
          {3, 3, 3}, seed);
      REQUIRE(check_deterministic_recovery(inst).pass);
      const auto problem = build_lp(inst.graph, 3);
      const auto rep = kkt_check(problem,
                                 certificate_solution(inst, noisy_duals(inst)),
                                 1e-9);
      CHECK(rep.pass);
      // and the simplex agrees with the certificate
      const auto sol = solve_lp(problem);
      CHECK(inst.recovery_error(sol.x) < 1e-8);
      CHECK(sol.objective == doctest::Approx(99.0));
      CHECK(kkt_check(problem, sol, 1e-7).pass);
    }
  }
  SUBCASE("overlapping score intervals are refused") {
    // beta 0.9 and heavy G_0 arcs push a subordinate's score above the
    // weakest influencer's
    const auto inst = gen_deterministic_noisy(2, {40, 40}, {3, 3}, 10,
                                              {1.0, 1.0}, {0.9, 0.9}, {8, 8}, 5);
    CHECK_THROWS_AS(noisy_duals(inst), CertificateError);
  }
}

TEST_CASE("weak duality holds for certificate duals on any feasible primal") {
  const auto inst = gen_deterministic_noisy(2, {20, 20}, {2, 2}, 5, {0.5, 0.5},
                                            {0.2, 0.2}, {2, 2}, 31);
  const auto problem = build_lp(inst.graph, 2);
  const auto cert = noisy_duals(inst);
  // primal: any feasible (x, t); take x uniform, t = min(1, A^T x)
  std::vector<double> x(inst.graph.num_senders(),
                        2.0 / inst.graph.num_senders());
  const auto cov = apply_incidence_transpose(inst.graph, x);
  double primal = 0.0;
  for (double c : cov) primal += std::min(1.0, c);
  double dual = cert.xi_dual * 2;
  for (double v : cert.mu) dual += v;
  for (double v : cert.nu) dual += v;
  CHECK(primal <= dual + 1e-7);
}

TEST_CASE("simplex determinism") {
  const auto inst = gen_deterministic_noisy(2, {25, 25}, {3, 3}, 8, {0.6, 0.6},
                                            {0.3, 0.3}, {2, 2}, 17);
  const auto problem = build_lp(inst.graph, 2);
  const auto a = solve_lp(problem);
  const auto b = solve_lp(problem);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x == b.x);
  CHECK(a.t == b.t);
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("iteration limit reports honestly") {
  const auto inst = gen_deterministic_noisy(3, {30, 30, 30}, {4, 4, 4}, 10,
                                            {0.5, 0.5, 0.5}, {0.2, 0.2, 0.2},
                                            {3, 3, 3}, 2);
  LpConfig cfg;
  cfg.max_iterations = 1;
  const auto sol = solve_lp(build_lp(inst.graph, 3), cfg);
  // either it was lucky enough to be optimal at the start or it must say so
  if (sol.iterations >= 1) CHECK(sol.status == LpStatus::IterationLimit);
}

TEST_CASE("0-1 LP solutions match the brute-force integer optimum") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng = Rng::child(seed, 99);
    const int m = 4 + rng.below_int(6);
    const int n = 5 + rng.below_int(10);
    std::vector<Arc> arcs;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.bernoulli(0.3)) arcs.push_back({i, j});
    BipartiteGraph g(m, n, std::move(arcs));
    const int k = 1 + rng.below_int(3);
    const auto sol = solve_lp(build_lp(g, k));
    REQUIRE(sol.status == LpStatus::Optimal);
    bool integral = true;
    for (double v : sol.x)
      if (v > 1e-8 && v < 1.0 - 1e-8) integral = false;
    if (!integral) continue;
    const auto oracle = brute_force_deterministic(g, k);
    CHECK(sol.objective == doctest::Approx(oracle.best_value).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 10);  // the family must actually exercise the claim
}

TEST_CASE("solver output certifies optimal on arbitrary graphs") {
  // kkt_check passing is a complete optimality certificate by duality, so
  // this validates the simplex on instances with fractional optima too.
  int fractional_seen = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng = Rng::child(seed, 314);
    const int m = 3 + rng.below_int(10);
    const int n = 4 + rng.below_int(16);
    std::vector<Arc> arcs;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.bernoulli(0.25)) arcs.push_back({i, j});
    BipartiteGraph g(m, n, std::move(arcs));
    const int k = 1 + rng.below_int(m);
    const auto problem = build_lp(g, k);
    const auto sol = solve_lp(problem);
    REQUIRE(sol.status == LpStatus::Optimal);
    const auto rep = kkt_check(problem, sol, 1e-7);
    CHECK(rep.pass);
    CHECK(rep.primal_residual <= 1e-8);
    CHECK(std::abs(rep.dual_objective - rep.primal_objective) <= 1e-7);
    for (double v : sol.x)
      if (v > 1e-8 && v < 1 - 1e-8) ++fractional_seen;
  }
  (void)fractional_seen;  // any mix is fine; the certificate is what matters
}

TEST_CASE("lp solution dump round-trips") {
  const auto inst = gen_noiseless(2, {3, 3}, {1, 0}, 6);
  const auto sol = solve_lp(build_lp(inst.graph, 2));
  const auto text = dump_lp_solution(sol);
  const auto back = parse_lp_solution(text);
  CHECK(back.x == sol.x);
  CHECK(back.lambda == sol.lambda);
  CHECK(back.xi_dual == sol.xi_dual);
  CHECK(back.objective == sol.objective);
  CHECK(back.status == sol.status);
}
