#include <doctest.h>

#include <algorithm>
#include <set>

#include "influence/graph.hpp"
#include "influence/rng.hpp"
#include "support.hpp"

using namespace influence;

namespace {

BipartiteGraph random_graph(int m, int n, double density, std::uint64_t seed) {
  Rng rng = Rng::child(seed, 77);
  std::vector<Arc> arcs;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.bernoulli(density)) arcs.push_back({i, j});
  return BipartiteGraph(m, n, std::move(arcs));
}

}  // namespace

TEST_CASE("construction rejects bad arc sets") {
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{0, 0}, {0, 0}}), DimensionError);
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{2, 0}}), DimensionError);
  CHECK_THROWS_AS(BipartiteGraph(2, 2, {{0, -1}}), DimensionError);
}

TEST_CASE("adjacency is stored in both directions") {
  BipartiteGraph g(3, 2, {{0, 1}, {1, 0}, {1, 1}, {2, 0}});
  CHECK(g.num_arcs() == 4);
  CHECK(g.receivers_of(1).size() == 2);
  CHECK(g.senders_of(0).size() == 2);
  CHECK(g.has_arc(1, 1));
  CHECK(!g.has_arc(0, 0));
  // both orientations describe the same arc set
  std::set<Arc> from_senders, from_receivers;
  for (int i = 0; i < 3; ++i)
    for (int j : g.receivers_of(i)) from_senders.insert({i, j});
  for (int j = 0; j < 2; ++j)
    for (int i : g.senders_of(j)) from_receivers.insert({i, j});
  CHECK(from_senders == from_receivers);
}

TEST_CASE("apply_incidence_transpose") {
  SUBCASE("empty graph") {
    BipartiteGraph g(3, 4, {});
    const auto out = apply_incidence_transpose(g, std::vector<double>{1, 1, 1});
    CHECK(out == std::vector<double>(4, 0.0));
  }
  SUBCASE("single arc identity") {
    BipartiteGraph g(1, 1, {{0, 0}});
    CHECK(apply_incidence_transpose(g, std::vector<double>{1.0}) ==
          std::vector<double>{1.0});
  }
  SUBCASE("two-group counterexample coverage counts") {
    const auto inst = testsupport::example_one();
    std::vector<double> x(4, 0.0);
    x[0] = x[1] = 1.0;  // influencer 1 and its subordinate
    const auto out = apply_incidence_transpose(inst.graph, x);
    int twos = 0, ones = 0, zeros = 0;
    for (double v : out) {
      if (v == 2.0) ++twos;
      if (v == 1.0) ++ones;
      if (v == 0.0) ++zeros;
    }
    CHECK(twos == 99);
    CHECK(ones == 1);
    CHECK(zeros == 20);
  }
  SUBCASE("length mismatch") {
    BipartiteGraph g(2, 1, {{0, 0}});
    CHECK_THROWS_AS(apply_incidence_transpose(g, std::vector<double>{1.0}),
                    DimensionError);
  }
}

TEST_CASE("reachable_count") {
  const auto inst = testsupport::example_one();
  CHECK(reachable_count(inst.graph, std::vector<int>{}) == 0);
  CHECK(reachable_count(inst.graph, std::vector<int>{0, 2}) == 120);
  CHECK(reachable_count(inst.graph, std::vector<int>{0, 1}) == 100);
  CHECK_THROWS_AS(reachable_count(inst.graph, std::vector<int>{7}), DimensionError);
}

TEST_CASE("graph text round trip") {
  const auto g = read_graph("senders 1\nreceivers 1\n0 0\n");
  CHECK(g.num_arcs() == 1);
  CHECK(g.has_arc(0, 0));

  // comments and unsorted arcs are accepted; write emits canonical order
  const auto g2 = read_graph("# comment\nsenders 2\nreceivers 2\n1 0\n0 1\n0 0\n");
  CHECK(write_graph(g2) == "senders 2\nreceivers 2\n0 0\n0 1\n1 0\n");

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rnd = random_graph(6, 9, 0.3, seed);
    const auto text = write_graph(rnd);
    CHECK(write_graph(read_graph(text)) == text);
  }
}

TEST_CASE("graph parse errors carry line numbers") {
  CHECK_THROWS_AS(read_graph(""), ParseError);
  CHECK_THROWS_AS(read_graph("senders x\nreceivers 1\n"), ParseError);
  try {
    read_graph("senders 2\nreceivers 2\n0 0\n2 0\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("out of range") != std::string::npos);
  }
  CHECK_THROWS_AS(read_graph("senders 1\nreceivers 1\n0 0\n0 0\n"), ParseError);
  CHECK_THROWS_AS(read_graph("senders 1\nreceivers 1\n0 0 9\n"), ParseError);
}

TEST_CASE("incidence properties on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(8, 12, 0.25, seed);
    const std::vector<double> ones(8, 1.0);
    const auto cov = apply_incidence_transpose(g, ones);
    double total = 0;
    for (double v : cov) total += v;
    CHECK(total == doctest::Approx(static_cast<double>(g.num_arcs())));

    Rng rng = Rng::child(seed, 5);
    const auto subset = rng.sample_without_replacement(8, 3);
    std::vector<double> ind(8, 0.0);
    for (int i : subset) ind[i] = 1.0;
    const auto cov2 = apply_incidence_transpose(g, ind);
    const int nonzeros =
        static_cast<int>(std::count_if(cov2.begin(), cov2.end(),
                                       [](double v) { return v > 0; }));
    CHECK(reachable_count(g, subset) == nonzeros);
  }
}

TEST_CASE("selection vector feasibility") {
  SelectionVector sel{{0.5, 0.5, 1.0}, 2};
  CHECK(sel.is_feasible());
  sel.values[0] = 1.2;
  CHECK(!sel.is_feasible());
  CHECK(indicator(3, std::vector<int>{0, 2}).is_feasible());

  BipartiteGraph g(3, 2, {{0, 0}, {2, 1}});
  const auto cov = apply_incidence_transpose(g, indicator(3, std::vector<int>{0, 2}));
  CHECK(cov == std::vector<double>{1.0, 1.0});
}

TEST_CASE("rng determinism and child streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  // children depend only on (master, index), not on draws made so far
  Rng c1 = Rng::child(42, 7);
  Rng c3 = Rng::child(42, 7);
  CHECK(c1.next_u64() == c3.next_u64());
  for (int i = 0; i < 1000; ++i) {
    Rng r(i);
    const double d = r.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    CHECK(r.below(17) < 17);
  }
}
