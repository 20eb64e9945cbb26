#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "errors.hpp"
#include "ilp.hpp"

using namespace itsforge;

namespace {

ilp::Problem random_problem(std::mt19937& rng) {
  std::uniform_int_distribution<int> nvars(1, 6), nrows(0, 6), coef(-3, 3), cost(-5, 5),
      upper(1, 3), rhs(-4, 6), sense(0, 2), terms_per_row(1, 4);
  ilp::Problem p;
  const int n = nvars(rng);
  for (int v = 0; v < n; ++v) {
    p.objective.push_back(cost(rng));
    p.lower.push_back(0);
    p.upper.push_back(upper(rng));
  }
  const int rows = nrows(rng);
  for (int r = 0; r < rows; ++r) {
    ilp::Row row;
    int nt = std::min(n, terms_per_row(rng));
    for (int t = 0; t < nt; ++t) {
      int c = coef(rng);
      if (c) row.terms.push_back({t, c});
    }
    row.sense = static_cast<ilp::Sense>(sense(rng));
    row.rhs = rhs(rng);
    p.rows.push_back(std::move(row));
  }
  return p;
}

}  // namespace

TEST_CASE("agrees with exhaustive search on random instances") {
  std::mt19937 rng(20240811);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto p = random_problem(rng);
    auto expect = ilp::brute_force(p);
    auto got = ilp::solve(p);
    CAPTURE(trial);
    REQUIRE(got.status == expect.status);
    if (expect.status == ilp::Status::Optimal) {
      ++optimal;
      CHECK(got.objective == expect.objective);
      CHECK(got.values == expect.values);  // lexicographic tie break
    } else {
      ++infeasible;
    }
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 20);
}

TEST_CASE("handles negative bounds and equality rows") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> lo(-3, 0), width(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_problem(rng);
    for (size_t v = 0; v < p.lower.size(); ++v) {
      p.lower[v] = lo(rng);
      p.upper[v] = p.lower[v] + width(rng);
    }
    auto expect = ilp::brute_force(p);
    auto got = ilp::solve(p);
    CAPTURE(trial);
    REQUIRE(got.status == expect.status);
    if (expect.status == ilp::Status::Optimal) {
      CHECK(got.objective == expect.objective);
      CHECK(got.values == expect.values);
    }
  }
}

TEST_CASE("trivial and degenerate problems") {
  ilp::Problem empty;
  auto s = ilp::solve(empty);
  CHECK(s.status == ilp::Status::Optimal);
  CHECK(s.objective == 0);
  CHECK(s.values.empty());

  // min x0 with 2 <= x0 <= 5.
  ilp::Problem p;
  p.objective = {1};
  p.lower = {2};
  p.upper = {5};
  s = ilp::solve(p);
  CHECK(s.objective == 2);
  CHECK(s.values == std::vector<std::int64_t>{2});

  // Contradictory rows.
  p.rows.push_back({{{0, 1}}, ilp::Sense::Ge, 4});
  p.rows.push_back({{{0, 1}}, ilp::Sense::Le, 3});
  CHECK(ilp::solve(p).status == ilp::Status::Infeasible);
}

TEST_CASE("ties are broken toward the lexicographically smallest point") {
  // x0 + x1 >= 1 with equal costs: {0,1} and {1,0} tie, {0,1} is smaller.
  ilp::Problem p;
  p.objective = {1, 1};
  p.lower = {0, 0};
  p.upper = {1, 1};
  p.rows.push_back({{{0, 1}, {1, 1}}, ilp::Sense::Ge, 1});
  auto s = ilp::solve(p);
  CHECK(s.values == std::vector<std::int64_t>{0, 1});

  // All-zero objective: everything ties, the lower-bound corner wins unless
  // constrained away from it.
  ilp::Problem q;
  q.objective = {0, 0, 0};
  q.lower = {0, 0, 0};
  q.upper = {2, 2, 2};
  q.rows.push_back({{{0, 1}, {1, 1}, {2, 1}}, ilp::Sense::Ge, 2});
  s = ilp::solve(q);
  CHECK(s.values == std::vector<std::int64_t>{0, 0, 2});
}

TEST_CASE("node budget is enforced") {
  // A knapsack-like instance with fractional LP optima everywhere and a
  // budget too small to finish.
  ilp::Problem p;
  for (int v = 0; v < 12; ++v) {
    p.objective.push_back(-(7 + v % 3));
    p.lower.push_back(0);
    p.upper.push_back(1);
  }
  ilp::Row row;
  for (int v = 0; v < 12; ++v) row.terms.push_back({v, 2 + v % 5});
  row.sense = ilp::Sense::Le;
  row.rhs = 11;
  p.rows.push_back(row);
  p.node_budget = 2;
  CHECK_THROWS_AS(ilp::solve(p), SizeLimitExceeded);
}

TEST_CASE("brute force refuses oversized boxes") {
  ilp::Problem p;
  for (int v = 0; v < 9; ++v) {
    p.objective.push_back(1);
    p.lower.push_back(0);
    p.upper.push_back(9);
  }
  CHECK_THROWS_AS(ilp::brute_force(p), InputError);
}
