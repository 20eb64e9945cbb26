#pragma once

#include <cstdint>
#include <vector>

namespace itsforge::ilp {

enum class Sense { Ge, Le, Eq };

struct Term {
  int var = 0;
  std::int64_t coef = 0;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::Ge;
  std::int64_t rhs = 0;
};

// minimize objective.x subject to rows, lower <= x <= upper, x integral.
// All bounds must be finite.
struct Problem {
  std::vector<std::int64_t> objective;
  std::vector<std::int64_t> lower;
  std::vector<std::int64_t> upper;
  std::vector<Row> rows;
  std::int64_t node_budget = 1'000'000;
};

enum class Status { Optimal, Infeasible };

struct Solution {
  Status status = Status::Infeasible;
  std::int64_t objective = 0;
  // The lexicographically smallest vector among all optimal integer points.
  std::vector<std::int64_t> values;
  std::int64_t nodes = 0;
};

// Branch and bound with most-fractional branching over an LP relaxation.
// Integer candidates are re-verified in exact integer arithmetic before they
// become incumbents. Throws SizeLimitExceeded when node_budget runs out.
Solution solve(const Problem& p);

// Exhaustive reference solver: walks the integer box in lexicographic order,
// keeping the first point of each strictly better objective. Refuses boxes
// with more than 10^7 points.
Solution brute_force(const Problem& p);

}  // namespace itsforge::ilp
