#pragma once

#include <cstddef>
#include <vector>

namespace itsforge::csp {

struct Lit {
  int var = 0;
  bool neg = false;
};

inline Lit pos(int var) { return {var, false}; }
inline Lit neg(int var) { return {var, true}; }

// Conjunction of literals. An empty term is vacuously true.
using Term = std::vector<Lit>;

// Disjunction of conjunctive terms: satisfied iff some term is fully true.
// This shape covers every constraint the segmenter needs: plain ORs
// (single-literal terms), implications, pairwise exclusions, and
// nonempty-intersection constraints (terms "x_s and y_s" per segment).
// A clause with no terms is unsatisfiable.
struct Clause {
  std::vector<Term> terms;
};

enum class Result { Sat, Unsat };

// Boolean constraint solver. Search branches on variables in index order with
// false tried before true; conflict clauses and backjumps only ever discard
// assignments that extend to no model, so the model returned for a
// satisfiable set of clauses is the lexicographically first one, and repeated
// solves are deterministic.
class Solver {
 public:
  int add_var();
  int num_vars() const { return nvars_; }

  void add_clause(Clause c);
  void add_unit(int var, bool value);
  void require_implication(int if_var, int then_var);  // if_var -> then_var
  void forbid_both(int a, int b);                      // not(a and b)

  // Assumption frames: pop retracts every clause added since the matching
  // push. Nesting is allowed.
  void push();
  void pop();

  Result solve();
  bool value(int var) const;  // valid after solve() returned Sat

 private:
  int nvars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<std::size_t> frames_;
  std::vector<signed char> model_;  // filled by a Sat solve
};

}  // namespace itsforge::csp
