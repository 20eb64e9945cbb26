#include "csp.hpp"

#include <algorithm>
#include <map>

#include "errors.hpp"

namespace itsforge::csp {
namespace {

// Literal code: var << 1 | sign, sign 1 meaning negated.
inline int code_of(const Lit& l) { return (l.var << 1) | (l.neg ? 1 : 0); }
inline int lit_var(int code) { return code >> 1; }

// CDCL engine over plain CNF. Decisions walk variables in index order and try
// false first, so the first model found is the lexicographically smallest;
// conflict clauses and backjumps only cut assignments that extend to no model,
// which keeps that guarantee intact.
struct Engine {
  int nvars;
  std::vector<std::vector<int>> clauses;
  std::vector<std::vector<int>> watches;  // per literal code
  std::vector<signed char> assign;        // -1 unassigned, 0 false, 1 true
  std::vector<int> level;
  std::vector<int> reason;  // clause index, -1 for decisions and units
  std::vector<int> trail;   // true-literal codes in assignment order
  std::vector<int> trail_lim;
  std::size_t qhead = 0;
  bool contradiction = false;

  explicit Engine(int base_vars) : nvars(0) {
    grow_to(base_vars);
  }

  void grow_to(int n) {
    nvars = n;
    watches.resize(2 * nvars);
    assign.resize(nvars, -1);
    level.resize(nvars, 0);
    reason.resize(nvars, -1);
  }

  int new_var() {
    grow_to(nvars + 1);
    return nvars - 1;
  }

  bool lit_true(int code) const {
    return assign[code >> 1] == ((code & 1) ? 0 : 1);
  }
  bool lit_false(int code) const {
    return assign[code >> 1] == ((code & 1) ? 1 : 0);
  }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  // Returns false when the literal is already false.
  bool enqueue(int code, int why) {
    int v = code >> 1;
    if (assign[v] >= 0) return lit_true(code);
    assign[v] = (code & 1) ? 0 : 1;
    level[v] = decision_level();
    reason[v] = why;
    trail.push_back(code);
    return true;
  }

  // Sorted, deduplicated literal codes; true when the clause is a tautology.
  static bool canonicalize(std::vector<int>& lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if ((lits[i] ^ 1) == lits[i + 1]) return true;
    return false;
  }

  void add_clause(std::vector<int> lits) {
    if (contradiction) return;
    if (canonicalize(lits)) return;
    if (lits.empty()) {
      contradiction = true;
      return;
    }
    if (lits.size() == 1) {
      if (!enqueue(lits[0], -1)) contradiction = true;
      return;
    }
    int ci = static_cast<int>(clauses.size());
    clauses.push_back(std::move(lits));
    watches[clauses[ci][0]].push_back(ci);
    watches[clauses[ci][1]].push_back(ci);
  }

  // Drains the trail queue; returns the conflicting clause index or -1.
  int propagate() {
    while (qhead < trail.size()) {
      int falsified = trail[qhead++] ^ 1;
      std::vector<int>& ws = watches[falsified];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        int ci = ws[i];
        std::vector<int>& c = clauses[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (lit_true(c[0])) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (!lit_false(c[k])) {
            std::swap(c[1], c[k]);
            watches[c[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = ci;
        if (!enqueue(c[0], ci)) {
          for (++i; i < ws.size(); ++i) ws[keep++] = ws[i];
          ws.resize(keep);
          return ci;
        }
      }
      ws.resize(keep);
    }
    return -1;
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    int bound = trail_lim[lvl];
    for (int i = static_cast<int>(trail.size()) - 1; i >= bound; --i)
      assign[trail[i] >> 1] = -1;
    trail.resize(bound);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  // First-UIP conflict analysis: fills the learned clause (asserting literal
  // first) and returns the backjump level.
  int analyze(int confl, std::vector<int>& learnt, std::vector<char>& seen) {
    learnt.assign(1, 0);
    int counter = 0;
    int p = -1;
    int idx = static_cast<int>(trail.size()) - 1;
    for (;;) {
      const std::vector<int>& c = clauses[confl];
      for (int q : c) {
        if (q == p) continue;
        int v = q >> 1;
        if (seen[v] || level[v] == 0) continue;
        seen[v] = 1;
        if (level[v] == decision_level())
          ++counter;
        else
          learnt.push_back(q);
      }
      while (!seen[trail[idx] >> 1]) --idx;
      p = trail[idx];
      int v = p >> 1;
      seen[v] = 0;
      --counter;
      if (counter == 0) break;
      confl = reason[v];
      --idx;
    }
    learnt[0] = p ^ 1;

    int back = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level[learnt[i] >> 1] > level[learnt[best] >> 1]) best = i;
      std::swap(learnt[1], learnt[best]);
      back = level[learnt[1] >> 1];
    }
    for (int q : learnt) seen[q >> 1] = 0;
    return back;
  }
};

}  // namespace

int Solver::add_var() { return nvars_++; }

void Solver::add_clause(Clause c) {
  for (const auto& term : c.terms)
    for (const auto& lit : term)
      if (lit.var < 0 || lit.var >= nvars_)
        throw InternalError("csp: clause references unknown variable");
  clauses_.push_back(std::move(c));
}

void Solver::add_unit(int var, bool value) {
  add_clause({{Term{{var, !value}}}});
}

void Solver::require_implication(int if_var, int then_var) {
  Clause c;
  c.terms.push_back(Term{{if_var, true}});
  c.terms.push_back(Term{{then_var, false}});
  add_clause(std::move(c));
}

void Solver::forbid_both(int a, int b) {
  Clause c;
  c.terms.push_back(Term{{a, true}});
  c.terms.push_back(Term{{b, true}});
  add_clause(std::move(c));
}

void Solver::push() { frames_.push_back(clauses_.size()); }

void Solver::pop() {
  if (frames_.empty()) throw InternalError("csp: pop without push");
  clauses_.resize(frames_.back());
  frames_.pop_back();
}

Result Solver::solve() {
  Engine e(nvars_);
  // Conjunctive terms become fresh defined variables so the engine works on
  // plain CNF. Defined variables are only ever assigned by propagation, which
  // leaves the search order over the original variables untouched.
  std::map<std::vector<int>, int> term_vars;
  for (const Clause& clause : clauses_) {
    std::vector<int> top;
    bool satisfied = false;
    for (const Term& term : clause.terms) {
      std::vector<int> codes;
      codes.reserve(term.size());
      for (const Lit& lit : term) codes.push_back(code_of(lit));
      bool always_false = Engine::canonicalize(codes);
      if (always_false) continue;
      if (codes.empty()) {
        satisfied = true;  // empty conjunction holds vacuously
        break;
      }
      if (codes.size() == 1) {
        top.push_back(codes[0]);
        continue;
      }
      auto [it, inserted] = term_vars.try_emplace(codes, 0);
      if (inserted) {
        int aux = e.new_var();
        it->second = aux;
        std::vector<int> back{aux << 1};
        for (int c : codes) {
          e.add_clause({(aux << 1) | 1, c});  // aux -> literal
          back.push_back(c ^ 1);
        }
        e.add_clause(std::move(back));  // all literals -> aux
      }
      top.push_back(it->second << 1);
    }
    if (satisfied) continue;
    e.add_clause(std::move(top));
    if (e.contradiction) break;
  }

  model_.clear();
  if (e.contradiction) return Result::Unsat;

  std::vector<int> learnt;
  std::vector<char> seen(e.nvars, 0);
  int next_var = 0;
  for (;;) {
    int confl = e.propagate();
    if (confl >= 0) {
      if (e.decision_level() == 0) return Result::Unsat;
      int back = e.analyze(confl, learnt, seen);
      e.cancel_until(back);
      if (learnt.size() == 1) {
        e.enqueue(learnt[0], -1);
      } else {
        int ci = static_cast<int>(e.clauses.size());
        e.clauses.push_back(learnt);
        e.watches[learnt[0]].push_back(ci);
        e.watches[learnt[1]].push_back(ci);
        if (static_cast<int>(seen.size()) < e.nvars) seen.resize(e.nvars, 0);
        e.enqueue(learnt[0], ci);
      }
      next_var = 0;
      continue;
    }
    while (next_var < nvars_ && e.assign[next_var] >= 0) ++next_var;
    if (next_var == nvars_) {
      model_.assign(e.assign.begin(), e.assign.begin() + nvars_);
      return Result::Sat;
    }
    e.trail_lim.push_back(static_cast<int>(e.trail.size()));
    e.enqueue((next_var << 1) | 1, -1);  // try false first
  }
}

bool Solver::value(int var) const {
  if (var < 0 || var >= static_cast<int>(model_.size()) || model_[var] < 0)
    throw InternalError("csp: value() without a model");
  return model_[var] == 1;
}

}  // namespace itsforge::csp
