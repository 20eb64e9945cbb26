#include "ilp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace itsforge::ilp {

namespace {

using i64 = std::int64_t;
using i128 = __int128;
using ld = long double;

constexpr ld kInf = std::numeric_limits<ld>::infinity();
constexpr ld kPivotTol = 1e-9L;
constexpr ld kCostTol = 1e-7L;
constexpr ld kPhase1Tol = 1e-6L;
constexpr ld kIntTol = 1e-6L;
// Margin subtracted from an LP bound before rounding it up to an integer
// bound; generous relative to long double error at the magnitudes involved.
constexpr ld kBoundMargin = 1e-6L;

void validate(const Problem& p) {
  std::size_t n = p.objective.size();
  if (p.lower.size() != n || p.upper.size() != n)
    throw InternalError("ilp: bound vectors must match objective size");
  for (std::size_t j = 0; j < n; ++j)
    if (p.lower[j] > p.upper[j])
      throw InternalError("ilp: empty domain for variable " + std::to_string(j));
  for (const auto& row : p.rows)
    for (const auto& t : row.terms)
      if (t.var < 0 || static_cast<std::size_t>(t.var) >= n)
        throw InternalError("ilp: row references unknown variable");
  if (p.node_budget <= 0) throw InternalError("ilp: node budget must be positive");
}

bool rows_satisfied(const Problem& p, const std::vector<i64>& x) {
  for (const auto& row : p.rows) {
    i128 lhs = 0;
    for (const auto& t : row.terms) lhs += static_cast<i128>(t.coef) * x[t.var];
    i128 rhs = row.rhs;
    bool ok = row.sense == Sense::Ge   ? lhs >= rhs
              : row.sense == Sense::Le ? lhs <= rhs
                                       : lhs == rhs;
    if (!ok) return false;
  }
  return true;
}

i64 objective_of(const Problem& p, const std::vector<i64>& x) {
  i128 obj = 0;
  for (std::size_t j = 0; j < x.size(); ++j)
    obj += static_cast<i128>(p.objective[j]) * x[j];
  return static_cast<i64>(obj);
}

// ---------------------------------------------------------------------------
// Dense bounded-variable primal simplex, two phases with an artificial basis.
// Deterministic: Dantzig pricing with index tie-breaks; Bland's rule kicks in
// after a degenerate stall to guarantee termination.

struct LpResult {
  bool feasible = false;
  ld objective = 0;
  std::vector<ld> x;  // structural variables only
};

class Simplex {
 public:
  Simplex(const Problem& p, const std::vector<i64>& lo, const std::vector<i64>& up,
          bool use_objective) {
    nstruct_ = static_cast<int>(p.objective.size());
    m_ = static_cast<int>(p.rows.size());
    int nslack = 0;
    for (const auto& row : p.rows)
      if (row.sense != Sense::Eq) ++nslack;

    // A row whose slack can start basic and feasible needs no artificial.
    std::vector<ld> residual(m_, 0.0L);
    std::vector<char> needs_art(m_, 1);
    int nart = 0;
    for (int i = 0; i < m_; ++i) {
      const Row& row = p.rows[i];
      ld act = 0.0L;
      for (const auto& t : row.terms)
        act += static_cast<ld>(t.coef) * static_cast<ld>(lo[t.var]);
      ld r = static_cast<ld>(row.rhs) - act;
      residual[i] = r;
      if (row.sense == Sense::Le)
        needs_art[i] = r < 0.0L;
      else if (row.sense == Sense::Ge)
        needs_art[i] = r > 0.0L;
      else
        needs_art[i] = 1;
      nart += needs_art[i];
    }

    n_ = nstruct_ + nslack + nart;
    first_art_ = nstruct_ + nslack;

    tab_.assign(static_cast<std::size_t>(m_) * n_, 0.0L);
    beta_.assign(m_, 0.0L);
    lo_.assign(n_, 0.0L);
    up_.assign(n_, 0.0L);
    cost_.assign(n_, 0.0L);
    basis_.assign(m_, -1);
    in_basis_.assign(n_, -1);
    at_upper_.assign(n_, 0);

    for (int j = 0; j < nstruct_; ++j) {
      lo_[j] = static_cast<ld>(lo[j]);
      up_[j] = static_cast<ld>(up[j]);
      if (use_objective) cost_[j] = static_cast<ld>(p.objective[j]);
    }
    int slack = nstruct_;
    int art = first_art_;
    for (int i = 0; i < m_; ++i) {
      const Row& row = p.rows[i];
      for (const auto& t : row.terms) at(i, t.var) += static_cast<ld>(t.coef);
      beta_[i] = static_cast<ld>(row.rhs);
      int s = -1;
      if (row.sense != Sense::Eq) {
        s = slack++;
        at(i, s) = row.sense == Sense::Le ? 1.0L : -1.0L;
        lo_[s] = 0.0L;
        up_[s] = kInf;
      }
      if (!needs_art[i]) {
        // Normalize so the basic slack forms an identity column.
        if (row.sense == Sense::Ge) {
          for (int j = 0; j <= s; ++j) at(i, j) = -at(i, j);
          beta_[i] = -beta_[i];
        }
        basis_[i] = s;
        in_basis_[s] = i;
        continue;
      }
      // Flip the row so the artificial starts >= 0.
      if (residual[i] < 0.0L) {
        for (int j = 0; j < first_art_; ++j) at(i, j) = -at(i, j);
        beta_[i] = -beta_[i];
      }
      int a = art++;
      at(i, a) = 1.0L;
      lo_[a] = 0.0L;
      up_[a] = kInf;
      basis_[i] = a;
      in_basis_[a] = i;
    }
  }

  LpResult run() {
    if (n_ > first_art_) {
      // Phase 1: minimize the artificial sum.
      std::vector<ld> phase1(n_, 0.0L);
      for (int a = first_art_; a < n_; ++a) phase1[a] = 1.0L;
      iterate(phase1);
      if (objective_value(phase1) > kPhase1Tol) return {};
      pivot_out_artificials();
      // Lock artificials at zero so phase 2 cannot revive them.
      for (int a = first_art_; a < n_; ++a) up_[a] = 0.0L;
    }
    iterate(cost_);
    LpResult res;
    res.feasible = true;
    res.objective = objective_value(cost_);
    std::vector<ld> all = values();
    res.x.assign(all.begin(), all.begin() + nstruct_);
    return res;
  }

 private:
  ld& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * n_ + j]; }
  const ld& at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * n_ + j]; }

  ld nb_value(int j) const { return at_upper_[j] ? up_[j] : lo_[j]; }

  std::vector<ld> values() const {
    std::vector<ld> x(n_, 0.0L);
    for (int j = 0; j < n_; ++j)
      if (in_basis_[j] < 0) x[j] = nb_value(j);
    for (int i = 0; i < m_; ++i) {
      ld v = beta_[i];
      for (int j = 0; j < n_; ++j)
        if (in_basis_[j] < 0 && x[j] != 0.0L) v -= at(i, j) * x[j];
      x[basis_[i]] = v;
    }
    return x;
  }

  ld objective_value(const std::vector<ld>& c) const {
    std::vector<ld> x = values();
    ld obj = 0.0L;
    for (int j = 0; j < n_; ++j)
      if (c[j] != 0.0L) obj += c[j] * x[j];
    return obj;
  }

  void iterate(const std::vector<ld>& c) {
    std::vector<ld> xall = values();
    // Reduced costs, maintained incrementally across pivots. Drift only
    // affects the pivot path: optimality is never declared on stale values.
    std::vector<ld> d(n_, 0.0L);
    auto reprice = [&] {
      std::vector<ld> cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = c[basis_[i]];
      for (int j = 0; j < n_; ++j) {
        if (in_basis_[j] >= 0) {
          d[j] = 0.0L;
          continue;
        }
        ld v = c[j];
        for (int i = 0; i < m_; ++i) {
          ld a = at(i, j);
          if (a != 0.0L) v -= cb[i] * a;
        }
        d[j] = v;
      }
    };
    reprice();
    bool fresh = true;
    int stall = 0;
    bool bland = false;
    for (long iter = 0;; ++iter) {
      if (iter > 20000L + 50L * static_cast<long>(n_))
        throw InternalError("ilp: simplex iteration limit hit");

      int enter = -1;
      ld best_score = 0.0L;
      bool enter_from_lower = true;
      // Artificials never re-enter: entering candidates are true variables.
      for (int j = 0; j < first_art_; ++j) {
        if (in_basis_[j] >= 0) continue;
        if (!std::isinf(up_[j]) && up_[j] - lo_[j] < kPivotTol) continue;
        bool from_lower = !at_upper_[j];
        ld score = from_lower ? -d[j] : d[j];
        if (score <= kCostTol) continue;
        if (bland) {
          enter = j;
          enter_from_lower = from_lower;
          break;
        }
        if (score > best_score) {
          best_score = score;
          enter = j;
          enter_from_lower = from_lower;
        }
      }
      if (enter < 0) {
        if (fresh) return;  // optimal for this cost vector
        reprice();
        fresh = true;
        continue;
      }
      fresh = false;

      // Ratio test: how far can the entering variable move from its bound.
      ld dir = enter_from_lower ? 1.0L : -1.0L;
      ld tmax = std::isinf(up_[enter]) ? kInf : up_[enter] - lo_[enter];
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        ld y = at(i, enter) * dir;  // basic i changes by -y * t
        int b = basis_[i];
        ld t;
        bool to_upper;
        if (y > kPivotTol) {
          ld room = xall[b] - lo_[b];
          t = room > 0.0L ? room / y : 0.0L;
          to_upper = false;
        } else if (y < -kPivotTol && !std::isinf(up_[b])) {
          ld room = up_[b] - xall[b];
          t = room > 0.0L ? room / (-y) : 0.0L;
          to_upper = true;
        } else {
          continue;
        }
        bool strictly_better = t < tmax - 1e-12L;
        bool tie = !strictly_better && t <= tmax + 1e-12L;
        bool take = strictly_better ||
                    (tie && (leave_row < 0 || b < basis_[leave_row]));
        if (take) {
          if (t < tmax) tmax = t;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (std::isinf(tmax))
        throw InternalError("ilp: LP unbounded");

      if (tmax < kPivotTol) {
        if (++stall > 200) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      if (leave_row < 0) {
        // The entering variable runs all the way to its opposite bound.
        for (int i = 0; i < m_; ++i) xall[basis_[i]] -= at(i, enter) * dir * tmax;
        at_upper_[enter] = enter_from_lower ? 1 : 0;
        xall[enter] = nb_value(enter);
        continue;
      }

      // Move the current point before the tableau changes under it.
      for (int i = 0; i < m_; ++i) xall[basis_[i]] -= at(i, enter) * dir * tmax;
      xall[enter] = nb_value(enter) + dir * tmax;

      int leave = basis_[leave_row];
      ld piv = at(leave_row, enter);
      for (int j = 0; j < n_; ++j) at(leave_row, j) /= piv;
      beta_[leave_row] /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        ld f = at(i, enter);
        if (f == 0.0L) continue;
        for (int j = 0; j < n_; ++j) at(i, j) -= f * at(leave_row, j);
        beta_[i] -= f * beta_[leave_row];
      }
      ld de = d[enter];
      if (de != 0.0L)
        for (int j = 0; j < n_; ++j) d[j] -= de * at(leave_row, j);
      basis_[leave_row] = enter;
      in_basis_[enter] = leave_row;
      in_basis_[leave] = -1;
      at_upper_[leave] = leave_to_upper ? 1 : 0;
      xall[leave] = leave_to_upper ? up_[leave] : lo_[leave];
    }
  }

  // After phase 1, swap basic artificials for real variables where possible;
  // rows where that fails are redundant and keep a zero artificial pinned by
  // its [0,0] bounds.
  void pivot_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      int enter = -1;
      for (int j = 0; j < first_art_; ++j) {
        if (in_basis_[j] >= 0) continue;
        if (std::fabs(at(i, j)) > 1e-7L) {
          enter = j;
          break;
        }
      }
      if (enter < 0) continue;
      int leave = basis_[i];
      ld piv = at(i, enter);
      for (int j = 0; j < n_; ++j) at(i, j) /= piv;
      beta_[i] /= piv;
      for (int r = 0; r < m_; ++r) {
        if (r == i) continue;
        ld f = at(r, enter);
        if (f == 0.0L) continue;
        for (int j = 0; j < n_; ++j) at(r, j) -= f * at(i, j);
        beta_[r] -= f * beta_[i];
      }
      basis_[i] = enter;
      in_basis_[enter] = i;
      in_basis_[leave] = -1;
      at_upper_[leave] = 0;
    }
  }

  int nstruct_ = 0, m_ = 0, n_ = 0, first_art_ = 0;
  std::vector<ld> tab_, beta_, lo_, up_, cost_;
  std::vector<int> basis_, in_basis_;
  std::vector<char> at_upper_;
};

LpResult lp_relax(const Problem& p, const std::vector<i64>& lo,
                  const std::vector<i64>& up, bool use_objective) {
  Simplex s(p, lo, up, use_objective);
  return s.run();
}

// ---------------------------------------------------------------------------
// Branch and bound (depth first, down branch first).

struct Search {
  const Problem& p;
  std::vector<i64> lo, up;
  i64 nodes = 0;
  bool has_incumbent = false;
  i64 best_obj = 0;
  std::vector<i64> best_x;
  bool feasibility_only = false;  // stop at the first exact integer point

  explicit Search(const Problem& prob) : p(prob), lo(prob.lower), up(prob.upper) {}

  void charge_node() {
    if (++nodes > p.node_budget)
      throw SizeLimitExceeded("ilp: branch-and-bound node budget of " +
                              std::to_string(p.node_budget) + " exceeded");
  }

  // Returns true when the search may stop (feasibility mode, point found).
  bool dfs() {
    charge_node();
    LpResult lp = lp_relax(p, lo, up, !feasibility_only);
    if (!lp.feasible) return false;
    if (!feasibility_only && has_incumbent) {
      // Objective coefficients are integral, so the subtree optimum is at
      // least ceil(lp objective - margin); prune unless strictly better.
      i64 bound = static_cast<i64>(std::ceil(lp.objective - kBoundMargin));
      if (bound >= best_obj) return false;
    }

    int branch_var = -1;
    ld branch_score = kIntTol;  // most fractional, ties to the lowest index
    for (std::size_t j = 0; j < lp.x.size(); ++j) {
      ld frac = lp.x[j] - std::floor(lp.x[j]);
      ld dist = std::min(frac, 1.0L - frac);
      if (dist > branch_score) {
        branch_score = dist;
        branch_var = static_cast<int>(j);
      }
    }

    if (branch_var < 0) {
      std::vector<i64> cand(lp.x.size());
      for (std::size_t j = 0; j < lp.x.size(); ++j)
        cand[j] = std::clamp(static_cast<i64>(std::llroundl(lp.x[j])), lo[j], up[j]);
      if (!rows_satisfied(p, cand)) return false;  // numerics lied; keep searching
      i64 obj = objective_of(p, cand);
      if (feasibility_only) {
        best_x = std::move(cand);
        has_incumbent = true;
        return true;
      }
      if (!has_incumbent || obj < best_obj) {
        has_incumbent = true;
        best_obj = obj;
        best_x = std::move(cand);
      }
      return false;
    }

    int j = branch_var;
    i64 fl = std::clamp(static_cast<i64>(std::floor(lp.x[j] + 1e-9L)), lo[j],
                        up[j] - 1);
    i64 save_up = up[j];
    up[j] = fl;
    bool done = dfs();
    up[j] = save_up;
    if (done) return true;
    i64 save_lo = lo[j];
    lo[j] = fl + 1;
    done = dfs();
    lo[j] = save_lo;
    return done;
  }
};

}  // namespace

Solution solve(const Problem& p) {
  validate(p);
  Solution sol;

  Search primary(p);
  primary.dfs();
  if (!primary.has_incumbent) {
    sol.status = Status::Infeasible;
    sol.nodes = primary.nodes;
    return sol;
  }
  i64 fstar = primary.best_obj;

  // Lexicographic refinement: pin the objective to its optimum and walk the
  // variables in order, lowering each as far as feasibility allows. Variables
  // the witness already has at their lower bound need no probe.
  Problem pinned = p;
  Row pin;
  for (std::size_t j = 0; j < p.objective.size(); ++j)
    if (p.objective[j] != 0)
      pin.terms.push_back({static_cast<int>(j), p.objective[j]});
  pin.sense = Sense::Eq;
  pin.rhs = fstar;
  pinned.rows.push_back(pin);

  std::vector<i64> witness = primary.best_x;
  i64 nodes_used = primary.nodes;
  std::vector<i64> lo = p.lower, up = p.upper;
  for (std::size_t j = 0; j < witness.size(); ++j) {
    for (i64 t = lo[j]; t < witness[j]; ++t) {
      Search probe(pinned);
      probe.feasibility_only = true;
      probe.lo = lo;
      probe.up = up;
      probe.lo[j] = t;
      probe.up[j] = t;
      probe.nodes = nodes_used;
      bool found = probe.dfs();
      nodes_used = probe.nodes;
      if (found) {
        witness = probe.best_x;
        break;
      }
    }
    lo[j] = witness[j];
    up[j] = witness[j];
  }

  sol.status = Status::Optimal;
  sol.objective = fstar;
  sol.values = witness;
  sol.nodes = nodes_used;
  return sol;
}

Solution brute_force(const Problem& p) {
  validate(p);
  long double points = 1.0L;
  for (std::size_t j = 0; j < p.objective.size(); ++j) {
    points *= static_cast<long double>(p.upper[j] - p.lower[j] + 1);
    if (points > 1e7L)
      throw InputError("ilp: brute force box exceeds 10^7 points");
  }

  Solution sol;
  std::vector<i64> x = p.lower;
  std::size_t n = x.size();
  while (true) {
    if (rows_satisfied(p, x)) {
      i64 obj = objective_of(p, x);
      if (sol.status == Status::Infeasible || obj < sol.objective) {
        sol.status = Status::Optimal;
        sol.objective = obj;
        sol.values = x;
      }
    }
    // Odometer with the last variable fastest: lexicographic order, so the
    // first point kept per objective value is the smallest vector.
    std::size_t j = n;
    while (j > 0 && x[j - 1] == p.upper[j - 1]) {
      x[j - 1] = p.lower[j - 1];
      --j;
    }
    if (j == 0) break;
    ++x[j - 1];
  }
  return sol;
}

}  // namespace itsforge::ilp
