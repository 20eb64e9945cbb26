#include "segmenter.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csp.hpp"
#include "errors.hpp"

namespace itsforge {
namespace {

struct EmployeeGroups {
  std::vector<Id> rep_of;                 // employee id -> representative id
  std::map<Id, std::vector<Id>> members;  // representative -> group, rep first
};

// Instances linked to exactly one employee follow that employee's placement.
bool is_personal(const DatasetInstance& inst) { return inst.employee_ids.size() == 1; }

EmployeeGroups group_employees(const ItsModel& m) {
  std::vector<std::vector<Id>> personal(m.employees.size());
  for (const auto& inst : m.instances)
    if (is_personal(inst)) personal[inst.employee_ids[0]].push_back(inst.collection_id);
  using Key = std::tuple<std::string, std::vector<Id>, std::vector<Id>>;
  std::map<Key, Id> rep_of_key;
  EmployeeGroups g;
  g.rep_of.resize(m.employees.size());
  for (const auto& e : m.employees) {
    std::vector<Id> variants;
    for (const auto& inst : m.installations)
      if (inst.owner == OwnerKind::Employee && inst.employee_id == e.id)
        variants.push_back(inst.variant_id);
    std::sort(variants.begin(), variants.end());
    std::sort(personal[e.id].begin(), personal[e.id].end());
    Key key{e.subgroup_id, variants, personal[e.id]};
    auto [it, fresh] = rep_of_key.try_emplace(key, e.id);
    g.rep_of[e.id] = it->second;
    g.members[it->second].push_back(e.id);
  }
  return g;
}

class Segmenter {
 public:
  Segmenter(ItsModel& m, const InputParameters& params)
      : m_(m), params_(params), groups_(group_employees(m)) {
    for (const auto& inst : m_.installations)
      if (inst.owner == OwnerKind::Server || groups_.rep_of[inst.employee_id] == inst.employee_id)
        objects_.push_back({false, inst.id});
    for (const auto& inst : m_.instances)
      if (!is_personal(inst) || groups_.rep_of[inst.employee_ids[0]] == inst.employee_ids[0])
        objects_.push_back({true, inst.id});
    for (size_t i = 0; i < objects_.size(); ++i) oidx_[objects_[i]] = static_cast<int>(i);
    for (const auto& rule : params_.network_policies) {
      // Restrictive set rules must see dependency stacks: packing later copies
      // those templates onto the member's computer in the same segments. The
      // exposure allowlist stays literal, widening it would weaken the rule.
      bool stack_aware = rule.kind == RuleKind::RequireDistinctNetworksForSets ||
                         rule.kind == RuleKind::RequireSameNetworksForSets ||
                         rule.kind == RuleKind::RequireCommonNetworksForSets;
      auto resolve = stack_aware ? resolve_queries_with_dependencies : resolve_queries;
      rule_a_.push_back(to_indexes(resolve(m_, rule.set_a)));
      rule_b_.push_back(to_indexes(resolve(m_, rule.set_b)));
    }
  }

  void run() {
    for (int k = 1; k <= params_.max_segments; ++k) {
      k_ = k;
      solver_ = csp::Solver{};
      nvars_ = static_cast<int>(objects_.size()) * k + k;
      for (int i = 0; i < nvars_; ++i) solver_.add_var();
      encode();
      if (solver_.solve() == csp::Result::Sat) {
        snapshot();
        prune();
        materialize();
        return;
      }
    }
    throw SegmentationInfeasible("no segmentation within " +
                                 std::to_string(params_.max_segments) + " segments");
  }

 private:
  int mvar(int obj, int s) const { return obj * k_ + s; }
  int fvar(int s) const { return static_cast<int>(objects_.size()) * k_ + s; }

  std::vector<int> to_indexes(const std::vector<ObjectRef>& refs) const {
    std::vector<int> out;
    for (const auto& r : refs) {
      auto it = oidx_.find(r);
      if (it != oidx_.end()) out.push_back(it->second);
    }
    return out;
  }

  std::vector<int> linked_objects(const DatasetInstance& inst) const {
    std::vector<int> out;
    for (Id i : inst.installation_ids) {
      auto it = oidx_.find({false, i});
      if (it != oidx_.end()) out.push_back(it->second);
    }
    return out;
  }

  void encode() {
    const int nobj = static_cast<int>(objects_.size());
    // Every object lives somewhere; later segments are used only after
    // earlier ones, which cuts renumbering symmetry.
    for (int o = 0; o < nobj; ++o) {
      csp::Clause base;
      for (int s = 0; s < k_; ++s) base.terms.push_back({csp::pos(mvar(o, s))});
      solver_.add_clause(base);
      for (int s = 1; s < k_; ++s) {
        csp::Clause used;
        used.terms.push_back({csp::neg(mvar(o, s))});
        for (int p = 0; p < nobj; ++p) used.terms.push_back({csp::pos(mvar(p, s - 1))});
        solver_.add_clause(used);
      }
    }

    // Dependency-only software never floats alone.
    for (int o = 0; o < nobj; ++o) {
      if (objects_[o].is_instance) continue;
      const auto& inst = m_.installations[objects_[o].id];
      if (!m_.templates[m_.variants[inst.variant_id].template_id].dependency_only()) continue;
      std::vector<int> dependents;
      for (int p = 0; p < nobj; ++p) {
        if (objects_[p].is_instance || p == o) continue;
        const auto& other = m_.installations[objects_[p].id];
        const auto& plat = m_.variants[other.variant_id].platform;
        if (std::count(plat.begin(), plat.end(), m_.variants[inst.variant_id].template_id))
          dependents.push_back(p);
      }
      for (int s = 0; s < k_; ++s) {
        csp::Clause c;
        c.terms.push_back({csp::neg(mvar(o, s))});
        for (int p : dependents) c.terms.push_back({csp::pos(mvar(p, s))});
        solver_.add_clause(c);
      }
    }

    // Instances sit with their software: every segment of an instance holds a
    // linked installation, and every linked workstation client can reach it.
    for (int o = 0; o < nobj; ++o) {
      if (!objects_[o].is_instance) continue;
      const auto& inst = m_.instances[objects_[o].id];
      auto linked = linked_objects(inst);
      if (linked.empty()) throw InternalError("instance with no reachable installation");
      for (int s = 0; s < k_; ++s) {
        csp::Clause c;
        c.terms.push_back({csp::neg(mvar(o, s))});
        for (int p : linked) c.terms.push_back({csp::pos(mvar(p, s))});
        solver_.add_clause(c);
      }
      for (int p : linked) {
        if (m_.installations[objects_[p].id].owner != OwnerKind::Employee) continue;
        csp::Clause share;
        for (int s = 0; s < k_; ++s)
          share.terms.push_back({csp::pos(mvar(o, s)), csp::pos(mvar(p, s))});
        solver_.add_clause(share);
      }
    }

    // Whatever supports a provided external service must face the internet.
    std::set<int> supporting;
    for (const auto& ps : m_.services)
      for (Id i : ps.installation_ids) {
        auto it = oidx_.find({false, i});
        if (it != oidx_.end()) supporting.insert(it->second);
      }
    for (int o : supporting) add_faces_internet(o);
    for (int o = 0; o < static_cast<int>(objects_.size()); ++o)
      if (objects_[o].is_instance && !m_.instances[objects_[o].id].service_ids.empty())
        add_faces_internet(o);

    for (size_t r = 0; r < params_.network_policies.size(); ++r) encode_rule(r);
  }

  void add_faces_internet(int o) {
    csp::Clause c;
    for (int s = 0; s < k_; ++s) c.terms.push_back({csp::pos(mvar(o, s)), csp::pos(fvar(s))});
    solver_.add_clause(c);
  }

  void encode_rule(size_t r) {
    const auto& rule = params_.network_policies[r];
    const auto& A = rule_a_[r];
    const auto& B = rule_b_[r];
    switch (rule.kind) {
      case RuleKind::RequireDistinctNetworksForSets:
        for (int a : A)
          for (int b : B)
            for (int s = 0; s < k_; ++s) {
              if (a == b)
                solver_.add_unit(mvar(a, s), false);
              else
                solver_.forbid_both(mvar(a, s), mvar(b, s));
            }
        break;
      case RuleKind::RequireSameNetworksForSets: {
        std::vector<int> all = A;
        all.insert(all.end(), B.begin(), B.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        for (size_t i = 1; i < all.size(); ++i)
          for (int s = 0; s < k_; ++s) {
            solver_.require_implication(mvar(all[i - 1], s), mvar(all[i], s));
            solver_.require_implication(mvar(all[i], s), mvar(all[i - 1], s));
          }
        break;
      }
      case RuleKind::RequireCommonNetworksForSets:
        for (int a : A)
          for (int b : B) {
            if (a == b) continue;
            csp::Clause c;
            for (int s = 0; s < k_; ++s)
              c.terms.push_back({csp::pos(mvar(a, s)), csp::pos(mvar(b, s))});
            solver_.add_clause(c);
          }
        break;
      case RuleKind::RequireCollocatedLocalDependencies:
        for (size_t o = 0; o < objects_.size(); ++o) {
          if (objects_[o].is_instance) continue;
          const auto& inst = m_.installations[objects_[o].id];
          for (Id dep : m_.variants[inst.variant_id].platform) {
            csp::Clause c;
            for (size_t p = 0; p < objects_.size(); ++p) {
              if (objects_[p].is_instance || p == o) continue;
              if (m_.variants[m_.installations[objects_[p].id].variant_id].template_id != dep)
                continue;
              for (int s = 0; s < k_; ++s)
                c.terms.push_back(
                    {csp::pos(mvar(static_cast<int>(o), s)), csp::pos(mvar(static_cast<int>(p), s))});
            }
            if (c.terms.empty()) throw InternalError("dependency installation missing");
            solver_.add_clause(c);
          }
        }
        break;
      case RuleKind::LimitAllowedProtectionLevelRange:
        for (size_t o = 0; o < objects_.size(); ++o) {
          if (!objects_[o].is_instance) continue;
          for (size_t p = o + 1; p < objects_.size(); ++p) {
            if (!objects_[p].is_instance) continue;
            auto level = [&](size_t i) {
              return m_.collections[m_.instances[objects_[i].id].collection_id].protection_level;
            };
            if (std::abs(level(o) - level(p)) <= rule.allowed_difference) continue;
            for (int s = 0; s < k_; ++s)
              solver_.forbid_both(mvar(static_cast<int>(o), s), mvar(static_cast<int>(p), s));
          }
        }
        break;
      case RuleKind::AllowInternetExposureOnlyFor: {
        std::set<int> allowed(A.begin(), A.end());
        allowed.insert(B.begin(), B.end());
        for (size_t o = 0; o < objects_.size(); ++o) {
          if (objects_[o].is_instance) continue;
          const auto& t = m_.template_of_installation(objects_[o].id);
          if (t.provides_network_services.empty() || allowed.count(static_cast<int>(o)))
            continue;
          for (int s = 0; s < k_; ++s)
            solver_.forbid_both(mvar(static_cast<int>(o), s), fvar(s));
        }
        break;
      }
    }
  }

  void snapshot() {
    member_.assign(objects_.size(), std::vector<char>(k_, 0));
    facing_.assign(k_, 0);
    for (size_t o = 0; o < objects_.size(); ++o)
      for (int s = 0; s < k_; ++s) member_[o][s] = solver_.value(mvar(static_cast<int>(o), s));
    for (int s = 0; s < k_; ++s) facing_[s] = solver_.value(fvar(s));
  }

  bool still_feasible() {
    solver_.push();
    for (size_t o = 0; o < objects_.size(); ++o)
      for (int s = 0; s < k_; ++s)
        solver_.add_unit(mvar(static_cast<int>(o), s), member_[o][s] != 0);
    for (int s = 0; s < k_; ++s) solver_.add_unit(fvar(s), facing_[s] != 0);
    bool ok = solver_.solve() == csp::Result::Sat;
    solver_.pop();
    return ok;
  }

  // Drops redundant facing flags, then redundant instance and installation
  // memberships, highest segment first, until a full sweep changes nothing.
  void prune() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = k_ - 1; s >= 0; --s) {
        if (!facing_[s]) continue;
        facing_[s] = 0;
        if (still_feasible())
          changed = true;
        else
          facing_[s] = 1;
      }
      for (int pass = 0; pass < 2; ++pass)
        for (size_t o = 0; o < objects_.size(); ++o) {
          if (objects_[o].is_instance != (pass == 0)) continue;
          int degree = 0;
          for (int s = 0; s < k_; ++s) degree += member_[o][s];
          for (int s = k_ - 1; s >= 0 && degree > 1; --s) {
            if (!member_[o][s]) continue;
            member_[o][s] = 0;
            if (still_feasible()) {
              changed = true;
              --degree;
            } else {
              member_[o][s] = 1;
            }
          }
        }
    }
  }

  void materialize() {
    for (int s = 0; s < k_; ++s) {
      NetworkSegment seg;
      seg.id = s;
      seg.name = "segment_" + std::to_string(s);
      seg.internet_facing = facing_[s];
      m_.segments.push_back(std::move(seg));
    }
    std::vector<int> population(k_, 0);
    for (size_t o = 0; o < objects_.size(); ++o) {
      std::vector<Id> segs;
      for (int s = 0; s < k_; ++s)
        if (member_[o][s]) {
          segs.push_back(s);
          ++population[s];
        }
      if (objects_[o].is_instance)
        m_.instances[objects_[o].id].segment_ids = segs;
      else
        m_.installations[objects_[o].id].segment_ids = segs;
    }
    for (int s = 0; s < k_; ++s)
      if (!population[s]) throw InternalError("empty segment after pruning");

    // Copy representative placements to the rest of each employee group.
    std::vector<std::vector<Id>> installs_of(m_.employees.size());
    std::vector<std::vector<Id>> personal_of(m_.employees.size());
    for (const auto& inst : m_.installations)
      if (inst.owner == OwnerKind::Employee) installs_of[inst.employee_id].push_back(inst.id);
    for (const auto& inst : m_.instances)
      if (is_personal(inst)) personal_of[inst.employee_ids[0]].push_back(inst.id);
    auto by_variant = [&](std::vector<Id>& ids) {
      std::sort(ids.begin(), ids.end(), [&](Id a, Id b) {
        return m_.installations[a].variant_id < m_.installations[b].variant_id;
      });
    };
    auto by_collection = [&](std::vector<Id>& ids) {
      std::sort(ids.begin(), ids.end(), [&](Id a, Id b) {
        return std::pair(m_.instances[a].collection_id, a) <
               std::pair(m_.instances[b].collection_id, b);
      });
    };
    for (auto& [rep, members] : groups_.members) {
      by_variant(installs_of[rep]);
      by_collection(personal_of[rep]);
      for (Id e : members) {
        if (e == rep) continue;
        by_variant(installs_of[e]);
        by_collection(personal_of[e]);
        if (installs_of[e].size() != installs_of[rep].size() ||
            personal_of[e].size() != personal_of[rep].size())
          throw InternalError("employee group not homogeneous");
        for (size_t i = 0; i < installs_of[e].size(); ++i)
          m_.installations[installs_of[e][i]].segment_ids =
              m_.installations[installs_of[rep][i]].segment_ids;
        for (size_t i = 0; i < personal_of[e].size(); ++i)
          m_.instances[personal_of[e][i]].segment_ids =
              m_.instances[personal_of[rep][i]].segment_ids;
      }
    }
    for (const auto& inst : m_.installations)
      if (inst.segment_ids.empty()) throw InternalError("installation without segment");
    for (const auto& inst : m_.instances)
      if (inst.segment_ids.empty()) throw InternalError("instance without segment");
  }

  ItsModel& m_;
  const InputParameters& params_;
  EmployeeGroups groups_;
  std::vector<ObjectRef> objects_;
  std::map<ObjectRef, int> oidx_;
  std::vector<std::vector<int>> rule_a_, rule_b_;
  csp::Solver solver_;
  int k_ = 0;
  int nvars_ = 0;
  std::vector<std::vector<char>> member_;
  std::vector<char> facing_;
};

}  // namespace

void segment_network(ItsModel& m, const InputParameters& params) {
  Segmenter(m, params).run();
}

}  // namespace itsforge
