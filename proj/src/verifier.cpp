#include "verifier.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "util.hpp"

namespace itsforge {
namespace {

bool internet_satisfies(const std::string& group) {
  return util::full_match("Internet", group);
}

class Checker {
 public:
  Checker(const ItsModel& m, const InputParameters& params) : m_(m), params_(params) {}

  std::vector<Violation> run() {
    check_structure();
    if (!violations_.empty()) return violations_;  // later checks assume sane ids
    shards_ = derive_shards();
    check_parameters();
    check_computers();
    check_selection();
    check_default_rules();
    check_policies();
    check_datasets();
    check_credentials();
    check_firewall();
    return violations_;
  }

 private:
  template <typename... Args>
  void flag(const std::string& code, Args&&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    violations_.push_back({code, msg.str()});
  }

  bool valid_index(Id id, size_t size) const { return id >= 0 && static_cast<size_t>(id) < size; }

  static bool sorted_unique(const std::vector<Id>& ids) {
    return std::adjacent_find(ids.begin(), ids.end(),
                              [](Id a, Id b) { return a >= b; }) == ids.end();
  }

  void check_structure() {
    auto dense = [&](auto const& items, const char* what) {
      for (size_t i = 0; i < items.size(); ++i)
        if (items[i].id != static_cast<Id>(i)) flag("structure", what, " ids not dense at ", i);
    };
    dense(m_.templates, "template");
    dense(m_.variants, "variant");
    dense(m_.employees, "employee");
    dense(m_.services, "service");
    dense(m_.collections, "collection");
    dense(m_.installations, "installation");
    dense(m_.instances, "instance");
    dense(m_.segments, "segment");
    dense(m_.computers, "computer");
    dense(m_.credentials, "credential");
    dense(m_.firewall_rules, "firewall rule");

    for (const auto& v : m_.variants) {
      if (!valid_index(v.template_id, m_.templates.size())) {
        flag("structure", "variant ", v.id, " has invalid template");
        continue;
      }
      const auto& t = m_.templates[v.template_id];
      if (v.platform.size() != t.requires_local_software.size()) {
        flag("structure", "variant ", v.id, " platform arity mismatch");
        continue;
      }
      for (size_t i = 0; i < v.platform.size(); ++i) {
        if (!valid_index(v.platform[i], m_.templates.size())) {
          flag("structure", "variant ", v.id, " has invalid platform");
        } else if (!util::full_match(m_.templates[v.platform[i]].cpe_idn,
                                     t.requires_local_software[i])) {
          flag("structure", "variant ", v.id, " platform does not match dependency pattern");
        }
      }
    }
    for (const auto& inst : m_.installations) {
      if (!valid_index(inst.variant_id, m_.variants.size()))
        flag("structure", "installation ", inst.id, " has invalid variant");
      if (inst.owner == OwnerKind::Employee) {
        if (!valid_index(inst.employee_id, m_.employees.size()))
          flag("structure", "installation ", inst.id, " has invalid employee");
      } else if (inst.employee_id != kNone) {
        flag("structure", "server installation ", inst.id, " has an employee");
      }
      if (!sorted_unique(inst.segment_ids))
        flag("structure", "installation ", inst.id, " segments not sorted");
      for (Id s : inst.segment_ids)
        if (!valid_index(s, m_.segments.size()))
          flag("structure", "installation ", inst.id, " has invalid segment");
      if (inst.segment_ids.empty()) flag("segment_missing", "installation ", inst.id);
      if (!valid_index(inst.computer_id, m_.computers.size()))
        flag("structure", "installation ", inst.id, " not placed on a computer");
    }
    for (const auto& inst : m_.instances) {
      if (!valid_index(inst.collection_id, m_.collections.size()))
        flag("structure", "instance ", inst.id, " has invalid collection");
      for (Id e : inst.employee_ids)
        if (!valid_index(e, m_.employees.size()))
          flag("structure", "instance ", inst.id, " has invalid employee");
      for (Id s : inst.service_ids)
        if (!valid_index(s, m_.services.size()))
          flag("structure", "instance ", inst.id, " has invalid service");
      for (Id i : inst.installation_ids)
        if (!valid_index(i, m_.installations.size()))
          flag("structure", "instance ", inst.id, " has invalid installation");
      if (!sorted_unique(inst.employee_ids) || !sorted_unique(inst.service_ids) ||
          !sorted_unique(inst.installation_ids) || !sorted_unique(inst.segment_ids))
        flag("structure", "instance ", inst.id, " links not sorted");
      for (Id s : inst.segment_ids)
        if (!valid_index(s, m_.segments.size()))
          flag("structure", "instance ", inst.id, " has invalid segment");
      if (inst.segment_ids.empty()) flag("segment_missing", "instance ", inst.id);
      if (!valid_index(inst.primary_store, m_.installations.size()) ||
          !std::count(inst.installation_ids.begin(), inst.installation_ids.end(),
                      inst.primary_store))
        flag("structure", "instance ", inst.id, " has no valid primary store");
    }
    std::vector<Id> placed(m_.installations.size(), kNone);
    for (const auto& comp : m_.computers) {
      if (comp.kind == ComputerKind::Workstation) {
        if (!valid_index(comp.employee_id, m_.employees.size()))
          flag("structure", "workstation ", comp.id, " has invalid owner");
      } else if (comp.employee_id != kNone) {
        flag("structure", "server ", comp.id, " has an owner");
      }
      if (!sorted_unique(comp.installation_ids) || comp.installation_ids.empty())
        flag("structure", "computer ", comp.id, " installation list invalid");
      for (Id i : comp.installation_ids) {
        if (!valid_index(i, m_.installations.size())) {
          flag("structure", "computer ", comp.id, " has invalid installation");
          continue;
        }
        if (placed[i] != kNone) flag("structure", "installation ", i, " on two computers");
        placed[i] = comp.id;
        if (m_.installations[i].computer_id != comp.id)
          flag("structure", "installation ", i, " computer link mismatch");
        if (m_.installations[i].segment_ids != comp.segment_ids)
          flag("computer_segments", "installation ", i, " segments differ from computer ",
               comp.id);
        bool owner_matches = comp.kind == ComputerKind::Workstation
                                 ? m_.installations[i].owner == OwnerKind::Employee &&
                                       m_.installations[i].employee_id == comp.employee_id
                                 : m_.installations[i].owner == OwnerKind::Server;
        if (!owner_matches) flag("structure", "installation ", i, " owner mismatch");
      }
    }
    for (size_t i = 0; i < m_.installations.size(); ++i)
      if (placed[i] == kNone) flag("structure", "installation ", i, " not on any computer");
    for (const auto& c : m_.credentials) {
      if (!valid_index(c.stored_on, m_.computers.size()))
        flag("structure", "credential ", c.id, " stored nowhere");
      if (c.accepted_by.empty()) flag("structure", "credential ", c.id, " accepted by nothing");
      for (Id i : c.accepted_by)
        if (!valid_index(i, m_.installations.size()))
          flag("structure", "credential ", c.id, " accepted by invalid installation");
      for (Id e : c.used_by)
        if (!valid_index(e, m_.employees.size()))
          flag("structure", "credential ", c.id, " used by invalid employee");
    }
    for (const auto& r : m_.firewall_rules) {
      auto endpoint_ok = [&](Id i) {
        return i == kInternet || valid_index(i, m_.installations.size());
      };
      if (!endpoint_ok(r.from_installation) || !endpoint_ok(r.to_installation))
        flag("structure", "firewall rule ", r.id, " has invalid endpoint");
    }
  }

  void check_parameters() {
    std::map<std::string, std::int64_t> expected(params_.erss.begin(), params_.erss.end()),
        actual;
    for (const auto& e : m_.employees) ++actual[e.subgroup_id];
    if (expected != actual) flag("employee_count", "employees do not match the requested groups");

    if (m_.collections.size() != params_.data_collections.size()) {
      flag("collection_params", "collection list does not match parameters");
    } else {
      for (size_t i = 0; i < m_.collections.size(); ++i) {
        const auto& a = m_.collections[i];
        const auto& b = params_.data_collections[i];
        if (a.identifier != b.identifier || a.protection_level != b.protection_level ||
            a.storage != b.storage || a.employee_split != b.employee_split ||
            a.service_split != b.service_split || a.software_split != b.software_split ||
            a.linked_services != b.linked_services || a.linked_subgroups != b.linked_subgroups)
          flag("collection_params", "collection ", a.identifier, " differs from parameters");
      }
    }
    std::vector<std::string> service_ids;
    for (const auto& s : m_.services) service_ids.push_back(s.service_id);
    if (service_ids != params_.provided_external_services)
      flag("service_params", "provided services do not match parameters");
    if (static_cast<std::int64_t>(m_.segments.size()) > params_.max_segments)
      flag("structure", "more segments than allowed");
  }

  // Serving structure, re-derived: shards, clients and expected loads.
  struct Shards {
    std::map<Id, std::vector<Id>> of_variant;           // ordered by install id
    std::map<Id, std::vector<Id>> clients;              // ordered by install id
    std::map<Id, std::int64_t> capacity;                // 0 = unlimited
    std::map<std::pair<Id, Id>, Id> target;             // (client, variant) -> shard install
    std::map<Id, std::int64_t> load;                    // install -> client count
  };

  std::set<Id> originals() const {
    std::map<std::pair<Id, Id>, Id> lowest;
    for (const auto& inst : m_.installations) {
      std::pair<Id, Id> key{inst.owner == OwnerKind::Employee ? inst.employee_id : kNone,
                            inst.variant_id};
      auto [it, fresh] = lowest.try_emplace(key, inst.id);
      if (!fresh) it->second = std::min(it->second, inst.id);
    }
    std::set<Id> out;
    for (const auto& [key, id] : lowest) out.insert(id);
    return out;
  }

  std::int64_t stack_quota(Id variant) const {
    std::map<Id, Id> server_variant;
    for (const auto& inst : m_.installations)
      if (inst.owner == OwnerKind::Server) {
        auto& slot =
            server_variant.try_emplace(m_.variants[inst.variant_id].template_id, inst.variant_id)
                .first->second;
        slot = std::min(slot, inst.variant_id);
      }
    std::set<Id> seen;
    std::vector<Id> queue(m_.variants[variant].platform.begin(),
                          m_.variants[variant].platform.end());
    std::int64_t total = 0;
    while (!queue.empty()) {
      Id tmpl = queue.back();
      queue.pop_back();
      if (!seen.insert(tmpl).second) continue;
      total += m_.templates[tmpl].hardware_quota;
      auto it = server_variant.find(tmpl);
      if (it == server_variant.end()) return total;  // flagged elsewhere
      for (Id dep : m_.variants[it->second].platform) queue.push_back(dep);
    }
    return total;
  }

  Shards derive_shards() {
    Shards sh;
    for (const auto& inst : m_.installations)
      if (inst.owner == OwnerKind::Server &&
          !m_.template_of_installation(inst.id).provides_network_services.empty())
        sh.of_variant[inst.variant_id].push_back(inst.id);
    auto provider = [&](const std::string& group) -> Id {
      for (const auto& [v, ids] : sh.of_variant)
        if (util::matches_any(m_.template_of_variant(v).provides_network_services, group))
          return v;
      return kNone;
    };
    auto orig = originals();
    std::set<std::pair<Id, Id>> pairs;
    for (const auto& inst : m_.installations) {
      if (!orig.count(inst.id)) continue;
      for (const auto& group : m_.template_of_installation(inst.id).requires_network_services) {
        if (internet_satisfies(group)) continue;
        Id pv = provider(group);
        if (pv == kNone) {
          flag("network_requirement_unserved", "no provider for '", group, "' needed by ",
               inst.id);
          continue;
        }
        if (sh.of_variant[pv][0] == inst.id) continue;
        pairs.insert({inst.id, pv});
      }
    }
    for (const auto& [c, pv] : pairs) sh.clients[pv].push_back(c);
    for (const auto& [pv, clients] : sh.clients) {
      const auto& t = m_.template_of_variant(pv);
      std::int64_t cap = 0;
      std::int64_t n = static_cast<std::int64_t>(clients.size());
      std::int64_t nshards = 1;
      if (t.hardware_quota_per_client > 0) {
        cap = (params_.hq_limit - stack_quota(pv) - t.hardware_quota) /
              t.hardware_quota_per_client;
        if (cap <= 0) {
          flag("quota_exceeded", "clients of ", t.cpe_idn, " cannot fit at all");
          continue;
        }
        nshards = (n + cap - 1) / cap;
      }
      sh.capacity[pv] = cap;
      if (static_cast<std::int64_t>(sh.of_variant[pv].size()) != nshards)
        flag("shard_count", t.cpe_idn, " has ", sh.of_variant[pv].size(), " shards, expected ",
             nshards);
      for (std::int64_t i = 0; i < n; ++i) {
        int idx = cap ? static_cast<int>(i / cap) : 0;
        if (idx < static_cast<int>(sh.of_variant[pv].size())) {
          Id shard = sh.of_variant[pv][idx];
          sh.target[{clients[i], pv}] = shard;
          ++sh.load[shard];
        }
      }
    }
    return sh;
  }

  void check_computers() {
    const auto& sh = shards_;
    for (const auto& comp : m_.computers) {
      std::set<Id> templates_here;
      std::int64_t used = 0;
      for (Id i : comp.installation_ids) {
        const auto& t = m_.template_of_installation(i);
        templates_here.insert(m_.variants[m_.installations[i].variant_id].template_id);
        used += t.hardware_quota;
        auto it = sh.load.find(i);
        if (it != sh.load.end()) used += t.hardware_quota_per_client * it->second;
      }
      if (used != comp.quota_used)
        flag("quota_mismatch", "computer ", comp.id, " reports ", comp.quota_used, ", actual ",
             used);
      if (used > params_.hq_limit)
        flag("quota_exceeded", "computer ", comp.id, " uses ", used, " of ", params_.hq_limit);
      for (Id i : comp.installation_ids)
        for (Id dep : m_.variants[m_.installations[i].variant_id].platform)
          if (!templates_here.count(dep))
            flag("dependency_missing", "installation ", i, " lacks ", m_.templates[dep].cpe_idn,
                 " on computer ", comp.id);
    }
  }

  void check_selection() {
    for (const auto& ps : m_.services) {
      for (const auto& group : ps.required_network_services) {
        if (internet_satisfies(group)) continue;
        bool covered = false;
        for (Id i : ps.installation_ids)
          if (util::matches_any(m_.template_of_installation(i).provides_network_services, group))
            covered = true;
        if (!covered) flag("service_unsupported", ps.service_id, " lacks '", group, "'");
      }
      for (Id i : ps.installation_ids)
        if (m_.installations[i].owner != OwnerKind::Server)
          flag("structure", "service ", ps.service_id, " supported by a workstation");
    }
    std::set<Id> server_templates;
    for (const auto& inst : m_.installations)
      if (inst.owner == OwnerKind::Server)
        server_templates.insert(m_.variants[inst.variant_id].template_id);
    for (const auto& inst : m_.installations)
      for (const auto& group : m_.template_of_installation(inst.id).requires_network_services) {
        if (internet_satisfies(group)) continue;
        bool served = false;
        for (Id tmpl : server_templates)
          if (util::matches_any(m_.templates[tmpl].provides_network_services, group))
            served = true;
        if (!served)
          flag("network_requirement_unserved", "installation ", inst.id, " needs '", group, "'");
      }
  }

  void check_default_rules() {
    for (const auto& inst : m_.installations) {
      const auto& t = m_.template_of_installation(inst.id);
      if (!t.dependency_only()) continue;
      Id tmpl = m_.variants[inst.variant_id].template_id;
      for (Id s : inst.segment_ids) {
        bool justified = false;
        for (const auto& other : m_.installations) {
          if (other.id == inst.id) continue;
          const auto& plat = m_.variants[other.variant_id].platform;
          if (!std::count(plat.begin(), plat.end(), tmpl)) continue;
          if (std::count(other.segment_ids.begin(), other.segment_ids.end(), s)) {
            justified = true;
            break;
          }
        }
        if (!justified)
          flag("dependency_only_unjustified", "installation ", inst.id, " alone in segment ", s);
      }
    }
    for (const auto& inst : m_.instances) {
      for (Id s : inst.segment_ids) {
        bool anchored = false;
        for (Id i : inst.installation_ids)
          if (std::count(m_.installations[i].segment_ids.begin(),
                         m_.installations[i].segment_ids.end(), s))
            anchored = true;
        if (!anchored) flag("instance_orphan_segment", "instance ", inst.id, " in segment ", s);
      }
      for (Id i : inst.installation_ids)
        if (m_.installations[i].owner == OwnerKind::Employee &&
            !segments_intersect(inst.segment_ids, m_.installations[i].segment_ids))
          flag("instance_client_separated", "instance ", inst.id, " unreachable from ", i);
      if (!inst.service_ids.empty()) {
        bool facing = false;
        for (Id s : inst.segment_ids) facing |= m_.segments[s].internet_facing;
        if (!facing) flag("service_not_internet_facing", "instance ", inst.id);
      }
    }
    for (const auto& ps : m_.services)
      for (Id i : ps.installation_ids) {
        bool facing = false;
        for (Id s : m_.installations[i].segment_ids) facing |= m_.segments[s].internet_facing;
        if (!facing)
          flag("service_not_internet_facing", "installation ", i, " of ", ps.service_id);
      }
  }

  void check_policies() {
    for (const auto& rule : params_.network_policies) {
      auto A = resolve_queries(m_, rule.set_a);
      auto B = resolve_queries(m_, rule.set_b);
      auto segs = [&](const ObjectRef& r) -> const std::vector<Id>& {
        return r.is_instance ? m_.instances[r.id].segment_ids
                             : m_.installations[r.id].segment_ids;
      };
      auto name = [](const ObjectRef& r) {
        return std::string(r.is_instance ? "instance " : "installation ") + std::to_string(r.id);
      };
      switch (rule.kind) {
        case RuleKind::RequireDistinctNetworksForSets:
          for (const auto& a : A)
            for (const auto& b : B)
              if (segments_intersect(segs(a), segs(b)))
                flag("rule_distinct_networks", name(a), " shares a segment with ", name(b));
          break;
        case RuleKind::RequireSameNetworksForSets: {
          std::vector<ObjectRef> all = A;
          all.insert(all.end(), B.begin(), B.end());
          for (size_t i = 1; i < all.size(); ++i)
            if (segs(all[i]) != segs(all[0]))
              flag("rule_same_networks", name(all[i]), " differs from ", name(all[0]));
          break;
        }
        case RuleKind::RequireCommonNetworksForSets:
          for (const auto& a : A)
            for (const auto& b : B)
              if (!(a == b) && !segments_intersect(segs(a), segs(b)))
                flag("rule_common_networks", name(a), " shares nothing with ", name(b));
          break;
        case RuleKind::RequireCollocatedLocalDependencies:
          for (const auto& inst : m_.installations)
            for (Id dep : m_.variants[inst.variant_id].platform) {
              bool nearby = false;
              for (const auto& other : m_.installations)
                if (other.id != inst.id &&
                    m_.variants[other.variant_id].template_id == dep &&
                    segments_intersect(inst.segment_ids, other.segment_ids))
                  nearby = true;
              if (!nearby)
                flag("rule_collocated_dependencies", "installation ", inst.id, " far from ",
                     m_.templates[dep].cpe_idn);
            }
          break;
        case RuleKind::LimitAllowedProtectionLevelRange:
          for (const auto& a : m_.instances)
            for (const auto& b : m_.instances) {
              if (a.id >= b.id) continue;
              int diff = std::abs(m_.collections[a.collection_id].protection_level -
                                  m_.collections[b.collection_id].protection_level);
              if (diff > rule.allowed_difference &&
                  segments_intersect(a.segment_ids, b.segment_ids))
                flag("rule_protection_range", "instances ", a.id, " and ", b.id,
                     " differ by ", diff);
            }
          break;
        case RuleKind::AllowInternetExposureOnlyFor: {
          std::set<ObjectRef> allowed(A.begin(), A.end());
          allowed.insert(B.begin(), B.end());
          for (const auto& inst : m_.installations) {
            if (m_.template_of_installation(inst.id).provides_network_services.empty()) continue;
            if (allowed.count({false, inst.id})) continue;
            for (Id s : inst.segment_ids)
              if (m_.segments[s].internet_facing)
                flag("rule_internet_exposure", "installation ", inst.id,
                     " exposed in segment ", s);
          }
          break;
        }
      }
    }
  }

  // Re-derives every dataset instance of a collection and compares with the
  // model, shard redirection included.
  void check_datasets() {
    const auto& sh = shards_;
    struct Expected {
      std::vector<Id> employees, services, links;
      Id store;
      bool operator<(const Expected& o) const {
        return std::tie(employees, services, links, store) <
               std::tie(o.employees, o.services, o.links, o.store);
      }
    };
    for (const auto& c : m_.collections) {
      std::vector<Id> employees, services, db_cat, srv_cat, cli_cat;
      for (const auto& e : m_.employees)
        if (std::count(c.linked_subgroups.begin(), c.linked_subgroups.end(), e.subgroup_id))
          employees.push_back(e.id);
      for (const auto& s : m_.services)
        if (std::count(c.linked_services.begin(), c.linked_services.end(), s.service_id))
          services.push_back(s.id);
      auto orig = originals();
      for (const auto& inst : m_.installations) {
        if (!orig.count(inst.id)) continue;  // shards and copies never split
        const auto& t = m_.template_of_installation(inst.id);
        if (!t.supports_data_type(c.identifier)) continue;
        if (inst.owner == OwnerKind::Server)
          (t.database ? db_cat : srv_cat).push_back(inst.id);
        else if (std::count(employees.begin(), employees.end(), inst.employee_id))
          cli_cat.push_back(inst.id);
      }

      std::vector<Expected> drafts{{{}, {}, {}, kNone}};
      if (!employees.empty()) {
        std::vector<Expected> next;
        if (c.employee_split == EmployeeSplit::PerEmployee) {
          for (Id e : employees) next.push_back({{e}, {}, {}, kNone});
        } else if (c.employee_split == EmployeeSplit::PerErs) {
          std::string subgroup;
          for (Id e : employees) {
            if (next.empty() || m_.employees[e].subgroup_id != subgroup) {
              subgroup = m_.employees[e].subgroup_id;
              next.push_back({{}, {}, {}, kNone});
            }
            next.back().employees.push_back(e);
          }
        } else {
          next.push_back({employees, {}, {}, kNone});
        }
        drafts = std::move(next);
      }
      if (!services.empty()) {
        std::vector<Expected> next;
        for (const auto& d : drafts) {
          if (c.service_split == ServiceSplit::PerService) {
            for (Id s : services) {
              auto e = d;
              e.services = {s};
              next.push_back(std::move(e));
            }
          } else {
            auto e = d;
            e.services = services;
            next.push_back(std::move(e));
          }
        }
        drafts = std::move(next);
      }
      std::vector<Id> all_cat = db_cat;
      all_cat.insert(all_cat.end(), srv_cat.begin(), srv_cat.end());
      all_cat.insert(all_cat.end(), cli_cat.begin(), cli_cat.end());
      std::sort(all_cat.begin(), all_cat.end());
      const std::vector<Id>* split = nullptr;
      switch (c.software_split) {
        case SoftwareSplit::PerDatabase: split = &db_cat; break;
        case SoftwareSplit::PerServer: split = &srv_cat; break;
        case SoftwareSplit::PerClient: split = &cli_cat; break;
        case SoftwareSplit::PerSoftware: split = &all_cat; break;
        case SoftwareSplit::AllShared: split = nullptr; break;
      }
      std::vector<Expected> linked;
      for (const auto& d : drafts) {
        std::vector<std::set<Id>> link_sets;
        if (split && !split->empty()) {
          for (Id i : *split) link_sets.push_back({i});
        } else if (!split && !all_cat.empty()) {
          link_sets.push_back({all_cat.begin(), all_cat.end()});
        } else {
          link_sets.push_back({});
        }
        for (auto& links : link_sets) {
          if (c.software_split == SoftwareSplit::PerDatabase ||
              c.software_split == SoftwareSplit::PerServer)
            for (Id i : cli_cat)
              if (std::count(d.employees.begin(), d.employees.end(),
                             m_.installations[i].employee_id))
                links.insert(i);
          for (Id s : d.services)
            for (Id i : m_.services[s].installation_ids)
              if (orig.count(i) &&
                  m_.template_of_installation(i).supports_data_type(c.identifier))
                links.insert(i);
          Expected e = d;
          e.links.assign(links.begin(), links.end());
          linked.push_back(std::move(e));
        }
      }
      const std::vector<Id>* store_cat = c.storage == StorageKind::Database ? &db_cat
                                         : c.storage == StorageKind::Server ? &srv_cat
                                                                            : &cli_cat;
      std::vector<Expected> expected;
      for (auto& d : linked) {
        if (d.employees.empty() && d.services.empty() && d.links.empty()) continue;
        for (Id i : *store_cat)
          if (std::count(d.links.begin(), d.links.end(), i)) {
            d.store = i;
            break;
          }
        if (d.store == kNone) {
          if (store_cat->empty()) {
            flag("dataset_mismatch", c.identifier, " has no eligible store");
            continue;
          }
          d.store = store_cat->front();
          d.links.insert(std::lower_bound(d.links.begin(), d.links.end(), d.store), d.store);
        }
        // Shard redirection: a linked original with shards follows the
        // instance's own clients.
        std::set<Id> links(d.links.begin(), d.links.end());
        for (Id l : d.links) {
          Id v = m_.installations[l].variant_id;
          auto it = sh.of_variant.find(v);
          if (it == sh.of_variant.end() || it->second.size() < 2 || it->second[0] != l) continue;
          std::set<Id> used;
          for (Id cl : d.links) {
            auto t = sh.target.find({cl, v});
            if (t != sh.target.end()) used.insert(t->second);
          }
          if (used.empty()) continue;
          links.erase(l);
          links.insert(used.begin(), used.end());
          if (d.store == l) d.store = *used.begin();
        }
        d.links.assign(links.begin(), links.end());
        expected.push_back(std::move(d));
      }

      std::vector<Expected> actual;
      for (const auto& inst : m_.instances)
        if (inst.collection_id == c.id)
          actual.push_back(
              {inst.employee_ids, inst.service_ids, inst.installation_ids, inst.primary_store});
      std::sort(expected.begin(), expected.end());
      std::sort(actual.begin(), actual.end());
      if (expected.size() != actual.size()) {
        flag("dataset_mismatch", c.identifier, " has ", actual.size(), " instances, expected ",
             expected.size());
      } else {
        for (size_t i = 0; i < expected.size(); ++i)
          if (actual[i] < expected[i] || expected[i] < actual[i]) {
            flag("dataset_mismatch", c.identifier, " instances differ from construction");
            break;
          }
      }
    }
  }

  Id domain_controller() const {
    for (const auto& comp : m_.computers)
      for (Id i : comp.installation_ids)
        for (const auto& tag : m_.template_of_installation(i).provides_network_services)
          if (tag.rfind("LDAP", 0) == 0) return comp.id;
    return kNone;
  }

  void check_credentials() {
    const Id dc = domain_controller();
    std::vector<int> accepted(m_.installations.size(), 0);
    for (const auto& c : m_.credentials) {
      for (Id i : c.accepted_by) ++accepted[i];
      if (c.scope == CredentialScope::Domain) {
        if (dc == kNone)
          flag("credential_domain_without_dc", "credential ", c.id);
        else if (c.stored_on != dc)
          flag("credential_store", "domain credential ", c.id, " stored off the controller");
      } else {
        for (Id i : c.accepted_by)
          if (m_.installations[i].computer_id != c.stored_on)
            flag("credential_store", "local credential ", c.id,
                 " accepted away from its computer");
      }
    }
    for (const auto& inst : m_.installations)
      if (m_.template_of_installation(inst.id).requires_credentials() && !accepted[inst.id])
        flag("credential_missing", "installation ", inst.id, " accepts no credential");
    for (const auto& comp : m_.computers) {
      bool root = false;
      for (const auto& c : m_.credentials)
        if (c.privileged && c.scope == CredentialScope::Local && c.stored_on == comp.id)
          root = true;
      if (!root) flag("root_missing", "computer ", comp.id);
    }
    if (dc != kNone) {
      bool admin = false;
      for (const auto& c : m_.credentials)
        if (c.privileged && c.scope == CredentialScope::Domain) admin = true;
      if (!admin) flag("domain_admin_missing", "no privileged domain credential");
    }
  }

  void check_firewall() {
    std::set<std::pair<Id, Id>> expected;
    for (const auto& ps : m_.services)
      for (Id i : ps.installation_ids) expected.insert({kInternet, i});
    for (const auto& inst : m_.installations)
      for (const auto& group : m_.template_of_installation(inst.id).requires_network_services)
        if (internet_satisfies(group)) expected.insert({inst.id, kInternet});
    for (const auto& [pair, shard] : shards_.target)
      if (!segments_intersect(m_.installations[pair.first].segment_ids,
                              m_.installations[shard].segment_ids))
        expected.insert({pair.first, shard});
    const Id dc = domain_controller();
    Id directory = kNone;
    if (dc != kNone) {
      for (Id i : m_.computers[dc].installation_ids)
        for (const auto& tag : m_.template_of_installation(i).provides_network_services)
          if (directory == kNone && tag.rfind("LDAP", 0) == 0) directory = i;
    }
    if (directory != kNone) {
      for (const auto& inst : m_.installations) {
        if (inst.id == directory) continue;
        if (!m_.template_of_installation(inst.id).accepts_domain_credentials()) continue;
        if (segments_intersect(inst.segment_ids, m_.installations[directory].segment_ids))
          continue;
        expected.insert({inst.id, directory});
      }
    }
    std::set<std::pair<Id, Id>> actual;
    for (const auto& r : m_.firewall_rules) {
      if (!actual.insert({r.from_installation, r.to_installation}).second)
        flag("firewall_extra", "duplicate rule ", r.id);
    }
    for (const auto& p : expected)
      if (!actual.count(p))
        flag("firewall_missing", "no rule from ", p.first, " to ", p.second);
    for (const auto& p : actual)
      if (!expected.count(p))
        flag("firewall_extra", "rule from ", p.first, " to ", p.second, " has no cause");
  }

  const ItsModel& m_;
  const InputParameters& params_;
  Shards shards_;
  std::vector<Violation> violations_;
};

}  // namespace

std::vector<Violation> verify(const ItsModel& m, const InputParameters& params) {
  return Checker(m, params).run();
}

std::string violations_text(const std::vector<Violation>& violations) {
  std::ostringstream out;
  for (const auto& v : violations) out << v.code << ": " << v.message << "\n";
  return out.str();
}

}  // namespace itsforge
