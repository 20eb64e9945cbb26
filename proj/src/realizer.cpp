#include "realizer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace itsforge {
namespace {

bool internet_satisfies(const std::string& group) {
  return util::full_match("Internet", group);
}

// Originals are the installations planned before sharding and dependency
// copying: the lowest id per (employee, variant) and per server variant.
// Shards and copies reuse the original's service assignment and emit no
// connectivity of their own.
std::set<Id> original_installs(const ItsModel& m) {
  std::map<std::pair<Id, Id>, Id> lowest;
  for (const auto& inst : m.installations) {
    std::pair<Id, Id> key{inst.owner == OwnerKind::Employee ? inst.employee_id : kNone,
                          inst.variant_id};
    auto [it, fresh] = lowest.try_emplace(key, inst.id);
    if (!fresh) it->second = std::min(it->second, inst.id);
  }
  std::set<Id> out;
  for (const auto& [key, id] : lowest) out.insert(id);
  return out;
}

struct ServingPlan {
  // Serving variant -> its server installations, original first.
  std::map<Id, std::vector<Id>> shards;
  // Serving variant -> client installation ids, ascending.
  std::map<Id, std::vector<Id>> clients;
  // (client installation, serving variant) -> shard index.
  std::map<std::pair<Id, Id>, int> shard_of;
  // Serving variant -> client capacity per shard; 0 means unlimited.
  std::map<Id, std::int64_t> capacity;
};

// Hardware consumed by the dependency stack below a variant, resolved through
// the server context's installed variants.
std::int64_t server_stack_quota(const ItsModel& m, Id variant_id) {
  std::map<Id, Id> server_variant_of_template;
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Server) {
      auto& slot = server_variant_of_template
                       .try_emplace(m.variants[inst.variant_id].template_id, inst.variant_id)
                       .first->second;
      slot = std::min(slot, inst.variant_id);
    }
  std::set<Id> seen;
  std::vector<Id> queue(m.variants[variant_id].platform.begin(),
                        m.variants[variant_id].platform.end());
  std::int64_t total = 0;
  while (!queue.empty()) {
    Id tmpl = queue.back();
    queue.pop_back();
    if (!seen.insert(tmpl).second) continue;
    total += m.templates[tmpl].hardware_quota;
    auto it = server_variant_of_template.find(tmpl);
    if (it == server_variant_of_template.end())
      throw InternalError("server dependency not installed");
    for (Id dep : m.variants[it->second].platform) queue.push_back(dep);
  }
  return total;
}

ServingPlan serving_plan(const ItsModel& m, std::int64_t hq_limit) {
  ServingPlan plan;
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Server &&
        !m.template_of_installation(inst.id).provides_network_services.empty())
      plan.shards[inst.variant_id].push_back(inst.id);

  auto provider_of = [&](const std::string& group) {
    for (const auto& [v, ids] : plan.shards)
      if (util::matches_any(m.template_of_variant(v).provides_network_services, group)) return v;
    throw InternalError("network service group '" + group + "' has no provider");
  };

  auto originals = original_installs(m);
  std::set<std::pair<Id, Id>> pairs;
  for (const auto& inst : m.installations) {
    if (!originals.count(inst.id)) continue;
    for (const auto& group : m.template_of_installation(inst.id).requires_network_services) {
      if (internet_satisfies(group)) continue;
      Id pv = provider_of(group);
      if (plan.shards[pv][0] == inst.id) continue;
      pairs.insert({inst.id, pv});
    }
  }
  for (const auto& [client, pv] : pairs) plan.clients[pv].push_back(client);

  for (auto& [pv, clients] : plan.clients) {
    const auto& t = m.template_of_variant(pv);
    std::int64_t cap = 0;
    if (t.hardware_quota_per_client > 0) {
      cap = (hq_limit - server_stack_quota(m, pv) - t.hardware_quota) /
            t.hardware_quota_per_client;
      if (cap <= 0)
        throw QuotaImpossible("no room for clients of " + t.cpe_idn + " within the quota");
    }
    plan.capacity[pv] = cap;
    for (size_t i = 0; i < clients.size(); ++i)
      plan.shard_of[{clients[i], pv}] = cap ? static_cast<int>(i / cap) : 0;
  }
  return plan;
}

std::int64_t shard_clients(std::int64_t total, std::int64_t cap, int index) {
  if (!cap) return index == 0 ? total : 0;
  return std::max<std::int64_t>(0, std::min(cap, total - index * cap));
}

// Transitive dependency templates of a set of installations, resolved through
// the owner context.
std::set<Id> closure_templates(const ItsModel& m, const std::vector<Id>& items,
                               const std::map<Id, Id>& ctx_variant_of_template) {
  std::set<Id> out;
  std::vector<Id> queue;
  for (Id i : items)
    for (Id dep : m.variants[m.installations[i].variant_id].platform) queue.push_back(dep);
  while (!queue.empty()) {
    Id tmpl = queue.back();
    queue.pop_back();
    if (!out.insert(tmpl).second) continue;
    auto it = ctx_variant_of_template.find(tmpl);
    if (it == ctx_variant_of_template.end())
      throw InternalError("dependency template missing from owner context");
    for (Id dep : m.variants[it->second].platform) queue.push_back(dep);
  }
  return out;
}

}  // namespace

void install_computers(ItsModel& m, const InputParameters& params) {
  auto plan = serving_plan(m, params.hq_limit);

  // Shard serving installations that cannot fit all their clients.
  std::map<Id, std::vector<Id>> shard_ids;  // serving variant -> install per shard
  for (const auto& [pv, ids] : plan.shards) shard_ids[pv] = ids;
  for (const auto& [pv, clients] : plan.clients) {
    std::int64_t cap = plan.capacity[pv];
    if (!cap) continue;
    auto nshards = (static_cast<std::int64_t>(clients.size()) + cap - 1) / cap;
    const auto& original = m.installations[plan.shards[pv][0]];
    for (std::int64_t i = 1; i < nshards; ++i) {
      SoftwareInstallation copy;
      copy.id = static_cast<Id>(m.installations.size());
      copy.variant_id = original.variant_id;
      copy.owner = OwnerKind::Server;
      copy.segment_ids = original.segment_ids;
      shard_ids[pv].push_back(copy.id);
      m.installations.push_back(std::move(copy));
    }
  }

  // Every shard supports the services its original supports.
  for (auto& ps : m.services) {
    std::vector<Id> expanded;
    for (Id i : ps.installation_ids) {
      expanded.push_back(i);
      Id v = m.installations[i].variant_id;
      auto it = shard_ids.find(v);
      if (it != shard_ids.end() && it->second[0] == i)
        expanded.insert(expanded.end(), it->second.begin() + 1, it->second.end());
    }
    std::sort(expanded.begin(), expanded.end());
    ps.installation_ids = std::move(expanded);
  }

  // Point dataset instances at the shards their own clients use.
  for (auto& inst : m.instances) {
    std::set<Id> links(inst.installation_ids.begin(), inst.installation_ids.end());
    auto shards_used = [&](Id pv) {
      std::set<Id> used;
      for (Id c : inst.installation_ids) {
        auto it = plan.shard_of.find({c, pv});
        if (it != plan.shard_of.end()) used.insert(shard_ids[pv][it->second]);
      }
      return used;
    };
    for (Id linked : inst.installation_ids) {
      Id v = m.installations[linked].variant_id;
      auto it = shard_ids.find(v);
      if (it == shard_ids.end() || it->second.size() < 2 || it->second[0] != linked) continue;
      auto used = shards_used(v);
      if (used.empty()) continue;
      links.erase(linked);
      links.insert(used.begin(), used.end());
      if (inst.primary_store == linked) inst.primary_store = *used.begin();
    }
    inst.installation_ids.assign(links.begin(), links.end());
  }

  // Group installations into prospective computers.
  std::map<std::pair<Id, std::vector<Id>>, std::vector<Id>> workstation_protos;
  std::map<std::vector<Id>, std::vector<Id>> server_protos;
  for (const auto& inst : m.installations) {
    if (inst.owner == OwnerKind::Employee)
      workstation_protos[{inst.employee_id, inst.segment_ids}].push_back(inst.id);
    else
      server_protos[inst.segment_ids].push_back(inst.id);
  }

  std::map<Id, Id> server_ctx;  // template -> variant, for server-side stacks
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Server) {
      auto& slot =
          server_ctx.try_emplace(m.variants[inst.variant_id].template_id, inst.variant_id)
              .first->second;
      slot = std::min(slot, inst.variant_id);
    }
  std::vector<std::map<Id, Id>> employee_ctx(m.employees.size());
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Employee)
      employee_ctx[inst.employee_id].try_emplace(m.variants[inst.variant_id].template_id,
                                                 inst.variant_id);

  auto weight_of = [&](Id install) {
    const auto& inst = m.installations[install];
    const auto& t = m.template_of_installation(install);
    std::int64_t w = t.hardware_quota;
    auto it = shard_ids.find(inst.variant_id);
    if (it != shard_ids.end() && t.hardware_quota_per_client > 0) {
      auto pos = std::find(it->second.begin(), it->second.end(), install);
      if (pos != it->second.end()) {
        auto total = plan.clients.count(inst.variant_id)
                         ? static_cast<std::int64_t>(plan.clients[inst.variant_id].size())
                         : 0;
        w += t.hardware_quota_per_client *
             shard_clients(total, plan.capacity.count(inst.variant_id)
                                      ? plan.capacity[inst.variant_id]
                                      : 0,
                           static_cast<int>(pos - it->second.begin()));
      }
    }
    return w;
  };

  auto pack = [&](ComputerKind kind, Id employee, const std::vector<Id>& segs,
                  const std::vector<Id>& members, const std::map<Id, Id>& ctx) {
    std::vector<Id> items, dep_members;
    std::set<Id> member_templates;
    for (Id i : members) member_templates.insert(m.variants[m.installations[i].variant_id].template_id);
    for (Id i : members)
      (m.template_of_installation(i).dependency_only() ? dep_members : items).push_back(i);
    // Dependency-only members nothing here depends on are packed as items,
    // as is any duplicate install of an already stacked template.
    auto needed = closure_templates(m, items, ctx);
    std::vector<Id> stack;
    std::set<Id> stacked;
    for (Id i : dep_members) {
      Id tmpl = m.variants[m.installations[i].variant_id].template_id;
      (needed.count(tmpl) && stacked.insert(tmpl).second ? stack : items).push_back(i);
    }

    std::stable_sort(items.begin(), items.end(),
                     [&](Id a, Id b) { return weight_of(a) > weight_of(b); });
    struct Bin {
      std::vector<Id> items;
      std::set<Id> closure;
      std::int64_t weight = 0;
    };
    // Dependencies already present as co-located items need no stack copy.
    auto bin_closure = [&](const std::vector<Id>& trial) {
      auto cls = closure_templates(m, trial, ctx);
      for (Id i : trial) cls.erase(m.variants[m.installations[i].variant_id].template_id);
      return cls;
    };
    std::vector<Bin> bins;
    for (Id item : items) {
      bool placed = false;
      for (auto& bin : bins) {
        auto trial = bin.items;
        trial.push_back(item);
        auto cls = bin_closure(trial);
        std::int64_t total = bin.weight + weight_of(item);
        for (Id tmpl : cls) total += m.templates[tmpl].hardware_quota;
        if (total <= params.hq_limit) {
          bin.items = std::move(trial);
          bin.closure = std::move(cls);
          bin.weight += weight_of(item);
          placed = true;
          break;
        }
      }
      if (placed) continue;
      Bin bin;
      bin.items.push_back(item);
      bin.closure = bin_closure(bin.items);
      bin.weight = weight_of(item);
      std::int64_t total = bin.weight;
      for (Id tmpl : bin.closure) total += m.templates[tmpl].hardware_quota;
      if (total > params.hq_limit)
        throw QuotaImpossible("installation of " + m.template_of_installation(item).cpe_idn +
                              " exceeds the hardware quota");
      bins.push_back(std::move(bin));
    }

    std::set<Id> unplaced_stack(stack.begin(), stack.end());
    for (auto& bin : bins) {
      Computer comp;
      comp.id = static_cast<Id>(m.computers.size());
      comp.kind = kind;
      comp.employee_id = employee;
      comp.segment_ids = segs;
      comp.installation_ids = bin.items;
      comp.quota_used = bin.weight;
      for (Id tmpl : bin.closure) {
        comp.quota_used += m.templates[tmpl].hardware_quota;
        Id found = kNone;
        for (Id i : unplaced_stack)
          if (m.variants[m.installations[i].variant_id].template_id == tmpl) {
            found = i;
            break;
          }
        if (found == kNone) {
          SoftwareInstallation copy;
          copy.id = static_cast<Id>(m.installations.size());
          copy.variant_id = ctx.at(tmpl);
          copy.owner = kind == ComputerKind::Workstation ? OwnerKind::Employee : OwnerKind::Server;
          copy.employee_id = employee;
          copy.segment_ids = segs;
          found = copy.id;
          m.installations.push_back(std::move(copy));
        } else {
          unplaced_stack.erase(found);
        }
        comp.installation_ids.push_back(found);
      }
      for (Id i : comp.installation_ids) m.installations[i].computer_id = comp.id;
      std::sort(comp.installation_ids.begin(), comp.installation_ids.end());
      m.computers.push_back(std::move(comp));
    }
    if (!unplaced_stack.empty()) throw InternalError("stack installation left unplaced");
  };

  for (const auto& [key, members] : workstation_protos)
    pack(ComputerKind::Workstation, key.first, key.second, members, employee_ctx[key.first]);
  for (const auto& [segs, members] : server_protos)
    pack(ComputerKind::Server, kNone, segs, members, server_ctx);
}

namespace {

// The domain controller is the lowest computer hosting a directory service
// (an installation providing a network service tagged LDAP*).
Id find_domain_controller(const ItsModel& m) {
  for (const auto& comp : m.computers)
    for (Id i : comp.installation_ids)
      for (const auto& tag : m.template_of_installation(i).provides_network_services)
        if (tag.rfind("LDAP", 0) == 0) return comp.id;
  return kNone;
}

Id directory_install(const ItsModel& m, Id dc) {
  for (Id i : m.computers[dc].installation_ids)
    for (const auto& tag : m.template_of_installation(i).provides_network_services)
      if (tag.rfind("LDAP", 0) == 0) return i;
  throw InternalError("domain controller without directory service");
}

}  // namespace

void init_authentication(ItsModel& m) {
  const Id dc = find_domain_controller(m);
  std::vector<Id> admins;
  for (const auto& e : m.employees)
    if (m.is_admin(e.id)) admins.push_back(e.id);

  auto add = [&](Credential c) {
    c.id = static_cast<Id>(m.credentials.size());
    m.credentials.push_back(std::move(c));
  };

  // Root account per computer, held by the administrators.
  for (const auto& comp : m.computers) {
    Credential c;
    c.scope = CredentialScope::Local;
    c.privileged = true;
    c.stored_on = comp.id;
    for (Id i : comp.installation_ids)
      if (m.template_of_installation(i).dependency_only()) c.accepted_by.push_back(i);
    if (c.accepted_by.empty() && !comp.installation_ids.empty())
      c.accepted_by.push_back(comp.installation_ids.front());
    c.used_by = admins;
    add(std::move(c));
  }

  std::vector<std::vector<Id>> installs_of(m.employees.size());
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Employee) installs_of[inst.employee_id].push_back(inst.id);

  if (dc != kNone) {
    for (const auto& e : m.employees) {
      Credential c;
      c.scope = CredentialScope::Domain;
      c.stored_on = dc;
      for (Id i : installs_of[e.id])
        if (m.template_of_installation(i).accepts_domain_credentials()) c.accepted_by.push_back(i);
      c.used_by = {e.id};
      if (!c.accepted_by.empty()) add(std::move(c));
    }
    for (const auto& e : m.employees)
      for (Id i : installs_of[e.id]) {
        const auto& t = m.template_of_installation(i);
        if (!t.requires_local_credentials()) continue;
        Credential c;
        c.scope = CredentialScope::Local;
        c.stored_on = m.installations[i].computer_id;
        c.accepted_by = {i};
        c.used_by = {e.id};
        add(std::move(c));
      }
  } else {
    // Without a directory every machine keeps its own accounts.
    for (const auto& e : m.employees) {
      std::map<Id, std::vector<Id>> per_computer;
      for (Id i : installs_of[e.id])
        if (m.template_of_installation(i).requires_credentials())
          per_computer[m.installations[i].computer_id].push_back(i);
      for (const auto& [comp, accepted] : per_computer) {
        Credential c;
        c.scope = CredentialScope::Local;
        c.stored_on = comp;
        c.accepted_by = accepted;
        c.used_by = {e.id};
        add(std::move(c));
      }
    }
  }

  // Service accounts for server software that stores user accounts.
  for (const auto& inst : m.installations) {
    if (inst.owner != OwnerKind::Server) continue;
    const auto& t = m.template_of_installation(inst.id);
    if (!t.requires_credentials() || t.dependency_only()) continue;
    Credential c;
    c.scope = dc != kNone && t.accepts_domain_credentials() ? CredentialScope::Domain
                                                            : CredentialScope::Local;
    c.stored_on = c.scope == CredentialScope::Domain ? dc : inst.computer_id;
    c.accepted_by = {inst.id};
    add(std::move(c));
  }

  if (dc != kNone) {
    Credential c;
    c.scope = CredentialScope::Domain;
    c.privileged = true;
    c.stored_on = dc;
    c.accepted_by = {directory_install(m, dc)};
    c.used_by = admins;
    add(std::move(c));
  }
}

void init_firewall(ItsModel& m, const InputParameters& params) {
  std::set<std::pair<Id, Id>> seen;
  auto add = [&](Id from, Id to) {
    if (!seen.insert({from, to}).second) return;
    FirewallRule r;
    r.id = static_cast<Id>(m.firewall_rules.size());
    r.from_installation = from;
    r.to_installation = to;
    m.firewall_rules.push_back(std::move(r));
  };

  // Provided services admit the internet to every supporting shard.
  for (const auto& ps : m.services)
    for (Id i : ps.installation_ids) add(kInternet, i);

  // Software that requires the internet talks out.
  for (const auto& inst : m.installations)
    for (const auto& group : m.template_of_installation(inst.id).requires_network_services)
      if (internet_satisfies(group)) add(inst.id, kInternet);

  // Clients reach their assigned shard when it lives in another segment.
  auto plan = serving_plan(m, params.hq_limit);
  std::map<Id, std::vector<Id>> by_client;
  for (const auto& [pair, shard] : plan.shard_of) by_client[pair.first].push_back(pair.second);
  for (const auto& [client, variants] : by_client)
    for (Id pv : variants) {
      Id target = plan.shards[pv][plan.shard_of.at({client, pv})];
      if (!segments_intersect(m.installations[client].segment_ids,
                              m.installations[target].segment_ids))
        add(client, target);
    }

  // Domain members authenticate against the directory.
  const Id dc = find_domain_controller(m);
  if (dc != kNone) {
    const Id directory = directory_install(m, dc);
    for (const auto& inst : m.installations) {
      if (inst.id == directory) continue;
      if (!m.template_of_installation(inst.id).accepts_domain_credentials()) continue;
      if (segments_intersect(inst.segment_ids, m.installations[directory].segment_ids)) continue;
      add(inst.id, directory);
    }
  }
}

}  // namespace itsforge
