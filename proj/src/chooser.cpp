#include "chooser.hpp"

#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ilp.hpp"
#include "util.hpp"

namespace itsforge {
namespace {

// A network requirement group is satisfied by the internet itself when the
// reserved literal tag matches it.
bool internet_satisfies(const std::string& group) {
  return util::full_match("Internet", group);
}

std::vector<Id> templates_matching(const std::vector<SoftwareTemplate>& templates,
                                   const std::string& pattern) {
  std::vector<Id> out;
  for (const auto& t : templates)
    if (util::full_match(t.cpe_idn, pattern)) out.push_back(t.id);
  return out;
}

}  // namespace

std::vector<SoftwareVariant> expand_variants(const std::vector<SoftwareTemplate>& templates) {
  std::vector<SoftwareVariant> variants;
  for (const auto& t : templates) {
    std::vector<std::vector<Id>> slot_matches;
    for (const auto& pattern : t.requires_local_software) {
      auto matches = templates_matching(templates, pattern);
      if (matches.empty())
        throw UnsatisfiableDependency("no template satisfies dependency '" + pattern +
                                      "' of " + t.cpe_idn);
      slot_matches.push_back(std::move(matches));
    }
    // Cross product over slots, last slot varying fastest.
    std::vector<size_t> pick(slot_matches.size(), 0);
    while (true) {
      SoftwareVariant v;
      v.id = static_cast<Id>(variants.size());
      v.template_id = t.id;
      for (size_t i = 0; i < pick.size(); ++i) v.platform.push_back(slot_matches[i][pick[i]]);
      variants.push_back(std::move(v));
      size_t i = pick.size();
      while (i > 0 && ++pick[i - 1] == slot_matches[i - 1].size()) pick[--i] = 0;
      if (i == 0) break;
    }
  }
  return variants;
}

void choose_software(ItsModel& m, const TemplateCatalog& catalog,
                     const InputParameters& params) {
  m.variants = expand_variants(m.templates);
  const auto& variants = m.variants;
  const int nv = static_cast<int>(variants.size());

  // Employees, in ERS order.
  {
    int total = 0;
    for (const auto& [subgroup, count] : params.erss) total += count;
    m.employees.reserve(total);
  }
  std::vector<const RoleTemplate*> ers_role;
  for (const auto& [subgroup, count] : params.erss) {
    const std::string role_id = role_of_subgroup(subgroup);
    const RoleTemplate* role = nullptr;
    for (const auto& r : catalog.roles)
      if (r.role_id == role_id) role = &r;
    if (!role) throw InputError("unknown role '" + role_id + "' for subgroup " + subgroup);
    ers_role.push_back(role);
    for (int i = 0; i < count; ++i) {
      Employee e;
      e.id = static_cast<Id>(m.employees.size());
      e.subgroup_id = subgroup;
      e.role_id = role_id;
      m.employees.push_back(std::move(e));
    }
  }

  // Provided external services, in parameter order.
  for (const auto& sid : params.provided_external_services) {
    const ServiceTemplate* st = nullptr;
    for (const auto& s : catalog.services)
      if (s.service_id == sid) st = &s;
    if (!st) throw InputError("unknown provided external service '" + sid + "'");
    ProvidedService ps;
    ps.id = static_cast<Id>(m.services.size());
    ps.service_id = sid;
    ps.required_network_services = st->required_network_services;
    m.services.push_back(std::move(ps));
  }

  // Candidate variants per user service group and per network service group.
  auto user_candidates = [&](const std::string& group) {
    std::vector<int> out;
    for (const auto& v : variants)
      if (util::matches_any(m.templates[v.template_id].provides_user_services, group))
        out.push_back(v.id);
    return out;
  };
  auto net_candidates = [&](const std::string& group) {
    std::vector<int> out;
    for (const auto& v : variants)
      if (util::matches_any(m.templates[v.template_id].provides_network_services, group))
        out.push_back(v.id);
    return out;
  };
  std::vector<std::vector<Id>> variants_of_template(m.templates.size());
  for (const auto& v : variants) variants_of_template[v.template_id].push_back(v.id);

  // Per-ERS relevant variants: coverage candidates closed under dependencies.
  const int ners = static_cast<int>(params.erss.size());
  std::vector<std::set<int>> relevant(ners);
  for (int r = 0; r < ners; ++r) {
    std::vector<int> queue;
    for (const auto& group : ers_role[r]->required_user_services)
      for (int v : user_candidates(group)) queue.push_back(v);
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      if (!relevant[r].insert(v).second) continue;
      for (Id dep : variants[v].platform)
        for (Id w : variants_of_template[dep]) queue.push_back(w);
    }
  }

  // Variable layout: x[r][v] (relevant only), then srv[v], sa[s][v], n0[v].
  ilp::Problem prob;
  auto add_var = [&](std::int64_t cost) {
    int idx = static_cast<int>(prob.objective.size());
    prob.objective.push_back(cost);
    prob.lower.push_back(0);
    prob.upper.push_back(1);
    return idx;
  };
  std::vector<std::int64_t> marginal(nv), first_extra(nv);
  for (const auto& v : variants) {
    const auto& t = m.templates[v.template_id];
    marginal[v.id] = params.w_h * t.hardware_quota + t.license_cost_next + t.operating_cost_next;
    first_extra[v.id] = (t.license_cost_first + t.operating_cost_first) -
                        (t.license_cost_next + t.operating_cost_next);
  }
  std::vector<std::int64_t> ers_count;
  for (const auto& [subgroup, count] : params.erss) ers_count.push_back(count);

  std::vector<std::vector<int>> x(ners, std::vector<int>(nv, -1));
  for (int r = 0; r < ners; ++r)
    for (int v = 0; v < nv; ++v)
      if (relevant[r].count(v)) x[r][v] = add_var(ers_count[r] * marginal[v]);
  std::vector<int> srv(nv);
  for (int v = 0; v < nv; ++v) srv[v] = add_var(marginal[v]);
  std::vector<std::map<int, int>> sa(m.services.size());
  for (size_t s = 0; s < m.services.size(); ++s)
    for (const auto& group : m.services[s].required_network_services) {
      if (internet_satisfies(group)) continue;
      auto cand = net_candidates(group);
      if (cand.empty())
        throw NoServerCandidate("no template provides network service '" + group +
                                "' required by " + m.services[s].service_id);
      for (int v : cand)
        if (!sa[s].count(v)) sa[s][v] = add_var(0);
    }
  std::vector<int> n0(nv);
  for (int v = 0; v < nv; ++v) n0[v] = add_var(first_extra[v]);

  auto ge = [&](std::vector<ilp::Term> terms, std::int64_t rhs) {
    prob.rows.push_back({std::move(terms), ilp::Sense::Ge, rhs});
  };

  // Role coverage.
  for (int r = 0; r < ners; ++r)
    for (const auto& group : ers_role[r]->required_user_services) {
      std::vector<ilp::Term> terms;
      for (int v : user_candidates(group))
        if (x[r][v] >= 0) terms.push_back({x[r][v], 1});
      if (terms.empty())
        throw InfeasibleSelection("no template provides user service '" + group +
                                  "' required by role " + ers_role[r]->role_id);
      ge(std::move(terms), 1);
    }

  // Dependency closure, per ERS and on the server side.
  for (int v = 0; v < nv; ++v)
    for (Id dep : variants[v].platform) {
      for (int r = 0; r < ners; ++r) {
        if (x[r][v] < 0) continue;
        std::vector<ilp::Term> terms{{x[r][v], -1}};
        for (Id w : variants_of_template[dep]) terms.push_back({x[r][w], 1});
        ge(std::move(terms), 0);
      }
      std::vector<ilp::Term> terms{{srv[v], -1}};
      for (Id w : variants_of_template[dep]) terms.push_back({srv[w], 1});
      ge(std::move(terms), 0);
    }

  // Service coverage and assignment implies a server installation.
  for (size_t s = 0; s < m.services.size(); ++s) {
    for (const auto& group : m.services[s].required_network_services) {
      if (internet_satisfies(group)) continue;
      std::vector<ilp::Term> terms;
      for (int v : net_candidates(group)) terms.push_back({sa[s][v], 1});
      ge(std::move(terms), 1);
    }
    for (const auto& [v, var] : sa[s]) ge({{srv[v], 1}, {var, -1}}, 0);
  }

  // Network requirements of every installed variant need a server-active
  // provider; variants with an unsatisfiable requirement are unusable.
  for (int v = 0; v < nv; ++v) {
    for (const auto& group : m.templates[variants[v].template_id].requires_network_services) {
      if (internet_satisfies(group)) continue;
      auto cand = net_candidates(group);
      if (cand.empty()) {
        for (int r = 0; r < ners; ++r)
          if (x[r][v] >= 0) prob.upper[x[r][v]] = 0;
        prob.upper[srv[v]] = 0;
        continue;
      }
      std::vector<ilp::Term> terms{{n0[v], -1}};
      for (int w : cand) terms.push_back({srv[w], 1});
      ge(std::move(terms), 0);
    }
  }

  // Couple the any-installation indicator n0 with its parts: n0 dominates
  // every single choice and cannot exceed their count, so it equals the OR of
  // them while keeping the relaxation tight.
  for (int v = 0; v < nv; ++v) {
    std::vector<ilp::Term> count{{n0[v], -1}, {srv[v], 1}};
    ge({{n0[v], 1}, {srv[v], -1}}, 0);
    for (int r = 0; r < ners; ++r)
      if (x[r][v] >= 0) {
        ge({{n0[v], 1}, {x[r][v], -1}}, 0);
        count.push_back({x[r][v], 1});
      }
    ge(std::move(count), 0);
  }

  auto sol = ilp::solve(prob);
  if (sol.status != ilp::Status::Optimal)
    throw InfeasibleSelection("software selection admits no feasible assignment");
  if (getenv("ITSFORGE_DEBUG_ILP"))
    fprintf(stderr, "[ilp] vars=%zu rows=%zu nodes=%lld objective=%lld\n", prob.objective.size(),
            prob.rows.size(), (long long)sol.nodes, (long long)sol.objective);

  // Materialize: workstation installations per employee, then servers.
  {
    size_t total = 0;
    for (int r = 0; r < ners; ++r) {
      size_t per = 0;
      for (int v = 0; v < nv; ++v)
        if (x[r][v] >= 0 && sol.values[x[r][v]] == 1) ++per;
      total += per * static_cast<size_t>(params.erss[r].second);
    }
    for (int v = 0; v < nv; ++v)
      if (sol.values[srv[v]] == 1) ++total;
    m.installations.reserve(total);
  }
  for (const auto& e : m.employees) {
    int r = 0;
    for (int i = 0; i < ners; ++i)
      if (params.erss[i].first == e.subgroup_id) r = i;
    for (int v = 0; v < nv; ++v) {
      if (x[r][v] < 0 || sol.values[x[r][v]] == 0) continue;
      SoftwareInstallation inst;
      inst.id = static_cast<Id>(m.installations.size());
      inst.variant_id = v;
      inst.owner = OwnerKind::Employee;
      inst.employee_id = e.id;
      m.installations.push_back(std::move(inst));
    }
  }
  std::vector<Id> server_install(nv, kNone);
  for (int v = 0; v < nv; ++v) {
    if (sol.values[srv[v]] == 0) continue;
    SoftwareInstallation inst;
    inst.id = static_cast<Id>(m.installations.size());
    inst.variant_id = v;
    inst.owner = OwnerKind::Server;
    server_install[v] = inst.id;
    m.installations.push_back(std::move(inst));
  }
  for (size_t s = 0; s < m.services.size(); ++s)
    for (const auto& [v, var] : sa[s])
      if (sol.values[var] == 1) m.services[s].installation_ids.push_back(server_install[v]);

  // Audit the materialized selection against the raw requirements.
  auto installed_of_employee = [&](Id eid) {
    std::set<int> out;
    for (const auto& inst : m.installations)
      if (inst.owner == OwnerKind::Employee && inst.employee_id == eid) out.insert(inst.variant_id);
    return out;
  };
  std::set<int> server_set;
  for (int v = 0; v < nv; ++v)
    if (server_install[v] != kNone) server_set.insert(v);
  auto closed = [&](const std::set<int>& vs) {
    for (int v : vs)
      for (Id dep : variants[v].platform) {
        bool found = false;
        for (int w : vs)
          if (variants[w].template_id == dep) found = true;
        if (!found) return false;
      }
    return true;
  };
  std::set<int> any_installed = server_set;
  for (const auto& e : m.employees) {
    auto vs = installed_of_employee(e.id);
    any_installed.insert(vs.begin(), vs.end());
    if (!closed(vs)) throw InternalError("workstation dependency closure violated");
  }
  if (!closed(server_set)) throw InternalError("server dependency closure violated");
  for (const auto& e : m.employees) {
    const RoleTemplate* role = nullptr;
    for (const auto& r : catalog.roles)
      if (r.role_id == e.role_id) role = &r;
    auto vs = installed_of_employee(e.id);
    for (const auto& group : role->required_user_services) {
      bool covered = false;
      for (int v : vs)
        if (util::matches_any(m.templates[variants[v].template_id].provides_user_services, group))
          covered = true;
      if (!covered) throw InternalError("role coverage violated for " + e.subgroup_id);
    }
  }
  for (const auto& ps : m.services)
    for (const auto& group : ps.required_network_services) {
      if (internet_satisfies(group)) continue;
      bool covered = false;
      for (Id iid : ps.installation_ids) {
        const auto& t = m.template_of_installation(iid);
        if (util::matches_any(t.provides_network_services, group)) covered = true;
      }
      if (!covered) throw InternalError("service coverage violated for " + ps.service_id);
    }
  for (int v : any_installed)
    for (const auto& group : m.templates[variants[v].template_id].requires_network_services) {
      if (internet_satisfies(group)) continue;
      bool served = false;
      for (int w : server_set)
        if (util::matches_any(m.templates[variants[w].template_id].provides_network_services,
                              group))
          served = true;
      if (!served) throw InternalError("network requirement '" + group + "' unserved");
    }
}

}  // namespace itsforge
