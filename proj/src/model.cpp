#include "model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "errors.hpp"
#include "util.hpp"

namespace itsforge {

namespace {

bool is_credential_group(const std::vector<std::string>& group) {
  if (group.empty()) return false;
  for (const auto& tag : group)
    if (!tag.starts_with("UserAccounts")) return false;
  return true;
}

}  // namespace

bool SoftwareTemplate::dependency_only() const {
  return provides_user_services.empty() && provides_network_services.empty();
}

bool SoftwareTemplate::supports_data_type(const std::string& collection_identifier) const {
  std::string cls = collection_identifier.substr(0, collection_identifier.find(':'));
  for (const auto& group : data_types) {
    if (is_credential_group(group)) continue;
    for (const auto& tag : group)
      if (tag == collection_identifier || tag == cls) return true;
  }
  return false;
}

bool SoftwareTemplate::accepts_domain_credentials() const {
  for (const auto& group : data_types)
    if (is_credential_group(group))
      for (const auto& tag : group)
        if (tag == "UserAccounts:domain") return true;
  return false;
}

bool SoftwareTemplate::accepts_local_credentials() const {
  for (const auto& group : data_types)
    if (is_credential_group(group))
      for (const auto& tag : group)
        if (tag == "UserAccounts:local") return true;
  return false;
}

bool SoftwareTemplate::requires_local_credentials() const {
  for (const auto& group : data_types) {
    if (!is_credential_group(group)) continue;
    bool domain_ok = false;
    for (const auto& tag : group)
      if (tag == "UserAccounts:domain") domain_ok = true;
    if (!domain_ok) return true;
  }
  return false;
}

bool SoftwareTemplate::requires_credentials() const {
  for (const auto& group : data_types)
    if (is_credential_group(group)) return true;
  return false;
}

std::string DataCollection::type_class() const {
  return identifier.substr(0, identifier.find(':'));
}

const SoftwareTemplate& ItsModel::template_of_variant(Id variant_id) const {
  return templates.at(variants.at(variant_id).template_id);
}

const SoftwareTemplate& ItsModel::template_of_installation(Id installation_id) const {
  return template_of_variant(installations.at(installation_id).variant_id);
}

bool ItsModel::is_admin(Id employee_id) const {
  return employees.at(employee_id).role_id == "admin";
}

bool segments_intersect(const std::vector<Id>& a, const std::vector<Id>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return false;
}

std::string role_of_subgroup(const std::string& subgroup_id) {
  return subgroup_id.substr(0, subgroup_id.find(':'));
}

ModelStatistics model_statistics(const ItsModel& m) {
  ModelStatistics s;
  s.employees = static_cast<std::int64_t>(m.employees.size());
  s.installations = static_cast<std::int64_t>(m.installations.size());
  s.instances = static_cast<std::int64_t>(m.instances.size());
  s.segments = static_cast<std::int64_t>(m.segments.size());
  for (const auto& seg : m.segments)
    if (seg.internet_facing) ++s.internet_facing_segments;
  s.computers = static_cast<std::int64_t>(m.computers.size());
  for (const auto& c : m.computers) {
    if (c.kind == ComputerKind::Workstation)
      ++s.workstations;
    else
      ++s.servers;
  }
  s.credentials = static_cast<std::int64_t>(m.credentials.size());
  s.firewall_rules = static_cast<std::int64_t>(m.firewall_rules.size());
  return s;
}

namespace {

struct AttrValue {
  bool applicable = false;
  bool numeric = false;
  std::int64_t number = 0;
  std::vector<std::string> strings;
};

AttrValue num(std::int64_t v) {
  AttrValue a;
  a.applicable = true;
  a.numeric = true;
  a.number = v;
  return a;
}

AttrValue strs(std::vector<std::string> v) {
  AttrValue a;
  a.applicable = true;
  a.strings = std::move(v);
  return a;
}

const std::set<std::string>& software_attributes() {
  static const std::set<std::string> attrs = {
      "cpe_idn",
      "name",
      "provides_user_services",
      "provides_network_services",
      "requires_network_services",
      "requires_local_software",
      "data_types",
      "database",
      "social_engineering_attacks",
      "hardware_quota",
      "is_server",
      "subgroup_id",
      "role_id",
  };
  return attrs;
}

const std::set<std::string>& instance_attributes() {
  static const std::set<std::string> attrs = {
      "dataset_identifier",
      "protection_level",
  };
  return attrs;
}

AttrValue software_attr(const ItsModel& m, const SoftwareTemplate& t,
                        const SoftwareInstallation& inst, const std::string& attr) {
  if (attr == "cpe_idn") return strs({t.cpe_idn});
  if (attr == "name") return strs({t.name});
  if (attr == "provides_user_services") return strs(t.provides_user_services);
  if (attr == "provides_network_services") return strs(t.provides_network_services);
  if (attr == "requires_network_services") return strs(t.requires_network_services);
  if (attr == "requires_local_software") return strs(t.requires_local_software);
  if (attr == "data_types") {
    std::vector<std::string> flat;
    for (const auto& group : t.data_types)
      for (const auto& tag : group) flat.push_back(tag);
    return strs(std::move(flat));
  }
  if (attr == "database") return num(t.database ? 1 : 0);
  if (attr == "social_engineering_attacks") return num(t.social_engineering_attacks ? 1 : 0);
  if (attr == "hardware_quota") return num(t.hardware_quota);
  if (attr == "is_server") return num(inst.owner == OwnerKind::Server ? 1 : 0);
  if (attr == "subgroup_id") {
    if (inst.employee_id == kNone) return {};
    return strs({m.employees.at(inst.employee_id).subgroup_id});
  }
  if (attr == "role_id") {
    if (inst.employee_id == kNone) return {};
    return strs({m.employees.at(inst.employee_id).role_id});
  }
  return {};
}

AttrValue instance_attr(const ItsModel& m, const DatasetInstance& inst,
                        const std::string& attr) {
  const DataCollection& c = m.collections.at(inst.collection_id);
  if (attr == "dataset_identifier") return strs({c.identifier});
  if (attr == "protection_level") return num(c.protection_level);
  return {};
}

bool predicate_holds(const AttrValue& v, const ObjectQuery& q) {
  if (!v.applicable) return false;
  if (!q.op.empty()) {
    if (!v.numeric) return false;
    if (q.op == "==") return v.number == q.value;
    if (q.op == "!=") return v.number != q.value;
    if (q.op == "<") return v.number < q.value;
    if (q.op == "<=") return v.number <= q.value;
    if (q.op == ">") return v.number > q.value;
    if (q.op == ">=") return v.number >= q.value;
    throw InputError("unknown query operator '" + q.op + "'");
  }
  if (v.numeric) return util::full_match(std::to_string(v.number), q.pattern);
  return util::matches_any(v.strings, q.pattern);
}

void check_attribute_known(const ObjectQuery& q) {
  bool known = software_attributes().count(q.attribute) > 0 ||
               instance_attributes().count(q.attribute) > 0;
  if (!known) throw InputError("unknown query attribute '" + q.attribute + "'");
}

}  // namespace

std::vector<ObjectRef> resolve_query(const ItsModel& m, const ObjectQuery& q) {
  check_attribute_known(q);
  std::vector<ObjectRef> out;
  if (q.kind != QueryKind::Dataset) {
    for (const auto& inst : m.installations)
      if (predicate_holds(software_attr(m, m.template_of_installation(inst.id), inst, q.attribute),
                          q))
        out.push_back({false, inst.id});
  }
  if (q.kind != QueryKind::Software) {
    for (const auto& inst : m.instances)
      if (predicate_holds(instance_attr(m, inst, q.attribute), q))
        out.push_back({true, inst.id});
  }
  return out;
}

namespace {

// Variant installed per template in an owner's context: the lowest one wins,
// matching how computer packing resolves dependency stacks.
std::map<Id, Id> context_variants(const ItsModel& m, OwnerKind owner, Id employee_id) {
  std::map<Id, Id> ctx;
  for (const auto& inst : m.installations) {
    if (inst.owner != owner) continue;
    if (owner == OwnerKind::Employee && inst.employee_id != employee_id) continue;
    auto& slot = ctx.try_emplace(m.variants[inst.variant_id].template_id, inst.variant_id)
                     .first->second;
    slot = std::min(slot, inst.variant_id);
  }
  return ctx;
}

std::vector<Id> walk_stack(const ItsModel& m, Id installation_id, const std::map<Id, Id>& ctx) {
  const auto& inst = m.installations.at(installation_id);
  std::set<Id> seen;
  std::vector<Id> queue(m.variants[inst.variant_id].platform.begin(),
                        m.variants[inst.variant_id].platform.end());
  while (!queue.empty()) {
    Id tmpl = queue.back();
    queue.pop_back();
    if (!seen.insert(tmpl).second) continue;
    auto it = ctx.find(tmpl);
    if (it == ctx.end()) continue;  // unresolved branch; stop here
    for (Id dep : m.variants[it->second].platform) queue.push_back(dep);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<Id> dependency_stack_templates(const ItsModel& m, Id installation_id) {
  const auto& inst = m.installations.at(installation_id);
  return walk_stack(m, installation_id, context_variants(m, inst.owner, inst.employee_id));
}

std::vector<ObjectRef> resolve_query_with_dependencies(const ItsModel& m, const ObjectQuery& q) {
  check_attribute_known(q);
  std::vector<ObjectRef> out;
  if (q.kind != QueryKind::Dataset) {
    auto server_ctx = context_variants(m, OwnerKind::Server, kNone);
    std::map<Id, std::map<Id, Id>> employee_ctx;
    for (const auto& inst : m.installations) {
      if (inst.owner == OwnerKind::Employee && !employee_ctx.count(inst.employee_id))
        employee_ctx[inst.employee_id] = context_variants(m, OwnerKind::Employee, inst.employee_id);
    }
    for (const auto& inst : m.installations) {
      bool hit = predicate_holds(
          software_attr(m, m.template_of_installation(inst.id), inst, q.attribute), q);
      if (!hit) {
        const auto& ctx = inst.owner == OwnerKind::Employee ? employee_ctx.at(inst.employee_id)
                                                            : server_ctx;
        for (Id tmpl : walk_stack(m, inst.id, ctx)) {
          if (predicate_holds(software_attr(m, m.templates.at(tmpl), inst, q.attribute), q)) {
            hit = true;
            break;
          }
        }
      }
      if (hit) out.push_back({false, inst.id});
    }
  }
  if (q.kind != QueryKind::Software) {
    for (const auto& inst : m.instances)
      if (predicate_holds(instance_attr(m, inst, q.attribute), q))
        out.push_back({true, inst.id});
  }
  return out;
}

std::vector<ObjectRef> resolve_queries_with_dependencies(const ItsModel& m,
                                                         const std::vector<ObjectQuery>& qs) {
  std::vector<ObjectRef> out;
  bool first = true;
  for (const auto& q : qs) {
    std::vector<ObjectRef> cur = resolve_query_with_dependencies(m, q);
    if (first) {
      out = std::move(cur);
      first = false;
    } else {
      std::vector<ObjectRef> merged;
      std::set_intersection(out.begin(), out.end(), cur.begin(), cur.end(),
                            std::back_inserter(merged));
      out = std::move(merged);
    }
  }
  return out;
}

std::vector<ObjectRef> resolve_queries(const ItsModel& m,
                                       const std::vector<ObjectQuery>& qs) {
  std::vector<ObjectRef> out;
  bool first = true;
  for (const auto& q : qs) {
    std::vector<ObjectRef> cur = resolve_query(m, q);
    if (first) {
      out = std::move(cur);
      first = false;
    } else {
      std::vector<ObjectRef> merged;
      std::set_intersection(out.begin(), out.end(), cur.begin(), cur.end(),
                            std::back_inserter(merged));
      out = std::move(merged);
    }
  }
  return out;
}

}  // namespace itsforge
