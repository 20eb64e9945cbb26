#include "model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "errors.hpp"
#include "io.hpp"

namespace itsforge {

using json = nlohmann::ordered_json;

namespace {

json ids(const std::vector<Id>& v) { return json(v); }

std::vector<Id> ids_from(const json& j) { return j.get<std::vector<Id>>(); }

json template_to(const SoftwareTemplate& t) {
  json j;
  j["cpe_idn"] = t.cpe_idn;
  j["name"] = t.name;
  j["requires_local_software"] = t.requires_local_software;
  j["requires_network_services"] = t.requires_network_services;
  j["provides_network_services"] = t.provides_network_services;
  j["provides_user_services"] = t.provides_user_services;
  j["requires_hardware_quota"] = t.hardware_quota;
  j["requires_hardware_quota_per_client"] = t.hardware_quota_per_client;
  j["lc_0"] = t.license_cost_first;
  j["lc_n"] = t.license_cost_next;
  j["oc_0"] = t.operating_cost_first;
  j["oc_n"] = t.operating_cost_next;
  j["data_types"] = t.data_types;
  j["database"] = t.database;
  j["social_engineering_attacks"] = t.social_engineering_attacks;
  return j;
}

SoftwareTemplate template_from(const json& j, Id id) {
  SoftwareTemplate t;
  t.id = id;
  t.cpe_idn = j.at("cpe_idn").get<std::string>();
  t.name = j.at("name").get<std::string>();
  t.requires_local_software = j.at("requires_local_software").get<std::vector<std::string>>();
  t.requires_network_services =
      j.at("requires_network_services").get<std::vector<std::string>>();
  t.provides_network_services =
      j.at("provides_network_services").get<std::vector<std::string>>();
  t.provides_user_services = j.at("provides_user_services").get<std::vector<std::string>>();
  t.hardware_quota = j.at("requires_hardware_quota").get<std::int64_t>();
  t.hardware_quota_per_client = j.at("requires_hardware_quota_per_client").get<std::int64_t>();
  t.license_cost_first = j.at("lc_0").get<std::int64_t>();
  t.license_cost_next = j.at("lc_n").get<std::int64_t>();
  t.operating_cost_first = j.at("oc_0").get<std::int64_t>();
  t.operating_cost_next = j.at("oc_n").get<std::int64_t>();
  t.data_types = j.at("data_types").get<std::vector<std::vector<std::string>>>();
  t.database = j.at("database").get<bool>();
  t.social_engineering_attacks = j.at("social_engineering_attacks").get<bool>();
  return t;
}

}  // namespace

std::string model_to_json(const ItsModel& m) {
  json j;
  j["format_version"] = "1";
  j["templates"] = json::array();
  for (const auto& t : m.templates) j["templates"].push_back(template_to(t));
  j["variants"] = json::array();
  for (const auto& v : m.variants)
    j["variants"].push_back({{"template", v.template_id}, {"platform", ids(v.platform)}});
  j["employees"] = json::array();
  for (const auto& e : m.employees)
    j["employees"].push_back({{"subgroup", e.subgroup_id}, {"role", e.role_id}});
  j["services"] = json::array();
  for (const auto& s : m.services)
    j["services"].push_back({{"service", s.service_id},
                             {"requires_network_services", s.required_network_services},
                             {"installations", ids(s.installation_ids)}});
  j["collections"] = json::array();
  for (const auto& c : m.collections)
    j["collections"].push_back({{"identifier", c.identifier},
                                {"protection_level", c.protection_level},
                                {"storage", storage_to(c.storage)},
                                {"employee_split", employee_split_to(c.employee_split)},
                                {"service_split", service_split_to(c.service_split)},
                                {"software_split", software_split_to(c.software_split)},
                                {"linked_services", c.linked_services},
                                {"linked_subgroups", c.linked_subgroups}});
  j["installations"] = json::array();
  for (const auto& i : m.installations)
    j["installations"].push_back(
        {{"variant", i.variant_id},
         {"owner", i.owner == OwnerKind::Employee ? "employee" : "server"},
         {"employee", i.employee_id},
         {"segments", ids(i.segment_ids)},
         {"computer", i.computer_id}});
  j["instances"] = json::array();
  for (const auto& i : m.instances)
    j["instances"].push_back({{"collection", i.collection_id},
                              {"employees", ids(i.employee_ids)},
                              {"services", ids(i.service_ids)},
                              {"installations", ids(i.installation_ids)},
                              {"primary_store", i.primary_store},
                              {"segments", ids(i.segment_ids)}});
  j["segments"] = json::array();
  for (const auto& s : m.segments)
    j["segments"].push_back({{"name", s.name}, {"internet_facing", s.internet_facing}});
  j["computers"] = json::array();
  for (const auto& c : m.computers)
    j["computers"].push_back(
        {{"kind", c.kind == ComputerKind::Workstation ? "workstation" : "server"},
         {"employee", c.employee_id},
         {"segments", ids(c.segment_ids)},
         {"installations", ids(c.installation_ids)},
         {"quota_used", c.quota_used}});
  j["credentials"] = json::array();
  for (const auto& c : m.credentials)
    j["credentials"].push_back(
        {{"scope", c.scope == CredentialScope::Domain ? "domain" : "local"},
         {"privileged", c.privileged},
         {"stored_on", c.stored_on},
         {"accepted_by", ids(c.accepted_by)},
         {"used_by", ids(c.used_by)}});
  j["firewall_rules"] = json::array();
  for (const auto& r : m.firewall_rules)
    j["firewall_rules"].push_back({{"from", r.from_installation}, {"to", r.to_installation}});
  return j.dump(2) + "\n";
}

ItsModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  ItsModel m;
  try {
    if (j.at("format_version").get<std::string>() != "1")
      throw InputError("unsupported model format version");
    Id next = 0;
    for (const auto& tj : j.at("templates")) m.templates.push_back(template_from(tj, next++));
    next = 0;
    for (const auto& vj : j.at("variants")) {
      SoftwareVariant v;
      v.id = next++;
      v.template_id = vj.at("template").get<Id>();
      v.platform = ids_from(vj.at("platform"));
      m.variants.push_back(std::move(v));
    }
    next = 0;
    for (const auto& ej : j.at("employees")) {
      Employee e;
      e.id = next++;
      e.subgroup_id = ej.at("subgroup").get<std::string>();
      e.role_id = ej.at("role").get<std::string>();
      m.employees.push_back(std::move(e));
    }
    next = 0;
    for (const auto& sj : j.at("services")) {
      ProvidedService s;
      s.id = next++;
      s.service_id = sj.at("service").get<std::string>();
      s.required_network_services =
          sj.at("requires_network_services").get<std::vector<std::string>>();
      s.installation_ids = ids_from(sj.at("installations"));
      m.services.push_back(std::move(s));
    }
    next = 0;
    for (const auto& cj : j.at("collections")) {
      DataCollection c;
      c.id = next++;
      c.identifier = cj.at("identifier").get<std::string>();
      c.protection_level = cj.at("protection_level").get<int>();
      c.storage = storage_from(cj.at("storage").get<std::string>());
      c.employee_split = employee_split_from(cj.at("employee_split").get<std::string>());
      c.service_split = service_split_from(cj.at("service_split").get<std::string>());
      c.software_split = software_split_from(cj.at("software_split").get<std::string>());
      c.linked_services = cj.at("linked_services").get<std::vector<std::string>>();
      c.linked_subgroups = cj.at("linked_subgroups").get<std::vector<std::string>>();
      m.collections.push_back(std::move(c));
    }
    next = 0;
    for (const auto& ij : j.at("installations")) {
      SoftwareInstallation i;
      i.id = next++;
      i.variant_id = ij.at("variant").get<Id>();
      const auto owner = ij.at("owner").get<std::string>();
      if (owner != "employee" && owner != "server")
        throw InputError("unknown installation owner '" + owner + "'");
      i.owner = owner == "employee" ? OwnerKind::Employee : OwnerKind::Server;
      i.employee_id = ij.at("employee").get<Id>();
      i.segment_ids = ids_from(ij.at("segments"));
      i.computer_id = ij.at("computer").get<Id>();
      m.installations.push_back(std::move(i));
    }
    next = 0;
    for (const auto& ij : j.at("instances")) {
      DatasetInstance i;
      i.id = next++;
      i.collection_id = ij.at("collection").get<Id>();
      i.employee_ids = ids_from(ij.at("employees"));
      i.service_ids = ids_from(ij.at("services"));
      i.installation_ids = ids_from(ij.at("installations"));
      i.primary_store = ij.at("primary_store").get<Id>();
      i.segment_ids = ids_from(ij.at("segments"));
      m.instances.push_back(std::move(i));
    }
    next = 0;
    for (const auto& sj : j.at("segments")) {
      NetworkSegment s;
      s.id = next++;
      s.name = sj.at("name").get<std::string>();
      s.internet_facing = sj.at("internet_facing").get<bool>();
      m.segments.push_back(std::move(s));
    }
    next = 0;
    for (const auto& cj : j.at("computers")) {
      Computer c;
      c.id = next++;
      const auto kind = cj.at("kind").get<std::string>();
      if (kind != "workstation" && kind != "server")
        throw InputError("unknown computer kind '" + kind + "'");
      c.kind = kind == "workstation" ? ComputerKind::Workstation : ComputerKind::Server;
      c.employee_id = cj.at("employee").get<Id>();
      c.segment_ids = ids_from(cj.at("segments"));
      c.installation_ids = ids_from(cj.at("installations"));
      c.quota_used = cj.at("quota_used").get<std::int64_t>();
      m.computers.push_back(std::move(c));
    }
    next = 0;
    for (const auto& cj : j.at("credentials")) {
      Credential c;
      c.id = next++;
      const auto scope = cj.at("scope").get<std::string>();
      if (scope != "local" && scope != "domain")
        throw InputError("unknown credential scope '" + scope + "'");
      c.scope = scope == "domain" ? CredentialScope::Domain : CredentialScope::Local;
      c.privileged = cj.at("privileged").get<bool>();
      c.stored_on = cj.at("stored_on").get<Id>();
      c.accepted_by = ids_from(cj.at("accepted_by"));
      c.used_by = ids_from(cj.at("used_by"));
      m.credentials.push_back(std::move(c));
    }
    next = 0;
    for (const auto& rj : j.at("firewall_rules")) {
      FirewallRule r;
      r.id = next++;
      r.from_installation = rj.at("from").get<Id>();
      r.to_installation = rj.at("to").get<Id>();
      m.firewall_rules.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  return m;
}

void write_model(const ItsModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << model_to_json(m);
  if (!out) throw InputError("failed writing " + path);
}

ItsModel read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace itsforge
