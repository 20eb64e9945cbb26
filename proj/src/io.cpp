#include "io.hpp"

#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "util.hpp"

namespace itsforge {

using json = nlohmann::ordered_json;

namespace {

// Column order of software.csv; regex groups inside a cell are separated by
// ';', credential/data-type alternatives inside a group by '|'.
const std::vector<std::string> kSoftwareHeader = {
    "cpe_idn",
    "name",
    "requires_local_software",
    "requires_network_services",
    "provides_network_services",
    "provides_user_services",
    "requires_hardware_quota",
    "requires_hardware_quota_per_client",
    "lc_0",
    "lc_n",
    "oc_0",
    "oc_n",
    "data_types",
    "database",
    "social_engineering_attacks",
};

void check_header(const csv::Row& got, const std::vector<std::string>& want,
                  const std::string& what) {
  if (got.size() != want.size())
    throw InputError(what + ": expected " + std::to_string(want.size()) +
                     " columns, got " + std::to_string(got.size()));
  for (std::size_t i = 0; i < want.size(); ++i)
    if (util::trim(got[i]) != want[i])
      throw InputError(what + ": column " + std::to_string(i + 1) + " must be '" +
                       want[i] + "', got '" + got[i] + "'");
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::string t = util::trim(s);
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": not an integer: '" + s + "'");
  }
}

bool parse_flag(const std::string& s, const std::string& what) {
  std::string t = util::trim(s);
  if (t == "0" || t.empty()) return false;
  if (t == "1") return true;
  throw InputError(what + ": flag must be 0 or 1, got '" + s + "'");
}

std::vector<std::vector<std::string>> parse_data_types(const std::string& cell) {
  std::vector<std::vector<std::string>> out;
  for (const auto& group : util::split_nonempty(cell, ';')) {
    std::vector<std::string> alts = util::split_nonempty(group, '|');
    if (!alts.empty()) out.push_back(alts);
  }
  return out;
}

}  // namespace

std::vector<SoftwareTemplate> parse_software_csv(const std::vector<csv::Row>& rows) {
  if (rows.empty()) throw InputError("software.csv: missing header");
  check_header(rows[0], kSoftwareHeader, "software.csv");
  std::vector<SoftwareTemplate> out;
  std::map<std::string, int> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    std::string where = "software.csv row " + std::to_string(r + 1);
    if (row.size() != kSoftwareHeader.size())
      throw InputError(where + ": wrong column count");
    SoftwareTemplate t;
    t.id = static_cast<Id>(out.size());
    t.cpe_idn = util::trim(row[0]);
    t.name = util::trim(row[1]);
    if (t.cpe_idn.empty()) throw InputError(where + ": empty cpe_idn");
    if (seen.count(t.cpe_idn)) throw InputError(where + ": duplicate cpe_idn " + t.cpe_idn);
    seen[t.cpe_idn] = 1;
    t.requires_local_software = util::split_nonempty(row[2], ';');
    t.requires_network_services = util::split_nonempty(row[3], ';');
    t.provides_network_services = util::split_nonempty(row[4], ';');
    t.provides_user_services = util::split_nonempty(row[5], ';');
    t.hardware_quota = parse_int(row[6], where + " requires_hardware_quota");
    t.hardware_quota_per_client = parse_int(row[7], where + " requires_hardware_quota_per_client");
    t.license_cost_first = parse_int(row[8], where + " lc_0");
    t.license_cost_next = parse_int(row[9], where + " lc_n");
    t.operating_cost_first = parse_int(row[10], where + " oc_0");
    t.operating_cost_next = parse_int(row[11], where + " oc_n");
    t.data_types = parse_data_types(row[12]);
    t.database = parse_flag(row[13], where + " database");
    t.social_engineering_attacks = parse_flag(row[14], where + " social_engineering_attacks");
    if (t.hardware_quota < 0 || t.hardware_quota_per_client < 0)
      throw InputError(where + ": hardware quotas must be non-negative");
    if (t.license_cost_first < 0 || t.license_cost_next < 0 ||
        t.operating_cost_first < 0 || t.operating_cost_next < 0)
      throw InputError(where + ": costs must be non-negative");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<RoleTemplate> parse_roles_csv(const std::vector<csv::Row>& rows) {
  if (rows.empty()) throw InputError("roles.csv: missing header");
  check_header(rows[0], {"role_id", "required_user_services"}, "roles.csv");
  std::vector<RoleTemplate> out;
  std::map<std::string, int> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::string where = "roles.csv row " + std::to_string(r + 1);
    if (rows[r].size() != 2) throw InputError(where + ": wrong column count");
    RoleTemplate t;
    t.id = static_cast<Id>(out.size());
    t.role_id = util::trim(rows[r][0]);
    if (t.role_id.empty()) throw InputError(where + ": empty role_id");
    if (seen.count(t.role_id)) throw InputError(where + ": duplicate role " + t.role_id);
    seen[t.role_id] = 1;
    t.required_user_services = util::split_nonempty(rows[r][1], ';');
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<ServiceTemplate> parse_services_csv(const std::vector<csv::Row>& rows) {
  if (rows.empty()) throw InputError("services.csv: missing header");
  check_header(rows[0], {"service_id", "required_network_services"}, "services.csv");
  std::vector<ServiceTemplate> out;
  std::map<std::string, int> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::string where = "services.csv row " + std::to_string(r + 1);
    if (rows[r].size() != 2) throw InputError(where + ": wrong column count");
    ServiceTemplate t;
    t.id = static_cast<Id>(out.size());
    t.service_id = util::trim(rows[r][0]);
    if (t.service_id.empty()) throw InputError(where + ": empty service_id");
    if (seen.count(t.service_id)) throw InputError(where + ": duplicate service " + t.service_id);
    seen[t.service_id] = 1;
    t.required_network_services = util::split_nonempty(rows[r][1], ';');
    out.push_back(std::move(t));
  }
  return out;
}

TemplateCatalog load_catalog(const std::string& dir) {
  TemplateCatalog c;
  c.software = parse_software_csv(csv::read_file(dir + "/software.csv"));
  c.roles = parse_roles_csv(csv::read_file(dir + "/roles.csv"));
  c.services = parse_services_csv(csv::read_file(dir + "/services.csv"));
  return c;
}

// ---------------------------------------------------------------------------
// Parameters JSON.

StorageKind storage_from(const std::string& s) {
  if (s == "database") return StorageKind::Database;
  if (s == "server") return StorageKind::Server;
  if (s == "client") return StorageKind::Client;
  throw InputError("unknown storage kind '" + s + "'");
}

std::string storage_to(StorageKind k) {
  switch (k) {
    case StorageKind::Database: return "database";
    case StorageKind::Server: return "server";
    case StorageKind::Client: return "client";
  }
  return "";
}

EmployeeSplit employee_split_from(const std::string& s) {
  if (s == "per_employee") return EmployeeSplit::PerEmployee;
  if (s == "per_ers") return EmployeeSplit::PerErs;
  if (s == "all_shared") return EmployeeSplit::AllShared;
  throw InputError("unknown employee split '" + s + "'");
}

std::string employee_split_to(EmployeeSplit v) {
  switch (v) {
    case EmployeeSplit::PerEmployee: return "per_employee";
    case EmployeeSplit::PerErs: return "per_ers";
    case EmployeeSplit::AllShared: return "all_shared";
  }
  return "";
}

ServiceSplit service_split_from(const std::string& s) {
  if (s == "per_service") return ServiceSplit::PerService;
  if (s == "all_shared") return ServiceSplit::AllShared;
  throw InputError("unknown service split '" + s + "'");
}

std::string service_split_to(ServiceSplit v) {
  return v == ServiceSplit::PerService ? "per_service" : "all_shared";
}

SoftwareSplit software_split_from(const std::string& s) {
  if (s == "per_database") return SoftwareSplit::PerDatabase;
  if (s == "per_server") return SoftwareSplit::PerServer;
  if (s == "per_client") return SoftwareSplit::PerClient;
  if (s == "per_software") return SoftwareSplit::PerSoftware;
  if (s == "all_shared") return SoftwareSplit::AllShared;
  throw InputError("unknown software split '" + s + "'");
}

std::string software_split_to(SoftwareSplit v) {
  switch (v) {
    case SoftwareSplit::PerDatabase: return "per_database";
    case SoftwareSplit::PerServer: return "per_server";
    case SoftwareSplit::PerClient: return "per_client";
    case SoftwareSplit::PerSoftware: return "per_software";
    case SoftwareSplit::AllShared: return "all_shared";
  }
  return "";
}

namespace {

QueryKind query_kind_from(const std::string& s) {
  if (s == "software") return QueryKind::Software;
  if (s == "dataset") return QueryKind::Dataset;
  if (s == "any") return QueryKind::Any;
  throw InputError("unknown query kind '" + s + "'");
}

std::string query_kind_to(QueryKind k) {
  switch (k) {
    case QueryKind::Software: return "software";
    case QueryKind::Dataset: return "dataset";
    case QueryKind::Any: return "any";
  }
  return "";
}

RuleKind rule_kind_from(const std::string& s) {
  if (s == "require_distinct_networks_for_sets") return RuleKind::RequireDistinctNetworksForSets;
  if (s == "require_same_networks_for_sets") return RuleKind::RequireSameNetworksForSets;
  if (s == "require_common_networks_for_sets") return RuleKind::RequireCommonNetworksForSets;
  if (s == "require_collocated_local_dependencies")
    return RuleKind::RequireCollocatedLocalDependencies;
  if (s == "limit_allowed_protection_level_range")
    return RuleKind::LimitAllowedProtectionLevelRange;
  if (s == "allow_internet_exposure_only_for") return RuleKind::AllowInternetExposureOnlyFor;
  throw InputError("unknown network policy '" + s + "'");
}

std::string rule_kind_to(RuleKind k) {
  switch (k) {
    case RuleKind::RequireDistinctNetworksForSets: return "require_distinct_networks_for_sets";
    case RuleKind::RequireSameNetworksForSets: return "require_same_networks_for_sets";
    case RuleKind::RequireCommonNetworksForSets: return "require_common_networks_for_sets";
    case RuleKind::RequireCollocatedLocalDependencies:
      return "require_collocated_local_dependencies";
    case RuleKind::LimitAllowedProtectionLevelRange:
      return "limit_allowed_protection_level_range";
    case RuleKind::AllowInternetExposureOnlyFor: return "allow_internet_exposure_only_for";
  }
  return "";
}

ObjectQuery query_from_json(const json& j) {
  if (!j.is_object()) throw InputError("query must be an object");
  ObjectQuery q;
  q.kind = query_kind_from(j.value("kind", "any"));
  if (!j.contains("attribute")) throw InputError("query missing 'attribute'");
  q.attribute = j.at("attribute").get<std::string>();
  bool has_regex = j.contains("matches");
  bool has_op = j.contains("op") || j.contains("value");
  if (has_regex == has_op)
    throw InputError("query on '" + q.attribute +
                     "' needs exactly one of 'matches' or 'op'+'value'");
  if (has_regex) {
    q.pattern = j.at("matches").get<std::string>();
  } else {
    if (!j.contains("op") || !j.contains("value"))
      throw InputError("numeric query needs both 'op' and 'value'");
    q.op = j.at("op").get<std::string>();
    q.value = j.at("value").get<std::int64_t>();
  }
  return q;
}

json query_to_json(const ObjectQuery& q) {
  json j;
  j["kind"] = query_kind_to(q.kind);
  j["attribute"] = q.attribute;
  if (q.op.empty()) {
    j["matches"] = q.pattern;
  } else {
    j["op"] = q.op;
    j["value"] = q.value;
  }
  return j;
}

std::vector<ObjectQuery> queries_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of queries");
  std::vector<ObjectQuery> out;
  for (const auto& q : j) out.push_back(query_from_json(q));
  return out;
}

}  // namespace

InputParameters parse_params(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("parameters: invalid JSON: ") + e.what());
  }
  try {
    InputParameters p;
    p.format_version = j.at("format_version").get<std::string>();
    if (p.format_version != "1")
      throw InputError("unsupported format_version '" + p.format_version + "'");

    const json& erss = j.at("erss");
    if (!erss.is_object() || erss.empty())
      throw InputError("'erss' must be a non-empty object");
    for (auto it = erss.begin(); it != erss.end(); ++it) {
      int count = it.value().get<int>();
      if (count <= 0) throw InputError("ERS '" + it.key() + "' needs a positive count");
      p.erss.emplace_back(it.key(), count);
    }

    for (const auto& cj : j.value("data_collections", json::array())) {
      DataCollection c;
      c.id = static_cast<Id>(p.data_collections.size());
      c.identifier = cj.at("identifier").get<std::string>();
      if (c.identifier.empty()) throw InputError("collection with empty identifier");
      c.protection_level = cj.at("protection_level").get<int>();
      c.storage = storage_from(cj.at("storage").get<std::string>());
      c.employee_split = employee_split_from(cj.at("employee_split").get<std::string>());
      c.service_split = service_split_from(cj.at("service_split").get<std::string>());
      c.software_split = software_split_from(cj.at("software_split").get<std::string>());
      for (const auto& s : cj.value("linked_services", json::array()))
        c.linked_services.push_back(s.get<std::string>());
      for (const auto& s : cj.value("linked_erss", json::array()))
        c.linked_subgroups.push_back(s.get<std::string>());
      for (const auto& prev : p.data_collections)
        if (prev.identifier == c.identifier)
          throw InputError("duplicate collection identifier " + c.identifier);
      p.data_collections.push_back(std::move(c));
    }

    for (const auto& s : j.value("provided_external_services", json::array()))
      p.provided_external_services.push_back(s.get<std::string>());

    for (const auto& rj : j.value("network_policies", json::array())) {
      SegmentationRule r;
      r.kind = rule_kind_from(rj.at("rule").get<std::string>());
      if (rj.contains("a")) r.set_a = queries_from_json(rj.at("a"), "policy set 'a'");
      if (rj.contains("b")) r.set_b = queries_from_json(rj.at("b"), "policy set 'b'");
      if (r.kind == RuleKind::LimitAllowedProtectionLevelRange) {
        r.allowed_difference = rj.at("allowed_difference").get<int>();
        if (r.allowed_difference < 0)
          throw InputError("allowed_difference must be non-negative");
      } else if (r.kind == RuleKind::AllowInternetExposureOnlyFor) {
        if (r.set_a.empty()) throw InputError("exposure policy needs set 'a'");
      } else if (r.kind != RuleKind::RequireCollocatedLocalDependencies) {
        if (r.set_a.empty() || r.set_b.empty())
          throw InputError(rule_kind_to(r.kind) + " needs sets 'a' and 'b'");
      }
      p.network_policies.push_back(std::move(r));
    }

    p.hq_limit = j.at("hq_limit").get<std::int64_t>();
    if (p.hq_limit <= 0) throw InputError("hq_limit must be positive");
    p.w_h = j.value("w_h", std::int64_t{1});
    if (p.w_h < 0) throw InputError("w_h must be non-negative");
    p.max_segments = j.value("max_segments", 32);
    if (p.max_segments < 1) throw InputError("max_segments must be at least 1");
    p.seed = j.value("seed", std::uint64_t{0});
    p.notes = j.value("notes", std::string());
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("parameters: ") + e.what());
  }
}

InputParameters load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string params_to_json(const InputParameters& p) {
  json j;
  j["format_version"] = p.format_version;
  json erss = json::object();
  for (const auto& [sg, count] : p.erss) erss[sg] = count;
  j["erss"] = erss;
  json cols = json::array();
  for (const auto& c : p.data_collections) {
    json cj;
    cj["identifier"] = c.identifier;
    cj["protection_level"] = c.protection_level;
    cj["storage"] = storage_to(c.storage);
    cj["employee_split"] = employee_split_to(c.employee_split);
    cj["service_split"] = service_split_to(c.service_split);
    cj["software_split"] = software_split_to(c.software_split);
    cj["linked_services"] = c.linked_services;
    cj["linked_erss"] = c.linked_subgroups;
    cols.push_back(cj);
  }
  j["data_collections"] = cols;
  j["provided_external_services"] = p.provided_external_services;
  json rules = json::array();
  for (const auto& r : p.network_policies) {
    json rj;
    rj["rule"] = rule_kind_to(r.kind);
    if (!r.set_a.empty()) {
      json a = json::array();
      for (const auto& q : r.set_a) a.push_back(query_to_json(q));
      rj["a"] = a;
    }
    if (!r.set_b.empty()) {
      json b = json::array();
      for (const auto& q : r.set_b) b.push_back(query_to_json(q));
      rj["b"] = b;
    }
    if (r.kind == RuleKind::LimitAllowedProtectionLevelRange)
      rj["allowed_difference"] = r.allowed_difference;
    rules.push_back(rj);
  }
  j["network_policies"] = rules;
  j["hq_limit"] = p.hq_limit;
  j["w_h"] = p.w_h;
  j["max_segments"] = p.max_segments;
  j["seed"] = p.seed;
  if (!p.notes.empty()) j["notes"] = p.notes;
  return j.dump(2) + "\n";
}

}  // namespace itsforge
