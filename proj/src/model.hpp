#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace itsforge {

// Dense ids, assigned in insertion order per entity kind.
using Id = std::int32_t;
constexpr Id kNone = -1;
// Firewall endpoint sentinel: traffic from/to the public internet.
constexpr Id kInternet = -1;

struct SoftwareTemplate {
  Id id = kNone;
  std::string cpe_idn;
  std::string name;
  std::vector<std::string> requires_local_software;    // one regex per dependency slot
  std::vector<std::string> requires_network_services;  // one regex per required group
  std::vector<std::string> provides_network_services;  // plain tags
  std::vector<std::string> provides_user_services;     // plain tags
  std::int64_t hardware_quota = 0;
  std::int64_t hardware_quota_per_client = 0;
  std::int64_t license_cost_first = 0;
  std::int64_t license_cost_next = 0;
  std::int64_t operating_cost_first = 0;
  std::int64_t operating_cost_next = 0;
  // Each inner vector is a group of '|'-alternatives; a group whose tags all
  // start with "UserAccounts" expresses a credential requirement instead of a
  // stored data type.
  std::vector<std::vector<std::string>> data_types;
  bool database = false;
  bool social_engineering_attacks = false;

  bool dependency_only() const;  // provides neither user nor network services
  bool supports_data_type(const std::string& collection_identifier) const;
  bool accepts_domain_credentials() const;
  bool accepts_local_credentials() const;
  // True if some credential group admits only local accounts.
  bool requires_local_credentials() const;
  bool requires_credentials() const;
};

struct RoleTemplate {
  Id id = kNone;
  std::string role_id;
  std::vector<std::string> required_user_services;  // one regex per group
};

struct ServiceTemplate {
  Id id = kNone;
  std::string service_id;
  std::vector<std::string> required_network_services;
};

// A variant pins each local-dependency slot of its template to one concrete
// dependency template matched by the slot regex.
struct SoftwareVariant {
  Id id = kNone;
  Id template_id = kNone;
  std::vector<Id> platform;  // template id per slot, same order as the slots
};

enum class OwnerKind { Employee, Server };

struct SoftwareInstallation {
  Id id = kNone;
  Id variant_id = kNone;
  OwnerKind owner = OwnerKind::Server;
  Id employee_id = kNone;       // kNone for server-owned installations
  std::vector<Id> segment_ids;  // sorted ascending
  Id computer_id = kNone;       // assigned by the computer-installation phase
};

struct Employee {
  Id id = kNone;
  std::string subgroup_id;  // full ERS identifier, e.g. "developer:windows:senior"
  std::string role_id;      // subgroup prefix before the first ':'
};

enum class StorageKind { Database, Server, Client };
enum class EmployeeSplit { PerEmployee, PerErs, AllShared };
enum class ServiceSplit { PerService, AllShared };
enum class SoftwareSplit { PerDatabase, PerServer, PerClient, PerSoftware, AllShared };

struct DataCollection {
  Id id = kNone;
  std::string identifier;  // "class" or "class:subtype"
  int protection_level = 0;
  StorageKind storage = StorageKind::Server;
  EmployeeSplit employee_split = EmployeeSplit::AllShared;
  ServiceSplit service_split = ServiceSplit::AllShared;
  SoftwareSplit software_split = SoftwareSplit::AllShared;
  std::vector<std::string> linked_services;   // organizational service ids
  std::vector<std::string> linked_subgroups;  // ERS identifiers

  std::string type_class() const;  // identifier up to the first ':'
};

struct DatasetInstance {
  Id id = kNone;
  Id collection_id = kNone;
  std::vector<Id> employee_ids;      // sorted ascending
  std::vector<Id> service_ids;       // provided-service ids, sorted
  std::vector<Id> installation_ids;  // sorted
  Id primary_store = kNone;          // installation id
  std::vector<Id> segment_ids;       // sorted
};

// An organizational service the generated system offers to the outside.
struct ProvidedService {
  Id id = kNone;
  std::string service_id;
  std::vector<std::string> required_network_services;
  std::vector<Id> installation_ids;  // supporting server installations
};

struct NetworkSegment {
  Id id = kNone;
  std::string name;
  bool internet_facing = false;
};

enum class ComputerKind { Workstation, Server };

struct Computer {
  Id id = kNone;
  ComputerKind kind = ComputerKind::Server;
  Id employee_id = kNone;  // owner; kNone for servers
  std::vector<Id> segment_ids;
  std::vector<Id> installation_ids;
  std::int64_t quota_used = 0;
};

enum class CredentialScope { Local, Domain };

struct Credential {
  Id id = kNone;
  CredentialScope scope = CredentialScope::Local;
  bool privileged = false;
  Id stored_on = kNone;         // computer holding the credential data
  std::vector<Id> accepted_by;  // installation ids
  std::vector<Id> used_by;      // employee ids; empty for service accounts
};

// Whitelist rule of the default-deny firewall. kInternet on either side means
// the public internet. Same-segment traffic needs no rule.
struct FirewallRule {
  Id id = kNone;
  Id from_installation = kInternet;
  Id to_installation = kInternet;
};

struct ItsModel {
  std::vector<SoftwareTemplate> templates;
  std::vector<SoftwareVariant> variants;
  std::vector<Employee> employees;
  std::vector<ProvidedService> services;
  std::vector<DataCollection> collections;
  std::vector<SoftwareInstallation> installations;
  std::vector<DatasetInstance> instances;
  std::vector<NetworkSegment> segments;
  std::vector<Computer> computers;
  std::vector<Credential> credentials;
  std::vector<FirewallRule> firewall_rules;

  const SoftwareTemplate& template_of_variant(Id variant_id) const;
  const SoftwareTemplate& template_of_installation(Id installation_id) const;
  bool is_admin(Id employee_id) const;  // role_id == "admin"
};

// True if the two sorted id vectors intersect.
bool segments_intersect(const std::vector<Id>& a, const std::vector<Id>& b);

struct ModelStatistics {
  std::int64_t employees = 0;
  std::int64_t installations = 0;
  std::int64_t instances = 0;
  std::int64_t segments = 0;
  std::int64_t internet_facing_segments = 0;
  std::int64_t computers = 0;
  std::int64_t workstations = 0;
  std::int64_t servers = 0;
  std::int64_t credentials = 0;
  std::int64_t firewall_rules = 0;
};

ModelStatistics model_statistics(const ItsModel& m);

// ---------------------------------------------------------------------------
// Object queries: select installations and/or dataset instances by one
// attribute with either a regex or an integer comparison.

enum class QueryKind { Software, Dataset, Any };

struct ObjectQuery {
  QueryKind kind = QueryKind::Any;
  std::string attribute;
  std::string pattern;  // regex predicate; used when op is empty
  std::string op;       // "", "==", "!=", "<", "<=", ">", ">="
  std::int64_t value = 0;
};

struct ObjectRef {
  bool is_instance = false;
  Id id = kNone;
  auto operator<=>(const ObjectRef&) const = default;
};

std::vector<ObjectRef> resolve_query(const ItsModel& m, const ObjectQuery& q);
// Conjunction of queries; empty list selects nothing.
std::vector<ObjectRef> resolve_queries(const ItsModel& m,
                                       const std::vector<ObjectQuery>& qs);

// Templates an installation's transitive local dependencies resolve to, using
// the owner's installed variant for each dependency template. Sorted.
std::vector<Id> dependency_stack_templates(const ItsModel& m, Id installation_id);

// Like resolve_query, but an installation also matches when the query matches
// any template of its dependency stack. The stack is co-installed on the same
// computer later, so restrictive segment policies must treat the installation
// as carrying those templates.
std::vector<ObjectRef> resolve_query_with_dependencies(const ItsModel& m, const ObjectQuery& q);
std::vector<ObjectRef> resolve_queries_with_dependencies(const ItsModel& m,
                                                         const std::vector<ObjectQuery>& qs);

// ---------------------------------------------------------------------------
// Network segmentation policies.

enum class RuleKind {
  RequireDistinctNetworksForSets,
  RequireSameNetworksForSets,
  RequireCommonNetworksForSets,
  RequireCollocatedLocalDependencies,
  LimitAllowedProtectionLevelRange,
  AllowInternetExposureOnlyFor,
};

struct SegmentationRule {
  RuleKind kind = RuleKind::RequireDistinctNetworksForSets;
  std::vector<ObjectQuery> set_a;  // conjunction
  std::vector<ObjectQuery> set_b;  // conjunction; unused by single-set rules
  int allowed_difference = 0;      // LimitAllowedProtectionLevelRange only
};

struct InputParameters {
  std::string format_version = "1";
  std::vector<std::pair<std::string, int>> erss;  // (subgroup id, count), file order
  std::vector<DataCollection> data_collections;
  std::vector<std::string> provided_external_services;
  std::vector<SegmentationRule> network_policies;
  std::int64_t hq_limit = 0;
  std::int64_t w_h = 1;
  int max_segments = 32;
  // Reserved for stochastic extensions; generation itself is deterministic.
  std::uint64_t seed = 0;
  std::string notes;  // free-form documentation carried through verbatim
};

std::string role_of_subgroup(const std::string& subgroup_id);

}  // namespace itsforge
