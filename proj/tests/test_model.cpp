#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "model.hpp"

using namespace itsforge;

namespace {

ItsModel tiny_model() {
  ItsModel m;

  SoftwareTemplate mail;
  mail.id = 0;
  mail.cpe_idn = "cpe:/a:vendor:mailclient:1";
  mail.name = "Mail Client";
  mail.provides_user_services = {"EmailClient"};
  mail.requires_network_services = {"(EmailServer).*"};
  mail.hardware_quota = 1;
  mail.data_types = {{"UserAccounts:local", "UserAccounts:domain"}, {"Emails"}};
  mail.social_engineering_attacks = true;

  SoftwareTemplate db;
  db.id = 1;
  db.cpe_idn = "cpe:/a:vendor:db:12";
  db.name = "DB Server";
  db.provides_network_services = {"Database"};
  db.hardware_quota = 4;
  db.data_types = {{"UserAccounts:domain"}, {"Emails", "FinancialData"}};
  db.database = true;

  SoftwareTemplate runtime;
  runtime.id = 2;
  runtime.cpe_idn = "cpe:/a:vendor:runtime:5";
  runtime.name = "Runtime";
  runtime.hardware_quota = 2;
  runtime.data_types = {{"UserAccounts:local"}};

  m.templates = {mail, db, runtime};
  m.variants = {{0, 0, {}}, {1, 1, {}}, {2, 2, {}}};
  m.employees = {{0, "admin", "admin"}, {1, "finance:banking", "finance"}};

  DataCollection emails;
  emails.id = 0;
  emails.identifier = "Emails";
  emails.protection_level = 2;
  m.collections = {emails};

  m.installations = {
      {0, 0, OwnerKind::Employee, 0, {0}, 0},
      {1, 1, OwnerKind::Server, kNone, {1}, 1},
      {2, 2, OwnerKind::Server, kNone, {1}, 1},
  };
  DatasetInstance inst;
  inst.id = 0;
  inst.collection_id = 0;
  inst.employee_ids = {0};
  inst.installation_ids = {0, 1};
  inst.primary_store = 1;
  inst.segment_ids = {0, 1};
  m.instances = {inst};

  m.segments = {{0, "segment_0", false}, {1, "segment_1", true}};
  m.computers = {
      {0, ComputerKind::Workstation, 0, {0}, {0}, 1},
      {1, ComputerKind::Server, kNone, {1}, {1, 2}, 6},
  };
  return m;
}

}  // namespace

TEST_CASE("template classification helpers") {
  ItsModel m = tiny_model();
  const auto& mail = m.templates[0];
  const auto& db = m.templates[1];
  const auto& runtime = m.templates[2];

  CHECK_FALSE(mail.dependency_only());
  CHECK_FALSE(db.dependency_only());
  CHECK(runtime.dependency_only());

  // Credential groups do not count as stored data.
  CHECK(mail.supports_data_type("Emails"));
  CHECK_FALSE(mail.supports_data_type("UserAccounts:local"));
  CHECK_FALSE(runtime.supports_data_type("Emails"));

  // Class-level tag matches any subtype of the class.
  CHECK(db.supports_data_type("FinancialData:banking"));
  CHECK(db.supports_data_type("FinancialData"));
  CHECK_FALSE(db.supports_data_type("SourceCode"));

  CHECK(mail.accepts_domain_credentials());
  CHECK(mail.accepts_local_credentials());
  CHECK_FALSE(mail.requires_local_credentials());
  CHECK(mail.requires_credentials());

  CHECK(db.accepts_domain_credentials());
  CHECK_FALSE(db.accepts_local_credentials());
  CHECK_FALSE(db.requires_local_credentials());

  CHECK_FALSE(runtime.accepts_domain_credentials());
  CHECK(runtime.requires_local_credentials());
}

TEST_CASE("lookup helpers") {
  ItsModel m = tiny_model();
  CHECK(m.template_of_variant(1).name == "DB Server");
  CHECK(m.template_of_installation(2).name == "Runtime");
  CHECK(m.is_admin(0));
  CHECK_FALSE(m.is_admin(1));
  CHECK(role_of_subgroup("developer:windows:senior") == "developer");
  CHECK(role_of_subgroup("admin") == "admin");
  CHECK(DataCollection{.identifier = "FinancialData:banking"}.type_class() == "FinancialData");
}

TEST_CASE("segments_intersect") {
  CHECK(segments_intersect({0, 2, 5}, {1, 2}));
  CHECK_FALSE(segments_intersect({0, 2}, {1, 3}));
  CHECK_FALSE(segments_intersect({}, {1}));
  CHECK(segments_intersect({7}, {7}));
}

TEST_CASE("model statistics") {
  auto s = model_statistics(tiny_model());
  CHECK(s.employees == 2);
  CHECK(s.installations == 3);
  CHECK(s.instances == 1);
  CHECK(s.segments == 2);
  CHECK(s.internet_facing_segments == 1);
  CHECK(s.computers == 2);
  CHECK(s.workstations == 1);
  CHECK(s.servers == 1);
  CHECK(s.credentials == 0);
  CHECK(s.firewall_rules == 0);
}

TEST_CASE("queries select installations by regex attributes") {
  ItsModel m = tiny_model();

  ObjectQuery q;
  q.kind = QueryKind::Software;
  q.attribute = "name";
  q.pattern = "DB.*";
  auto refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK_FALSE(refs[0].is_instance);
  CHECK(refs[0].id == 1);

  q.attribute = "provides_user_services";
  q.pattern = "Email.*";
  refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].id == 0);

  // data_types flattens credential and data groups alike.
  q.attribute = "data_types";
  q.pattern = "UserAccounts:local";
  refs = resolve_query(m, q);
  CHECK(refs.size() == 2);  // mail client and runtime

  // Owner attributes apply only to employee-owned installations.
  q.attribute = "role_id";
  q.pattern = "admin";
  refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].id == 0);
}

TEST_CASE("queries compare numeric attributes") {
  ItsModel m = tiny_model();

  ObjectQuery q;
  q.kind = QueryKind::Software;
  q.attribute = "hardware_quota";
  q.op = ">=";
  q.value = 2;
  auto refs = resolve_query(m, q);
  REQUIRE(refs.size() == 2);
  CHECK(refs[0].id == 1);
  CHECK(refs[1].id == 2);

  q.attribute = "is_server";
  q.op = "==";
  q.value = 0;
  refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].id == 0);

  // Numeric attribute matched by regex when no operator is given.
  q = {};
  q.kind = QueryKind::Software;
  q.attribute = "database";
  q.pattern = "1";
  refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].id == 1);
}

TEST_CASE("queries select dataset instances") {
  ItsModel m = tiny_model();

  ObjectQuery q;
  q.kind = QueryKind::Dataset;
  q.attribute = "dataset_identifier";
  q.pattern = "Emails";
  auto refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].is_instance);
  CHECK(refs[0].id == 0);

  q.attribute = "protection_level";
  q.pattern = "";
  q.op = ">";
  q.value = 3;
  CHECK(resolve_query(m, q).empty());

  // Kind Any never mixes attribute namespaces: an instance attribute is not
  // applicable to installations, so they simply do not match.
  q = {};
  q.kind = QueryKind::Any;
  q.attribute = "protection_level";
  q.op = "==";
  q.value = 2;
  refs = resolve_query(m, q);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].is_instance);
}

TEST_CASE("conjunction intersects, empty list selects nothing") {
  ItsModel m = tiny_model();

  ObjectQuery server;
  server.kind = QueryKind::Software;
  server.attribute = "is_server";
  server.op = "==";
  server.value = 1;
  ObjectQuery heavy;
  heavy.kind = QueryKind::Software;
  heavy.attribute = "hardware_quota";
  heavy.op = ">";
  heavy.value = 2;

  auto refs = resolve_queries(m, {server, heavy});
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].id == 1);

  CHECK(resolve_queries(m, {}).empty());
}

TEST_CASE("unknown attributes and operators are rejected") {
  ItsModel m = tiny_model();
  ObjectQuery q;
  q.attribute = "no_such_attribute";
  q.pattern = ".*";
  CHECK_THROWS_AS(resolve_query(m, q), InputError);

  q.attribute = "hardware_quota";
  q.op = "~=";
  CHECK_THROWS_AS(resolve_query(m, q), InputError);
}
