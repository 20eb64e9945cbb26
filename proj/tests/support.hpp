#pragma once

#include <string>

#include "csv.hpp"
#include "io.hpp"
#include "model.hpp"

namespace support {

// A catalog small enough for exhaustive cross-checks yet touching every
// pipeline feature: a platform dependency, two competing mail clients with
// different costs, a serving quota that forces sharding, stored accounts and
// data, and a network service sold to the outside.
inline itsforge::TemplateCatalog mini_catalog() {
  itsforge::TemplateCatalog cat;
  cat.software = itsforge::parse_software_csv(itsforge::csv::parse(
      "cpe_idn,name,requires_local_software,requires_network_services,"
      "provides_network_services,provides_user_services,requires_hardware_quota,"
      "requires_hardware_quota_per_client,lc_0,lc_n,oc_0,oc_n,data_types,database,"
      "social_engineering_attacks\n"
      "cpe:/o:acme:os:1,Acme OS,,,,,1,0,2,2,1,1,"
      "UserAccounts:local|UserAccounts:domain,0,0\n"
      "cpe:/a:acme:mail_client:3,Acme Mail,(cpe:/o:acme:os).*,(EmailServer).*,,"
      "EmailClient,1,0,6,4,2,2,UserAccounts:local|UserAccounts:domain;Emails,0,1\n"
      "cpe:/a:bulk:mail_client:9,Bulk Mail,(cpe:/o:acme:os).*,(EmailServer).*,,"
      "EmailClient,1,0,25,20,9,9,UserAccounts:local|UserAccounts:domain;Emails,0,1\n"
      "cpe:/a:acme:mail_server:3,Acme Mail Server,(cpe:/o:acme:os).*,,EmailServer,,"
      "2,1,12,12,4,4,UserAccounts:local|UserAccounts:domain;Emails,1,0\n"
      "cpe:/a:acme:shopd:2,Acme Shop Server,(cpe:/o:acme:os).*,(Backup).*,WebShop,,"
      "2,0,10,10,3,3,UserAccounts:local|UserAccounts:domain,0,0\n"
      "cpe:/a:acme:backupd:1,Acme Backup Server,(cpe:/o:acme:os).*,,Backup,,"
      "2,0,8,8,2,2,Emails,0,0\n"));
  cat.roles = itsforge::parse_roles_csv(itsforge::csv::parse(
      "role_id,required_user_services\n"
      "office,(EmailClient).*\n"
      "admin,(EmailClient).*\n"));
  cat.services = itsforge::parse_services_csv(itsforge::csv::parse(
      "service_id,required_network_services\n"
      "shop,(WebShop).*\n"
      "mailhosting,(EmailServer).*\n"));
  return cat;
}

inline itsforge::InputParameters mini_params() {
  using namespace itsforge;
  InputParameters p;
  p.erss = {{"office:a", 3}, {"admin", 1}};

  DataCollection emails;
  emails.id = 0;
  emails.identifier = "Emails";
  emails.protection_level = 2;
  emails.storage = StorageKind::Database;
  emails.employee_split = EmployeeSplit::PerEmployee;
  emails.service_split = ServiceSplit::AllShared;
  emails.software_split = SoftwareSplit::PerDatabase;
  emails.linked_subgroups = {"office:a", "admin"};
  p.data_collections = {emails};

  p.provided_external_services = {"shop"};

  SegmentationRule tiers;
  tiers.kind = RuleKind::RequireDistinctNetworksForSets;
  tiers.set_a = {{QueryKind::Software, "is_server", "", "==", 1}};
  tiers.set_b = {{QueryKind::Software, "is_server", "", "==", 0}};
  SegmentationRule exposure;
  exposure.kind = RuleKind::AllowInternetExposureOnlyFor;
  exposure.set_a = {{QueryKind::Software, "provides_network_services", "WebShop.*", "", 0}};
  p.network_policies = {tiers, exposure};

  p.hq_limit = 4;
  p.w_h = 1;
  p.max_segments = 8;
  return p;
}

// What pipeline::generate does before the first phase.
inline void seed_model(itsforge::ItsModel& m, const itsforge::TemplateCatalog& catalog,
                       const itsforge::InputParameters& params) {
  m.templates = catalog.software;
  m.collections = params.data_collections;
}

}  // namespace support
