#pragma once

#include <string>
#include <vector>

#include "csv.hpp"
#include "model.hpp"

namespace itsforge {

struct TemplateCatalog {
  std::vector<SoftwareTemplate> software;
  std::vector<RoleTemplate> roles;
  std::vector<ServiceTemplate> services;
};

// Loads software.csv, roles.csv and services.csv from dir.
TemplateCatalog load_catalog(const std::string& dir);

std::vector<SoftwareTemplate> parse_software_csv(const std::vector<csv::Row>& rows);
std::vector<RoleTemplate> parse_roles_csv(const std::vector<csv::Row>& rows);
std::vector<ServiceTemplate> parse_services_csv(const std::vector<csv::Row>& rows);

InputParameters load_params(const std::string& path);
InputParameters parse_params(const std::string& json_text);
std::string params_to_json(const InputParameters& p);

// Enum spellings shared by the parameter and model JSON schemas.
StorageKind storage_from(const std::string& s);
std::string storage_to(StorageKind k);
EmployeeSplit employee_split_from(const std::string& s);
std::string employee_split_to(EmployeeSplit v);
ServiceSplit service_split_from(const std::string& s);
std::string service_split_to(ServiceSplit v);
SoftwareSplit software_split_from(const std::string& s);
std::string software_split_to(SoftwareSplit v);

}  // namespace itsforge
