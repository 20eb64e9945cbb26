#include "datasets.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "errors.hpp"

namespace itsforge {
namespace {

struct Draft {
  std::vector<Id> employees;
  std::vector<Id> services;
  std::set<Id> links;
};

}  // namespace

void instantiate_datasets(ItsModel& m) {
  std::vector<DatasetInstance> built;
  for (const auto& c : m.collections) {
    // Eligible populations and typed installation categories.
    std::vector<Id> employees;
    for (const auto& e : m.employees)
      if (std::count(c.linked_subgroups.begin(), c.linked_subgroups.end(), e.subgroup_id))
        employees.push_back(e.id);
    std::vector<Id> services;
    for (const auto& s : m.services)
      if (std::count(c.linked_services.begin(), c.linked_services.end(), s.service_id))
        services.push_back(s.id);

    std::vector<Id> db_cat, srv_cat, cli_cat;
    for (const auto& inst : m.installations) {
      const auto& t = m.template_of_installation(inst.id);
      if (!t.supports_data_type(c.identifier)) continue;
      if (inst.owner == OwnerKind::Server) {
        (t.database ? db_cat : srv_cat).push_back(inst.id);
      } else if (std::count(employees.begin(), employees.end(), inst.employee_id)) {
        cli_cat.push_back(inst.id);
      }
    }

    std::vector<Draft> drafts(1);

    // Employee dimension.
    if (!employees.empty()) {
      std::vector<Draft> next;
      switch (c.employee_split) {
        case EmployeeSplit::PerEmployee:
          for (Id e : employees) next.push_back({{e}, {}, {}});
          break;
        case EmployeeSplit::PerErs: {
          std::string subgroup;
          for (Id e : employees) {
            if (next.empty() || m.employees[e].subgroup_id != subgroup) {
              subgroup = m.employees[e].subgroup_id;
              next.push_back({});
            }
            next.back().employees.push_back(e);
          }
          break;
        }
        case EmployeeSplit::AllShared:
          next.push_back({employees, {}, {}});
          break;
      }
      drafts = std::move(next);
    }

    // Service dimension.
    if (!services.empty()) {
      std::vector<Draft> next;
      for (const auto& d : drafts) {
        if (c.service_split == ServiceSplit::PerService) {
          for (Id s : services) {
            Draft e = d;
            e.services = {s};
            next.push_back(std::move(e));
          }
        } else {
          Draft e = d;
          e.services = services;
          next.push_back(std::move(e));
        }
      }
      drafts = std::move(next);
    }

    // Software dimension.
    std::vector<Id> all_cat = db_cat;
    all_cat.insert(all_cat.end(), srv_cat.begin(), srv_cat.end());
    all_cat.insert(all_cat.end(), cli_cat.begin(), cli_cat.end());
    std::sort(all_cat.begin(), all_cat.end());
    const std::vector<Id>* split_cat = nullptr;
    switch (c.software_split) {
      case SoftwareSplit::PerDatabase: split_cat = &db_cat; break;
      case SoftwareSplit::PerServer: split_cat = &srv_cat; break;
      case SoftwareSplit::PerClient: split_cat = &cli_cat; break;
      case SoftwareSplit::PerSoftware: split_cat = &all_cat; break;
      case SoftwareSplit::AllShared: split_cat = nullptr; break;
    }
    if (split_cat && !split_cat->empty()) {
      std::vector<Draft> next;
      for (const auto& d : drafts)
        for (Id i : *split_cat) {
          Draft e = d;
          e.links.insert(i);
          next.push_back(std::move(e));
        }
      drafts = std::move(next);
    } else if (!split_cat && !all_cat.empty()) {
      for (auto& d : drafts) d.links.insert(all_cat.begin(), all_cat.end());
    }

    // Server-side splits still reach the data through the owners' clients.
    if (c.software_split == SoftwareSplit::PerDatabase ||
        c.software_split == SoftwareSplit::PerServer) {
      for (auto& d : drafts)
        for (Id i : cli_cat)
          if (std::count(d.employees.begin(), d.employees.end(),
                         m.installations[i].employee_id))
            d.links.insert(i);
    }

    // Installations supporting a linked service hold the data they serve.
    for (auto& d : drafts)
      for (Id s : d.services)
        for (Id i : m.services[s].installation_ids)
          if (m.template_of_installation(i).supports_data_type(c.identifier)) d.links.insert(i);

    const std::vector<Id>* store_cat = nullptr;
    switch (c.storage) {
      case StorageKind::Database: store_cat = &db_cat; break;
      case StorageKind::Server: store_cat = &srv_cat; break;
      case StorageKind::Client: store_cat = &cli_cat; break;
    }
    for (auto& d : drafts) {
      if (d.employees.empty() && d.services.empty() && d.links.empty()) continue;
      DatasetInstance inst;
      inst.id = static_cast<Id>(built.size());
      inst.collection_id = c.id;
      inst.employee_ids = d.employees;
      inst.service_ids = d.services;
      inst.primary_store = kNone;
      for (Id i : *store_cat)
        if (d.links.count(i)) {
          inst.primary_store = i;
          break;
        }
      if (inst.primary_store == kNone) {
        if (store_cat->empty())
          throw NoEligibleStore("no installation can store collection " + c.identifier);
        inst.primary_store = store_cat->front();
        d.links.insert(inst.primary_store);
      }
      inst.installation_ids.assign(d.links.begin(), d.links.end());
      built.push_back(std::move(inst));
    }
  }
  m.instances.reserve(built.size());
  for (auto& inst : built) m.instances.push_back(std::move(inst));
}

}  // namespace itsforge
