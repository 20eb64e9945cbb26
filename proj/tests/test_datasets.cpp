#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "chooser.hpp"
#include "datasets.hpp"
#include "errors.hpp"
#include "support.hpp"

using namespace itsforge;

namespace {

struct Expected {
  std::vector<Id> employees, services, links;
  Id store = kNone;
  auto tie() const { return std::tie(employees, services, links, store); }
  bool operator<(const Expected& o) const { return tie() < o.tie(); }
  bool operator==(const Expected& o) const { return tie() == o.tie(); }
};

struct Populations {
  std::vector<Id> employees, services, db_cat, srv_cat, cli_cat;
};

Populations populations(const ItsModel& m, const DataCollection& c) {
  Populations p;
  for (const auto& e : m.employees)
    if (std::count(c.linked_subgroups.begin(), c.linked_subgroups.end(), e.subgroup_id))
      p.employees.push_back(e.id);
  for (const auto& s : m.services)
    if (std::count(c.linked_services.begin(), c.linked_services.end(), s.service_id))
      p.services.push_back(s.id);
  for (const auto& inst : m.installations) {
    const auto& t = m.template_of_installation(inst.id);
    if (!t.supports_data_type(c.identifier)) continue;
    if (inst.owner == OwnerKind::Server)
      (t.database ? p.db_cat : p.srv_cat).push_back(inst.id);
    else if (std::count(p.employees.begin(), p.employees.end(), inst.employee_id))
      p.cli_cat.push_back(inst.id);
  }
  return p;
}

// Instance construction replayed from the documented splitting law, one
// nested loop per dimension.
std::vector<Expected> enumerate_instances(const ItsModel& m, const DataCollection& c) {
  auto p = populations(m, c);

  std::vector<std::vector<Id>> employee_cells{{}};
  if (!p.employees.empty()) {
    employee_cells.clear();
    if (c.employee_split == EmployeeSplit::PerEmployee) {
      for (Id e : p.employees) employee_cells.push_back({e});
    } else if (c.employee_split == EmployeeSplit::PerErs) {
      for (Id e : p.employees) {
        if (employee_cells.empty() ||
            m.employees[employee_cells.back().back()].subgroup_id != m.employees[e].subgroup_id)
          employee_cells.push_back({});
        employee_cells.back().push_back(e);
      }
    } else {
      employee_cells.push_back(p.employees);
    }
  }

  std::vector<std::vector<Id>> service_cells{{}};
  if (!p.services.empty()) {
    service_cells.clear();
    if (c.service_split == ServiceSplit::PerService) {
      for (Id s : p.services) service_cells.push_back({s});
    } else {
      service_cells.push_back(p.services);
    }
  }

  std::vector<Id> all_cat = p.db_cat;
  all_cat.insert(all_cat.end(), p.srv_cat.begin(), p.srv_cat.end());
  all_cat.insert(all_cat.end(), p.cli_cat.begin(), p.cli_cat.end());
  std::sort(all_cat.begin(), all_cat.end());
  const std::vector<Id>* split = nullptr;
  switch (c.software_split) {
    case SoftwareSplit::PerDatabase: split = &p.db_cat; break;
    case SoftwareSplit::PerServer: split = &p.srv_cat; break;
    case SoftwareSplit::PerClient: split = &p.cli_cat; break;
    case SoftwareSplit::PerSoftware: split = &all_cat; break;
    case SoftwareSplit::AllShared: split = nullptr; break;
  }
  std::vector<std::set<Id>> software_cells;
  if (split && !split->empty())
    for (Id i : *split) software_cells.push_back({i});
  else if (!split && !all_cat.empty())
    software_cells.push_back({all_cat.begin(), all_cat.end()});
  else
    software_cells.push_back({});

  const std::vector<Id>& store_cat = c.storage == StorageKind::Database ? p.db_cat
                                     : c.storage == StorageKind::Server ? p.srv_cat
                                                                        : p.cli_cat;
  std::vector<Expected> out;
  for (const auto& employees : employee_cells)
    for (const auto& services : service_cells)
      for (const auto& cell : software_cells) {
        std::set<Id> links = cell;
        if (c.software_split == SoftwareSplit::PerDatabase ||
            c.software_split == SoftwareSplit::PerServer)
          for (Id i : p.cli_cat)
            if (std::count(employees.begin(), employees.end(), m.installations[i].employee_id))
              links.insert(i);
        for (Id s : services)
          for (Id i : m.services[s].installation_ids)
            if (m.template_of_installation(i).supports_data_type(c.identifier)) links.insert(i);
        if (employees.empty() && services.empty() && links.empty()) continue;
        Expected e;
        e.employees = employees;
        e.services = services;
        for (Id i : store_cat)
          if (links.count(i)) {
            e.store = i;
            break;
          }
        if (e.store == kNone) {
          REQUIRE(!store_cat.empty());
          e.store = store_cat.front();
          links.insert(e.store);
        }
        e.links.assign(links.begin(), links.end());
        out.push_back(std::move(e));
      }
  return out;
}

// Closed-form instance count: the product of one factor per dimension.
std::int64_t count_law(const ItsModel& m, const DataCollection& c) {
  auto p = populations(m, c);
  std::int64_t e = 1;
  if (!p.employees.empty()) {
    if (c.employee_split == EmployeeSplit::PerEmployee) {
      e = static_cast<std::int64_t>(p.employees.size());
    } else if (c.employee_split == EmployeeSplit::PerErs) {
      std::set<std::string> groups;
      for (Id id : p.employees) groups.insert(m.employees[id].subgroup_id);
      e = static_cast<std::int64_t>(groups.size());
    }
  }
  std::int64_t s = 1;
  if (!p.services.empty() && c.service_split == ServiceSplit::PerService)
    s = static_cast<std::int64_t>(p.services.size());
  std::int64_t w = 1;
  size_t cat = 0;
  switch (c.software_split) {
    case SoftwareSplit::PerDatabase: cat = p.db_cat.size(); break;
    case SoftwareSplit::PerServer: cat = p.srv_cat.size(); break;
    case SoftwareSplit::PerClient: cat = p.cli_cat.size(); break;
    case SoftwareSplit::PerSoftware:
      cat = p.db_cat.size() + p.srv_cat.size() + p.cli_cat.size();
      break;
    case SoftwareSplit::AllShared: cat = 0; break;
  }
  if (cat) w = static_cast<std::int64_t>(cat);
  // Cells with no employees, no services and no software carry nothing.
  if (p.employees.empty() && p.services.empty()) {
    bool some_links = cat > 0 || (c.software_split == SoftwareSplit::AllShared &&
                                  !(p.db_cat.empty() && p.srv_cat.empty() && p.cli_cat.empty()));
    if (!some_links) return 0;
  }
  return e * s * w;
}

bool store_impossible(const ItsModel& m, const DataCollection& c) {
  auto p = populations(m, c);
  const std::vector<Id>& store_cat = c.storage == StorageKind::Database ? p.db_cat
                                     : c.storage == StorageKind::Server ? p.srv_cat
                                                                        : p.cli_cat;
  return store_cat.empty() && count_law(m, c) > 0;
}

std::vector<Expected> actual_instances(const ItsModel& m, Id collection) {
  std::vector<Expected> out;
  for (const auto& inst : m.instances)
    if (inst.collection_id == collection)
      out.push_back({inst.employee_ids, inst.service_ids, inst.installation_ids,
                     inst.primary_store});
  return out;
}

DataCollection random_collection(std::mt19937& rng) {
  std::uniform_int_distribution<int> pick3(0, 2), pick2(0, 1), pick5(0, 4), level(0, 5);
  DataCollection c;
  c.id = 0;
  c.identifier = pick5(rng) == 0 ? "Unstorable" : "Emails";
  c.protection_level = level(rng);
  c.storage = static_cast<StorageKind>(pick3(rng));
  c.employee_split = static_cast<EmployeeSplit>(pick3(rng));
  c.service_split = static_cast<ServiceSplit>(pick2(rng));
  c.software_split = static_cast<SoftwareSplit>(pick5(rng));
  if (pick2(rng)) c.linked_subgroups.push_back("office:a");
  if (pick2(rng)) c.linked_subgroups.push_back("admin");
  if (pick2(rng)) c.linked_services.push_back("shop");
  if (pick2(rng)) c.linked_services.push_back("mailhosting");
  return c;
}

}  // namespace

TEST_CASE("splits one collection per employee and database") {
  auto catalog = support::mini_catalog();
  auto params = support::mini_params();
  ItsModel m;
  support::seed_model(m, catalog, params);
  choose_software(m, catalog, params);
  instantiate_datasets(m);

  // Four employees, one database category entry: four personal instances.
  REQUIRE(m.instances.size() == 4);
  std::set<Id> seen;
  for (const auto& inst : m.instances) {
    REQUIRE(inst.employee_ids.size() == 1);
    seen.insert(inst.employee_ids[0]);
    CHECK(m.template_of_installation(inst.primary_store).database);
    // The owner's own mail client reaches through to the database instance.
    bool has_client = false;
    for (Id i : inst.installation_ids)
      has_client |= m.installations[i].owner == OwnerKind::Employee &&
                    m.installations[i].employee_id == inst.employee_ids[0];
    CHECK(has_client);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("every split combination matches the replayed construction") {
  auto catalog = support::mini_catalog();
  std::mt19937 rng(20240814);
  std::uniform_int_distribution<int> count(1, 10), pick2(0, 1);
  int built = 0, impossible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    InputParameters params = support::mini_params();
    params.erss = {{"office:a", count(rng)}, {"admin", count(rng)}};
    params.provided_external_services = {"shop"};
    if (pick2(rng)) params.provided_external_services.push_back("mailhosting");
    params.data_collections = {random_collection(rng)};
    for (auto& svc : params.data_collections[0].linked_services)
      if (!std::count(params.provided_external_services.begin(),
                      params.provided_external_services.end(), svc))
        svc = "shop";

    ItsModel m;
    support::seed_model(m, catalog, params);
    choose_software(m, catalog, params);
    CAPTURE(trial);
    if (store_impossible(m, params.data_collections[0])) {
      CHECK_THROWS_AS(instantiate_datasets(m), NoEligibleStore);
      ++impossible;
      continue;
    }
    instantiate_datasets(m);

    const auto& c = m.collections[0];
    auto expect = enumerate_instances(m, c);
    auto got = actual_instances(m, c.id);
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expect[i]);
    CHECK(static_cast<std::int64_t>(got.size()) == count_law(m, c));

    // Employee cells partition the linked population.
    std::vector<Id> linked = populations(m, c).employees;
    if (!linked.empty() && c.employee_split != EmployeeSplit::AllShared) {
      std::set<Id> covered;
      size_t total = 0;
      std::set<std::vector<Id>> cells;
      for (const auto& inst : got) cells.insert(inst.employees);
      for (const auto& cell : cells) {
        covered.insert(cell.begin(), cell.end());
        total += cell.size();
      }
      CHECK(covered == std::set<Id>(linked.begin(), linked.end()));
      CHECK(total == covered.size());
    }
    ++built;
  }
  CHECK(built >= 60);
  CHECK(impossible >= 5);
}

TEST_CASE("instance ids are dense and sorted by construction order") {
  auto catalog = support::mini_catalog();
  auto params = support::mini_params();
  ItsModel m;
  support::seed_model(m, catalog, params);
  choose_software(m, catalog, params);
  instantiate_datasets(m);
  for (size_t i = 0; i < m.instances.size(); ++i) {
    CHECK(m.instances[i].id == static_cast<Id>(i));
    CHECK(std::is_sorted(m.instances[i].installation_ids.begin(),
                         m.instances[i].installation_ids.end()));
    CHECK(std::is_sorted(m.instances[i].employee_ids.begin(), m.instances[i].employee_ids.end()));
  }
}
