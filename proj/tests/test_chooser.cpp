#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chooser.hpp"
#include "errors.hpp"
#include "support.hpp"
#include "util.hpp"

using namespace itsforge;

namespace {

bool internet_group(const std::string& group) { return util::full_match("Internet", group); }

// Cost the chooser minimizes, recomputed from a set of per-ERS workstation
// patterns and a server set.
std::int64_t pattern_cost(const std::vector<SoftwareTemplate>& templates,
                          const std::vector<SoftwareVariant>& variants,
                          const std::vector<std::uint32_t>& ers_sets,
                          const std::vector<int>& ers_counts, std::uint32_t server_set,
                          std::int64_t w_h) {
  std::int64_t total = 0;
  for (size_t v = 0; v < variants.size(); ++v) {
    std::int64_t nn = 0;
    for (size_t r = 0; r < ers_sets.size(); ++r)
      if (ers_sets[r] >> v & 1) nn += ers_counts[r];
    if (server_set >> v & 1) ++nn;
    if (!nn) continue;
    const auto& t = templates[variants[v].template_id];
    total += w_h * t.hardware_quota * nn;
    total += t.license_cost_first + t.operating_cost_first;
    total += (t.license_cost_next + t.operating_cost_next) * (nn - 1);
  }
  return total;
}

// Exhaustive selection optimum: enumerates every dependency-closed,
// role-covering workstation pattern per ERS and every dependency-closed
// server set, keeps combinations whose network requirements and provided
// services are all served, and minimizes the cost. Returns -1 if nothing is
// feasible.
std::int64_t brute_force_selection(const TemplateCatalog& catalog,
                                   const std::vector<SoftwareVariant>& variants,
                                   const InputParameters& params) {
  const auto& templates = catalog.software;
  const int nv = static_cast<int>(variants.size());

  auto closed = [&](std::uint32_t set) {
    for (int v = 0; v < nv; ++v) {
      if (!(set >> v & 1)) continue;
      for (Id dep : variants[v].platform) {
        bool found = false;
        for (int w = 0; w < nv; ++w)
          if ((set >> w & 1) && variants[w].template_id == dep) found = true;
        if (!found) return false;
      }
    }
    return true;
  };

  std::vector<std::uint32_t> ers_sets;
  std::vector<std::vector<std::uint32_t>> candidates;
  std::vector<int> ers_counts;
  for (const auto& [subgroup, count] : params.erss) {
    const RoleTemplate* role = nullptr;
    for (const auto& r : catalog.roles)
      if (r.role_id == role_of_subgroup(subgroup)) role = &r;
    REQUIRE(role != nullptr);
    std::vector<std::uint32_t> sets;
    for (std::uint32_t set = 0; set < (1u << nv); ++set) {
      if (!closed(set)) continue;
      bool covers = true;
      for (const auto& group : role->required_user_services) {
        bool got = false;
        for (int v = 0; v < nv; ++v)
          if ((set >> v & 1) &&
              util::matches_any(templates[variants[v].template_id].provides_user_services, group))
            got = true;
        covers = covers && got;
      }
      if (covers) sets.push_back(set);
    }
    if (sets.empty()) return -1;
    candidates.push_back(std::move(sets));
    ers_counts.push_back(count);
  }

  std::vector<std::uint32_t> server_sets;
  for (std::uint32_t set = 0; set < (1u << nv); ++set)
    if (closed(set)) server_sets.push_back(set);

  auto serves = [&](std::uint32_t servers, const std::string& group) {
    for (int v = 0; v < nv; ++v)
      if ((servers >> v & 1) &&
          util::matches_any(templates[variants[v].template_id].provides_network_services, group))
        return true;
    return false;
  };

  std::int64_t best = -1;
  std::vector<std::uint32_t> pick(candidates.size(), 0);
  std::vector<size_t> idx(candidates.size(), 0);
  while (true) {
    for (size_t r = 0; r < candidates.size(); ++r) pick[r] = candidates[r][idx[r]];
    for (std::uint32_t servers : server_sets) {
      std::uint32_t chosen = servers;
      for (std::uint32_t set : pick) chosen |= set;
      bool ok = true;
      for (int v = 0; v < nv && ok; ++v) {
        if (!(chosen >> v & 1)) continue;
        for (const auto& group :
             templates[variants[v].template_id].requires_network_services)
          if (!internet_group(group) && !serves(servers, group)) ok = false;
      }
      for (const auto& sid : params.provided_external_services) {
        for (const auto& s : catalog.services)
          if (s.service_id == sid)
            for (const auto& group : s.required_network_services)
              if (!internet_group(group) && !serves(servers, group)) ok = false;
      }
      if (!ok) continue;
      std::int64_t cost =
          pattern_cost(templates, variants, pick, ers_counts, servers, params.w_h);
      if (best < 0 || cost < best) best = cost;
    }
    size_t r = 0;
    while (r < idx.size() && ++idx[r] == candidates[r].size()) idx[r++] = 0;
    if (r == idx.size()) break;
  }
  return best;
}

std::int64_t realized_cost(const ItsModel& m, std::int64_t w_h) {
  std::map<Id, std::int64_t> nn;
  for (const auto& inst : m.installations) ++nn[inst.variant_id];
  std::int64_t total = 0;
  for (const auto& [v, n] : nn) {
    const auto& t = m.template_of_variant(v);
    total += w_h * t.hardware_quota * n;
    total += t.license_cost_first + t.operating_cost_first;
    total += (t.license_cost_next + t.operating_cost_next) * (n - 1);
  }
  return total;
}

TemplateCatalog random_catalog(std::mt19937& rng) {
  std::uniform_int_distribution<int> ntempl(2, 5), coin(0, 1), pct(0, 99);
  std::uniform_int_distribution<int> cost(0, 9), quota(1, 3), tag(0, 2), net(0, 1);
  TemplateCatalog cat;
  const int n = ntempl(rng);
  for (int i = 0; i < n; ++i) {
    SoftwareTemplate t;
    t.id = i;
    t.cpe_idn = "cpe:/a:v" + std::to_string(i) + ":t" + std::to_string(i) + ":1";
    t.name = "T" + std::to_string(i);
    if (pct(rng) < 60) t.provides_user_services = {"U" + std::to_string(tag(rng))};
    if (pct(rng) < 40) t.provides_network_services = {"N" + std::to_string(net(rng))};
    if (pct(rng) < 30) t.requires_network_services = {"(N" + std::to_string(net(rng)) + ").*"};
    if (i > 0 && pct(rng) < 35) {
      std::uniform_int_distribution<int> dep(0, i - 1);
      int d = dep(rng);
      t.requires_local_software = {"(cpe:/a:v" + std::to_string(d) + ":t" + std::to_string(d) +
                                   ").*"};
    }
    t.hardware_quota = quota(rng);
    t.license_cost_first = cost(rng);
    t.license_cost_next = std::uniform_int_distribution<std::int64_t>(0, t.license_cost_first)(rng);
    t.operating_cost_first = cost(rng);
    t.operating_cost_next =
        std::uniform_int_distribution<std::int64_t>(0, t.operating_cost_first)(rng);
    cat.software.push_back(std::move(t));
  }
  std::uniform_int_distribution<int> nroles(1, 2), ngroups(1, 2);
  for (int i = 0; i < nroles(rng); ++i) {
    RoleTemplate r;
    r.id = i;
    r.role_id = "role" + std::to_string(i);
    for (int g = ngroups(rng); g > 0; --g)
      r.required_user_services.push_back("(U" + std::to_string(tag(rng)) + ").*");
    cat.roles.push_back(std::move(r));
  }
  std::uniform_int_distribution<int> nservices(0, 2);
  for (int i = nservices(rng); i > 0; --i) {
    ServiceTemplate s;
    s.id = static_cast<Id>(cat.services.size());
    s.service_id = "svc" + std::to_string(i);
    s.required_network_services = {"(N" + std::to_string(net(rng)) + ").*"};
    cat.services.push_back(std::move(s));
  }
  return cat;
}

InputParameters random_params(std::mt19937& rng, const TemplateCatalog& cat) {
  InputParameters p;
  std::uniform_int_distribution<int> ners(1, 2), role(0, static_cast<int>(cat.roles.size()) - 1);
  int total = 0;
  const int n = ners(rng);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> count(1, 4 / n);
    int c = count(rng);
    total += c;
    p.erss.push_back({cat.roles[role(rng)].role_id + ":g" + std::to_string(i), c});
  }
  REQUIRE(total <= 4);
  for (const auto& s : cat.services) p.provided_external_services.push_back(s.service_id);
  p.hq_limit = 100;
  p.w_h = 1;
  return p;
}

}  // namespace

TEST_CASE("expands one variant per combination of dependency matches") {
  std::vector<SoftwareTemplate> templates(4);
  templates[0].id = 0;
  templates[0].cpe_idn = "cpe:/o:a:base:1";
  templates[1].id = 1;
  templates[1].cpe_idn = "cpe:/o:a:base:2";
  templates[2].id = 2;
  templates[2].cpe_idn = "cpe:/a:b:lib:1";
  templates[3].id = 3;
  templates[3].cpe_idn = "cpe:/a:b:app:1";
  templates[3].requires_local_software = {"(cpe:/o:a:base).*", "(cpe:/a:b:lib).*"};

  auto variants = expand_variants(templates);
  REQUIRE(variants.size() == 5);  // three plain templates + 2x1 for the app
  for (int i = 0; i < 3; ++i) {
    CHECK(variants[i].template_id == i);
    CHECK(variants[i].platform.empty());
  }
  CHECK(variants[3].template_id == 3);
  CHECK(variants[3].platform == std::vector<Id>{0, 2});
  CHECK(variants[4].template_id == 3);
  CHECK(variants[4].platform == std::vector<Id>{1, 2});
}

TEST_CASE("throws when a dependency slot matches nothing") {
  std::vector<SoftwareTemplate> templates(1);
  templates[0].id = 0;
  templates[0].cpe_idn = "cpe:/a:b:app:1";
  templates[0].requires_local_software = {"(cpe:/o:none).*"};
  CHECK_THROWS_AS(expand_variants(templates), UnsatisfiableDependency);
}

TEST_CASE("prefers the cheaper of two equivalent clients") {
  auto catalog = support::mini_catalog();
  auto params = support::mini_params();
  ItsModel m;
  support::seed_model(m, catalog, params);
  choose_software(m, catalog, params);

  // Every employee gets the acme mail client and its OS; nobody gets bulk.
  std::map<std::string, int> by_name;
  for (const auto& inst : m.installations)
    ++by_name[m.template_of_installation(inst.id).name];
  CHECK(by_name["Acme Mail"] == 4);
  CHECK(by_name["Bulk Mail"] == 0);
  CHECK(by_name["Acme Mail Server"] == 1);
  CHECK(by_name["Acme Shop Server"] == 1);
  CHECK(by_name["Acme Backup Server"] == 1);
  CHECK(by_name["Acme OS"] == 4 + 1);  // per workstation plus one server original
  CHECK(m.employees.size() == 4);

  // The shop service points at its supporting installation.
  REQUIRE(m.services.size() == 1);
  REQUIRE(m.services[0].installation_ids.size() == 1);
  CHECK(m.template_of_installation(m.services[0].installation_ids[0]).name ==
        "Acme Shop Server");
}

TEST_CASE("matches the exhaustive selection optimum on random instances") {
  std::mt19937 rng(20240813);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto catalog = random_catalog(rng);
    auto variants = expand_variants(catalog.software);
    if (variants.size() > 6) continue;
    auto params = random_params(rng, catalog);
    auto expect = brute_force_selection(catalog, variants, params);

    ItsModel m;
    support::seed_model(m, catalog, params);
    CAPTURE(trial);
    try {
      choose_software(m, catalog, params);
    } catch (const InfeasibleError&) {
      CHECK(expect == -1);
      ++infeasible;
      continue;
    }
    REQUIRE(expect >= 0);
    CHECK(realized_cost(m, params.w_h) == expect);
    ++feasible;
  }
  CHECK(feasible >= 30);
  CHECK(infeasible >= 5);
}
