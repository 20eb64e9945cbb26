#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chooser.hpp"
#include "datasets.hpp"
#include "errors.hpp"
#include "segmenter.hpp"
#include "support.hpp"

using namespace itsforge;

namespace {

// Tiny segmentation worlds: every installation has its own single-purpose
// template, employees are all distinct, instances carry one collection each.
// Masks over at most three segments keep the exhaustive search cheap.
ItsModel random_world(std::mt19937& rng, int* n_installations, int* n_instances) {
  std::uniform_int_distribution<int> ni(1, 3), coin(0, 1), level(0, 5);
  ItsModel m;
  const int n_inst = ni(rng);
  std::uniform_int_distribution<int> nd(0, std::min(2, 5 - n_inst));
  const int n_data = nd(rng);
  *n_installations = n_inst;
  *n_instances = n_data;

  for (int i = 0; i < n_inst; ++i) {
    SoftwareTemplate t;
    t.id = i;
    t.cpe_idn = "cpe:/a:x:t" + std::to_string(i) + ":1";
    t.name = "T" + std::to_string(i);
    t.hardware_quota = 1;
    bool server = coin(rng) == 1;
    if (server)
      t.provides_network_services = {"S" + std::to_string(i)};
    else
      t.provides_user_services = {"A" + std::to_string(i)};
    m.templates.push_back(t);
    m.variants.push_back({i, i, {}});

    SoftwareInstallation inst;
    inst.id = i;
    inst.variant_id = i;
    if (server) {
      inst.owner = OwnerKind::Server;
    } else {
      inst.owner = OwnerKind::Employee;
      inst.employee_id = static_cast<Id>(m.employees.size());
      Employee e;
      e.id = inst.employee_id;
      e.subgroup_id = "g" + std::to_string(i);
      e.role_id = e.subgroup_id;
      m.employees.push_back(e);
    }
    m.installations.push_back(inst);
  }

  for (int d = 0; d < n_data; ++d) {
    DataCollection c;
    c.id = d;
    c.identifier = "D" + std::to_string(d);
    c.protection_level = level(rng);
    m.collections.push_back(c);

    DatasetInstance inst;
    inst.id = d;
    inst.collection_id = d;
    std::uniform_int_distribution<int> links(1, (1 << n_inst) - 1);
    int mask = links(rng);
    for (int i = 0; i < n_inst; ++i)
      if (mask >> i & 1) {
        inst.installation_ids.push_back(i);
        if (m.installations[i].owner == OwnerKind::Employee)
          inst.employee_ids.push_back(m.installations[i].employee_id);
      }
    std::sort(inst.employee_ids.begin(), inst.employee_ids.end());
    inst.primary_store = inst.installation_ids[0];
    m.instances.push_back(std::move(inst));
  }
  return m;
}

ObjectQuery random_query(std::mt19937& rng, const ItsModel& m) {
  std::uniform_int_distribution<int> pct(0, 99), coin(0, 1), level(0, 5);
  int p = pct(rng);
  if (p < 20)
    return {QueryKind::Software, "is_server", "", "==", coin(rng)};
  if (p < 40 && !m.instances.empty())
    return {QueryKind::Dataset, "protection_level", "", coin(rng) ? ">=" : "<=", level(rng)};
  if (p < 70 || m.instances.empty()) {
    std::uniform_int_distribution<int> i(0, static_cast<int>(m.installations.size()) - 1);
    return {QueryKind::Software, "name", "T" + std::to_string(i(rng)), "", 0};
  }
  std::uniform_int_distribution<int> d(0, static_cast<int>(m.instances.size()) - 1);
  return {QueryKind::Dataset, "dataset_identifier", "D" + std::to_string(d(rng)), "", 0};
}

InputParameters random_rules(std::mt19937& rng, const ItsModel& m) {
  InputParameters params;
  params.max_segments = 3;
  params.hq_limit = 100;
  std::uniform_int_distribution<int> nrules(0, 4), kind(0, 5), diff(0, 3);
  for (int r = nrules(rng); r > 0; --r) {
    SegmentationRule rule;
    switch (kind(rng)) {
      case 0:
      case 1: rule.kind = RuleKind::RequireDistinctNetworksForSets; break;
      case 2: rule.kind = RuleKind::RequireSameNetworksForSets; break;
      case 3: rule.kind = RuleKind::RequireCommonNetworksForSets; break;
      case 4: rule.kind = RuleKind::LimitAllowedProtectionLevelRange; break;
      default: rule.kind = RuleKind::AllowInternetExposureOnlyFor; break;
    }
    rule.set_a = {random_query(rng, m)};
    if (rule.kind != RuleKind::LimitAllowedProtectionLevelRange &&
        rule.kind != RuleKind::AllowInternetExposureOnlyFor)
      rule.set_b = {random_query(rng, m)};
    rule.allowed_difference = diff(rng);
    params.network_policies.push_back(std::move(rule));
  }
  return params;
}

// One mask per object: installations first, then instances.
using Assignment = std::vector<unsigned>;

bool assignment_ok(const ItsModel& m, const InputParameters& params, const Assignment& a) {
  const size_t ni = m.installations.size();
  auto mask_of = [&](const ObjectRef& r) { return r.is_instance ? a[ni + r.id] : a[r.id]; };

  for (const auto& inst : m.instances) {
    unsigned covered = 0;
    for (Id i : inst.installation_ids) {
      covered |= a[i];
      if (m.installations[i].owner == OwnerKind::Employee && !(a[ni + inst.id] & a[i]))
        return false;  // a client cannot reach its data
    }
    if (a[ni + inst.id] & ~covered) return false;  // instance segment without its software
  }

  for (const auto& rule : params.network_policies) {
    auto A = resolve_queries(m, rule.set_a);
    auto B = resolve_queries(m, rule.set_b);
    switch (rule.kind) {
      case RuleKind::RequireDistinctNetworksForSets:
        for (const auto& x : A)
          for (const auto& y : B)
            if (mask_of(x) & mask_of(y)) return false;
        break;
      case RuleKind::RequireSameNetworksForSets: {
        std::vector<ObjectRef> all = A;
        all.insert(all.end(), B.begin(), B.end());
        for (size_t i = 1; i < all.size(); ++i)
          if (mask_of(all[i]) != mask_of(all[0])) return false;
        break;
      }
      case RuleKind::RequireCommonNetworksForSets:
        for (const auto& x : A)
          for (const auto& y : B)
            if (!(x == y) && !(mask_of(x) & mask_of(y))) return false;
        break;
      case RuleKind::LimitAllowedProtectionLevelRange:
        for (const auto& x : m.instances)
          for (const auto& y : m.instances) {
            if (x.id >= y.id) continue;
            int diff = std::abs(m.collections[x.collection_id].protection_level -
                                m.collections[y.collection_id].protection_level);
            if (diff > rule.allowed_difference && (a[ni + x.id] & a[ni + y.id])) return false;
          }
        break;
      case RuleKind::AllowInternetExposureOnlyFor:
        break;  // nothing needs to face the internet in these worlds
      case RuleKind::RequireCollocatedLocalDependencies:
        break;  // no local dependencies in these worlds
    }
  }
  return true;
}

int min_segments(const ItsModel& m, const InputParameters& params) {
  const size_t n = m.installations.size() + m.instances.size();
  for (int k = 1; k <= params.max_segments; ++k) {
    const unsigned top = (1u << k) - 1;
    Assignment a(n, 1);
    while (true) {
      if (assignment_ok(m, params, a)) return k;
      size_t i = 0;
      while (i < n && a[i] == top) a[i++] = 1;
      if (i == n) break;
      ++a[i];
    }
  }
  return -1;
}

Assignment materialized(const ItsModel& m) {
  Assignment a(m.installations.size() + m.instances.size(), 0);
  for (const auto& inst : m.installations)
    for (Id s : inst.segment_ids) a[inst.id] |= 1u << s;
  for (const auto& inst : m.instances)
    for (Id s : inst.segment_ids) a[m.installations.size() + inst.id] |= 1u << s;
  return a;
}

}  // namespace

TEST_CASE("uses the fewest segments the rules admit on random worlds") {
  std::mt19937 rng(20240815);
  int feasible = 0, infeasible = 0, multi = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n_inst = 0, n_data = 0;
    ItsModel m = random_world(rng, &n_inst, &n_data);
    InputParameters params = random_rules(rng, m);
    int expect = min_segments(m, params);
    CAPTURE(trial);
    if (expect < 0) {
      CHECK_THROWS_AS(segment_network(m, params), SegmentationInfeasible);
      ++infeasible;
      continue;
    }
    segment_network(m, params);
    CHECK(static_cast<int>(m.segments.size()) == expect);
    // The materialized assignment itself satisfies everything it promised.
    CHECK(assignment_ok(m, params, materialized(m)));
    for (const auto& inst : m.installations) CHECK(!inst.segment_ids.empty());
    for (const auto& inst : m.instances) CHECK(!inst.segment_ids.empty());
    ++feasible;
    if (expect > 1) ++multi;
  }
  CHECK(feasible >= 100);
  CHECK(infeasible >= 10);
  CHECK(multi >= 25);
}

TEST_CASE("identical runs produce identical placements") {
  std::mt19937 rng(20240816);
  for (int trial = 0; trial < 20; ++trial) {
    int n_inst = 0, n_data = 0;
    ItsModel proto = random_world(rng, &n_inst, &n_data);
    InputParameters params = random_rules(rng, proto);
    ItsModel a = proto, b = proto;
    if (min_segments(proto, params) < 0) continue;
    segment_network(a, params);
    segment_network(b, params);
    REQUIRE(a.segments.size() == b.segments.size());
    for (size_t i = 0; i < a.installations.size(); ++i)
      CHECK(a.installations[i].segment_ids == b.installations[i].segment_ids);
    for (size_t i = 0; i < a.instances.size(); ++i)
      CHECK(a.instances[i].segment_ids == b.instances[i].segment_ids);
  }
}

TEST_CASE("employee groups with equal patterns share their representative's placement") {
  auto catalog = support::mini_catalog();
  auto params = support::mini_params();
  ItsModel m;
  support::seed_model(m, catalog, params);
  choose_software(m, catalog, params);
  instantiate_datasets(m);
  segment_network(m, params);

  // The three office workers run identical software with identical personal
  // data, so their installations must land in identical segments.
  std::vector<std::vector<Id>> per_employee(m.employees.size());
  for (const auto& inst : m.installations)
    if (inst.owner == OwnerKind::Employee)
      per_employee[inst.employee_id].push_back(inst.variant_id);
  REQUIRE(m.employees[0].subgroup_id == m.employees[1].subgroup_id);
  auto segs_of = [&](Id e) {
    std::vector<std::vector<Id>> out;
    for (const auto& inst : m.installations)
      if (inst.owner == OwnerKind::Employee && inst.employee_id == e)
        out.push_back(inst.segment_ids);
    return out;
  };
  CHECK(segs_of(0) == segs_of(1));
  CHECK(segs_of(0) == segs_of(2));

  // Servers and workstations may not mix, so at least two segments exist.
  CHECK(m.segments.size() >= 2);
}
