#include "dot_export.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace itsforge {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

struct ComputerGroups {
  std::vector<int> group_of;              // computer id -> group
  std::vector<std::vector<Id>> members;   // group -> computer ids
  std::vector<std::string> label;         // group -> display label
  std::vector<Id> segment;                // group -> cluster segment (first)
};

ComputerGroups group_computers(const ItsModel& m) {
  using Key = std::tuple<int, std::string, std::vector<Id>, std::vector<std::string>>;
  std::map<Key, int> index;
  ComputerGroups g;
  g.group_of.resize(m.computers.size());
  for (const auto& comp : m.computers) {
    std::vector<std::string> names;
    for (Id i : comp.installation_ids) names.push_back(m.template_of_installation(i).name);
    std::sort(names.begin(), names.end());
    std::string who = comp.kind == ComputerKind::Workstation
                          ? m.employees[comp.employee_id].subgroup_id
                          : "server";
    Key key{static_cast<int>(comp.kind), who, comp.segment_ids, names};
    auto [it, fresh] = index.try_emplace(key, static_cast<int>(g.members.size()));
    if (fresh) {
      g.members.emplace_back();
      names.erase(std::unique(names.begin(), names.end()), names.end());
      std::string label = who;
      for (size_t i = 0; i < names.size(); ++i)
        label += (i ? ", " : "\\n") + escape(names[i]);
      g.label.push_back(label);
      g.segment.push_back(comp.segment_ids.front());
    }
    g.group_of[comp.id] = it->second;
    g.members[it->second].push_back(comp.id);
  }
  for (size_t i = 0; i < g.members.size(); ++i)
    if (g.members[i].size() > 1)
      g.label[i] += "\\nx" + std::to_string(g.members[i].size());
  return g;
}

std::string node_name(int group) { return "c" + std::to_string(group); }

void emit_group_nodes(std::ostream& out, const ComputerGroups& g, const std::set<int>& groups,
                      const std::string& indent) {
  for (int grp : groups)
    out << indent << node_name(grp) << " [shape=box, label=\"" << g.label[grp] << "\"];\n";
}

}  // namespace

std::string landscape_dot(const ItsModel& m) {
  auto g = group_computers(m);
  std::ostringstream out;
  out << "digraph landscape {\n";
  for (const auto& seg : m.segments) {
    out << "  subgraph cluster_" << seg.id << " {\n";
    out << "    label=\"" << escape(seg.name) << (seg.internet_facing ? " (internet facing)" : "")
        << "\";\n";
    std::set<int> here;
    for (size_t grp = 0; grp < g.members.size(); ++grp)
      if (g.segment[grp] == seg.id) here.insert(static_cast<int>(grp));
    emit_group_nodes(out, g, here, "    ");
    out << "  }\n";
  }
  bool facing = false;
  for (const auto& seg : m.segments) facing |= seg.internet_facing;
  if (facing) out << "  internet [shape=cloud, label=\"internet\"];\n";
  out << "}\n";
  return out.str();
}

std::string datasets_dot(const ItsModel& m) {
  auto g = group_computers(m);
  using Key = std::tuple<Id, std::vector<Id>, int>;  // collection, segments, store group
  std::map<Key, std::pair<int, int>> groups;         // -> (node index, count)
  std::vector<Key> order;
  for (const auto& inst : m.instances) {
    int store_group = g.group_of[m.installations[inst.primary_store].computer_id];
    Key key{inst.collection_id, inst.segment_ids, store_group};
    auto [it, fresh] = groups.try_emplace(key, std::pair{static_cast<int>(order.size()), 0});
    if (fresh) order.push_back(key);
    ++it->second.second;
  }
  std::ostringstream out;
  out << "digraph datasets {\n";
  std::set<int> used;
  for (const auto& key : order) used.insert(std::get<2>(key));
  emit_group_nodes(out, g, used, "  ");
  for (const auto& key : order) {
    const auto& [node, count] = groups[key];
    const auto& c = m.collections[std::get<0>(key)];
    out << "  d" << node << " [shape=ellipse, label=\"" << escape(c.identifier) << " (level "
        << c.protection_level << ")";
    if (count > 1) out << "\\nx" << count;
    out << "\"];\n";
  }
  for (const auto& key : order)
    out << "  d" << groups[key].first << " -> " << node_name(std::get<2>(key))
        << " [label=\"stored on\"];\n";
  out << "}\n";
  return out.str();
}

std::string credentials_dot(const ItsModel& m) {
  auto g = group_computers(m);
  using Key = std::tuple<int, bool, int, std::vector<std::string>>;
  std::map<Key, std::pair<int, int>> groups;
  std::vector<Key> order;
  for (const auto& c : m.credentials) {
    std::vector<std::string> accepted;
    for (Id i : c.accepted_by) accepted.push_back(m.template_of_installation(i).name);
    std::sort(accepted.begin(), accepted.end());
    accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
    Key key{static_cast<int>(c.scope), c.privileged, g.group_of[c.stored_on], accepted};
    auto [it, fresh] = groups.try_emplace(key, std::pair{static_cast<int>(order.size()), 0});
    if (fresh) order.push_back(key);
    ++it->second.second;
  }
  std::ostringstream out;
  out << "digraph credentials {\n";
  std::set<int> used;
  for (const auto& key : order) used.insert(std::get<2>(key));
  emit_group_nodes(out, g, used, "  ");
  for (const auto& key : order) {
    const auto& [node, count] = groups[key];
    std::ostringstream label;
    label << (std::get<0>(key) == static_cast<int>(CredentialScope::Domain) ? "domain" : "local");
    if (std::get<1>(key)) label << " privileged";
    label << " account";
    for (size_t i = 0; i < std::get<3>(key).size(); ++i)
      label << (i ? ", " : "\\nfor ") << escape(std::get<3>(key)[i]);
    if (count > 1) label << "\\nx" << count;
    out << "  k" << node << " [shape=hexagon, label=\"" << label.str() << "\"];\n";
  }
  for (const auto& key : order)
    out << "  k" << groups[key].first << " -> " << node_name(std::get<2>(key))
        << " [label=\"stored on\"];\n";
  out << "}\n";
  return out.str();
}

std::string firewall_dot(const ItsModel& m) {
  auto g = group_computers(m);
  auto endpoint = [&](Id install) {
    return install == kInternet ? std::string("internet")
                                : node_name(g.group_of[m.installations[install].computer_id]);
  };
  std::map<std::pair<std::string, std::string>, int> edges;
  std::vector<std::pair<std::string, std::string>> order;
  bool internet = false;
  std::set<int> used;
  for (const auto& r : m.firewall_rules) {
    for (Id i : {r.from_installation, r.to_installation}) {
      if (i == kInternet)
        internet = true;
      else
        used.insert(g.group_of[m.installations[i].computer_id]);
    }
    std::pair<std::string, std::string> e{endpoint(r.from_installation),
                                          endpoint(r.to_installation)};
    auto [it, fresh] = edges.try_emplace(e, 0);
    if (fresh) order.push_back(e);
    ++it->second;
  }
  std::ostringstream out;
  out << "digraph firewall {\n";
  if (internet) out << "  internet [shape=cloud, label=\"internet\"];\n";
  emit_group_nodes(out, g, used, "  ");
  for (const auto& e : order) {
    out << "  " << e.first << " -> " << e.second;
    if (edges[e] > 1) out << " [label=\"x" << edges[e] << "\"]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

void export_dot(const ItsModel& m, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
    if (!out) throw InputError("failed writing " + path);
  };
  write("landscape.dot", landscape_dot(m));
  write("datasets.dot", datasets_dot(m));
  write("credentials.dot", credentials_dot(m));
  write("firewall.dot", firewall_dot(m));
}

}  // namespace itsforge
