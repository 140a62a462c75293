#include "privesc/io/serialize.hpp"

#include <sstream>
#include <stdexcept>

namespace privesc::io {

using nlohmann::json;

namespace {

json range(const winsim::IntRange& r) { return json::array({r.lo, r.hi}); }

winsim::IntRange range_from(const json& j) {
  if (j.is_number_integer()) return {j.get<int>(), j.get<int>()};
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be [lo, hi] or a single integer");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string_view vuln_mode_name(winsim::VulnMode m) {
  switch (m) {
    case winsim::VulnMode::SingleRandom: return "single-random";
    case winsim::VulnMode::Fixed: return "fixed";
    case winsim::VulnMode::Multi: return "multi";
  }
  return "?";
}

winsim::VulnMode parse_vuln_mode(std::string_view s) {
  for (auto m : {winsim::VulnMode::SingleRandom, winsim::VulnMode::Fixed, winsim::VulnMode::Multi}) {
    if (s == vuln_mode_name(m)) return m;
  }
  throw std::invalid_argument("unknown vulnerability mode: " + std::string(s));
}

json to_json(const winsim::EnvConfig& c) {
  json vulns = json::array();
  for (auto v : c.vulns) vulns.push_back(std::string(winsim::vuln_label(v)));
  const auto& d = c.decoys;
  return {{"services", range(c.services)},
          {"autoruns", range(c.autoruns)},
          {"tasks", range(c.tasks)},
          {"dlls_per_service", range(c.dlls_per_service)},
          {"max_steps", c.max_steps},
          {"mode", std::string(vuln_mode_name(c.mode))},
          {"vulns", vulns},
          {"windows_service_fraction", c.windows_service_fraction},
          {"decoys",
           {{"non_elevated_service", d.non_elevated_service},
            {"quoted_writable_parent", d.quoted_writable_parent},
            {"standard_registry_credentials", d.standard_registry_credentials},
            {"writable_path_folder", d.writable_path_folder},
            {"standard_unattend_credentials", d.standard_unattend_credentials},
            {"non_elevated_writable_task", d.non_elevated_writable_task},
            {"single_install_elevated_bit", d.single_install_elevated_bit}}}};
}

winsim::EnvConfig env_config_from_json(const json& j) {
  winsim::EnvConfig c;
  try {
    if (j.contains("services")) c.services = range_from(j["services"]);
    if (j.contains("autoruns")) c.autoruns = range_from(j["autoruns"]);
    if (j.contains("tasks")) c.tasks = range_from(j["tasks"]);
    if (j.contains("dlls_per_service")) c.dlls_per_service = range_from(j["dlls_per_service"]);
    c.max_steps = j.value("max_steps", c.max_steps);
    if (j.contains("mode")) c.mode = parse_vuln_mode(j["mode"].get<std::string>());
    if (j.contains("vulns")) {
      for (const auto& v : j["vulns"]) {
        const auto parsed = winsim::parse_vuln(v.get<std::string>());
        if (!parsed) throw std::invalid_argument("unknown vulnerability: " + v.get<std::string>());
        c.vulns.push_back(*parsed);
      }
    }
    c.windows_service_fraction = j.value("windows_service_fraction", c.windows_service_fraction);
    if (j.contains("decoys")) {
      const json& d = j["decoys"];
      auto& r = c.decoys;
      if (d.is_number()) {
        const double p = d.get<double>();
        r = {p, p, p, p, p, p, p};
      } else {
        r.non_elevated_service = d.value("non_elevated_service", r.non_elevated_service);
        r.quoted_writable_parent = d.value("quoted_writable_parent", r.quoted_writable_parent);
        r.standard_registry_credentials = d.value("standard_registry_credentials", r.standard_registry_credentials);
        r.writable_path_folder = d.value("writable_path_folder", r.writable_path_folder);
        r.standard_unattend_credentials = d.value("standard_unattend_credentials", r.standard_unattend_credentials);
        r.non_elevated_writable_task = d.value("non_elevated_writable_task", r.non_elevated_writable_task);
        r.single_install_elevated_bit = d.value("single_install_elevated_bit", r.single_install_elevated_bit);
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad environment config: ") + e.what());
  }
  c.validate();
  return c;
}

json host_to_json(const winsim::SimHost& h) {
  json vulns = json::array();
  for (auto v : h.injected) vulns.push_back(std::string(winsim::vuln_label(v)));
  json decoys = json::array();
  for (auto d : h.decoys) decoys.push_back(std::string(winsim::decoy_name(d)));
  json services = json::array();
  for (const auto& s : h.services) {
    services.push_back({{"name", s.name},
                        {"image_path", s.image_path},
                        {"run_as", s.run_as},
                        {"started", s.started},
                        {"elevated", s.elevated},
                        {"reconfigurable", s.reconfig_acl},
                        {"registry_modifiable", s.registry_acl},
                        {"dlls", s.dll_imports}});
  }
  json autoruns = json::array();
  for (const auto& a : h.autoruns) {
    autoruns.push_back({{"name", a.name},
                        {"path", a.path},
                        {"trigger", a.trigger},
                        {"kind", a.kind == winsim::AutoRunKind::StartupFolder ? "startup-folder" : "registry-run"}});
  }
  json tasks = json::array();
  for (const auto& t : h.tasks) {
    tasks.push_back(
        {{"name", t.name}, {"exe", t.exe_path}, {"run_as", t.run_as}, {"trigger", t.trigger}, {"elevated", t.elevated}});
  }
  json users = json::array();
  for (const auto& u : h.users) users.push_back({{"name", u.name}, {"admin", u.is_admin}});
  return {{"current_user", h.current_user},
          {"vulns", vulns},
          {"decoys", decoys},
          {"services", services},
          {"autoruns", autoruns},
          {"tasks", tasks},
          {"users", users},
          {"path_dirs", h.path_dirs},
          {"unattend_files", h.unattend_files.size()},
          {"winlogon_user", h.registry.winlogon_user ? json(*h.registry.winlogon_user) : json(nullptr)},
          {"install_elevated", {h.registry.install_elevated_machine, h.registry.install_elevated_user}},
          {"filesystem_nodes", h.fs.size()}};
}

std::string format_host(const winsim::SimHost& h) {
  std::ostringstream os;
  os << "current user: " << h.current_user << '\n';
  os << "vulnerabilities:";
  for (auto v : h.injected) os << ' ' << winsim::vuln_label(v) << " (" << winsim::vuln_description(v) << ')';
  os << "\ndecoys:";
  if (h.decoys.empty()) os << " none";
  for (std::size_t i = 0; i < h.decoys.size(); ++i) os << (i ? ", " : " ") << winsim::decoy_name(h.decoys[i]);
  os << "\nservices (" << h.services.size() << "):\n";
  for (const auto& s : h.services) {
    os << "  " << s.name << "  " << s.image_path << "  [" << s.run_as << (s.started ? ", running" : ", stopped")
       << (s.reconfig_acl ? ", reconfigurable" : "") << (s.registry_acl ? ", registry-writable" : "") << "]\n";
  }
  os << "autoruns (" << h.autoruns.size() << "):\n";
  for (const auto& a : h.autoruns) os << "  " << a.name << "  " << a.path << '\n';
  os << "tasks (" << h.tasks.size() << "):\n";
  for (const auto& t : h.tasks) os << "  " << t.name << "  " << t.exe_path << "  [" << t.run_as << "]\n";
  os << "users:";
  for (const auto& u : h.users) os << ' ' << u.name << (u.is_admin ? "*" : "");
  os << "\nPATH:";
  for (const auto& p : h.path_dirs) os << ' ' << p;
  os << '\n';
  return os.str();
}

json state_to_json(const state::AgentState& s) {
  json general = json::object();
  for (int i = 0; i < state::kNumGeneralTrits; ++i) {
    general[std::string(state::general_var_name(i))] = to_string(s.general[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < state::kNumFlags; ++i) {
    general[std::string(state::general_var_name(state::kNumGeneralTrits + i))] = s.flags[static_cast<std::size_t>(i)];
  }
  json services = json::array();
  for (const auto& svc : s.services) {
    json attrs = json::object();
    for (int a = 0; a < state::kServiceAttrs; ++a) {
      attrs[std::string(state::service_attr_name(a))] = to_string(svc.attrs[static_cast<std::size_t>(a)]);
    }
    json dlls = json::array();
    for (const auto& d : svc.dlls) {
      dlls.push_back({{"name", d.name},
                      {"path", d.path},
                      {"missing", to_string(d.attrs[state::kDllMissing])},
                      {"writable", to_string(d.attrs[state::kDllWritable])},
                      {"replaced", to_string(d.attrs[state::kDllReplaced])}});
    }
    services.push_back({{"name", svc.name}, {"attrs", attrs}, {"dlls", dlls}});
  }
  json autoruns = json::array();
  for (const auto& a : s.autoruns) {
    autoruns.push_back({{"name", a.name},
                        {"writable", to_string(a.attrs[state::kArWritable])},
                        {"in_windows", to_string(a.attrs[state::kArInWindows])}});
  }
  json tasks = json::array();
  for (const auto& t : s.tasks) {
    tasks.push_back({{"name", t.name},
                     {"elevated", to_string(t.attrs[state::kTaskElevated])},
                     {"exe_writable", to_string(t.attrs[state::kTaskExeWritable])},
                     {"in_windows", to_string(t.attrs[state::kTaskInWindows])}});
  }
  return {{"general", general}, {"services", services}, {"autoruns", autoruns}, {"tasks", tasks}};
}

}  // namespace privesc::io
