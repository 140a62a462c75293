#include "privesc/winsim/env.hpp"

#include <algorithm>
#include <stdexcept>

#include "privesc/core/base64.hpp"
#include "privesc/winsim/winpath.hpp"

namespace privesc::winsim {

namespace wp = winpath;
using state::AgentState;
using state::DllState;
using state::ServiceState;

std::string_view success_path_name(SuccessPath p) {
  switch (p) {
    case SuccessPath::AdminGroup: return "admin-group";
    case SuccessPath::AdminCredentials: return "admin-credentials";
    case SuccessPath::ElevatedProgram: return "elevated-program";
  }
  return "?";
}

namespace {

bool runs_exe(Content c) { return c == Content::MaliciousExe || c == Content::MaliciousServiceExe; }

bool file_has(const FileSystem& fs, std::string_view path, bool (*pred)(Content)) {
  const FsNode* n = fs.find(path);
  return n && !n->is_dir && pred(n->content);
}

}  // namespace

std::optional<SuccessPath> check_success(const SimHost& host, const AttackerContext& attacker) {
  if (host.is_admin(host.current_user)) return SuccessPath::AdminGroup;
  for (const auto& c : attacker.known_credentials) {
    if (c.verified && host.is_admin(c.user)) return SuccessPath::AdminCredentials;
  }
  for (const auto& ar : host.autoruns) {
    if (ar.kind == AutoRunKind::RegistryRun) {
      if (file_has(host.fs, ar.path, is_malicious)) return SuccessPath::ElevatedProgram;
    } else {
      for (const FsNode* n : host.fs.children(ar.path)) {
        if (!n->is_dir && is_malicious(n->content)) return SuccessPath::ElevatedProgram;
      }
    }
  }
  for (const auto& t : host.tasks) {
    if (t.elevated && file_has(host.fs, t.exe_path, is_malicious)) return SuccessPath::ElevatedProgram;
  }
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, kNumArtifacts> kPayloadNames = {"update.exe", "updsvc.exe", "update.dll",
                                                                       "setup.msi"};
constexpr std::array<Content, kNumArtifacts> kPayloadContent = {Content::MaliciousExe, Content::MaliciousServiceExe,
                                                                Content::MaliciousDll, Content::MaliciousMsi};

/// Executes one action against the host. Arguments are filled from what the
/// attacker already knows; only targets known to qualify are used.
class Runner {
 public:
  Runner(SimHost& host, AttackerContext& attacker, Action a) : host_(host), att_(attacker), a_(a) {}

  std::vector<Fact> run() {
    switch (a_) {
      case Action::CreateExe: return create(Artifact::Exe);
      case Action::CreateServiceExe: return create(Artifact::ServiceExe);
      case Action::CompileDll: return create(Artifact::Dll);
      case Action::CreateMsi: return create(Artifact::Msi);
      case Action::DownloadExe: return download(Artifact::Exe);
      case Action::DownloadServiceExe: return download(Artifact::ServiceExe);
      case Action::DownloadDll: return download(Artifact::Dll);
      case Action::DownloadMsi: return download(Artifact::Msi);
      case Action::StartExploitedService: return start_services();
      case Action::StopExploitedService: return stop_services();
      case Action::OverwriteAutoRun: return overwrite_autorun();
      case Action::OverwriteTaskBinary: return overwrite_task();
      case Action::OverwriteServiceBinary: return overwrite_service_binary();
      case Action::PlantUnquotedPathExe: return plant_unquoted();
      case Action::OverwriteDll: return overwrite_dll();
      case Action::PlantMissingDll: return plant_missing_dll();
      case Action::ReconfigureServiceExe: return reconfigure(true, false);
      case Action::ReconfigureServiceAddAdmin: return reconfigure(false, false);
      case Action::RegistryServiceExe: return reconfigure(true, true);
      case Action::RegistryServiceAddAdmin: return reconfigure(false, true);
      case Action::InstallMsi: return install_msi();
      case Action::SearchUnattendFiles: return search_unattend();
      case Action::DecodeBase64Credentials: return decode_credentials();
      case Action::TestCredentials: return test_credentials();
      case Action::CheckServicePermissions: return check_services(false);
      case Action::CheckServiceRegistryAcl: return check_services(true);
      case Action::CheckExecutablePermissions: return check_files();
      case Action::CheckDirectoryPermissions: return check_dirs();
      case Action::AnalyzeServiceDlls: return analyze_dlls();
      case Action::SearchDlls: return search_dlls();
      case Action::ListServices: return list_services();
      case Action::ListAutoRuns: return list_autoruns();
      case Action::ListScheduledTasks: return list_tasks();
      case Action::CheckInstallElevated:
        return {InstallElevatedBits{host_.registry.install_elevated_machine, host_.registry.install_elevated_user}};
      case Action::CheckWinlogon: return check_winlogon();
      case Action::ListUsers: return list_users();
      case Action::GetCurrentUser: return {CurrentUser{host_.current_user}};
      case Action::GetWindowsPath: return {WindowsPath{host_.path_dirs}};
    }
    return fail("unknown action");
  }

 private:
  const AgentState& know() const { return att_.knowledge; }
  bool user_known() const { return !know().aux.current_user.empty(); }
  std::vector<std::string> token() const { return host_.current_token(); }

  std::vector<Fact> fail(std::string reason) const { return {ActionFailed{a_, std::move(reason)}}; }

  // ------------------------------------------------------------- artifacts

  std::vector<Fact> create(Artifact k) {
    const auto i = static_cast<std::size_t>(k);
    if (!user_known()) return fail("payload needs the current user name");
    if (att_.created[i]) return fail("already created");
    att_.created[i] = true;
    return {ArtifactCreated{k}};
  }

  std::vector<Fact> download(Artifact k) {
    const auto i = static_cast<std::size_t>(k);
    if (!att_.created[i]) return fail("nothing to download");
    if (att_.downloaded[i]) return fail("already downloaded");
    const std::string path = wp::join(host_.downloads_dir, kPayloadNames[i]);
    if (!host_.fs.write_file(path, token(), kPayloadContent[i])) return fail("download folder not writable");
    att_.downloaded[i] = true;
    return {ArtifactDownloaded{k, host_.fs.find(path)->path}};
  }

  bool downloaded(Artifact k) const { return att_.downloaded[static_cast<std::size_t>(k)]; }
  const std::string& download_path(Artifact k) const { return know().aux.downloads[static_cast<std::size_t>(k)]; }

  // -------------------------------------------------------------- services

  /// Whether starting `svc` executes an attacker payload.
  bool runs_payload(const ServiceRec& svc) const {
    const auto img = wp::parse_image_path(svc.image_path);
    if (img.is_command) return svc.image_path.find("localgroup administrators") != std::string::npos;
    if (!img.quoted) {
      for (const auto& cand : wp::unquoted_candidates(img.exe)) {
        if (host_.fs.is_file(cand)) return file_has(host_.fs, cand, runs_exe);
      }
    }
    if (!host_.fs.is_file(img.exe)) return false;
    if (file_has(host_.fs, img.exe, runs_exe)) return true;
    const std::string dir = wp::parent(img.exe);
    for (const auto& dll : svc.dll_imports) {
      const auto resolved = host_.resolve_dll(dir, dll);
      if (resolved && host_.fs.find(*resolved)->content == Content::MaliciousDll) return true;
    }
    return false;
  }

  std::vector<Fact> start_services() {
    const auto pending = know().aux.pending_start;
    if (pending.empty()) return fail("no exploited service to start");
    std::vector<Fact> out;
    for (const auto& name : pending) {
      ServiceRec* svc = host_.find_service(name);
      if (!svc) continue;
      if (runs_payload(*svc) && svc->elevated) {
        if (UserRec* u = host_.find_user(host_.current_user)) u->is_admin = true;
      }
      svc->started = true;
      out.emplace_back(ServiceStarted{svc->name});
    }
    return out;
  }

  std::vector<Fact> stop_services() {
    std::vector<Fact> out;
    for (const auto& s : know().services) {
      if (s.attrs[state::kSvcExploited] != Trit::True || s.attrs[state::kSvcRunning] != Trit::True) continue;
      ServiceRec* svc = host_.find_service(s.name);
      if (!svc) continue;
      svc->started = false;
      out.emplace_back(ServiceStopped{svc->name});
    }
    if (out.empty()) return fail("no running exploited service");
    return out;
  }

  /// First qualifying service, elevated ones first.
  template <typename Pred>
  const ServiceState* pick_service(Pred pred) const {
    const ServiceState* fallback = nullptr;
    for (const auto& s : know().services) {
      if (s.is_command || s.attrs[state::kSvcExploited] == Trit::True || !pred(s)) continue;
      if (s.attrs[state::kSvcElevated] == Trit::True) return &s;
      if (!fallback) fallback = &s;
    }
    return fallback;
  }

  std::vector<Fact> overwrite_service_binary() {
    if (!downloaded(Artifact::ServiceExe)) return fail("no service executable downloaded");
    const ServiceState* s = pick_service([](const ServiceState& x) { return x.attrs[state::kSvcExeWritable] == Trit::True; });
    if (!s) return fail("no service with a writable executable known");
    if (!host_.fs.write_file(s->exe, token(), Content::MaliciousServiceExe)) return fail("access denied");
    return {Exploited{TargetKind::Service, s->name, "", host_.fs.find(s->exe)->path}};
  }

  std::optional<std::string> hijack_candidate(const ServiceState& s) const {
    for (const auto& cand : wp::unquoted_candidates(s.exe)) {
      if (know().aux.dir_known(wp::parent(cand)).value_or(false)) return cand;
    }
    return std::nullopt;
  }

  std::vector<Fact> plant_unquoted() {
    if (!downloaded(Artifact::ServiceExe)) return fail("no service executable downloaded");
    const ServiceState* s = pick_service([&](const ServiceState& x) {
      return x.attrs[state::kSvcUnquoted] == Trit::True && x.attrs[state::kSvcWhitespace] == Trit::True &&
             hijack_candidate(x).has_value();
    });
    if (!s) return fail("no unquoted path with a writable folder known");
    const std::string cand = *hijack_candidate(*s);
    if (!host_.fs.write_file(cand, token(), Content::MaliciousServiceExe)) return fail("access denied");
    return {Exploited{TargetKind::Service, s->name, "", host_.fs.find(cand)->path}};
  }

  std::pair<const ServiceState*, const DllState*> pick_dll(bool missing) const {
    std::pair<const ServiceState*, const DllState*> fallback{nullptr, nullptr};
    for (const auto& s : know().services) {
      if (s.attrs[state::kSvcExploited] == Trit::True) continue;
      for (const auto& d : s.dlls) {
        const bool ok = missing ? d.attrs[state::kDllMissing] == Trit::True
                                : d.attrs[state::kDllWritable] == Trit::True;
        if (!ok || d.attrs[state::kDllReplaced] == Trit::True) continue;
        if (s.attrs[state::kSvcElevated] == Trit::True) return {&s, &d};
        if (!fallback.first) fallback = {&s, &d};
      }
    }
    return fallback;
  }

  std::vector<Fact> overwrite_dll() {
    if (!downloaded(Artifact::Dll)) return fail("no DLL downloaded");
    const auto [s, d] = pick_dll(false);
    if (!s) return fail("no writable DLL known");
    if (!host_.fs.write_file(d->path, token(), Content::MaliciousDll)) return fail("access denied");
    return {Exploited{TargetKind::Dll, d->name, s->name, host_.fs.find(d->path)->path}};
  }

  std::vector<Fact> plant_missing_dll() {
    if (!downloaded(Artifact::Dll)) return fail("no DLL downloaded");
    std::string dir;
    for (const auto& p : know().aux.path_dirs) {
      if (know().aux.dir_known(p).value_or(false)) {
        dir = p;
        break;
      }
    }
    if (dir.empty()) return fail("no writable folder on the path known");
    const auto [s, d] = pick_dll(true);
    if (!s) return fail("no missing DLL known");
    const std::string path = wp::join(dir, d->name);
    if (!host_.fs.write_file(path, token(), Content::MaliciousDll)) return fail("access denied");
    return {Exploited{TargetKind::Dll, d->name, s->name, host_.fs.find(path)->path}};
  }

  std::vector<Fact> reconfigure(bool with_exe, bool via_registry) {
    if (with_exe ? !downloaded(Artifact::ServiceExe) : !user_known()) {
      return fail(with_exe ? "no service executable downloaded" : "payload needs the current user name");
    }
    const int attr = via_registry ? state::kSvcRegistryModifiable : state::kSvcReconfigurable;
    const ServiceState* s = pick_service([&](const ServiceState& x) { return x.attrs[attr] == Trit::True; });
    if (!s) return fail(via_registry ? "no modifiable service registry key known" : "no re-configurable service known");
    ServiceRec* svc = host_.find_service(s->name);
    if (!svc || !(via_registry ? svc->registry_acl : svc->reconfig_acl)) return fail("access denied");
    svc->image_path = with_exe ? "\"" + download_path(Artifact::ServiceExe) + "\""
                               : "C:\\Windows\\System32\\cmd.exe /c net localgroup administrators " +
                                     host_.current_user + " /add";
    return {Exploited{TargetKind::Service, svc->name, "", svc->image_path}};
  }

  // ------------------------------------------------------ autoruns / tasks

  std::vector<Fact> overwrite_autorun() {
    if (!downloaded(Artifact::Exe)) return fail("no executable downloaded");
    for (const auto& ar : know().autoruns) {
      if (ar.overwritten || ar.attrs[state::kArWritable] != Trit::True) continue;
      const std::string path = ar.kind == AutoRunKind::StartupFolder ? wp::join(ar.path, kPayloadNames[0]) : ar.path;
      if (!host_.fs.write_file(path, token(), Content::MaliciousExe)) return fail("access denied");
      return {Exploited{TargetKind::AutoRun, ar.name, "", host_.fs.find(path)->path}};
    }
    return fail("no writable AutoRun known");
  }

  std::vector<Fact> overwrite_task() {
    if (!downloaded(Artifact::Exe)) return fail("no executable downloaded");
    const state::TaskState* pick = nullptr;
    for (const auto& t : know().tasks) {
      if (t.overwritten || t.attrs[state::kTaskExeWritable] != Trit::True) continue;
      if (t.attrs[state::kTaskElevated] == Trit::True) {
        pick = &t;
        break;
      }
      if (!pick) pick = &t;
    }
    if (!pick) return fail("no writable task executable known");
    if (!host_.fs.write_file(pick->exe_path, token(), Content::MaliciousExe)) return fail("access denied");
    return {Exploited{TargetKind::Task, pick->name, "", host_.fs.find(pick->exe_path)->path}};
  }

  std::vector<Fact> install_msi() {
    if (!downloaded(Artifact::Msi)) return fail("no MSI downloaded");
    if (know().general[state::kInstallElevatedSet] != Trit::True) return fail("AlwaysInstallElevated not known set");
    if (host_.registry.install_elevated_machine && host_.registry.install_elevated_user) {
      if (UserRec* u = host_.find_user(host_.current_user)) u->is_admin = true;
    }
    return {Exploited{TargetKind::Installer, "msi", "", download_path(Artifact::Msi)}};
  }

  // ----------------------------------------------------------- credentials

  std::vector<Fact> check_winlogon() {
    const Registry& r = host_.registry;
    if (r.winlogon_user && r.winlogon_password) {
      remember(*r.winlogon_user, *r.winlogon_password);
      return {WinlogonCreds{r.winlogon_user, r.winlogon_password}};
    }
    return {WinlogonCreds{}};
  }

  void remember(const std::string& user, const std::string& password) {
    for (const auto& c : att_.known_credentials) {
      if (c.user == user && c.password == password) return;
    }
    att_.known_credentials.push_back({user, password, false});
  }

  std::vector<Fact> search_unattend() {
    UnattendFound f;
    for (const auto& u : host_.unattend_files) f.files.push_back({u.path, u.user, u.password_base64});
    return {f};
  }

  std::vector<Fact> decode_credentials() {
    std::vector<Fact> out;
    for (const auto& c : know().aux.credentials) {
      if (c.plaintext) continue;
      const auto plain = base64_decode(c.base64);
      if (!plain) continue;
      remember(c.user, *plain);
      out.emplace_back(DecodedCreds{c.user, *plain});
    }
    if (out.empty()) return fail("no encoded credentials known");
    return out;
  }

  std::vector<Fact> test_credentials() {
    if (!know().aux.users_known) return fail("local users not known");
    std::vector<Fact> out;
    for (const auto& c : know().aux.credentials) {
      if (!c.plaintext || c.tested) continue;
      const UserRec* u = host_.find_user(c.user);
      const bool valid = u && u->password == c.password;
      const bool admin = valid && u->is_admin;
      for (auto& k : att_.known_credentials) {
        if (k.user == c.user && k.password == c.password && valid) k.verified = true;
      }
      out.emplace_back(CredTestResult{c.user, valid, admin});
    }
    if (out.empty()) return fail("no untested credentials");
    return out;
  }

  std::vector<Fact> list_users() {
    UserList f;
    for (const auto& u : host_.users) {
      f.users.push_back(u.name);
      if (u.is_admin) f.admins.push_back(u.name);
    }
    return {f};
  }

  // ------------------------------------------------------------ discovery

  std::vector<Fact> check_services(bool registry) {
    if (!user_known()) return fail("current user not known");
    const int attr = registry ? state::kSvcRegistryModifiable : state::kSvcReconfigurable;
    std::vector<Fact> out;
    for (const auto& s : know().services) {
      if (s.attrs[attr] != Trit::Unknown) continue;
      const ServiceRec* svc = host_.find_service(s.name);
      if (!svc) continue;
      if (registry) {
        out.emplace_back(RegistryAclResult{svc->name, svc->registry_acl});
      } else {
        out.emplace_back(ServiceAclResult{svc->name, svc->reconfig_acl});
      }
    }
    if (out.empty()) return fail("no unchecked services");
    return out;
  }

  std::vector<Fact> check_files() {
    if (!user_known()) return fail("current user not known");
    const auto pending = know().aux.pending_files;
    if (pending.empty()) return fail("no executables to check");
    const auto tok = token();
    std::vector<Fact> out;
    for (const auto& p : pending) {
      const FsNode* n = host_.fs.find(p);
      out.emplace_back(FileAclResult{n ? n->path : p, n && !n->is_dir, host_.fs.can_write_path(p, tok)});
    }
    return out;
  }

  std::vector<Fact> check_dirs() {
    if (!user_known()) return fail("current user not known");
    const auto pending = know().aux.pending_dirs;
    if (pending.empty()) return fail("no folders to check");
    const auto tok = token();
    std::vector<Fact> out;
    for (const auto& p : pending) {
      const FsNode* n = host_.fs.find(p);
      out.emplace_back(DirAclResult{n ? n->path : p, n && n->is_dir && host_.fs.can_write(p, tok)});
    }
    return out;
  }

  std::vector<Fact> analyze_dlls() {
    std::vector<Fact> out;
    for (const auto& s : know().services) {
      if (s.dlls_scanned || s.is_command) continue;
      const ServiceRec* svc = host_.find_service(s.name);
      if (!svc) continue;
      out.emplace_back(DllScan{svc->name, svc->dll_imports});
    }
    if (out.empty()) return fail("no unanalyzed service executables");
    return out;
  }

  std::vector<Fact> search_dlls() {
    std::vector<Fact> out;
    for (const auto& s : know().services) {
      for (const auto& d : s.dlls) {
        if (d.searched) continue;
        const auto path = host_.resolve_dll(wp::parent(s.exe), d.name);
        out.emplace_back(DllSearch{s.name, d.name, path});
      }
    }
    if (out.empty()) return fail("no DLLs to search");
    return out;
  }

  std::vector<Fact> list_services() {
    ServiceList f;
    for (const auto& s : host_.services) f.entries.push_back({s.name, s.image_path, s.run_as, s.started});
    return {f};
  }

  std::vector<Fact> list_autoruns() {
    AutoRunList f;
    for (const auto& a : host_.autoruns) f.entries.push_back({a.name, a.path, a.trigger, a.kind});
    return {f};
  }

  std::vector<Fact> list_tasks() {
    TaskList f;
    for (const auto& t : host_.tasks) f.entries.push_back({t.name, t.exe_path, t.run_as, t.trigger});
    return {f};
  }

  SimHost& host_;
  AttackerContext& att_;
  Action a_;
};

}  // namespace

void Env::reset(std::uint64_t seed, const EnvConfig& cfg) { reset(generate_host(seed, cfg), cfg.max_steps); }

void Env::reset(SimHost host, int max_steps) {
  host_ = std::move(host);
  attacker_ = AttackerContext{};
  steps_ = 0;
  max_steps_ = max_steps;
  done_ = false;
  success_.reset();
}

StepResult Env::step(Action a) {
  if (done_) throw std::logic_error("step() on a finished episode");
  StepResult r;
  r.facts = Runner(host_, attacker_, a).run();
  state::update(attacker_.knowledge, a, r.facts);
  attacker_.current_user = attacker_.knowledge.aux.current_user;
  ++steps_;
  success_ = check_success(host_, attacker_);
  r.success = success_;
  r.reward = success_ ? 1.0 : 0.0;
  done_ = success_.has_value() || steps_ >= max_steps_;
  r.done = done_;
  r.step_index = steps_;
  return r;
}

}  // namespace privesc::winsim
