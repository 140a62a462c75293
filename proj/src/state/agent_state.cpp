#include "privesc/state/agent_state.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "privesc/winsim/winpath.hpp"

namespace privesc::state {

namespace wp = winsim::winpath;
using namespace winsim;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::string_view, kGeneralSize> kGeneralNames = {
    "creds_in_files",
    "file_creds_elevated",
    "creds_in_registry",
    "registry_creds_elevated",
    "writable_path_folder",
    "install_elevated_set",
    "autoruns_enumerable",
    "created_exe",
    "created_service_exe",
    "created_dll",
    "created_msi",
    "downloaded_exe",
    "downloaded_service_exe",
    "downloaded_dll",
    "downloaded_msi",
    "knows_users",
    "users_to_check",
    "knows_services",
    "knows_tasks",
    "knows_autoruns",
    "dlls_analyzed",
    "dlls_searched",
    "folders_pending",
    "executables_pending",
    "knows_current_user",
    "knows_path",
    "base64_pending",
};

constexpr std::array<std::string_view, kServiceAttrs> kServiceAttrNames = {
    "running",       "elevated",        "unquoted_path",       "writable_parent", "whitespace_in_path",
    "in_windows_dir", "exe_writable",   "reconfigurable",      "registry_modifiable",
    "loads_vulnerable_dll", "exploited"};

bool same(std::string_view a, std::string_view b) { return wp::normalize(a) == wp::normalize(b); }

template <typename T, typename Key>
T* find_by(std::vector<T>& v, Key key) {
  for (auto& x : v) {
    if (key(x)) return &x;
  }
  return nullptr;
}

/// Write access to `file` as far as the checks so far tell.
Trit file_writable(const AuxMemory& aux, std::string_view file) {
  if (auto f = aux.file_known(file)) return to_trit(f->writable);
  if (aux.dir_known(wp::parent(file)).value_or(false)) return Trit::True;
  return Trit::Unknown;
}

void absorb_service(AgentState& s, const ServiceEntry& e) {
  ServiceState* svc = s.find_service(e.name);
  if (!svc) {
    s.services.push_back({});
    svc = &s.services.back();
    svc->name = e.name;
    svc->attrs[kSvcExploited] = Trit::False;
  }
  const auto img = wp::parse_image_path(e.image_path);
  svc->image_path = e.image_path;
  svc->exe = img.exe;
  svc->run_as = e.run_as;
  svc->quoted = img.quoted;
  svc->is_command = img.is_command;
  svc->attrs[kSvcRunning] = to_trit(e.started);
  svc->attrs[kSvcElevated] = to_trit(is_system_account(e.run_as));
  svc->attrs[kSvcUnquoted] = to_trit(!img.quoted);
  svc->attrs[kSvcWhitespace] = to_trit(wp::has_whitespace(img.exe));
  svc->attrs[kSvcInWindows] = to_trit(wp::in_windows_dir(img.exe));
  if (img.is_command) return;
  s.aux.enqueue_file(img.exe);
  for (const auto& dir : wp::ancestors(img.exe)) s.aux.enqueue_dir(dir);
}

void absorb(AgentState& s, const Fact& fact) {
  AuxMemory& aux = s.aux;
  std::visit(
      Overloaded{
          [&](const ServiceList& f) {
            s.flags[kKnowsServices] = true;
            for (const auto& e : f.entries) absorb_service(s, e);
          },
          [&](const AutoRunList& f) {
            s.flags[kKnowsAutoRuns] = true;
            s.general[kAutoRunsEnumerable] = Trit::True;
            for (const auto& e : f.entries) {
              AutoRunState* ar = find_by(s.autoruns, [&](const AutoRunState& a) { return same(a.path, e.path); });
              if (!ar) {
                s.autoruns.push_back({});
                ar = &s.autoruns.back();
              }
              ar->name = e.name;
              ar->path = e.path;
              ar->trigger = e.trigger;
              ar->kind = e.kind;
              ar->attrs[kArInWindows] = to_trit(wp::in_windows_dir(e.path));
              if (e.kind == AutoRunKind::StartupFolder) {
                aux.enqueue_dir(e.path);
              } else {
                aux.enqueue_file(e.path);
              }
            }
          },
          [&](const TaskList& f) {
            s.flags[kKnowsTasks] = true;
            for (const auto& e : f.entries) {
              TaskState* t = find_by(s.tasks, [&](const TaskState& x) { return same(x.name, e.name); });
              if (!t) {
                s.tasks.push_back({});
                t = &s.tasks.back();
              }
              t->name = e.name;
              t->exe_path = e.exe_path;
              t->run_as = e.run_as;
              t->trigger = e.trigger;
              t->attrs[kTaskElevated] = to_trit(is_system_account(e.run_as));
              t->attrs[kTaskInWindows] = to_trit(wp::in_windows_dir(e.exe_path));
              aux.enqueue_file(e.exe_path);
            }
          },
          [&](const UserList& f) {
            s.flags[kKnowsUsers] = true;
            aux.users_known = true;
            aux.users = f.users;
            aux.admins = f.admins;
          },
          [&](const CurrentUser& f) {
            s.flags[kKnowsCurrentUser] = true;
            aux.current_user = f.name;
          },
          [&](const WindowsPath& f) {
            s.flags[kKnowsPath] = true;
            aux.path_dirs = f.dirs;
            for (const auto& d : f.dirs) aux.enqueue_dir(d);
          },
          [&](const DirAclResult& f) { aux.record_dir(f.path, f.writable); },
          [&](const FileAclResult& f) { aux.record_file(f.path, {f.exists, f.writable}); },
          [&](const ServiceAclResult& f) {
            if (ServiceState* svc = s.find_service(f.service)) svc->attrs[kSvcReconfigurable] = to_trit(f.reconfigurable);
          },
          [&](const RegistryAclResult& f) {
            if (ServiceState* svc = s.find_service(f.service)) {
              svc->attrs[kSvcRegistryModifiable] = to_trit(f.modifiable);
            }
          },
          [&](const WinlogonCreds& f) {
            const bool present = f.user.has_value() && f.password.has_value();
            s.general[kCredsInRegistry] = to_trit(present);
            if (!present) return;
            const bool known = std::any_of(aux.credentials.begin(), aux.credentials.end(), [&](const Credential& c) {
              return c.source == CredSource::Registry && same(c.user, *f.user);
            });
            if (!known) {
              Credential c;
              c.user = *f.user;
              c.password = *f.password;
              c.plaintext = true;
              c.source = CredSource::Registry;
              aux.credentials.push_back(c);
            }
          },
          [&](const UnattendFound& f) {
            s.general[kCredsInFiles] = to_trit(!f.files.empty());
            for (const auto& file : f.files) {
              const bool known = std::any_of(aux.credentials.begin(), aux.credentials.end(), [&](const Credential& c) {
                return c.source == CredSource::File && same(c.user, file.user) && c.base64 == file.password_base64;
              });
              if (known) continue;
              Credential c;
              c.user = file.user;
              c.base64 = file.password_base64;
              c.plaintext = false;
              c.source = CredSource::File;
              aux.credentials.push_back(c);
            }
          },
          [&](const DecodedCreds& f) {
            for (auto& c : aux.credentials) {
              if (!c.plaintext && same(c.user, f.user)) {
                c.password = f.password;
                c.plaintext = true;
              }
            }
          },
          [&](const CredTestResult& f) {
            for (auto& c : aux.credentials) {
              if (c.plaintext && !c.tested && same(c.user, f.user)) {
                c.tested = true;
                c.valid = f.valid;
                c.admin = f.admin;
              }
            }
          },
          [&](const DllScan& f) {
            s.flags[kDllsAnalyzed] = true;
            ServiceState* svc = s.find_service(f.service);
            if (!svc) return;
            svc->dlls_scanned = true;
            for (const auto& name : f.dlls) {
              if (svc->find_dll(name)) continue;
              DllState d;
              d.name = name;
              d.attrs[kDllReplaced] = Trit::False;
              svc->dlls.push_back(d);
            }
          },
          [&](const DllSearch& f) {
            s.flags[kDllsSearched] = true;
            ServiceState* svc = s.find_service(f.service);
            if (!svc) return;
            DllState* d = svc->find_dll(f.dll);
            if (!d) return;
            d->searched = true;
            d->attrs[kDllMissing] = to_trit(!f.path.has_value());
            d->path = f.path.value_or("");
            if (f.path) aux.enqueue_file(*f.path);
          },
          [&](const InstallElevatedBits& f) { s.general[kInstallElevatedSet] = to_trit(f.machine && f.user); },
          [&](const ArtifactCreated& f) { s.flags[kCreatedExe + static_cast<int>(f.kind)] = true; },
          [&](const ArtifactDownloaded& f) {
            s.flags[kDownloadedExe + static_cast<int>(f.kind)] = true;
            aux.downloads[static_cast<int>(f.kind)] = f.path;
          },
          [&](const Exploited& f) {
            auto mark_service = [&](std::string_view name) {
              ServiceState* svc = s.find_service(name);
              if (!svc) return;
              svc->attrs[kSvcExploited] = Trit::True;
              const bool queued = std::any_of(aux.pending_start.begin(), aux.pending_start.end(),
                                              [&](const std::string& p) { return same(p, name); });
              if (!queued) aux.pending_start.emplace_back(name);
            };
            switch (f.kind) {
              case TargetKind::Service:
                mark_service(f.name);
                break;
              case TargetKind::Dll:
                if (ServiceState* svc = s.find_service(f.service)) {
                  if (DllState* d = svc->find_dll(f.name)) d->attrs[kDllReplaced] = Trit::True;
                }
                mark_service(f.service);
                break;
              case TargetKind::AutoRun:
                for (auto& ar : s.autoruns) {
                  if (same(ar.name, f.name)) ar.overwritten = true;
                }
                break;
              case TargetKind::Task:
                for (auto& t : s.tasks) {
                  if (same(t.name, f.name)) t.overwritten = true;
                }
                break;
              case TargetKind::Installer:
                break;
            }
          },
          [&](const ServiceStarted& f) {
            if (ServiceState* svc = s.find_service(f.service)) svc->attrs[kSvcRunning] = Trit::True;
            std::erase_if(aux.pending_start, [&](const std::string& p) { return same(p, f.service); });
          },
          [&](const ServiceStopped& f) {
            if (ServiceState* svc = s.find_service(f.service)) svc->attrs[kSvcRunning] = Trit::False;
          },
          [&](const ActionFailed&) {},
      },
      fact);
}

Trit creds_elevated(const AuxMemory& aux, CredSource src, Trit present) {
  if (present == Trit::False) return Trit::False;
  bool any = false;
  bool admin = false;
  for (const auto& c : aux.credentials) {
    if (c.source != src) continue;
    any = true;
    if (c.tested && c.valid && c.admin) return Trit::True;
    if (aux.users_known && aux.is_admin(c.user)) admin = true;
  }
  if (!any || !aux.users_known) return Trit::Unknown;
  return to_trit(admin);
}

/// Recomputes every attribute that is a function of the accumulated checks.
void refresh(AgentState& s) {
  const AuxMemory& aux = s.aux;

  s.flags[kUsersToCheck] = std::any_of(aux.credentials.begin(), aux.credentials.end(),
                                       [](const Credential& c) { return c.plaintext && !c.tested; });
  s.flags[kBase64Pending] = std::any_of(aux.credentials.begin(), aux.credentials.end(),
                                        [](const Credential& c) { return !c.plaintext; });
  s.flags[kFoldersPending] = !aux.pending_dirs.empty();
  s.flags[kExecutablesPending] = !aux.pending_files.empty();

  s.general[kFileCredsElevated] = creds_elevated(aux, CredSource::File, s.general[kCredsInFiles]);
  s.general[kRegistryCredsElevated] = creds_elevated(aux, CredSource::Registry, s.general[kCredsInRegistry]);

  if (s.flags[kKnowsPath]) {
    bool any = false;
    bool all = true;
    for (const auto& d : aux.path_dirs) {
      const auto w = aux.dir_known(d);
      any = any || w.value_or(false);
      all = all && w.has_value();
    }
    s.general[kWritablePathFolder] = any ? Trit::True : (all ? Trit::False : Trit::Unknown);
  }
  const Trit path_writable = s.general[kWritablePathFolder];

  for (auto& svc : s.services) {
    if (svc.is_command) {
      svc.attrs[kSvcWritableParent] = Trit::False;
      svc.attrs[kSvcExeWritable] = Trit::False;
    } else {
      bool any = false;
      bool all = true;
      for (const auto& dir : wp::ancestors(svc.exe)) {
        const auto w = aux.dir_known(dir);
        any = any || w.value_or(false);
        all = all && w.has_value();
      }
      svc.attrs[kSvcWritableParent] = any ? Trit::True : (all ? Trit::False : Trit::Unknown);
      svc.attrs[kSvcExeWritable] = file_writable(aux, svc.exe);
    }

    for (auto& d : svc.dlls) {
      if (!d.searched) continue;
      d.attrs[kDllWritable] = d.path.empty() ? Trit::False : file_writable(aux, d.path);
    }
    if (!svc.dlls_scanned) continue;
    bool vulnerable = false;
    bool all_known = true;
    for (const auto& d : svc.dlls) {
      if (d.attrs[kDllWritable] == Trit::True) vulnerable = true;
      if (d.attrs[kDllMissing] == Trit::True && path_writable == Trit::True) vulnerable = true;
      const bool safe = (d.attrs[kDllMissing] == Trit::False && d.attrs[kDllWritable] == Trit::False) ||
                        (d.attrs[kDllMissing] == Trit::True && path_writable == Trit::False);
      all_known = all_known && safe;
    }
    svc.attrs[kSvcVulnerableDll] = vulnerable ? Trit::True : (all_known ? Trit::False : Trit::Unknown);
  }

  for (auto& ar : s.autoruns) {
    ar.attrs[kArWritable] = ar.kind == AutoRunKind::StartupFolder
                                ? (aux.dir_known(ar.path) ? to_trit(*aux.dir_known(ar.path)) : Trit::Unknown)
                                : file_writable(aux, ar.path);
  }
  for (auto& t : s.tasks) t.attrs[kTaskExeWritable] = file_writable(aux, t.exe_path);
}

}  // namespace

std::string_view general_var_name(int coordinate) { return kGeneralNames.at(static_cast<std::size_t>(coordinate)); }

std::string_view service_attr_name(int attr) { return kServiceAttrNames.at(static_cast<std::size_t>(attr)); }

bool is_system_account(std::string_view run_as) {
  const std::string n = wp::normalize(run_as);
  return n == "localsystem" || n == "system" || n == "nt authority\\system" || n == ".\\localsystem";
}

DllState* ServiceState::find_dll(std::string_view dll) {
  for (auto& d : dlls) {
    if (same(d.name, dll)) return &d;
  }
  return nullptr;
}

ServiceState* AgentState::find_service(std::string_view name) {
  return const_cast<ServiceState*>(std::as_const(*this).find_service(name));
}

const ServiceState* AgentState::find_service(std::string_view name) const {
  for (const auto& svc : services) {
    if (same(svc.name, name)) return &svc;
  }
  return nullptr;
}

AgentState init_state() { return AgentState{}; }

void update(AgentState& s, Action /*a*/, const std::vector<Fact>& facts) {
  bool changed = false;
  for (const auto& f : facts) {
    if (std::holds_alternative<winsim::ActionFailed>(f)) continue;
    absorb(s, f);
    changed = true;
  }
  if (changed) refresh(s);
}

EncodedState encode(const AgentState& s) {
  EncodedState e;
  for (int i = 0; i < kNumGeneralTrits; ++i) e.general[static_cast<std::size_t>(i)] = privesc::encode(s.general[static_cast<std::size_t>(i)]);
  for (int i = 0; i < kNumFlags; ++i) {
    e.general[static_cast<std::size_t>(kNumGeneralTrits + i)] = privesc::encode(s.flags[static_cast<std::size_t>(i)]);
  }

  auto fill = [](RowBlock& block, int cols, const auto& entities) {
    block = RowBlock(0, cols);
    std::array<double, kServiceAttrs> row{};
    for (const auto& ent : entities) {
      for (int j = 0; j < cols; ++j) row[static_cast<std::size_t>(j)] = privesc::encode(ent.attrs[static_cast<std::size_t>(j)]);
      block.push_row(std::span<const double>(row.data(), static_cast<std::size_t>(cols)));
    }
    if (block.rows == 0) block = RowBlock(1, cols);
  };
  fill(e.services, kServiceAttrs, s.services);
  fill(e.autoruns, kAutoRunAttrs, s.autoruns);
  fill(e.tasks, kTaskAttrs, s.tasks);

  e.dlls.assign(static_cast<std::size_t>(e.services.rows), RowBlock(0, kDllAttrs));
  for (std::size_t i = 0; i < s.services.size(); ++i) {
    for (const auto& d : s.services[i].dlls) {
      std::array<double, kDllAttrs> row{};
      for (int j = 0; j < kDllAttrs; ++j) row[static_cast<std::size_t>(j)] = privesc::encode(d.attrs[static_cast<std::size_t>(j)]);
      e.dlls[i].push_row(row);
    }
  }
  return e;
}

}  // namespace privesc::state
