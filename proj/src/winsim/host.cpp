#include "privesc/winsim/host.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <set>
#include <stdexcept>
#include <utility>

#include "privesc/core/base64.hpp"
#include "privesc/core/rng.hpp"
#include "privesc/winsim/winpath.hpp"

namespace privesc::winsim {

std::string_view decoy_name(Decoy d) {
  switch (d) {
    case Decoy::NonElevatedVulnerableService: return "non-elevated vulnerable service";
    case Decoy::QuotedPathWritableParent: return "writable parent folder with quoted path";
    case Decoy::StandardUserRegistryCredentials: return "standard-user credentials in registry";
    case Decoy::WritablePathFolder: return "writable folder on Windows path";
    case Decoy::StandardUserUnattendCredentials: return "standard-user credentials in unattend file";
    case Decoy::NonElevatedWritableTask: return "non-elevated task with writable binary";
    case Decoy::SingleInstallElevatedBit: return "single AlwaysInstallElevated bit";
  }
  return "?";
}

const UserRec* SimHost::find_user(std::string_view name) const {
  for (const auto& u : users) {
    if (winpath::normalize(u.name) == winpath::normalize(name)) return &u;
  }
  return nullptr;
}

UserRec* SimHost::find_user(std::string_view name) {
  return const_cast<UserRec*>(std::as_const(*this).find_user(name));
}

bool SimHost::is_admin(std::string_view user) const {
  const UserRec* u = find_user(user);
  return u && u->is_admin;
}

std::vector<std::string> SimHost::token(std::string_view user) const {
  std::vector<std::string> t{std::string(user), "Users", "Everyone"};
  if (is_admin(user)) t.emplace_back("Administrators");
  return t;
}

const ServiceRec* SimHost::find_service(std::string_view name) const {
  for (const auto& s : services) {
    if (winpath::normalize(s.name) == winpath::normalize(name)) return &s;
  }
  return nullptr;
}

ServiceRec* SimHost::find_service(std::string_view name) {
  return const_cast<ServiceRec*>(std::as_const(*this).find_service(name));
}

std::vector<std::string> SimHost::dll_search_dirs(std::string_view binary_dir) const {
  std::vector<std::string> dirs{std::string(binary_dir), "C:\\Windows\\System32", "C:\\Windows"};
  dirs.insert(dirs.end(), path_dirs.begin(), path_dirs.end());
  return dirs;
}

std::optional<std::string> SimHost::resolve_dll(std::string_view binary_dir, std::string_view dll) const {
  for (const auto& dir : dll_search_dirs(binary_dir)) {
    const std::string candidate = winpath::join(dir, dll);
    if (fs.is_file(candidate)) return fs.find(candidate)->path;
  }
  return std::nullopt;
}

void EnvConfig::validate() const {
  auto check = [](IntRange r, int min_lo, const char* what) {
    if (r.lo < min_lo || r.hi < r.lo) {
      throw std::invalid_argument(std::string("invalid range for ") + what + ": [" +
                                  std::to_string(r.lo) + "," + std::to_string(r.hi) + "]");
    }
  };
  check(services, 1, "services");
  check(autoruns, 1, "autoruns");
  check(tasks, 1, "tasks");
  check(dlls_per_service, 1, "dlls_per_service");
  if (services.hi > 999) throw std::invalid_argument("services range too large (max 999)");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  if (windows_service_fraction < 0.0 || windows_service_fraction > 1.0) {
    throw std::invalid_argument("windows_service_fraction must be in [0,1]");
  }
  for (double p : {decoys.non_elevated_service, decoys.quoted_writable_parent,
                   decoys.standard_registry_credentials, decoys.writable_path_folder,
                   decoys.standard_unattend_credentials, decoys.non_elevated_writable_task,
                   decoys.single_install_elevated_bit}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("decoy rates must be in [0,1]");
  }
  if (mode == VulnMode::Fixed && vulns.size() != 1) {
    throw std::invalid_argument("fixed vulnerability mode needs exactly one vulnerability");
  }
  if (mode == VulnMode::Multi && vulns.empty()) {
    throw std::invalid_argument("multi vulnerability mode needs at least one vulnerability");
  }
}

std::vector<Vuln> choose_vulns(std::uint64_t seed, const EnvConfig& cfg) {
  switch (cfg.mode) {
    case VulnMode::Fixed: return {cfg.vulns.front()};
    case VulnMode::Multi: {
      std::vector<Vuln> out;
      for (Vuln v : cfg.vulns) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
      }
      return out;
    }
    case VulnMode::SingleRandom: break;
  }
  Rng rng(derive_seed(seed, 0x766c6e));
  const int cls = uniform_int(rng, 1, kNumVulnClasses);
  if (cls == 1) return {bernoulli(rng, 0.5) ? Vuln::MissingDll : Vuln::WritableDll};
  return {static_cast<Vuln>(cls)};
}

namespace {

constexpr std::array<std::string_view, 20> kVendors = {
    "Acme",     "Contoso", "Fabrikam", "Northwind", "Tailspin", "Litware",   "Adatum",
    "Proseware", "Woodgrove", "Wingtip", "Lucerne", "Margie",   "Trey",      "Alpine",
    "Coho",     "Humongous", "Fourth",  "Graphic",  "Wide",     "Relecloud"};
constexpr std::array<std::string_view, 20> kProducts = {
    "Backup", "Update", "Sync",   "Agent",   "Monitor", "Helper", "Print",  "Media",  "Cloud",  "Driver",
    "License", "Remote", "Audio", "Video",  "Scan",    "Secure", "Data",   "Logger", "Clock",  "Power"};
constexpr std::array<std::string_view, 16> kUserNames = {
    "alice", "bob",  "carol", "dave",  "erin",    "frank", "grace", "heidi",
    "ivan",  "judy", "oscar", "peggy", "rupert",  "sybil", "trent", "victor"};
constexpr std::array<std::string_view, 14> kSystemDlls = {
    "kernel32.dll", "advapi32.dll", "user32.dll",  "ws2_32.dll",   "ole32.dll",
    "shell32.dll",  "crypt32.dll",  "wininet.dll", "netapi32.dll", "version.dll",
    "secur32.dll",  "gdi32.dll",    "msvcrt.dll",  "rpcrt4.dll"};
constexpr std::array<std::string_view, 4> kRoots = {"C:\\Program Files", "C:\\Program Files (x86)",
                                                    "C:\\Apps", "C:\\Program Files"};

constexpr std::string_view kStartupDir =
    "C:\\ProgramData\\Microsoft\\Windows\\Start Menu\\Programs\\StartUp";

enum class ServiceRole : std::uint8_t {
  Plain,
  Vulnerable,        // carries one of the service vulnerabilities
  DecoyNonElevated,  // service vulnerability, but run as an unprivileged account
  DecoyQuotedParent,
};

struct ServicePlan {
  ServiceRole role = ServiceRole::Plain;
  Vuln vuln = Vuln::ReconfigurableService;
};

enum class TaskRole : std::uint8_t { Plain, Vulnerable, DecoyNonElevated };

template <typename T, std::size_t N>
std::string_view pick(Rng& rng, const std::array<T, N>& arr) {
  return arr[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(N) - 1))];
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class HostBuilder {
 public:
  HostBuilder(std::uint64_t seed, const EnvConfig& cfg) : rng_(derive_seed(seed, 0x686f7374)), cfg_(cfg) {}

  SimHost build(const std::vector<Vuln>& vulns) {
    host_.injected = vulns;
    base_layout();
    make_users();
    plan_decoys(vulns);
    make_path_dirs();
    make_services(vulns);
    make_autoruns(vulns);
    make_tasks(vulns);
    inject_host_level(vulns);
    return std::move(host_);
  }

 private:
  bool has(const std::vector<Vuln>& vs, Vuln v) const {
    return std::find(vs.begin(), vs.end(), v) != vs.end();
  }

  std::string unique_id(std::string_view prefix) {
    for (;;) {
      std::string id = std::string(prefix) + "-" + std::to_string(uniform_int(rng_, 100, 999));
      if (used_ids_.insert(id).second) return id;
    }
  }

  std::string unique_word(std::string_view base) {
    std::string w(base);
    while (!used_words_.insert(lower(w)).second) w = std::string(base) + std::to_string(uniform_int(rng_, 2, 99));
    return w;
  }

  void base_layout() {
    FileSystem& fs = host_.fs;
    for (std::string_view d : {"C:\\Windows", "C:\\Windows\\System32", "C:\\Windows\\SysWOW64",
                               "C:\\Windows\\Panther", "C:\\Windows\\System32\\Wbem",
                               "C:\\Windows\\System32\\WindowsPowerShell\\v1.0",
                               "C:\\Windows\\System32\\sysprep", "C:\\Program Files",
                               "C:\\Program Files (x86)", "C:\\Apps", "C:\\ProgramData", "C:\\Users"}) {
      fs.add_dir(d, system_acl());
    }
    fs.add_dir(kStartupDir, system_acl());
    host_.startup_dir = std::string(kStartupDir);
    for (std::string_view dll : kSystemDlls) {
      fs.add_file(winpath::join("C:\\Windows\\System32", dll), system_acl());
    }
    fs.add_file("C:\\Windows\\System32\\cmd.exe", system_acl());
    fs.add_file("C:\\Windows\\System32\\svchost.exe", system_acl());
  }

  void make_users() {
    std::vector<std::string_view> names(kUserNames.begin(), kUserNames.end());
    std::shuffle(names.begin(), names.end(), rng_);
    std::size_t next = 0;
    host_.current_user = std::string(names[next++]);
    host_.users.push_back({host_.current_user, password(), false});
    host_.users.push_back({"Administrator", password(), true});
    if (bernoulli(rng_, 0.5)) host_.users.push_back({std::string(names[next++]) + "-adm", password(), true});
    const int others = uniform_int(rng_, 0, 2);
    for (int i = 0; i < others; ++i) host_.users.push_back({std::string(names[next++]), password(), false});

    const std::string home = "C:\\Users\\" + host_.current_user;
    host_.fs.add_dir(home, owner_acl(host_.current_user));
    host_.downloads_dir = home + "\\Downloads";
    host_.fs.add_dir(host_.downloads_dir, owner_acl(host_.current_user));
  }

  std::string password() {
    static constexpr std::string_view kAlphabet =
        "abcdefghijkmnopqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    std::string pw = "Pw";
    for (int i = 0; i < 8; ++i) {
      pw.push_back(kAlphabet[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(kAlphabet.size()) - 1))]);
    }
    return pw;
  }

  const UserRec& pick_user(bool admin) {
    std::vector<const UserRec*> pool;
    for (const auto& u : host_.users) {
      if (u.is_admin == admin && (admin || u.name != host_.current_user)) pool.push_back(&u);
    }
    if (pool.empty()) {  // only the current user is unprivileged
      for (const auto& u : host_.users) {
        if (u.is_admin == admin) pool.push_back(&u);
      }
    }
    return *pool[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(pool.size()) - 1))];
  }

  void plan_decoys(const std::vector<Vuln>& vulns) {
    const DecoyRates& r = cfg_.decoys;
    decoy_service_ = bernoulli(rng_, r.non_elevated_service);
    decoy_quoted_ = bernoulli(rng_, r.quoted_writable_parent);
    decoy_registry_creds_ = bernoulli(rng_, r.standard_registry_credentials) && !has(vulns, Vuln::WinlogonCredentials);
    decoy_path_ = bernoulli(rng_, r.writable_path_folder) && !has(vulns, Vuln::MissingDll);
    decoy_unattend_ = bernoulli(rng_, r.standard_unattend_credentials) && !has(vulns, Vuln::UnattendCredentials);
    decoy_task_ = bernoulli(rng_, r.non_elevated_writable_task);
    decoy_aie_ = bernoulli(rng_, r.single_install_elevated_bit) && !has(vulns, Vuln::AlwaysInstallElevated);
  }

  void make_path_dirs() {
    host_.path_dirs = {"C:\\Windows\\System32", "C:\\Windows", "C:\\Windows\\System32\\Wbem",
                       "C:\\Windows\\System32\\WindowsPowerShell\\v1.0"};
    const int extra = uniform_int(rng_, 0, 2);
    for (int i = 0; i < extra; ++i) {
      const std::string dir = winpath::join(pick(rng_, kRoots), unique_word(pick(rng_, kVendors))) + "\\bin";
      host_.fs.add_dir(dir, system_acl());
      host_.path_dirs.push_back(dir);
    }
    if (has(host_.injected, Vuln::MissingDll) || decoy_path_) {
      const std::string dir = "C:\\Tools\\" + unique_word(pick(rng_, kProducts));
      host_.fs.add_dir("C:\\Tools", system_acl());
      host_.fs.add_dir(dir, user_writable_acl());
      const auto pos = static_cast<std::ptrdiff_t>(uniform_int(rng_, 2, static_cast<int>(host_.path_dirs.size())));
      host_.path_dirs.insert(host_.path_dirs.begin() + pos, dir);
      if (decoy_path_) host_.decoys.push_back(Decoy::WritablePathFolder);
    }
  }

  // -------------------------------------------------------------- services

  void make_services(const std::vector<Vuln>& vulns) {
    std::vector<Vuln> service_vulns;
    for (Vuln v : vulns) {
      if (is_service_vuln(v)) service_vulns.push_back(v);
    }
    const int drawn = uniform_int(rng_, cfg_.services.lo, cfg_.services.hi);
    const int n = std::max<int>(drawn, static_cast<int>(service_vulns.size()));
    std::vector<ServicePlan> plans(static_cast<std::size_t>(n));
    std::vector<int> slots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) slots[static_cast<std::size_t>(i)] = i;
    std::shuffle(slots.begin(), slots.end(), rng_);
    std::size_t next = 0;
    for (Vuln v : service_vulns) plans[static_cast<std::size_t>(slots[next++])] = {ServiceRole::Vulnerable, v};
    if (decoy_service_ && next < slots.size()) {
      static constexpr std::array<Vuln, 6> kDecoyVulns = {
          Vuln::WritableDll,         Vuln::ReconfigurableService, Vuln::UnquotedServicePath,
          Vuln::ModifiableImagePath, Vuln::WritableServiceExe,    Vuln::MissingServiceBinary};
      const Vuln v = kDecoyVulns[static_cast<std::size_t>(uniform_int(rng_, 0, 5))];
      plans[static_cast<std::size_t>(slots[next++])] = {ServiceRole::DecoyNonElevated, v};
      host_.decoys.push_back(Decoy::NonElevatedVulnerableService);
    }
    if (decoy_quoted_ && next < slots.size()) {
      plans[static_cast<std::size_t>(slots[next++])] = {ServiceRole::DecoyQuotedParent, Vuln::ReconfigurableService};
      host_.decoys.push_back(Decoy::QuotedPathWritableParent);
    }
    for (const auto& plan : plans) host_.services.push_back(make_service(plan));
  }

  enum class Layout : std::uint8_t { Windows, Program, UnquotedHijack, QuotedWritableParent, MissingBinary };

  ServiceRec make_service(const ServicePlan& plan) {
    ServiceRec svc;
    svc.name = unique_id("svc");
    svc.started = bernoulli(rng_, 0.6);

    Layout layout = Layout::Program;
    bool private_dlls = true;
    switch (plan.role) {
      case ServiceRole::Plain:
        layout = bernoulli(rng_, cfg_.windows_service_fraction) ? Layout::Windows : Layout::Program;
        break;
      case ServiceRole::DecoyQuotedParent:
        layout = Layout::QuotedWritableParent;
        break;
      case ServiceRole::Vulnerable:
      case ServiceRole::DecoyNonElevated:
        if (plan.vuln == Vuln::UnquotedServicePath) layout = Layout::UnquotedHijack;
        if (plan.vuln == Vuln::MissingServiceBinary) {
          layout = Layout::MissingBinary;
          private_dlls = false;
        }
        break;
    }

    if (plan.role == ServiceRole::Vulnerable) {
      svc.elevated = true;
    } else if (plan.role == ServiceRole::DecoyNonElevated) {
      svc.elevated = false;
    } else {
      svc.elevated = bernoulli(rng_, layout == Layout::Windows ? 0.8 : 0.7);
    }
    svc.run_as = svc.elevated ? std::string(kLocalSystem)
                              : (layout == Layout::Windows ? "NT AUTHORITY\\NetworkService"
                                                           : "NT AUTHORITY\\LocalService");

    FileSystem& fs = host_.fs;
    std::string binary_dir;
    std::string exe;
    bool quoted = false;
    const std::string exe_name = svc.name + ".exe";
    switch (layout) {
      case Layout::Windows:
        binary_dir = "C:\\Windows\\System32";
        private_dlls = false;
        break;
      case Layout::Program: {
        const std::string vendor = unique_word(pick(rng_, kVendors));
        const std::string product(pick(rng_, kProducts));
        binary_dir = bernoulli(rng_, 0.5) ? winpath::join(pick(rng_, kRoots), vendor + " " + product)
                                          : winpath::join(winpath::join(pick(rng_, kRoots), vendor), product);
        quoted = bernoulli(rng_, 0.5);
        fs.add_dir(binary_dir, system_acl());
        break;
      }
      case Layout::UnquotedHijack: {
        const std::string vendor_dir = winpath::join(pick(rng_, kRoots), unique_word(pick(rng_, kVendors)));
        binary_dir = winpath::join(vendor_dir, std::string(pick(rng_, kProducts)) + " " +
                                                   std::string(pick(rng_, kProducts)));
        quoted = false;
        fs.add_dir(vendor_dir, system_acl());
        fs.set_acl(vendor_dir, user_writable_acl());
        fs.add_dir(binary_dir, system_acl());
        break;
      }
      case Layout::QuotedWritableParent: {
        const std::string vendor_dir = winpath::join(pick(rng_, kRoots), unique_word(pick(rng_, kVendors)));
        binary_dir = winpath::join(vendor_dir, pick(rng_, kProducts));
        quoted = true;
        fs.add_dir(vendor_dir, system_acl());
        fs.set_acl(vendor_dir, user_writable_acl());
        fs.add_dir(binary_dir, system_acl());
        break;
      }
      case Layout::MissingBinary: {
        const std::string vendor = unique_word(pick(rng_, kVendors));
        binary_dir = winpath::join(pick(rng_, kRoots), vendor + " " + std::string(pick(rng_, kProducts)));
        quoted = true;
        fs.add_dir(binary_dir, user_writable_acl());
        break;
      }
    }
    exe = winpath::join(binary_dir, exe_name);
    if (layout != Layout::MissingBinary) fs.add_file(exe, system_acl());
    svc.image_path = quoted ? "\"" + exe + "\"" : exe;

    // imported libraries
    const int n_dlls = uniform_int(rng_, cfg_.dlls_per_service.lo, cfg_.dlls_per_service.hi);
    std::vector<std::string_view> sys(kSystemDlls.begin(), kSystemDlls.end());
    std::shuffle(sys.begin(), sys.end(), rng_);
    std::size_t sys_next = 0;
    for (int i = 0; i < n_dlls; ++i) {
      if (private_dlls && bernoulli(rng_, 0.5)) {
        const std::string dll = lower(pick(rng_, kProducts)) + "-" + std::to_string(uniform_int(rng_, 10, 99)) + ".dll";
        if (std::find(svc.dll_imports.begin(), svc.dll_imports.end(), dll) != svc.dll_imports.end()) continue;
        fs.add_file(winpath::join(binary_dir, dll), system_acl());
        svc.dll_imports.push_back(dll);
      } else {
        svc.dll_imports.emplace_back(sys[sys_next++ % sys.size()]);
      }
    }
    if (svc.dll_imports.empty()) svc.dll_imports.emplace_back(sys.front());

    if (plan.role == ServiceRole::Vulnerable || plan.role == ServiceRole::DecoyNonElevated) {
      apply_service_vuln(svc, plan.vuln, binary_dir);
    }
    return svc;
  }

  void apply_service_vuln(ServiceRec& svc, Vuln v, const std::string& binary_dir) {
    FileSystem& fs = host_.fs;
    const auto exe = winpath::parse_image_path(svc.image_path).exe;
    switch (v) {
      case Vuln::MissingDll: {
        const std::string dll = "lib" + lower(pick(rng_, kProducts)) + "hook" +
                                std::to_string(uniform_int(rng_, 10, 99)) + ".dll";
        if (static_cast<int>(svc.dll_imports.size()) >= cfg_.dlls_per_service.hi) svc.dll_imports.pop_back();
        svc.dll_imports.push_back(dll);
        break;
      }
      case Vuln::WritableDll: {
        std::string target;
        for (const auto& d : svc.dll_imports) {
          if (fs.is_file(winpath::join(binary_dir, d))) {
            target = winpath::join(binary_dir, d);
            break;
          }
        }
        if (target.empty()) {
          const std::string dll = lower(pick(rng_, kProducts)) + "core.dll";
          if (static_cast<int>(svc.dll_imports.size()) >= cfg_.dlls_per_service.hi) svc.dll_imports.pop_back();
          svc.dll_imports.push_back(dll);
          target = winpath::join(binary_dir, dll);
          fs.add_file(target, system_acl());
        }
        fs.set_acl(target, user_writable_acl());
        break;
      }
      case Vuln::ReconfigurableService: svc.reconfig_acl = true; break;
      case Vuln::ModifiableImagePath: svc.registry_acl = true; break;
      case Vuln::WritableServiceExe: fs.set_acl(exe, user_writable_acl()); break;
      case Vuln::UnquotedServicePath:
      case Vuln::MissingServiceBinary:
        break;  // shaped by the layout
      default:
        throw std::logic_error("not a service vulnerability");
    }
  }

  // -------------------------------------------------------------- autoruns

  std::string program_exe(std::string_view stem) {
    const std::string dir = winpath::join(pick(rng_, kRoots),
                                          unique_word(pick(rng_, kVendors)) + " " + std::string(pick(rng_, kProducts)));
    host_.fs.add_dir(dir, system_acl());
    const std::string exe = winpath::join(dir, std::string(stem) + ".exe");
    host_.fs.add_file(exe, system_acl());
    return exe;
  }

  std::string windows_exe(std::string_view stem) {
    const std::string exe = winpath::join("C:\\Windows\\System32", std::string(stem) + ".exe");
    host_.fs.add_file(exe, system_acl());
    return exe;
  }

  void make_autoruns(const std::vector<Vuln>& vulns) {
    const int n = uniform_int(rng_, cfg_.autoruns.lo, cfg_.autoruns.hi);
    const int vulnerable = has(vulns, Vuln::WritableAutoRunExe) ? uniform_int(rng_, 0, n - 1) : -1;
    for (int i = 0; i < n; ++i) {
      AutoRunRec ar;
      ar.name = unique_id("run");
      ar.trigger = "logon";
      ar.kind = AutoRunKind::RegistryRun;
      const bool in_windows = i != vulnerable && bernoulli(rng_, 0.4);
      ar.path = in_windows ? windows_exe(ar.name) : program_exe(ar.name);
      if (i == vulnerable) host_.fs.set_acl(ar.path, user_writable_acl());
      host_.autoruns.push_back(ar);
    }
    AutoRunRec startup;
    startup.name = "Startup";
    startup.path = host_.startup_dir;
    startup.trigger = "logon";
    startup.kind = AutoRunKind::StartupFolder;
    host_.autoruns.push_back(startup);
  }

  // ----------------------------------------------------------------- tasks

  void make_tasks(const std::vector<Vuln>& vulns) {
    const int n = uniform_int(rng_, cfg_.tasks.lo, cfg_.tasks.hi);
    std::vector<TaskRole> roles(static_cast<std::size_t>(n), TaskRole::Plain);
    std::vector<int> slots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) slots[static_cast<std::size_t>(i)] = i;
    std::shuffle(slots.begin(), slots.end(), rng_);
    std::size_t next = 0;
    if (has(vulns, Vuln::WritableTaskBinary)) roles[static_cast<std::size_t>(slots[next++])] = TaskRole::Vulnerable;
    if (decoy_task_ && next < slots.size()) {
      roles[static_cast<std::size_t>(slots[next++])] = TaskRole::DecoyNonElevated;
      host_.decoys.push_back(Decoy::NonElevatedWritableTask);
    }
    static constexpr std::array<std::string_view, 3> kTriggers = {"daily", "logon", "boot"};
    for (TaskRole role : roles) {
      TaskRec t;
      t.name = unique_id("task");
      t.trigger = std::string(pick(rng_, kTriggers));
      if (role == TaskRole::Vulnerable) {
        t.elevated = true;
      } else if (role == TaskRole::DecoyNonElevated) {
        t.elevated = false;
      } else {
        t.elevated = bernoulli(rng_, 0.5);
      }
      t.run_as = t.elevated ? "SYSTEM" : host_.current_user;
      const bool in_windows = role == TaskRole::Plain && bernoulli(rng_, 0.4);
      t.exe_path = in_windows ? windows_exe(t.name) : program_exe(t.name);
      if (role != TaskRole::Plain) host_.fs.set_acl(t.exe_path, user_writable_acl());
      host_.tasks.push_back(t);
    }
  }

  // ------------------------------------------------------------ host-level

  void add_unattend(const UserRec& u) {
    static constexpr std::array<std::string_view, 3> kPaths = {
        "C:\\Windows\\Panther\\Unattend.xml", "C:\\Windows\\Panther\\Unattended.xml",
        "C:\\Windows\\System32\\sysprep\\sysprep.xml"};
    UnattendFile f{std::string(pick(rng_, kPaths)), u.name, base64_encode(u.password)};
    host_.fs.add_file(f.path, system_acl());
    host_.unattend_files.push_back(f);
  }

  void inject_host_level(const std::vector<Vuln>& vulns) {
    Registry& reg = host_.registry;
    if (has(vulns, Vuln::AlwaysInstallElevated)) {
      reg.install_elevated_machine = reg.install_elevated_user = true;
    } else if (decoy_aie_) {
      (bernoulli(rng_, 0.5) ? reg.install_elevated_machine : reg.install_elevated_user) = true;
      host_.decoys.push_back(Decoy::SingleInstallElevatedBit);
    }
    if (has(vulns, Vuln::WinlogonCredentials) || decoy_registry_creds_) {
      const UserRec& u = pick_user(has(vulns, Vuln::WinlogonCredentials));
      reg.winlogon_user = u.name;
      reg.winlogon_password = u.password;
      if (!has(vulns, Vuln::WinlogonCredentials)) host_.decoys.push_back(Decoy::StandardUserRegistryCredentials);
    }
    if (has(vulns, Vuln::UnattendCredentials)) add_unattend(pick_user(true));
    if (decoy_unattend_) {
      add_unattend(pick_user(false));
      host_.decoys.push_back(Decoy::StandardUserUnattendCredentials);
    }
    if (has(vulns, Vuln::WritableStartupFolder)) host_.fs.set_acl(host_.startup_dir, user_writable_acl());
  }

  Rng rng_;
  const EnvConfig& cfg_;
  SimHost host_;
  std::set<std::string> used_ids_;
  std::set<std::string> used_words_;
  bool decoy_service_ = false;
  bool decoy_quoted_ = false;
  bool decoy_registry_creds_ = false;
  bool decoy_path_ = false;
  bool decoy_unattend_ = false;
  bool decoy_task_ = false;
  bool decoy_aie_ = false;
};

}  // namespace

SimHost generate_host(std::uint64_t seed, const EnvConfig& cfg) {
  cfg.validate();
  return HostBuilder(seed, cfg).build(choose_vulns(seed, cfg));
}

}  // namespace privesc::winsim
