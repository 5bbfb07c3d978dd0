#pragma once

#include <string_view>

namespace provkit {

// Embedded copy of data/benign_catalog.txt; tests keep the two in sync.
inline constexpr std::string_view kBenignCatalog = R"catalog(# provkit benign activity catalog
#
# Each [archetype.NAME] section describes one kind of benign process.
#   hosts       host profiles the archetype runs on (stable = cloud server,
#               ever_changing = user terminal)
#   daemon      true: one long-lived instance per day, pid stable across days
#   parent      archetype that spawns it (daemons may name "root")
#   weight      relative spawn frequency among non-daemon archetypes
#   events      lo-hi own actions per instance (per day for daemons)
#   actions     action:weight mix
#   files/libs/net/registry   object pools; {rand} expands to fresh hex,
#               {ver} to the agent version, {day} to the day index
#   scripts     content prefix and pool size for run_script
#   children    archetype:weight list spawned via exec, child_count lo-hi
#   startup     daemons: length of the fixed routine run at the start of each day
#   churn       true: short-lived open/close helper used by the imbalance knob
#
# Changing any value changes generated traces; bump `version` when you do.

version = 1

[archetype.systemd]
hosts = stable
daemon = true
startup = 120
parent = root
pid = 1
path = /usr/lib/systemd/systemd
cmdline = /sbin/init
events = 20-40
actions = read:4,open:2,close:2,write:1
files = /proc/self/mountinfo,/run/systemd/units/invocation,/sys/fs/cgroup/system.slice/cgroup.procs,/etc/systemd/system.conf

[archetype.sshd]
hosts = stable
daemon = true
startup = 120
parent = systemd
pid = 812
path = /usr/sbin/sshd
cmdline = sshd: /usr/sbin/sshd -D [listener]
events = 30-60
actions = read:3,recv:3,send:3,open:1,close:1
files = /etc/ssh/sshd_config,/etc/passwd,/var/log/auth.log,/etc/shadow
net = @10.0.0.1:22

[archetype.cron]
hosts = stable
daemon = true
startup = 120
parent = systemd
pid = 640
path = /usr/sbin/cron
cmdline = /usr/sbin/cron -f
events = 40-60
actions = read:5,open:2,close:2
files = /etc/crontab,/var/spool/cron/crontabs/root,/etc/cron.d/sysstat,/etc/localtime

[archetype.postgres]
hosts = stable
daemon = true
startup = 120
parent = systemd
pid = 1102
path = /usr/lib/postgresql/14/bin/postgres
cmdline = /usr/lib/postgresql/14/bin/postgres -D /var/lib/postgresql/14/main
events = 150-250
actions = read:6,write:4,recv:3,send:3,open:1,close:1
files = /var/lib/postgresql/14/main/base/16384/{rand},/var/lib/postgresql/14/main/pg_wal/000000010000000000000001,/var/lib/postgresql/14/main/global/pg_control,/var/log/postgresql/postgresql-14-main.log
net = @10.0.0.12:5432,@10.0.0.13:5432

[archetype.nginx]
hosts = stable
daemon = true
startup = 120
parent = systemd
pid = 1210
path = /usr/sbin/nginx
cmdline = nginx: worker process
events = 200-300
actions = recv:4,send:4,read:3,write:2
files = /var/www/html/index.html,/var/www/html/static/app.js,/var/log/nginx/access.log,/var/log/nginx/error.log
net = @10.0.0.20:443,@10.0.0.21:443,@10.0.0.22:443

[archetype.bash]
hosts = stable
parent = sshd
weight = 10
path = /bin/bash
cmdline = -bash
events = 4-14
actions = read:4,write:1,open:2,close:2
files = /etc/profile,/etc/bash.bashrc,/root/.bashrc,/root/.bash_history,/etc/hostname
children = ls:3,cat:3,grep:2,vim:1,python:1
child_count = 0-3

[archetype.ls]
hosts = stable
parent = bash
weight = 0
path = /usr/bin/ls
cmdline = ls -la
events = 2-5
actions = open:2,read:2,close:2,load:1
files = /root,/var/log,/etc
libs = /lib/x86_64-linux-gnu/libc.so.6,/lib/x86_64-linux-gnu/libselinux.so.1

[archetype.cat]
hosts = stable
parent = bash
weight = 0
path = /usr/bin/cat
cmdline = cat /var/log/syslog
events = 2-4
actions = open:1,read:2,close:1,load:1
files = /var/log/syslog,/etc/hosts,/etc/os-release
libs = /lib/x86_64-linux-gnu/libc.so.6

[archetype.grep]
hosts = stable
parent = bash
weight = 0
path = /usr/bin/grep
cmdline = grep -r error /var/log
events = 3-8
actions = open:2,read:4,close:2,load:1
files = /var/log/syslog,/var/log/auth.log,/var/log/kern.log,/var/log/dpkg.log
libs = /lib/x86_64-linux-gnu/libc.so.6,/lib/x86_64-linux-gnu/libpcre.so.3

[archetype.vim]
hosts = stable
parent = bash
weight = 0
path = /usr/bin/vim.basic
cmdline = vim /etc/nginx/nginx.conf
events = 4-10
actions = read:3,write:2,open:1,close:1,load:1
files = /etc/nginx/nginx.conf,/root/.viminfo,/tmp/.nginx.conf.swp
libs = /lib/x86_64-linux-gnu/libc.so.6,/lib/x86_64-linux-gnu/libtinfo.so.6

[archetype.python]
hosts = stable
parent = bash
weight = 0
path = /usr/bin/python3.10
cmdline = python3 /opt/tools/report.py
events = 5-15
actions = read:4,write:2,load:2,open:1,close:1,connect:1,recv:1
files = /opt/tools/report.py,/opt/tools/out/{rand}.csv,/usr/lib/python3.10/json/__init__.py
libs = /usr/lib/x86_64-linux-gnu/libpython3.10.so.1.0,/lib/x86_64-linux-gnu/libc.so.6
net = metrics.internal.example@10.0.0.30:9090

[archetype.logrotate]
hosts = stable
parent = cron
weight = 4
path = /usr/sbin/logrotate
cmdline = /usr/sbin/logrotate /etc/logrotate.conf
events = 4-10
actions = read:3,write:2,open:1,close:1,delete:1
files = /etc/logrotate.conf,/var/log/syslog,/var/log/syslog.1,/var/log/nginx/access.log,/var/log/nginx/access.log.1,/var/lib/logrotate/status

[archetype.apt_check]
hosts = stable
parent = cron
weight = 2
path = /usr/lib/update-notifier/apt-check
cmdline = /usr/bin/python3 /usr/lib/update-notifier/apt-check --human-readable
events = 6-14
actions = read:3,connect:1,recv:2,send:1,write:1,load:1
files = /var/lib/apt/lists/archive.ubuntu.com_ubuntu_dists_jammy_InRelease,/var/lib/apt/periodic/update-success-stamp,/etc/apt/sources.list
libs = /usr/lib/x86_64-linux-gnu/libapt-pkg.so.6.0
net = archive.ubuntu.com@91.189.91.39:80,security.ubuntu.com@185.125.190.36:80

[archetype.sysstat]
hosts = stable
parent = cron
weight = 6
path = /usr/lib/sysstat/sadc
cmdline = /usr/lib/sysstat/sadc 1 1 /var/log/sysstat
events = 3-6
actions = read:3,write:1,open:1,close:1
files = /proc/stat,/proc/meminfo,/proc/loadavg,/var/log/sysstat/sa{day}

[archetype.backup]
hosts = stable
parent = cron
weight = 1
path = /usr/bin/pg_dump
cmdline = pg_dump -Fc appdb
events = 8-20
actions = connect:1,send:2,recv:4,write:3,open:1,close:1
files = /var/backups/appdb-{rand}.dump
net = @10.0.0.12:5432

[archetype.corp_agent]
hosts = stable,ever_changing
parent = root
weight = 3
path = /opt/corp/agent/{ver}/collector
cmdline = collector --profile default --build {ver}
events = 5-10
actions = read:3,connect:1,send:2,recv:1,write:1
files = /opt/corp/agent/{ver}/agent.conf,/opt/corp/agent/{ver}/queue.db
net = @203.0.113.{ipver}:8443

[archetype.healthcheck]
hosts = stable
parent = systemd
weight = 0
churn = true
path = /usr/local/bin/healthcheck
cmdline = healthcheck --tcp 127.0.0.1:8080
events = 2-2
actions = open:1,close:1
files = /run/healthcheck.lock

[archetype.services]
hosts = ever_changing
daemon = true
startup = 120
parent = root
pid = 680
path = C:\Windows\System32\services.exe
cmdline = C:\Windows\system32\services.exe
events = 20-40
actions = read:2,modify_registry:1,open:1,close:1
files = C:\Windows\System32\config\SYSTEM
registry = HKLM\SYSTEM\CurrentControlSet\Services,HKLM\SYSTEM\CurrentControlSet\Control

[archetype.svchost]
hosts = ever_changing
daemon = true
startup = 120
parent = services
pid = 1044
path = C:\Windows\System32\svchost.exe
cmdline = C:\Windows\system32\svchost.exe -k netsvcs -p
events = 150-250
actions = load:3,read:3,modify_registry:2,connect:1,send:1,recv:1,write:1
files = C:\Windows\System32\Tasks\Microsoft\Windows\UpdateOrchestrator\Schedule Scan,C:\ProgramData\Microsoft\Windows\wfp\wfpdiag.etl
libs = C:\Windows\System32\ntdll.dll,C:\Windows\System32\kernel32.dll,C:\Windows\System32\advapi32.dll,C:\Windows\System32\wininet.dll
registry = HKLM\SOFTWARE\Microsoft\Windows\CurrentVersion\WindowsUpdate,HKLM\SYSTEM\CurrentControlSet\Services\W32Time
net = settings-win.data.microsoft.com@20.42.65.92:443,time.windows.com@168.61.215.74:123

[archetype.explorer]
hosts = ever_changing
daemon = true
startup = 120
parent = root
pid = 4312
path = C:\Windows\explorer.exe
cmdline = C:\Windows\Explorer.EXE
events = 100-200
actions = read:4,load:2,modify_registry:2,open:1,close:1
files = C:\Users\user\Desktop\desktop.ini,C:\Users\user\AppData\Roaming\Microsoft\Windows\Recent\{rand}.lnk
libs = C:\Windows\System32\shell32.dll,C:\Windows\System32\kernel32.dll,C:\Windows\System32\user32.dll
registry = HKCU\Software\Microsoft\Windows\CurrentVersion\Explorer\RecentDocs,HKCU\Software\Microsoft\Windows\CurrentVersion\Run

[archetype.chrome]
hosts = ever_changing
parent = explorer
weight = 8
path = C:\Program Files\Google\Chrome\Application\chrome.exe
cmdline = "C:\Program Files\Google\Chrome\Application\chrome.exe" --type=renderer
events = 8-20
actions = connect:2,recv:4,send:2,write:2,read:2,load:1
files = C:\Users\user\AppData\Local\Google\Chrome\User Data\Default\Cache\Cache_Data\f_{rand},C:\Users\user\AppData\Local\Google\Chrome\User Data\Default\History
libs = C:\Program Files\Google\Chrome\Application\chrome.dll,C:\Windows\System32\kernel32.dll
net = www.google.com@142.250.72.196:443,mail.example.com@198.51.100.25:443,docs.example.com@198.51.100.26:443,cdn.jsdelivr.net@151.101.1.229:443

[archetype.outlook]
hosts = ever_changing
parent = explorer
weight = 4
path = C:\Program Files\Microsoft Office\root\Office16\OUTLOOK.EXE
cmdline = "C:\Program Files\Microsoft Office\root\Office16\OUTLOOK.EXE"
events = 6-16
actions = connect:1,recv:3,send:1,read:2,write:2,load:1
files = C:\Users\user\AppData\Local\Microsoft\Outlook\user@example.com.ost,C:\Users\user\AppData\Local\Microsoft\Windows\INetCache\Content.Outlook\{rand}.tmp
libs = C:\Program Files\Microsoft Office\root\Office16\mso.dll,C:\Windows\System32\kernel32.dll
net = outlook.office365.com@52.97.146.162:443

[archetype.winword]
hosts = ever_changing
parent = explorer
weight = 3
path = C:\Program Files\Microsoft Office\root\Office16\WINWORD.EXE
cmdline = "C:\Program Files\Microsoft Office\root\Office16\WINWORD.EXE" /n
events = 5-12
actions = read:3,write:2,load:1,modify_registry:1
files = C:\Users\user\Documents\report.docx,C:\Users\user\Documents\~$report.docx,C:\Users\user\AppData\Roaming\Microsoft\Templates\Normal.dotm
libs = C:\Program Files\Microsoft Office\root\Office16\wwlib.dll,C:\Windows\System32\kernel32.dll
registry = HKCU\Software\Microsoft\Office\16.0\Word\Options

[archetype.powershell]
hosts = ever_changing
parent = svchost
weight = 2
path = C:\Windows\System32\WindowsPowerShell\v1.0\powershell.exe
cmdline = powershell.exe -NoProfile -ExecutionPolicy Bypass -File C:\ProgramData\Inventory\collect.ps1
events = 3-8
actions = run_script:2,read:2,load:1,write:1
files = C:\ProgramData\Inventory\collect.ps1,C:\ProgramData\Inventory\out\{rand}.json
libs = C:\Windows\Microsoft.NET\Framework64\v4.0.30319\clr.dll
scripts = Get-CimInstance Win32_ComputerSystem # inventory
script_pool = 12

[archetype.onedrive]
hosts = ever_changing
parent = explorer
weight = 3
path = C:\Users\user\AppData\Local\Microsoft\OneDrive\OneDrive.exe
cmdline = "C:\Users\user\AppData\Local\Microsoft\OneDrive\OneDrive.exe" /background
events = 6-14
actions = read:3,connect:1,send:2,recv:1,write:1
files = C:\Users\user\OneDrive\Documents\{rand}.xlsx,C:\Users\user\AppData\Local\Microsoft\OneDrive\logs\Personal\SyncDiagnostics.log
net = api.onedrive.com@13.107.42.12:443

[archetype.conhost]
hosts = ever_changing
parent = svchost
weight = 3
path = C:\Windows\System32\conhost.exe
cmdline = \??\C:\Windows\system32\conhost.exe 0xffffffff -ForceV1
events = 2-4
actions = load:2,read:1
files = C:\Windows\System32\en-US\conhost.exe.mui
libs = C:\Windows\System32\kernel32.dll,C:\Windows\System32\ntdll.dll
)catalog";

}  // namespace provkit
