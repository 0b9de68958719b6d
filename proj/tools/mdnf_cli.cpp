// mdnf: command-line front end.
//
//   mdnf --config run.cfg [--out DIR] check|profile|chart|verify|levels
//
// Exit codes: 0 success, 1 usage / parse / IO error, 2 hypotheses fail,
// 3 verification ran but did not certify.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "CLI11.hpp"
#include "mdnf/mdnf.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitCertification = 3;

bool is_hypothesis_failure(mdnf_status s) {
  return s == MDNF_NOT_CRITICAL || s == MDNF_DEGENERATE_CRITICAL || s == MDNF_NOT_REGULAR ||
         s == MDNF_NON_POSITIVE_DENSITY;
}

int report(mdnf_status s) {
  std::cerr << "error [" << mdnf_status_name(s) << "]: " << mdnf_last_error() << "\n";
  return is_hypothesis_failure(s) ? kExitHypothesis : kExitUsage;
}

// Owns a string returned by the library.
struct CString {
  char* p = nullptr;
  ~CString() { mdnf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Session {
  mdnf_session* s = nullptr;
  ~Session() { mdnf_session_destroy(s); }
};

bool write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error [IoError]: cannot write " << tmp << "\n";
      return false;
    }
    out << content;
    out.close();
    if (!out) {
      std::cerr << "error [IoError]: write to " << tmp << " failed\n";
      std::error_code ec;
      fs::remove(tmp, ec);
      return false;
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::cerr << "error [IoError]: cannot rename " << tmp << " to " << path << ": "
              << ec.message() << "\n";
    fs::remove(tmp, ec);
    return false;
  }
  return true;
}

// Empty path when the directory is unusable (diagnostic already printed).
fs::path output_dir(const Session& session, bool required) {
  const std::string dir = mdnf_session_output_dir(session.s);
  if (dir.empty()) {
    if (required) std::cerr << "error [IoError]: output_dir is not set (config or --out)\n";
    return {};
  }
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::cerr << "error [IoError]: output directory '" << dir << "' does not exist\n";
    return {};
  }
  return fs::path(dir);
}

using TableFn = mdnf_status (*)(mdnf_session*, mdnf_format, char**);

int write_tables(Session& session, const std::string& stem, TableFn fn) {
  const fs::path dir = output_dir(session, true);
  if (dir.empty()) return kExitUsage;
  const int formats = mdnf_session_formats(session.s);
  for (mdnf_format f : {MDNF_FORMAT_CSV, MDNF_FORMAT_JSON}) {
    if (!(formats & f)) continue;
    CString table;
    if (const mdnf_status s = fn(session.s, f, &table.p); s != MDNF_OK) return report(s);
    const fs::path path = dir / (stem + (f == MDNF_FORMAT_CSV ? ".csv" : ".json"));
    if (!write_atomic(path, table.str())) return kExitUsage;
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_check(Session& session) {
  mdnf_check_report r{};
  if (const mdnf_status s = mdnf_check(session.s, &r); s != MDNF_OK) return report(s);
  CString json;
  if (const mdnf_status s = mdnf_check_json(session.s, &json.p); s != MDNF_OK) return report(s);
  std::printf("admissible: %s\n", r.admissible ? "yes" : "no");
  if (!r.admissible) std::printf("failure:    %s\n", mdnf_status_name(r.failure));
  std::printf("f(0,0)   = %.17g\nf_x(0,0) = %.17g\nf_y(0,0) = %.17g\nf_xx(0,0) = %.17g\n"
              "omega(0,0) = %.17g\nflip_f = %d, flip_y = %d\n",
              r.f00, r.fx0, r.fy0, r.fxx0, r.omega0, r.flip_f, r.flip_y);
  std::fputs(json.str().c_str(), stdout);
  std::fflush(stdout);
  const std::string dir = mdnf_session_output_dir(session.s);
  if (!dir.empty()) {
    const fs::path d = output_dir(session, false);
    if (d.empty() || !write_atomic(d / "check.json", json.str())) return kExitUsage;
  }
  if (!r.admissible) {
    std::cerr << "hypotheses fail: " << mdnf_status_name(r.failure) << "\n";
    return kExitHypothesis;
  }
  return kExitOk;
}

int cmd_profile(Session& session) {
  const fs::path dir = output_dir(session, true);
  if (dir.empty()) return kExitUsage;
  const int formats = mdnf_session_formats(session.s);
  std::string summary;
  for (mdnf_format f : {MDNF_FORMAT_CSV, MDNF_FORMAT_JSON}) {
    if (!(formats & f)) continue;
    CString table;
    CString sum;
    if (const mdnf_status s = mdnf_profile(session.s, f, &table.p, &sum.p); s != MDNF_OK)
      return report(s);
    summary = sum.str();
    const fs::path path = dir / (f == MDNF_FORMAT_CSV ? "profile.csv" : "profile.json");
    if (!write_atomic(path, table.str())) return kExitUsage;
    std::cout << "wrote " << path.string() << "\n";
  }
  std::cout << summary << "\n";
  return kExitOk;
}

void print_check(const char* name, const mdnf_check_result& c) {
  std::fprintf(stderr, "  %-11s max_err %.3e  tol %.1e  %s\n", name, c.max_err, c.tol,
               c.pass ? "PASS" : "FAIL");
}

int cmd_verify(Session& session) {
  const std::string configured = mdnf_session_output_dir(session.s);
  fs::path dir;
  if (!configured.empty()) {
    dir = output_dir(session, false);
    if (dir.empty()) return kExitUsage;
  }
  mdnf_verify_result r{};
  CString json;
  if (const mdnf_status s = mdnf_verify(session.s, &r, &json.p); s != MDNF_OK) return report(s);
  std::fputs(json.str().c_str(), stdout);
  std::fflush(stdout);
  std::fprintf(stderr, "verification (eps_max %.6g, grid extent %.6g, chart radius %.6g)\n",
               r.eps_max, r.grid_extent, r.chart_radius);
  print_check("symplectic", r.symplectic);
  print_check("functional", r.functional);
  print_check("boundary", r.boundary);
  print_check("area", r.area);
  print_check("lemma5", r.lemma5);
  print_check("bisector", r.bisector);
  std::fprintf(stderr, "  min q on first interior row: %.3e\n", r.boundary_probe_min_q);
  std::fprintf(stderr, "overall: %s\n", r.overall_pass ? "PASS" : "FAIL");
  if (!dir.empty() && !write_atomic(dir / "verify.json", json.str())) return kExitUsage;
  return r.overall_pass ? kExitOk : kExitCertification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary Morse-Darboux normal form: construct and certify the chart"};
  std::string config_path;
  std::string out_dir;
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.require_subcommand(1);
  auto* check = app.add_subcommand("check", "report the hypotheses at the origin");
  auto* profile = app.add_subcommand("profile", "tabulate the area profile");
  auto* chart = app.add_subcommand("chart", "dump the normal-form chart on the grid");
  auto* verify = app.add_subcommand("verify", "run the certification checks");
  auto* levels = app.add_subcommand("levels", "emit level sets, boundary and bisector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  Session session;
  if (const mdnf_status s = mdnf_session_create_from_file(config_path.c_str(), &session.s);
      s != MDNF_OK)
    return report(s);
  if (!out_dir.empty()) {
    if (const mdnf_status s = mdnf_session_set_output_dir(session.s, out_dir.c_str());
        s != MDNF_OK)
      return report(s);
  }

  if (check->parsed()) return cmd_check(session);
  if (profile->parsed()) return cmd_profile(session);
  if (chart->parsed()) return write_tables(session, "chart", mdnf_chart_table);
  if (verify->parsed()) return cmd_verify(session);
  if (levels->parsed()) return write_tables(session, "levels", mdnf_levels);
  return kExitUsage;
}
