// Acceptance suite: one PASS/FAIL line per criterion.
//
//   mdnf_acceptance [N ...]     run the listed criteria (default: all)
//
// Exit status is 0 iff every requested criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "json.hpp"
#include "mdnf/area_invariant.hpp"
#include "mdnf/flow.hpp"
#include "mdnf/normal_form.hpp"

namespace fs = std::filesystem;
using namespace mdnf;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;  // one line per failing case
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mdnf_accept_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct CliRun {
  int exit_code = -1;
  std::string out;
  double seconds = 0.0;
};

CliRun run_verify(const fs::path& dir, const std::string& name, const std::string& config) {
  const fs::path cfg = dir / (name + ".cfg");
  const fs::path out = dir / (name + ".out");
  std::ofstream(cfg) << config;
  const std::string cmd = std::string(MDNF_CLI_PATH) + " --config " + cfg.string() +
                          " verify > " + out.string() + " 2>/dev/null";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.seconds = seconds_since(t0);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

template <class Body>
void for_corpus(Outcome& o, Body&& body) {
  for (const char* f : corpus::kF)
    for (const char* w : corpus::kOmega) {
      try {
        body(f, w);
      } catch (const Error& e) {
        o.pass = false;
        o.notes.push_back(corpus::label(f, w) + ": " + error_code_name(e.code()) + ": " +
                          e.what());
      }
    }
}

// Closed-form area invariant.
Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto prob = corpus::normalize("x^2+y", "1");
  double worst = 0.0;
  for (double e : {0.01, 0.04, 0.09, 0.16})
    worst = std::max(worst, std::fabs(area_below(prob, e) - 4.0 / 3.0 * std::pow(e, 1.5)));
  const double t = seconds_since(t0);
  o.pass = worst <= 1e-9 && t < 1.0;
  o.detail = "max |A - 4/3 eps^1.5| = " + sci(worst) + " (tol 1e-9), " + sci(t) + " s (< 1 s)";
  return o;
}

// Identity chart recovery.
Outcome criterion2() {
  Outcome o;
  const auto chart = build_chart(corpus::normalize("x^2+y", "1"));
  const auto& prob = chart.problem();
  const double g = std::min(0.4, prob.radius() / std::sqrt(2.0));
  double worst = 0.0;
  for (int j = 0; j < 21; ++j)
    for (int i = 0; i < 41; ++i) {
      const Vec2 P = prob.inverse({-g + 2 * g * i / 40.0, g * g * j / 20.0});
      const Vec2 pq = chart.pq(P[0], P[1]);
      worst = std::max({worst, std::fabs(pq[0] - P[0]), std::fabs(pq[1] - P[1])});
    }
  const auto r = verify(chart);
  double report_worst = 0.0;
  for (const CheckResult* c :
       {&r.symplectic, &r.functional, &r.boundary, &r.area, &r.lemma5, &r.bisector})
    report_worst = std::max(report_worst, c->max_err);
  o.pass = worst <= 1e-8 && r.overall_pass && report_worst <= 1e-8;
  o.detail = "max |p-x|,|q-y| = " + sci(worst) + ", verify " +
             (r.overall_pass ? "pass" : "FAIL") + " with max error " + sci(report_worst) +
             " (tol 1e-8)";
  return o;
}

// Constant-density closed form.
Outcome criterion3() {
  Outcome o;
  const auto chart = build_chart(corpus::normalize("x^2+y", "8"));
  const auto& prob = chart.problem();
  const double g = std::min(0.4, prob.radius() / std::sqrt(2.0));
  double worst = 0.0;
  for (int j = 0; j < 21; ++j)
    for (int i = 0; i < 41; ++i) {
      const Vec2 P = prob.inverse({-g + 2 * g * i / 40.0, g * g * j / 20.0});
      const Vec2 pq = chart.pq(P[0], P[1]);
      worst = std::max({worst, std::fabs(pq[0] - 2 * P[0]), std::fabs(pq[1] - 4 * P[1])});
    }
  const auto r = verify(chart);
  o.pass = worst <= 1e-6 && r.symplectic.max_err <= 1e-6;
  o.detail = "max |p-2x|,|q-4y| = " + sci(worst) + ", symplectic " + sci(r.symplectic.max_err) +
             " (tol 1e-6)";
  return o;
}

// Certification corpus through the CLI.
Outcome criterion4(const fs::path& dir) {
  Outcome o;
  int passed = 0;
  double slowest = 0.0;
  int k = 0;
  for (const char* f : corpus::kF)
    for (const char* w : corpus::kOmega) {
      const std::string cfg = std::string("f = \"") + f + "\"\nomega = \"" + w +
                              "\"\ntol_symplectic = 1e-5\ntol_functional = 1e-7\n"
                              "tol_boundary = 1e-7\ntol_area = 1e-6\ntol_bisector = 1e-7\n";
      const CliRun r = run_verify(dir, "c4_" + std::to_string(k++), cfg);
      slowest = std::max(slowest, r.seconds);
      const bool ok = r.exit_code == 0 && r.seconds <= 30.0;
      if (ok) {
        ++passed;
        continue;
      }
      o.pass = false;
      std::string why = "exit " + std::to_string(r.exit_code) + ", " + sci(r.seconds) + " s";
      try {
        const auto j = nlohmann::json::parse(r.out);
        for (const char* c : {"symplectic", "functional", "boundary", "area", "lemma5", "bisector"})
          if (!j[c]["pass"].get<bool>())
            why += std::string(", ") + c + " " + sci(j[c]["max_err"].get<double>());
      } catch (const std::exception&) {
      }
      o.notes.push_back(corpus::label(f, w) + ": " + why);
    }
  o.detail = std::to_string(passed) + "/15 cases exit 0, slowest " + sci(slowest) + " s (<= 30 s)";
  return o;
}

// Area derivative against the transit time.
Outcome criterion5() {
  Outcome o;
  double worst = 0.0;
  int checked = 0;
  for_corpus(o, [&](const char* f, const char* w) {
    const auto prob = corpus::normalize(f, w);
    const LevelChart c(prob);
    for (double e : {0.04, 0.09, 0.16}) {
      try {
        const double h = 1e-4;
        const double d = (area_below(prob, e + h) - area_below(prob, e - h)) / (2 * h);
        const double tf = std::fabs(c.transit_time(e));
        const double err = std::fabs(d - tf) / tf;
        worst = std::max(worst, err);
        ++checked;
        if (err > 1e-4) {
          o.pass = false;
          o.notes.push_back(corpus::label(f, w) + " eps=" + sci(e) + ": rel err " + sci(err));
        }
      } catch (const Error& ex) {
        o.pass = false;
        o.notes.push_back(corpus::label(f, w) + " eps=" + sci(e) + ": " +
                          error_code_name(ex.code()) + ": " + ex.what());
      }
    }
  });
  o.detail = std::to_string(checked) + "/45 points evaluated, max rel err " + sci(worst) +
             " (tol 1e-4)";
  return o;
}

// Small-eps Taylor limit.
Outcome criterion6() {
  Outcome o;
  double worst = 0.0;
  for_corpus(o, [&](const char* f, const char* w) {
    const auto prob = corpus::normalize(f, w);
    const double e = 1e-4;
    const double limit = 4.0 / 3.0 * prob.omega_hat0();
    const double rel = std::fabs(area_below(prob, e) / std::pow(e, 1.5) - limit) / limit;
    worst = std::max(worst, rel);
    if (rel > 0.02) {
      o.pass = false;
      o.notes.push_back(corpus::label(f, w) + ": rel deviation " + sci(rel));
    }
  });
  o.detail = "max |A/eps^1.5 - 4/3 omega0| / limit at eps=1e-4 = " + sci(worst) + " (tol 2e-2)";
  return o;
}

// Bisector oracles.
Outcome criterion7() {
  Outcome o;
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  double worst_exp = 0.0;
  for (double z : {0.04, 0.09, 0.16})
    worst_exp = std::max(worst_exp, std::fabs(ex.bisector(z) - std::log(std::cosh(std::sqrt(z)))));
  if (worst_exp > 1e-9) o.pass = false;
  // Densities even in xh: the corpus cases whose Morse chart is linear.
  double worst_even = 0.0;
  for (const char* f : {"x^2+y", "2*y+x^2"})
    for (const char* w : {"1", "8", "1+y"}) {
      const LevelChart c(corpus::normalize(f, w));
      for (double z : {0.01, 0.04, 0.09, 0.16}) {
        const double s = std::fabs(c.bisector(z));
        worst_even = std::max(worst_even, s);
        if (s > 1e-10) {
          o.pass = false;
          o.notes.push_back(corpus::label(f, w) + " z=" + sci(z) + ": |s| = " + sci(s));
        }
      }
    }
  o.detail = "exp(xh): max |s - log cosh sqrt z| = " + sci(worst_exp) +
             " (tol 1e-9); even densities: max |s| = " + sci(worst_even) + " (tol 1e-10)";
  return o;
}

// ODE oracle against the quadrature transit time.
Outcome criterion8() {
  Outcome o;
  double worst = 0.0;
  int checked = 0;
  for_corpus(o, [&](const char* f, const char* w) {
    const LevelChart c(corpus::normalize(f, w));
    for (double e : {0.04, 0.16}) {
      try {
        const double err = std::fabs(c.transit_time_oracle(e, 1e-3) - c.transit_time(e));
        worst = std::max(worst, err);
        ++checked;
        if (err > 1e-6) {
          o.pass = false;
          o.notes.push_back(corpus::label(f, w) + " eps=" + sci(e) + ": |diff| " + sci(err));
        }
      } catch (const Error& ex) {
        o.pass = false;
        o.notes.push_back(corpus::label(f, w) + " eps=" + sci(e) + ": " +
                          error_code_name(ex.code()) + ": " + ex.what());
      }
    }
  });
  o.detail = std::to_string(checked) + "/30 points evaluated, max |oracle - t_f| = " + sci(worst) +
             " (tol 1e-6)";
  return o;
}

// Flow-time derivative along the Hamiltonian field.
Outcome criterion9() {
  Outcome o;
  double worst = 0.0;
  int points = 0;
  for_corpus(o, [&](const char* f, const char* w) {
    const LevelChart c(corpus::normalize(f, w));
    const double zmax = std::min(0.16, c.problem().radius() * c.problem().radius());
    for (int a = 1; a <= 5; ++a) {
      const double z = zmax * a / 5.0;
      const double r = std::sqrt(z);
      for (double frac : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
        const double x = frac * r;
        const double h = 1e-5;
        const double dT = (c.time_from_bisector(x + h, z) - c.time_from_bisector(x - h, z)) / (2 * h);
        const Vec2 X = c.hamiltonian_field_xz(x, z);
        const double err = std::fabs(dT * X[0] - 1.0);
        worst = std::max(worst, err);
        ++points;
        if (err > 1e-6) {
          o.pass = false;
          o.notes.push_back(corpus::label(f, w) + ": dT(X) - 1 = " + sci(err));
        }
      }
    }
  });
  o.detail = std::to_string(points) + " points (25 per case), max |dT(X) - 1| = " + sci(worst) +
             " (tol 1e-6)";
  return o;
}

// Fault injection must be caught.
Outcome criterion10(const fs::path& dir) {
  Outcome o;
  const CliRun r = run_verify(dir, "c10", "f = \"x^2+y\"\nomega = \"1\"\nfault_p_scale = 1.01\n");
  bool symplectic_failed = false;
  double err = 0.0;
  try {
    const auto j = nlohmann::json::parse(r.out);
    symplectic_failed = !j["symplectic"]["pass"].get<bool>();
    err = j["symplectic"]["max_err"].get<double>();
  } catch (const std::exception&) {
  }
  o.pass = r.exit_code == 3 && symplectic_failed;
  o.detail = "p scaled by 1.01: exit " + std::to_string(r.exit_code) + ", symplectic " +
             (symplectic_failed ? "failed" : "passed") + " with max_err " + sci(err);
  return o;
}

const std::map<int, std::string> kTitles = {
    {1, "closed-form area invariant"},
    {2, "identity chart recovery"},
    {3, "constant-density closed form"},
    {4, "certification corpus (cli verify)"},
    {5, "area derivative equals transit time"},
    {6, "small-eps area ratio"},
    {7, "bisector oracles"},
    {8, "ODE transit-time cross-validation"},
    {9, "flow time derivative dT(X) = 1"},
    {10, "fault detection"},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (!kTitles.count(n)) {
      std::fprintf(stderr, "usage: %s [criterion 1-10 ...]\n", argv[0]);
      return 2;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (const auto& [n, title] : kTitles) which.push_back(n);

  TempDir tmp;
  bool all = true;
  for (int n : which) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      switch (n) {
        case 1: o = criterion1(); break;
        case 2: o = criterion2(); break;
        case 3: o = criterion3(); break;
        case 4: o = criterion4(tmp.path); break;
        case 5: o = criterion5(); break;
        case 6: o = criterion6(); break;
        case 7: o = criterion7(); break;
        case 8: o = criterion8(); break;
        case 9: o = criterion9(); break;
        case 10: o = criterion10(tmp.path); break;
      }
    } catch (const Error& e) {
      o.pass = false;
      o.detail = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    all = all && o.pass;
    std::printf("[%s] criterion %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", n,
                kTitles.at(n).c_str(), o.detail.c_str(), seconds_since(t0));
    for (const auto& note : o.notes) std::printf("         %s\n", note.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
