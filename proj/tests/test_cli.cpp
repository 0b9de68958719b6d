#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("mdnf_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir / "out");
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string config(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  const std::string cmd = std::string(MDNF_CLI_PATH) + " " + args + " > " +
                          stdout_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("check exit codes") {
  Workspace w;
  CHECK(run("--config " + w.config("a.cfg", "f = \"x^2+y\"\nomega = \"1\"\n") + " check") == 0);
  CHECK(run("--config " + w.config("b.cfg", "f = \"x+y\"\nomega = \"1\"\n") + " check") == 2);
  CHECK(run("--config " + w.config("c.cfg", "f = \"x^2+\"\nomega = \"1\"\n") + " check") == 1);
  CHECK(run("--config " + (w.dir / "missing.cfg").string() + " check") == 1);
  CHECK(run("check") == 1);
  CHECK(run("--config " + w.config("d.cfg", "f = x^2+y\nomega = 1\n")) == 1);
  CHECK(run("--config " + w.config("e.cfg", "f = x^2+y\nomega = 1\nnope = 1\n") + " check") == 1);
}

TEST_CASE("profile, chart and levels write artifacts") {
  Workspace w;
  const std::string cfg = w.config("a.cfg", "f = x^2+y\nomega = 1\neps_max = 0.25\noutput_dir = " +
                                                (w.dir / "out").string() + "\n");
  CHECK(run("--config " + cfg + " profile") == 0);
  CHECK(fs::exists(w.dir / "out" / "profile.csv"));
  CHECK(fs::exists(w.dir / "out" / "profile.json"));
  const std::string csv = slurp(w.dir / "out" / "profile.csv");
  CHECK(csv.find("\n0.25,0.1666666666666666") != std::string::npos);

  CHECK(run("--config " + cfg + " chart") == 0);
  CHECK(run("--config " + cfg + " levels") == 0);
  CHECK(fs::exists(w.dir / "out" / "chart.csv"));
  CHECK(fs::exists(w.dir / "out" / "levels.json"));
  for (const auto& e : fs::directory_iterator(w.dir / "out"))
    CHECK(e.path().string().find(".tmp.") == std::string::npos);

  CHECK(run("--config " + cfg + " --out " + (w.dir / "nope").string() + " profile") == 1);
  const std::string no_dir = w.config("b.cfg", "f = x^2+y\nomega = 1\n");
  CHECK(run("--config " + no_dir + " profile") == 1);
  CHECK(run("--config " + no_dir + " --out " + (w.dir / "out").string() + " chart") == 0);
}

TEST_CASE("verify exit codes and report") {
  Workspace w;
  const fs::path out = w.dir / "stdout.json";
  CHECK(run("--config " + w.config("a.cfg", "f = x^2+y\nomega = 1\n") + " verify", out) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["overall_pass"] == true);

  CHECK(run("--config " + w.config("b.cfg", "f = x^2+y\nomega = exp(x)\nverify_tol = 1e-15\n") +
                " verify",
            out) == 3);
  j = nlohmann::json::parse(slurp(out));
  CHECK(j["overall_pass"] == false);
  CHECK(j["symplectic"]["pass"] == false);

  CHECK(run("--config " + w.config("c.cfg", "f = x^2+y\nomega = 1\nfault_p_scale = 1.01\n") +
                " verify",
            out) == 3);
  j = nlohmann::json::parse(slurp(out));
  CHECK(j["symplectic"]["pass"] == false);

  CHECK(run("--config " + w.config("d.cfg", "f = x+y\nomega = 1\n") + " verify") == 2);
}

TEST_CASE("outputs are byte-identical across runs") {
  Workspace w;
  fs::create_directories(w.dir / "r1");
  fs::create_directories(w.dir / "r2");
  const std::string cfg =
      w.config("a.cfg", "f = x^2+y+x^3\nomega = exp(x)*(1+y)\ngrid_n = 11\ngrid_m = 6\n");
  for (const char* cmd : {"profile", "chart", "levels", "verify"}) {
    CAPTURE(cmd);
    CHECK(run("--config " + cfg + " --out " + (w.dir / "r1").string() + " " + cmd) == 0);
    CHECK(run("--config " + cfg + " --out " + (w.dir / "r2").string() + " " + cmd) == 0);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(w.dir / "r1")) {
    const fs::path other = w.dir / "r2" / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
    ++compared;
  }
  CHECK(compared == 7);
}
