#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + ENTROPYLAB_CLI + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Outcome o{0, ""};
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int raw = ::pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("entropylab_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("check exit codes") {
  const Outcome ok = run("check builtin:sumdiff --assign X=pmf:0.5,0.5 --assign Y=pmf:0.25,0.75");
  CHECK(ok.status == 0);
  CHECK(ok.out.starts_with("# entropylab "));
  CHECK(ok.out.find("satisfied,,,true") != std::string::npos);

  const Outcome bad = run(
      "check builtin:subadditivity --side continuous --assign X=gaussian:var=0.0585498315243,k=6 "
      "--assign Y=gaussian:var=1,k=6 --format json");
  CHECK(bad.status == 1);
  const auto j = nlohmann::json::parse(bad.out);
  CHECK(j["slack"].get<double>() < -0.028);
  CHECK_FALSE(j["satisfied"].get<bool>());
  CHECK(j["seed"] == 1);
  CHECK(j.contains("config_hash"));
}

TEST_CASE("inline spec text") {
  CHECK(run("check \"H(X+Y) - H(X) - H(Y) <= 0\" --assign X=pmf:0.5,0.5 --assign Y=uniform-int:n=3").status == 0);
  CHECK(run("ratio \"H(X-Y) - H(X)\" \"H(X+Y) - H(X)\" --restarts 2 --iterations 20").status == 0);
}

TEST_CASE("input errors exit 2 and resource limits exit 3") {
  const fs::path dir = scratch("errors");
  std::ofstream(dir / "bad.spec") << "H(X+Y)\n - 3*H(X-Y) + H(0.5X) <= 0\n";
  CHECK(run("check " + (dir / "bad.spec").string() + " --assign X=pmf:1").status == 2);
  CHECK(run("check builtin:sumdiff --assign X=pmf:0.5,0.5").status == 2);
  CHECK(run("check builtin:nope --assign X=pmf:1").status == 2);
  CHECK(run("lemma renyi --bogus").status == 2);
  CHECK(run("ruzsa --n 40 --L 4").status == 3);
  CHECK(run("search builtin:sumdiff --max-support 1000").status == 3);
  CHECK(run("--help").status == 0);
}

TEST_CASE("lemma and table outputs") {
  const Outcome renyi = run("lemma renyi --density uniform:lo=0,hi=1,k=8 --k 1..4");
  REQUIRE(renyi.status == 0);
  CHECK(renyi.out.find("\n4,") != std::string::npos);
  const Outcome table = run("ruzsa --n 2 --L 4");
  REQUIRE(table.status == 0);
  CHECK(table.out.find("2,4,15,45,61,1.276905126167666,enumeration") != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
  const std::string args = "search builtin:sumdiff --restarts 3 --iterations 40 --seed 9";
  const Outcome a = run(args, "ENTROPYLAB_THREADS=1");
  const Outcome b = run(args, "ENTROPYLAB_THREADS=3");
  const Outcome c = run(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(run("search builtin:sumdiff --restarts 3 --iterations 40 --seed 10").out != a.out);
}

TEST_CASE("search witnesses replay through check") {
  const fs::path dir = scratch("witness");
  const Outcome s = run("search builtin:subadditivity --side continuous --restarts 2 --iterations 30 --witness-dir " +
                        dir.string());
  REQUIRE(s.status == 1);
  const double objective = nlohmann::json::parse(s.out)["result"]["objective"].get<double>();
  const Outcome c = run("check builtin:subadditivity --side continuous --format json --assign X=" +
                        (dir / "X.grid").string() + " --assign Y=" + (dir / "Y.grid").string());
  CHECK(c.status == 1);
  CHECK(nlohmann::json::parse(c.out)["slack"].get<double>() == doctest::Approx(-objective).epsilon(1e-12));
}

TEST_CASE("embed writes one pmf per variable") {
  const fs::path dir = scratch("embed");
  const Outcome e = run("embed --pmf pmf:0.5,0.5 --pmf pmf:0.25,0.75 --matrix \"1,1;1,-1\" --k 2 --out-dir " +
                        dir.string());
  REQUIRE(e.status == 0);
  CHECK(fs::exists(dir / "U1.pmf"));
}
