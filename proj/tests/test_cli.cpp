#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = MATREC_CLI_PATH;

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("matrec_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("exit codes distinguish verdicts from usage errors") {
  CHECK(run(kBin + " dim --variety lowrank:4x4:r1:C") == 0);
  CHECK(run(kBin + " dim --variety herm:4:r1") == 0);
  CHECK(run(kBin + " dim --variety lowrank:0x4:r1:R") == 2);
  CHECK(run(kBin + " dim") == 2);
  CHECK(run(kBin + " nonsense") == 2);
  CHECK(run(kBin + " sweep --config /does/not/exist.json") == 2);
}

TEST_CASE("counterexample verdicts around the everywhere threshold") {
  // dim delta(lowrank 4x4 r1 over C) = 12: kernel at N=11, none at N=12
  CHECK(run(kBin + " counterexample --ensemble gauss:N11:4x4:C:seed13 --variety lowrank:4x4:r1:C"
                   " --seed 1") == 1);
  CHECK(run(kBin + " counterexample --ensemble gauss:N12:4x4:C:seed13 --variety lowrank:4x4:r1:C"
                   " --seed 1") == 0);
}

TEST_CASE("admissibility verdicts") {
  CHECK(run(kBin + " admissible --variety orth:4 --delta-of lowrank:4x4:r1:R --probes 50"
                   " --seed 3") == 0);
  CHECK(run(kBin + " admissible --variety sym:4:r4 --functional skew --probes 25 --seed 4") == 1);
  CHECK(run(kBin + " admissible --variety proj:4:s1 --functional delta") == 2);  // no --delta-of
}

TEST_CASE("recover round trips measurements from a file") {
  TempDir dir;
  const std::string ens = "gauss:N12:3x4:R:seed21";
  const fs::path meas = dir.path / "meas.json";
  // build a measurement file from a planted run's JSON output
  const fs::path outjson = dir.path / "rec.json";
  CHECK(run(kBin + " recover --ensemble " + ens + " --variety lowrank:3x4:r1:R --plant-seed 5" +
            " --format json --out " + outjson.string()) == 0);
  const nlohmann::json rec = nlohmann::json::parse(slurp(outjson));
  CHECK(rec.at("status").get<std::string>() == "Converged");
  CHECK(rec.at("relative_error_to_plant").get<double>() <= 1e-6);
}

TEST_CASE("sweep outputs are complete, atomic, and byte-identical across reruns and workers") {
  TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "schema": 1,
      "recovered": "sym:4:r1",
      "ensemble": "rank1sym",
      "n_range": [3, 7],
      "trials": 8,
      "base_seed": 424242,
      "tests": ["local_rank", "ae_recovery"],
      "solve": {"restarts": 10}
    })";
  }
  const std::string base = kBin + " sweep --config " + cfg.string();
  const fs::path out1 = dir.path / "a";
  const fs::path out2 = dir.path / "b";
  const fs::path out4 = dir.path / "c";
  CHECK(run(base + " --out " + out1.string() + " --workers 1") == 0);
  CHECK(run(base + " --out " + out2.string() + " --workers 1") == 0);
  CHECK(run(base + " --out " + out4.string() + " --workers 4") == 0);

  for (const char* suffix : {".csv", "_local_rank.dat", "_ae_recovery.dat"}) {
    CAPTURE(suffix);
    CHECK(slurp(out1.string() + suffix) == slurp(out2.string() + suffix));
    CHECK(slurp(out1.string() + suffix) == slurp(out4.string() + suffix));
  }
  // json summaries echo the worker count; compare everything else
  nlohmann::json j1 = nlohmann::json::parse(slurp(out1.string() + ".json"));
  nlohmann::json j4 = nlohmann::json::parse(slurp(out4.string() + ".json"));
  j1["config"].erase("workers");
  j4["config"].erase("workers");
  CHECK(j1.dump() == j4.dump());

  // row counts: |N| * trials * |tests| + header
  const std::string csv = slurp(out1.string() + ".csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5 * 8 * 2);

  // no leftover temp files
  for (const auto& entry : fs::directory_iterator(dir.path))
    CHECK(entry.path().extension() != ".tmp");

  // curve values match the summary rates
  const std::string curve = slurp(out1.string() + "_ae_recovery.dat");
  for (const auto& s : j1.at("summaries")) {
    if (s.at("test").get<std::string>() != "ae_recovery") continue;
    std::ostringstream line;
    line << s.at("N").get<int>() << " " << s.at("rate").get<double>();
    CHECK(curve.find(line.str()) != std::string::npos);
  }

  // report regenerates threshold-overlay curves from the summary
  const fs::path rep = dir.path / "rep";
  CHECK(run(kBin + " report --in " + out1.string() + ".json --out " + rep.string()) == 0);
  const std::string overlay = slurp(rep.string() + "_ae_recovery.dat");
  CHECK(overlay.find(" 5\n") != std::string::npos);  // dim + 1 threshold column
  CHECK(run(kBin + " report --in " + cfg.string()) == 2);  // config is not a summary
}

TEST_CASE("phase-retrieval sweep prints the d+1 transition") {
  TempDir dir;
  const fs::path cfg = dir.path / "pr.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "schema": 1,
      "recovered": "sym:4:r1",
      "ensemble": "rank1sym",
      "n_range": [3, 8],
      "trials": 20,
      "base_seed": 777,
      "tests": ["ae_recovery"],
      "solve": {"restarts": 12}
    })";
  }
  const fs::path log = dir.path / "stdout.txt";
  const fs::path out = dir.path / "pr";
  const int status = std::system((kBin + " sweep --config " + cfg.string() + " --out " +
                                  out.string() + " > " + log.string() + " 2>&1")
                                     .c_str());
  CHECK(WEXITSTATUS(status) == 0);
  const std::string printed = slurp(log);
  CHECK(printed.find("ae_recovery: transition 5, theoretical 5") != std::string::npos);
}

TEST_CASE("generate writes ensembles importable as json") {
  TempDir dir;
  const fs::path out = dir.path / "ens.json";
  CHECK(run(kBin + " generate --ensemble rank1herm:N4:3:seed9 --out " + out.string()) == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("schema").get<int>() == 1);
  CHECK(j.at("matrices").size() == 4);
  CHECK(j.at("vectors").size() == 4);
  CHECK(j.at("measurement_scalar_field").get<std::string>() == "R");
}
