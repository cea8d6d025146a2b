#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "mixsim/experiments.hpp"

using namespace mixsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(bool(f));
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

const char* kTinyBounds = R"({
  "experiment": "bounds_curve",
  "theorem": "thm1",
  "n_from": 4, "n_to": 10,
  "r": "schedule",
  "m": 1,
  "rho": 0.4,
  "alpha": {"type": "geometric", "coef": 0.1, "ratio": 0.3},
  "cap": 64
})";

}  // namespace

TEST_CASE("bounds_curve run writes its artifacts and report") {
  std::filesystem::remove_all("unit_out/bc");
  RunReport rep = run_config_text(kTinyBounds, "unit_out/bc", "inline");
  CHECK(rep.experiment == "bounds_curve");
  CHECK(rep.all_pass());
  bool has_csv = false;
  for (const auto& a : rep.artifacts) has_csv = has_csv || a == "bounds.csv";
  CHECK(has_csv);
  std::string csv = slurp("unit_out/bc/bounds.csv");
  CHECK(csv.rfind("n,r,bound,tail_remainder,schedule_r,schedule_j", 0) == 0);
  std::string report = slurp("unit_out/bc/report.json");
  CHECK(report.find("\"experiment\": \"bounds_curve\"") != std::string::npos);
  CHECK(report.find("config_hash") != std::string::npos);
}

TEST_CASE("deterministic closed-form cross-check verdict") {
  const char* cfg = R"({
    "experiment": "bounds_curve",
    "theorem": "thm1",
    "n_from": 5, "n_to": 9,
    "r": 3,
    "m": 2,
    "rho": 0.5,
    "deterministic_eta": true,
    "alpha": {"type": "zeros"},
    "verify_closed_form": true
  })";
  RunReport rep = run_config_text(cfg, "unit_out/cf", "inline");
  REQUIRE(!rep.verdicts.empty());
  CHECK(rep.all_pass());
}

TEST_CASE("malformed json reports the offending line") {
  bool threw = false;
  try {
    run_config_text("{\n  \"experiment\": \"bounds_curve\",\n  oops\n}", "unit_out/bad", "inline");
  } catch (const ConfigError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("a fixed restart index must stay inside the horizon") {
  const char* cfg = R"({
    "experiment": "bounds_curve",
    "theorem": "thm1",
    "n_from": 4, "n_to": 6,
    "r": 10,
    "m": 1,
    "rho": 0.4,
    "alpha": {"type": "geometric", "coef": 0.1, "ratio": 0.3}
  })";
  bool threw = false;
  try {
    run_config_text(cfg, "unit_out/bad_r", "inline");
  } catch (const ConfigError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("1 <= r <= n-1") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("unknown experiment and missing fields are config errors") {
  CHECK_THROWS_AS(run_config_text(R"({"experiment":"nope"})", "unit_out/x", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(run_config_text(R"({"experiment":"maps_coupling"})", "unit_out/x", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(run_config_file("unit_out/does_not_exist.json", "unit_out/x"), ConfigError);
}

TEST_CASE("the preset catalog is complete and self-describing") {
  CHECK(preset_catalog().size() == 13);
  CHECK(find_preset("doeblin-reconstruction") != nullptr);
  CHECK(find_preset("bstar-vs-mc") != nullptr);
  CHECK(find_preset("determinism") != nullptr);
  CHECK(find_preset("missing-name") == nullptr);
  for (const auto& p : preset_catalog()) {
    CHECK(!p.summary.empty());
    CHECK(!p.runtime_hint.empty());
  }
  CHECK_THROWS_AS(run_preset("missing-name", "unit_out/x"), ConfigError);
}

TEST_CASE("identical configs rerun to identical bytes") {
  std::filesystem::remove_all("unit_out/rerun_a");
  std::filesystem::remove_all("unit_out/rerun_b");
  RunReport a = run_config_text(kTinyBounds, "unit_out/rerun_a", "inline");
  RunReport b = run_config_text(kTinyBounds, "unit_out/rerun_b", "inline");
  CHECK(a.config_hash == b.config_hash);
  CHECK(slurp("unit_out/rerun_a/bounds.csv") == slurp("unit_out/rerun_b/bounds.csv"));
}
