// Acceptance suite: one criterion per invocation (or all), one PASS/FAIL line
// per criterion, nonzero exit on any failure. Each criterion runs the
// corresponding preset experiment(s) into acceptance_out/ and checks every
// verdict plus the pinned wall-clock budget.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "mixsim/experiments.hpp"
#include "mixsim/util.hpp"

namespace {

struct Criterion {
  int id;
  std::vector<std::string> presets;
  double budget_seconds;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, {"doeblin-reconstruction"}, 5.0},
      {2, {"mre-domination"}, 60.0},
      {3, {"lemma-ult-corpus"}, 10.0},
      {4, {"lemma-ult3"}, 5.0},
      {5, {"bstar-vs-mc"}, 30.0},
      {6, {"coalescence-positivity"}, 60.0},
      {7, {"backward-forward"}, 60.0},
      {8, {"alpha-domination"}, 120.0},
      {9, {"poisson-lipschitz"}, 5.0},
      {10, {"contraction-shape-ingarch", "contraction-shape-binary"}, 120.0},
      {11, {"alpha-exact-sanity"}, 10.0},
      {12, {"determinism"}, 600.0},
  };
  return all;
}

bool run_criterion(const Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  bool verdicts_ok = true;
  std::vector<std::string> failures;
  std::string names;
  std::string notes;
  try {
    for (const auto& preset : c.presets) {
      if (!names.empty()) names += " + ";
      names += preset;
      mixsim::RunReport rep =
          mixsim::run_preset(preset, "acceptance_out/criterion_" + std::to_string(c.id) + "/" +
                                         preset);
      for (const auto& v : rep.verdicts)
        if (!v.pass) {
          verdicts_ok = false;
          failures.push_back(preset + ":" + v.name + " (" + v.detail + ")");
        }
      for (const auto& [key, value] : rep.metrics)
        if (key.find("factor1_holds_fraction") != std::string::npos)
          notes =
              "; factor-1 variant holds on fraction " + mixsim::format_double(value) + " of chains";
    }
  } catch (const std::exception& e) {
    verdicts_ok = false;
    failures.push_back(std::string("exception: ") + e.what());
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_budget = wall <= c.budget_seconds;
  bool pass = verdicts_ok && in_budget;
  std::printf("%s criterion %d: %s (%.1f s, budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
              names.c_str(), wall, c.budget_seconds, notes.c_str());
  if (!in_budget) std::printf("       over budget by %.1f s\n", wall - c.budget_seconds);
  for (const auto& f : failures) std::printf("       %s\n", f.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  bool matched = false;
  for (const auto& c : criteria()) {
    if (which != 0 && c.id != which) continue;
    matched = true;
    all_pass = run_criterion(c) && all_pass;
  }
  if (!matched) {
    std::fprintf(stderr, "no such criterion: %d\n", which);
    return 2;
  }
  return all_pass ? 0 : 1;
}
