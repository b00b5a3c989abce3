// Command line front end: named scenarios and ad-hoc runs on preset systems.

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wiss/scenarios.hpp"

namespace {

struct Flags {
  std::optional<double> dt, horizon;
  std::optional<std::string> p;
  std::optional<long> truncation;
  std::uint64_t seed = 1;
  std::string out;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dt", f.dt, "time step (input grid and spatial step)")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "simulation horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--truncation", f.truncation, "state dimension N of truncated systems")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "seed of the sample streams");
  cmd->add_option("--p", f.p, "input norm exponent, a number >= 1 or 'inf'");
  cmd->add_option("--out", f.out, "output directory");
}

wiss::ScenarioParams to_params(const Flags& f) {
  wiss::ScenarioParams prm;
  prm.dt = f.dt;
  prm.horizon = f.horizon;
  prm.seed = f.seed;
  if (f.truncation) prm.truncation = static_cast<Eigen::Index>(*f.truncation);
  if (f.p) {
    if (*f.p == "inf" || *f.p == "infinity") {
      prm.p = std::numeric_limits<double>::infinity();
    } else {
      std::size_t used = 0;
      const double v = std::stod(*f.p, &used);
      if (used != f.p->size() || !(v >= 1.0)) throw std::invalid_argument("--p must be >= 1 or 'inf'");
      prm.p = v;
    }
  }
  return prm;
}

std::string dir_name(std::string s) {
  for (auto& c : s)
    if (c == ' ') c = '_';
  return s;
}

int finish(const wiss::ScenarioReport& rep, const Flags& f) {
  const std::string out = f.out.empty() ? "runs/" + dir_name(rep.name) : f.out;
  wiss::write_artifacts(rep, out);
  std::cout << rep.name << '\n';
  for (const auto& a : rep.assertions)
    std::cout << (a.passed ? "  PASS " : "  FAIL ") << a.name << (a.detail.empty() ? "" : ": " + a.detail) << '\n';
  std::cout << "artifacts: " << out << '\n';
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wisslab: weak, strong and uniform input-to-state stability experiments"};
  app.require_subcommand(1);

  Flags flags;
  std::string name, system = "ex41";
  int (*action)(const std::string&, const Flags&) = nullptr;

  auto* scenario = app.add_subcommand("scenario", "named scenarios");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "print the scenario catalog");
  list->callback([] {
    for (const auto& s : wiss::list()) std::cout << s.name << "  " << s.summary << '\n';
  });
  auto* run = scenario->add_subcommand("run", "run one scenario and write its artifacts");
  run->add_option("name", name, "scenario name")->required();
  add_flags(run, flags);
  run->callback([&] {
    action = [](const std::string& n, const Flags& f) { return finish(wiss::run(n, to_params(f)), f); };
  });

  struct Adhoc {
    const char* cmd;
    const char* help;
    wiss::ScenarioReport (*fn)(const std::string&, const wiss::ScenarioParams&);
  };
  static const Adhoc adhoc[] = {
      {"simulate", "simulate a preset system and write its trajectory", wiss::run_simulate},
      {"envelope", "build and verify the decay envelope of a preset trajectory", wiss::run_envelope},
      {"falsify", "search for counterexamples on a preset system", wiss::run_falsify},
      {"axioms", "check the flow axioms on seeded samples", wiss::run_axioms},
  };
  const Adhoc* chosen = nullptr;
  for (const auto& a : adhoc) {
    auto* cmd = app.add_subcommand(a.cmd, a.help);
    cmd->add_option("--system", system, "preset: ex41, prop41, prop42, ex43, ex51, prop51")
        ->check(CLI::IsMember(wiss::preset_names()));
    add_flags(cmd, flags);
    cmd->callback([&chosen, &a] { chosen = &a; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (action) return action(name, flags);
    if (chosen) return finish(chosen->fn(system, to_params(flags)), flags);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
