#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pmlab/entropic.hpp"
#include "pmlab/nct.hpp"
#include "pmlab/optics.hpp"
#include "pmlab/photonlab.hpp"
#include "pmlab/pmsquare.hpp"
#include "pmlab/qcore.hpp"
#include "pmlab/report.hpp"
#include "pmlab/runconfig.hpp"
#include "pmlab/seeding.hpp"
#include "pmlab/version.hpp"

namespace {

using namespace pmlab;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) pos = text.size();
    std::string item = text.substr(start, pos - start);
    if (!item.empty()) out.push_back(item);
    start = pos + 1;
  }
  return out;
}

int cmd_run(cli::RunConfig config, const std::string& config_path) {
  if (!config_path.empty()) {
    cli::apply_json_overrides(config, report::load_text(config_path));
  }
  cli::validate(config);

  photonlab::NoiseModel noise = photonlab::NoiseModel::parse(config.noise);
  photonlab::RunMode mode = photonlab::run_mode_from_string(config.mode);
  photonlab::ShotPlan plan;
  plan.shots = config.shots;
  plan.resamples = config.resamples;
  plan.master_seed = config.seed;

  photonlab::ExperimentReport rep = photonlab::run_table(
      cli::resolve_states(config), noise, plan, mode, config.threads);

  std::string text =
      config.format == "json" ? report::write_json(rep) : report::write_csv(rep);
  if (config.output.empty()) {
    std::cout << text;
  } else {
    report::save_text(config.output, text);
    std::cerr << "report written to " << config.output << "\n";
  }

  double sd_min = std::numeric_limits<double>::infinity();
  double sd_max = -std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    sd_min = std::min(sd_min, row.sd_violation);
    sd_max = std::max(sd_max, row.sd_violation);
  }
  std::cerr << "SD-of-violation over " << rep.rows.size()
            << " state(s): min=" << report::format_double(sd_min)
            << " max=" << report::format_double(sd_max) << "\n";
  return 0;
}

int cmd_verify_contexts() {
  bool ok = true;
  std::printf("context product signs:\n");
  constexpr std::array<int, 6> expected_signs = {+1, +1, +1, +1, +1, -1};
  const auto& ctxs = pmsquare::contexts();
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    int sign = pmsquare::context_product_sign(ctxs[i]);
    bool good = sign == expected_signs[i];
    ok = ok && good;
    std::printf("  %-20s %+d  %s\n", ctxs[i].name().c_str(), sign,
                good ? "ok" : "UNEXPECTED");
  }
  std::printf("commutation matrix (1 = commuting pair):\n      ");
  for (auto id : pmsquare::kAllObservables)
    std::printf("%6s", pmsquare::to_string(id).c_str());
  std::printf("\n");
  for (auto lhs : pmsquare::kAllObservables) {
    std::printf("%6s", pmsquare::to_string(lhs).c_str());
    for (auto rhs : pmsquare::kAllObservables) {
      bool commute = lhs == rhs ||
                     pmsquare::check_compatibility(std::array<pmsquare::ObservableId, 2>{
                         lhs, rhs});
      bool share = lhs == rhs;
      for (const auto& ctx : ctxs) {
        const auto& m = ctx.members();
        bool has_l = std::find(m.begin(), m.end(), lhs) != m.end();
        bool has_r = std::find(m.begin(), m.end(), rhs) != m.end();
        share = share || (has_l && has_r);
      }
      if (commute != share) ok = false;
      std::printf("%6d", commute ? 1 : 0);
    }
    std::printf("\n");
  }
  std::printf("compatibility pattern matches the six-context structure: %s\n",
              ok ? "yes" : "NO");
  return ok ? 0 : 1;
}

int cmd_verify_classical() {
  bool ok = true;
  int passed = 0;
  const auto& ctxs = pmsquare::contexts();
  for (const nct::Assignment& assign : nct::enumerate_assignments()) {
    bool good = true;
    for (const auto& ctx : ctxs) good = good && assign.context_product(ctx) == +1;
    passed += good ? 1 : 0;
    ok = ok && good;
    std::printf("A=%+d a=%+d B=%+d b=%+d -> alpha=%+d beta=%+d C=%+d c=%+d gamma=%+d  %s\n",
                assign.A, assign.a, assign.B, assign.b, assign.alpha, assign.beta,
                assign.C, assign.c, assign.gamma,
                good ? "all products +1" : "PRODUCT CONSTRAINT BROKEN");
  }
  std::printf("%d/16 assignments satisfy every context product\n", passed);
  return ok ? 0 : 1;
}

int cmd_verify_optics(const std::string& settings_path, const std::string& templates_path,
                      double jitter_sigma, std::uint64_t jitter_seed) {
  optics::SettingTable table = optics::load_setting_table(
      settings_path.empty() ? optics::default_settings_path() : settings_path);
  optics::TemplateSet templates = optics::load_templates(
      templates_path.empty() ? optics::default_templates_path() : templates_path);

  bool ok = true;
  std::printf("setting verification (operator-norm distance to the target projector):\n");
  for (const auto& r : optics::verify_all(table, templates)) {
    ok = ok && r.pass;
    std::printf("  %-6s %+d  metric %.3e  %s\n", r.measurement.c_str(), r.outcome,
                r.metric, r.pass ? "pass" : "FAIL");
  }
  if (jitter_sigma > 0.0) {
    std::printf("diagnostics with %.4g deg angle jitter (seed %llu):\n", jitter_sigma,
                static_cast<unsigned long long>(jitter_seed));
    for (const auto& row : table.rows) {
      auto rng = make_engine(jitter_seed,
                             "jitter/" + row.measurement + "/" +
                                 (row.outcome > 0 ? "+1" : "-1"));
      optics::SettingRow jittered = optics::with_jitter(row, jitter_sigma, rng);
      const optics::CircuitTemplate* tmpl =
          templates.find(optics::template_name_for(jittered));
      qcore::Operator4 effective =
          optics::effective_measurement_operator(optics::instantiate(*tmpl, jittered));
      qcore::Operator4 target = qcore::projector_pm(
          pmsquare::observable(pmsquare::observable_from_string(row.measurement)),
          row.outcome);
      Eigen::JacobiSVD<qcore::Operator4> svd(effective - target);
      std::printf("  %-6s %+d  metric %.3e\n", row.measurement.c_str(), row.outcome,
                  svd.singularValues()(0));
    }
  }
  std::printf("all rows within 1e-8: %s\n", ok ? "yes" : "NO");
  return ok ? 0 : 1;
}

int cmd_states_list() {
  for (const std::string& label : qcore::state_labels()) {
    std::printf("%-6s  %s\n", label.c_str(), qcore::state_description(label).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic-contextuality experiment simulator (four-level photonic system)"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  cli::RunConfig config;
  std::string states_arg = "all";
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Simulate the experiment and emit a report");
  run->add_option("--states", states_arg,
                  "Comma-separated state labels, or 'all' for the 26-state catalog");
  run->add_option("--shots", config.shots, "Mean photon count per measurement setting");
  run->add_option("--seed", config.seed, "Master seed for all random streams");
  run->add_option("--resamples", config.resamples,
                  "Bootstrap resamples for the uncertainty estimates (>= 100)");
  run->add_option("--noise", config.noise, "none | depol:<float> | depol:default");
  run->add_option("--mode", config.mode, "analytic | sampled");
  run->add_option("--format", config.format, "csv | json");
  run->add_option("--output", config.output, "Report path (default: stdout)");
  run->add_option("--threads", config.threads, "Worker threads for the state table");
  run->add_option("--config", config_path,
                  "JSON file whose entries override the flags above");

  CLI::App* verify = app.add_subcommand("verify", "Check structural invariants");
  std::string target;
  std::string settings_path;
  std::string templates_path;
  double jitter_sigma = 0.0;
  std::uint64_t jitter_seed = 0;
  verify->add_option("target", target, "contexts | optics | classical")
      ->required()
      ->check(CLI::IsMember({"contexts", "optics", "classical"}));
  verify->add_option("--settings", settings_path, "Waveplate setting table (CSV)");
  verify->add_option("--templates", templates_path, "Circuit template file (JSON)");
  verify->add_option("--jitter", jitter_sigma,
                     "Also print metrics with Gaussian angle jitter (degrees)");
  verify->add_option("--jitter-seed", jitter_seed, "Seed for the jitter diagnostics");

  CLI::App* states = app.add_subcommand("states", "State catalog commands");
  std::string states_action;
  states->add_option("action", states_action, "list")
      ->required()
      ->check(CLI::IsMember({"list"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (states_arg != "all") config.states = split_list(states_arg);
      return cmd_run(std::move(config), config_path);
    }
    if (verify->parsed()) {
      if (target == "contexts") return cmd_verify_contexts();
      if (target == "classical") return cmd_verify_classical();
      return cmd_verify_optics(settings_path, templates_path, jitter_sigma, jitter_seed);
    }
    return cmd_states_list();
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
