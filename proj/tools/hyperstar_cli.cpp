// Command-line front end: simulate spreading snapshots, run the closed-form
// estimator, reproduce the experiment tables, and measure noise sensitivity.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hyperstar/hyperstar.hpp"

namespace {

using namespace hyperstar;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

nlohmann::json meta_json(std::uint64_t seed) {
  return nlohmann::json{{"version", kArtifactVersion}, {"rng", kRngId}, {"seed", seed}};
}

Generator parse_generator(const std::string& s) {
  if (s == "unconstrained") return Generator::unconstrained;
  if (s == "constrained") return Generator::constrained;
  if (s == "typical") return Generator::typical;
  throw CLI::ValidationError("--generator", "expected unconstrained|constrained|typical");
}

OverlapMode parse_mode(const std::string& s) {
  if (s == "single") return OverlapMode::single;
  if (s == "multiple") return OverlapMode::multiple;
  throw CLI::ValidationError("--mode", "expected single|multiple");
}

int cmd_estimate(const std::string& in, double offset, const std::string& format,
                 const std::string& out) {
  InfectionPattern pattern = pattern_from_string(read_input(in));
  ClosedFormResult r = hyper_estimate(pattern, offset);
  std::vector<double> w;
  for (const auto& a : pattern.arms()) w.push_back(weighted_length(a));
  if (format == "json") {
    nlohmann::json j{{"arm", r.estimate.arm},
                     {"index", r.estimate.index},
                     {"ell", r.ell},
                     {"longest_arm", r.longest_arm},
                     {"weighted_lengths", w},
                     {"offset", offset},
                     {"meta", {{"version", kArtifactVersion}}}};
    write_output(out, j.dump(2) + "\n");
  } else {
    std::ostringstream ss;
    ss << "arm " << r.estimate.arm << " index " << r.estimate.index
       << (r.estimate.is_hub() ? " (hub E_0)" : "") << "\n";
    ss << "ell " << r.ell << " on arm " << r.longest_arm << " (offset " << offset << ")\n";
    ss << "weighted lengths:";
    for (double x : w) ss << ' ' << x;
    ss << "\n";
    write_output(out, ss.str());
  }
  return 0;
}

int cmd_simulate(const std::string& in, int source_arm, int source_index, int n,
                 std::uint64_t seed, const std::string& out) {
  HypertreeStar structure = pattern_from_string(read_input(in)).structure;
  validate(structure);
  SourceEstimate source{source_arm, source_index};
  Rng rng = make_rng(seed);
  SpreadResult r = simulate_spread(structure, source, n, rng);

  nlohmann::json j;
  nlohmann::json arms = nlohmann::json::array();
  if (r.hub_infected) {
    // infected prefixes seen from the hub
    for (int i = 0; i < structure.arm_count(); ++i) {
      const auto& ov = structure.arms[i].overlaps;
      arms.push_back(std::vector<int>(ov.begin(), ov.begin() + r.arm_counts[i]));
    }
    j["root"] = "hub";
  } else {
    // hub not reached: emit the infected chain re-rooted at the source,
    // inward side first
    const auto& ov = structure.arms[source_arm - 1].overlaps;
    std::vector<int> inward_side, outward_side;
    for (int step = 0; step < r.inward_count; ++step)
      inward_side.push_back(ov[source_index - 1 - step]);
    for (int step = 0; step < r.outward_count; ++step)
      outward_side.push_back(ov[source_index + step]);
    if (!inward_side.empty()) arms.push_back(inward_side);
    if (!outward_side.empty()) arms.push_back(outward_side);
    j["root"] = "source";
  }
  j["arms"] = arms;
  j["meta"] = meta_json(seed);
  j["meta"]["elapsed"] = r.elapsed;
  j["meta"]["n"] = n;
  j["meta"]["source"] = {{"arm", source_arm}, {"index", source_index}};
  write_output(out, j.dump(2) + "\n");
  return 0;
}

int cmd_experiment(const ExperimentConfig& config, const std::string& format,
                   const std::string& records_path, const std::string& out) {
  ExperimentResult res = run_experiment(config);
  if (!records_path.empty()) {
    std::ofstream rf(records_path);
    if (!rf) throw std::invalid_argument("cannot open records file: " + records_path);
    write_records_jsonl(rf, res.records);
  }
  if (format == "json") {
    nlohmann::json j = metrics_to_json(res.row);
    j["meta"] = meta_json(config.seed);
    j["meta"]["mc_trials"] = config.mc_trials;
    j["meta"]["boundary_overlap"] = kBoundaryOverlap;
    write_output(out, j.dump(2) + "\n");
  } else {
    write_output(out, metrics_csv({res.row}, config.seed, config.mc_trials));
  }
  return 0;
}

int cmd_tables(const std::vector<double>& offsets, int trials, int mc_trials,
               std::uint64_t seed, int threads, const std::string& format,
               const std::string& records_dir, const std::string& out) {
  TableSuiteResult res = table_suite(offsets, trials, mc_trials, seed, threads);
  if (!records_dir.empty()) {
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      const MetricsRow& r = res.rows[i];
      char name[128];
      std::snprintf(name, sizeof(name), "/records_%s_%s_%g.jsonl", to_string(r.generator),
                    to_string(r.mode), r.offset);
      std::ofstream rf(records_dir + name);
      if (!rf) throw std::invalid_argument("cannot write records in: " + records_dir);
      write_records_jsonl(rf, res.records[i]);
    }
  }
  if (format == "json") {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : res.rows) j["rows"].push_back(metrics_to_json(r));
    j["meta"] = meta_json(seed);
    j["meta"]["mc_trials"] = mc_trials;
    j["meta"]["boundary_overlap"] = kBoundaryOverlap;
    write_output(out, j.dump(2) + "\n");
  } else {
    write_output(out, metrics_csv(res.rows, seed, mc_trials));
  }
  return 0;
}

int cmd_sensitivity(const SensitivityConfig& config, const std::vector<NoiseKind>& kinds,
                    int trials, std::uint64_t seed, const std::string& format,
                    const std::string& out) {
  auto rows = sensitivity_report(config, kinds, trials, seed);
  if (format == "json") {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back(nlohmann::json{{"kind", to_string(r.kind)},
                                         {"m", config.fixed_m},
                                         {"mean_shift", r.mean_shift},
                                         {"std_shift", r.std_shift},
                                         {"arm_change_rate", r.arm_change_rate},
                                         {"trials", r.trials},
                                         {"seed", r.seed}});
    j["meta"] = meta_json(seed);
    j["meta"]["generator"] = to_string(config.generator);
    j["meta"]["mode"] = to_string(config.mode);
    j["meta"]["offset"] = config.offset;
    write_output(out, j.dump(2) + "\n");
  } else {
    std::string text;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# hyperstar sensitivity v%s rng=%s generator=%s mode=%s offset=%g\n",
                  kArtifactVersion, kRngId, to_string(config.generator), to_string(config.mode),
                  config.offset);
    text += buf;
    text += "kind,m,mean_shift,std_shift,arm_change_rate,trials,seed\n";
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%d,%llu\n", to_string(r.kind),
                    config.fixed_m, r.mean_shift, r.std_shift, r.arm_change_rate, r.trials,
                    static_cast<unsigned long long>(r.seed));
      text += buf;
    }
    write_output(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SI source localization on extended-star hypertrees"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "closed-form source estimate for a pattern");
  std::string est_in = "-", est_format = "text", est_out;
  double est_offset = 0.0;
  est->add_option("--in", est_in, "pattern JSON file ('-' = stdin)");
  est->add_option("--offset", est_offset, "offset added to the longest weighted length");
  est->add_option("--format", est_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  est->add_option("--out", est_out, "output file (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "spread on a structure and emit the snapshot");
  std::string sim_in = "-", sim_out;
  int sim_arm = 0, sim_index = 0, sim_n = 1;
  std::uint64_t sim_seed = 0;
  sim->add_option("--in", sim_in, "structure JSON file ('-' = stdin)");
  sim->add_option("--source-arm", sim_arm, "source arm (0 = hub)");
  sim->add_option("--source-index", sim_index, "source index within the arm (0 for hub)");
  sim->add_option("--n", sim_n, "number of infected hyperedges including the source")
      ->required();
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--out", sim_out, "output file (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "one (generator, mode, offset) comparison run");
  std::string exp_gen = "unconstrained", exp_mode = "single", exp_format = "csv";
  std::string exp_records, exp_out;
  ExperimentConfig exp_config;
  exp->add_option("--generator", exp_gen, "unconstrained|constrained|typical");
  exp->add_option("--mode", exp_mode, "single|multiple");
  exp->add_option("--offset", exp_config.offset, "estimator offset");
  exp->add_option("--trials", exp_config.trials, "number of trials");
  exp->add_option("--mc-trials", exp_config.mc_trials, "reference trials per candidate");
  exp->add_option("--seed", exp_config.seed, "RNG seed")->required();
  exp->add_option("--threads", exp_config.threads, "worker threads (0 = auto)");
  exp->add_option("--format", exp_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--records", exp_records, "write per-trial JSON lines to this file");
  exp->add_option("--out", exp_out, "output file (default stdout)");

  // tables
  auto* tab = app.add_subcommand("tables", "full table suite over offsets");
  std::vector<double> tab_offsets{0.0, 0.125, 0.16, 0.25, 0.5};
  int tab_trials = 1000, tab_mc = 10000, tab_threads = 0;
  std::uint64_t tab_seed = 0;
  std::string tab_format = "csv", tab_records_dir, tab_out;
  tab->add_option("--offsets", tab_offsets, "offset values");
  tab->add_option("--trials", tab_trials, "trials per configuration");
  tab->add_option("--mc-trials", tab_mc, "reference trials per candidate");
  tab->add_option("--seed", tab_seed, "RNG seed")->required();
  tab->add_option("--threads", tab_threads, "worker threads (0 = auto)");
  tab->add_option("--format", tab_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  tab->add_option("--records-dir", tab_records_dir, "write per-trial JSON lines per row here");
  tab->add_option("--out", tab_out, "output file (default stdout)");

  // sensitivity
  auto* sen = app.add_subcommand("sensitivity", "noise sensitivity report");
  std::string sen_kinds = "all", sen_gen = "unconstrained", sen_mode = "single";
  std::string sen_format = "csv", sen_out;
  int sen_trials = 5000, sen_m = 0;
  double sen_offset = 0.0;
  std::uint64_t sen_seed = 0;
  sen->add_option("--kinds", sen_kinds,
                  "all or comma list of missing_arm_nonlongest,missing_arm_longest,"
                  "missing_step_nonlongest,missing_step_longest");
  sen->add_option("--generator", sen_gen, "unconstrained|constrained|typical");
  sen->add_option("--mode", sen_mode, "single|multiple");
  sen->add_option("--m", sen_m, "fix the arm count (0 = any)");
  sen->add_option("--offset", sen_offset, "estimator offset");
  sen->add_option("--trials", sen_trials, "trials per kind");
  sen->add_option("--seed", sen_seed, "RNG seed")->required();
  sen->add_option("--format", sen_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sen->add_option("--out", sen_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (est->parsed()) return cmd_estimate(est_in, est_offset, est_format, est_out);
    if (sim->parsed()) return cmd_simulate(sim_in, sim_arm, sim_index, sim_n, sim_seed, sim_out);
    if (exp->parsed()) {
      exp_config.generator = parse_generator(exp_gen);
      exp_config.mode = parse_mode(exp_mode);
      return cmd_experiment(exp_config, exp_format, exp_records, exp_out);
    }
    if (tab->parsed())
      return cmd_tables(tab_offsets, tab_trials, tab_mc, tab_seed, tab_threads, tab_format,
                        tab_records_dir, tab_out);
    if (sen->parsed()) {
      SensitivityConfig config;
      config.generator = parse_generator(sen_gen);
      config.mode = parse_mode(sen_mode);
      config.offset = sen_offset;
      config.fixed_m = sen_m;
      std::vector<NoiseKind> kinds;
      if (sen_kinds == "all") {
        kinds = {NoiseKind::missing_arm_nonlongest, NoiseKind::missing_arm_longest,
                 NoiseKind::missing_step_nonlongest, NoiseKind::missing_step_longest};
      } else {
        std::stringstream ss(sen_kinds);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item == "missing_arm_nonlongest") kinds.push_back(NoiseKind::missing_arm_nonlongest);
          else if (item == "missing_arm_longest") kinds.push_back(NoiseKind::missing_arm_longest);
          else if (item == "missing_step_nonlongest") kinds.push_back(NoiseKind::missing_step_nonlongest);
          else if (item == "missing_step_longest") kinds.push_back(NoiseKind::missing_step_longest);
          else throw std::invalid_argument("unknown noise kind: " + item);
        }
      }
      return cmd_sensitivity(config, kinds, sen_trials, sen_seed, sen_format, sen_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: invalid JSON: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
