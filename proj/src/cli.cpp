#include "medeq/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "medeq/dataset.hpp"
#include "medeq/equalizer.hpp"
#include "medeq/errors.hpp"
#include "medeq/generators.hpp"
#include "medeq/report.hpp"

namespace medeq::cli {

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level level_from_env() {
  const char* v = std::getenv("EQUALIZER_LOG");
  if (!v) return Level::Info;
  const std::string s(v);
  if (s == "error") return Level::Error;
  if (s == "warn") return Level::Warn;
  if (s == "debug") return Level::Debug;
  return Level::Info;
}

void log(Level lvl, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl <= level_from_env())
    std::cerr << "[medeq " << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct DemoArgs {
  std::size_t n = 10000;
  std::uint64_t seed = 42;
  std::string out;
  std::string schema_out;
};

struct AuditArgs {
  std::string real, synthetic, schema;
  std::vector<std::string> attrs = kDefaultSubgroupKey;
  std::vector<std::string> ring_order = kDefaultRingOrder;
  std::size_t tau = 150;
  std::string out_json, out_svg, out_hist_svg;
};

struct AugmentArgs {
  std::string real, schema, generator = "chowliu", pool, strategy = "conditional";
  std::size_t tau = 150, batch_size = 50, max_attempts = 50;
  double alpha = 0.85, nu = 0.05, smoothing = kDefaultSmoothing;
  std::string gamma = "auto";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool overshoot = false;
  std::vector<std::string> key;
  std::string out, log_json, report_json;
};

struct GenerateArgs {
  std::string model_from, schema, generator = "chowliu", out;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  double smoothing = kDefaultSmoothing;
};

struct CompareArgs {
  std::string before, after, out, out_svg;
};

int run_demo(const DemoArgs& a) {
  log(Level::Info, "config: n=" + std::to_string(a.n) + " seed=" + std::to_string(a.seed));
  const Dataset d = generate_demo_cohort(demo_cohort_spec(a.n, a.seed));
  save_csv(d, a.out);
  std::filesystem::path schema_out = a.schema_out;
  if (schema_out.empty()) schema_out = std::filesystem::path(a.out).replace_extension(".schema.json");
  save_schema_json(d.schema(), schema_out);
  log(Level::Info, "wrote " + std::to_string(d.size()) + " rows to " + a.out + " and schema to " + schema_out.string());
  return kSuccess;
}

int run_audit(const AuditArgs& a) {
  const Schema schema = load_schema_json(a.schema);
  const Dataset real = load_csv(a.real, schema);
  const Dataset synth = load_csv(a.synthetic, schema);
  AuditOptions opts;
  opts.attributes = a.attrs;
  opts.ring_order = a.ring_order;
  opts.tau = a.tau;
  opts.real_id = std::filesystem::path(a.real).filename().string();
  opts.synthetic_id = std::filesystem::path(a.synthetic).filename().string();
  opts.config = {{"attributes", a.attrs}, {"ring_order", a.ring_order}, {"tau", a.tau}};
  log(Level::Info, "config: attrs=" + join(a.attrs) + " ring_order=" + join(a.ring_order) +
                       " tau=" + std::to_string(a.tau));
  const AuditReport r = build_audit(real, synth, opts);
  if (!a.out_json.empty()) emit_audit_json(r, a.out_json);
  if (!a.out_svg.empty()) render_sunburst_svg(r.sunburst, r.schema, a.out_svg);
  if (!a.out_hist_svg.empty()) render_histogram_svg({{opts.synthetic_id, r.histogram}}, a.out_hist_svg);
  std::string summary;
  for (Tier t : kAllTiers) summary += " " + std::string(tier_name(t)) + "=" + std::to_string(r.histogram[t]);
  log(Level::Info, "tiers:" + summary);
  return kSuccess;
}

int run_augment(const AugmentArgs& a) {
  const Schema schema = load_schema_json(a.schema);
  const Dataset real = load_csv(a.real, schema);

  EqualizerConfig cfg;
  cfg.tau = a.tau;
  cfg.batch_size = a.batch_size;
  cfg.alpha = a.alpha;
  cfg.max_attempts = a.max_attempts;
  cfg.master_seed = a.seed;
  cfg.subgroup_key = a.key;
  cfg.overshoot = a.overshoot;
  cfg.nu = a.nu;
  cfg.jobs = a.jobs;
  if (a.gamma != "auto") {
    try {
      cfg.gamma = std::stod(a.gamma);
    } catch (const std::exception&) {
      throw DataError("gamma must be a number or 'auto'");
    }
  }
  cfg.strategy = a.strategy == "per-subgroup" ? Strategy::PerSubgroup : Strategy::Conditional;

  std::unique_ptr<Generator> gen;
  if (a.generator == "external") {
    if (a.pool.empty()) throw DataError("--generator external requires --pool");
    gen = std::make_unique<ExternalPool>(schema, a.pool);
  } else {
    gen = make_generator(a.generator, a.smoothing);
  }

  log(Level::Info, "config: tau=" + std::to_string(cfg.tau) + " batch_size=" + std::to_string(cfg.batch_size) +
                       " alpha=" + fmt_double(cfg.alpha) + " seed=" + std::to_string(cfg.master_seed) +
                       " generator=" + a.generator + " strategy=" + std::string(strategy_name(cfg.strategy)) +
                       " max_attempts=" + std::to_string(cfg.max_attempts) + " nu=" + fmt_double(cfg.nu) +
                       " gamma=" + a.gamma + " jobs=" + std::to_string(cfg.jobs) +
                       (cfg.overshoot ? " overshoot=on" : ""));

  const AugmentationResult result = run(real, *gen, cfg);
  save_csv(result.augmented, a.out);

  const auto log_json = augmentation_log_json(result, schema);
  if (!a.log_json.empty()) write_text(a.log_json, canonical_dump(log_json));
  if (!a.report_json.empty()) {
    nlohmann::json rep = {
        {"tool_version", kToolVersion},
        {"config", log_json.at("config")},
        {"before", coverage_to_json(coverage_report(real, cfg.tau, result.key), schema)},
        {"after", coverage_to_json(coverage_report(result.augmented, cfg.tau, result.key), schema)},
        {"summary", log_json.at("summary")},
    };
    write_text(a.report_json, canonical_dump(rep));
  }

  std::size_t partial = 0;
  for (const auto& l : result.logs) {
    if (l.status == SubgroupStatus::Partial) {
      ++partial;
      log(Level::Warn, "partial: " + l.pattern.to_string(schema) + " accepted " +
                           std::to_string(l.final_accepted_count) + " of gap " + std::to_string(l.gap));
    } else {
      log(Level::Debug, "filled: " + l.pattern.to_string(schema) + " gap " + std::to_string(l.gap) +
                            " in " + std::to_string(l.attempts) + " attempts");
    }
  }
  log(Level::Info, std::to_string(result.logs.size()) + " underrepresented subgroups, " +
                       std::to_string(result.accepted.size()) + " synthetic records accepted, " +
                       std::to_string(partial) + " partial");
  return partial > 0 ? kPartialAugmentation : kSuccess;
}

int run_generate(const GenerateArgs& a) {
  const Schema schema = load_schema_json(a.schema);
  const Dataset d = load_csv(a.model_from, schema);
  log(Level::Info, "config: generator=" + a.generator + " n=" + std::to_string(a.n) +
                       " seed=" + std::to_string(a.seed) + " smoothing=" + fmt_double(a.smoothing));
  auto gen = make_generator(a.generator, a.smoothing);
  gen->fit(d);
  const auto batch = gen->sample(a.n, a.seed);
  save_csv(Dataset(schema, batch.records), a.out);
  return kSuccess;
}

int run_compare(const CompareArgs& a) {
  const AuditReport before = read_audit_json(a.before);
  const AuditReport after = read_audit_json(a.after);
  const ComparisonReport c = compare_reports(before, after);
  auto j = comparison_to_json(c);
  j["config"] = {{"before", a.before}, {"after", a.after}};
  write_text(a.out, canonical_dump(j));
  if (!a.out_svg.empty()) render_histogram_svg({{"before", c.before}, {"after", c.after}}, a.out_svg);
  std::string summary;
  for (Tier t : kAllTiers) summary += " " + std::string(tier_name(t)) + "=" + std::to_string(c.delta(t));
  log(Level::Info, "deltas:" + summary + "; " + std::to_string(c.transitions.size()) + " transitions");
  return kSuccess;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Subgroup representation audit and fairness-aware augmentation for synthetic tabular data",
               "medeq"};
  app.require_subcommand(1);

  DemoArgs demo;
  auto* demo_cmd = app.add_subcommand("demo-data", "Write a seeded demo cohort CSV and its schema");
  demo_cmd->add_option("--n", demo.n, "Rows")->capture_default_str();
  demo_cmd->add_option("--seed", demo.seed, "Seed")->capture_default_str();
  demo_cmd->add_option("--out", demo.out, "Output CSV")->required();
  demo_cmd->add_option("--schema-out", demo.schema_out, "Schema JSON (default: <out>.schema.json)");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Log-disparity audit of synthetic vs real data");
  audit_cmd->add_option("--real", audit.real)->required();
  audit_cmd->add_option("--synthetic", audit.synthetic)->required();
  audit_cmd->add_option("--schema", audit.schema)->required();
  audit_cmd->add_option("--attrs", audit.attrs, "Subgroup attributes")->delimiter(',')->capture_default_str();
  audit_cmd->add_option("--ring-order", audit.ring_order, "Sunburst rings, inner first")->delimiter(',')->capture_default_str();
  audit_cmd->add_option("--tau", audit.tau, "Coverage threshold")->capture_default_str();
  audit_cmd->add_option("--out-json", audit.out_json);
  audit_cmd->add_option("--out-svg", audit.out_svg, "Sunburst SVG");
  audit_cmd->add_option("--out-hist-svg", audit.out_hist_svg, "Tier histogram SVG");

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment", "Fill underrepresented subgroups with filtered synthetic records");
  aug_cmd->add_option("--real", aug.real)->required();
  aug_cmd->add_option("--schema", aug.schema)->required();
  aug_cmd->add_option("--tau", aug.tau)->capture_default_str();
  aug_cmd->add_option("--batch-size", aug.batch_size)->capture_default_str();
  aug_cmd->add_option("--alpha", aug.alpha)->capture_default_str();
  aug_cmd->add_option("--generator", aug.generator)
      ->check(CLI::IsMember({"marginals", "cond-empirical", "chowliu", "external"}))
      ->capture_default_str();
  aug_cmd->add_option("--pool", aug.pool, "Synthetic pool CSV for --generator external");
  aug_cmd->add_option("--strategy", aug.strategy)
      ->check(CLI::IsMember({"conditional", "per-subgroup"}))
      ->capture_default_str();
  aug_cmd->add_option("--seed", aug.seed)->capture_default_str();
  aug_cmd->add_option("--max-attempts", aug.max_attempts)->capture_default_str();
  aug_cmd->add_option("--nu", aug.nu)->capture_default_str();
  aug_cmd->add_option("--gamma", aug.gamma, "RBF width or 'auto' (1/dimension)")->capture_default_str();
  aug_cmd->add_option("--smoothing", aug.smoothing)->capture_default_str();
  aug_cmd->add_option("--key", aug.key, "Subgroup key columns (default: protected columns)")->delimiter(',');
  aug_cmd->add_option("--jobs", aug.jobs, "Subgroups processed in parallel")->capture_default_str();
  aug_cmd->add_flag("--overshoot", aug.overshoot, "Keep whole accepted batches");
  aug_cmd->add_option("--out", aug.out)->required();
  aug_cmd->add_option("--log-json", aug.log_json);
  aug_cmd->add_option("--report-json", aug.report_json, "Coverage before/after");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Fit a generator on a dataset and sample from it");
  gen_cmd->add_option("--model-from", gen.model_from, "Training CSV")->required();
  gen_cmd->add_option("--schema", gen.schema)->required();
  gen_cmd->add_option("--generator", gen.generator)
      ->check(CLI::IsMember({"marginals", "cond-empirical", "chowliu"}))
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--smoothing", gen.smoothing)->capture_default_str();
  gen_cmd->add_option("--out", gen.out)->required();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Tier deltas and transitions between two audit reports");
  cmp_cmd->add_option("--before", cmp.before)->required();
  cmp_cmd->add_option("--after", cmp.after)->required();
  cmp_cmd->add_option("--out", cmp.out)->required();
  cmp_cmd->add_option("--out-svg", cmp.out_svg, "Before/after tier histogram SVG");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*demo_cmd) return run_demo(demo);
    if (*audit_cmd) return run_audit(audit);
    if (*aug_cmd) return run_augment(aug);
    if (*gen_cmd) return run_generate(gen);
    if (*cmp_cmd) return run_compare(cmp);
  } catch (const DataError& e) {
    log(Level::Error, e.what());
    return kDataError;
  } catch (const SolverError& e) {
    log(Level::Error, e.what());
    return kDataError;
  }
  return kUsageError;
}

int parse_and_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return parse_and_dispatch(args);
}

}  // namespace medeq::cli
