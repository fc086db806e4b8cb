// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "medeq/cli.hpp"
#include "medeq/disparity.hpp"
#include "medeq/equalizer.hpp"
#include "medeq/filter.hpp"
#include "medeq/report.hpp"
#include "medeq/subgroups.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace medeq;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failing check and keeps counting the rest.
struct Checker {
  Outcome out;
  std::size_t failures = 0;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) out.detail = what;
    out.pass = false;
  }
  Outcome finish(const std::string& summary) {
    if (out.pass)
      out.detail = summary;
    else
      out.detail += " (" + std::to_string(failures) + " failing checks); " + summary;
    return out;
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

int quiet_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "medeq");
  std::stringstream sink;
  auto* old = std::cerr.rdbuf(sink.rdbuf());
  const int code = cli::parse_and_dispatch(args);
  std::cerr.rdbuf(old);
  return code;
}

// Shared state of the demo-cohort augmentation run.
struct DemoRun {
  testutil::TempDir dir;
  bool ready = false;
  int exit_code = -1;
  double seconds = 0.0;
  Schema schema;
  Dataset real;
  Dataset augmented;
  json log;

  std::vector<std::string> augment_args(const std::string& suffix, int jobs) const {
    return {"augment",   (dir / "d.csv").string(),
            "--schema",  (dir / "d.schema.json").string(),
            "--tau",     "150",
            "--batch-size", "50",
            "--alpha",   "0.85",
            "--generator", "chowliu",
            "--strategy", "conditional",
            "--seed",    "42",
            "--jobs",    std::to_string(jobs),
            "--out",     (dir / ("aug" + suffix + ".csv")).string(),
            "--log-json", (dir / ("log" + suffix + ".json")).string(),
            "--report-json", (dir / ("report" + suffix + ".json")).string()};
  }

  void prepare() {
    if (ready) return;
    ready = true;
    quiet_cli({"demo-data", "--n", "10000", "--seed", "42", "--out", (dir / "d.csv").string()});
    schema = load_schema_json(dir / "d.schema.json");
    real = load_csv(dir / "d.csv", schema);
    auto args = augment_args("", 1);
    args.insert(args.begin() + 1, "--real");
    const auto t0 = std::chrono::steady_clock::now();
    exit_code = quiet_cli(args);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    augmented = load_csv(dir / "aug.csv", schema);
    log = json::parse(slurp(dir / "log.json"));
  }
};

DemoRun& demo() {
  static DemoRun run;
  run.prepare();
  return run;
}

// ---- criteria ---------------------------------------------------------------------

Outcome metric_exactness() {
  Checker c;
  const double l8 = std::log(0.8), l9 = std::log(0.9);
  const std::vector<std::pair<double, Tier>> values = {
      {0.0, Tier::Adequate},     {l9, Tier::Adequate},       {-l9, Tier::Adequate},
      {l8, Tier::Under},         {-l8, Tier::Over},          {0.15, Tier::Over},
      {-0.15, Tier::Under},      {0.30, Tier::HighlyOver},   {-0.30, Tier::HighlyUnder},
      {0.69, Tier::HighlyOver},  {-0.69, Tier::HighlyUnder},
  };
  for (const auto& [v, expected] : values) {
    c.expect(classify_tier(v) == expected, "classify_tier(" + fmt(v, 17) + ") = " +
                                               std::string(tier_name(classify_tier(v))));
    // base-10 values against base-10 thresholds
    c.expect(classify_tier(v / std::log(10.0), LogBase::Ten) == expected || std::abs(std::abs(v) + l9) < 1e-15 ||
                 std::abs(std::abs(v) + l8) < 1e-15,
             "base-10 tier differs at " + fmt(v));
  }
  // proportions whose ratio is exact in binary: p_r = 0.5, p_s = 0.5 r
  const std::vector<std::pair<double, Tier>> ratios = {{1.0, Tier::Adequate},   {0.9, Tier::Adequate},
                                                       {0.8, Tier::Under},      {0.5, Tier::HighlyUnder},
                                                       {1.5, Tier::HighlyOver}, {1.2, Tier::Over}};
  for (const auto& [r, expected] : ratios) {
    const auto d = log_disparity(0.5 * r, 0.5);
    c.expect(d.defined() && d.value == std::log(r), "log_disparity ratio " + fmt(r));
    c.expect(classify_tier(d) == expected, "tier of ratio " + fmt(r));
  }
  c.expect(classify_tier(log_disparity(0.1, 0.0)) == Tier::AbsentInReal, "p_r = 0");
  c.expect(classify_tier(log_disparity(0.0, 0.1)) == Tier::AbsentInSynthetic, "p_s = 0");
  c.expect(classify_tier(log_disparity(0.0, 0.0)) == Tier::AbsentInReal, "both zero");
  return c.finish("11 defined values + 6 exact ratios + 3 undefined cases");
}

Outcome coverage_contract() {
  auto& run = demo();
  Checker c;
  c.expect(run.exit_code == 0, "augment exit code " + std::to_string(run.exit_code));
  c.expect(run.seconds < 120.0, "runtime " + fmt(run.seconds) + " s");
  const auto counts = oracle::group_by(run.augmented, {"gender", "race", "age"});
  const auto& subgroups = run.log.at("subgroups");
  std::size_t filled = 0;
  for (const auto& s : subgroups) {
    if (s.at("status") != "filled") continue;
    ++filled;
    const auto& p = s.at("pattern");
    const oracle::Labels key = {p.at("gender"), p.at("race"), p.at("age")};
    const auto it = counts.find(key);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    c.expect(n >= 150, "filled subgroup count " + std::to_string(n) + " < 150");
  }
  c.expect(subgroups.size() >= 10, "only " + std::to_string(subgroups.size()) + " subgroups needed augmentation");
  const auto uncovered = oracle::uncovered_full(run.real, 150, {"gender", "race", "age"});
  c.expect(uncovered.size() == subgroups.size(), "subgroup list differs from group-by oracle");
  c.expect(run.augmented.size() == run.real.size() + run.log.at("accepted").size(), "|D_aug| != |D| + |A|");
  return c.finish(std::to_string(subgroups.size()) + " subgroups augmented, " + std::to_string(filled) +
                  " filled, runtime " + fmt(run.seconds, 3) + " s");
}

Outcome directional_fairness() {
  auto& run = demo();
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  ChowLiuGenerator base, aug;
  base.fit(run.real);
  aug.fit(run.augmented);
  AuditOptions opts;
  std::size_t wins = 0;
  std::string summary;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset sb(run.schema, base.sample(10000, seed).records);
    const Dataset sa(run.schema, aug.sample(10000, seed).records);
    const auto hb = build_audit(run.real, sb, opts).histogram;
    const auto ha = build_audit(run.real, sa, opts).histogram;
    const bool ok = ha.extremes() <= hb.extremes() && ha[Tier::Adequate] >= hb[Tier::Adequate];
    wins += ok;
    summary += " seed " + std::to_string(seed) + ": extremes " + std::to_string(hb.extremes()) + "->" +
               std::to_string(ha.extremes()) + ", adequate " + std::to_string(hb[Tier::Adequate]) + "->" +
               std::to_string(ha[Tier::Adequate]) + (ok ? " ok;" : " worse;");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(wins >= 2, "improvement in " + std::to_string(wins) + " of 3 seeds");
  c.expect(secs < 300.0, "runtime " + fmt(secs) + " s");
  return c.finish(summary.substr(1));
}

Outcome filter_soundness() {
  auto& run = demo();
  Checker c;
  const Encoder enc(run.schema);
  const auto& cfg = run.log.at("config");
  OcsvmParams op;
  op.nu = cfg.at("nu").get<double>();
  const auto ocsvm = train_ocsvm(run.real, enc, op);
  c.expect(ocsvm.rho == run.log.at("ocsvm").at("rho").get<double>(), "OCSVM retrain differs from logged rho");
  ChowLiuGenerator g;
  g.fit(run.real);
  const double alpha = cfg.at("alpha").get<double>();

  std::size_t accepted_rows = 0, batches = 0, replayed = 0;
  const auto& acc = run.log.at("accepted");
  for (const auto& a : acc) {
    std::vector<std::string> labels;
    for (const auto& col : run.schema.columns()) labels.push_back(a.at("record").at(col.name));
    const Record r = record_from_labels(run.schema, labels);
    c.expect(ocsvm.decision(enc.encode(r)) >= 0.0, "accepted record with negative OCSVM decision");
    ++accepted_rows;
  }
  std::size_t cursor = 0;
  for (const auto& s : run.log.at("subgroups")) {
    const Pattern p = Pattern::from_json(run.schema, s.at("pattern"));
    const Dataset reference = subset_by_pattern(run.real, Pattern::from_json(run.schema, s.at("reference")));
    for (const auto& b : s.at("batches")) {
      ++batches;
      const std::string outcome = b.at("outcome");
      if (outcome == "accepted") c.expect(b.at("auc").get<double>() <= alpha, "accepted batch with AUC > alpha");
      if (outcome == "rejected_auc") c.expect(b.at("auc").get<double>() > alpha, "AUC-rejected batch with AUC <= alpha");
      if (outcome == "rejected_distribution") c.expect(b.at("valid") == 0, "distribution rejection with valid rows");

      const auto batch = g.sample(cfg.at("batch_size").get<std::size_t>(), b.at("sample_seed").get<std::uint64_t>(), p);
      const auto v = evaluate_batch(reference, batch, ocsvm, alpha, enc, b.at("eval_seed").get<std::uint64_t>());
      c.expect(v.s_valid.size() == b.at("valid").get<std::size_t>(), "replayed valid count differs");
      c.expect(v.auc.has_value() == !b.at("auc").is_null() && (!v.auc || *v.auc == b.at("auc").get<double>()),
               "replayed AUC differs");
      const std::size_t appended = b.at("appended");
      for (std::size_t i = 0; i < appended && cursor < acc.size(); ++i, ++cursor) {
        std::vector<std::string> labels;
        for (const auto& col : run.schema.columns()) labels.push_back(acc[cursor].at("record").at(col.name));
        c.expect(i < v.s_valid.size() && record_from_labels(run.schema, labels) == v.s_valid[i],
                 "accepted record differs from replayed batch");
      }
      ++replayed;
    }
  }
  c.expect(cursor == acc.size(), "accepted list longer than replayed appends");
  return c.finish(std::to_string(accepted_rows) + " accepted records, " + std::to_string(replayed) + "/" +
                  std::to_string(batches) + " batches replayed exactly");
}

Outcome auc_oracle() {
  Checker c;
  Engine eng(2024);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> pos(1 + uniform_index(eng, 10)), neg(1 + uniform_index(eng, 10));
    // coarse grid forces ties
    for (auto& v : pos) v = static_cast<double>(uniform_index(eng, 8)) / 7.0;
    for (auto& v : neg) v = static_cast<double>(uniform_index(eng, 8)) / 7.0;
    const auto [num, den] = oracle::auc_rational(pos, neg);
    const double got = compute_auc(pos, neg);
    // both sides are one correctly rounded division of the same rational
    c.expect(got == static_cast<double>(num) / static_cast<double>(den), "instance " + std::to_string(t));
  }
  return c.finish("200 instances equal the pair-enumeration rational exactly");
}

Outcome ocsvm_properties() {
  Checker c;
  Engine eng(77);
  auto random_x = [&](std::size_t m) {
    const std::vector<std::size_t> cards = {2, 5, 4, 2, 3};
    FeatureMatrix x(m, 16);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t off = 0;
      for (auto k : cards) {
        x.row(i)[off + uniform_index(eng, k)] = 1.0;
        off += k;
      }
    }
    return x;
  };
  double worst_kkt = 0.0, worst_sum = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto x = random_x(8 + uniform_index(eng, 40));
    OcsvmParams p;
    p.nu = 0.05 + 0.6 * uniform01(eng);
    const auto m = train_ocsvm(x, p);
    const double sum = std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    for (double a : m.alpha) c.expect(a >= 0.0 && a <= m.upper_bound * (1 + 1e-12), "alpha outside box");
    const std::vector<double> upper(x.rows, m.upper_bound);
    worst_kkt = std::max(worst_kkt, kkt_violation(x, m.alpha, upper, m.gamma));
  }
  c.expect(worst_sum <= 1e-6, "sum alpha off by " + fmt(worst_sum));
  c.expect(worst_kkt <= 1e-4, "KKT residual " + fmt(worst_kkt));

  double worst_obj = 0.0;
  std::size_t qp = 0;
  while (qp < 10) {
    const std::size_t m = 3 + uniform_index(eng, 3);
    const auto x = random_x(m);
    bool distinct = true;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) distinct = distinct && kernels::squared_distance(x.row(i), x.row(j)) > 0;
    if (!distinct) continue;
    ++qp;
    const double gamma = 0.05 + 0.5 * uniform01(eng), nu = 0.3 + 0.5 * uniform01(eng);
    const double ub = 1.0 / (nu * static_cast<double>(m));
    const std::vector<double> upper(m, ub);
    const auto sol = solve_one_class_dual(x, upper, gamma, {});
    std::vector<std::vector<double>> q(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) q[i][j] = std::exp(-gamma * kernels::squared_distance(x.row(i), x.row(j)));
    worst_obj = std::max(worst_obj, std::abs(sol.objective - oracle::box_simplex_qp_min(q, ub)));
  }
  c.expect(worst_obj <= 1e-4, "objective gap " + fmt(worst_obj));

  std::string fractions;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset d = generate_demo_cohort(demo_cohort_spec(200, seed));
    const Encoder enc(d.schema());
    const auto m = train_ocsvm(d, enc);
    const auto f = m.decisions(enc.encode_all(d.rows()));
    const double frac = static_cast<double>(std::count_if(f.begin(), f.end(), [](double v) { return v < 0; })) / 200.0;
    c.expect(frac <= m.nu + 0.05, "outlier fraction " + fmt(frac));
    fractions += (fractions.empty() ? "" : "/") + fmt(frac, 3);
  }
  return c.finish("max |sum-1| " + fmt(worst_sum, 2) + ", max KKT " + fmt(worst_kkt, 2) + ", max QP gap " +
                  fmt(worst_obj, 2) + ", outlier fractions " + fractions);
}

Outcome subgroup_oracles() {
  Checker c;
  std::size_t instances = 0;
  for (const auto& cards : {std::vector<std::size_t>{2, 2, 2}, std::vector<std::size_t>{2, 3, 4}}) {
    const Schema s = testutil::make_schema(cards, {3});
    const auto key = testutil::protected_names(s);
    for (std::uint64_t i = 0; i < 100; ++i) {
      ++instances;
      Engine eng(mix_seed(cards.back(), i));
      const Dataset d = testutil::random_dataset(s, uniform_index(eng, 120), eng());
      const std::size_t tau = 1 + uniform_index(eng, 12);
      std::set<std::pair<oracle::NamedPattern, std::size_t>> got;
      for (const auto& u : uncovered_combinations(d, tau)) got.insert({oracle::named(s, u.pattern), u.count});
      c.expect(got == oracle::uncovered_full(d, tau, key), "uncovered_combinations mismatch");
      c.expect(oracle::named_set(s, enumerate_mups(d, tau).patterns) == oracle::mups(d, tau, key), "MUP mismatch");
    }
  }
  return c.finish(std::to_string(instances) + " instances, exact set equality");
}

Outcome logistic_gradient() {
  Checker c;
  Engine eng(31);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 6 + uniform_index(eng, 60), dim = 3 + uniform_index(eng, 20);
    FeatureMatrix x(n, dim);
    for (auto& v : x.data) v = uniform01(eng) < 0.3 ? 1.0 : 0.0;
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(uniform_index(eng, 2));
    const double lambda = 0.1 + 2 * uniform01(eng);
    const LogisticObjective obj(x, y, lambda);
    std::vector<double> w(dim), gw(dim);
    for (auto& v : w) v = 3 * uniform01(eng) - 1.5;
    const double b = 2 * uniform01(eng) - 1;
    const double gb = obj.gradient(w, b, gw);
    const double h = 1e-5;
    worst = std::max(worst, std::abs(gb - (obj.value(w, b + h) - obj.value(w, b - h)) / (2 * h)));
    for (std::size_t k = 0; k < dim; ++k) {
      auto wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      worst = std::max(worst, std::abs(gw[k] - (obj.value(wp, b) - obj.value(wm, b)) / (2 * h)));
    }
  }
  c.expect(worst <= 1e-4, "max component error " + fmt(worst));
  return c.finish("max component error " + fmt(worst, 3) + " over 20 instances");
}

Outcome determinism() {
  auto& run = demo();
  Checker c;
  for (const auto& [suffix, jobs] : std::vector<std::pair<std::string, int>>{{"_rerun", 1}, {"_jobs4", 4}}) {
    auto args = run.augment_args(suffix, jobs);
    args.insert(args.begin() + 1, "--real");
    c.expect(quiet_cli(args) == run.exit_code, "exit code differs for " + suffix);
    for (const auto& [base, ext] : std::vector<std::pair<std::string, std::string>>{
             {"aug", ".csv"}, {"log", ".json"}, {"report", ".json"}}) {
      c.expect(slurp(run.dir / (base + ext)) == slurp(run.dir / (base + suffix + ext)),
               base + ext + " differs for " + suffix);
    }
  }
  return c.finish("aug.csv, log json and report json byte-identical across two --jobs 1 runs and --jobs 4");
}

// Random label text including CSV-hostile characters.
std::string fuzz_label(Engine& eng) {
  static const std::vector<std::string> atoms = {"a", "B", "7", " ", ",", "\"", "\n", "\r\n", "-", "<=", "é", "_", "x y", "''"};
  std::string s;
  const std::size_t len = uniform_index(eng, 6);
  for (std::size_t i = 0; i < len; ++i) s += atoms[uniform_index(eng, atoms.size())];
  return s;
}

Schema fuzz_schema(Engine& eng) {
  std::vector<ColumnSpec> cols;
  std::set<std::string> names;
  const std::size_t k = 1 + uniform_index(eng, 5);
  while (cols.size() < k) {
    ColumnSpec col;
    col.name = fuzz_label(eng) + std::to_string(cols.size());
    if (!names.insert(col.name).second) continue;
    std::set<std::string> seen;
    const std::size_t card = 1 + uniform_index(eng, 4);
    while (col.values.size() < card) {
      auto v = fuzz_label(eng);
      if (seen.insert(v).second) col.values.push_back(v);
    }
    col.is_protected = uniform01(eng) < 0.6;
    cols.push_back(col);
  }
  if (std::none_of(cols.begin(), cols.end(), [](const auto& c) { return c.is_protected; })) cols[0].is_protected = true;
  return Schema(cols);
}

// Same report with disparity values rounded as they are on output.
void round_values(SunburstNode& n) {
  if (n.record.value.defined()) n.record.value.value = round6(n.record.value.value);
  for (auto& ch : n.children) round_values(ch);
}

Outcome round_trips() {
  Checker c;
  testutil::TempDir dir;
  Engine eng(500);
  for (int t = 0; t < 500; ++t) {
    const Schema s = fuzz_schema(eng);
    const Dataset d = testutil::random_dataset(s, uniform_index(eng, 40), eng());
    save_csv(d, dir / "f.csv");
    c.expect(load_csv(dir / "f.csv", s) == d, "CSV round-trip case " + std::to_string(t));
    c.expect(schema_from_json(schema_to_json(s)) == s, "schema json case " + std::to_string(t));

    const Dataset real = testutil::random_dataset(s, 1 + uniform_index(eng, 60), eng());
    const Dataset synth = testutil::random_dataset(s, 1 + uniform_index(eng, 60), eng());
    AuditOptions opts;
    opts.attributes = testutil::protected_names(s);
    opts.ring_order = s.names();
    opts.tau = 1 + uniform_index(eng, 10);
    opts.config = {{"case", t}};
    AuditReport r = build_audit(real, synth, opts);
    emit_audit_json(r, dir / "r.json");
    const auto back = read_audit_json(dir / "r.json");
    emit_audit_json(back, dir / "r2.json");
    c.expect(slurp(dir / "r.json") == slurp(dir / "r2.json"), "report re-emission differs case " + std::to_string(t));
    for (auto& rec : r.table)
      if (rec.value.defined()) rec.value.value = round6(rec.value.value);
    round_values(r.sunburst);
    c.expect(back == r, "parsed report differs case " + std::to_string(t));
  }
  return c.finish("500 fuzzed schemas: CSV, schema JSON and audit JSON round-trips");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 metric exactness", metric_exactness},
      {"2 coverage contract", coverage_contract},
      {"3 directional fairness improvement", directional_fairness},
      {"4 filter soundness", filter_soundness},
      {"5 AUC oracle", auc_oracle},
      {"6 OCSVM properties", ocsvm_properties},
      {"7 subgroup oracles", subgroup_oracles},
      {"8 logistic gradient check", logistic_gradient},
      {"9 determinism", determinism},
      {"10 round-trips", round_trips},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (name.rfind("1 ", 0) == 0 && secs >= 1.0) o = {false, "runtime " + fmt(secs) + " s; " + o.detail};
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << " [" << fmt(secs, 3) << " s]: " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
