// hwmf: phase1 / phase2 / check / tables driver around a JSON job config.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "hwmf/config.hpp"
#include "hwmf/harness.hpp"
#include "hwmf/persist.hpp"
#include "hwmf/solver.hpp"
#include "json.hpp"

using namespace hwmf;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out_dir;
  int threads = 0;
  bool quiet = false;
};

std::string out_path(const Common& c, const std::string& p) {
  if (c.out_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(c.out_dir) / p).string();
}

ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  auto t0 = std::chrono::steady_clock::now();
  return [t0](const std::string& msg) {
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "[" << std::fixed << std::setprecision(1) << s << "s] " << msg << std::endl;
  };
}

json load_report(const std::string& path) {
  if (!std::filesystem::exists(path)) return json::object();
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error&) {
    return json::object();  // stale or partial report; rebuilt below
  }
}

void write_outputs(const Common& c, const JobConfig& cfg, const CoefficientTable& t) {
  save_table(t, out_path(c, cfg.outputs.table));
  write_text_file(out_path(c, cfg.outputs.csv), table_to_csv(t));
}

int cmd_phase1(const Common& c) {
  JobConfig cfg = load_job_config(c.config);
  auto progress = progress_printer(c.quiet);
  Phase1Result r = solve_phase1(cfg.job, progress);
  write_outputs(c, cfg, r.table);
  std::string rp = out_path(c, cfg.outputs.report);
  json rep = load_report(rp);
  rep["job"] = cfg.name;
  rep["M0"] = r.table.meta.M0;
  rep["Q"] = r.table.meta.Q;
  rep["Y"] = r.table.meta.Y;
  rep["eps"] = r.table.meta.eps;
  rep["phase1"] = to_json(r.report);
  rep.erase("phase2");
  rep.erase("checks");
  write_text_file(rp, rep.dump(1) + "\n");
  std::cout << "phase1: " << r.table.entries.size() << " coefficients, coeff_bound " << r.report.coeff_bound.to_string(4)
            << " -> " << out_path(c, cfg.outputs.table) << "\n";
  return 0;
}

int cmd_phase2(const Common& c, long from, long to, int budget) {
  JobConfig cfg = load_job_config(c.config);
  Phase2Config p2 = cfg.phase2.value_or(Phase2Config{});
  if (from > 0) p2.from = from;
  if (to > 0) p2.to = to;
  if (budget > 0) p2.digit_loss_budget = budget;
  if (p2.from < 1 || p2.to < p2.from)
    throw ValidationError("phase2 range must satisfy 1 <= from <= to (set --from/--to or phase2 in the config)");
  CoefficientTable t = load_table(out_path(c, cfg.outputs.table));
  size_t before = t.meta.phase2.size();
  CoefficientTable ext = extend_phase2(t, p2.from, p2.to, p2.digit_loss_budget, progress_printer(c.quiet));
  write_outputs(c, cfg, ext);
  std::string rp = out_path(c, cfg.outputs.report);
  json rep = load_report(rp);
  json batches = rep.value("phase2", json::array());
  for (size_t i = before; i < ext.meta.phase2.size(); ++i) {
    const auto& b = ext.meta.phase2[i];
    batches.push_back({{"n_from", b.n_from}, {"n_to", b.n_to}, {"Q", b.Q}, {"Y", b.Y},
                       {"digit_loss_budget", p2.digit_loss_budget}});
  }
  rep["phase2"] = batches;
  write_text_file(rp, rep.dump(1) + "\n");
  std::cout << "phase2: " << ext.entries.size() - t.entries.size() << " new coefficients for |n| in [" << p2.from
            << ", " << p2.to << "]\n";
  return 0;
}

int cmd_check(const Common& c) {
  JobConfig cfg = load_job_config(c.config);
  CoefficientTable t = load_table(out_path(c, cfg.outputs.table));
  const PrecisionContext ctx = table_context(t);
  const CheckConfig& k = cfg.checks;
  std::vector<CheckReport> reports;

  if (k.automorphy_samples > 0) {
    std::mt19937_64 rng(k.seed);
    BigReal Y = BigReal::parse(ctx, t.meta.Y);
    reports.push_back(automorphy_residual(t, random_automorphy_samples(k.automorphy_samples, Y, rng)));
  }
  if (k.cminus_normalizer) reports.push_back(cminus_ratio_report(t, *k.cminus_normalizer, k.cminus_deltas, k.cminus_threshold));
  if (!k.proximity_deltas.empty()) {
    std::vector<CoeffIndex> idx;
    for (long d : k.proximity_deltas) idx.push_back(delta_to_index(t.params, d));
    reports.push_back(integer_proximity(t, idx));
  }
  if (cfg.lvalues_csv) reports.push_back(dichotomy_report(t, load_lvalue_csv(*cfg.lvalues_csv), k.vanish_threshold));
  if (k.y2) {
    SolveJob job = cfg.job;
    job.M0 = t.meta.M0;
    job.Q = t.meta.Q;
    Phase1Result stored{t, {}};
    std::optional<BigReal> thr;
    if (k.y_threshold) thr = BigReal::parse(ctx, *k.y_threshold);
    reports.push_back(y_independence(job, BigReal::parse(ctx, t.meta.Y), BigReal::parse(ctx, *k.y2), thr, &stored,
                                     progress_printer(c.quiet)));
  }

  std::string rp = out_path(c, cfg.outputs.report);
  json rep = load_report(rp);
  json checks = json::array();
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.passed;
    checks.push_back(to_json(r));
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.discrepancy << " (threshold " << r.threshold
              << ")" << (r.detail.empty() ? "" : "; " + r.detail) << "\n";
  }
  rep["checks"] = checks;
  if (rep.contains("phase1")) {
    for (const auto& r : reports)
      if (r.name == "y_independence") rep["phase1"]["empirical_y_error"] = r.discrepancy;
  }
  write_text_file(rp, rep.dump(1) + "\n");
  return all ? 0 : 1;
}

int cmd_tables(const Common& c, const std::string& part, long from, long to, bool csv, std::optional<long> normalize) {
  JobConfig cfg = load_job_config(c.config);
  CoefficientTable t = load_table(out_path(c, cfg.outputs.table));
  if (csv) {
    std::cout << table_to_csv(t);
    return 0;
  }
  const PrecisionContext ctx = table_context(t);
  const bool minus = part == "minus";
  std::map<long, std::string> lvals;
  if (cfg.lvalues_csv && !minus)
    for (const auto& r : load_lvalue_csv(*cfg.lvalues_csv)) lvals[r.delta] = r.value;

  std::optional<BigComplex> norm0;
  if (minus && normalize) {
    const CoeffEntry& e = t.at(delta_to_index(t.params, *normalize));
    norm0 = e.value * sqrt(BigReal(ctx, std::labs(*normalize)));
    if (norm0->is_zero()) throw ValidationError("normalizer c^-(" + std::to_string(*normalize) + ") is zero");
  }

  std::vector<std::pair<long, const CoeffEntry*>> rows;
  for (const auto& [idx, e] : t.entries) {
    if ((idx.n < 0) != minus) continue;
    long d = index_to_delta(t.params, idx);
    if (!(delta_to_index(t.params, d) == idx)) continue;  // one row per Delta
    if (from > 0 && std::labs(d) < from) continue;
    if (to > 0 && std::labs(d) > to) continue;
    rows.emplace_back(d, &e);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const int shown = std::min(t.meta.digits, 50);
  std::cout << "Delta\t" << (minus ? (norm0 ? "sqrt|Delta| c-(Delta) / norm" : "c-(Delta)") : "c+(Delta)")
            << "\terr_bound\t|c-[c]|" << (lvals.empty() ? "" : "\tL'") << "\n";
  for (const auto& [d, e] : rows) {
    BigComplex v = e->value;
    BigReal err = e->err_bound;
    if (norm0) {
      BigComplex s = v * sqrt(BigReal(ctx, std::labs(d)));
      v = s / *norm0;
      err = err * sqrt(BigReal(ctx, std::labs(d))) / abs(*norm0);
    }
    IntegerProximity ip = integer_proximity(v, err, t.meta.digits);
    std::cout << d << '\t' << v.re.to_string(shown);
    if (!v.im.is_zero() && abs(v.im) > err) std::cout << (v.im.sign() < 0 ? "" : "+") << v.im.to_string(6) << "i";
    std::cout << '\t' << err.to_string(2) << '\t' << ip.distance.to_string(2);
    if (!lvals.empty()) {
      auto it = lvals.find(d);
      std::cout << '\t' << (it == lvals.end() ? "-" : it->second);
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic weak Maass form coefficients by horocycle sampling"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", common.config, "job config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", common.out_dir, "directory for relative output paths");
    sub->add_option("--threads", common.threads, "worker threads (default: HWMF_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", common.quiet, "no progress output");
  };

  auto* p1 = app.add_subcommand("phase1", "solve the linear system and store the coefficient table");
  add_common(p1);
  long from = 0, to = 0;
  int budget = 0;
  auto* p2 = app.add_subcommand("phase2", "extend a stored table to |n| in [from, to]");
  add_common(p2);
  p2->add_option("--from", from, "smallest |n|")->check(CLI::PositiveNumber);
  p2->add_option("--to", to, "largest |n|")->check(CLI::PositiveNumber);
  p2->add_option("--budget", budget, "digit loss budget (default from config, else 8)")->check(CLI::PositiveNumber);
  auto* ck = app.add_subcommand("check", "run the accuracy checks on a stored table");
  add_common(ck);
  auto* tb = app.add_subcommand("tables", "print a stored table by discriminant");
  add_common(tb);
  std::string part = "plus";
  bool csv = false;
  long tfrom = 0, tto = 0, norm = 0;
  tb->add_option("--part", part, "plus (holomorphic) or minus")->check(CLI::IsMember({"plus", "minus"}));
  tb->add_option("--from", tfrom, "smallest |Delta|");
  tb->add_option("--to", tto, "largest |Delta|");
  auto* norm_opt = tb->add_option("--normalize", norm, "for --part minus: scale by sqrt|D0| c-(D0)");
  tb->add_flag("--csv", csv, "full CSV instead of the discriminant table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (common.threads > 0) setenv("HWMF_THREADS", std::to_string(common.threads).c_str(), 1);

  try {
    if (p1->parsed()) return cmd_phase1(common);
    if (p2->parsed()) return cmd_phase2(common, from, to, budget);
    if (ck->parsed()) return cmd_check(common);
    if (tb->parsed())
      return cmd_tables(common, part, tfrom, tto, csv, norm_opt->count() ? std::optional<long>(norm) : std::nullopt);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
