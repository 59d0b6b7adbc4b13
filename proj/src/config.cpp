#include "hwmf/config.hpp"

#include <filesystem>
#include <set>

#include "hwmf/persist.hpp"
#include "json.hpp"

namespace hwmf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ValidationError("config key '" + key + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) fail(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

// Numbers may be given as strings ("1e-25", "1/3") or JSON numbers.
std::string number_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  fail(key, "expected a number or a decimal string");
}

BigReal big(const json& v, const std::string& key, const PrecisionContext& ctx) {
  std::string text = number_text(v, key);
  try {
    return BigReal::parse(ctx, text);
  } catch (const ValidationError& e) {
    fail(key, e.what());
  }
}

long integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<long>();
}

double real(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

std::vector<long> integer_list(const json& v, const std::string& key) {
  if (!v.is_array()) fail(key, "expected an array of integers");
  std::vector<long> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

const json& need(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(key, "missing");
  return *it;
}

}  // namespace

JobConfig parse_job_config(const std::string& json_text, const std::string& name, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j, "",
                 {"N", "weight", "rep", "mode", "principal_part", "eps", "Y", "Q", "M0", "precision_digits", "phase2",
                  "lvalues_csv", "outputs", "checks", "comment"});

  JobConfig cfg;
  cfg.name = name;
  SolveJob& job = cfg.job;
  HarmonicParams& P = job.params;

  long digits = j.contains("precision_digits") ? integer(j["precision_digits"], "precision_digits") : 28;
  if (digits < 10 || digits > 2000) fail("precision_digits", "must lie in [10, 2000]");
  job.ctx = make_context(static_cast<int>(digits));

  long N = integer(need(j, "N"), "N");
  if (N < 1 || N > 100000) fail("N", "must lie in [1, 100000]");
  P.N = static_cast<int>(N);
  try {
    P.k = WeightParam::parse(number_text(need(j, "weight"), "weight"));
  } catch (const ValidationError& e) {
    fail("weight", e.what());
  }
  const json& rep = need(j, "rep");
  if (rep == "rho")
    P.conjugated = false;
  else if (rep == "rho_bar")
    P.conjugated = true;
  else
    fail("rep", "must be \"rho\" or \"rho_bar\"");
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) fail("mode", "expected a string");
    try {
      P.mode = parse_mode(j["mode"].get<std::string>());
    } catch (const ValidationError& e) {
      fail("mode", e.what());
    }
  }
  try {
    P.validate();
  } catch (const ValidationError& e) {
    fail(j.contains("mode") ? "mode" : "weight", e.what());
  }

  const json& pp = need(j, "principal_part");
  if (!pp.is_array() || pp.empty()) fail("principal_part", "expected a non-empty array of {n, h, re, im}");
  for (size_t i = 0; i < pp.size(); ++i) {
    std::string key = "principal_part[" + std::to_string(i) + "]";
    const json& t = pp[i];
    if (!t.is_object()) fail(key, "expected an object {n, h, re, im}");
    reject_unknown(t, key, {"n", "h", "re", "im"});
    CoeffIndex idx{integer(need(t, "n"), key + ".n"), static_cast<int>(integer(need(t, "h"), key + ".h"))};
    BigComplex a(big(need(t, "re"), key + ".re", job.ctx),
                 t.contains("im") ? big(t["im"], key + ".im", job.ctx) : BigReal(job.ctx));
    if (job.principal.terms.count(idx)) fail(key, "duplicate term " + idx.to_string());
    job.principal.terms[idx] = a;
    PrincipalPart single;
    single.terms[idx] = a;
    try {
      single.validate(P);
    } catch (const ValidationError& e) {
      fail(key, e.what());
    }
  }

  job.eps = big(need(j, "eps"), "eps", job.ctx);
  job.Y = j.contains("Y") ? big(j["Y"], "Y", job.ctx) : BigReal::parse(job.ctx, "0.5");
  if (j.contains("M0")) {
    long m = integer(j["M0"], "M0");
    if (m < 0 || m > 100000) fail("M0", "must lie in [0, 100000] (0 = automatic)");
    job.M0 = static_cast<int>(m);
  }
  if (j.contains("Q")) {
    long q = integer(j["Q"], "Q");
    if (q < 0 || q > 100000) fail("Q", "must lie in [0, 100000] (0 = automatic)");
    job.Q = static_cast<int>(q);
  }
  if (!(job.eps.sign() > 0)) fail("eps", "must be positive");
  BigReal y0 = sqrt(BigReal(job.ctx, 3L)) / 2L;
  if (!(job.Y.sign() > 0) || !(job.Y < y0)) fail("Y", "must lie in (0, sqrt(3)/2)");
  if (job.M0 > 0 && job.Q > 0 && job.Q <= job.M0) fail("Q", "must exceed M0");
  job = finalize_job(job);
  if (job.Q <= job.M0) fail("Q", "must exceed the automatic M0 = " + std::to_string(job.M0));

  if (j.contains("phase2")) {
    const json& p2 = j["phase2"];
    if (!p2.is_object()) fail("phase2", "expected {from, to, digit_loss_budget}");
    reject_unknown(p2, "phase2", {"from", "to", "digit_loss_budget"});
    Phase2Config c;
    c.from = integer(need(p2, "from"), "phase2.from");
    c.to = integer(need(p2, "to"), "phase2.to");
    if (c.from < 1) fail("phase2.from", "must be >= 1");
    if (c.to < c.from) fail("phase2.to", "must be >= phase2.from");
    if (p2.contains("digit_loss_budget")) {
      long b = integer(p2["digit_loss_budget"], "phase2.digit_loss_budget");
      if (b < 1 || b >= digits) fail("phase2.digit_loss_budget", "must lie in [1, precision_digits - 1]");
      c.digit_loss_budget = static_cast<int>(b);
    }
    cfg.phase2 = c;
  }

  if (j.contains("lvalues_csv")) {
    if (!j["lvalues_csv"].is_string()) fail("lvalues_csv", "expected a path");
    std::filesystem::path p = j["lvalues_csv"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    cfg.lvalues_csv = p.string();
  }

  cfg.outputs = {name + ".table.json", name + ".csv", name + ".report.json"};
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    if (!o.is_object()) fail("outputs", "expected {table, csv, report}");
    reject_unknown(o, "outputs", {"table", "csv", "report"});
    for (auto [key, dst] : {std::pair{"table", &cfg.outputs.table}, {"csv", &cfg.outputs.csv},
                            {"report", &cfg.outputs.report}}) {
      if (!o.contains(key)) continue;
      if (!o[key].is_string() || o[key].get<std::string>().empty())
        fail(std::string("outputs.") + key, "expected a non-empty path");
      *dst = o[key].get<std::string>();
    }
  }

  if (j.contains("checks")) {
    const json& c = j["checks"];
    if (!c.is_object()) fail("checks", "expected an object");
    reject_unknown(c, "checks",
                   {"y_independence", "automorphy_samples", "seed", "cminus", "integer_proximity", "vanish_threshold"});
    CheckConfig& k = cfg.checks;
    if (c.contains("y_independence")) {
      const json& y = c["y_independence"];
      if (!y.is_object()) fail("checks.y_independence", "expected {Y2, threshold}");
      reject_unknown(y, "checks.y_independence", {"Y2", "threshold"});
      BigReal y2 = big(need(y, "Y2"), "checks.y_independence.Y2", job.ctx);
      SolveJob probe = job;
      probe.Y = y2;
      try {
        probe.validate();
      } catch (const ValidationError& e) {
        fail("checks.y_independence.Y2", e.what());
      }
      k.y2 = number_text(y["Y2"], "checks.y_independence.Y2");
      if (y.contains("threshold")) {
        big(y["threshold"], "checks.y_independence.threshold", job.ctx);
        k.y_threshold = number_text(y["threshold"], "checks.y_independence.threshold");
      }
    }
    if (c.contains("automorphy_samples")) {
      long n = integer(c["automorphy_samples"], "checks.automorphy_samples");
      if (n < 0 || n > 100000) fail("checks.automorphy_samples", "must lie in [0, 100000]");
      k.automorphy_samples = static_cast<int>(n);
    }
    if (c.contains("seed")) {
      long s = integer(c["seed"], "checks.seed");
      if (s < 0) fail("checks.seed", "must be non-negative");
      k.seed = static_cast<std::uint64_t>(s);
    }
    if (c.contains("cminus")) {
      const json& m = c["cminus"];
      if (!m.is_object()) fail("checks.cminus", "expected {normalizer, deltas, threshold}");
      reject_unknown(m, "checks.cminus", {"normalizer", "deltas", "threshold"});
      if (P.mode != Mode::harmonic) fail("checks.cminus", "needs mode \"harmonic\"");
      k.cminus_normalizer = integer(need(m, "normalizer"), "checks.cminus.normalizer");
      if (m.contains("deltas")) k.cminus_deltas = integer_list(m["deltas"], "checks.cminus.deltas");
      if (m.contains("threshold")) k.cminus_threshold = real(m["threshold"], "checks.cminus.threshold");
      for (long d : k.cminus_deltas) {
        try {
          if (delta_to_index(P, d).n >= 0) fail("checks.cminus.deltas", std::to_string(d) + " is not a c^- index");
        } catch (const ValidationError& e) {
          fail("checks.cminus.deltas", e.what());
        }
      }
    }
    if (c.contains("integer_proximity"))
      k.proximity_deltas = integer_list(c["integer_proximity"], "checks.integer_proximity");
    if (c.contains("vanish_threshold")) {
      k.vanish_threshold = real(c["vanish_threshold"], "checks.vanish_threshold");
      if (!(k.vanish_threshold > 0)) fail("checks.vanish_threshold", "must be positive");
    }
  }
  return cfg;
}

JobConfig load_job_config(const std::string& path) {
  std::filesystem::path p(path);
  std::string text = read_text_file(path);
  return parse_job_config(text, p.stem().string(), p.parent_path().string());
}

}  // namespace hwmf
