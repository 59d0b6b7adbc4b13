#include "hwmf/persist.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hwmf {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "hwmf-table/1";

[[noreturn]] void bad(const std::string& what) { throw ValidationError("table file: " + what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where + ": missing '" + key + "'");
  return *it;
}

std::string str(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) bad(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

long integer(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) bad(where + ": '" + key + "' must be an integer");
  return v.get<long>();
}

BigReal number(const json& obj, const char* key, const std::string& where, const PrecisionContext& ctx) {
  std::string s = str(obj, key, where);
  try {
    return BigReal::parse(ctx, s);
  } catch (const ValidationError& e) {
    bad(where + ": " + e.what());
  }
}

}  // namespace

std::string table_to_json(const CoefficientTable& t) {
  json j;
  j["format"] = kFormat;
  j["params"] = {{"N", t.params.N},
                 {"weight", t.params.k.to_string()},
                 {"rep", t.params.conjugated ? "rho_bar" : "rho"},
                 {"mode", to_string(t.params.mode)}};
  json pp = json::array();
  for (const auto& [idx, a] : t.principal.terms)
    pp.push_back({{"n", idx.n}, {"h", idx.h}, {"re", a.re.to_string()}, {"im", a.im.to_string()}});
  j["principal_part"] = pp;

  const RunMetadata& m = t.meta;
  json meta = {{"digits", m.digits},
               {"M0", m.M0},
               {"Q", m.Q},
               {"Y", m.Y},
               {"eps", m.eps},
               {"eps_effective", m.eps_effective},
               {"inv_norm", m.inv_norm},
               {"residual_bound", m.residual_bound},
               {"coeff_bound", m.coeff_bound},
               {"pivot_growth", m.pivot_growth}};
  json batches = json::array();
  for (const auto& b : m.phase2) batches.push_back({{"n_from", b.n_from}, {"n_to", b.n_to}, {"Q", b.Q}, {"Y", b.Y}});
  meta["phase2"] = batches;
  j["meta"] = meta;

  json entries = json::array();
  for (const auto& [idx, e] : t.entries)
    entries.push_back({{"n", idx.n},
                       {"h", idx.h},
                       {"re", e.value.re.to_string()},
                       {"im", e.value.im.to_string()},
                       {"err_bound", e.err_bound.to_string()},
                       {"phase", e.phase}});
  j["entries"] = entries;
  return j.dump(1) + "\n";
}

CoefficientTable table_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("expected an object");
  if (str(j, "format", "top level") != kFormat) bad("unknown format, expected " + std::string(kFormat));

  CoefficientTable t;
  const json& meta = field(j, "meta", "top level");
  t.meta.digits = static_cast<int>(integer(meta, "digits", "meta"));
  if (t.meta.digits < 10 || t.meta.digits > 2000) bad("meta: digits out of range");
  const PrecisionContext ctx = make_context(t.meta.digits);
  t.meta.M0 = static_cast<int>(integer(meta, "M0", "meta"));
  t.meta.Q = static_cast<int>(integer(meta, "Q", "meta"));
  t.meta.Y = str(meta, "Y", "meta");
  t.meta.eps = str(meta, "eps", "meta");
  t.meta.eps_effective = str(meta, "eps_effective", "meta");
  t.meta.inv_norm = str(meta, "inv_norm", "meta");
  t.meta.residual_bound = str(meta, "residual_bound", "meta");
  t.meta.coeff_bound = str(meta, "coeff_bound", "meta");
  t.meta.pivot_growth = str(meta, "pivot_growth", "meta");
  const json& batches = field(meta, "phase2", "meta");
  if (!batches.is_array()) bad("meta: phase2 must be an array");
  for (const auto& b : batches)
    t.meta.phase2.push_back({integer(b, "n_from", "meta.phase2"), integer(b, "n_to", "meta.phase2"),
                             static_cast<int>(integer(b, "Q", "meta.phase2")), str(b, "Y", "meta.phase2")});

  const json& p = field(j, "params", "top level");
  t.params.N = static_cast<int>(integer(p, "N", "params"));
  t.params.k = WeightParam::parse(str(p, "weight", "params"));
  std::string rep = str(p, "rep", "params");
  if (rep != "rho" && rep != "rho_bar") bad("params: rep must be rho or rho_bar");
  t.params.conjugated = rep == "rho_bar";
  t.params.mode = parse_mode(str(p, "mode", "params"));

  const json& pp = field(j, "principal_part", "top level");
  if (!pp.is_array()) bad("principal_part must be an array");
  for (const auto& a : pp) {
    CoeffIndex idx{integer(a, "n", "principal_part"), static_cast<int>(integer(a, "h", "principal_part"))};
    t.principal.terms[idx] =
        BigComplex(number(a, "re", "principal_part", ctx), number(a, "im", "principal_part", ctx));
  }

  const json& entries = field(j, "entries", "top level");
  if (!entries.is_array()) bad("entries must be an array");
  for (const auto& e : entries) {
    CoeffIndex idx{integer(e, "n", "entries"), static_cast<int>(integer(e, "h", "entries"))};
    std::string where = "entry " + idx.to_string();
    CoeffEntry ce{BigComplex(number(e, "re", where, ctx), number(e, "im", where, ctx)),
                  number(e, "err_bound", where, ctx), static_cast<int>(integer(e, "phase", where))};
    if (!t.entries.emplace(idx, std::move(ce)).second) bad("duplicate " + where);
  }
  t.validate();
  return t;
}

void save_table(const CoefficientTable& table, const std::string& path) { write_text_file(path, table_to_json(table)); }

CoefficientTable load_table(const std::string& path) { return table_from_json(read_text_file(path)); }

std::string table_to_csv(const CoefficientTable& t) {
  std::vector<std::pair<long, const std::pair<const CoeffIndex, CoeffEntry>*>> rows;
  for (const auto& kv : t.entries) rows.emplace_back(index_to_delta(t.params, kv.first), &kv);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->first.h < b.second->first.h;
  });
  std::ostringstream out;
  out << "n,h,Delta,re,im,err_bound,phase\n";
  for (const auto& [delta, kv] : rows) {
    const auto& [idx, e] = *kv;
    out << idx.n << ',' << idx.h << ',' << delta << ',' << e.value.re.to_string() << ',' << e.value.im.to_string()
        << ',' << e.err_bound.to_string(6) << ',' << e.phase << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ErrorReport& r) {
  json j = {{"eps_effective", r.eps_effective.to_string(6)},
            {"residual_bound", r.residual_bound.to_string(6)},
            {"inv_norm", r.inv_norm.to_string(6)},
            {"coeff_bound", r.coeff_bound.to_string(6)},
            {"scaled_inv_norm", r.scaled_inv_norm.to_string(6)},
            {"pivot_growth", r.pivot_growth.to_string(6)}};
  j["empirical_y_error"] = r.empirical_y_error ? json(r.empirical_y_error->to_string(6)) : json(nullptr);
  return j;
}

nlohmann::json to_json(const CheckReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"label", row.label}, {"value", row.value}, {"measure", row.measure}, {"flag", row.flag}});
  return {{"name", r.name},           {"passed", r.passed}, {"discrepancy", r.discrepancy},
          {"threshold", r.threshold}, {"detail", r.detail}, {"rows", rows}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw ValidationError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hwmf
