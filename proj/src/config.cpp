#include "rankone/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rankone/errors.hpp"

namespace rankone {

using nlohmann::json;
using nlohmann::ordered_json;

int line_at(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_at(text, pos);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& data) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

[[noreturn]] void schema_error(const std::string& text, const std::string& key, const std::string& msg) {
  throw ParseError(msg, line_of_key(text, key), key);
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& text,
                    const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.contains(k)) schema_error(text, k, "unknown key \"" + k + "\" in " + where);
}

void require_object(const json& j, const std::string& text, const std::string& key) {
  if (!j.is_object()) schema_error(text, key, "\"" + key + "\" must be an object");
}

double number(const json& j, const std::string& text, const std::string& key) {
  if (!j.is_number()) schema_error(text, key, "\"" + key + "\" must be a number");
  return j.get<double>();
}

std::vector<double> number_list(const json& j, const std::string& text, const std::string& key) {
  if (!j.is_array()) schema_error(text, key, "\"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) schema_error(text, key, "\"" + key + "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

TrigPoly trig_from_json(const json& j, const std::string& text, const std::string& key) {
  require_object(j, text, key);
  reject_unknown(j, {"c0", "sin", "cos"}, text, key);
  TrigPoly t;
  if (j.contains("c0")) t.c0 = number(j["c0"], text, "c0");
  if (j.contains("sin")) t.sin_coeffs = number_list(j["sin"], text, "sin");
  if (j.contains("cos")) t.cos_coeffs = number_list(j["cos"], text, "cos");
  return t;
}

XYFunction xy_from_json(const json& j, const std::string& text, const std::string& key) {
  require_object(j, text, key);
  reject_unknown(j, {"x", "y"}, text, key);
  XYFunction f;
  if (j.contains("x")) f.x = trig_from_json(j["x"], text, "x");
  if (j.contains("y")) f.y.coeffs = number_list(j["y"], text, "y");
  return f;
}

ordered_json trig_to_json(const TrigPoly& t) {
  return ordered_json{{"c0", t.c0}, {"sin", t.sin_coeffs}, {"cos", t.cos_coeffs}};
}

ordered_json xy_to_json(const XYFunction& f) {
  return ordered_json{{"x", trig_to_json(f.x)}, {"y", f.y.coeffs}};
}

}  // namespace

ModelParams params_from_json(const json& j, const std::string& text) {
  require_object(j, text, "params");
  reject_unknown(j, {"eps1", "eps2", "alpha1", "alpha2", "delta", "delta1", "delta2", "b"}, text, "params");
  ModelParams p;
  const std::pair<const char*, double*> fields[] = {
      {"eps1", &p.eps1},     {"eps2", &p.eps2},     {"alpha1", &p.alpha1}, {"alpha2", &p.alpha2},
      {"delta", &p.delta},   {"delta1", &p.delta1}, {"delta2", &p.delta2}, {"b", &p.b}};
  for (const auto& [name, slot] : fields) {
    if (!j.contains(name)) throw ParseError(std::string("missing parameter \"") + name + "\"", line_of_key(text, "params"), name);
    *slot = number(j[name], text, name);
  }
  return p;
}

ModelFunctions functions_from_json(const json& j, const std::string& text) {
  require_object(j, text, "functions");
  reject_unknown(j, {"psi1", "psi2", "psi3", "psi4", "g"}, text, "functions");
  ModelFunctions f = ModelFunctions::sine_family();
  if (j.contains("psi1")) f.psi1 = xy_from_json(j["psi1"], text, "psi1");
  if (j.contains("psi2")) f.psi2 = xy_from_json(j["psi2"], text, "psi2");
  if (j.contains("g")) f.g = xy_from_json(j["g"], text, "g");
  if (j.contains("psi3")) {
    const json& e = j["psi3"];
    require_object(e, text, "psi3");
    if (e.contains("t")) {
      reject_unknown(e, {"t"}, text, "psi3");
      f.psi3 = trig_from_json(e["t"], text, "t");
    } else {
      f.psi3 = trig_from_json(e, text, "psi3");
    }
  }
  if (j.contains("psi4")) {
    const json& e = j["psi4"];
    require_object(e, text, "psi4");
    reject_unknown(e, {"x", "y", "t"}, text, "psi4");
    f.psi4 = XYTFunction{};
    if (e.contains("x")) f.psi4.x = trig_from_json(e["x"], text, "x");
    if (e.contains("y")) f.psi4.y.coeffs = number_list(e["y"], text, "y");
    if (e.contains("t")) f.psi4.t = trig_from_json(e["t"], text, "t");
  }
  return f;
}

void enforce_hypotheses(const ModelParams& p, const ModelFunctions& f,
                        std::initializer_list<const char*> names) {
  const HypothesisReport rep = validate(p, f);
  for (const char* name : names) {
    const HypothesisCheck& c = rep.check(name);
    if (!c.pass) throw ValidationError(std::string(name) + " violated: " + c.detail, name);
  }
}

ModelConfig parse_config_text(const std::string& text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_at(text, e.byte == 0 ? 0 : e.byte - 1), "");
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 1, "");
  reject_unknown(doc, {"params", "functions"}, text, "config");
  if (!doc.contains("params")) throw ParseError("missing \"params\"", 1, "params");

  ModelConfig cfg;
  cfg.params = params_from_json(doc["params"], text);
  if (doc.contains("functions")) cfg.funcs = functions_from_json(doc["functions"], text);

  enforce_hypotheses(cfg.params, cfg.funcs, {"H1", "H2"});
  if (strict) enforce_hypotheses(cfg.params, cfg.funcs, {"H3", "H4", "H5", "H6"});
  return cfg;
}

ModelConfig parse_config(const std::filesystem::path& path, bool strict) {
  return parse_config_text(read_text_file(path), strict);
}

ordered_json params_to_json(const ModelParams& p) {
  return ordered_json{{"eps1", p.eps1},     {"eps2", p.eps2},     {"alpha1", p.alpha1},
                      {"alpha2", p.alpha2}, {"delta", p.delta},   {"delta1", p.delta1},
                      {"delta2", p.delta2}, {"b", p.b}};
}

ordered_json functions_to_json(const ModelFunctions& f) {
  ordered_json psi4{{"x", trig_to_json(f.psi4.x)}, {"y", f.psi4.y.coeffs}, {"t", trig_to_json(f.psi4.t)}};
  return ordered_json{{"psi1", xy_to_json(f.psi1)},
                      {"psi2", xy_to_json(f.psi2)},
                      {"psi3", ordered_json{{"t", trig_to_json(f.psi3)}}},
                      {"psi4", psi4},
                      {"g", xy_to_json(f.g)}};
}

std::string emit_config(const ModelConfig& cfg) {
  const ordered_json doc{{"params", params_to_json(cfg.params)}, {"functions", functions_to_json(cfg.funcs)}};
  return doc.dump(2) + "\n";
}

}  // namespace rankone
