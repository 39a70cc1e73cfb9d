#include "rankone/sweep.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "rankone/config.hpp"
#include "rankone/errors.hpp"
#include "rankone/orbit.hpp"
#include "rankone/parallel.hpp"

namespace rankone {

namespace {

const std::set<std::string> kAxisNames = {"alpha2", "delta2", "eps1", "eps2"};

double* param_slot(ModelParams& p, const std::string& name) {
  if (name == "alpha2") return &p.alpha2;
  if (name == "delta2") return &p.delta2;
  if (name == "eps1") return &p.eps1;
  if (name == "eps2") return &p.eps2;
  throw SpecInvalid("unsupported axis parameter: " + name);
}

std::string quantity_name(SweepQuantity q) { return q == SweepQuantity::rho ? "rho" : "lambda1"; }

void append_num(std::string& s, double v) { s += fmt::format("{:.17g};", v); }

void append_trig(std::string& s, const TrigPoly& t) {
  append_num(s, t.c0);
  s += fmt::format("cos{}:", t.cos_coeffs.size());
  for (double c : t.cos_coeffs) append_num(s, c);
  s += fmt::format("sin{}:", t.sin_coeffs.size());
  for (double c : t.sin_coeffs) append_num(s, c);
}

void append_poly(std::string& s, const Polynomial& p) {
  s += fmt::format("poly{}:", p.coeffs.size());
  for (double c : p.coeffs) append_num(s, c);
}

template <class T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <class T>
T take(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw IoError("truncated tile");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

std::string csv_header(const SweepSpec& spec) {
  if (spec.quantity == SweepQuantity::rho) return "alpha2,delta2,rho,locked_p,locked_q,valid\n";
  return "p1,p2,lambda1,status\n";
}

std::string csv_row(const SweepSpec& spec, int i, int j, const SweepCell& c) {
  const double p1 = spec.axes[0].grid().at(i);
  const double p2 = spec.axes[1].grid().at(j);
  if (spec.quantity == SweepQuantity::rho) {
    return fmt::format("{},{},{},{},{},{}\n", csv_number(p1), csv_number(p2), csv_number(c.value),
                       c.locked_p, c.locked_q, c.status == 0 ? 1 : 0);
  }
  return fmt::format("{},{},{},{}\n", csv_number(p1), csv_number(p2), csv_number(c.value),
                     cell_status_name(spec.quantity, c.status));
}

SweepResult execute(const SweepSpec& spec, const SweepOptions& opt, bool reuse) {
  validate_spec(spec);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.checkpoint, ec);
  if (ec) throw IoError("cannot create checkpoint directory " + spec.checkpoint + ": " + ec.message());

  const SpecHash hash = spec_hash(spec);
  SweepResult res;
  res.chunks_total = spec.chunk_count();

  std::vector<long> todo;
  for (long c = 0; c < res.chunks_total; ++c) {
    const fs::path path = tile_path(spec, c);
    if (reuse && fs::exists(path)) {
      const SweepTile tile = read_tile(path);
      if (tile.hash != hash)
        throw SpecMismatch("tile " + path.string() + " was written for a different spec (hash " +
                           to_hex(tile.hash) + ", expected " + to_hex(hash) + ")");
      ++res.chunks_reused;
      continue;
    }
    todo.push_back(c);
  }
  if (opt.stop_after_chunks && static_cast<long>(todo.size()) > *opt.stop_after_chunks)
    todo.resize(static_cast<std::size_t>(std::max<long>(0, *opt.stop_after_chunks)));

  const long n_cells = spec.cell_count();
  const int n1 = spec.axes[0].n;
  parallel_for(todo.size(), opt.workers, [&](std::size_t k) {
    const long c = todo[k];
    SweepTile tile;
    tile.hash = hash;
    tile.chunk = static_cast<std::uint64_t>(c);
    const long begin = c * spec.chunk_size;
    const long end = std::min(n_cells, begin + spec.chunk_size);
    for (long idx = begin; idx < end; ++idx)
      tile.cells.push_back(compute_cell(spec, static_cast<int>(idx % n1), static_cast<int>(idx / n1)));
    write_tile(tile_path(spec, c), tile);
  });
  res.chunks_computed = static_cast<long>(todo.size());

  if (res.chunks_computed + res.chunks_reused < res.chunks_total) return res;

  // The CSV is always assembled from the tiles on disk.
  std::string csv = csv_header(spec);
  long idx = 0;
  for (long c = 0; c < res.chunks_total; ++c) {
    const SweepTile tile = read_tile(tile_path(spec, c));
    if (tile.hash != hash) throw SpecMismatch("tile hash changed during the sweep");
    const long expected = std::min(n_cells, (c + 1) * spec.chunk_size) - c * spec.chunk_size;
    if (static_cast<long>(tile.cells.size()) != expected || tile.chunk != static_cast<std::uint64_t>(c))
      throw IoError("tile " + tile_path(spec, c).string() + " is inconsistent with the spec");
    for (const SweepCell& cell : tile.cells) {
      csv += csv_row(spec, static_cast<int>(idx % n1), static_cast<int>(idx / n1), cell);
      ++idx;
    }
  }
  write_text_file_atomic(spec.output, csv);
  res.complete = true;
  return res;
}

}  // namespace

void validate_spec(const SweepSpec& spec) {
  for (const SweepAxis& a : spec.axes) {
    if (!kAxisNames.contains(a.name)) throw SpecInvalid("axis parameter must be one of alpha2, delta2, eps1, eps2: " + a.name);
    if (a.n < 1) throw SpecInvalid("axis " + a.name + " needs n >= 1");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) throw SpecInvalid("axis " + a.name + " has a non-finite bound");
  }
  if (spec.axes[0].name == spec.axes[1].name) throw SpecInvalid("axis parameters must be distinct");
  if (spec.quantity == SweepQuantity::rho &&
      (spec.axes[0].name != "alpha2" || spec.axes[1].name != "delta2"))
    throw SpecInvalid("rho sweeps run over the axes (alpha2, delta2) in that order");
  if (spec.budget < 100) throw SpecInvalid("budget must be at least 100");
  if (spec.chunk_size < 1) throw SpecInvalid("chunk_size must be at least 1");
  if (spec.q_max < 1) throw SpecInvalid("q_max must be at least 1");
  if (spec.output.empty()) throw SpecInvalid("output path missing");
  if (spec.checkpoint.empty()) throw SpecInvalid("checkpoint directory missing");
}

SpecHash spec_hash(const SweepSpec& spec) {
  std::string s = "rankone-sweep-v1;";
  s += quantity_name(spec.quantity) + ";";
  for (const SweepAxis& a : spec.axes) {
    s += a.name + ";";
    append_num(s, a.lo);
    append_num(s, a.hi);
    s += fmt::format("{};", a.n);
  }
  const ModelParams& p = spec.params;
  for (double v : {p.eps1, p.eps2, p.alpha1, p.alpha2, p.delta, p.delta1, p.delta2, p.b}) append_num(s, v);
  const ModelFunctions& f = spec.funcs;
  for (const XYFunction* h : {&f.psi1, &f.psi2, &f.g}) {
    append_trig(s, h->x);
    append_poly(s, h->y);
  }
  append_trig(s, f.psi3);
  append_trig(s, f.psi4.x);
  append_poly(s, f.psi4.y);
  append_trig(s, f.psi4.t);
  s += fmt::format("budget{};qmax{};chunk{};", spec.budget, spec.q_max, spec.chunk_size);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(s.data(), s.size(), digest, &len, EVP_sha256(), nullptr) != 1 || len < 16)
    throw IoError("SHA-256 failed");
  SpecHash h{};
  std::memcpy(h.data(), digest, h.size());
  return h;
}

std::string to_hex(const SpecHash& h) {
  std::string s;
  for (std::uint8_t b : h) s += fmt::format("{:02x}", b);
  return s;
}

std::string cell_status_name(SweepQuantity q, std::uint8_t status) {
  if (q == SweepQuantity::rho) return status == 0 ? "ok" : "invalid";
  switch (status) {
    case 0: return "ok";
    case 1: return "escaped";
    default: return "error";
  }
}

PhaseState sweep_initial_state(const ModelParams& p) { return {std::numbers::pi, 1.0 + p.b / 2.0, 0.5}; }

SweepCell compute_cell(const SweepSpec& spec, int i, int j) {
  ModelParams p = spec.params;
  *param_slot(p, spec.axes[0].name) = spec.axes[0].grid().at(i);
  *param_slot(p, spec.axes[1].name) = spec.axes[1].grid().at(j);
  SweepCell cell;
  if (spec.quantity == SweepQuantity::rho) {
    const TongueCell t = tongue_cell(CircleMap(p.alpha2, p.delta2, spec.funcs.psi3), spec.q_max, spec.budget);
    cell.value = t.rho;
    cell.status = t.valid ? 0 : 1;
    if (t.locked) {
      cell.locked_p = t.locked->p;
      cell.locked_q = t.locked->q;
    }
    return cell;
  }
  LyapunovConfig cfg;
  cfg.iters = spec.budget;
  cfg.qr_period = 10;
  cfg.history_stride = 0;
  try {
    const LyapunovEstimate est = lyapunov_spectrum(p, spec.funcs, sweep_initial_state(p), cfg);
    cell.value = est.exponents.empty() ? std::nan("") : est.exponents[0];
    cell.status = est.escaped ? 1 : 0;
  } catch (const NumericalError&) {
    cell.value = std::nan("");
    cell.status = 2;
  }
  return cell;
}

std::filesystem::path tile_path(const SweepSpec& spec, long chunk) {
  return std::filesystem::path(spec.checkpoint) / fmt::format("tile_{:06d}.bin", chunk);
}

void write_tile(const std::filesystem::path& path, const SweepTile& tile) {
  std::string buf(reinterpret_cast<const char*>(tile.hash.data()), tile.hash.size());
  put<std::uint64_t>(buf, tile.chunk);
  put<std::uint64_t>(buf, tile.cells.size());
  for (const SweepCell& c : tile.cells) {
    std::string rec;
    put<double>(rec, c.value);
    put<std::int32_t>(rec, c.locked_p);
    put<std::int32_t>(rec, c.locked_q);
    put<std::uint8_t>(rec, c.status);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(rec.size()));
    buf += rec;
  }
  write_text_file_atomic(path, buf);
}

SweepTile read_tile(const std::filesystem::path& path) {
  const std::string buf = read_text_file(path);
  if (buf.size() < 32) throw IoError("truncated tile " + path.string());
  SweepTile tile;
  std::memcpy(tile.hash.data(), buf.data(), tile.hash.size());
  std::size_t pos = tile.hash.size();
  tile.chunk = take<std::uint64_t>(buf, pos);
  const auto count = take<std::uint64_t>(buf, pos);
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto len = take<std::uint32_t>(buf, pos);
    const std::size_t end = pos + len;
    if (end > buf.size()) throw IoError("truncated tile " + path.string());
    SweepCell c;
    c.value = take<double>(buf, pos);
    c.locked_p = take<std::int32_t>(buf, pos);
    c.locked_q = take<std::int32_t>(buf, pos);
    c.status = take<std::uint8_t>(buf, pos);
    pos = end;  // tolerate records with trailing fields
    tile.cells.push_back(c);
  }
  return tile;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt) { return execute(spec, opt, false); }

SweepResult resume_sweep(const SweepSpec& spec, const SweepOptions& opt) { return execute(spec, opt, true); }

SweepSpec parse_sweep_spec(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_at(text, e.byte == 0 ? 0 : e.byte - 1), "");
  }
  if (!doc.is_object()) throw ParseError("sweep spec must be a JSON object", 1, "");
  static const std::set<std::string> allowed = {"quantity", "axes",       "params", "functions", "budget",
                                                "q_max",    "chunk_size", "output", "checkpoint"};
  for (const auto& [k, v] : doc.items())
    if (!allowed.contains(k)) throw ParseError("unknown key \"" + k + "\" in sweep spec", line_of_key(text, k), k);

  auto fail = [&](const std::string& key, const std::string& msg) -> ParseError {
    return ParseError(msg, line_of_key(text, key), key);
  };

  SweepSpec spec;
  if (!doc.contains("quantity") || !doc["quantity"].is_string()) throw fail("quantity", "\"quantity\" must be \"rho\" or \"lambda1\"");
  const std::string q = doc["quantity"].get<std::string>();
  if (q == "rho")
    spec.quantity = SweepQuantity::rho;
  else if (q == "lambda1")
    spec.quantity = SweepQuantity::lambda1;
  else
    throw fail("quantity", "\"quantity\" must be \"rho\" or \"lambda1\"");

  if (!doc.contains("axes") || !doc["axes"].is_array() || doc["axes"].size() != 2)
    throw fail("axes", "\"axes\" must be an array of two axis objects");
  for (std::size_t k = 0; k < 2; ++k) {
    const json& a = doc["axes"][k];
    if (!a.is_object()) throw fail("axes", "axis entries must be objects");
    for (const auto& [key, v] : a.items())
      if (key != "name" && key != "lo" && key != "hi" && key != "n")
        throw fail(key, "unknown key \"" + key + "\" in axis");
    if (!a.contains("name") || !a["name"].is_string()) throw fail("name", "axis \"name\" must be a string");
    if (!a.contains("lo") || !a["lo"].is_number()) throw fail("lo", "axis \"lo\" must be a number");
    if (!a.contains("hi") || !a["hi"].is_number()) throw fail("hi", "axis \"hi\" must be a number");
    if (!a.contains("n") || !a["n"].is_number_integer()) throw fail("n", "axis \"n\" must be an integer");
    spec.axes[k] = {a["name"].get<std::string>(), a["lo"].get<double>(), a["hi"].get<double>(), a["n"].get<int>()};
  }
  if (doc.contains("params")) spec.params = params_from_json(doc["params"], text);
  if (doc.contains("functions")) spec.funcs = functions_from_json(doc["functions"], text);
  auto integer = [&](const char* key, auto& slot) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) throw fail(key, std::string("\"") + key + "\" must be an integer");
    slot = doc[key].get<std::remove_reference_t<decltype(slot)>>();
  };
  integer("budget", spec.budget);
  integer("q_max", spec.q_max);
  integer("chunk_size", spec.chunk_size);
  auto string = [&](const char* key, std::string& slot) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw fail(key, std::string("\"") + key + "\" must be a string");
    slot = doc[key].get<std::string>();
  };
  string("output", spec.output);
  string("checkpoint", spec.checkpoint);
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) { return parse_sweep_spec(read_text_file(path)); }

}  // namespace rankone
