#include "dsfs/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dsfs/errors.hpp"
#include "json.hpp"

namespace dsfs::io {

namespace {

using nlohmann::json;

std::string format_int(long long v) { return std::to_string(v); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x",
                        static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string jnum(double v, const char* what) {
  if (!std::isfinite(v))
    throw IoError(std::string("json write: non-finite ") + what);
  return format_double(v);
}

std::string jvec(const Eigen::VectorXd& v, const char* what) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += jnum(v[i], what);
  }
  return out + "]";
}

std::string jmat(const Eigen::MatrixXd& m, const char* what) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ",";
    out += "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += jnum(m(i, j), what);
    }
    out += "]";
  }
  return out + "]";
}

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw IoError(std::string("missing field '") + key + "'");
  return *it;
}

double as_num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw IoError(std::string(key) + ": expected number");
  return v.get<double>();
}

long long as_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer())
    throw IoError(std::string(key) + ": expected integer");
  return v.get<long long>();
}

bool as_bool(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean()) throw IoError(std::string(key) + ": expected bool");
  return v.get<bool>();
}

std::string as_str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw IoError(std::string(key) + ": expected string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vec(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw IoError(std::string(key) + ": expected array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& x : v) {
    if (!x.is_number())
      throw IoError(std::string(key) + ": expected numeric array");
    out[i++] = x.get<double>();
  }
  return out;
}

Eigen::MatrixXd as_mat(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw IoError(std::string(key) + ": expected array");
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd out;
  Eigen::Index i = 0;
  for (const auto& row : v) {
    if (!row.is_array())
      throw IoError(std::string(key) + ": expected array of rows");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      out.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError(std::string(key) + ": ragged matrix");
    Eigen::Index jcol = 0;
    for (const auto& x : row) {
      if (!x.is_number())
        throw IoError(std::string(key) + ": expected numeric matrix");
      out(i, jcol++) = x.get<double>();
    }
    ++i;
  }
  if (rows == 0) out.resize(0, 0);
  return out;
}

void expect_kind(const json& j, const std::string& path, const char* kind) {
  if (as_str(j, "kind") != kind)
    throw IoError(path + ": expected kind '" + kind + "'");
}

// --- CSV helpers ------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& tok, const std::string& path) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw IoError(path + ": bad numeric field '" + tok + "'");
  return v;
}

long parse_long(const std::string& tok, const std::string& path) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    throw IoError(path + ": bad integer field '" + tok + "'");
  return v;
}

std::string provenance_word(oracle::Provenance p) {
  switch (p) {
    case oracle::Provenance::OracleLp:
      return "oracle";
    case oracle::Provenance::GeometricMember:
      return "hull";
    case oracle::Provenance::None:
      return "none";
  }
  throw IoError("unknown provenance value");
}

oracle::Provenance parse_provenance(const std::string& w,
                                    const std::string& path) {
  if (w == "oracle") return oracle::Provenance::OracleLp;
  if (w == "hull") return oracle::Provenance::GeometricMember;
  if (w == "none") return oracle::Provenance::None;
  throw IoError(path + ": bad provenance '" + w + "'");
}

oracle::Label parse_label(long v, const std::string& path) {
  if (v == 1) return oracle::Label::Feasible;
  if (v == 0) return oracle::Label::Infeasible;
  if (v == -1) return oracle::Label::Unlabeled;
  throw IoError(path + ": bad label value " + std::to_string(v));
}

}  // namespace

std::string format_double(double v) {
  // "-0" would take the integer parse path and come back as +0; keep the
  // sign bit by forcing a fraction.
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- network.json -----------------------------------------------------

void save_network(const std::string& path, const CompactModel& model) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"network\",\n";
  out << "  \"buses\": " << model.buses << ",\n";
  out << "  \"ders\": " << model.ders << ",\n";
  out << "  \"steps\": " << model.steps << ",\n";
  out << "  \"w\": " << jmat(model.w, "w") << ",\n";
  out << "  \"z\": " << jvec(model.z, "z") << ",\n";
  out << "  \"d\": " << jmat(model.d, "d") << ",\n";
  out << "  \"b\": " << jvec(model.b, "b") << ",\n";
  out << "  \"meta\": \"" << json_escape(model.meta) << "\"\n";
  out << "}\n";
  write_file(path, out.str());
}

CompactModel load_network(const std::string& path) {
  const json j = parse_file(path);
  expect_kind(j, path, "network");
  const int buses = static_cast<int>(as_int(j, "buses"));
  const int ders = static_cast<int>(as_int(j, "ders"));
  const int steps = static_cast<int>(as_int(j, "steps"));
  const Eigen::MatrixXd w = as_mat(j, "w");
  const Eigen::VectorXd z = as_vec(j, "z");
  const Eigen::MatrixXd d = as_mat(j, "d");
  const Eigen::VectorXd b = as_vec(j, "b");
  const std::string meta = as_str(j, "meta");
  try {
    // Revalidates shape and geometry, so a tampered file cannot smuggle in
    // an inconsistent model.
    return make_compact_model(w, z, d, b, ders, steps, buses, meta);
  } catch (const DimensionMismatch& e) {
    throw IoError(path + ": " + e.what());
  } catch (const InvalidConfig& e) {
    throw IoError(path + ": " + e.what());
  }
}

// --- feeder.json ------------------------------------------------------

void save_feeder(const std::string& path, const FeederSpec& feeder,
                 const std::vector<DerSpec>& ders) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"feeder\",\n";
  out << "  \"buses\": " << feeder.buses << ",\n";
  out << "  \"horizon\": " << feeder.horizon << ",\n";
  out << "  \"step_hours\": " << jnum(feeder.step_hours, "step_hours")
      << ",\n";
  out << "  \"v_nom\": " << jnum(feeder.v_nom, "v_nom") << ",\n";
  out << "  \"v_min\": " << jnum(feeder.v_min, "v_min") << ",\n";
  out << "  \"v_max\": " << jnum(feeder.v_max, "v_max") << ",\n";
  out << "  \"lines\": [";
  for (std::size_t i = 0; i < feeder.lines.size(); ++i) {
    const auto& l = feeder.lines[i];
    if (i) out << ",";
    out << "{\"from\":" << l.from << ",\"to\":" << l.to
        << ",\"resistance\":" << jnum(l.resistance, "resistance")
        << ",\"reactance\":" << jnum(l.reactance, "reactance") << "}";
  }
  out << "],\n";
  out << "  \"loads\": [";
  for (std::size_t i = 0; i < feeder.loads.size(); ++i) {
    if (i) out << ",";
    out << jvec(feeder.loads[i], "loads");
  }
  out << "],\n";
  out << "  \"resources\": [";
  for (std::size_t i = 0; i < ders.size(); ++i) {
    const auto& d = ders[i];
    if (i) out << ",";
    out << "{\"der_kind\":\"" << to_string(d.kind) << "\",\"bus\":" << d.bus
        << ",\"p_min\":" << jvec(d.p_min, "p_min")
        << ",\"p_max\":" << jvec(d.p_max, "p_max")
        << ",\"e_min\":" << jnum(d.e_min, "e_min")
        << ",\"e_max\":" << jnum(d.e_max, "e_max")
        << ",\"e_init\":" << jnum(d.e_init, "e_init")
        << ",\"e_total_min\":" << jnum(d.e_total_min, "e_total_min")
        << ",\"e_total_max\":" << jnum(d.e_total_max, "e_total_max") << "}";
  }
  out << "]\n";
  out << "}\n";
  write_file(path, out.str());
}

std::pair<FeederSpec, std::vector<DerSpec>> load_feeder(
    const std::string& path) {
  const json j = parse_file(path);
  expect_kind(j, path, "feeder");
  FeederSpec f;
  f.buses = static_cast<int>(as_int(j, "buses"));
  f.horizon = static_cast<int>(as_int(j, "horizon"));
  f.step_hours = as_num(j, "step_hours");
  f.v_nom = as_num(j, "v_nom");
  f.v_min = as_num(j, "v_min");
  f.v_max = as_num(j, "v_max");

  const json& lines = field(j, "lines");
  if (!lines.is_array()) throw IoError(path + ": lines: expected array");
  for (const auto& l : lines) {
    Line line;
    line.from = static_cast<int>(as_int(l, "from"));
    line.to = static_cast<int>(as_int(l, "to"));
    line.resistance = as_num(l, "resistance");
    line.reactance = as_num(l, "reactance");
    f.lines.push_back(line);
  }

  const json& loads = field(j, "loads");
  if (!loads.is_array()) throw IoError(path + ": loads: expected array");
  for (std::size_t i = 0; i < loads.size(); ++i) {
    json holder;
    holder["loads"] = loads[i];
    f.loads.push_back(as_vec(holder, "loads"));
    if (f.loads.back().size() != f.horizon)
      throw IoError(path + ": loads: wrong horizon length");
  }
  if (static_cast<int>(f.loads.size()) != f.buses)
    throw IoError(path + ": loads: expected one profile per bus");

  std::vector<DerSpec> ders;
  const json& resources = field(j, "resources");
  if (!resources.is_array())
    throw IoError(path + ": resources: expected array");
  for (const auto& r : resources) {
    DerSpec d;
    const std::string kind = as_str(r, "der_kind");
    if (kind == "interval")
      d.kind = DerKind::Interval;
    else if (kind == "battery")
      d.kind = DerKind::Battery;
    else if (kind == "energy_capped")
      d.kind = DerKind::EnergyCapped;
    else
      throw IoError(path + ": bad der_kind '" + kind + "'");
    d.bus = static_cast<int>(as_int(r, "bus"));
    d.p_min = as_vec(r, "p_min");
    d.p_max = as_vec(r, "p_max");
    d.e_min = as_num(r, "e_min");
    d.e_max = as_num(r, "e_max");
    d.e_init = as_num(r, "e_init");
    d.e_total_min = as_num(r, "e_total_min");
    d.e_total_max = as_num(r, "e_total_max");
    ders.push_back(std::move(d));
  }
  return {std::move(f), std::move(ders)};
}

// --- innerbox.json ----------------------------------------------------

void save_inner_box(const std::string& path,
                    const robust_box::InnerBoxResult& box) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"innerbox\",\n";
  out << "  \"p0_minus\": " << jvec(box.p0_minus, "p0_minus") << ",\n";
  out << "  \"p0_plus\": " << jvec(box.p0_plus, "p0_plus") << ",\n";
  out << "  \"objective\": " << jnum(box.objective, "objective") << ",\n";
  out << "  \"degenerate\": " << (box.degenerate ? "true" : "false") << ",\n";
  out << "  \"center\": " << jvec(box.center, "center") << ",\n";
  out << "  \"radius\": " << jvec(box.radius, "radius") << ",\n";
  out << "  \"response\": " << jmat(box.response, "response") << ",\n";
  out << "  \"offset\": " << jvec(box.offset, "offset") << "\n";
  out << "}\n";
  write_file(path, out.str());
}

robust_box::InnerBoxResult load_inner_box(const std::string& path) {
  const json j = parse_file(path);
  expect_kind(j, path, "innerbox");
  robust_box::InnerBoxResult box;
  box.p0_minus = as_vec(j, "p0_minus");
  box.p0_plus = as_vec(j, "p0_plus");
  box.objective = as_num(j, "objective");
  box.degenerate = as_bool(j, "degenerate");
  box.center = as_vec(j, "center");
  box.radius = as_vec(j, "radius");
  box.response = as_mat(j, "response");
  box.offset = as_vec(j, "offset");
  if (box.p0_minus.size() != box.p0_plus.size() ||
      box.center.size() != box.radius.size() ||
      box.center.size() != box.p0_minus.size())
    throw IoError(path + ": inconsistent box dimensions");
  return box;
}

// --- innerset.json ----------------------------------------------------

void save_inner_set(const std::string& path, const inner_set::InnerSet& set) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"innerset\",\n";
  out << "  \"dim\": " << set.dim << ",\n";
  out << "  \"box_present\": " << (set.box_present ? "true" : "false")
      << ",\n";
  out << "  \"box_lo\": " << jvec(set.box_lo, "box_lo") << ",\n";
  out << "  \"box_hi\": " << jvec(set.box_hi, "box_hi") << ",\n";
  out << "  \"vertices\": [";
  for (std::size_t i = 0; i < set.vertices.size(); ++i) {
    if (i) out << ",";
    out << jvec(set.vertices[i], "vertices");
  }
  out << "],\n";
  out << "  \"generation\": " << format_int(set.generation) << "\n";
  out << "}\n";
  write_file(path, out.str());
}

inner_set::InnerSet load_inner_set(const std::string& path) {
  const json j = parse_file(path);
  expect_kind(j, path, "innerset");
  inner_set::InnerSet set;
  set.dim = static_cast<int>(as_int(j, "dim"));
  set.box_present = as_bool(j, "box_present");
  set.box_lo = as_vec(j, "box_lo");
  set.box_hi = as_vec(j, "box_hi");
  set.generation = as_int(j, "generation");
  const json& verts = field(j, "vertices");
  if (!verts.is_array()) throw IoError(path + ": vertices: expected array");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    json holder;
    holder["vertices"] = verts[i];
    set.vertices.push_back(as_vec(holder, "vertices"));
    if (set.vertices.back().size() != set.dim)
      throw IoError(path + ": vertices: wrong dimension");
  }
  if (set.box_present &&
      (set.box_lo.size() != set.dim || set.box_hi.size() != set.dim))
    throw IoError(path + ": box bounds: wrong dimension");
  return set;
}

// --- model.json -------------------------------------------------------

void save_model(const std::string& path, const mlp::Params& params,
                const ModelMeta& meta) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"model\",\n";
  out << "  \"sizes\": [";
  for (std::size_t i = 0; i < params.sizes.size(); ++i) {
    if (i) out << ",";
    out << params.sizes[i];
  }
  out << "],\n";
  out << "  \"weights\": [";
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (l) out << ",";
    out << jmat(params.weights[l], "weights");
  }
  out << "],\n";
  out << "  \"biases\": [";
  for (std::size_t l = 0; l < params.biases.size(); ++l) {
    if (l) out << ",";
    out << jvec(params.biases[l], "biases");
  }
  out << "],\n";
  out << "  \"frozen\": [";
  for (std::size_t l = 0; l < params.frozen.size(); ++l) {
    if (l) out << ",";
    out << (params.frozen[l] ? "true" : "false");
  }
  out << "],\n";
  out << "  \"norm_center\": " << jvec(params.norm.center, "norm_center")
      << ",\n";
  out << "  \"norm_half\": " << jvec(params.norm.half, "norm_half") << ",\n";
  out << "  \"seed\": \"" << meta.seed << "\",\n";
  out << "  \"epochs\": " << meta.epochs << ",\n";
  out << "  \"source_window\": " << meta.source_window << "\n";
  out << "}\n";
  write_file(path, out.str());
}

std::pair<mlp::Params, ModelMeta> load_model(const std::string& path) {
  const json j = parse_file(path);
  expect_kind(j, path, "model");
  mlp::Params p;
  const json& sizes = field(j, "sizes");
  if (!sizes.is_array()) throw IoError(path + ": sizes: expected array");
  for (const auto& s : sizes) {
    if (!s.is_number_integer())
      throw IoError(path + ": sizes: expected integers");
    p.sizes.push_back(s.get<int>());
  }
  if (p.sizes.size() < 2) throw IoError(path + ": sizes: too few layers");
  const std::size_t layers = p.sizes.size() - 1;

  const json& weights = field(j, "weights");
  const json& biases = field(j, "biases");
  const json& frozen = field(j, "frozen");
  if (!weights.is_array() || weights.size() != layers)
    throw IoError(path + ": weights: expected one matrix per layer");
  if (!biases.is_array() || biases.size() != layers)
    throw IoError(path + ": biases: expected one vector per layer");
  if (!frozen.is_array() || frozen.size() != layers)
    throw IoError(path + ": frozen: expected one flag per layer");

  for (std::size_t l = 0; l < layers; ++l) {
    json holder;
    holder["weights"] = weights[l];
    p.weights.push_back(as_mat(holder, "weights"));
    holder["biases"] = biases[l];
    p.biases.push_back(as_vec(holder, "biases"));
    if (!frozen[l].is_boolean())
      throw IoError(path + ": frozen: expected booleans");
    p.frozen.push_back(frozen[l].get<bool>());
    if (p.weights[l].rows() != p.sizes[l + 1] ||
        p.weights[l].cols() != p.sizes[l] ||
        p.biases[l].size() != p.sizes[l + 1])
      throw IoError(path + ": layer " + std::to_string(l) +
                    ": shape does not match sizes");
  }
  p.norm.center = as_vec(j, "norm_center");
  p.norm.half = as_vec(j, "norm_half");
  if (p.norm.center.size() != p.sizes.front() ||
      p.norm.half.size() != p.sizes.front())
    throw IoError(path + ": normalization: wrong input dimension");

  ModelMeta meta;
  const std::string seed = as_str(j, "seed");
  try {
    std::size_t used = 0;
    meta.seed = std::stoull(seed, &used);
    if (used != seed.size()) throw std::invalid_argument(seed);
  } catch (const std::exception&) {
    throw IoError(path + ": bad seed '" + seed + "'");
  }
  meta.epochs = static_cast<int>(as_int(j, "epochs"));
  meta.source_window = static_cast<int>(as_int(j, "source_window"));
  return {std::move(p), meta};
}

// --- report.json ------------------------------------------------------

void save_report(const std::string& path, const evaluation::EvalReport& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"kind\": \"report\",\n";
  out << "  \"tp\": " << r.tp << ",\n";
  out << "  \"fp\": " << r.fp << ",\n";
  out << "  \"fn\": " << r.fn << ",\n";
  out << "  \"tn\": " << r.tn << ",\n";
  out << "  \"precision\": " << jnum(r.precision, "precision") << ",\n";
  out << "  \"recall\": " << jnum(r.recall, "recall") << ",\n";
  out << "  \"f1\": " << jnum(r.f1, "f1") << ",\n";
  out << "  \"accuracy\": " << jnum(r.accuracy, "accuracy") << ",\n";
  out << "  \"classify_per_sample_s\": "
      << jnum(r.timing.classify_per_sample_s, "classify_per_sample_s")
      << ",\n";
  out << "  \"oracle_per_sample_s\": "
      << jnum(r.timing.oracle_per_sample_s, "oracle_per_sample_s") << "\n";
  out << "}\n";
  write_file(path, out.str());
}

// --- samples.csv ------------------------------------------------------

namespace {

std::string sample_header(Eigen::Index t, bool labeled) {
  std::string h;
  for (Eigen::Index k = 0; k < t; ++k) {
    if (k) h += ",";
    h += "p0_" + std::to_string(k + 1);
  }
  if (labeled) h += ",label,provenance";
  return h;
}

bool all_labeled(const std::vector<oracle::SamplePoint>& samples) {
  for (const auto& s : samples)
    if (s.label == oracle::Label::Unlabeled) return false;
  return true;
}

}  // namespace

void save_samples(const std::string& path,
                  const std::vector<oracle::SamplePoint>& samples) {
  if (samples.empty())
    throw IoError("save_samples: empty set has no column layout");
  const Eigen::Index t = samples.front().p0.size();
  const bool labeled = all_labeled(samples);
  std::ostringstream out;
  out << sample_header(t, labeled) << "\n";
  for (const auto& s : samples) {
    if (s.p0.size() != t) throw IoError("save_samples: ragged profiles");
    for (Eigen::Index k = 0; k < t; ++k) {
      if (k) out << ",";
      out << format_double(s.p0[k]);
    }
    if (labeled)
      out << "," << static_cast<int>(s.label) << ","
          << provenance_word(s.provenance);
    out << "\n";
  }
  write_file(path, out.str());
}

std::vector<oracle::SamplePoint> load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  const auto head = split_csv_line(line);

  std::size_t t = 0;
  while (t < head.size() && head[t] == "p0_" + std::to_string(t + 1)) ++t;
  if (t == 0) throw IoError(path + ": header must start with p0_1");
  bool labeled = false;
  if (t == head.size()) {
    labeled = false;
  } else if (t + 2 == head.size() && head[t] == "label" &&
             head[t + 1] == "provenance") {
    labeled = true;
  } else {
    throw IoError(path + ": unexpected columns after profiles");
  }

  std::vector<oracle::SamplePoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != head.size())
      throw IoError(path + ": row has " + std::to_string(tok.size()) +
                    " fields, header has " + std::to_string(head.size()));
    oracle::SamplePoint s;
    s.p0.resize(static_cast<Eigen::Index>(t));
    for (std::size_t k = 0; k < t; ++k)
      s.p0[static_cast<Eigen::Index>(k)] = parse_num(tok[k], path);
    if (labeled) {
      s.label = parse_label(parse_long(tok[t], path), path);
      s.provenance = parse_provenance(tok[t + 1], path);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void save_classified(const std::string& path,
                     const std::vector<oracle::SamplePoint>& samples,
                     const Eigen::VectorXi& predicted,
                     const Eigen::VectorXd& posterior) {
  if (samples.empty())
    throw IoError("save_classified: empty set has no column layout");
  if (predicted.size() != static_cast<Eigen::Index>(samples.size()) ||
      posterior.size() != predicted.size())
    throw DimensionMismatch(
        "save_classified: predictions do not match the sample count");
  const Eigen::Index t = samples.front().p0.size();
  const bool labeled = all_labeled(samples);
  std::ostringstream out;
  out << sample_header(t, labeled) << ",predicted,posterior\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.p0.size() != t) throw IoError("save_classified: ragged profiles");
    for (Eigen::Index k = 0; k < t; ++k) {
      if (k) out << ",";
      out << format_double(s.p0[k]);
    }
    if (labeled)
      out << "," << static_cast<int>(s.label) << ","
          << provenance_word(s.provenance);
    out << "," << predicted[static_cast<Eigen::Index>(i)] << ","
        << format_double(posterior[static_cast<Eigen::Index>(i)]) << "\n";
  }
  write_file(path, out.str());
}

// --- experiment tables ------------------------------------------------

void save_history(const std::string& path,
                  const active_loop::RunResult& result) {
  std::ostringstream out;
  out << "epoch,f1,precision,recall,oracle_calls,hull_labels,mean_loss\n";
  const auto row = [&](const active_loop::HistoryRow& h) {
    out << h.epoch << "," << format_double(h.f1) << ","
        << format_double(h.precision) << "," << format_double(h.recall) << ","
        << h.oracle_calls << "," << h.hull_labels << ","
        << format_double(h.mean_loss) << "\n";
  };
  row(result.initial);
  for (const auto& h : result.history) row(h);
  write_file(path, out.str());
}

void save_grid(const std::string& path,
               const std::vector<evaluation::GridRow>& rows) {
  std::ostringstream out;
  out << "x,y,posterior,uncertainty,oracle\n";
  for (const auto& r : rows)
    out << format_double(r.x) << "," << format_double(r.y) << ","
        << format_double(r.posterior) << "," << format_double(r.uncertainty)
        << "," << r.oracle << "\n";
  write_file(path, out.str());
}

void save_rolling(const std::string& path,
                  const std::vector<evaluation::WindowRow>& rows) {
  std::ostringstream out;
  out << "window,epoch,f1_warm,f1_cold\n";
  for (const auto& r : rows)
    out << r.window << "," << r.epoch << "," << format_double(r.f1_warm)
        << "," << format_double(r.f1_cold) << "\n";
  write_file(path, out.str());
}

void save_robustness(const std::string& path,
                     const std::vector<evaluation::LevelRow>& rows) {
  std::ostringstream out;
  out << "level,f1,precision,recall,scenarios_retried\n";
  for (const auto& r : rows)
    out << format_double(r.level) << "," << format_double(r.f1) << ","
        << format_double(r.precision) << "," << format_double(r.recall)
        << "," << r.scenarios_retried << "\n";
  write_file(path, out.str());
}

}  // namespace dsfs::io
