#include "dialstruct/formats.hpp"

#include <fstream>
#include <sstream>

#include "dialstruct/error.hpp"

namespace dialstruct {

using nlohmann::json;

namespace {

json make_header(const char* format, const json& extra) {
  json h = {{"format", format}, {"version", kFormatVersion}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) h[k] = v;
  return h;
}

// Calls fn(json, line) for the header and then each record line.
template <typename HeaderFn, typename RecordFn>
void for_each_line(const std::string& text, const char* format, HeaderFn on_header, RecordFn on_record) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      if (!header) {
        check_header(j, format, lineno);
        on_header(j);
        header = true;
      } else {
        on_record(j, lineno);
      }
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!header) throw ParseError(lineno, std::string("missing ") + format + " header line");
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void check_header(const json& header, const std::string& format, std::size_t line) {
  if (!header.is_object() || header.value("format", std::string{}) != format) {
    throw ParseError(line, "expected header with format '" + format + "'");
  }
  if (header.value("version", 0) != kFormatVersion) {
    throw ParseError(line, "unsupported " + format + " version");
  }
}

std::string embeddings_to_text(const std::vector<UtteranceEmbeddings>& es, const json& extra_header) {
  std::string out = make_header(kEmbeddingFormatName, extra_header).dump() + "\n";
  for (const auto& e : es) {
    const auto n = e.vectors.rows();
    const auto d = e.vectors.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(n * d));
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < d; ++c) data.push_back(e.vectors(r, c));
    out += json{{"id", e.dialogue_id}, {"kind", to_string(e.kind)}, {"n", n}, {"d", d}, {"data", data}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<UtteranceEmbeddings> parse_embeddings_text(const std::string& text) {
  std::vector<UtteranceEmbeddings> out;
  for_each_line(
      text, kEmbeddingFormatName, [](const json&) {},
      [&](const json& j, std::size_t line) {
        UtteranceEmbeddings e;
        e.dialogue_id = j.at("id").get<std::string>();
        try {
          e.kind = embedding_kind_from_string(j.at("kind").get<std::string>());
        } catch (const InvalidArgument& err) {
          throw ParseError(line, err.what());
        }
        const auto n = j.at("n").get<std::size_t>();
        const auto d = j.at("d").get<std::size_t>();
        const auto data = j.at("data").get<std::vector<double>>();
        if (d < 1) throw ParseError(line, "embedding dimension must be >= 1");
        if (data.size() != n * d) throw ParseError(line, "data length does not match n*d");
        e.vectors.resize(Eigen::Index(n), Eigen::Index(d));
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < d; ++c) e.vectors(Eigen::Index(r), Eigen::Index(c)) = data[r * d + c];
        if (!e.vectors.allFinite()) throw ParseError(line, "embedding contains NaN/Inf");
        out.push_back(std::move(e));
      });
  return out;
}

std::string to_string(MatrixKind k) { return k == MatrixKind::topic ? "topic" : "rhetorical"; }

MatrixKind matrix_kind_from_string(const std::string& s) {
  if (s == "topic") return MatrixKind::topic;
  if (s == "rhetorical") return MatrixKind::rhetorical;
  throw InvalidArgument("unknown matrix kind '" + s + "'");
}

std::string matrices_to_text(MatrixKind kind, const std::vector<std::pair<std::string, ScoreMatrix>>& ms,
                             const json& extra_header) {
  json extra = extra_header.is_object() ? extra_header : json::object();
  extra["kind"] = to_string(kind);
  std::string out = make_header(kMatrixFormatName, extra).dump() + "\n";
  for (const auto& [id, m] : ms) {
    out += json{{"id", id}, {"n", m.n()}, {"upper", upper_entries(m)}}.dump();
    out += '\n';
  }
  return out;
}

MatrixFile parse_matrices_text(const std::string& text) {
  MatrixFile out;
  for_each_line(
      text, kMatrixFormatName,
      [&](const json& h) {
        out.header = h;
        try {
          out.kind = matrix_kind_from_string(h.at("kind").get<std::string>());
        } catch (const InvalidArgument& e) {
          throw ParseError(1, e.what());
        }
      },
      [&](const json& j, std::size_t line) {
        const auto id = j.at("id").get<std::string>();
        const auto n = j.at("n").get<std::size_t>();
        const auto upper = j.at("upper").get<std::vector<double>>();
        try {
          out.matrices.insert_or_assign(id, ScoreMatrix::from_upper(n, upper));
        } catch (const Error& e) {
          throw ParseError(line, e.what());
        }
        out.order.push_back(id);
      });
  return out;
}

namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::MatrixXd from_row_major(const std::vector<double>& v, std::size_t n) {
  if (v.size() != n * n) throw ParseError(0, "matrix length does not match n_max^2");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(Eigen::Index(r), Eigen::Index(c)) = v[r * n + c];
  return m;
}

}  // namespace

std::string params_to_text(const ModelParams& p, const json& config_echo, std::uint64_t seed) {
  json j = {{"format", kParamsFormatName},
            {"version", kFormatVersion},
            {"n_max", p.n_max},
            {"weight_mode", p.mode == WeightMode::scalar ? "scalar" : "vector"},
            {"seed", seed},
            {"w_col", p.w_col},
            {"w_row", p.w_row},
            {"w_left", row_major(p.w_left)},
            {"w_right", row_major(p.w_right)},
            {"config", config_echo}};
  return j.dump(2) + "\n";
}

ModelParams parse_params_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  check_header(j, kParamsFormatName, 1);
  ModelParams p;
  try {
    p.n_max = j.at("n_max").get<std::size_t>();
    const auto mode = j.at("weight_mode").get<std::string>();
    if (mode != "scalar" && mode != "vector") throw ParseError(0, "unknown weight_mode " + mode);
    p.mode = mode == "scalar" ? WeightMode::scalar : WeightMode::vector;
    p.w_col = j.at("w_col").get<std::vector<double>>();
    p.w_row = j.at("w_row").get<std::vector<double>>();
    p.w_left = from_row_major(j.at("w_left").get<std::vector<double>>(), p.n_max);
    p.w_right = from_row_major(j.at("w_right").get<std::vector<double>>(), p.n_max);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  const std::size_t expected = p.mode == WeightMode::scalar ? 1 : p.n_max;
  if (p.w_col.size() != expected || p.w_row.size() != expected) {
    throw ParseError(0, "flow weight length does not match weight_mode");
  }
  if (!p.all_finite()) throw ParseError(0, "parameters contain NaN/Inf");
  return p;
}

std::string structures_to_text(const std::vector<PredictedStructure>& ss, const json& extra_header) {
  std::string out = make_header(kStructuresFormatName, extra_header).dump() + "\n";
  for (const auto& s : ss) {
    json arcs = json::array();
    for (const Arc& a : s.arcs) arcs.push_back({a.head, a.dependent});
    out += json{{"id", s.id}, {"n", s.n}, {"arcs", arcs}, {"boundaries", s.boundaries.boundaries()}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<PredictedStructure> parse_structures_text(const std::string& text) {
  std::vector<PredictedStructure> out;
  for_each_line(
      text, kStructuresFormatName, [](const json&) {},
      [&](const json& j, std::size_t line) {
        PredictedStructure s;
        s.id = j.at("id").get<std::string>();
        s.n = j.at("n").get<std::size_t>();
        for (const auto& a : j.at("arcs")) {
          Arc arc{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()};
          if (arc.head < 1 || arc.head > s.n || arc.dependent < 1 || arc.dependent > s.n) {
            throw ParseError(line, "arc index out of range");
          }
          s.arcs.insert(arc);
        }
        try {
          s.boundaries = Segmentation(s.n, j.at("boundaries").get<std::set<std::size_t>>());
        } catch (const IndexOutOfRange& e) {
          throw ParseError(line, e.what());
        }
        out.push_back(std::move(s));
      });
  return out;
}

}  // namespace dialstruct
