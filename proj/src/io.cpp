#include "drpose/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "drpose/errors.hpp"

namespace drpose::io {

using nlohmann::json;

namespace {

constexpr const char* kModelFormat = "drpose-dpnet";
constexpr int kModelVersion = 1;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

template <typename Range>
void append_values(std::string& line, const Range& values) {
  for (double v : values) {
    if (!line.empty()) line += ',';
    line += format_double(v);
  }
}

void require_columns(const CsvTable& t, const fs::path& path, std::size_t expected,
                     const std::string& what) {
  if (!t.header.empty() && t.header.size() != expected)
    throw ParseError(path.string(), 1,
                     what + " header must have " + std::to_string(expected) + " columns, got " +
                         std::to_string(t.header.size()));
  for (const auto& r : t.rows)
    if (r.values.size() != expected)
      throw ParseError(path.string(), r.line,
                       what + " record must have " + std::to_string(expected) + " values");
}

bool header_has_ids(const CsvTable& t) {
  return t.header.size() >= 2 && t.header[0] == "pose_id" && t.header[1] == "subject";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable read_csv(const fs::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (has_header && t.header.empty() && t.rows.empty()) {
      t.header = fields;
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError(path.string(), lineno,
                       "expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()));
    CsvRow row;
    row.line = lineno;
    row.values.reserve(fields.size());
    for (const auto& f : fields) {
      double v = 0.0;
      const auto* end = f.data() + f.size();
      const auto res = std::from_chars(f.data(), end, v);
      if (f.empty() || res.ec != std::errc() || res.ptr != end)
        throw ParseError(path.string(), lineno, "malformed number '" + f + "'");
      row.values.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (has_header && t.header.empty()) throw ParseError(path.string(), 0, "missing header line");
  return t;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::vector<std::string> pose3d_header() {
  std::vector<std::string> h;
  for (int j = 0; j < kNumJoints; ++j)
    for (const char* c : {"_x", "_y", "_z"}) h.push_back(std::string(joint_name(j)) + c);
  return h;
}

std::vector<std::string> pose2d_header() {
  std::vector<std::string> h;
  for (int j = 0; j < kNumJoints; ++j)
    for (const char* c : {"_x", "_y"}) h.push_back(std::string(joint_name(j)) + c);
  return h;
}

std::vector<std::string> ranking_header() {
  std::vector<std::string> h;
  for (int i = 0; i < kNumJoints; ++i)
    for (int j = 0; j < kNumJoints; ++j) h.push_back("m_" + std::to_string(i) + "_" + std::to_string(j));
  return h;
}

std::string poses3d_csv(const std::vector<Pose3D>& poses) {
  std::string out = join(pose3d_header()) + "\n";
  for (const auto& p : poses) {
    std::string line;
    append_values(line, p.flat());
    out += line + "\n";
  }
  return out;
}

std::string world_poses_csv(const std::vector<WorldPose>& poses) {
  std::string out = "pose_id,subject," + join(pose3d_header()) + "\n";
  for (const auto& p : poses) {
    std::string line = std::to_string(p.pose_id) + "," + std::to_string(p.subject);
    append_values(line, p.pose.flat());
    out += line + "\n";
  }
  return out;
}

std::string poses2d_csv(const std::vector<Pose2D>& poses) {
  std::string out = join(pose2d_header()) + "\n";
  for (const auto& p : poses) {
    std::string line;
    append_values(line, p.flat());
    out += line + "\n";
  }
  return out;
}

std::string rankings_csv(const std::vector<RankingMatrix>& ms) {
  std::string out = join(ranking_header()) + "\n";
  for (const auto& m : ms) {
    std::string line;
    append_values(line, m.entries());
    out += line + "\n";
  }
  return out;
}

std::string cameras_csv(const std::vector<Camera>& cams) {
  std::string out = "px,py,pz,r00,r01,r02,r10,r11,r12,r20,r21,r22,focal\n";
  for (const auto& c : cams) {
    std::string line;
    append_values(line, std::array<double, 3>{c.position.x(), c.position.y(), c.position.z()});
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) append_values(line, std::array<double, 1>{c.rotation(r, k)});
    append_values(line, std::array<double, 1>{c.focal});
    out += line + "\n";
  }
  return out;
}

std::string dataset_csv(const Dataset& data) {
  std::vector<std::string> h = {"pose_id", "subject", "camera", "augmented"};
  for (const auto& c : pose2d_header()) h.push_back("s2d_" + c);
  for (const auto& c : ranking_header()) h.push_back(c);
  for (const auto& c : pose3d_header()) h.push_back("s3d_" + c);
  std::string out = join(h) + "\n";
  for (const auto& s : data) {
    std::string line = std::to_string(s.pose_id) + "," + std::to_string(s.subject) + "," +
                       std::to_string(s.camera) + "," + (s.augmented ? "1" : "0");
    append_values(line, s.pose2d.flat());
    append_values(line, s.ranking.entries());
    append_values(line, s.pose3d.flat());
    out += line + "\n";
  }
  return out;
}

std::string topology_csv(const SkeletonTopology& topo) {
  std::string out = "joint,parent,bone_length\n";
  for (int j = 0; j < kNumJoints; ++j)
    out += std::to_string(j) + "," + std::to_string(topo.parent[static_cast<std::size_t>(j)]) + "," +
           format_double(topo.bone_length[static_cast<std::size_t>(j)]) + "\n";
  return out;
}

std::string accuracy_csv(const AccuracyMatrix& acc) {
  std::string out;
  for (int i = 0; i < kNumJoints; ++i) {
    std::string line;
    for (int j = 0; j < kNumJoints; ++j) append_values(line, std::array<double, 1>{acc(i, j)});
    out += line + "\n";
  }
  return out;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,learning_rate,train_loss,val_loss\n";
  for (const auto& r : history)
    out += std::to_string(r.epoch) + "," + format_double(r.learning_rate) + "," +
           format_double(r.train_loss) + "," + format_double(r.val_loss) + "\n";
  return out;
}

std::vector<WorldPose> read_world_poses(const fs::path& path) {
  const auto t = read_csv(path);
  const bool ids = header_has_ids(t);
  const std::size_t skip = ids ? 2 : 0;
  require_columns(t, path, skip + 3 * kNumJoints, "3D pose");
  std::vector<WorldPose> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    WorldPose wp;
    wp.pose = Pose3D::from_flat(std::span<const double>(r.values).subspan(skip));
    if (!wp.pose.finite()) throw ParseError(path.string(), r.line, "non-finite coordinate");
    wp.pose_id = ids ? static_cast<int>(r.values[0]) : static_cast<int>(i);
    wp.subject = ids ? static_cast<int>(r.values[1]) : 0;
    out.push_back(wp);
  }
  return out;
}

std::vector<Pose3D> read_poses3d(const fs::path& path) {
  std::vector<Pose3D> out;
  for (const auto& wp : read_world_poses(path)) out.push_back(wp.pose);
  return out;
}

std::vector<Pose2D> read_poses2d(const fs::path& path) {
  const auto t = read_csv(path);
  require_columns(t, path, 2 * kNumJoints, "2D pose");
  std::vector<Pose2D> out;
  for (const auto& r : t.rows) {
    auto p = Pose2D::from_flat(r.values);
    if (!p.finite()) throw ParseError(path.string(), r.line, "non-finite coordinate");
    out.push_back(p);
  }
  return out;
}

std::vector<RankingMatrix> read_rankings(const fs::path& path) {
  const auto t = read_csv(path);
  require_columns(t, path, kNumPairs, "ranking matrix");
  std::vector<RankingMatrix> out;
  for (const auto& r : t.rows) {
    try {
      out.push_back(RankingMatrix::from_entries(r.values));
    } catch (const InputError& e) {
      throw ParseError(path.string(), r.line, e.what());
    }
  }
  return out;
}

std::vector<Camera> read_cameras(const fs::path& path) {
  const auto t = read_csv(path);
  require_columns(t, path, 13, "camera");
  std::vector<Camera> out;
  for (const auto& r : t.rows) {
    Camera c;
    c.position = Vec3(r.values[0], r.values[1], r.values[2]);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) c.rotation(i, k) = r.values[static_cast<std::size_t>(3 + 3 * i + k)];
    c.focal = r.values[12];
    if (!c.valid(1e-6)) throw ParseError(path.string(), r.line, "camera rotation is not a valid upright rotation");
    if (!(c.focal > 0.0)) throw ParseError(path.string(), r.line, "focal length must be positive");
    out.push_back(c);
  }
  return out;
}

Dataset read_dataset(const fs::path& path) {
  const auto t = read_csv(path);
  constexpr std::size_t kWidth = 4 + 2 * kNumJoints + kNumPairs + 3 * kNumJoints;
  require_columns(t, path, kWidth, "dataset");
  Dataset out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    const std::span<const double> v(r.values);
    Sample s;
    s.pose_id = static_cast<int>(v[0]);
    s.subject = static_cast<int>(v[1]);
    s.camera = static_cast<int>(v[2]);
    s.augmented = v[3] != 0.0;
    s.pose2d = Pose2D::from_flat(v.subspan(4, 2 * kNumJoints));
    try {
      s.ranking = RankingMatrix::from_entries(v.subspan(4 + 2 * kNumJoints, kNumPairs));
    } catch (const InputError& e) {
      throw ParseError(path.string(), r.line, e.what());
    }
    s.pose3d = Pose3D::from_flat(v.subspan(4 + 2 * kNumJoints + kNumPairs, 3 * kNumJoints));
    if (!s.pose2d.finite() || !s.pose3d.finite())
      throw ParseError(path.string(), r.line, "non-finite coordinate");
    out.push_back(s);
  }
  return out;
}

SkeletonTopology read_topology(const fs::path& path) {
  const auto t = read_csv(path);
  require_columns(t, path, 3, "topology");
  if (t.rows.size() != static_cast<std::size_t>(kNumJoints))
    throw ParseError(path.string(), t.rows.empty() ? 1 : t.rows.back().line,
                     "topology must list exactly 16 joints");
  SkeletonTopology topo;
  std::array<bool, kNumJoints> seen{};
  for (const auto& r : t.rows) {
    const int j = static_cast<int>(r.values[0]);
    if (j < 0 || j >= kNumJoints || seen[static_cast<std::size_t>(j)] || r.values[0] != j)
      throw ParseError(path.string(), r.line, "invalid or duplicate joint index");
    seen[static_cast<std::size_t>(j)] = true;
    topo.parent[static_cast<std::size_t>(j)] = static_cast<int>(r.values[1]);
    topo.bone_length[static_cast<std::size_t>(j)] = r.values[2];
  }
  try {
    topo.validate();
  } catch (const InputError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return topo;
}

AccuracyMatrix read_accuracy(const fs::path& path) {
  const auto t = read_csv(path, false);
  require_columns(t, path, kNumJoints, "accuracy matrix");
  if (t.rows.size() != static_cast<std::size_t>(kNumJoints))
    throw ParseError(path.string(), t.rows.empty() ? 1 : t.rows.back().line,
                     "accuracy matrix must have 16 rows");
  AccuracyMatrix acc;
  for (int i = 0; i < kNumJoints; ++i)
    for (int j = 0; j < kNumJoints; ++j) {
      const double p = t.rows[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(j)];
      if (!(p >= 0.0 && p <= 1.0))
        throw ParseError(path.string(), t.rows[static_cast<std::size_t>(i)].line,
                         "accuracy entries must lie in [0, 1]");
      acc.p[RankingMatrix::index(i, j)] = p;
    }
  return acc;
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j, Eigen::Index expected, const std::string& what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected)
    throw StructuralError("model: " + what + " has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

}  // namespace

std::string model_json(const Model& model) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  const auto& a = model.params.arch();
  j["architecture"] = {{"hidden_width", a.hidden_width},
                       {"depthnet_hidden_layers", a.depthnet_hidden_layers},
                       {"use_depthnet", a.use_depthnet}};
  json layers = json::array();
  for (const auto& l : model.params.layers()) layers.push_back({{"out", l.out}, {"in", l.in}});
  j["layers"] = layers;
  j["values"] = vec_json(model.params.values());
  const auto& t = model.train_config;
  j["train_config"] = {{"learning_rate", t.learning_rate}, {"decay", t.decay},
                       {"epochs", t.epochs},               {"batch_size", t.batch_size},
                       {"dropout_p", t.dropout_p},         {"beta1", t.adam.beta1},
                       {"beta2", t.adam.beta2},            {"adam_epsilon", t.adam.epsilon},
                       {"seed", t.seed}};
  j["rank_input"] = model.rank_input == RankInput::Constant ? "constant" : "as_is";
  if (model.stats) {
    j["stats"] = {{"pose2d_mean", vec_json(model.stats->pose2d_mean)},
                  {"pose2d_std", vec_json(model.stats->pose2d_std)},
                  {"pose3d_mean", vec_json(model.stats->pose3d_mean)},
                  {"pose3d_std", vec_json(model.stats->pose3d_std)}};
  }
  return j.dump() + "\n";
}

Model parse_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin, 0, std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (j.at("format") != kModelFormat) throw StructuralError("model: unknown format");
    if (j.at("version").get<int>() != kModelVersion) throw StructuralError("model: unsupported version");
    Architecture a;
    a.hidden_width = j.at("architecture").at("hidden_width").get<int>();
    a.depthnet_hidden_layers = j.at("architecture").at("depthnet_hidden_layers").get<int>();
    a.use_depthnet = j.at("architecture").at("use_depthnet").get<bool>();
    Model m;
    m.params = DPNetParams(a);
    const auto& layers = j.at("layers");
    if (layers.size() != m.params.layers().size())
      throw StructuralError("model: layer count does not match architecture");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto& expect = m.params.layers()[k];
      if (layers[k].at("out").get<int>() != expect.out || layers[k].at("in").get<int>() != expect.in)
        throw StructuralError("model: layer " + std::to_string(k) + " shape does not match architecture");
    }
    m.params.values() = json_vec(j.at("values"), m.params.values().size(), "parameter vector");
    const auto& t = j.at("train_config");
    m.train_config.learning_rate = t.at("learning_rate").get<double>();
    m.train_config.decay = t.at("decay").get<double>();
    m.train_config.epochs = t.at("epochs").get<int>();
    m.train_config.batch_size = t.at("batch_size").get<int>();
    m.train_config.dropout_p = t.at("dropout_p").get<double>();
    m.train_config.adam.beta1 = t.at("beta1").get<double>();
    m.train_config.adam.beta2 = t.at("beta2").get<double>();
    m.train_config.adam.epsilon = t.at("adam_epsilon").get<double>();
    m.train_config.seed = t.at("seed").get<std::uint64_t>();
    m.rank_input = j.at("rank_input") == "constant" ? RankInput::Constant : RankInput::AsIs;
    if (j.contains("stats")) {
      const auto& s = j.at("stats");
      NormStats st;
      st.pose2d_mean = json_vec(s.at("pose2d_mean"), kPose2DDim, "pose2d_mean");
      st.pose2d_std = json_vec(s.at("pose2d_std"), kPose2DDim, "pose2d_std");
      st.pose3d_mean = json_vec(s.at("pose3d_mean"), kPose3DDim, "pose3d_mean");
      st.pose3d_std = json_vec(s.at("pose3d_std"), kPose3DDim, "pose3d_std");
      m.stats = st;
    }
    return m;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("model: ") + e.what());
  }
}

Model load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open model file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

}  // namespace drpose::io
