#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drpose/augment.hpp"
#include "drpose/camera.hpp"
#include "drpose/ranking.hpp"
#include "drpose/skeleton.hpp"
#include "drpose/trainer.hpp"

namespace drpose::io {

namespace fs = std::filesystem;

// Shortest round-trip decimal representation.
std::string format_double(double v);

struct CsvRow {
  std::size_t line = 0;
  std::vector<double> values;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

// Numeric CSV with an optional header line. Every data row must have the
// same number of fields as the header (or the first row without one).
// Throws ParseError carrying the offending line number.
CsvTable read_csv(const fs::path& path, bool has_header = true);

// Writes via a temporary file and rename; nothing is left behind on failure.
void write_text_atomic(const fs::path& path, const std::string& content);

std::vector<std::string> pose3d_header();
std::vector<std::string> pose2d_header();
std::vector<std::string> ranking_header();

std::string poses3d_csv(const std::vector<Pose3D>& poses);
std::string world_poses_csv(const std::vector<WorldPose>& poses);
std::string poses2d_csv(const std::vector<Pose2D>& poses);
std::string rankings_csv(const std::vector<RankingMatrix>& ms);
std::string cameras_csv(const std::vector<Camera>& cams);
std::string dataset_csv(const Dataset& data);
std::string topology_csv(const SkeletonTopology& topo);
std::string accuracy_csv(const AccuracyMatrix& acc);
std::string history_csv(const std::vector<EpochRecord>& history);

// Pose files may carry leading pose_id,subject columns (as written by
// world_poses_csv); they are ignored by read_poses3d.
std::vector<Pose3D> read_poses3d(const fs::path& path);
std::vector<WorldPose> read_world_poses(const fs::path& path);
std::vector<Pose2D> read_poses2d(const fs::path& path);
std::vector<RankingMatrix> read_rankings(const fs::path& path);
std::vector<Camera> read_cameras(const fs::path& path);
Dataset read_dataset(const fs::path& path);
SkeletonTopology read_topology(const fs::path& path);
AccuracyMatrix read_accuracy(const fs::path& path);

// Versioned JSON dump of architecture, parameters, normalization statistics
// and training config. load_model rejects layer shapes that do not match the
// stored architecture.
std::string model_json(const Model& model);
Model load_model(const fs::path& path);
Model parse_model(const std::string& text, const std::string& origin = "<model>");

}  // namespace drpose::io
