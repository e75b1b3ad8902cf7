#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/mrf.hpp"
#include "specnce/optimize.hpp"

namespace specnce::io {

// CSV conventions: RFC-4180 fields, LF line endings, '.' decimal separator,
// doubles printed with 17 significant digits (round-trip exact).

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path.string());
  out << content;
  require(out.good(), ErrorCode::IoError, "write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  write_text(path, matrix_to_csv(m));
}

inline void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += format_double(v(i)) + "\n";
  write_text(path, out);
}

inline std::vector<std::vector<double>> parse_csv(const std::string& text,
                                                  const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::istringstream stream(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        require(used == field.size(), ErrorCode::IoError,
                origin + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
        row.push_back(v);
      } catch (const std::invalid_argument&) {
        fail(ErrorCode::IoError,
             origin + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::IoError, origin + ": empty file");
  std::size_t width = rows.front().size();
  for (const auto& r : rows)
    require(r.size() == width, ErrorCode::IoError, origin + ": ragged rows");
  return rows;
}

inline Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto rows = parse_csv(read_text(path), path.string());
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

/// Loads a similarity graph from either supported layout, detected by
/// column count: a square block of n rows x n columns is a dense weight
/// matrix; three columns with a non-matching row count is an edge list
/// `i,j,w` with 0-based indices. A square 3x3 file reads as dense.
inline graph::SimilarityGraph load_graph(const std::filesystem::path& path,
                                         bool require_symmetric = false) {
  auto rows = parse_csv(read_text(path), path.string());
  const std::size_t ncols = rows.front().size();
  if (ncols == rows.size()) {
    Eigen::MatrixXd m(rows.size(), ncols);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < ncols; ++j) m(i, j) = rows[i][j];
    return graph::from_dense(std::move(m), require_symmetric);
  }
  require(ncols == 3, ErrorCode::IoError,
          path.string() + ": expected a square matrix or an i,j,w edge list");
  Eigen::Index n = 0;
  for (const auto& r : rows) {
    require(r[0] >= 0 && r[1] >= 0 && r[0] == std::floor(r[0]) && r[1] == std::floor(r[1]),
            ErrorCode::IoError, path.string() + ": edge indices must be nonnegative integers");
    n = std::max<Eigen::Index>(n, static_cast<Eigen::Index>(std::max(r[0], r[1])) + 1);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : rows)
    m(static_cast<Eigen::Index>(r[0]), static_cast<Eigen::Index>(r[1])) += r[2];
  return graph::from_dense(std::move(m), require_symmetric);
}

inline void write_labels_csv(const std::filesystem::path& path,
                             const std::vector<int>& labels) {
  std::string out;
  for (int l : labels) out += std::to_string(l) + "\n";
  write_text(path, out);
}

inline std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  auto rows = parse_csv(read_text(path), path.string());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const auto& r : rows) {
    require(r.size() == 1, ErrorCode::IoError, path.string() + ": one label per line");
    labels.push_back(static_cast<int>(r[0]));
  }
  return labels;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<optimize::TracePoint>& trace) {
  std::string out = "iter,loss,grad_norm\n";
  for (const auto& t : trace)
    out += std::to_string(t.iter) + "," + format_double(t.loss) + "," +
           format_double(t.grad_norm) + "\n";
  write_text(path, out);
}

inline void write_pairs_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<int, int>>& pairs) {
  std::string out;
  for (const auto& [a, b] : pairs)
    out += std::to_string(a) + "," + std::to_string(b) + "\n";
  write_text(path, out);
}

inline std::vector<std::pair<int, int>> read_pairs_csv(const std::filesystem::path& path) {
  auto rows = parse_csv(read_text(path), path.string());
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(rows.size());
  for (const auto& r : rows) {
    require(r.size() == 2, ErrorCode::IoError, path.string() + ": expected a,b per line");
    pairs.emplace_back(static_cast<int>(r[0]), static_cast<int>(r[1]));
  }
  return pairs;
}

/// Dumps an enumerated subgraph distribution, one line per subgraph:
/// j(0),...,j(n-1),prob in enumeration order.
inline void write_enumeration_csv(const std::filesystem::path& path,
                                  const mrf::EnumeratedDistribution& dist) {
  std::string out;
  for (std::size_t idx = 0; idx < dist.count(); ++idx) {
    mrf::Subgraph w = dist.subgraph_at(idx);
    for (int i = 0; i < dist.n; ++i) out += std::to_string(w.targets[i]) + ",";
    out += format_double(dist.probs[idx]) + "\n";
  }
  write_text(path, out);
}

/// Minimal 2-D scatter plot, one <circle> per point, fill keyed by label.
inline void write_scatter_svg(const std::filesystem::path& path,
                              const Eigen::MatrixXd& points,
                              const std::vector<int>& labels) {
  require(points.cols() == 2, ErrorCode::DimensionMismatch,
          "scatter plot needs 2-D points");
  require(labels.size() == static_cast<std::size_t>(points.rows()),
          ErrorCode::LengthMismatch, "one label per point");
  static const std::array<const char*, 10> palette = {
      "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
      "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac"};
  const double w = 640.0, h = 480.0, margin = 24.0;
  double xmin = points.col(0).minCoeff(), xmax = points.col(0).maxCoeff();
  double ymin = points.col(1).minCoeff(), ymax = points.col(1).maxCoeff();
  double xspan = std::max(xmax - xmin, 1e-12);
  double yspan = std::max(ymax - ymin, 1e-12);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                    "height=\"480\" viewBox=\"0 0 640 480\">\n"
                    "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double cx = margin + (points(i, 0) - xmin) / xspan * (w - 2 * margin);
    double cy = h - margin - (points(i, 1) - ymin) / yspan * (h - 2 * margin);
    const char* color = palette[static_cast<std::size_t>(
        ((labels[i] % 10) + 10) % 10)];
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", cx, cy,
                  color);
    out += buf;
  }
  out += "</svg>\n";
  write_text(path, out);
}

}  // namespace specnce::io
