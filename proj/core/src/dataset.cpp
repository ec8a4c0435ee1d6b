#include "cdmafs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace {

std::vector<double> parse_csv_line(const std::string& line,
                                   const std::string& path, int lineno) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      row.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": cannot parse value '" + cell + "'");
    }
  }
  return row;
}

Matrix load_dense_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open view file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && skip_header) continue;
    if (line.empty()) continue;
    rows.push_back(parse_csv_line(line, path, lineno));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": ragged row (expected " +
                      std::to_string(rows.front().size()) + " columns)");
  }
  if (rows.empty()) throw DataError(path + ": empty view file");
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw DataError(what + " contains non-finite values");
}

}  // namespace

Matrix load_sparse_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open view file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '%')
    throw DataError(path + ": sparse COO file must start with '%n D'");
  long n = 0, d = 0;
  if (std::sscanf(line.c_str(), "%% %ld %ld", &n, &d) != 2 &&
      std::sscanf(line.c_str(), "%%%ld %ld", &n, &d) != 2)
    throw DataError(path + ": malformed dimension line: " + line);
  if (n <= 0 || d <= 0) throw DataError(path + ": non-positive dimensions");
  Matrix m = Matrix::Zero(n, d);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long r = 0, c = 0;
    double v = 0.0;
    char sep1 = 0, sep2 = 0;
    std::stringstream ss(line);
    if (!(ss >> r >> sep1 >> c >> sep2 >> v) || sep1 != ',' || sep2 != ',')
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 'row,col,value'");
    if (r < 0 || r >= n || c < 0 || c >= d)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": index out of range");
    m(r, c) = v;
  }
  return m;
}

void MultiViewDataset::validate() const {
  if (views.size() < 2)
    throw DataError("multi-view dataset needs at least 2 views, got " +
                    std::to_string(views.size()));
  const Eigen::Index n = views.front().rows();
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (views[v].rows() != n)
      throw DataError("view " + std::to_string(v) + " has " +
                      std::to_string(views[v].rows()) + " rows, expected " +
                      std::to_string(n));
    if (views[v].cols() < 1)
      throw DataError("view " + std::to_string(v) + " has no features");
    check_finite(views[v].data, "view " + std::to_string(v));
    if (!views[v].feature_names.empty() &&
        static_cast<Eigen::Index>(views[v].feature_names.size()) !=
            views[v].cols())
      throw DataError("view " + std::to_string(v) +
                      ": feature name count mismatch");
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n)
    throw DataError("label count " + std::to_string(labels.size()) +
                    " does not match instance count " + std::to_string(n));
}

MultiViewDataset load_dataset(const std::vector<std::string>& paths,
                              const std::vector<ViewFormat>& formats,
                              const std::string& label_path,
                              bool skip_header) {
  if (paths.size() != formats.size())
    throw ConfigError("one format per view path required");
  MultiViewDataset ds;
  for (std::size_t v = 0; v < paths.size(); ++v) {
    ViewMatrix view;
    view.data = formats[v] == ViewFormat::DenseCsv
                    ? load_dense_csv(paths[v], skip_header)
                    : load_sparse_matrix(paths[v]);
    ds.views.push_back(std::move(view));
  }
  if (!label_path.empty()) {
    std::ifstream in(label_path);
    if (!in) throw DataError("cannot open label file: " + label_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        ds.labels.push_back(std::stoi(line));
      } catch (const std::exception&) {
        throw DataError(label_path + ": cannot parse label '" + line + "'");
      }
    }
  }
  ds.validate();
  return ds;
}

void save_view(const ViewMatrix& view, const std::string& path,
               ViewFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write view file: " + path);
  out.precision(17);
  if (format == ViewFormat::DenseCsv) {
    for (Eigen::Index i = 0; i < view.rows(); ++i) {
      for (Eigen::Index j = 0; j < view.cols(); ++j) {
        if (j) out << ',';
        out << view.data(i, j);
      }
      out << '\n';
    }
  } else {
    out << '%' << view.rows() << ' ' << view.cols() << '\n';
    for (Eigen::Index i = 0; i < view.rows(); ++i)
      for (Eigen::Index j = 0; j < view.cols(); ++j)
        if (view.data(i, j) != 0.0)
          out << i << ',' << j << ',' << view.data(i, j) << '\n';
  }
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write label file: " + path);
  for (int c : labels) out << c << '\n';
}

std::vector<ZeroRow> normalize_unit_length(MultiViewDataset& dataset) {
  std::vector<ZeroRow> zero_rows;
  for (std::size_t v = 0; v < dataset.views.size(); ++v) {
    Matrix& x = dataset.views[v].data;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double norm = x.row(i).norm();
      if (norm == 0.0) {
        zero_rows.push_back({static_cast<int>(v), static_cast<int>(i)});
      } else {
        x.row(i) /= norm;
      }
    }
  }
  return zero_rows;
}

MultiViewDataset generate_synthetic(int n, int clusters,
                                    int per_view_informative,
                                    int per_view_noise, double noise_scale,
                                    std::uint64_t seed) {
  if (clusters < 2) throw ConfigError("clusters must be >= 2");
  if (n < clusters) throw ConfigError("n must be >= clusters");
  if (per_view_informative < 1 || per_view_noise < 0)
    throw ConfigError("invalid feature counts");
  if (noise_scale < 0) throw ConfigError("noise_scale must be >= 0");

  // Cluster-center spread per informative dimension. Chosen so that the
  // informative block dominates pairwise distances even when noise
  // dimensions outnumber it ~10:1.
  constexpr double kCenterSpread = 4.0;

  const int d = per_view_informative + per_view_noise;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  MultiViewDataset ds;
  ds.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ds.labels[static_cast<std::size_t>(i)] =
        std::min(i * clusters / n, clusters - 1);

  std::vector<int> levels(static_cast<std::size_t>(clusters));
  for (int c = 0; c < clusters; ++c) levels[static_cast<std::size_t>(c)] = c;

  for (int v = 0; v < 2; ++v) {
    // Per dimension, clusters sit on evenly spaced levels (in a random
    // order, with jitter) so every informative dimension separates them.
    Matrix centers(clusters, per_view_informative);
    for (int p = 0; p < per_view_informative; ++p) {
      std::shuffle(levels.begin(), levels.end(), rng);
      for (int c = 0; c < clusters; ++c)
        centers(c, p) =
            kCenterSpread * (levels[static_cast<std::size_t>(c)] -
                             0.5 * (clusters - 1)) +
            gauss(rng);
    }
    Matrix x(n, d);
    for (int i = 0; i < n; ++i) {
      const int c = ds.labels[static_cast<std::size_t>(i)];
      for (int p = 0; p < per_view_informative; ++p)
        x(i, p) = centers(c, p) + gauss(rng);
      for (int p = per_view_informative; p < d; ++p)
        x(i, p) = noise_scale * gauss(rng);
    }
    ds.views.push_back({std::move(x), {}});
  }
  ds.validate();
  return ds;
}

}  // namespace cdmafs
