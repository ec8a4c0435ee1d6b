#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace cdmafs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ViewFormat { DenseCsv, SparseCoo };

struct ViewMatrix {
  Matrix data;  // n x D
  std::vector<std::string> feature_names;  // optional, empty or size D

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
};

// n instances observed in m >= 2 views. Labels are optional and used only
// for evaluation and purity diagnostics.
struct MultiViewDataset {
  std::vector<ViewMatrix> views;
  std::vector<int> labels;

  Eigen::Index instance_count() const {
    return views.empty() ? 0 : views.front().rows();
  }
  std::size_t view_count() const { return views.size(); }
  bool has_labels() const { return !labels.empty(); }

  // Throws DataError on any invariant violation (m < 2, row-count mismatch,
  // non-finite entries, label length mismatch).
  void validate() const;
};

// Reads a '%n D' header plus 'row,col,value' lines into a dense matrix.
Matrix load_sparse_matrix(const std::string& path);

MultiViewDataset load_dataset(const std::vector<std::string>& paths,
                              const std::vector<ViewFormat>& formats,
                              const std::string& label_path = "",
                              bool skip_header = false);

void save_view(const ViewMatrix& view, const std::string& path,
               ViewFormat format);
void save_labels(const std::vector<int>& labels, const std::string& path);

// Location of a row that could not be normalized because it is all zero.
struct ZeroRow {
  int view;
  int row;
};

// Scales every nonzero row of every view to unit Euclidean norm in place.
// All-zero rows are left untouched and reported.
std::vector<ZeroRow> normalize_unit_length(MultiViewDataset& dataset);

// Two-view clustered dataset: the first `per_view_informative` columns of
// each view are cluster-separated Gaussians, the remaining
// `per_view_noise` columns are cluster-independent noise. Labels are
// assigned in contiguous blocks of size ~n/clusters. Deterministic in seed.
MultiViewDataset generate_synthetic(int n, int clusters,
                                    int per_view_informative,
                                    int per_view_noise, double noise_scale,
                                    std::uint64_t seed);

}  // namespace cdmafs
