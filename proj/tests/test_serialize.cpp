#include <doctest.h>

#include <filesystem>

#include "cdmafs/dataset.hpp"
#include "cdmafs/serialize.hpp"

using namespace cdmafs;
namespace fs = std::filesystem;

TEST_CASE("selection result JSON round trip") {
  SelectionResult result;
  result.diffusion_iterations = 12;
  result.diffusion_converged = true;
  ViewSelection v;
  v.view_index = 0;
  v.lambda_star = 0.25;
  v.s = Vector::LinSpaced(4, 0.0, 1.0);
  v.raw_selected = {3};
  v.selected = {2, 3};
  v.probes = {{0.1, 3, -1.5}, {0.25, 2, -1.2}};
  v.trace = {-1.0, -1.2};
  v.count_in_window = true;
  result.views.push_back(v);

  const std::string text = to_json(result);
  const SelectionResult back = selection_result_from_json(text);
  REQUIRE(back.views.size() == 1);
  CHECK(back.diffusion_iterations == 12);
  CHECK(back.views[0].lambda_star == 0.25);
  CHECK(back.views[0].selected == std::vector<int>{2, 3});
  CHECK(back.views[0].s == v.s);
  CHECK(back.views[0].probes.size() == 2);
  CHECK(back.views[0].probes[1].count == 2);
  CHECK(to_json(back) == text);
}

TEST_CASE("sparse COO export is loadable by the dataset reader") {
  Matrix m = Matrix::Zero(3, 4);
  m(0, 1) = 1.5;
  m(2, 3) = -0.25;
  const auto path =
      (fs::temp_directory_path() / "cdmafs_coo_test.txt").string();
  write_sparse_coo(m, path);
  // the loader wants >= 2 views; load the same file twice
  const MultiViewDataset ds =
      load_dataset({path, path}, {ViewFormat::SparseCoo, ViewFormat::SparseCoo});
  CHECK((ds.views[0].data - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metrics CSV layout") {
  MetricsReport report;
  report.accuracy_mean = 0.5;
  report.nmi_mean = 0.25;
  report.repeats = 2;
  const std::string row = metrics_csv_row("cdmafs", 100, report);
  CHECK(row == "cdmafs,100,0.5,0,0.25,0\n");
  CHECK(metrics_csv_header().find("accuracy_mean") != std::string::npos);
}
