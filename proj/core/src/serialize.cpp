#include "cdmafs/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdmafs/errors.hpp"

namespace cdmafs {

using nlohmann::json;
using nlohmann::ordered_json;

void write_sparse_coo(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out.precision(17);
  out << '%' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out << i << ',' << j << ',' << m(i, j) << '\n';
}

namespace {

ordered_json view_to_json(const ViewSelection& view) {
  ordered_json j;
  j["view"] = view.view_index;
  j["lambda_star"] = view.lambda_star;
  j["selected"] = view.selected;
  j["raw_selected"] = view.raw_selected;
  j["count_in_window"] = view.count_in_window;
  j["line_search_failed"] = view.line_search_failed;
  std::vector<double> s(view.s.data(), view.s.data() + view.s.size());
  j["s"] = s;
  ordered_json probes = ordered_json::array();
  for (const LambdaProbe& p : view.probes)
    probes.push_back({{"lambda", p.lambda},
                      {"count", p.count},
                      {"objective", p.objective}});
  j["probes"] = probes;
  j["trace"] = view.trace;
  return j;
}

}  // namespace

std::string to_json(const SelectionResult& result) {
  ordered_json j;
  j["diffusion"] = {{"iterations", result.diffusion_iterations},
                    {"converged", result.diffusion_converged}};
  ordered_json views = ordered_json::array();
  for (const ViewSelection& v : result.views) views.push_back(view_to_json(v));
  j["views"] = views;
  return j.dump(2) + "\n";
}

SelectionResult selection_result_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid selection JSON: ") + e.what());
  }
  SelectionResult result;
  result.diffusion_iterations = j.at("diffusion").at("iterations");
  result.diffusion_converged = j.at("diffusion").at("converged");
  for (const json& vj : j.at("views")) {
    ViewSelection v;
    v.view_index = vj.at("view");
    v.lambda_star = vj.at("lambda_star");
    v.selected = vj.at("selected").get<std::vector<int>>();
    v.raw_selected = vj.at("raw_selected").get<std::vector<int>>();
    v.count_in_window = vj.at("count_in_window");
    v.line_search_failed = vj.at("line_search_failed");
    const auto s = vj.at("s").get<std::vector<double>>();
    v.s = Eigen::Map<const Vector>(s.data(),
                                   static_cast<Eigen::Index>(s.size()));
    for (const json& pj : vj.at("probes"))
      v.probes.push_back(
          {pj.at("lambda"), pj.at("count"), pj.at("objective")});
    v.trace = vj.at("trace").get<std::vector<double>>();
    result.views.push_back(std::move(v));
  }
  return result;
}

std::string to_json(const MetricsReport& report) {
  ordered_json j;
  j["repeats"] = report.repeats;
  j["accuracy"] = {{"mean", report.accuracy_mean},
                   {"std", report.accuracy_std},
                   {"runs", report.accuracy_runs}};
  j["nmi"] = {{"mean", report.nmi_mean},
              {"std", report.nmi_std},
              {"runs", report.nmi_runs}};
  return j.dump(2) + "\n";
}

std::string diffusion_diagnostics_json(const FusedGraph& fused,
                                       const ComponentPurityReport* purity) {
  ordered_json j;
  j["iterations"] = fused.iterations_run;
  j["converged"] = fused.converged;
  j["last_delta"] = fused.last_delta;
  if (purity) {
    j["epsilon"] = purity->epsilon;
    ordered_json comps = ordered_json::array();
    for (const auto& c : purity->components)
      comps.push_back(
          {{"size", c.members.size()}, {"purity", c.purity}});
    j["components"] = comps;
  }
  return j.dump(2) + "\n";
}

std::string metrics_csv_header() {
  return "name,features,accuracy_mean,accuracy_std,nmi_mean,nmi_std\n";
}

std::string metrics_csv_row(const std::string& name, int features,
                            const MetricsReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << name << ',' << features << ',' << report.accuracy_mean << ','
      << report.accuracy_std << ',' << report.nmi_mean << ','
      << report.nmi_std << '\n';
  return out.str();
}

}  // namespace cdmafs
