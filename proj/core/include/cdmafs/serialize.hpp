#pragma once

#include <string>

#include "cdmafs/diffusion.hpp"
#include "cdmafs/evaluation.hpp"
#include "cdmafs/pipeline.hpp"

namespace cdmafs {

// Sparse COO text: first line '%n D', then 'row,col,value' lines in
// row-major order (same format the dataset loader accepts).
void write_sparse_coo(const Matrix& m, const std::string& path);

std::string to_json(const SelectionResult& result);
SelectionResult selection_result_from_json(const std::string& text);

std::string to_json(const MetricsReport& report);

std::string diffusion_diagnostics_json(const FusedGraph& fused,
                                       const ComponentPurityReport* purity);

// CSV table: one row per evaluated selection, columns
// name,features,accuracy_mean,accuracy_std,nmi_mean,nmi_std.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& name, int features,
                            const MetricsReport& report);

}  // namespace cdmafs
