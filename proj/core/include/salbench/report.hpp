#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "salbench/experiments.hpp"

namespace salbench::report {

// Every CSV starts with a schema_version column and every JSON document
// with a schema_version key (experiments::kSchemaVersion).

// schema_version,sigma,metric,median,p25,p75 (one row per sigma and metric)
void write_sweep_csv(std::ostream& out, const experiments::SweepResult& r);
// schema_version,sigma,stimulus_id,observer_id,<metrics>
void write_sweep_pairs_csv(std::ostream& out, const experiments::SweepResult& r);
std::string sweep_summary_json(const experiments::SweepResult& r, std::uint64_t seed);
// Median curves, one panel per metric.
std::string sweep_svg(const experiments::SweepResult& r);

// schema_version,condition,stimulus_id,observer_id,<metrics>
void write_congruency_csv(std::ostream& out, const experiments::CongruencyResult& r);
// Condition medians in the jAUC, sAUC, CC, NSS, SIM, KL layout, two
// decimals, followed by the ANOVA p-values when both conditions exist.
std::string congruency_table(const experiments::CongruencyResult& r);
std::string congruency_summary_json(const experiments::CongruencyResult& r, std::uint64_t seed);

// schema_version,run,image_id,nss,auc_judd,cc,sim,detection_ms
void write_model_eval_csv(std::ostream& out, std::span<const experiments::ModelEvalResult> runs);
// schema_version,metric,mean_a,mean_b,statistic,dof,p_value
void write_ttest_csv(std::ostream& out, const experiments::ModelComparison& c);
std::string eval_summary_json(std::span<const experiments::ModelEvalResult> runs,
                              const std::optional<experiments::ModelComparison>& comparison);

}  // namespace salbench::report
