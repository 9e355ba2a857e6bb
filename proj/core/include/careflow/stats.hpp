// Copyright 2026 The Careflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CAREFLOW_STATS_HPP
#define CAREFLOW_STATS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "careflow/label.hpp"
#include "careflow/segmenter.hpp"

namespace careflow {

/// Kinematic descriptors of a motion: total duration, time-to-peak, and the
/// peak position as a fraction of the motion.
struct KinematicMetrics {
  double md_s = 0.0;         // movement duration, K / sample_rate
  double ad_s = 0.0;         // acceleration duration, index_vmax / sample_rate
  double ad_over_md = 0.0;   // index_vmax / K, in [0, (K-1)/K]
  double v_max = 0.0;        // px/s
  std::size_t index_vmax = 0;  // first occurrence of the maximum
};

/// Requires K >= 2 (throws DataError otherwise). Argmax ties resolve to the
/// first occurrence.
KinematicMetrics kinematic_metrics(const Segment& segment,
                                   double sample_rate = 15.0);

/// Two-sided Wilcoxon signed-rank test over paired samples.
struct WilcoxonResult {
  double w = 0.0;        // min(W+, W-) over signed ranks
  double p_value = 1.0;  // two-sided
  bool significant_at_0_05 = false;
  bool significant_at_0_01 = false;
  std::size_t n = 0;     // pairs remaining after dropping zero differences
  bool exact = true;     // exact permutation distribution vs normal approx
};

/// Drops zero differences; ties in |d| receive average ranks. Exact
/// permutation distribution for n <= 25, normal approximation with
/// tie-corrected variance and continuity correction beyond. Throws DataError
/// when fewer than 5 nonzero differences remain or the lengths differ.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y);

/// Binary classification tallies with C as the positive class. Ratios with a
/// zero denominator are reported as absent rather than coerced to 0.
struct ClassificationReport {
  std::size_t tp = 0;  // truth C, predicted C
  std::size_t fp = 0;  // truth NC, predicted C
  std::size_t tn = 0;  // truth NC, predicted NC
  std::size_t fn = 0;  // truth C, predicted NC
  std::size_t support_c = 0;   // ground-truth C count
  std::size_t support_nc = 0;  // ground-truth NC count
  double accuracy = 0.0;
  std::optional<double> precision;  // TP / (TP + FP)
  std::optional<double> recall;     // TP / (TP + FN)
  std::optional<double> f1;         // 2PR / (P + R)

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Throws DataError on length mismatch or empty input.
ClassificationReport classification_report(const std::vector<Label>& predicted,
                                           const std::vector<Label>& truth);

/// Robust latency summary: median and median absolute deviation about it.
struct LatencyStats {
  double median_ms = 0.0;
  double mad_ms = 0.0;  // median(|x - median|)
  std::size_t n = 0;
};

/// Throws DataError on empty input. Median of an even-length list is the mean
/// of the middle two order statistics.
LatencyStats latency_stats(const std::vector<double>& times_ms);

/// Five-number box-plot summary with 1.5-IQR whiskers, for external plotting.
struct BoxplotSummary {
  double median = 0.0;
  double q1 = 0.0;  // linear-interpolation quartiles
  double q3 = 0.0;
  double whisker_low = 0.0;   // smallest value >= q1 - 1.5 IQR
  double whisker_high = 0.0;  // largest value <= q3 + 1.5 IQR
  std::vector<double> outliers;
  std::size_t n = 0;
};

/// Throws DataError on empty input.
BoxplotSummary boxplot_summary(const std::vector<double>& values);

/// Human-readable confusion matrix and metric table.
std::string report_to_text(const ClassificationReport& report);

/// Machine-readable key,value CSV of the same report.
std::string report_to_csv(const ClassificationReport& report);

/// CSV of labelled box-plot rows: header plus one row per (name, summary).
std::string boxplots_to_csv(
    const std::vector<std::pair<std::string, BoxplotSummary>>& rows);

}  // namespace careflow

#endif  // CAREFLOW_STATS_HPP
