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

#include "careflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "careflow/errors.hpp"

namespace careflow {

namespace {

double sorted_median(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

// Linear-interpolation quantile (the numpy default convention) on a sorted
// vector; q in [0,1].
double sorted_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

KinematicMetrics kinematic_metrics(const Segment& segment,
                                   double sample_rate) {
  const std::size_t k = segment.values.size();
  if (k < 2) {
    throw DataError("kinematic_metrics: need at least 2 samples, got " +
                    std::to_string(k));
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ConfigError("kinematic_metrics: sample_rate must be > 0");
  }
  KinematicMetrics m;
  m.index_vmax = 0;
  m.v_max = segment.values[0];
  for (std::size_t i = 1; i < k; ++i) {
    if (segment.values[i] > m.v_max) {  // strict: ties keep the first index
      m.v_max = segment.values[i];
      m.index_vmax = i;
    }
  }
  m.md_s = static_cast<double>(k) / sample_rate;
  m.ad_s = static_cast<double>(m.index_vmax) / sample_rate;
  m.ad_over_md = static_cast<double>(m.index_vmax) / static_cast<double>(k);
  return m;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DataError("wilcoxon: paired samples must have equal length");
  }
  std::vector<double> abs_d;
  std::vector<int> sign_d;
  abs_d.reserve(x.size());
  sign_d.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DataError("wilcoxon: non-finite input");
    }
    const double d = x[i] - y[i];
    if (d == 0.0) continue;  // zero differences carry no sign information
    abs_d.push_back(std::abs(d));
    sign_d.push_back(d > 0.0 ? 1 : -1);
  }
  const std::size_t n = abs_d.size();
  if (n < 5) {
    throw DataError(
        "wilcoxon: fewer than 5 nonzero differences (n=" + std::to_string(n) +
        "); the test is uninformative");
  }

  // Rank |d| ascending with average ranks on ties. Doubling every rank keeps
  // the values integral (an average of consecutive integers is a multiple of
  // 1/2), which the exact distribution below relies on.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_d[a] < abs_d[b];
  });
  std::vector<long long> rank2(n, 0);  // 2 x rank
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && abs_d[order[j]] == abs_d[order[i]]) ++j;
    // Positions i..j-1 (0-based) share ranks i+1..j; average = (i+j+1)/2.
    const long long avg2 = static_cast<long long>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = avg2;
    tie_sizes.push_back(j - i);
    i = j;
  }

  long long w_plus2 = 0;
  long long total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (sign_d[i] > 0) w_plus2 += rank2[i];
  }
  const long long w_minus2 = total2 - w_plus2;
  const long long w_low2 = std::min(w_plus2, w_minus2);
  const long long w_high2 = total2 - w_low2;

  WilcoxonResult r;
  r.n = n;
  r.w = static_cast<double>(w_low2) / 2.0;

  if (n <= 25) {
    // Exact null distribution of the doubled positive-rank sum: count sign
    // assignments by dynamic programming over achievable sums.
    r.exact = true;
    std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ri = static_cast<std::size_t>(rank2[i]);
      for (std::size_t s = ways.size(); s-- > ri;) {
        ways[s] += ways[s - ri];
      }
    }
    double count_le = 0.0;
    double count_ge = 0.0;
    for (std::size_t s = 0; s < ways.size(); ++s) {
      if (static_cast<long long>(s) <= w_low2) count_le += ways[s];
      if (static_cast<long long>(s) >= w_high2) count_ge += ways[s];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    r.p_value = std::min(1.0, (count_le + count_ge) / denom);
  } else {
    // Normal approximation with tie-corrected variance and continuity
    // correction toward the mean.
    r.exact = false;
    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    for (std::size_t t : tie_sizes) {
      const double td = static_cast<double>(t);
      tie_term += td * td * td - td;
    }
    const double var =
        nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (!(var > 0.0)) {
      throw DataError("wilcoxon: degenerate variance (all differences tied)");
    }
    const double w_low = static_cast<double>(w_low2) / 2.0;
    const double z = (w_low - mu + 0.5) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
  }

  r.significant_at_0_05 = r.p_value < 0.05;
  r.significant_at_0_01 = r.p_value < 0.01;
  return r;
}

ClassificationReport classification_report(const std::vector<Label>& predicted,
                                           const std::vector<Label>& truth) {
  if (predicted.size() != truth.size()) {
    throw DataError("classification_report: prediction/truth length mismatch");
  }
  if (predicted.empty()) {
    throw DataError("classification_report: empty input");
  }
  ClassificationReport rep;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool truth_c = truth[i] == Label::C;
    const bool pred_c = predicted[i] == Label::C;
    if (truth_c && pred_c) ++rep.tp;
    if (!truth_c && pred_c) ++rep.fp;
    if (!truth_c && !pred_c) ++rep.tn;
    if (truth_c && !pred_c) ++rep.fn;
  }
  rep.support_c = rep.tp + rep.fn;
  rep.support_nc = rep.tn + rep.fp;
  rep.accuracy = static_cast<double>(rep.tp + rep.tn) /
                 static_cast<double>(rep.total());
  if (rep.tp + rep.fp > 0) {
    rep.precision = static_cast<double>(rep.tp) /
                    static_cast<double>(rep.tp + rep.fp);
  }
  if (rep.tp + rep.fn > 0) {
    rep.recall = static_cast<double>(rep.tp) /
                 static_cast<double>(rep.tp + rep.fn);
  }
  if (rep.precision && rep.recall && (*rep.precision + *rep.recall) > 0.0) {
    rep.f1 = 2.0 * (*rep.precision) * (*rep.recall) /
             (*rep.precision + *rep.recall);
  }
  return rep;
}

LatencyStats latency_stats(const std::vector<double>& times_ms) {
  if (times_ms.empty()) {
    throw DataError("latency_stats: empty input");
  }
  std::vector<double> sorted = times_ms;
  std::sort(sorted.begin(), sorted.end());
  LatencyStats s;
  s.n = sorted.size();
  s.median_ms = sorted_median(sorted);
  std::vector<double> dev;
  dev.reserve(sorted.size());
  for (double v : sorted) dev.push_back(std::abs(v - s.median_ms));
  std::sort(dev.begin(), dev.end());
  s.mad_ms = sorted_median(dev);
  return s;
}

BoxplotSummary boxplot_summary(const std::vector<double>& values) {
  if (values.empty()) {
    throw DataError("boxplot_summary: empty input");
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  BoxplotSummary b;
  b.n = sorted.size();
  b.median = sorted_median(sorted);
  b.q1 = sorted_quantile(sorted, 0.25);
  b.q3 = sorted_quantile(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool found_low = false;
  for (double v : sorted) {
    if (v >= lo_fence) {
      if (!found_low) {
        b.whisker_low = v;
        found_low = true;
      }
      if (v <= hi_fence) b.whisker_high = v;
    }
    if (v < lo_fence || v > hi_fence) b.outliers.push_back(v);
  }
  return b;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

}  // namespace

std::string report_to_text(const ClassificationReport& rep) {
  std::ostringstream os;
  os << "confusion matrix (rows = truth, cols = predicted)\n";
  os << "            C       NC\n";
  char line[96];
  std::snprintf(line, sizeof(line), "  C   %7zu  %7zu\n", rep.tp, rep.fn);
  os << line;
  std::snprintf(line, sizeof(line), "  NC  %7zu  %7zu\n", rep.fp, rep.tn);
  os << line;
  std::snprintf(line, sizeof(line), "accuracy   %.4f  (n=%zu)\n", rep.accuracy,
                rep.total());
  os << line;
  os << "precision  " << fmt_opt(rep.precision) << "\n";
  os << "recall     " << fmt_opt(rep.recall) << "\n";
  os << "f1         " << fmt_opt(rep.f1) << "\n";
  std::snprintf(line, sizeof(line), "support    C=%zu NC=%zu\n", rep.support_c,
                rep.support_nc);
  os << line;
  return os.str();
}

std::string report_to_csv(const ClassificationReport& rep) {
  std::ostringstream os;
  os << "key,value\n";
  os << "tp," << rep.tp << "\n";
  os << "fp," << rep.fp << "\n";
  os << "tn," << rep.tn << "\n";
  os << "fn," << rep.fn << "\n";
  os << "support_c," << rep.support_c << "\n";
  os << "support_nc," << rep.support_nc << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "accuracy,%.9g\n", rep.accuracy);
  os << buf;
  auto put = [&os](const char* key, const std::optional<double>& v) {
    if (v) {
      char b[64];
      std::snprintf(b, sizeof(b), "%s,%.9g\n", key, *v);
      os << b;
    } else {
      os << key << ",\n";
    }
  };
  put("precision", rep.precision);
  put("recall", rep.recall);
  put("f1", rep.f1);
  return os.str();
}

std::string boxplots_to_csv(
    const std::vector<std::pair<std::string, BoxplotSummary>>& rows) {
  std::ostringstream os;
  os << "name,n,median,q1,q3,whisker_low,whisker_high,n_outliers\n";
  for (const auto& [name, b] : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%zu\n",
                  name.c_str(), b.n, b.median, b.q1, b.q3, b.whisker_low,
                  b.whisker_high, b.outliers.size());
    os << buf;
  }
  return os.str();
}

}  // namespace careflow
