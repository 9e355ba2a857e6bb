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

#include "careflow/segment_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "careflow/errors.hpp"

namespace fs = std::filesystem;

namespace careflow {

namespace {

double parse_double(const std::string& tok, const char* where,
                    std::size_t line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (tok.empty() || end != begin + tok.size() || errno == ERANGE) {
    throw DataError(std::string(where) + ": line " + std::to_string(line_no) +
                    ": expected a number, got '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_segment_csv(std::ostream& out, const Segment& segment) {
  out << "t_start_s,t_end_s,K\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%zu\n", segment.t_start,
                segment.t_end, segment.values.size());
  out << buf;
  for (std::size_t i = 0; i < segment.values.size(); ++i) {
    if (i > 0) out << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", segment.values[i]);
    out << buf;
  }
  out << '\n';
}

Segment read_segment_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("segment csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_start_s,t_end_s,K") {
    throw DataError("segment csv: line 1: bad header '" + line + "'");
  }
  if (!std::getline(in, line)) {
    throw DataError("segment csv: line 2: missing bounds row");
  }
  const std::vector<std::string> bounds = split_csv(line);
  if (bounds.size() != 3) {
    throw DataError("segment csv: line 2: expected 3 fields, got " +
                    std::to_string(bounds.size()));
  }
  Segment seg;
  seg.t_start = parse_double(bounds[0], "segment csv", 2);
  seg.t_end = parse_double(bounds[1], "segment csv", 2);
  const double k_raw = parse_double(bounds[2], "segment csv", 2);
  if (k_raw < 1 || k_raw != std::floor(k_raw)) {
    throw DataError("segment csv: line 2: K must be a positive integer");
  }
  const std::size_t k = static_cast<std::size_t>(k_raw);
  if (!std::getline(in, line)) {
    throw DataError("segment csv: line 3: missing values row");
  }
  const std::vector<std::string> vals = split_csv(line);
  if (vals.size() != k) {
    throw DataError("segment csv: line 3: expected " + std::to_string(k) +
                    " values, got " + std::to_string(vals.size()));
  }
  seg.values.reserve(k);
  for (const std::string& tok : vals) {
    seg.values.push_back(parse_double(tok, "segment csv", 3));
  }
  return seg;
}

void save_segment_csv(const std::string& path, const Segment& segment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("segment csv: cannot open '" + path + "' for writing");
  write_segment_csv(out, segment);
  out.flush();
  if (!out) throw IoError("segment csv: write failed for '" + path + "'");
}

Segment load_segment_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("segment csv: cannot open '" + path + "'");
  try {
    return read_segment_csv(in);
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " [" + path + "]");
  }
}

std::vector<DatasetEntry> read_labels_manifest(const std::string& dir) {
  const std::string path = (fs::path(dir) / "labels.csv").string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset: cannot open manifest '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("dataset: empty manifest '" + path + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "file,label") {
    throw DataError("dataset: line 1: bad manifest header '" + line + "'");
  }
  std::vector<DatasetEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cols = split_csv(line);
    if (cols.size() != 2 || cols[0].empty()) {
      throw DataError("dataset: line " + std::to_string(line_no) +
                      ": expected 'file,label'");
    }
    DatasetEntry e;
    e.file = cols[0];
    e.label = parse_label(cols[1]);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<LabeledSequence> load_labeled_dataset(const std::string& dir) {
  std::vector<LabeledSequence> out;
  for (const DatasetEntry& e : read_labels_manifest(dir)) {
    LabeledSequence seq;
    seq.label = e.label;
    seq.values = load_segment_csv((fs::path(dir) / e.file).string()).values;
    out.push_back(std::move(seq));
  }
  return out;
}

void save_labeled_dataset(
    const std::string& dir,
    const std::vector<std::pair<Segment, Label>>& items) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("dataset: cannot create directory '" + dir + "'");
  std::ofstream manifest(fs::path(dir) / "labels.csv", std::ios::binary);
  if (!manifest) {
    throw IoError("dataset: cannot write manifest in '" + dir + "'");
  }
  manifest << "file,label\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "seg_%06zu.csv", i);
    save_segment_csv((fs::path(dir) / name).string(), items[i].first);
    manifest << name << "," << to_string(items[i].second) << "\n";
  }
  manifest.flush();
  if (!manifest) throw IoError("dataset: manifest write failed in '" + dir + "'");
}

}  // namespace careflow
