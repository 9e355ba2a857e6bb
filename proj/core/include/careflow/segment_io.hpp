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

#ifndef CAREFLOW_SEGMENT_IO_HPP
#define CAREFLOW_SEGMENT_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "careflow/lstm.hpp"
#include "careflow/segmenter.hpp"

namespace careflow {

/// Segment CSV, three lines:
///   t_start_s,t_end_s,K
///   <t_start>,<t_end>,<K>
///   <v1>,<v2>,...,<vK>
/// Values carry 9 significant digits.
void write_segment_csv(std::ostream& out, const Segment& segment);
Segment read_segment_csv(std::istream& in);  // DataError with line number

void save_segment_csv(const std::string& path, const Segment& segment);
Segment load_segment_csv(const std::string& path);

/// A labeled segment dataset is a directory holding one segment CSV per
/// sample and a manifest `labels.csv`:
///   file,label
///   seg_000001.csv,C
///   ...
struct DatasetEntry {
  std::string file;  // relative to the dataset directory
  Label label = Label::C;
};

std::vector<DatasetEntry> read_labels_manifest(const std::string& dir);

/// Loads every manifest entry. Throws IoError for unreadable files and
/// DataError (with file and line context) for malformed content.
std::vector<LabeledSequence> load_labeled_dataset(const std::string& dir);

/// Writes the segments and the manifest; creates the directory when missing.
void save_labeled_dataset(
    const std::string& dir,
    const std::vector<std::pair<Segment, Label>>& items);

}  // namespace careflow

#endif  // CAREFLOW_SEGMENT_IO_HPP
