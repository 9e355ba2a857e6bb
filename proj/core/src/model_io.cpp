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

#include "careflow/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "careflow/errors.hpp"

namespace careflow {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_matrix(std::string& out, const char* name,
                   const Eigen::MatrixXd& m) {
  char head[96];
  std::snprintf(head, sizeof(head), "matrix %s %lld %lld\n", name,
                static_cast<long long>(m.rows()),
                static_cast<long long>(m.cols()));
  out += head;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      append_double(out, m(r, c));
    }
    out += '\n';
  }
}

// Line cursor with 1-based position tracking for error messages.
struct LineReader {
  std::istringstream in;
  std::size_t line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
      throw DataError(std::string("model: unexpected end of file, expected ") +
                      what + " after line " + std::to_string(line_no));
    }
    ++line_no;
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError("model: line " + std::to_string(line_no) + ": " + msg);
  }
};

double parse_double_token(LineReader& r, const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty()) {
    r.fail("expected a number, got '" + tok + "'");
  }
  return v;
}

long parse_long_field(LineReader& r, const std::string& line,
                      const std::string& key) {
  std::istringstream ls(line);
  std::string k, v, extra;
  if (!(ls >> k >> v) || (ls >> extra) || k != key) {
    r.fail("expected '" + key + " <value>'");
  }
  return static_cast<long>(parse_double_token(r, v));
}

double parse_double_field(LineReader& r, const std::string& line,
                          const std::string& key) {
  std::istringstream ls(line);
  std::string k, v, extra;
  if (!(ls >> k >> v) || (ls >> extra) || k != key) {
    r.fail("expected '" + key + " <value>'");
  }
  return parse_double_token(r, v);
}

Eigen::MatrixXd parse_matrix(LineReader& r, const std::string& name,
                             Eigen::Index rows, Eigen::Index cols) {
  const std::string head = r.next(("matrix " + name).c_str());
  std::istringstream hs(head);
  std::string kw, got_name;
  long long got_rows = 0, got_cols = 0;
  if (!(hs >> kw >> got_name >> got_rows >> got_cols) || kw != "matrix") {
    r.fail("expected 'matrix " + name + " <rows> <cols>'");
  }
  if (got_name != name) {
    r.fail("expected matrix '" + name + "', got '" + got_name + "'");
  }
  if (got_rows != rows || got_cols != cols) {
    r.fail("matrix " + name + ": expected " + std::to_string(rows) + "x" +
           std::to_string(cols) + ", got " + std::to_string(got_rows) + "x" +
           std::to_string(got_cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const std::string line = r.next("matrix row");
    std::istringstream ls(line);
    std::string tok;
    for (Eigen::Index col = 0; col < cols; ++col) {
      if (!(ls >> tok)) {
        r.fail("matrix " + name + ": row " + std::to_string(row) + " has " +
               std::to_string(col) + " values, expected " +
               std::to_string(cols));
      }
      m(row, col) = parse_double_token(r, tok);
    }
    if (ls >> tok) {
      r.fail("matrix " + name + ": trailing token '" + tok + "'");
    }
  }
  return m;
}

}  // namespace

std::string serialize_model(const ModelParams& params) {
  params.validate();
  std::string out;
  out += "CFMODEL 1\n";
  out += "hidden_units " + std::to_string(params.hidden_units) + "\n";
  out += "input_dim " + std::to_string(params.input_dim) + "\n";
  out += "feature_mean ";
  append_double(out, params.feature_mean);
  out += "\nfeature_std ";
  append_double(out, params.feature_std);
  out += "\n";
  append_matrix(out, "fwd.wx", params.fwd.wx);
  append_matrix(out, "fwd.wh", params.fwd.wh);
  append_matrix(out, "fwd.b", params.fwd.b);
  append_matrix(out, "bwd.wx", params.bwd.wx);
  append_matrix(out, "bwd.wh", params.bwd.wh);
  append_matrix(out, "bwd.b", params.bwd.b);
  append_matrix(out, "out.w", params.wo);
  append_matrix(out, "out.b", params.bo);
  return out;
}

ModelParams parse_model(const std::string& text) {
  LineReader r(text);
  const std::string magic = r.next("CFMODEL header");
  if (magic != "CFMODEL 1") {
    r.fail("bad header '" + magic + "', expected 'CFMODEL 1'");
  }
  ModelParams p;
  p.hidden_units = static_cast<int>(
      parse_long_field(r, r.next("hidden_units"), "hidden_units"));
  p.input_dim =
      static_cast<int>(parse_long_field(r, r.next("input_dim"), "input_dim"));
  if (p.hidden_units < 1 || p.input_dim != 1) {
    r.fail("unsupported dimensions (hidden_units " +
           std::to_string(p.hidden_units) + ", input_dim " +
           std::to_string(p.input_dim) + ")");
  }
  p.feature_mean =
      parse_double_field(r, r.next("feature_mean"), "feature_mean");
  p.feature_std = parse_double_field(r, r.next("feature_std"), "feature_std");
  const Eigen::Index h4 = 4 * p.hidden_units;
  p.fwd.wx = parse_matrix(r, "fwd.wx", h4, p.input_dim);
  p.fwd.wh = parse_matrix(r, "fwd.wh", h4, p.hidden_units);
  p.fwd.b = parse_matrix(r, "fwd.b", h4, 1);
  p.bwd.wx = parse_matrix(r, "bwd.wx", h4, p.input_dim);
  p.bwd.wh = parse_matrix(r, "bwd.wh", h4, p.hidden_units);
  p.bwd.b = parse_matrix(r, "bwd.b", h4, 1);
  p.wo = parse_matrix(r, "out.w", 2, 2 * p.hidden_units);
  p.bo = parse_matrix(r, "out.b", 2, 1);
  std::string extra;
  if (std::getline(r.in, extra)) {
    ++r.line_no;
    r.fail("trailing content '" + extra + "'");
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  return p;
}

void save_model(const ModelParams& params, const std::string& path) {
  const std::string text = serialize_model(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("model: cannot open '" + path + "' for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    throw IoError("model: write failed for '" + path + "'");
  }
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("model: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("model: read failed for '" + path + "'");
  }
  return parse_model(buf.str());
}

}  // namespace careflow
