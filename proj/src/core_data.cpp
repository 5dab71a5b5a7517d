#include "mixens/core_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mixens/errors.hpp"

namespace mixens {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

double parse_double(std::string_view field, const std::string& source, std::size_t line_no) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw FormatError(where(source, line_no) + ": cannot parse number '" + std::string(field) +
                      "'");
  }
  return value;
}

std::size_t parse_index(std::string_view field, const std::string& source, std::size_t line_no) {
  std::size_t value = 0;
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw FormatError(where(source, line_no) + ": cannot parse label '" + std::string(field) +
                      "'");
  }
  return value;
}

// Reads one LF-terminated line, dropping a trailing CR. Returns false at EOF.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

template <typename T>
void sort_rows(std::vector<std::string>& ids, std::vector<T>& values, std::size_t width) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::vector<std::string> sorted_ids;
  std::vector<T> sorted_values;
  sorted_ids.reserve(ids.size());
  sorted_values.reserve(values.size());
  for (const auto i : order) {
    sorted_ids.push_back(std::move(ids[i]));
    for (std::size_t k = 0; k < width; ++k) sorted_values.push_back(values[i * width + k]);
  }
  ids = std::move(sorted_ids);
  values = std::move(sorted_values);
}

void require_strictly_increasing(const std::vector<std::string>& ids) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (!(ids[i - 1] < ids[i])) {
      if (ids[i - 1] == ids[i]) throw ValidationError("duplicate sample_id '" + ids[i] + "'");
      throw ValidationError("sample_ids not sorted at '" + ids[i] + "'");
    }
  }
}

std::vector<std::size_t> positions_of(const std::vector<std::string>& source,
                                      const std::vector<std::string>& ids) {
  std::vector<std::size_t> pos;
  pos.reserve(ids.size());
  std::size_t cursor = 0;
  for (const auto& id : ids) {
    const auto it = std::lower_bound(source.begin() + static_cast<std::ptrdiff_t>(cursor),
                                     source.end(), id);
    if (it == source.end() || *it != id) {
      throw AlignmentError("sample_id '" + id + "' not present in source");
    }
    cursor = static_cast<std::size_t>(it - source.begin());
    pos.push_back(cursor);
    ++cursor;
  }
  return pos;
}

}  // namespace

TaskSpec::TaskSpec(std::string task_id, std::size_t class_count)
    : id_(std::move(task_id)), class_count_(class_count) {
  if (id_.empty()) throw ValidationError("task_id must be nonempty");
  if (class_count_ < 2) {
    throw ValidationError("task '" + id_ + "' needs at least 2 classes, got " +
                      std::to_string(class_count_));
  }
}

std::vector<PredictorId> to_predictor_ids(const std::vector<std::string>& names) {
  std::vector<PredictorId> ids;
  ids.reserve(names.size());
  for (const auto& n : names) ids.emplace_back(n);
  return ids;
}

PredictionMatrix::PredictionMatrix(PredictorId predictor, TaskSpec task,
                                   std::vector<std::string> sample_ids,
                                   std::vector<double> probs)
    : predictor_(std::move(predictor)),
      task_(std::move(task)),
      sample_ids_(std::move(sample_ids)),
      probs_(std::move(probs)) {
  const std::size_t c = task_.class_count();
  if (sample_ids_.empty()) throw ValidationError("prediction matrix has no rows");
  if (probs_.size() != sample_ids_.size() * c) {
    throw ShapeError("probability buffer has " + std::to_string(probs_.size()) +
                     " entries, expected " + std::to_string(sample_ids_.size() * c));
  }
  require_strictly_increasing(sample_ids_);
  for (std::size_t i = 0; i < sample_ids_.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double p = probs_[i * c + k];
      if (!(p >= 0.0)) {
        throw ValidationError("negative or NaN probability for sample_id '" + sample_ids_[i] +
                              "'");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", sum);
      throw ValidationError("row for sample_id '" + sample_ids_[i] + "' sums to " + buf);
    }
  }
}

PredictionMatrix PredictionMatrix::from_unsorted(PredictorId predictor, TaskSpec task,
                                                 std::vector<std::string> sample_ids,
                                                 std::vector<double> probs) {
  if (probs.size() == sample_ids.size() * task.class_count()) {
    sort_rows(sample_ids, probs, task.class_count());
  }
  return {std::move(predictor), std::move(task), std::move(sample_ids), std::move(probs)};
}

PredictionMatrix PredictionMatrix::renamed(PredictorId id) const {
  PredictionMatrix copy = *this;
  copy.predictor_ = std::move(id);
  return copy;
}

LabelVector::LabelVector(TaskSpec task, std::vector<std::string> sample_ids,
                         std::vector<std::size_t> labels)
    : task_(std::move(task)), sample_ids_(std::move(sample_ids)), labels_(std::move(labels)) {
  if (sample_ids_.size() != labels_.size()) {
    throw ShapeError("label vector has " + std::to_string(labels_.size()) + " labels for " +
                     std::to_string(sample_ids_.size()) + " sample ids");
  }
  require_strictly_increasing(sample_ids_);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= task_.class_count()) {
      throw ValidationError("label " + std::to_string(labels_[i]) + " for sample_id '" +
                            sample_ids_[i] + "' is outside [0, " +
                            std::to_string(task_.class_count()) + ")");
    }
  }
}

LabelVector LabelVector::from_unsorted(TaskSpec task, std::vector<std::string> sample_ids,
                                       std::vector<std::size_t> labels) {
  if (sample_ids.size() == labels.size()) sort_rows(sample_ids, labels, 1);
  return {std::move(task), std::move(sample_ids), std::move(labels)};
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> sample_ids, std::size_t n_features,
                             std::vector<double> values, std::vector<ColumnOrigin> column_origin)
    : sample_ids_(std::move(sample_ids)),
      n_features_(n_features),
      values_(std::move(values)),
      column_origin_(std::move(column_origin)) {
  if (values_.size() != sample_ids_.size() * n_features_) {
    throw ShapeError("feature buffer size does not match n_samples x n_features");
  }
  if (column_origin_.size() != n_features_) {
    throw ShapeError("column_origin length does not match n_features");
  }
}

// ---------------------------------------------------------------------------

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", kProbabilityDigits, p);
  return buf;
}

PredictionMatrix read_predictions(std::istream& in, const TaskSpec& task,
                                  const PredictorId& predictor, const std::string& source_name) {
  const std::size_t c = task.class_count();
  std::string expected_header = "sample_id";
  for (std::size_t k = 0; k < c; ++k) expected_header += ",c" + std::to_string(k);

  std::string line;
  if (!next_line(in, line)) throw FormatError(source_name + ": empty predictions file");
  if (line != expected_header) {
    throw FormatError(where(source_name, 1) + ": expected header '" + expected_header +
                      "', got '" + line + "'");
  }

  std::vector<std::string> ids;
  std::vector<double> probs;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != c + 1) {
      throw FormatError(where(source_name, line_no) + ": expected " + std::to_string(c + 1) +
                        " columns, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw FormatError(where(source_name, line_no) + ": empty sample_id");
    ids.emplace_back(fields[0]);
    for (std::size_t k = 0; k < c; ++k) {
      probs.push_back(parse_double(fields[k + 1], source_name, line_no));
    }
  }
  if (ids.empty()) throw FormatError(source_name + ": no data rows");
  return PredictionMatrix::from_unsorted(predictor, task, std::move(ids), std::move(probs));
}

PredictionMatrix load_predictions(const std::filesystem::path& path, const TaskSpec& task,
                                  const PredictorId& predictor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open predictions file '" + path.string() + "'");
  return read_predictions(in, task, predictor, path.string());
}

void write_predictions(std::ostream& out, const PredictionMatrix& m) {
  std::string text = "sample_id";
  for (std::size_t k = 0; k < m.class_count(); ++k) text += ",c" + std::to_string(k);
  text += '\n';
  for (std::size_t i = 0; i < m.n_samples(); ++i) {
    text += m.sample_ids()[i];
    for (const double p : m.row(i)) {
      text += ',';
      text += format_probability(p);
    }
    text += '\n';
  }
  out << text;
}

void save_predictions(const std::filesystem::path& path, const PredictionMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write predictions file '" + path.string() + "'");
  write_predictions(out, m);
}

LabelVector read_labels(std::istream& in, const TaskSpec& task, const std::string& source_name) {
  std::string line;
  if (!next_line(in, line)) throw FormatError(source_name + ": empty labels file");
  if (line != "sample_id,label") {
    throw FormatError(where(source_name, 1) + ": expected header 'sample_id,label', got '" +
                      line + "'");
  }
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw FormatError(where(source_name, line_no) + ": expected 2 columns, got " +
                        std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw FormatError(where(source_name, line_no) + ": empty sample_id");
    ids.emplace_back(fields[0]);
    labels.push_back(parse_index(fields[1], source_name, line_no));
  }
  if (ids.empty()) throw FormatError(source_name + ": no data rows");
  return LabelVector::from_unsorted(task, std::move(ids), std::move(labels));
}

LabelVector load_labels(const std::filesystem::path& path, const TaskSpec& task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open labels file '" + path.string() + "'");
  return read_labels(in, task, path.string());
}

void write_labels(std::ostream& out, const LabelVector& labels) {
  std::string text = "sample_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    text += labels.sample_ids()[i];
    text += ',';
    text += std::to_string(labels[i]);
    text += '\n';
  }
  out << text;
}

void save_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write labels file '" + path.string() + "'");
  write_labels(out, labels);
}

// ---------------------------------------------------------------------------

void require_aligned(const std::vector<std::string>& a, const std::vector<std::string>& b,
                     const std::string& what) {
  if (a.size() != b.size()) {
    throw AlignmentError(what + ": " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + " samples");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      throw AlignmentError(what + ": sample_id '" + a[i] + "' vs '" + b[i] + "' at row " +
                           std::to_string(i));
    }
  }
}

const PredictionMatrix& find_predictor(std::span<const PredictionMatrix> matrices,
                                       const PredictorId& id) {
  for (const auto& m : matrices) {
    if (m.predictor() == id) return m;
  }
  throw MissingPredictorError("predictor '" + id.str() + "' not provided");
}

FeatureMatrix concat_features(std::span<const PredictionMatrix> matrices,
                              std::span<const PredictorId> group) {
  if (group.empty()) throw ConfigError("feature group is empty");
  std::vector<const PredictionMatrix*> members;
  members.reserve(group.size());
  for (const auto& id : group) members.push_back(&find_predictor(matrices, id));

  const PredictionMatrix& first = *members.front();
  for (const auto* m : members) {
    if (!(m->task() == first.task())) {
      throw AlignmentError("predictor '" + m->predictor().str() + "' belongs to task '" +
                           m->task().id() + "', expected '" + first.task().id() + "'");
    }
    require_aligned(first.sample_ids(), m->sample_ids(),
                    "concat " + first.predictor().str() + "/" + m->predictor().str());
  }

  const std::size_t c = first.class_count();
  const std::size_t n = first.n_samples();
  const std::size_t d = members.size() * c;
  std::vector<double> values(n * d);
  for (std::size_t b = 0; b < members.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = members[b]->row(i);
      std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(i * d + b * c));
    }
  }
  std::vector<ColumnOrigin> origin;
  origin.reserve(d);
  for (const auto* m : members) {
    for (std::size_t k = 0; k < c; ++k) origin.push_back({m->predictor(), k});
  }
  return {first.sample_ids(), d, std::move(values), std::move(origin)};
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

LabelVector argmax_labels(const PredictionMatrix& m) {
  std::vector<std::size_t> labels(m.n_samples());
  for (std::size_t i = 0; i < m.n_samples(); ++i) labels[i] = argmax(m.row(i));
  return {m.task(), m.sample_ids(), std::move(labels)};
}

PredictionMatrix select_samples(const PredictionMatrix& m, const std::vector<std::string>& ids) {
  const auto pos = positions_of(m.sample_ids(), ids);
  std::vector<double> probs;
  probs.reserve(ids.size() * m.class_count());
  for (const auto p : pos) {
    const auto row = m.row(p);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return {m.predictor(), m.task(), ids, std::move(probs)};
}

LabelVector select_samples(const LabelVector& labels, const std::vector<std::string>& ids) {
  const auto pos = positions_of(labels.sample_ids(), ids);
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto p : pos) out.push_back(labels[p]);
  return {labels.task(), ids, std::move(out)};
}

}  // namespace mixens
