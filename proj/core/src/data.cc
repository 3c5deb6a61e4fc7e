#include "fairplug/data.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairplug/error.h"
#include "fairplug/random.h"

namespace fairplug {
namespace {

constexpr int kMaxSplitRedraws = 1000;

std::vector<std::vector<std::string>> ParseCsvRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_field = [&] {
    row.emplace_back(Trim(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) records.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && Trim(field).empty() && !field_started) {
      field.clear();
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      end_row();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw DataError("CSV ends inside a quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return records;
}

std::string Normalize(std::string_view value) {
  std::string v(Trim(value));
  if (!v.empty() && v.back() == '.') v.pop_back();
  return v;
}

bool Contains(const std::vector<std::string>& list, std::string_view value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

std::vector<std::string> NormalizedList(const std::vector<std::string>& list) {
  std::vector<std::string> out;
  for (const auto& v : list) out.push_back(Normalize(v));
  return out;
}

std::vector<std::string> ListValue(const KeyValues& kv, std::string_view key) {
  auto it = kv.find(key);
  if (it == kv.end() || Trim(it->second).empty()) return {};
  std::vector<std::string> out;
  for (const auto& part : SplitString(it->second, ',')) out.emplace_back(Trim(part));
  return out;
}

std::string Joined(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::size_t> ParseIndexList(std::string_view text) {
  std::vector<std::size_t> out;
  if (Trim(text).empty()) return out;
  for (const auto& part : SplitString(text, ',')) {
    const long long v = ParseInt(part);
    if (v < 0) throw DataError("negative split index");
    out.push_back(std::size_t(v));
  }
  return out;
}

}  // namespace

void CsvSchema::Validate() const {
  if (label_column.empty() || sensitive_column.empty()) {
    throw UsageError("schema needs label and sensitive columns");
  }
  if (label_column == sensitive_column) {
    throw UsageError("label and sensitive columns must differ");
  }
  if (label_positive.empty()) throw UsageError("schema needs label_positive values");
  if (sensitive_positive.empty() == !sensitive_threshold.has_value()) {
    throw UsageError("schema needs exactly one of sensitive_positive and sensitive_threshold");
  }
  if (feature_columns.empty()) throw UsageError("schema has no feature columns");
  std::set<std::string> seen;
  for (const auto& f : feature_columns) {
    if (f.name == label_column || f.name == sensitive_column) {
      throw UsageError("column '" + f.name + "' is both a feature and a target");
    }
    if (Contains(drop_columns, f.name)) {
      throw UsageError("column '" + f.name + "' is both a feature and dropped");
    }
    if (!seen.insert(f.name).second) {
      throw UsageError("feature column '" + f.name + "' listed twice");
    }
  }
}

CsvSchema ParseSchema(const KeyValues& kv) {
  CsvSchema s;
  auto single = [&](const char* key) {
    auto it = kv.find(key);
    return it == kv.end() ? std::string() : std::string(Trim(it->second));
  };
  s.label_column = single("label");
  s.sensitive_column = single("sensitive");
  s.label_positive = ListValue(kv, "label_positive");
  s.label_negative = ListValue(kv, "label_negative");
  s.sensitive_positive = ListValue(kv, "sensitive_positive");
  s.sensitive_negative = ListValue(kv, "sensitive_negative");
  if (auto it = kv.find("sensitive_threshold"); it != kv.end()) {
    s.sensitive_threshold = ParseDouble(it->second);
  }
  for (const auto& name : ListValue(kv, "numeric")) {
    s.feature_columns.push_back({name, ColumnKind::kNumeric});
  }
  for (const auto& name : ListValue(kv, "categorical")) {
    s.feature_columns.push_back({name, ColumnKind::kCategorical});
  }
  s.drop_columns = ListValue(kv, "drop");
  if (kv.count("missing")) {
    s.missing_tokens = ListValue(kv, "missing");
    s.missing_tokens.push_back("");
  }
  s.Validate();
  return s;
}

CsvSchema LoadSchema(const std::filesystem::path& path) {
  return ParseSchema(ReadKeyValueFile(path));
}

LoadedCsv ParseCsv(std::string_view text, const CsvSchema& schema) {
  schema.Validate();
  auto records = ParseCsvRecords(text);
  if (records.empty()) throw DataError("CSV has no header row");
  const auto& header = records.front();
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t j = 0; j < header.size(); ++j) col[header[j]] = j;
  auto index_of = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw DataError("CSV is missing column '" + name + "'");
    return it->second;
  };
  const std::size_t label_j = index_of(schema.label_column);
  const std::size_t sens_j = index_of(schema.sensitive_column);
  std::vector<std::size_t> feat_j;
  for (const auto& f : schema.feature_columns) feat_j.push_back(index_of(f.name));

  const auto label_pos = NormalizedList(schema.label_positive);
  const auto label_neg = NormalizedList(schema.label_negative);
  const auto sens_pos = NormalizedList(schema.sensitive_positive);
  const auto sens_neg = NormalizedList(schema.sensitive_negative);
  auto map_target = [](const std::string& raw, const std::vector<std::string>& pos,
                       const std::vector<std::string>& neg, const std::string& what,
                       std::size_t line) {
    const std::string v = Normalize(raw);
    if (Contains(pos, v)) return 1.0;
    if (neg.empty() || Contains(neg, v)) return -1.0;
    throw DataError("line " + std::to_string(line) + ": unmappable " + what + " value '" +
                    raw + "'");
  };
  auto missing = [&](const std::string& v) {
    return v.empty() || Contains(schema.missing_tokens, v);
  };

  // First pass: keep complete rows, collect category levels.
  std::vector<std::vector<std::string>> levels(schema.feature_columns.size());
  std::vector<std::size_t> kept;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw DataError("line " + std::to_string(r + 1) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(rec.size()));
    }
    bool complete = !missing(rec[label_j]) && !missing(rec[sens_j]);
    for (std::size_t f = 0; f < feat_j.size() && complete; ++f) {
      complete = !missing(rec[feat_j[f]]);
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    kept.push_back(r);
    for (std::size_t f = 0; f < feat_j.size(); ++f) {
      if (schema.feature_columns[f].kind == ColumnKind::kCategorical &&
          !Contains(levels[f], rec[feat_j[f]])) {
        levels[f].push_back(rec[feat_j[f]]);
      }
    }
  }
  if (kept.empty()) throw DataError("no rows left after dropping missing values");

  std::vector<std::string> names;
  for (std::size_t f = 0; f < feat_j.size(); ++f) {
    const auto& fc = schema.feature_columns[f];
    if (fc.kind == ColumnKind::kNumeric) {
      names.push_back(fc.name);
    } else {
      for (const auto& level : levels[f]) names.push_back(fc.name + "=" + level);
    }
  }

  FeatureMatrix x = FeatureMatrix::Zero(Eigen::Index(kept.size()), Eigen::Index(names.size()));
  Eigen::VectorXd y(Eigen::Index(kept.size())), s(Eigen::Index(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& rec = records[kept[i]];
    const auto row = Eigen::Index(i);
    Eigen::Index c = 0;
    for (std::size_t f = 0; f < feat_j.size(); ++f) {
      const std::string& v = rec[feat_j[f]];
      if (schema.feature_columns[f].kind == ColumnKind::kNumeric) {
        try {
          x(row, c++) = ParseDouble(v);
        } catch (const std::exception&) {
          throw DataError("line " + std::to_string(kept[i] + 1) + ": column '" +
                          schema.feature_columns[f].name + "' is not numeric: '" + v + "'");
        }
      } else {
        const auto k = std::find(levels[f].begin(), levels[f].end(), v) - levels[f].begin();
        x(row, c + k) = 1.0;
        c += Eigen::Index(levels[f].size());
      }
    }
    y[row] = map_target(rec[label_j], label_pos, label_neg, "label", kept[i] + 1);
    if (schema.sensitive_threshold) {
      double v;
      try {
        v = ParseDouble(rec[sens_j]);
      } catch (const std::exception&) {
        throw DataError("line " + std::to_string(kept[i] + 1) +
                        ": sensitive value is not numeric: '" + rec[sens_j] + "'");
      }
      s[row] = v > *schema.sensitive_threshold ? 1.0 : -1.0;
    } else {
      s[row] = map_target(rec[sens_j], sens_pos, sens_neg, "sensitive", kept[i] + 1);
    }
  }
  return {Dataset(std::move(x), std::move(y), std::move(s)), std::move(names),
          records.size() - 1, dropped};
}

LoadedCsv LoadCsv(const std::filesystem::path& path, const CsvSchema& schema) {
  return ParseCsv(ReadFile(path), schema);
}

DpTransform DpTransform::Fit(const Dataset& train, double label_magnitude) {
  if (!(label_magnitude > 0.0 && label_magnitude < 1.0)) {
    throw UsageError("label magnitude C must lie in (0, 1)");
  }
  DpTransform t;
  t.label_magnitude_ = label_magnitude;
  const auto& f = train.features();
  t.mean_ = f.colwise().mean().transpose();
  t.scale_ = Eigen::VectorXd::Ones(f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double var = (f.col(j).array() - t.mean_[j]).square().mean();
    if (var > 0.0) t.scale_[j] = 1.0 / std::sqrt(var);
  }
  FeatureMatrix z = (f.rowwise() - t.mean_.transpose()).array().rowwise() *
                    t.scale_.transpose().array();
  const double max_norm = z.rows() > 0 ? z.rowwise().norm().maxCoeff() : 0.0;
  t.global_scale_ = max_norm > 0.0 ? t.feature_radius() / max_norm : 1.0;
  return t;
}

double DpTransform::feature_radius() const {
  return std::sqrt(1.0 - label_magnitude_ * label_magnitude_);
}

Dataset DpTransform::Apply(const Dataset& data) const {
  if (data.dim() != std::size_t(mean_.size())) {
    throw DataError("transform and dataset differ in feature dimension");
  }
  FeatureMatrix z = ((data.features().rowwise() - mean_.transpose()).array().rowwise() *
                     scale_.transpose().array()) *
                    global_scale_;
  const double radius = feature_radius();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double n = z.row(i).norm();
    if (n > radius) z.row(i) *= radius / n;  // rows of unseen splits can overshoot
  }
  Eigen::VectorXd y(data.labels().size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = data.positive_label(std::size_t(i)) ? label_magnitude_ : -label_magnitude_;
  }
  return Dataset(std::move(z), std::move(y), data.sensitive(), label_magnitude_);
}

Dataset PreprocessDp(const Dataset& data, double label_magnitude) {
  return DpTransform::Fit(data, label_magnitude).Apply(data);
}

void SplitPlan::Validate() const {
  for (double r : {train, val, test}) {
    if (!(r >= 0.0)) throw UsageError("split ratios must be >= 0");
  }
  if (!(train > 0.0) || !(test > 0.0)) throw UsageError("train and test ratios must be > 0");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw UsageError("split ratios must sum to 1");
  if (n_repeats < 1) throw UsageError("n_repeats must be >= 1");
}

bool IsDegenerateSplit(const Dataset& data, const SplitIndices& split) {
  bool tr_label[2] = {}, tr_group[2] = {}, te_label[2] = {};
  for (auto i : split.train) {
    tr_label[data.positive_label(i)] = true;
    tr_group[data.positive_sensitive(i)] = true;
  }
  for (auto i : split.test) te_label[data.positive_label(i)] = true;
  return !(tr_label[0] && tr_label[1] && tr_group[0] && tr_group[1] && te_label[0] &&
           te_label[1]);
}

std::vector<SplitIndices> MakeSplits(const Dataset& data, const SplitPlan& plan,
                                     const std::function<void(const std::string&)>& warn) {
  plan.Validate();
  const std::size_t n = data.rows();
  const auto n_train = std::size_t(std::llround(plan.train * double(n)));
  const auto n_val = std::size_t(std::llround(plan.val * double(n)));
  if (n_train == 0 || n_train + n_val >= n) {
    throw DataError("dataset too small for the split ratios");
  }
  std::vector<SplitIndices> out;
  for (int rep = 0; rep < plan.n_repeats; ++rep) {
    SplitIndices split;
    for (int r = 0;; ++r) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng(DeriveSeed(plan.master_seed, "split", {std::uint64_t(rep), std::uint64_t(r)}));
      std::shuffle(perm.begin(), perm.end(), rng);
      split.train.assign(perm.begin(), perm.begin() + std::ptrdiff_t(n_train));
      split.val.assign(perm.begin() + std::ptrdiff_t(n_train),
                       perm.begin() + std::ptrdiff_t(n_train + n_val));
      split.test.assign(perm.begin() + std::ptrdiff_t(n_train + n_val), perm.end());
      split.redraws = r;
      if (!IsDegenerateSplit(data, split)) break;
      if (warn) warn("split " + std::to_string(rep) + ": degenerate draw redrawn");
      if (r + 1 >= kMaxSplitRedraws) throw DataError("could not draw a non-degenerate split");
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (warn && out[k].train == split.train && out[k].test == split.test) {
        warn("split " + std::to_string(rep) + " repeats split " + std::to_string(k));
      }
    }
    out.push_back(std::move(split));
  }
  return out;
}

void WriteSplit(const SplitIndices& split, std::ostream& out) {
  out << "train=" << Joined(split.train) << "\n"
      << "val=" << Joined(split.val) << "\n"
      << "test=" << Joined(split.test) << "\n"
      << "redraws=" << split.redraws << "\n";
}

SplitIndices ReadSplit(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const KeyValues kv = ParseKeyValues(buf.str());
  for (const char* key : {"train", "val", "test"}) {
    if (!kv.count(key)) throw DataError(std::string("split file missing ") + key);
  }
  SplitIndices s;
  s.train = ParseIndexList(kv.at("train"));
  s.val = ParseIndexList(kv.at("val"));
  s.test = ParseIndexList(kv.at("test"));
  if (kv.count("redraws")) s.redraws = int(ParseInt(kv.at("redraws")));
  return s;
}

void WriteDatasetCsv(const Dataset& data, const std::vector<std::string>& names,
                     std::ostream& out) {
  if (names.size() != data.dim()) throw std::invalid_argument("one name per feature needed");
  for (const auto& name : names) out << '"' << name << "\",";
  out << "label,sensitive\n";
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) out << FormatDouble(data.row(i)[j]) << ',';
    out << FormatDouble(data.labels()[Eigen::Index(i)]) << ','
        << FormatDouble(data.sensitive()[Eigen::Index(i)]) << '\n';
  }
}

Dataset ReadDatasetCsv(std::string_view text, std::vector<std::string>* names) {
  auto records = ParseCsvRecords(text);
  if (records.size() < 2) throw DataError("dataset CSV needs a header and rows");
  const auto& header = records.front();
  if (header.size() < 3 || header[header.size() - 2] != "label" ||
      header.back() != "sensitive") {
    throw DataError("dataset CSV header must end with label,sensitive");
  }
  const std::size_t d = header.size() - 2;
  const std::size_t n = records.size() - 1;
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n)), s(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i + 1];
    if (rec.size() != header.size()) {
      throw DataError("dataset CSV line " + std::to_string(i + 2) + " has wrong width");
    }
    for (std::size_t j = 0; j < d; ++j) x(Eigen::Index(i), Eigen::Index(j)) = ParseDouble(rec[j]);
    y[Eigen::Index(i)] = ParseDouble(rec[d]);
    s[Eigen::Index(i)] = ParseDouble(rec[d + 1]);
  }
  if (names) names->assign(header.begin(), header.begin() + std::ptrdiff_t(d));
  const double scale = std::abs(y[0]);
  return Dataset(std::move(x), std::move(y), std::move(s), scale);
}

}  // namespace fairplug
