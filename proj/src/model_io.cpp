#include "it2pf/model_io.hpp"

#include <json.hpp>

#include "it2pf/dataset_io.hpp"
#include "it2pf/errors.hpp"

namespace it2pf {

using nlohmann::json;

namespace {

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Field access with path diagnostics.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  Reader at(const std::string& key) const {
    if (!node_.is_object() || !node_.contains(key))
      fail(ErrorCategory::Format, "model file: missing field '" + path_ + "/" + key + "'");
    return Reader(node_.at(key), path_ + "/" + key);
  }
  Reader at(std::size_t i) const {
    if (!node_.is_array() || i >= node_.size())
      fail(ErrorCategory::Format, "model file: missing element '" + path_ + "/" + std::to_string(i) + "'");
    return Reader(node_.at(i), path_ + "/" + std::to_string(i));
  }
  std::size_t size() const {
    if (!node_.is_array()) fail(ErrorCategory::Format, "model file: field '" + path_ + "' must be an array");
    return node_.size();
  }
  double number() const {
    if (!node_.is_number()) fail(ErrorCategory::Format, "model file: field '" + path_ + "' must be a number");
    return node_.get<double>();
  }
  int integer() const {
    if (!node_.is_number_integer())
      fail(ErrorCategory::Format, "model file: field '" + path_ + "' must be an integer");
    return node_.get<int>();
  }
  bool boolean() const {
    if (!node_.is_boolean()) fail(ErrorCategory::Format, "model file: field '" + path_ + "' must be a boolean");
    return node_.get<bool>();
  }
  std::string string() const {
    if (!node_.is_string()) fail(ErrorCategory::Format, "model file: field '" + path_ + "' must be a string");
    return node_.get<std::string>();
  }
  VectorXd vector(Eigen::Index expected) const {
    const std::size_t n = size();
    if (static_cast<Eigen::Index>(n) != expected)
      fail(ErrorCategory::Format, "model file: field '" + path_ + "' must have " + std::to_string(expected) +
                                      " entries");
    VectorXd v(expected);
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }
  MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) const {
    if (static_cast<Eigen::Index>(size()) != rows)
      fail(ErrorCategory::Format, "model file: field '" + path_ + "' must have " + std::to_string(rows) + " rows");
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = at(static_cast<std::size_t>(r)).vector(cols).transpose();
    return m;
  }

 private:
  const json& node_;
  std::string path_;
};

}  // namespace

std::string model_to_string(const IT2PFModel& model) {
  model.validate();
  json doc;
  doc["format"] = "it2pf-model";
  doc["version"] = kModelFormatVersion;
  doc["channel"] = std::string(channel_tag(model.channel));
  doc["dt"] = model.dt;
  doc["n"] = model.n;
  doc["m"] = model.m;
  doc["degree"] = model.degree;
  doc["delta"] = model.delta;
  doc["epsilon_floor"] = model.epsilon_floor;
  doc["tr_config"] = {{"b_lower", model.tr_config.b_lower}, {"b_upper", model.tr_config.b_upper}};
  doc["norm"] = {{"mean", vector_json(model.norm.mean)}, {"scale", vector_json(model.norm.scale)}};
  json rules = json::array();
  for (const Rule& rule : model.rules) {
    json premise = json::array();
    for (const IT2Gaussian& s : rule.premise.sets) premise.push_back({s.center(), s.sigma(), s.delta()});
    rules.push_back({{"premise", premise},
                     {"M", matrix_json(rule.consequent.coeffs_M)},
                     {"C", matrix_json(rule.consequent.coeffs_C)},
                     {"K", matrix_json(rule.consequent.coeffs_K)},
                     {"f", matrix_json(rule.consequent.coeffs_f)}});
  }
  doc["rules"] = std::move(rules);
  return doc.dump(1) + "\n";
}

IT2PFModel model_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::Format, std::string("model file: malformed document: ") + e.what());
  }
  const Reader root(doc, "");
  if (root.at("format").string() != "it2pf-model")
    fail(ErrorCategory::Format, "model file: field '/format' must be 'it2pf-model'");
  const int version = root.at("version").integer();
  if (version != kModelFormatVersion)
    fail(ErrorCategory::Version, "model file: unsupported format version " + std::to_string(version) +
                                     " (expected " + std::to_string(kModelFormatVersion) + ")");

  IT2PFModel model;
  model.channel = parse_channel(root.at("channel").string());
  model.dt = root.at("dt").number();
  model.n = root.at("n").integer();
  model.m = root.at("m").integer();
  model.degree = root.at("degree").integer();
  model.delta = root.at("delta").number();
  model.epsilon_floor = root.at("epsilon_floor").number();
  if (model.n < 1 || model.m < 1 || model.degree < 0)
    fail(ErrorCategory::Format, "model file: fields '/n', '/m', '/degree' out of range");
  model.tr_config.b_lower = root.at("tr_config").at("b_lower").number();
  model.tr_config.b_upper = root.at("tr_config").at("b_upper").number();
  const Eigen::Index zdim = 3 * model.n;
  model.norm.mean = root.at("norm").at("mean").vector(zdim);
  model.norm.scale = root.at("norm").at("scale").vector(zdim);

  const auto b = static_cast<Eigen::Index>(MonomialBasis::count(3 * model.n, model.degree));
  const Reader rules = root.at("rules");
  for (std::size_t l = 0; l < rules.size(); ++l) {
    const Reader r = rules.at(l);
    Rule rule;
    const Reader premise = r.at("premise");
    if (static_cast<Eigen::Index>(premise.size()) != zdim)
      fail(ErrorCategory::Format, "model file: rule " + std::to_string(l) + " premise must have 3n sets");
    for (std::size_t d = 0; d < premise.size(); ++d) {
      const VectorXd p = premise.at(d).vector(3);
      try {
        rule.premise.sets.emplace_back(p[0], p[1], p[2]);
      } catch (const Error& e) {
        fail(ErrorCategory::Format, "model file: rule " + std::to_string(l) + " set " + std::to_string(d) +
                                        ": " + e.what());
      }
    }
    rule.consequent.degree = model.degree;
    rule.consequent.n = model.n;
    rule.consequent.m = model.m;
    rule.consequent.coeffs_M = r.at("M").matrix(model.m * model.n, b);
    rule.consequent.coeffs_C = r.at("C").matrix(model.m * model.n, b);
    rule.consequent.coeffs_K = r.at("K").matrix(model.m * model.n, b);
    rule.consequent.coeffs_f = r.at("f").matrix(model.m, b);
    model.rules.push_back(std::move(rule));
  }
  try {
    model.validate();
  } catch (const Error& e) {
    fail(ErrorCategory::Format, std::string("model file: invariant violated: ") + e.what());
  }
  return model;
}

void save_model(const IT2PFModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_string(model));
}

IT2PFModel load_model(const std::filesystem::path& path) { return model_from_string(read_file(path)); }

std::string fit_report_to_string(const FitReport& report) {
  json doc;
  doc["format"] = "it2pf-fit-report";
  doc["version"] = kModelFormatVersion;
  doc["train_rmse"] = report.train_rmse;
  doc["train_mae"] = report.train_mae;
  doc["degenerate_samples"] = report.degenerate_samples;
  json rules = json::array();
  for (const RuleFitReport& r : report.rules) {
    rules.push_back({{"rule", r.rule},
                     {"residual_norms", r.residual_norms},
                     {"effective_weight", r.effective_weight},
                     {"mean_robust_weight", r.mean_robust_weight},
                     {"iterations", r.iterations},
                     {"active_coefficients", r.active_coefficients},
                     {"fitted_degree", r.fitted_degree},
                     {"rcond", r.rcond},
                     {"rank_deficient", r.rank_deficient},
                     {"low_support", r.low_support}});
  }
  doc["rules"] = std::move(rules);
  return doc.dump(1) + "\n";
}

FitReport fit_report_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::Format, std::string("fit report: malformed document: ") + e.what());
  }
  const Reader root(doc, "");
  FitReport report;
  report.train_rmse = root.at("train_rmse").number();
  report.train_mae = root.at("train_mae").number();
  report.degenerate_samples = static_cast<std::size_t>(root.at("degenerate_samples").integer());
  const Reader rules = root.at("rules");
  for (std::size_t l = 0; l < rules.size(); ++l) {
    RuleFitReport r;
    r.rule = rules.at(l).at("rule").integer();
    r.effective_weight = rules.at(l).at("effective_weight").number();
    r.iterations = rules.at(l).at("iterations").integer();
    r.active_coefficients = rules.at(l).at("active_coefficients").integer();
    r.fitted_degree = rules.at(l).at("fitted_degree").integer();
    r.rcond = rules.at(l).at("rcond").number();
    r.rank_deficient = rules.at(l).at("rank_deficient").boolean();
    r.low_support = rules.at(l).at("low_support").boolean();
    for (const char* key : {"residual_norms", "mean_robust_weight"}) {
      const Reader list = rules.at(l).at(key);
      std::vector<double>& dst = std::string_view(key) == "residual_norms" ? r.residual_norms : r.mean_robust_weight;
      for (std::size_t i = 0; i < list.size(); ++i) dst.push_back(list.at(i).number());
    }
    report.rules.push_back(r);
  }
  return report;
}

}  // namespace it2pf
