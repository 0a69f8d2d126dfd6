#include "sks/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sks/error.hpp"

namespace sks {

namespace {

using Json = nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> cells;
};

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  [[noreturn]] void reject(std::size_t line, std::size_t column, const std::string& msg) const {
    std::string where = source_ + ":" + std::to_string(line);
    if (column > 0) where += ":" + std::to_string(column);
    fail(ErrorKind::kValidation, where + ": " + msg);
  }

  /// Reads the header and returns which of the optional trailing columns are present.
  std::size_t header(const std::vector<std::string>& required, const std::vector<std::string>& optional) {
    CsvRow row;
    if (!next(row)) reject(1, 0, "file is empty");
    const std::size_t n = row.cells.size();
    if (n < required.size() || n > required.size() + optional.size())
      reject(row.line, 0, "unexpected header column count " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& want = i < required.size() ? required[i] : optional[i - required.size()];
      if (row.cells[i] != want) reject(row.line, i + 1, "expected column '" + want + "', found '" + row.cells[i] + "'");
    }
    width_ = n;
    return n;
  }

  bool next(CsvRow& row) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      text = trim(text);
      if (text.empty()) continue;
      row.line = line_;
      row.cells.clear();
      std::stringstream ss(text);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.cells.push_back(trim(cell));
      if (text.back() == ',') row.cells.emplace_back();
      if (width_ != 0 && row.cells.size() != width_)
        reject(line_, 0, "expected " + std::to_string(width_) + " columns, found " + std::to_string(row.cells.size()));
      return true;
    }
    return false;
  }

  long integer(const CsvRow& row, std::size_t col) const {
    const std::string& s = row.cells[col];
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) reject(row.line, col + 1, "'" + s + "' is not an integer");
    return v;
  }

  double real(const CsvRow& row, std::size_t col) const {
    const std::string& s = row.cells[col];
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      reject(row.line, col + 1, "'" + s + "' is not a number");
    return v;
  }

  PointId point(const CsvRow& row, std::size_t col, const Metric& m) const {
    const long v = integer(row, col);
    if (v < 0 || static_cast<std::size_t>(v) >= m.size())
      reject(row.line, col + 1, "point " + std::to_string(v) + " is outside the metric (n = " + std::to_string(m.size()) + ")");
    return static_cast<PointId>(v);
  }

  std::size_t step(const CsvRow& row, std::size_t col) const {
    const long v = integer(row, col);
    if (v < 1) reject(row.line, col + 1, "steps are numbered from 1");
    return static_cast<std::size_t>(v);
  }

  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
};

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open '" + path + "'");
  return in;
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::kValidation, std::string("metric field '") + what + "' must be an array");
  std::vector<double> out;
  for (const Json& v : j) {
    if (!v.is_number()) fail(ErrorKind::kValidation, std::string("metric field '") + what + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

Metric parse_metric_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kValidation, std::string("metric JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::kValidation, "metric JSON needs a string field 'kind'");
  const std::string kind = j["kind"];
  if (kind == "line") {
    if (!j.contains("coords")) fail(ErrorKind::kValidation, "line metric needs 'coords'");
    const auto c = numbers(j["coords"], "coords");
    return build_line_metric(c);
  }
  if (kind == "circle") {
    if (!j.contains("coords") || !j.contains("circumference") || !j["circumference"].is_number())
      fail(ErrorKind::kValidation, "circle metric needs 'coords' and 'circumference'");
    const auto c = numbers(j["coords"], "coords");
    return build_circle_metric(c, j["circumference"].get<double>());
  }
  if (kind == "general") {
    if (!j.contains("dist") || !j["dist"].is_array()) fail(ErrorKind::kValidation, "general metric needs 'dist'");
    std::vector<std::vector<double>> d;
    for (const Json& row : j["dist"]) d.push_back(numbers(row, "dist"));
    return build_general_metric(d);
  }
  fail(ErrorKind::kValidation, "unknown metric kind '" + kind + "'");
}

Metric load_metric(const std::string& path) {
  std::ifstream in = open(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_metric_json(ss.str());
}

void write_metric_json(const Metric& m, std::ostream& out) {
  Json j;
  if (m.kind() == MetricKind::kLine) {
    j["kind"] = "line";
    j["coords"] = m.coords();
  } else if (m.kind() == MetricKind::kCircle) {
    j["kind"] = "circle";
    j["coords"] = m.coords();
    j["circumference"] = m.circumference();
  } else {
    j["kind"] = "general";
    Json rows = Json::array();
    for (std::size_t a = 0; a < m.size(); ++a) {
      Json row = Json::array();
      for (std::size_t b = 0; b < m.size(); ++b) row.push_back(m.dist(static_cast<PointId>(a), static_cast<PointId>(b)));
      rows.push_back(row);
    }
    j["dist"] = rows;
  }
  out << j.dump() << '\n';
}

DistributionSequence parse_distributions_csv(std::istream& in, const Metric& m, const std::string& source,
                                             std::vector<std::string>* warnings) {
  CsvReader csv(in, source);
  csv.header({"step", "point", "probability"}, {});
  std::map<std::size_t, std::map<PointId, double>> steps;
  std::map<std::size_t, std::size_t> first_line;
  CsvRow row;
  while (csv.next(row)) {
    const std::size_t step = csv.step(row, 0);
    const PointId p = csv.point(row, 1, m);
    const double prob = csv.real(row, 2);
    if (prob < 0.0) csv.reject(row.line, 3, "negative probability");
    auto& bucket = steps[step];
    first_line.emplace(step, row.line);
    if (bucket.count(p) && warnings)
      warnings->push_back(source + ":" + std::to_string(row.line) + ": repeated (step " + std::to_string(step) +
                          ", point " + std::to_string(p) + "); probabilities summed");
    bucket[p] += prob;
  }
  if (steps.empty()) fail(ErrorKind::kValidation, source + ": no distribution rows");
  DistributionSequence d;
  std::size_t expect = 1;
  for (auto& [step, bucket] : steps) {
    if (step != expect)
      fail(ErrorKind::kValidation, source + ": step " + std::to_string(expect) + " is missing");
    ++expect;
    double sum = 0.0;
    for (const auto& [p, prob] : bucket) sum += prob;
    if (std::abs(sum - 1.0) > 1e-6)
      csv.reject(first_line[step], 0, "probabilities of step " + std::to_string(step) + " sum to " + format_number(sum));
    std::vector<Outcome> out;
    for (const auto& [p, prob] : bucket)
      if (prob > 0.0) out.push_back({p, prob / sum});
    d.steps.push_back(std::move(out));
  }
  return normalized(m, std::move(d));
}

DistributionSequence load_distributions(const std::string& path, const Metric& m,
                                        std::vector<std::string>* warnings) {
  std::ifstream in = open(path);
  return parse_distributions_csv(in, m, path, warnings);
}

void write_distributions_csv(const DistributionSequence& d, std::ostream& out) {
  out << "step,point,probability\n";
  for (std::size_t i = 0; i < d.t(); ++i)
    for (const Outcome& o : d.steps[i]) out << i + 1 << ',' << o.point << ',' << format_number(o.prob) << '\n';
}

ScenarioSet parse_scenarios_csv(std::istream& in, const Metric& m, const std::string& source) {
  CsvReader csv(in, source);
  csv.header({"scenario_id", "prob", "step", "point"}, {});
  struct Partial {
    double prob;
    std::size_t line;
    std::map<std::size_t, PointId> steps;
  };
  std::map<std::string, Partial> by_id;
  std::vector<std::string> order;
  CsvRow row;
  while (csv.next(row)) {
    const std::string& id = row.cells[0];
    if (id.empty()) csv.reject(row.line, 1, "empty scenario id");
    const double prob = csv.real(row, 1);
    if (prob < 0.0) csv.reject(row.line, 2, "negative probability");
    const std::size_t step = csv.step(row, 2);
    const PointId p = csv.point(row, 3, m);
    auto [it, fresh] = by_id.emplace(id, Partial{prob, row.line, {}});
    if (fresh) order.push_back(id);
    if (std::abs(it->second.prob - prob) > 1e-12)
      csv.reject(row.line, 2, "scenario '" + id + "' repeats with a different probability");
    if (!it->second.steps.emplace(step, p).second)
      csv.reject(row.line, 3, "scenario '" + id + "' lists step " + std::to_string(step) + " twice");
  }
  if (order.empty()) fail(ErrorKind::kValidation, source + ": no scenario rows");
  std::vector<std::vector<PointId>> seqs;
  std::vector<double> probs;
  for (const std::string& id : order) {
    const Partial& part = by_id[id];
    std::vector<PointId> seq;
    std::size_t expect = 1;
    for (const auto& [step, p] : part.steps) {
      if (step != expect) csv.reject(part.line, 0, "scenario '" + id + "' skips step " + std::to_string(expect));
      ++expect;
      seq.push_back(p);
    }
    seqs.push_back(std::move(seq));
    probs.push_back(part.prob);
  }
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (std::abs(sum - 1.0) > 1e-6) fail(ErrorKind::kValidation, source + ": scenario probabilities sum to " + format_number(sum));
  for (double& p : probs) p /= sum;
  return make_scenario_set(m, std::move(seqs), std::move(probs));
}

ScenarioSet load_scenarios(const std::string& path, const Metric& m) {
  std::ifstream in = open(path);
  return parse_scenarios_csv(in, m, path);
}

std::vector<UberDemand> DemandSchedule::sequence() const {
  if (!deterministic) fail(ErrorKind::kValidation, "demand schedule is stochastic");
  std::vector<UberDemand> out;
  for (const auto& step : steps) out.push_back(step.front().demand);
  return out;
}

DemandSchedule parse_demands_csv(std::istream& in, const Metric& m, const std::string& source) {
  CsvReader csv(in, source);
  const bool weighted = csv.header({"step", "source", "destination"}, {"probability"}) == 4;
  std::map<std::size_t, std::vector<WeightedDemand>> steps;
  std::map<std::size_t, std::size_t> first_line;
  CsvRow row;
  while (csv.next(row)) {
    const std::size_t step = csv.step(row, 0);
    const UberDemand dm{csv.point(row, 1, m), csv.point(row, 2, m)};
    const double prob = weighted ? csv.real(row, 3) : 1.0;
    if (prob < 0.0) csv.reject(row.line, 4, "negative probability");
    first_line.emplace(step, row.line);
    if (!weighted && steps.count(step)) csv.reject(row.line, 1, "step " + std::to_string(step) + " has two demands");
    steps[step].push_back({dm, prob});
  }
  if (steps.empty()) fail(ErrorKind::kValidation, source + ": no demand rows");
  DemandSchedule out;
  out.deterministic = !weighted;
  std::size_t expect = 1;
  for (auto& [step, list] : steps) {
    if (step != expect) fail(ErrorKind::kValidation, source + ": step " + std::to_string(expect) + " is missing");
    ++expect;
    double sum = 0.0;
    for (const auto& w : list) sum += w.prob;
    if (std::abs(sum - 1.0) > 1e-6)
      csv.reject(first_line[step], 0, "probabilities of step " + std::to_string(step) + " sum to " + format_number(sum));
    for (auto& w : list) w.prob /= sum;
    out.steps.push_back(std::move(list));
  }
  if (weighted) {
    out.deterministic = true;
    for (const auto& s : out.steps) out.deterministic = out.deterministic && s.size() == 1;
  }
  return out;
}

DemandSchedule load_demands(const std::string& path, const Metric& m) {
  std::ifstream in = open(path);
  return parse_demands_csv(in, m, path);
}

void write_plan_csv(const FractionalPlan& plan, std::ostream& out) {
  out << "step,point,mass\n";
  for (std::size_t i = 0; i < plan.configs.size(); ++i)
    for (std::size_t p = 0; p < plan.configs[i].size(); ++p)
      if (plan.configs[i].mass[p] > 1e-12)
        out << i << ',' << p << ',' << format_number(plan.configs[i].mass[p]) << '\n';
}

void write_plan_csv(const IntegralPlan& plan, std::size_t n, std::ostream& out) {
  out << "step,point,mass\n";
  for (std::size_t i = 0; i < plan.configs.size(); ++i) {
    const auto counts = plan.configs[i].counts(n);
    for (std::size_t p = 0; p < n; ++p)
      if (counts[p] > 0) out << i << ',' << p << ',' << counts[p] << '\n';
  }
}

}  // namespace sks
