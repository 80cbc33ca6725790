#include "cq/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "cq/errors.hpp"

namespace cq {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string report_json(const VerificationReport& r) {
  json checks = json::array();
  for (const CheckResult& c : r.checks) {
    json e = {{"name", c.name},
              {"residual", number(c.residual)},
              {"tolerance", number(c.tolerance)},
              {"pass", c.pass},
              {"method", c.method},
              {"control", c.control}};
    if (!c.error.empty()) e["error"] = c.error;
    checks.push_back(e);
  }
  json doc = {{"suite", r.suite},
              {"params", r.params},
              {"checks", checks},
              {"runtime_ms", r.runtime_ms},
              {"version", r.version}};
  return doc.dump(2) + "\n";
}

VerificationReport parse_report_json(const std::string& text) {
  const json doc = json::parse(text);
  VerificationReport r;
  r.suite = doc.at("suite").get<std::string>();
  r.params = doc.at("params").get<std::map<std::string, std::string>>();
  r.runtime_ms = doc.at("runtime_ms").get<long long>();
  r.version = doc.at("version").get<std::string>();
  for (const json& e : doc.at("checks")) {
    CheckResult c;
    c.name = e.at("name").get<std::string>();
    c.residual = from_number(e.at("residual"));
    c.tolerance = from_number(e.at("tolerance"));
    c.pass = e.at("pass").get<bool>();
    c.method = e.value("method", "");
    c.control = e.value("control", false);
    c.error = e.value("error", "");
    r.checks.push_back(c);
  }
  return r;
}

std::string report_csv(const VerificationReport& r) {
  std::string out = "name,residual,tolerance,pass\n";
  for (const CheckResult& c : r.checks)
    out += c.name + "," + format_double(c.residual) + "," + format_double(c.tolerance) + "," +
           (c.pass ? "true" : "false") + "\n";
  return out;
}

void emit_report(const VerificationReport& r, const std::string& format, const std::string& path) {
  std::string text;
  if (format == "json")
    text = report_json(r);
  else if (format == "csv")
    text = report_csv(r);
  else
    throw UsageError("unknown report format '" + format + "' (expected json or csv)");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write report to '" + path + "'");
  os << text;
  if (!os) throw std::runtime_error("failed writing report to '" + path + "'");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

SuiteConfig load_config(const std::string& path, SuiteConfig cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  auto get = [&](const char* key) { return tree.get_optional<std::string>(std::string("verify.") + key); };
  try {
    if (auto v = get("suite")) cfg.suite = *v;
    if (auto v = get("hbar")) cfg.hbar = parse_double_list(*v);
    if (auto v = get("dim")) cfg.dim = std::stoi(*v);
    if (auto v = get("grid")) {
      const auto g = parse_double_list(*v);
      if (g.size() != 2) throw UsageError("config: grid expects N,L");
      cfg.grid_n = static_cast<int>(g[0]);
      cfg.grid_l = g[1];
    }
    if (auto v = get("samples")) cfg.samples = std::stoi(*v);
    if (auto v = get("seed")) cfg.seed = static_cast<unsigned>(std::stoul(*v));
    if (auto v = get("report")) cfg.report = *v;
    if (auto v = get("format")) cfg.format = *v;
    if (auto t = tree.get_child_optional("tol"))
      for (const auto& [key, value] : *t) cfg.tol[key] = std::stod(value.data());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace cq
