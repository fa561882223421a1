#include "mtdar/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mtdar {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string first_field(const std::string& line) {
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',' || c == ';' || c == '\t') {
      break;
    } else {
      field += c;
    }
  }
  return trim(field);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

AngleUnit angle_unit_from_string(const std::string& name) {
  if (name == "rad" || name == "radians") return AngleUnit::Radians;
  if (name == "deg" || name == "degrees") return AngleUnit::Degrees;
  throw ContractViolation("unknown angle unit: " + name);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json model_to_json(const MtdArModel& model) {
  json j;
  j["p"] = model.order();
  j["weights"] = std::vector<double>(model.weights().begin(), model.weights().end());
  j["signs"] = std::vector<int>(model.signs().begin(), model.signs().end());
  j["binding"] = {{"family", to_string(model.binding().family())},
                  {"concentration", model.binding().concentration()}};
  if (!model.zero_mean_direction()) j["binding"]["mean_direction"] = model.binding().mean_direction();
  return j;
}

MtdArModel model_from_json(const json& j) {
  try {
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto signs = j.contains("signs") ? j.at("signs").get<std::vector<int>>()
                                           : std::vector<int>(weights.size(), 1);
    if (j.contains("p") && j.at("p").get<std::size_t>() != weights.size())
      throw ContractViolation("\"p\" does not match the number of weights");
    const auto& b = j.at("binding");
    const Family family = family_from_string(b.at("family").get<std::string>());
    const double conc = b.at("concentration").get<double>();
    const double mean = b.value("mean_direction", 0.0);
    return MtdArModel(weights, signs, BindingDensity::make(family, conc, mean));
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("invalid model description: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ContractViolation(std::string("invalid model description: ") + e.what());
  }
}

json fit_to_json(const FitResult& fit) {
  json j;
  j["p"] = fit.order;
  j["family"] = to_string(fit.family);
  j["weights"] = fit.params.weights();
  j["free_weights"] = fit.params.free_weights;
  j["concentration"] = fit.params.concentration;
  j["mean_resultant_length"] = fit.mean_resultant_length();
  j["signs"] = fit.signs;
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  json se = json::array();
  for (double v : fit.std_errors) se.push_back(number_or_null(v));
  j["std_errors"] = se;
  json cov = json::array();
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r)
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) cov.push_back(number_or_null(fit.covariance(r, c)));
  j["covariance"] = cov;
  j["covariance_reliable"] = fit.covariance_reliable;
  j["converged"] = fit.converged;
  j["n"] = fit.n;
  j["n_eff"] = fit.n_eff;
  j["max_score"] = number_or_null(fit.max_score);
  j["parameter_count"] = fit.order;
  j["alternative_criteria"] = {{"note", "signs counted as p extra parameters; not used for selection"},
                               {"aic", fit.aic_with_signs},
                               {"bic", fit.bic_with_signs}};
  json trace;
  trace["evaluations"] = fit.trace.evaluations;
  trace["starts"] = fit.trace.starts;
  trace["converged_starts"] = fit.trace.converged_starts;
  trace["start_logliks"] = fit.trace.start_logliks;
  if (!fit.trace.candidate_signs.empty()) {
    json cands = json::array();
    for (std::size_t i = 0; i < fit.trace.candidate_signs.size(); ++i)
      cands.push_back({{"signs", fit.trace.candidate_signs[i]}, {"loglik", fit.trace.candidate_logliks[i]}});
    trace["candidates"] = cands;
  }
  j["trace"] = trace;
  return j;
}

json selection_to_json(const OrderSelection& selection) {
  json j;
  j["criterion"] = to_string(selection.criterion);
  j["selected_p"] = selection.selected_order;
  json table = json::array();
  for (const auto& f : selection.fits) table.push_back(fit_to_json(f));
  j["fits"] = table;
  return j;
}

json study_config_to_json(const StudyConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["truth"] = {{"weights", c.weights},
                {"binding", {{"family", to_string(c.truth_family)}, {"concentration", c.truth_concentration}}}};
  j["fit_family"] = to_string(c.fit_family);
  j["sample_sizes"] = c.sample_sizes;
  j["q_grid"] = c.q_grid;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["burn_in"] = c.burn_in;
  j["p_max"] = c.max_order;
  j["known_signs"] = c.known_signs;
  j["multistarts"] = c.fit.multistarts;
  j["workers"] = c.workers;
  return j;
}

StudyConfig study_config_from_json(const json& j) {
  try {
    StudyConfig c;
    c.kind = study_kind_from_string(j.value("kind", std::string("estimation")));
    const auto& truth = j.at("truth");
    c.weights = truth.at("weights").get<std::vector<double>>();
    c.truth_family = family_from_string(truth.at("binding").at("family").get<std::string>());
    c.truth_concentration = truth.at("binding").at("concentration").get<double>();
    c.fit_family = family_from_string(j.value("fit_family", to_string(c.truth_family)));
    if (j.contains("sample_sizes")) c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("q_grid")) c.q_grid = j.at("q_grid").get<std::vector<std::vector<int>>>();
    else if (truth.contains("signs")) c.q_grid = {truth.at("signs").get<std::vector<int>>()};
    c.replications = j.value("replications", c.replications);
    c.seed = j.value("seed", c.seed);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.max_order = j.value("p_max", c.max_order);
    c.known_signs = j.value("known_signs", c.known_signs);
    c.fit.multistarts = j.value("multistarts", c.fit.multistarts);
    c.workers = j.value("workers", c.workers);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("invalid study config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ContractViolation(std::string("invalid study config: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ContractViolation(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

AngleSeries parse_angles(std::istream& in, AngleUnit unit) {
  std::vector<double> values;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string field = first_field(line);
    if (field.empty() && trim(line).empty()) continue;
    double v = 0.0;
    if (!parse_double(field, v)) {
      if (first) {
        first = false;
        continue;
      }
      throw ContractViolation("line " + std::to_string(line_no) + ": not a number: " + field);
    }
    first = false;
    if (!std::isfinite(v)) throw ContractViolation("line " + std::to_string(line_no) + ": non-finite angle");
    values.push_back(unit == AngleUnit::Degrees ? v * kPi / 180.0 : v);
  }
  if (values.empty()) throw ContractViolation("no angles found");
  return AngleSeries(std::move(values));
}

AngleSeries read_angles(const std::string& path, AngleUnit unit) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_angles(in, unit);
}

void write_series_csv(std::ostream& out, const AngleSeries& series) {
  out << "angle\n";
  for (double v : series) out << format_number(v) << '\n';
}

void write_lag_csv(std::ostream& out, const std::vector<double>& values, int first_lag,
                   const std::string& value_name) {
  out << "lag," << csv_field(value_name) << '\n';
  for (std::size_t k = 0; k < values.size(); ++k)
    out << first_lag + static_cast<int>(k) << ',' << format_number(values[k]) << '\n';
}

void write_gamma_csv(std::ostream& out, const LagCovSequence& gammas) {
  out << "lag,g11,g12,g21,g22\n";
  for (int k = 0; k <= gammas.max_lag(); ++k) {
    const auto& g = gammas[k];
    out << k << ',' << format_number(g(0, 0)) << ',' << format_number(g(0, 1)) << ','
        << format_number(g(1, 0)) << ',' << format_number(g(1, 1)) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points,
                        const std::vector<bool>* fallback) {
  out << (fallback ? "omega,density,fallback\n" : "omega,density\n");
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << format_number(points[i].omega) << ',' << format_number(points[i].value);
    if (fallback) out << ',' << ((*fallback)[i] ? 1 : 0);
    out << '\n';
  }
}

std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                     const std::string& x_label, const std::string& y_label) {
  const double W = 640, H = 400, left = 60, right = 20, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.y)
      if (std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    if (s.bars) ymin = std::min(ymin, 0.0), ymax = std::max(ymax, 0.0);
  }
  if (!(xmax > xmin)) xmin -= 1, xmax += 1;
  if (!(ymax > ymin)) ymin -= 1, ymax += 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (H - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
    << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (ymin < 0 && ymax > 0)
    o << "<line x1=\"" << left << "\" x2=\"" << W - right << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
      << "\" stroke=\"#888\" stroke-dasharray=\"4,3\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0, xv = xmin + (xmax - xmin) * i / 4.0;
    o << "<text x=\"" << left - 5 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << yv << "</text>\n";
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << xv << "</text>\n";
  }
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"15\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
    << (top + H - bottom) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = colors[s % 6];
    if (ser.bars) {
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        o << "<line x1=\"" << px(ser.x[i]) << "\" x2=\"" << px(ser.x[i]) << "\" y1=\"" << py(0) << "\" y2=\""
          << py(ser.y[i]) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        if (std::isfinite(ser.y[i])) o << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
      o << "\"/>\n";
    }
    if (!ser.label.empty())
      o << "<text x=\"" << W - right - 5 << "\" y=\"" << top + 15 + 14 * s << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
        << color << "\">" << xml_escape(ser.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mtdar
