#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtdar/correlation.hpp"
#include "mtdar/inference.hpp"
#include "mtdar/spectrum.hpp"
#include "mtdar/study.hpp"

namespace mtdar {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AngleUnit { Radians, Degrees };
AngleUnit angle_unit_from_string(const std::string& name);

/// RFC-4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Shortest round-trip text for a double (17 significant digits).
std::string format_number(double x);

nlohmann::json model_to_json(const MtdArModel& model);
/// {"p": 2, "weights": [...], "signs": [...], "binding": {"family": ..., "concentration": ...}}
MtdArModel model_from_json(const nlohmann::json& j);

nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json selection_to_json(const OrderSelection& selection);

nlohmann::json study_config_to_json(const StudyConfig& config);
StudyConfig study_config_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// One angle per line; a non-numeric first line is taken as a header and only the
/// first column of a CSV row is read. Degrees are converted to radians.
AngleSeries parse_angles(std::istream& in, AngleUnit unit);
AngleSeries read_angles(const std::string& path, AngleUnit unit);

void write_series_csv(std::ostream& out, const AngleSeries& series);
/// lag,value starting at first_lag.
void write_lag_csv(std::ostream& out, const std::vector<double>& values, int first_lag,
                   const std::string& value_name = "value");
void write_gamma_csv(std::ostream& out, const LagCovSequence& gammas);
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumPoint>& points,
                        const std::vector<bool>* fallback = nullptr);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool bars = false;  ///< draw as vertical sticks (correlograms)
};

/// Minimal SVG line/stick plot.
std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                     const std::string& x_label, const std::string& y_label);

}  // namespace mtdar
