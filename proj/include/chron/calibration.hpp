#ifndef CHRON_CALIBRATION_HPP
#define CHRON_CALIBRATION_HPP

#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chron {

enum class Material { terrestrial, marine };

Material material_from_string(const std::string& s);
std::string to_string(Material m);

struct CurveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurveEntry {
  double cal_age;   // years BP
  double c14_age;   // radiocarbon years
  double error;     // radiocarbon years, > 0
};

// Tabulated calibration curve mu(theta), sigma(theta). Loaded in native
// tabulation order (5-year steps allowed), then interpolated onto a 1-year
// grid before lookup. Immutable after interpolation.
class CalibrationCurve {
public:
  CalibrationCurve(std::vector<CurveEntry> entries, Material kind);

  // Parses rows "cal_age,c14_age,error" (comma or tab separated, '#'
  // comments). Throws CurveError naming the offending line.
  static CalibrationCurve load(std::istream& in, Material kind);

  // Linear interpolation of both c14_age and error onto the 1-year grid
  // spanning the tabulated range. Requires >= 2 entries.
  CalibrationCurve interpolated() const;

  // Exact lookup on the 1-year grid; theta must be an integer year inside
  // the curve range. Throws CurveError outside the range.
  std::pair<double, double> mu_sigma(double theta) const;

  bool covers(double theta) const;
  double min_age() const { return entries_.front().cal_age; }
  double max_age() const { return entries_.back().cal_age; }
  bool unit_grid() const;
  std::size_t size() const { return entries_.size(); }
  const std::vector<CurveEntry>& entries() const { return entries_; }
  Material kind() const { return kind_; }

private:
  std::vector<CurveEntry> entries_;  // cal_age strictly increasing
  Material kind_;
};

struct RadiocarbonDate {
  std::string id;
  std::string pit;
  double y = 0;              // lab radiocarbon age
  double sigma_lab = 0;      // lab error, > 0
  Material material = Material::terrestrial;
  double delta_r = 0;        // reservoir offset mean (marine only)
  double delta_r_sigma = 0;  // reservoir offset error (marine only)
};

void validate(const RadiocarbonDate& d);

// One curve per material class.
class CurveSet {
public:
  CurveSet(CalibrationCurve terrestrial, CalibrationCurve marine);
  explicit CurveSet(CalibrationCurve both);  // same curve for both materials

  const CalibrationCurve& curve_for(Material m) const;

private:
  std::vector<CalibrationCurve> curves_;
};

// Log observation density up to a theta-independent constant:
//   -log(s)/... = -0.5*log(s^2) - (mu(theta)+delta_r - y)^2 / (2 s^2)
// with s^2 = sigma_lab^2 + sigma(theta)^2 + delta_r_sigma^2.
double log_likelihood(const RadiocarbonDate& date, double theta,
                      const CurveSet& curves);

double log_likelihood_total(std::span<const double> theta,
                            std::span<const RadiocarbonDate> dates,
                            const CurveSet& curves);

}  // namespace chron

#endif
