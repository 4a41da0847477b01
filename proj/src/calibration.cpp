#include "chron/calibration.hpp"

#include <cmath>
#include <sstream>

namespace chron {

Material material_from_string(const std::string& s) {
  if (s == "terrestrial") return Material::terrestrial;
  if (s == "marine") return Material::marine;
  throw std::runtime_error("unknown material '" + s +
                           "' (allowed: terrestrial, marine)");
}

std::string to_string(Material m) {
  return m == Material::terrestrial ? "terrestrial" : "marine";
}

CalibrationCurve::CalibrationCurve(std::vector<CurveEntry> entries,
                                   Material kind)
    : entries_(std::move(entries)), kind_(kind) {
  if (entries_.empty()) throw CurveError("empty calibration curve");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!(entries_[i].error > 0))
      throw CurveError("calibration curve error must be positive at cal_age " +
                       std::to_string(entries_[i].cal_age));
    if (i > 0 && !(entries_[i].cal_age > entries_[i - 1].cal_age))
      throw CurveError("calibration curve cal_age not strictly increasing at " +
                       std::to_string(entries_[i].cal_age));
  }
}

CalibrationCurve CalibrationCurve::load(std::istream& in, Material kind) {
  std::vector<CurveEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    for (char& ch : line)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::istringstream row(line);
    CurveEntry e;
    if (!(row >> e.cal_age >> e.c14_age >> e.error))
      throw CurveError("malformed calibration curve row at line " +
                       std::to_string(lineno));
    std::string extra;
    if (row >> extra)
      throw CurveError("trailing content in calibration curve row at line " +
                       std::to_string(lineno));
    entries.push_back(e);
  }
  if (entries.empty()) throw CurveError("empty calibration curve");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (!(entries[i].cal_age > entries[i - 1].cal_age))
      throw CurveError("calibration curve cal_age not strictly increasing at " +
                       std::to_string(entries[i].cal_age));
  return CalibrationCurve(std::move(entries), kind);
}

bool CalibrationCurve::unit_grid() const {
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].cal_age - entries_[i - 1].cal_age != 1.0) return false;
  return true;
}

CalibrationCurve CalibrationCurve::interpolated() const {
  if (entries_.size() < 2)
    throw CurveError("interpolation needs at least 2 curve entries");
  if (unit_grid()) return *this;
  std::vector<CurveEntry> out;
  const long lo = std::llround(entries_.front().cal_age);
  const long hi = std::llround(entries_.back().cal_age);
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  std::size_t seg = 0;
  for (long a = lo; a <= hi; ++a) {
    const double age = static_cast<double>(a);
    while (seg + 2 < entries_.size() && entries_[seg + 1].cal_age <= age) ++seg;
    const CurveEntry& e0 = entries_[seg];
    const CurveEntry& e1 = entries_[seg + 1];
    const double w = (age - e0.cal_age) / (e1.cal_age - e0.cal_age);
    out.push_back({age, e0.c14_age + w * (e1.c14_age - e0.c14_age),
                   e0.error + w * (e1.error - e0.error)});
  }
  return CalibrationCurve(std::move(out), kind_);
}

bool CalibrationCurve::covers(double theta) const {
  return theta >= min_age() && theta <= max_age();
}

std::pair<double, double> CalibrationCurve::mu_sigma(double theta) const {
  const long t = std::llround(theta);
  const long lo = std::llround(min_age());
  if (t < lo || t > std::llround(max_age()))
    throw CurveError("theta " + std::to_string(theta) +
                     " outside calibration curve range [" +
                     std::to_string(min_age()) + ", " +
                     std::to_string(max_age()) + "]");
  const CurveEntry& e = entries_[static_cast<std::size_t>(t - lo)];
  return {e.c14_age, e.error};
}

void validate(const RadiocarbonDate& d) {
  if (!(d.sigma_lab > 0))
    throw std::runtime_error("date " + d.id + ": sigma_lab must be > 0");
  if (d.delta_r_sigma < 0)
    throw std::runtime_error("date " + d.id + ": delta_r_sigma must be >= 0");
  if (d.material == Material::terrestrial &&
      (d.delta_r != 0 || d.delta_r_sigma != 0))
    throw std::runtime_error("date " + d.id +
                             ": terrestrial material takes no reservoir offset");
}

CurveSet::CurveSet(CalibrationCurve terrestrial, CalibrationCurve marine) {
  curves_.push_back(std::move(terrestrial));
  curves_.push_back(std::move(marine));
}

CurveSet::CurveSet(CalibrationCurve both) {
  curves_.push_back(both);
  curves_.push_back(std::move(both));
}

const CalibrationCurve& CurveSet::curve_for(Material m) const {
  return curves_[m == Material::terrestrial ? 0 : 1];
}

double log_likelihood(const RadiocarbonDate& date, double theta,
                      const CurveSet& curves) {
  const auto [mu, sig] = curves.curve_for(date.material).mu_sigma(theta);
  const double mu_eff = mu + date.delta_r;
  const double s2 = date.sigma_lab * date.sigma_lab + sig * sig +
                    date.delta_r_sigma * date.delta_r_sigma;
  const double r = mu_eff - date.y;
  return -0.5 * std::log(s2) - r * r / (2.0 * s2);
}

double log_likelihood_total(std::span<const double> theta,
                            std::span<const RadiocarbonDate> dates,
                            const CurveSet& curves) {
  if (theta.size() != dates.size())
    throw std::runtime_error("theta/date length mismatch");
  double total = 0;
  for (std::size_t i = 0; i < dates.size(); ++i)
    total += log_likelihood(dates[i], theta[i], curves);
  return total;
}

}  // namespace chron
