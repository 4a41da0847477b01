#include "chron/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace chron {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t start = field.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? "" : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& s, const std::string& what,
                    int lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(lineno) + ": non-numeric " +
                     what + " '" + s + "'");
  }
}

bool parse_flag(const std::string& s, int lineno) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("line " + std::to_string(lineno) + ": bad include flag '" +
                   s + "'");
}

}  // namespace

std::vector<RadiocarbonDate> parse_dates(std::istream& in, int* omitted) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dates file");
  const std::vector<std::string> header = split_csv(line);
  const std::vector<std::string> required = {
      "id", "pit", "c14_age", "c14_error", "material", "delta_r",
      "delta_r_error"};
  bool has_include = header.size() == required.size() + 1 &&
                     header.back() == "include";
  if (header.size() != required.size() && !has_include)
    throw ParseError("dates header must be id,pit,c14_age,c14_error,material,"
                     "delta_r,delta_r_error[,include]");
  for (std::size_t i = 0; i < required.size(); ++i)
    if (header[i] != required[i])
      throw ParseError("missing or misplaced dates column '" + required[i] +
                       "'");
  std::vector<RadiocarbonDate> dates;
  int dropped = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size())
      throw ParseError("line " + std::to_string(lineno) +
                       ": wrong field count");
    if (has_include && !parse_flag(f[7], lineno)) {
      ++dropped;
      continue;
    }
    RadiocarbonDate d;
    d.id = f[0];
    d.pit = f[1];
    d.y = parse_number(f[2], "c14_age", lineno);
    d.sigma_lab = parse_number(f[3], "c14_error", lineno);
    try {
      d.material = material_from_string(f[4]);
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    d.delta_r = parse_number(f[5], "delta_r", lineno);
    d.delta_r_sigma = parse_number(f[6], "delta_r_error", lineno);
    try {
      validate(d);
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    dates.push_back(std::move(d));
  }
  if (omitted != nullptr) *omitted = dropped;
  return dates;
}

std::vector<Pit> parse_pits(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty pits file");
  const std::vector<std::string> header = split_csv(line);
  if (header.size() != 3 || header[0] != "pit" || header[1] != "x" ||
      header[2] != "y")
    throw ParseError("pits header must be pit,x,y");
  std::vector<Pit> pits;
  std::set<std::string> names;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 3)
      throw ParseError("line " + std::to_string(lineno) +
                       ": wrong field count");
    Pit p;
    p.name = f[0];
    p.x = parse_number(f[1], "x", lineno);
    p.y = parse_number(f[2], "y", lineno);
    if (!names.insert(p.name).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate pit '" +
                       p.name + "'");
    pits.push_back(std::move(p));
  }
  return pits;
}

void write_dates(std::ostream& out,
                 const std::vector<RadiocarbonDate>& dates) {
  out << "id,pit,c14_age,c14_error,material,delta_r,delta_r_error\n";
  out.precision(17);
  for (const RadiocarbonDate& d : dates)
    out << d.id << ',' << d.pit << ',' << d.y << ',' << d.sigma_lab << ','
        << to_string(d.material) << ',' << d.delta_r << ',' << d.delta_r_sigma
        << '\n';
}

void write_pits(std::ostream& out, const std::vector<Pit>& pits) {
  out << "pit,x,y\n";
  out.precision(17);
  for (const Pit& p : pits)
    out << p.name << ',' << p.x << ',' << p.y << '\n';
}

std::vector<int> Dataset::date_pit_indices() const {
  std::vector<int> idx;
  idx.reserve(dates.size());
  for (const RadiocarbonDate& d : dates) {
    const auto it = std::find_if(pits.begin(), pits.end(),
                                 [&](const Pit& p) { return p.name == d.pit; });
    if (it == pits.end())
      throw ParseError("date " + d.id + " references unknown pit '" + d.pit +
                       "'");
    idx.push_back(static_cast<int>(it - pits.begin()));
  }
  return idx;
}

void validate(const Dataset& data) {
  if (data.dates.empty()) throw ParseError("dataset has no dates");
  data.date_pit_indices();
}

Lattice fit_lattice(const std::vector<Pit>& pits, double cell_side) {
  if (pits.empty()) throw ParseError("cannot fit a lattice to zero pits");
  if (!(cell_side > 0)) throw ParseError("cell_side must be > 0");
  double xmin = pits[0].x, xmax = pits[0].x;
  double ymin = pits[0].y, ymax = pits[0].y;
  for (const Pit& p : pits) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  Lattice lat;
  lat.cell_side = cell_side;
  // floor+1 leaves a strictly positive margin, so every pit is interior.
  lat.c2 = static_cast<int>(std::floor((xmax - xmin) / cell_side)) + 1;
  lat.c1 = static_cast<int>(std::floor((ymax - ymin) / cell_side)) + 1;
  lat.x0 = xmin - 0.5 * (lat.c2 * cell_side - (xmax - xmin));
  lat.y0 = ymin - 0.5 * (lat.c1 * cell_side - (ymax - ymin));
  return lat;
}

std::vector<int> date_cells(const Dataset& data, const Lattice& lat) {
  const std::vector<int> pit_idx = data.date_pit_indices();
  std::vector<int> cells;
  cells.reserve(data.dates.size());
  for (std::size_t i = 0; i < data.dates.size(); ++i) {
    const Pit& p = data.pits[static_cast<std::size_t>(pit_idx[i])];
    cells.push_back(lat.cell_of(p.x, p.y));
  }
  return cells;
}

}  // namespace chron
