#ifndef CHRON_DATASET_HPP
#define CHRON_DATASET_HPP

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "chron/calibration.hpp"
#include "chron/onsetfield.hpp"

namespace chron {

struct Pit {
  std::string name;
  double x = 0;  // meters, along-beach excavation coordinate
  double y = 0;  // meters, cross-beach
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Header: id,pit,c14_age,c14_error,material,delta_r,delta_r_error with an
// optional trailing `include` column (true/false). Rows with include=false
// are dropped; the count of dropped rows is returned through `omitted`.
std::vector<RadiocarbonDate> parse_dates(std::istream& in,
                                         int* omitted = nullptr);

// Header: pit,x,y. Duplicate pit names are rejected.
std::vector<Pit> parse_pits(std::istream& in);

void write_dates(std::ostream& out, const std::vector<RadiocarbonDate>& dates);
void write_pits(std::ostream& out, const std::vector<Pit>& pits);

struct Dataset {
  std::vector<RadiocarbonDate> dates;
  std::vector<Pit> pits;

  // Cross-validates pit references and returns per-date pit indices.
  std::vector<int> date_pit_indices() const;
};

void validate(const Dataset& data);

// Fits a lattice box to the pit bounding box, expanded (and centered) to an
// integer number of cells of the given side. The long axis goes along the
// wider data extent; x is the along-beach axis (columns).
Lattice fit_lattice(const std::vector<Pit>& pits, double cell_side);

// Cell index per date (via its pit) on the given lattice.
std::vector<int> date_cells(const Dataset& data, const Lattice& lat);

}  // namespace chron

#endif
