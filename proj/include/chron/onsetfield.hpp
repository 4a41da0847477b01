#ifndef CHRON_ONSETFIELD_HPP
#define CHRON_ONSETFIELD_HPP

#include <random>
#include <stdexcept>
#include <vector>

namespace chron {

// Rectangular grid of square cells. Rows (c1) run cross-beach, columns (c2)
// along the beach; the along-beach axis is the x axis of the excavation
// coordinate system.
struct Lattice {
  int c1 = 1;              // cross-beach cell count (rows)
  int c2 = 1;              // along-beach cell count (columns)
  double cell_side = 1.0;  // meters
  double x0 = 0.0;         // box origin, along-beach coordinate
  double y0 = 0.0;         // box origin, cross-beach coordinate

  int cells() const { return c1 * c2; }
  int index(int row, int col) const { return row * c2 + col; }
  int row_of(int c) const { return c / c2; }
  int col_of(int c) const { return c % c2; }

  // Containing cell of a point. Points on a cell boundary belong to the
  // cell with the larger index along each axis. Throws outside the box.
  int cell_of(double x, double y) const;
};

void validate(const Lattice& lat);

// Up to 4 lattice neighbors of c, clipped at the boundary.
std::vector<int> neighbors(const Lattice& lat, int c);

struct MigrationRates {
  double alpha = 0;  // per-year immigration rate, same for every cell
  double beta1 = 0;  // per-year migration rate along the beach
  double beta2 = 0;  // per-year migration rate across the beach
};

void validate(const MigrationRates& r);

// Migration rate on the edge between neighboring cells c and c'.
double edge_rate(const Lattice& lat, const MigrationRates& r, int c, int cp);

// Per-cell onset ages, years BP, row-major (c1 rows of c2 columns).
struct OnsetField {
  std::vector<double> phi;
};

// Arrival rate of cell c in the interval preceding its onset:
// alpha + sum of edge rates from neighbors with earlier onset (larger age).
double rho(const OnsetField& field, int c, const MigrationRates& rates,
           const Lattice& lat);

// Immigration-migration simulator. Arrivals occur at Exp-distributed
// intervals below psi_M; each arrival zeroes its own rate and adds the edge
// rate to still-unoccupied neighbors. With condition_first_arrival the first
// arrival is placed at psi_M exactly.
OnsetField simulate_field(const MigrationRates& rates, const Lattice& lat,
                          double psi_M, bool condition_first_arrival,
                          std::mt19937_64& rng);

// Exact log density of the field over (-inf, psi_M]^C:
//   sum_c [ log rho(c) - alpha (psi_M - phi_c)
//           - 1/2 sum_{c' in N(c)} beta_{c,c'} |phi_c - phi_{c'}| ].
// The conditioned variant (first arrival pinned at psi_M) subtracts
// log(alpha) and requires max(phi) == psi_M. Returns -inf off support.
double log_density_field(const OnsetField& field, const MigrationRates& rates,
                         const Lattice& lat, double psi_M, bool conditioned);

// Number of arrival events V(phi): cells that are strict local maxima.
int arrival_count(const OnsetField& field, const Lattice& lat);

// True iff psi_0 < phi_c <= psi_M for every cell.
bool field_in_bounds(const OnsetField& field, double psi_0, double psi_M);

}  // namespace chron

#endif
