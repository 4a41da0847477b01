#include "chron/onsetfield.hpp"

#include <cmath>
#include <limits>

namespace chron {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neighbor scratch without allocation.
struct NeighborList {
  int idx[4];
  double beta[4];
  int n = 0;
};

NeighborList neighbor_edges(const Lattice& lat, const MigrationRates& r,
                            int c) {
  NeighborList out;
  const int row = lat.row_of(c), col = lat.col_of(c);
  if (col > 0) { out.idx[out.n] = c - 1; out.beta[out.n++] = r.beta1; }
  if (col + 1 < lat.c2) { out.idx[out.n] = c + 1; out.beta[out.n++] = r.beta1; }
  if (row > 0) { out.idx[out.n] = c - lat.c2; out.beta[out.n++] = r.beta2; }
  if (row + 1 < lat.c1) { out.idx[out.n] = c + lat.c2; out.beta[out.n++] = r.beta2; }
  return out;
}
}  // namespace

void validate(const Lattice& lat) {
  if (lat.c1 < 1 || lat.c2 < 1)
    throw std::runtime_error("lattice needs c1,c2 >= 1");
  if (!(lat.cell_side > 0))
    throw std::runtime_error("lattice cell_side must be > 0");
}

int Lattice::cell_of(double x, double y) const {
  const double u = (x - x0) / cell_side;
  const double v = (y - y0) / cell_side;
  const int col = static_cast<int>(std::floor(u));
  const int row = static_cast<int>(std::floor(v));
  if (col < 0 || col >= c2 || row < 0 || row >= c1)
    throw std::runtime_error("point (" + std::to_string(x) + ", " +
                             std::to_string(y) + ") outside the lattice box");
  return index(row, col);
}

std::vector<int> neighbors(const Lattice& lat, int c) {
  MigrationRates dummy{1, 1, 1};
  const NeighborList nl = neighbor_edges(lat, dummy, c);
  return std::vector<int>(nl.idx, nl.idx + nl.n);
}

void validate(const MigrationRates& r) {
  if (!(r.alpha > 0) || !(r.beta1 > 0) || !(r.beta2 > 0))
    throw std::runtime_error("migration rates must all be > 0");
}

double edge_rate(const Lattice& lat, const MigrationRates& r, int c, int cp) {
  return lat.row_of(c) == lat.row_of(cp) ? r.beta1 : r.beta2;
}

double rho(const OnsetField& field, int c, const MigrationRates& rates,
           const Lattice& lat) {
  const NeighborList nl = neighbor_edges(lat, rates, c);
  double rate = rates.alpha;
  for (int k = 0; k < nl.n; ++k)
    if (field.phi[nl.idx[k]] > field.phi[c]) rate += nl.beta[k];
  return rate;
}

OnsetField simulate_field(const MigrationRates& rates, const Lattice& lat,
                          double psi_M, bool condition_first_arrival,
                          std::mt19937_64& rng) {
  validate(rates);
  validate(lat);
  const int C = lat.cells();
  std::vector<double> rate(static_cast<std::size_t>(C), rates.alpha);
  std::vector<char> occupied(static_cast<std::size_t>(C), 0);
  OnsetField field;
  field.phi.assign(static_cast<std::size_t>(C), 0.0);
  double total = rates.alpha * C;
  double t = psi_M;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 1; n <= C; ++n) {
    if (n > 1 || !condition_first_arrival) {
      std::exponential_distribution<double> gap(total);
      t -= gap(rng);
    }
    // pick cell with probability rate[c]/total
    double target = unif(rng) * total;
    int c = -1;
    for (int j = 0; j < C; ++j) {
      if (occupied[j]) continue;
      target -= rate[j];
      if (target <= 0) { c = j; break; }
    }
    if (c < 0) {  // numerical slack: take the last unoccupied cell
      for (int j = C - 1; j >= 0; --j)
        if (!occupied[j]) { c = j; break; }
    }
    field.phi[static_cast<std::size_t>(c)] = t;
    occupied[static_cast<std::size_t>(c)] = 1;
    total -= rate[static_cast<std::size_t>(c)];
    rate[static_cast<std::size_t>(c)] = 0;
    const NeighborList nl = neighbor_edges(lat, rates, c);
    for (int k = 0; k < nl.n; ++k) {
      if (!occupied[nl.idx[k]]) {
        rate[static_cast<std::size_t>(nl.idx[k])] += nl.beta[k];
        total += nl.beta[k];
      }
    }
  }
  return field;
}

double log_density_field(const OnsetField& field, const MigrationRates& rates,
                         const Lattice& lat, double psi_M, bool conditioned) {
  const int C = lat.cells();
  if (static_cast<int>(field.phi.size()) != C)
    throw std::runtime_error("field size does not match lattice");
  double max_phi = kNegInf;
  for (double p : field.phi) max_phi = std::max(max_phi, p);
  if (max_phi > psi_M) return kNegInf;
  if (conditioned && max_phi != psi_M) return kNegInf;
  double log_p = 0;
  for (int c = 0; c < C; ++c) {
    const NeighborList nl = neighbor_edges(lat, rates, c);
    double rate = rates.alpha;
    double pair_sum = 0;
    for (int k = 0; k < nl.n; ++k) {
      const double d = field.phi[nl.idx[k]] - field.phi[c];
      if (d > 0) rate += nl.beta[k];
      pair_sum += nl.beta[k] * std::abs(d);
    }
    log_p += std::log(rate) - rates.alpha * (psi_M - field.phi[c]) -
             0.5 * pair_sum;
  }
  if (conditioned) log_p -= std::log(rates.alpha);
  return log_p;
}

int arrival_count(const OnsetField& field, const Lattice& lat) {
  const int C = lat.cells();
  int count = 0;
  for (int c = 0; c < C; ++c) {
    bool local_max = true;
    for (int cp : neighbors(lat, c))
      if (!(field.phi[c] > field.phi[cp])) { local_max = false; break; }
    if (local_max) ++count;
  }
  return count;
}

bool field_in_bounds(const OnsetField& field, double psi_0, double psi_M) {
  for (double p : field.phi)
    if (!(p > psi_0) || !(p <= psi_M)) return false;
  return true;
}

}  // namespace chron
