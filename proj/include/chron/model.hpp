#ifndef CHRON_MODEL_HPP
#define CHRON_MODEL_HPP

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "chron/onsetfield.hpp"

namespace chron {

// Density evaluations return this sentinel for invalid states so MCMC
// acceptance can reject uniformly.
extern const double kLogZero;

// Ordered phase boundaries psi_0 < psi_1 < ... < psi_M inside (L, U).
// Phase m is the age interval [psi_{m-1}, psi_m], m = 1..M.
struct PhaseStructure {
  std::vector<double> psi;  // size M+1
  double L = 0;
  double U = 0;

  int M() const { return static_cast<int>(psi.size()) - 1; }
  double span() const { return psi.back() - psi.front(); }
  bool valid() const;
};

// Phase index (1..M) per date.
struct Assignment {
  std::vector<int> phase;

  std::vector<int> counts(int M) const;  // K_m, m = 1..M
};

struct DepositionRates {
  std::vector<double> lambda;  // one positive rate per phase
};

enum class Variant { SP, SPOF, RP, RPOF };

bool has_field(Variant v);
bool has_random_phases(Variant v);
Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

// Full MCMC state for any model variant. Field variants also carry the
// per-date onset age phi at the date's pit cell (date_onset), maintained by
// the sampler; non-field variants leave field and date_onset empty.
struct ChronologyState {
  Variant variant = Variant::SP;
  std::vector<double> theta;
  PhaseStructure phases;
  Assignment assignment;
  DepositionRates rates;
  double alpha = 0, beta1 = 0, beta2 = 0;
  std::optional<OnsetField> field;
};

// log p(psi | M), up to a constant in (L, U - L) but exact in its
// M-dependence through the span term:
//   -log(U - L - span) - (M-1) log(span).
double log_prior_psi(const PhaseStructure& phases);

// Per-M normalizing constant of the ordered-boundary density above, so that
// exp(log_prior_psi + log_prior_psi_norm_constant) integrates to one. Needed
// whenever densities at different M are compared (reversible jump).
double log_prior_psi_norm_constant(int M, double L, double U);

// Exact sampler for the density of log_prior_psi: span ~ U(0, U-L), the
// interval placed uniformly inside (L, U), interior boundaries ordered
// uniforms on (psi_0, psi_M).
PhaseStructure sample_prior_psi(int M, double L, double U,
                                std::mt19937_64& rng);

// log p(theta | psi, m [, phi]). Each theta_i is uniform on
// (psi_{m(i)-1}, min(onset_at_date[i], psi_{m(i)})); onset_at_date may be
// empty (no field). Returns kLogZero if any theta is outside its window.
double log_prior_theta(std::span<const double> theta,
                       const PhaseStructure& phases,
                       const Assignment& assignment,
                       std::span<const double> onset_at_date = {});

// Span of deposition in phase m at a location with onset age `onset`:
// max(0, min(onset, psi_m) - psi_{m-1}).
double delta_span(int m, double onset, const PhaseStructure& phases);

// log p(m | lambda, psi [, phi]) = sum_i log p_{m(i),i} with
// p_{m,i} proportional to lambda_m * Delta_{m,h(i)} (no multinomial factor).
double log_prior_assignment(const Assignment& assignment,
                            const DepositionRates& rates,
                            const PhaseStructure& phases,
                            std::span<const double> onset_at_date = {});

// Per-date assignment probabilities p_{m,i} for date with onset age `onset`
// (use +inf onset when there is no field).
std::vector<double> assignment_probabilities(const DepositionRates& rates,
                                             const PhaseStructure& phases,
                                             double onset);

// log Poisson(M-1; mean log 2).
double log_prior_M(int M);

// Unit-mean exponential rates: sum_m (-lambda_m).
double log_prior_rates(const DepositionRates& rates);

// Prior means for the immigration/migration rates given hyperparameters
// A, B: E(alpha) = A / (C (U-L)), E(beta_j) = B max(C1,C2) / (2 (U-L)).
double prior_mean_alpha(double A, const Lattice& lat, double L, double U);
double prior_mean_beta(double B, const Lattice& lat, double L, double U);

// Independent exponential log densities (parameterized by mean) for
// alpha, beta1, beta2.
double log_prior_alpha_beta(double alpha, double beta1, double beta2,
                            double A, double B, const Lattice& lat,
                            double L, double U);

// Multivariate Polya log pmf of phase counts (K_1..K_M); testing oracle for
// the Dirichlet(1/2,...,1/2) approximation to the assignment prior.
double polya_log_pmf(std::span<const int> counts);

}  // namespace chron

#endif
