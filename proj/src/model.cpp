#include "chron/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chron {

const double kLogZero = -std::numeric_limits<double>::infinity();

bool PhaseStructure::valid() const {
  if (psi.size() < 2) return false;
  if (!(L < psi.front()) || !(psi.back() < U)) return false;
  for (std::size_t m = 1; m < psi.size(); ++m)
    if (!(psi[m - 1] < psi[m])) return false;
  return span() < U - L;
}

std::vector<int> Assignment::counts(int M) const {
  std::vector<int> k(static_cast<std::size_t>(M), 0);
  for (int m : phase) {
    if (m < 1 || m > M) throw std::runtime_error("assignment out of 1..M");
    ++k[static_cast<std::size_t>(m - 1)];
  }
  return k;
}

bool has_field(Variant v) { return v == Variant::SPOF || v == Variant::RPOF; }
bool has_random_phases(Variant v) {
  return v == Variant::RP || v == Variant::RPOF;
}

Variant variant_from_string(const std::string& s) {
  if (s == "SP") return Variant::SP;
  if (s == "SPOF") return Variant::SPOF;
  if (s == "RP") return Variant::RP;
  if (s == "RPOF") return Variant::RPOF;
  throw std::runtime_error("unknown variant '" + s +
                           "' (allowed: SP, SPOF, RP, RPOF)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::SP: return "SP";
    case Variant::SPOF: return "SPOF";
    case Variant::RP: return "RP";
    case Variant::RPOF: return "RPOF";
  }
  return "?";
}

double log_prior_psi(const PhaseStructure& phases) {
  if (!phases.valid()) return kLogZero;
  const double span = phases.span();
  return -std::log(phases.U - phases.L - span) -
         (phases.M() - 1) * std::log(span);
}

double log_prior_psi_norm_constant(int M, double L, double U) {
  return std::lgamma(static_cast<double>(M)) - std::log(U - L);
}

PhaseStructure sample_prior_psi(int M, double L, double U,
                                std::mt19937_64& rng) {
  if (M < 1) throw std::runtime_error("M must be >= 1");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double span = unif(rng) * (U - L);
  const double psi0 = L + unif(rng) * (U - L - span);
  PhaseStructure phases;
  phases.L = L;
  phases.U = U;
  phases.psi.resize(static_cast<std::size_t>(M) + 1);
  phases.psi.front() = psi0;
  phases.psi.back() = psi0 + span;
  for (int m = 1; m < M; ++m)
    phases.psi[static_cast<std::size_t>(m)] = psi0 + unif(rng) * span;
  std::sort(phases.psi.begin(), phases.psi.end());
  return phases;
}

double log_prior_theta(std::span<const double> theta,
                       const PhaseStructure& phases,
                       const Assignment& assignment,
                       std::span<const double> onset_at_date) {
  if (theta.size() != assignment.phase.size())
    throw std::runtime_error("theta/assignment length mismatch");
  double log_p = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const int m = assignment.phase[i];
    double hi = phases.psi[static_cast<std::size_t>(m)];
    if (!onset_at_date.empty()) hi = std::min(hi, onset_at_date[i]);
    const double lo = phases.psi[static_cast<std::size_t>(m - 1)];
    if (!(lo < theta[i]) || !(theta[i] < hi)) return kLogZero;
    log_p -= std::log(hi - lo);
  }
  return log_p;
}

double delta_span(int m, double onset, const PhaseStructure& phases) {
  const double hi = std::min(onset, phases.psi[static_cast<std::size_t>(m)]);
  return std::max(0.0, hi - phases.psi[static_cast<std::size_t>(m - 1)]);
}

std::vector<double> assignment_probabilities(const DepositionRates& rates,
                                             const PhaseStructure& phases,
                                             double onset) {
  const int M = phases.M();
  std::vector<double> p(static_cast<std::size_t>(M), 0.0);
  double total = 0;
  for (int m = 1; m <= M; ++m) {
    const double w = rates.lambda[static_cast<std::size_t>(m - 1)] *
                     delta_span(m, onset, phases);
    p[static_cast<std::size_t>(m - 1)] = w;
    total += w;
  }
  if (total > 0)
    for (double& w : p) w /= total;
  return p;
}

double log_prior_assignment(const Assignment& assignment,
                            const DepositionRates& rates,
                            const PhaseStructure& phases,
                            std::span<const double> onset_at_date) {
  const int M = phases.M();
  if (static_cast<int>(rates.lambda.size()) != M)
    throw std::runtime_error("rates/phases size mismatch");
  double log_p = 0;
  // Per-date normalization is constant across dates when there is no field;
  // keep the direct per-date form, K is small.
  for (std::size_t i = 0; i < assignment.phase.size(); ++i) {
    const double onset = onset_at_date.empty()
                             ? std::numeric_limits<double>::infinity()
                             : onset_at_date[i];
    double total = 0;
    for (int m = 1; m <= M; ++m)
      total += rates.lambda[static_cast<std::size_t>(m - 1)] *
               delta_span(m, onset, phases);
    const int mi = assignment.phase[i];
    const double w = rates.lambda[static_cast<std::size_t>(mi - 1)] *
                     delta_span(mi, onset, phases);
    if (!(w > 0) || !(total > 0)) return kLogZero;
    log_p += std::log(w / total);
  }
  return log_p;
}

double log_prior_M(int M) {
  if (M < 1) return kLogZero;
  const double mean = std::numbers::ln2;
  const double k = M - 1;
  return k * std::log(mean) - mean - std::lgamma(k + 1);
}

double log_prior_rates(const DepositionRates& rates) {
  double log_p = 0;
  for (double lam : rates.lambda) {
    if (!(lam > 0)) return kLogZero;
    log_p -= lam;
  }
  return log_p;
}

double prior_mean_alpha(double A, const Lattice& lat, double L, double U) {
  return A / (lat.cells() * (U - L));
}

double prior_mean_beta(double B, const Lattice& lat, double L, double U) {
  return B * std::max(lat.c1, lat.c2) / (2.0 * (U - L));
}

namespace {
double log_exp_mean(double x, double mean) {
  if (!(x > 0)) return kLogZero;
  return -std::log(mean) - x / mean;
}
}  // namespace

double log_prior_alpha_beta(double alpha, double beta1, double beta2,
                            double A, double B, const Lattice& lat,
                            double L, double U) {
  const double ma = prior_mean_alpha(A, lat, L, U);
  const double mb = prior_mean_beta(B, lat, L, U);
  return log_exp_mean(alpha, ma) + log_exp_mean(beta1, mb) +
         log_exp_mean(beta2, mb);
}

double polya_log_pmf(std::span<const int> counts) {
  const int M = static_cast<int>(counts.size());
  if (M < 1) throw std::runtime_error("polya_log_pmf needs M >= 1");
  int K = 0;
  double log_p = 0;
  for (int k : counts) {
    if (k < 0) throw std::runtime_error("negative phase count");
    K += k;
    log_p += std::lgamma(k + 0.5) - 0.5 * std::log(std::numbers::pi) -
             std::lgamma(k + 1.0);
  }
  log_p += std::lgamma(K + 1.0) + std::lgamma(M / 2.0) -
           std::lgamma(K + M / 2.0);
  return log_p;
}

}  // namespace chron
