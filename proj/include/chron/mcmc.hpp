#ifndef CHRON_MCMC_HPP
#define CHRON_MCMC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chron/calibration.hpp"
#include "chron/model.hpp"
#include "chron/onsetfield.hpp"

namespace chron {

struct MoveWeights {
  double theta = 1;
  double psi = 1;
  double field_joint = 1;
  double field_conditional = 1;
  double scale_rates = 1;
  double rj = 1;
  double assignment = 1;
  double rates = 1;
};

struct RunConfig {
  Variant variant = Variant::SP;
  long iterations = 1000000;
  long burn_in = 100000;
  long thinning = 100;
  std::uint64_t seed = 1;
  double L = 2000;
  double U = 3500;
  double A = 10;
  double B = 1;
  std::optional<Lattice> lattice;
  MoveWeights weights;
  int fixed_M = 1;            // phase count in SP/SPOF
  bool flat_likelihood = false;
  bool record_fields = true;
  int init_retries = 100000;
};

void validate(const RunConfig& config);

// Dates plus, in field variants, the lattice cell holding each date's pit.
struct ChainData {
  std::vector<RadiocarbonDate> dates;
  std::vector<int> date_cell;  // empty when the variant has no field
};

struct SampleRecord {
  long iter = 0;
  int M = 1;
  std::vector<double> psi;
  std::vector<double> theta;
  std::vector<double> lambda;
  std::vector<int> phase;   // assignment m(i)
  std::vector<int> counts;  // K_m
  double alpha = 0, beta1 = 0, beta2 = 0;
  int V = 0;
  std::vector<double> phi;  // empty unless a field was recorded
  double loglik = 0;

  double psi0() const { return psi.front(); }
  double psiM() const { return psi.back(); }
  double span() const { return psi.back() - psi.front(); }
};

struct AcceptCounter {
  long proposed = 0;
  long accepted = 0;
  double rate() const { return proposed ? double(accepted) / proposed : 0; }
};

struct ChainOutput {
  RunConfig config;
  std::vector<SampleRecord> samples;
  std::map<std::string, AcceptCounter> acceptance;
};

// Snapshot of a state in trace-record form. `lattice` may be null when the
// state has no field.
SampleRecord to_record(const ChronologyState& state, const Lattice* lattice,
                       bool with_field = true);

// Direct sampler of the full joint prior for the configured variant,
// including the all-cells-in-bounds rejection for field variants. Used for
// initialization under a flat likelihood, prior-recovery checks and the
// simulate-prior pipeline. Throws if the rejection budget is exhausted.
ChronologyState sample_prior_state(const RunConfig& config,
                                   const ChainData& data,
                                   std::mt19937_64& rng);

// Metropolis-Hastings / reversible-jump sampler over the four posterior
// variants. Move methods are individually callable; run() cycles them
// according to the configured weights.
class Sampler {
public:
  Sampler(RunConfig config, ChainData data, const CurveSet* curves);

  ChainOutput run();

  double log_posterior(const ChronologyState& state) const;

  bool move_theta();
  bool move_psi();
  bool move_field_joint();
  bool move_field_conditional();
  bool move_scale_rates();
  bool move_rj();
  bool move_assignment();
  bool move_rates();

  const ChronologyState& state() const { return state_; }
  ChronologyState& mutable_state() { return state_; }
  std::mt19937_64& rng() { return rng_; }
  const std::map<std::string, AcceptCounter>& acceptance() const {
    return accept_;
  }
  void initialize();

private:
  double date_log_likelihood(std::size_t i, double theta) const;
  std::vector<double> onset_at_dates(const ChronologyState& state) const;
  double theta_window_hi(const ChronologyState& state, std::size_t i) const;
  bool metropolis(const ChronologyState& proposal, double log_hastings,
                  const std::string& name);
  bool reject(const std::string& name);
  SampleRecord record(long iter) const;

  RunConfig config_;
  ChainData data_;
  const CurveSet* curves_;
  ChronologyState state_;
  double log_post_ = 0;
  std::mt19937_64 rng_;
  std::map<std::string, AcceptCounter> accept_;
  bool initialized_ = false;
};

ChainOutput run_chain(const RunConfig& config, const ChainData& data,
                      const CurveSet* curves);

}  // namespace chron

#endif
