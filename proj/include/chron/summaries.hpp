#ifndef CHRON_SUMMARIES_HPP
#define CHRON_SUMMARIES_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chron/mcmc.hpp"

namespace chron {

// Per-cell posterior statistics of the onset field.
struct FieldSummary {
  int c1 = 0, c2 = 0;
  std::vector<double> mean;         // of phi_c
  std::vector<double> stddev;       // of phi_c
  std::vector<double> elapsed_std;  // of psi_M - phi_c
};

FieldSummary field_summary(const ChainOutput& chain);

enum class CellLabel { green, blue, red };

// Cells confidently settled early (green: elapsed time psi_M - phi_c below
// T* with probability > p*), late (blue: above T* with probability > p*),
// undetermined (red).
struct Partition {
  double t_star = 0;
  double p_star = 0;
  std::vector<CellLabel> labels;

  int count(CellLabel l) const;
};

Partition make_partition(const ChainOutput& chain, double t_star,
                         double p_star);

struct ThresholdScanRow {
  double t_star = 0;
  int n_green = 0;
  int n_blue = 0;
};

// Scans T* on a uniform grid; a row with both counts nonzero is the
// settlement-detection criterion.
std::vector<ThresholdScanRow> threshold_scan(const ChainOutput& chain,
                                             double p_star,
                                             double step = 10.0);
bool any_splitting_threshold(const std::vector<ThresholdScanRow>& rows);

struct ArrivalOddsRow {
  int v = 0;
  double odds = 0;
  bool defined = false;  // false when the prior chain never visited this V
};

// Posterior/prior odds of the arrival count V, per value of V observed in
// either chain.
std::vector<ArrivalOddsRow> arrival_odds(const ChainOutput& posterior,
                                         const ChainOutput& prior);

struct Histogram {
  double bin_width = 10;
  std::map<long, long> counts;  // bin index = floor(value / bin_width)
  long total = 0;
};

// Histogram of the onset age at each pit's cell.
std::map<std::string, Histogram> pit_onset_histograms(
    const ChainOutput& chain,
    const std::vector<std::pair<std::string, int>>& pit_cells,
    double bin_width = 10.0);

struct ModelProbability {
  double posterior = 0;  // empirical Pr(M = m | y)
  double mc_se = 0;
  double evidence = 0;   // e_m = Pr(M = m | y) / Pr(M = m)
};

std::map<int, ModelProbability> model_probabilities(const ChainOutput& chain);

using RecordPredicate = std::function<bool(const SampleRecord&)>;

// [P(A|y)/P(B|y)] * [Pr(B)/Pr(A)] from empirical frequencies; +inf when the
// chain never satisfies B.
double bayes_factor(const ChainOutput& chain, const RecordPredicate& model_a,
                    double prior_a, const RecordPredicate& model_b,
                    double prior_b);

// Monte Carlo prior probability of a predicate over (M, m, ...) via direct
// prior simulation.
double prior_probability(const RunConfig& config, const ChainData& data,
                         const RecordPredicate& predicate, long draws,
                         std::mt19937_64& rng);

struct PhaseScatterEntry {
  std::size_t date_index = 0;
  int modal_phase = 0;
  double probability = 0;  // posterior probability of the modal assignment,
                           // conditional on M = M_condition
};

// Modal phase per date conditional on M = M_condition. Returns an empty list
// if the chain never visits that M.
std::vector<PhaseScatterEntry> phase_scatter(const ChainOutput& chain,
                                             int M_condition);

}  // namespace chron

#endif
