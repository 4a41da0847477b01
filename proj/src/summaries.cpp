#include "chron/summaries.hpp"

#include <cmath>
#include <stdexcept>

namespace chron {

namespace {

void require_fields(const ChainOutput& chain) {
  if (chain.samples.empty())
    throw std::runtime_error("chain has no recorded samples");
  if (chain.samples.front().phi.empty())
    throw std::runtime_error("chain has no recorded onset fields");
}

}  // namespace

int Partition::count(CellLabel l) const {
  int n = 0;
  for (CellLabel x : labels)
    if (x == l) ++n;
  return n;
}

FieldSummary field_summary(const ChainOutput& chain) {
  require_fields(chain);
  const std::size_t C = chain.samples.front().phi.size();
  FieldSummary out;
  if (chain.config.lattice) {
    out.c1 = chain.config.lattice->c1;
    out.c2 = chain.config.lattice->c2;
  }
  std::vector<double> sum(C, 0), sum2(C, 0), esum(C, 0), esum2(C, 0);
  for (const SampleRecord& rec : chain.samples) {
    for (std::size_t c = 0; c < C; ++c) {
      const double p = rec.phi[c];
      const double e = rec.psiM() - p;
      sum[c] += p;
      sum2[c] += p * p;
      esum[c] += e;
      esum2[c] += e * e;
    }
  }
  const double n = static_cast<double>(chain.samples.size());
  out.mean.resize(C);
  out.stddev.resize(C);
  out.elapsed_std.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    out.mean[c] = sum[c] / n;
    out.stddev[c] = std::sqrt(std::max(0.0, sum2[c] / n - out.mean[c] * out.mean[c]));
    const double em = esum[c] / n;
    out.elapsed_std[c] = std::sqrt(std::max(0.0, esum2[c] / n - em * em));
  }
  return out;
}

Partition make_partition(const ChainOutput& chain, double t_star,
                         double p_star) {
  require_fields(chain);
  const std::size_t C = chain.samples.front().phi.size();
  std::vector<long> early(C, 0);
  for (const SampleRecord& rec : chain.samples)
    for (std::size_t c = 0; c < C; ++c)
      if (rec.psiM() - rec.phi[c] < t_star) ++early[c];
  Partition out;
  out.t_star = t_star;
  out.p_star = p_star;
  out.labels.resize(C, CellLabel::red);
  const double n = static_cast<double>(chain.samples.size());
  for (std::size_t c = 0; c < C; ++c) {
    const double p_early = early[c] / n;
    if (p_early > p_star) out.labels[c] = CellLabel::green;
    else if (1.0 - p_early > p_star) out.labels[c] = CellLabel::blue;
  }
  return out;
}

std::vector<ThresholdScanRow> threshold_scan(const ChainOutput& chain,
                                             double p_star, double step) {
  require_fields(chain);
  double max_elapsed = 0;
  for (const SampleRecord& rec : chain.samples)
    for (double p : rec.phi)
      max_elapsed = std::max(max_elapsed, rec.psiM() - p);
  std::vector<ThresholdScanRow> rows;
  for (double t = step; t <= max_elapsed + step; t += step) {
    const Partition part = make_partition(chain, t, p_star);
    rows.push_back({t, part.count(CellLabel::green), part.count(CellLabel::blue)});
  }
  return rows;
}

bool any_splitting_threshold(const std::vector<ThresholdScanRow>& rows) {
  for (const ThresholdScanRow& row : rows)
    if (row.n_green > 0 && row.n_blue > 0) return true;
  return false;
}

std::vector<ArrivalOddsRow> arrival_odds(const ChainOutput& posterior,
                                         const ChainOutput& prior) {
  std::map<int, long> post_counts, prior_counts;
  for (const SampleRecord& rec : posterior.samples) ++post_counts[rec.V];
  for (const SampleRecord& rec : prior.samples) ++prior_counts[rec.V];
  const double np = static_cast<double>(posterior.samples.size());
  const double nq = static_cast<double>(prior.samples.size());
  std::vector<ArrivalOddsRow> rows;
  std::map<int, bool> seen;
  for (const auto& [v, k] : post_counts) seen[v] = true;
  for (const auto& [v, k] : prior_counts) seen[v] = true;
  for (const auto& [v, unused] : seen) {
    ArrivalOddsRow row;
    row.v = v;
    const auto q = prior_counts.find(v);
    if (q == prior_counts.end() || q->second == 0) {
      row.defined = false;
    } else {
      row.defined = true;
      const auto p = post_counts.find(v);
      const double pf = p == post_counts.end() ? 0.0 : p->second / np;
      row.odds = pf / (q->second / nq);
    }
    rows.push_back(row);
  }
  return rows;
}

std::map<std::string, Histogram> pit_onset_histograms(
    const ChainOutput& chain,
    const std::vector<std::pair<std::string, int>>& pit_cells,
    double bin_width) {
  require_fields(chain);
  if (!(bin_width > 0)) throw std::runtime_error("bin width must be > 0");
  std::map<std::string, Histogram> out;
  for (const auto& [pit, cell] : pit_cells) {
    Histogram h;
    h.bin_width = bin_width;
    for (const SampleRecord& rec : chain.samples) {
      const double phi = rec.phi[static_cast<std::size_t>(cell)];
      ++h.counts[static_cast<long>(std::floor(phi / bin_width))];
      ++h.total;
    }
    out[pit] = h;
  }
  return out;
}

std::map<int, ModelProbability> model_probabilities(const ChainOutput& chain) {
  if (chain.samples.empty())
    throw std::runtime_error("chain has no recorded samples");
  std::map<int, long> counts;
  for (const SampleRecord& rec : chain.samples) ++counts[rec.M];
  const double n = static_cast<double>(chain.samples.size());
  std::map<int, ModelProbability> out;
  for (const auto& [m, k] : counts) {
    ModelProbability mp;
    mp.posterior = k / n;
    mp.mc_se = std::sqrt(mp.posterior * (1.0 - mp.posterior) / n);
    mp.evidence = mp.posterior / std::exp(log_prior_M(m));
    out[m] = mp;
  }
  return out;
}

double bayes_factor(const ChainOutput& chain, const RecordPredicate& model_a,
                    double prior_a, const RecordPredicate& model_b,
                    double prior_b) {
  if (!(prior_a > 0) || !(prior_b > 0))
    throw std::runtime_error("prior model probabilities must be positive");
  long na = 0, nb = 0;
  for (const SampleRecord& rec : chain.samples) {
    if (model_a(rec)) ++na;
    if (model_b(rec)) ++nb;
  }
  if (nb == 0)
    return std::numeric_limits<double>::infinity();
  return (static_cast<double>(na) / nb) * (prior_b / prior_a);
}

double prior_probability(const RunConfig& config, const ChainData& data,
                         const RecordPredicate& predicate, long draws,
                         std::mt19937_64& rng) {
  const Lattice* lat = config.lattice ? &*config.lattice : nullptr;
  long hits = 0;
  for (long t = 0; t < draws; ++t) {
    const ChronologyState state = sample_prior_state(config, data, rng);
    if (predicate(to_record(state, lat, false))) ++hits;
  }
  return static_cast<double>(hits) / draws;
}

std::vector<PhaseScatterEntry> phase_scatter(const ChainOutput& chain,
                                             int M_condition) {
  long n_cond = 0;
  std::size_t K = 0;
  for (const SampleRecord& rec : chain.samples)
    if (rec.M == M_condition) {
      ++n_cond;
      K = rec.phase.size();
    }
  if (n_cond == 0) return {};
  std::vector<std::map<int, long>> counts(K);
  for (const SampleRecord& rec : chain.samples) {
    if (rec.M != M_condition) continue;
    for (std::size_t i = 0; i < K; ++i) ++counts[i][rec.phase[i]];
  }
  std::vector<PhaseScatterEntry> out(K);
  for (std::size_t i = 0; i < K; ++i) {
    PhaseScatterEntry e;
    e.date_index = i;
    long best = -1;
    for (const auto& [m, k] : counts[i])
      if (k > best) { best = k; e.modal_phase = m; }
    e.probability = static_cast<double>(best) / n_cond;
    out[i] = e;
  }
  return out;
}

}  // namespace chron
