#include "chron/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chron {

namespace {

double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  return unif(rng);
}

double draw_exponential_mean(std::mt19937_64& rng, double mean) {
  std::exponential_distribution<double> expo(1.0 / mean);
  return expo(rng);
}

int draw_index(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> d(0, n - 1);
  return d(rng);
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.iterations <= config.burn_in || config.burn_in < 0)
    throw std::runtime_error("need iterations > burn_in >= 0");
  if (config.thinning < 1) throw std::runtime_error("thinning must be >= 1");
  if (!(config.L < config.U)) throw std::runtime_error("need L < U");
  if (config.fixed_M < 1) throw std::runtime_error("fixed_M must be >= 1");
  const MoveWeights& w = config.weights;
  const double ws[] = {w.theta, w.psi,        w.field_joint, w.field_conditional,
                       w.scale_rates, w.rj,   w.assignment,  w.rates};
  double total = 0;
  for (double x : ws) {
    if (x < 0) throw std::runtime_error("move weights must be nonnegative");
    total += x;
  }
  if (total == 0) throw std::runtime_error("move weights must not all be zero");
  if (has_field(config.variant)) {
    if (!config.lattice) throw std::runtime_error("field variant needs a lattice");
    validate(*config.lattice);
  }
}

ChronologyState sample_prior_state(const RunConfig& config,
                                   const ChainData& data,
                                   std::mt19937_64& rng) {
  const std::size_t K = data.dates.size();
  const bool field = has_field(config.variant);
  if (field && data.date_cell.size() != K)
    throw std::runtime_error("field variant needs one cell per date");
  for (int attempt = 0; attempt < config.init_retries; ++attempt) {
    ChronologyState state;
    state.variant = config.variant;
    int M = config.fixed_M;
    if (has_random_phases(config.variant)) {
      std::poisson_distribution<int> pois(std::numbers::ln2);
      M = 1 + pois(rng);
    }
    state.phases = sample_prior_psi(M, config.L, config.U, rng);
    state.rates.lambda.assign(static_cast<std::size_t>(M), 1.0);
    if (has_random_phases(config.variant))
      for (double& lam : state.rates.lambda)
        lam = draw_exponential_mean(rng, 1.0);
    if (field) {
      const Lattice& lat = *config.lattice;
      state.alpha = draw_exponential_mean(
          rng, prior_mean_alpha(config.A, lat, config.L, config.U));
      state.beta1 = draw_exponential_mean(
          rng, prior_mean_beta(config.B, lat, config.L, config.U));
      state.beta2 = draw_exponential_mean(
          rng, prior_mean_beta(config.B, lat, config.L, config.U));
      MigrationRates rates{state.alpha, state.beta1, state.beta2};
      state.field = simulate_field(rates, lat, state.phases.psi.back(), true, rng);
      if (!field_in_bounds(*state.field, state.phases.psi.front(),
                           state.phases.psi.back()))
        continue;  // rejection step of the conditioned prior
    }
    state.assignment.phase.resize(K);
    state.theta.resize(K);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < K; ++i) {
      const double onset = field
                               ? state.field->phi[static_cast<std::size_t>(
                                     data.date_cell[i])]
                               : std::numeric_limits<double>::infinity();
      const std::vector<double> p =
          assignment_probabilities(state.rates, state.phases, onset);
      double target = unif(rng);
      int m = M;
      for (int j = 1; j <= M; ++j) {
        target -= p[static_cast<std::size_t>(j - 1)];
        if (target <= 0) { m = j; break; }
      }
      state.assignment.phase[i] = m;
      const double lo = state.phases.psi[static_cast<std::size_t>(m - 1)];
      const double hi =
          std::min(onset, state.phases.psi[static_cast<std::size_t>(m)]);
      state.theta[i] = draw_uniform(rng, lo, hi);
    }
    return state;
  }
  throw std::runtime_error("prior sampling rejection budget exhausted");
}

Sampler::Sampler(RunConfig config, ChainData data, const CurveSet* curves)
    : config_(std::move(config)),
      data_(std::move(data)),
      curves_(curves),
      rng_(config_.seed) {
  validate(config_);
  if (has_field(config_.variant) &&
      data_.date_cell.size() != data_.dates.size())
    throw std::runtime_error("field variant needs one cell per date");
  if (!config_.flat_likelihood && !data_.dates.empty() && curves_ == nullptr)
    throw std::runtime_error("calibration curves required unless flat");
}

double Sampler::date_log_likelihood(std::size_t i, double theta) const {
  if (config_.flat_likelihood || data_.dates.empty()) return 0.0;
  const RadiocarbonDate& d = data_.dates[i];
  if (!curves_->curve_for(d.material).covers(theta)) return kLogZero;
  return log_likelihood(d, theta, *curves_);
}

std::vector<double> Sampler::onset_at_dates(const ChronologyState& state) const {
  std::vector<double> onset;
  if (!state.field) return onset;
  onset.resize(data_.dates.size());
  for (std::size_t i = 0; i < onset.size(); ++i)
    onset[i] = state.field->phi[static_cast<std::size_t>(data_.date_cell[i])];
  return onset;
}

double Sampler::theta_window_hi(const ChronologyState& state,
                                std::size_t i) const {
  const int m = state.assignment.phase[i];
  double hi = state.phases.psi[static_cast<std::size_t>(m)];
  if (state.field)
    hi = std::min(hi,
                  state.field->phi[static_cast<std::size_t>(data_.date_cell[i])]);
  return hi;
}

double Sampler::log_posterior(const ChronologyState& state) const {
  if (!state.phases.valid()) return kLogZero;
  const int M = state.phases.M();
  double lp = log_prior_psi(state.phases) +
              log_prior_psi_norm_constant(M, config_.L, config_.U);
  if (lp == kLogZero) return kLogZero;

  const std::vector<double> onset = onset_at_dates(state);
  if (state.field) {
    if (!field_in_bounds(*state.field, state.phases.psi.front(),
                         state.phases.psi.back()))
      return kLogZero;
    const MigrationRates rates{state.alpha, state.beta1, state.beta2};
    const double lf = log_density_field(*state.field, rates, *config_.lattice,
                                        state.phases.psi.back(), true);
    if (lf == kLogZero) return kLogZero;
    lp += lf + log_prior_alpha_beta(state.alpha, state.beta1, state.beta2,
                                    config_.A, config_.B, *config_.lattice,
                                    config_.L, config_.U);
    if (lp == kLogZero) return kLogZero;
  }

  const double lt = log_prior_theta(state.theta, state.phases,
                                    state.assignment, onset);
  if (lt == kLogZero) return kLogZero;
  lp += lt;

  if (has_random_phases(state.variant)) {
    lp += log_prior_M(M) + log_prior_rates(state.rates);
    const double la = log_prior_assignment(state.assignment, state.rates,
                                           state.phases, onset);
    if (la == kLogZero || lp == kLogZero) return kLogZero;
    lp += la;
  }

  if (!config_.flat_likelihood) {
    for (std::size_t i = 0; i < state.theta.size(); ++i) {
      const double ll = date_log_likelihood(i, state.theta[i]);
      if (ll == kLogZero) return kLogZero;
      lp += ll;
    }
  }
  return lp;
}

bool Sampler::reject(const std::string& name) {
  ++accept_[name].proposed;
  return false;
}

bool Sampler::metropolis(const ChronologyState& proposal, double log_hastings,
                         const std::string& name) {
  AcceptCounter& ctr = accept_[name];
  ++ctr.proposed;
  const double lp_new = log_posterior(proposal);
  const double u = draw_uniform(rng_, 0.0, 1.0);
  if (std::log(u) < lp_new - log_post_ + log_hastings) {
    state_ = proposal;
    log_post_ = lp_new;
    ++ctr.accepted;
    return true;
  }
  return false;
}

bool Sampler::move_theta() {
  if (state_.theta.empty()) return reject("theta");
  const std::size_t i =
      static_cast<std::size_t>(draw_index(rng_, static_cast<int>(state_.theta.size())));
  const int m = state_.assignment.phase[i];
  const double lo = state_.phases.psi[static_cast<std::size_t>(m - 1)];
  const double hi = theta_window_hi(state_, i);
  AcceptCounter& ctr = accept_["theta"];
  ++ctr.proposed;
  const double proposal = draw_uniform(rng_, lo, hi);
  // Uniform proposal on the (unchanged) legal window: the window-length
  // prior factor and the proposal density cancel, leaving the likelihood.
  const double diff =
      date_log_likelihood(i, proposal) - date_log_likelihood(i, state_.theta[i]);
  const double u = draw_uniform(rng_, 0.0, 1.0);
  if (std::log(u) < diff) {
    state_.theta[i] = proposal;
    log_post_ += diff;
    ++ctr.accepted;
    return true;
  }
  return false;
}

bool Sampler::move_psi() {
  const int M = state_.phases.M();
  const int m = draw_index(rng_, M + 1);
  const std::vector<double>& psi = state_.phases.psi;

  // Per-phase theta extremes constrain how far a boundary can move.
  double theta_max_below = -std::numeric_limits<double>::infinity();
  double theta_min_above = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state_.theta.size(); ++i) {
    const int mi = state_.assignment.phase[i];
    if (mi == m) theta_max_below = std::max(theta_max_below, state_.theta[i]);
    if (mi == m + 1) theta_min_above = std::min(theta_min_above, state_.theta[i]);
  }

  double lo, hi;
  if (m == 0) {
    lo = config_.L;
    hi = std::min(psi[1], theta_min_above);
    if (state_.field)
      hi = std::min(hi, *std::min_element(state_.field->phi.begin(),
                                          state_.field->phi.end()));
  } else if (m == M) {
    lo = std::max(psi[static_cast<std::size_t>(M - 1)], theta_max_below);
    hi = config_.U;
  } else {
    lo = std::max(psi[static_cast<std::size_t>(m - 1)], theta_max_below);
    hi = std::min(psi[static_cast<std::size_t>(m + 1)], theta_min_above);
  }
  if (!(lo < hi)) return reject("psi");

  ChronologyState proposal = state_;
  const double value = draw_uniform(rng_, lo, hi);
  proposal.phases.psi[static_cast<std::size_t>(m)] = value;
  if (m == M && proposal.field) {
    // Translate the whole field with psi_M: shape-preserving, the conditioned
    // field density is invariant and max(phi) = psi_M stays pinned exactly.
    const double old_top = psi[static_cast<std::size_t>(M)];
    const double delta = value - old_top;
    for (double& p : proposal.field->phi)
      p = (p == old_top) ? value : p + delta;
  }
  return metropolis(proposal, 0.0, "psi");
}

bool Sampler::move_field_joint() {
  if (!state_.field) return reject("field_joint");
  const Lattice& lat = *config_.lattice;
  ChronologyState proposal = state_;
  proposal.alpha = draw_exponential_mean(
      rng_, prior_mean_alpha(config_.A, lat, config_.L, config_.U));
  proposal.beta1 = draw_exponential_mean(
      rng_, prior_mean_beta(config_.B, lat, config_.L, config_.U));
  proposal.beta2 = draw_exponential_mean(
      rng_, prior_mean_beta(config_.B, lat, config_.L, config_.U));
  const MigrationRates prop_rates{proposal.alpha, proposal.beta1, proposal.beta2};
  const double top = state_.phases.psi.back();
  proposal.field = simulate_field(prop_rates, lat, top, true, rng_);
  // Independence proposal from the prior: prior and proposal cancel, leaving
  // likelihood, window factors and the in-bounds indicator in the ratio.
  const MigrationRates cur_rates{state_.alpha, state_.beta1, state_.beta2};
  const double log_hastings =
      (log_density_field(*state_.field, cur_rates, lat, top, true) +
       log_prior_alpha_beta(state_.alpha, state_.beta1, state_.beta2, config_.A,
                            config_.B, lat, config_.L, config_.U)) -
      (log_density_field(*proposal.field, prop_rates, lat, top, true) +
       log_prior_alpha_beta(proposal.alpha, proposal.beta1, proposal.beta2,
                            config_.A, config_.B, lat, config_.L, config_.U));
  return metropolis(proposal, log_hastings, "field_joint");
}

bool Sampler::move_field_conditional() {
  if (!state_.field) return reject("field_conditional");
  const Lattice& lat = *config_.lattice;
  const MigrationRates rates{state_.alpha, state_.beta1, state_.beta2};
  const double top = state_.phases.psi.back();
  ChronologyState proposal = state_;
  proposal.field = simulate_field(rates, lat, top, true, rng_);
  const double log_hastings =
      log_density_field(*state_.field, rates, lat, top, true) -
      log_density_field(*proposal.field, rates, lat, top, true);
  return metropolis(proposal, log_hastings, "field_conditional");
}

bool Sampler::move_scale_rates() {
  if (!state_.field) return reject("scale_rates");
  const double z = draw_uniform(rng_, 0.5, 2.0);
  ChronologyState proposal = state_;
  proposal.alpha *= z;
  proposal.beta1 *= z;
  proposal.beta2 *= z;
  // Scaling d=3 coordinates by z ~ U(1/2,2): the (x,z) -> (zx, 1/z) Green
  // construction gives |Jacobian| = z^d / z^2, so the correction is z^(d-2).
  return metropolis(proposal, std::log(z), "scale_rates");
}

bool Sampler::move_rj() {
  const bool add = draw_uniform(rng_, 0.0, 1.0) < 0.5;
  const int M = state_.phases.M();
  if (!add && M == 1) return reject("rj_delete");

  ChronologyState proposal = state_;
  double log_hastings;
  if (add) {
    const int j = 1 + draw_index(rng_, M);  // phase to split
    const double lo = state_.phases.psi[static_cast<std::size_t>(j - 1)];
    const double hi = state_.phases.psi[static_cast<std::size_t>(j)];
    const double knot = draw_uniform(rng_, lo, hi);
    const double lambda_new = draw_exponential_mean(rng_, 1.0);
    proposal.phases.psi.insert(proposal.phases.psi.begin() + j, knot);
    proposal.rates.lambda.insert(proposal.rates.lambda.begin() + j, lambda_new);
    for (std::size_t i = 0; i < proposal.assignment.phase.size(); ++i) {
      int& mi = proposal.assignment.phase[i];
      if (mi > j) ++mi;
      else if (mi == j && proposal.theta[i] > knot) mi = j + 1;
    }
    // q_fwd = (1/M) (1/(hi-lo)) e^{-lambda_new}; q_rev = 1/M (interior
    // boundary choice in the grown state); dimension-matching Jacobian 1.
    log_hastings = std::log(hi - lo) + lambda_new;
    return metropolis(proposal, log_hastings, "rj_add");
  }

  const int b = 1 + draw_index(rng_, M - 1);  // interior boundary to drop
  const double merged_span =
      state_.phases.psi[static_cast<std::size_t>(b + 1)] -
      state_.phases.psi[static_cast<std::size_t>(b - 1)];
  const double lambda_removed = state_.rates.lambda[static_cast<std::size_t>(b)];
  proposal.phases.psi.erase(proposal.phases.psi.begin() + b);
  proposal.rates.lambda.erase(proposal.rates.lambda.begin() + b);
  for (int& mi : proposal.assignment.phase)
    if (mi > b) --mi;
  log_hastings = -std::log(merged_span) - lambda_removed;
  return metropolis(proposal, log_hastings, "rj_delete");
}

bool Sampler::move_assignment() {
  const int M = state_.phases.M();
  if (M == 1 || state_.theta.empty()) return reject("assignment");
  const std::size_t i =
      static_cast<std::size_t>(draw_index(rng_, static_cast<int>(state_.theta.size())));
  const int m = state_.assignment.phase[i];
  const int n_src = (m > 1 ? 1 : 0) + (m < M ? 1 : 0);
  int dest = m > 1 ? m - 1 : m + 1;
  if (n_src == 2 && draw_uniform(rng_, 0.0, 1.0) < 0.5) dest = m + 1;

  const double onset =
      state_.field
          ? state_.field->phi[static_cast<std::size_t>(data_.date_cell[i])]
          : std::numeric_limits<double>::infinity();
  const double src_w = std::min(onset, state_.phases.psi[static_cast<std::size_t>(m)]) -
                       state_.phases.psi[static_cast<std::size_t>(m - 1)];
  const double dst_lo = state_.phases.psi[static_cast<std::size_t>(dest - 1)];
  const double dst_hi =
      std::min(onset, state_.phases.psi[static_cast<std::size_t>(dest)]);
  if (!(dst_hi > dst_lo)) return reject("assignment");

  ChronologyState proposal = state_;
  proposal.assignment.phase[i] = dest;
  proposal.theta[i] = draw_uniform(rng_, dst_lo, dst_hi);
  const int n_dst = (dest > 1 ? 1 : 0) + (dest < M ? 1 : 0);
  // Destination age redrawn uniformly: the window factors of the theta prior
  // cancel against the proposal densities, leaving the direction choice.
  const double log_hastings = std::log(double(n_src) / n_dst) +
                              std::log((dst_hi - dst_lo) / src_w);
  return metropolis(proposal, log_hastings, "assignment");
}

bool Sampler::move_rates() {
  const int M = state_.phases.M();
  const int m = draw_index(rng_, M);
  const double z = draw_uniform(rng_, 0.5, 2.0);
  ChronologyState proposal = state_;
  proposal.rates.lambda[static_cast<std::size_t>(m)] *= z;
  // One scaled coordinate: correction z^(d-2) with d=1.
  return metropolis(proposal, -std::log(z), "rates");
}

void Sampler::initialize() {
  if (initialized_) return;
  const std::size_t K = data_.dates.size();
  if (config_.flat_likelihood || K == 0) {
    state_ = sample_prior_state(config_, data_, rng_);
  } else {
    ChronologyState state;
    state.variant = config_.variant;
    state.theta.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
      const CalibrationCurve& curve =
          curves_->curve_for(data_.dates[i].material);
      const long lo = std::max<long>(std::llround(std::floor(config_.L)) + 1,
                                     std::llround(curve.min_age()));
      const long hi = std::min<long>(std::llround(std::ceil(config_.U)) - 1,
                                     std::llround(curve.max_age()));
      if (lo > hi)
        throw std::runtime_error("date " + data_.dates[i].id +
                                 ": no curve support inside (L, U)");
      double best = kLogZero;
      long best_t = lo;
      for (long t = lo; t <= hi; ++t) {
        const double ll = log_likelihood(data_.dates[i],
                                         static_cast<double>(t), *curves_);
        if (ll > best) { best = ll; best_t = t; }
      }
      state.theta[i] = static_cast<double>(best_t);
    }
    std::vector<double> sorted = state.theta;
    std::sort(sorted.begin(), sorted.end());
    const int M = has_random_phases(config_.variant) ? 1 : config_.fixed_M;
    state.phases.L = config_.L;
    state.phases.U = config_.U;
    state.phases.psi.resize(static_cast<std::size_t>(M) + 1);
    state.phases.psi.front() = 0.5 * (config_.L + sorted.front());
    state.phases.psi.back() = 0.5 * (sorted.back() + config_.U);
    std::vector<double> cuts;  // interior boundaries from theta quantiles
    for (int m = 1; m < M; ++m) {
      const std::size_t split = (K * static_cast<std::size_t>(m)) / M;
      const std::size_t at = std::min(split, K - 1);
      const double cut = at == 0 ? sorted.front()
                                 : 0.5 * (sorted[at - 1] + sorted[at]);
      state.phases.psi[static_cast<std::size_t>(m)] = cut;
      cuts.push_back(cut);
    }
    state.assignment.phase.assign(K, 1);
    for (std::size_t i = 0; i < K; ++i)
      for (double cut : cuts)
        if (state.theta[i] > cut) ++state.assignment.phase[i];
    state.rates.lambda.assign(static_cast<std::size_t>(M), 1.0);
    if (has_field(config_.variant)) {
      const Lattice& lat = *config_.lattice;
      state.alpha = prior_mean_alpha(config_.A, lat, config_.L, config_.U);
      state.beta1 = prior_mean_beta(config_.B, lat, config_.L, config_.U);
      state.beta2 = state.beta1;
      OnsetField field;
      field.phi.assign(static_cast<std::size_t>(lat.cells()),
                       state.phases.psi.back());
      state.field = std::move(field);
    }
    state_ = state;
  }
  log_post_ = log_posterior(state_);
  if (log_post_ == kLogZero)
    throw std::runtime_error("no valid initial state found");
  initialized_ = true;
}

SampleRecord to_record(const ChronologyState& state, const Lattice* lattice,
                       bool with_field) {
  SampleRecord rec;
  rec.M = state.phases.M();
  rec.psi = state.phases.psi;
  rec.theta = state.theta;
  rec.lambda = state.rates.lambda;
  rec.phase = state.assignment.phase;
  rec.counts = state.assignment.counts(rec.M);
  rec.alpha = state.alpha;
  rec.beta1 = state.beta1;
  rec.beta2 = state.beta2;
  if (state.field && lattice != nullptr) {
    rec.V = arrival_count(*state.field, *lattice);
    if (with_field) rec.phi = state.field->phi;
  }
  return rec;
}

SampleRecord Sampler::record(long iter) const {
  SampleRecord rec = to_record(
      state_, config_.lattice ? &*config_.lattice : nullptr,
      config_.record_fields);
  rec.iter = iter;
  if (!config_.flat_likelihood && curves_ != nullptr)
    for (std::size_t i = 0; i < state_.theta.size(); ++i)
      rec.loglik += log_likelihood(data_.dates[i], state_.theta[i], *curves_);
  return rec;
}

ChainOutput Sampler::run() {
  initialize();
  enum MoveKind {
    kTheta, kPsi, kFieldJoint, kFieldConditional, kScaleRates, kRj,
    kAssignment, kRates
  };
  const MoveWeights& w = config_.weights;
  const bool field = has_field(config_.variant);
  const bool rp = has_random_phases(config_.variant);
  std::vector<double> weights = {
      state_.theta.empty() ? 0 : w.theta,
      w.psi,
      field ? w.field_joint : 0,
      field ? w.field_conditional : 0,
      field ? w.scale_rates : 0,
      rp ? w.rj : 0,
      rp && !state_.theta.empty() ? w.assignment : 0,
      rp ? w.rates : 0};
  std::discrete_distribution<int> pick(weights.begin(), weights.end());

  ChainOutput out;
  out.config = config_;
  const long n_records = (config_.iterations - config_.burn_in) / config_.thinning;
  out.samples.reserve(static_cast<std::size_t>(n_records));
  for (long iter = 1; iter <= config_.iterations; ++iter) {
    switch (pick(rng_)) {
      case kTheta: move_theta(); break;
      case kPsi: move_psi(); break;
      case kFieldJoint: move_field_joint(); break;
      case kFieldConditional: move_field_conditional(); break;
      case kScaleRates: move_scale_rates(); break;
      case kRj: move_rj(); break;
      case kAssignment: move_assignment(); break;
      case kRates: move_rates(); break;
    }
    if (iter > config_.burn_in &&
        (iter - config_.burn_in) % config_.thinning == 0)
      out.samples.push_back(record(iter));
  }
  out.acceptance = accept_;
  return out;
}

ChainOutput run_chain(const RunConfig& config, const ChainData& data,
                      const CurveSet* curves) {
  Sampler sampler(config, data, curves);
  return sampler.run();
}

}  // namespace chron
