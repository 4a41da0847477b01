#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chron/calibration.hpp"
#include "chron/dataset.hpp"
#include "chron/heatmap.hpp"
#include "chron/io.hpp"
#include "chron/mcmc.hpp"
#include "chron/summaries.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string dates_path;
  std::string pits_path;
  std::string curve_path;
  std::string marine_curve_path;
  std::string out_dir = ".";
  std::string variant = "SP";
  long iterations = 1000000;
  long burn_in = 100000;
  long thinning = 100;
  std::uint64_t seed = 1;
  double L = 2000, U = 3500, A = 10, B = 1;
  double cell_side = 2.375;
  int fixed_M = 1;
  double t_star = 150, p_star = 0.8, bin_width = 10;
  bool flat = false;
};

void add_run_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--dates", o.dates_path, "dates CSV");
  cmd->add_option("--pits", o.pits_path, "pits CSV");
  cmd->add_option("--curve", o.curve_path, "terrestrial calibration curve CSV");
  cmd->add_option("--marine-curve", o.marine_curve_path,
                  "marine calibration curve CSV (defaults to --curve)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--variant", o.variant, "SP | SPOF | RP | RPOF");
  cmd->add_option("--iterations", o.iterations);
  cmd->add_option("--burn-in", o.burn_in);
  cmd->add_option("--thinning", o.thinning);
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--lower", o.L, "lower age limit L (years BP)");
  cmd->add_option("--upper", o.U, "upper age limit U (years BP)");
  cmd->add_option("--hyper-a", o.A, "immigration hyperparameter A");
  cmd->add_option("--hyper-b", o.B, "migration hyperparameter B");
  cmd->add_option("--cell-side", o.cell_side, "lattice cell side, meters");
  cmd->add_option("--phases", o.fixed_M, "phase count for SP/SPOF");
  cmd->add_option("--t-star", o.t_star, "partition elapsed-time threshold");
  cmd->add_option("--p-star", o.p_star, "partition probability threshold");
  cmd->add_option("--bin-width", o.bin_width, "histogram bin width, years");
  cmd->add_flag("--flat-likelihood", o.flat,
                "replace the likelihood with a constant (prior run)");
}

std::string output_dir(const CommonOpts& o) {
  if (const char* env = std::getenv("CHRON_OUTPUT_DIR")) return env;
  return o.out_dir;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

chron::Dataset load_dataset(const CommonOpts& o, int* omitted) {
  chron::Dataset data;
  auto din = open_input(o.dates_path);
  data.dates = chron::parse_dates(din, omitted);
  if (!o.pits_path.empty()) {
    auto pin = open_input(o.pits_path);
    data.pits = chron::parse_pits(pin);
  }
  chron::validate(data);
  return data;
}

chron::CurveSet load_curves(const CommonOpts& o) {
  auto tin = open_input(o.curve_path);
  chron::CalibrationCurve terrestrial =
      chron::CalibrationCurve::load(tin, chron::Material::terrestrial)
          .interpolated();
  if (o.marine_curve_path.empty())
    return chron::CurveSet(std::move(terrestrial));
  auto min_ = open_input(o.marine_curve_path);
  chron::CalibrationCurve marine =
      chron::CalibrationCurve::load(min_, chron::Material::marine)
          .interpolated();
  return chron::CurveSet(std::move(terrestrial), std::move(marine));
}

chron::RunConfig make_config(const CommonOpts& o, const chron::Dataset& data) {
  chron::RunConfig cfg;
  cfg.variant = chron::variant_from_string(o.variant);
  cfg.iterations = o.iterations;
  cfg.burn_in = o.burn_in;
  cfg.thinning = o.thinning;
  cfg.seed = o.seed;
  cfg.L = o.L;
  cfg.U = o.U;
  cfg.A = o.A;
  cfg.B = o.B;
  cfg.fixed_M = o.fixed_M;
  cfg.flat_likelihood = o.flat;
  if (chron::has_field(cfg.variant)) {
    if (data.pits.empty())
      throw std::runtime_error("variant " + o.variant + " needs --pits");
    cfg.lattice = chron::fit_lattice(data.pits, o.cell_side);
  }
  chron::validate(cfg);
  return cfg;
}

void write_manifest(const std::string& dir, const CommonOpts& o,
                    const chron::RunConfig& cfg, int omitted,
                    std::size_t n_dates) {
  json j;
  j["tool"] = "chron";
  j["version"] = "1.0.0";
  j["config_hash"] = chron::config_hash(cfg);
  j["seed"] = cfg.seed;
  j["variant"] = chron::to_string(cfg.variant);
  j["iterations"] = cfg.iterations;
  j["burn_in"] = cfg.burn_in;
  j["thinning"] = cfg.thinning;
  j["limits"] = {cfg.L, cfg.U};
  j["hyper"] = {{"A", cfg.A}, {"B", cfg.B}};
  j["dates"] = n_dates;
  j["dates_omitted"] = omitted;
  if (cfg.lattice) {
    j["lattice"] = {{"c1", cfg.lattice->c1},
                    {"c2", cfg.lattice->c2},
                    {"cell_side", cfg.lattice->cell_side},
                    {"x0", cfg.lattice->x0},
                    {"y0", cfg.lattice->y0}};
  }
  j["inputs"] = {{"dates", o.dates_path},
                 {"pits", o.pits_path},
                 {"curve", o.curve_path},
                 {"marine_curve", o.marine_curve_path}};
  open_output(dir + "/manifest.json") << j.dump(2) << '\n';
}

void write_summaries(const std::string& dir, const chron::ChainOutput& chain,
                     const chron::Dataset& data, const CommonOpts& o,
                     const std::vector<int>& date_cell) {
  json j;
  const auto probs = chron::model_probabilities(chain);
  for (const auto& [m, p] : probs)
    j["model_probabilities"][std::to_string(m)] = {
        {"posterior", p.posterior}, {"mc_se", p.mc_se},
        {"evidence", p.evidence}};
  if (!chain.samples.empty() && !chain.samples.front().phi.empty()) {
    const chron::FieldSummary fs = chron::field_summary(chain);
    j["field"] = {{"c1", fs.c1},
                  {"c2", fs.c2},
                  {"mean", fs.mean},
                  {"stddev", fs.stddev},
                  {"elapsed_std", fs.elapsed_std}};
    const chron::Partition part =
        chron::make_partition(chain, o.t_star, o.p_star);
    j["partition"] = {{"t_star", o.t_star},
                      {"p_star", o.p_star},
                      {"green", part.count(chron::CellLabel::green)},
                      {"blue", part.count(chron::CellLabel::blue)},
                      {"red", part.count(chron::CellLabel::red)}};
    const auto rows = chron::threshold_scan(chain, o.p_star);
    j["splitting_threshold_exists"] = chron::any_splitting_threshold(rows);

    std::vector<std::pair<std::string, int>> pit_cells;
    for (std::size_t i = 0; i < data.dates.size() && i < date_cell.size(); ++i)
      pit_cells.emplace_back(data.dates[i].pit, date_cell[i]);
    std::sort(pit_cells.begin(), pit_cells.end());
    pit_cells.erase(std::unique(pit_cells.begin(), pit_cells.end()),
                    pit_cells.end());
    const auto hists =
        chron::pit_onset_histograms(chain, pit_cells, o.bin_width);
    for (const auto& [pit, h] : hists) {
      json bins = json::object();
      for (const auto& [bin, count] : h.counts)
        bins[std::to_string(bin)] = count;
      j["pit_onset_histograms"][pit] = {{"bin_width", h.bin_width},
                                        {"total", h.total},
                                        {"bins", bins}};
    }
  }
  open_output(dir + "/summary.json") << j.dump(2) << '\n';
  open_output(dir + "/acceptance.json")
      << chron::acceptance_counts_json(chain) << '\n';
}

void write_rasters(const std::string& dir, const chron::ChainOutput& chain,
                   const CommonOpts& o) {
  if (chain.samples.empty() || chain.samples.front().phi.empty()) return;
  const chron::FieldSummary fs = chron::field_summary(chain);
  open_output(dir + "/mean_onset.png")
      << chron::encode_png(chron::render_heatmap(fs.mean, fs.c1, fs.c2));
  open_output(dir + "/std_onset.png")
      << chron::encode_png(chron::render_heatmap(fs.stddev, fs.c1, fs.c2));
  const chron::Partition part =
      chron::make_partition(chain, o.t_star, o.p_star);
  open_output(dir + "/partition.png")
      << chron::encode_png(chron::render_partition(part, fs.c1, fs.c2));
}

int cmd_fit(const CommonOpts& o) {
  const std::string dir = output_dir(o);
  int omitted = 0;
  const chron::Dataset data = load_dataset(o, &omitted);
  const chron::CurveSet curves = load_curves(o);
  const chron::RunConfig cfg = make_config(o, data);
  write_manifest(dir, o, cfg, omitted, data.dates.size());

  chron::ChainData chain_data;
  chain_data.dates = data.dates;
  if (cfg.lattice) chain_data.date_cell = chron::date_cells(data, *cfg.lattice);
  chron::ChainOutput chain = chron::run_chain(cfg, chain_data, &curves);

  {
    auto out = open_output(dir + "/trace.csv");
    chron::write_trace_csv(out, chain.samples);
  }
  if (cfg.lattice) {
    auto out = open_output(dir + "/fields.bin");
    chron::write_fields_binary(out, chain.samples, cfg.lattice->c1,
                               cfg.lattice->c2);
  }
  write_summaries(dir, chain, data, o, chain_data.date_cell);
  write_rasters(dir, chain, o);
  return 0;
}

int cmd_simulate_prior(const CommonOpts& o, long draws) {
  const std::string dir = output_dir(o);
  int omitted = 0;
  chron::Dataset data;
  if (!o.dates_path.empty()) data = load_dataset(o, &omitted);
  chron::RunConfig cfg;
  if (!data.dates.empty()) {
    cfg = make_config(o, data);
  } else {
    cfg.variant = chron::variant_from_string(o.variant);
    cfg.seed = o.seed;
    cfg.L = o.L;
    cfg.U = o.U;
    cfg.A = o.A;
    cfg.B = o.B;
    cfg.fixed_M = o.fixed_M;
    if (chron::has_field(cfg.variant)) {
      if (o.pits_path.empty())
        throw std::runtime_error("variant " + o.variant + " needs --pits");
      auto pin = open_input(o.pits_path);
      data.pits = chron::parse_pits(pin);
      cfg.lattice = chron::fit_lattice(data.pits, o.cell_side);
    }
    chron::validate(cfg);
  }
  write_manifest(dir, o, cfg, omitted, data.dates.size());

  chron::ChainData chain_data;
  chain_data.dates = data.dates;
  if (cfg.lattice && !data.dates.empty())
    chain_data.date_cell = chron::date_cells(data, *cfg.lattice);

  std::mt19937_64 rng(cfg.seed);
  const chron::Lattice* lat = cfg.lattice ? &*cfg.lattice : nullptr;
  chron::ChainOutput chain;
  chain.config = cfg;
  for (long k = 0; k < draws; ++k) {
    const chron::ChronologyState state =
        chron::sample_prior_state(cfg, chain_data, rng);
    chron::SampleRecord rec = chron::to_record(state, lat);
    rec.iter = k;
    chain.samples.push_back(std::move(rec));
  }
  {
    auto out = open_output(dir + "/trace.csv");
    chron::write_trace_csv(out, chain.samples);
  }
  if (cfg.lattice) {
    auto out = open_output(dir + "/fields.bin");
    chron::write_fields_binary(out, chain.samples, cfg.lattice->c1,
                               cfg.lattice->c2);
  }
  write_summaries(dir, chain, data, o, chain_data.date_cell);
  write_rasters(dir, chain, o);
  return 0;
}

chron::ChainOutput load_chain(const std::string& dir) {
  chron::ChainOutput chain;
  auto tin = open_input(dir + "/trace.csv");
  chain.samples = chron::read_trace_csv(tin);
  std::ifstream fin(dir + "/fields.bin", std::ios::binary);
  if (fin) {
    const chron::FieldsFile ff = chron::read_fields_binary(fin);
    if (ff.fields.size() != chain.samples.size())
      throw std::runtime_error("trace/fields sample count mismatch");
    chron::Lattice lat;
    lat.c1 = ff.c1;
    lat.c2 = ff.c2;
    chain.config.lattice = lat;
    for (std::size_t i = 0; i < ff.fields.size(); ++i)
      chain.samples[i].phi = ff.fields[i];
  }
  return chain;
}

int cmd_summarize(const CommonOpts& o, const std::string& run_dir) {
  const chron::ChainOutput chain = load_chain(run_dir);
  chron::Dataset empty;
  write_summaries(output_dir(o), chain, empty, o, {});
  return 0;
}

int cmd_render(const CommonOpts& o, const std::string& run_dir,
               const std::string& what, int pixels_per_cell) {
  const chron::ChainOutput chain = load_chain(run_dir);
  if (!chain.config.lattice)
    throw std::runtime_error("run has no onset fields to render");
  const std::string dir = output_dir(o);
  const chron::FieldSummary fs = chron::field_summary(chain);
  chron::Image img;
  if (what == "mean")
    img = chron::render_heatmap(fs.mean, fs.c1, fs.c2, pixels_per_cell);
  else if (what == "std")
    img = chron::render_heatmap(fs.stddev, fs.c1, fs.c2, pixels_per_cell);
  else if (what == "elapsed-std")
    img = chron::render_heatmap(fs.elapsed_std, fs.c1, fs.c2, pixels_per_cell);
  else if (what == "partition")
    img = chron::render_partition(
        chron::make_partition(chain, o.t_star, o.p_star), fs.c1, fs.c2,
        pixels_per_cell);
  else
    throw std::runtime_error("unknown render target '" + what + "'");
  open_output(dir + "/" + what + ".png") << chron::encode_png(img);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian radiocarbon chronology with spatial onset fields"};
  app.require_subcommand(1);

  CommonOpts o;
  long draws = 1000;
  std::string run_dir = ".";
  std::string what = "mean";
  int pixels_per_cell = 16;

  CLI::App* fit = app.add_subcommand("fit", "run the MCMC sampler");
  add_run_flags(fit, o);
  fit->get_option("--dates")->required();
  fit->get_option("--curve")->required();

  CLI::App* sim =
      app.add_subcommand("simulate-prior", "draw directly from the prior");
  add_run_flags(sim, o);
  sim->add_option("--draws", draws, "number of prior draws");

  CLI::App* summ =
      app.add_subcommand("summarize", "recompute summaries from a run");
  add_run_flags(summ, o);
  summ->add_option("--run", run_dir, "directory of an earlier run")
      ->required();

  CLI::App* render = app.add_subcommand("render", "render a heatmap PNG");
  add_run_flags(render, o);
  render->add_option("--run", run_dir, "directory of an earlier run")
      ->required();
  render->add_option("--what", what, "mean | std | elapsed-std | partition");
  render->add_option("--pixels-per-cell", pixels_per_cell);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (sim->parsed()) return cmd_simulate_prior(o, draws);
    if (summ->parsed()) return cmd_summarize(o, run_dir);
    if (render->parsed()) return cmd_render(o, run_dir, what, pixels_per_cell);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
