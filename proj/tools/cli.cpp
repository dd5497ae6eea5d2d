#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "figures.hpp"
#include "qwalk/bloch.hpp"
#include "qwalk/estimation.hpp"
#include "qwalk/fisher.hpp"
#include "qwalk/grid_io.hpp"
#include "qwalk/quadrature.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/walk_sim.hpp"

namespace qwalk::cli {

namespace {

using nlohmann::json;

double jnum(double x) { return round12(x); }  // non-finite values dump as null

std::vector<Placement> parse_placements(const std::string& text) {
  std::vector<Placement> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Placement::parse(item));
  if (out.empty()) throw std::invalid_argument("placements: empty list");
  return out;
}

json placements_json(const std::vector<Placement>& placements) {
  json arr = json::array();
  for (const Placement& m : placements) arr.push_back(m.str());
  return arr;
}

json state_json(const BlochState& s) {
  return json{{"alpha", jnum(s.alpha)}, {"beta", jnum(s.beta)}};
}

json scalar_json(const FisherScalar& s) {
  json j;
  j["value"] = s.has_value() ? json(jnum(s.value)) : json(nullptr);
  j["tag"] = tag_name(s.tag);
  return j;
}

json matrix_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({jnum(m(0, 0)), jnum(m(0, 1))}),
                      json::array({jnum(m(1, 0)), jnum(m(1, 1))})});
}

json report_json(const EstimationReport& report, const ExperimentDesign& design,
                 int replicates, std::optional<BlochState> truth) {
  json j;
  j["mle_primary"] = state_json(report.mle_primary);
  j["mle_mirror"] = state_json(report.mle_mirror);
  j["log_likelihood_at_max"] = jnum(report.log_likelihood_at_max);
  j["crb_covariance"] =
      report.crb.matrix_valid ? matrix_json(report.crb.covariance) : json(nullptr);
  j["crb_scalar_bounds"] = {
      {"var_alpha", report.crb.alpha_valid ? json(jnum(report.crb.var_alpha)) : json(nullptr)},
      {"var_beta", report.crb.beta_valid ? json(jnum(report.crb.var_beta)) : json(nullptr)}};
  j["empirical_covariance"] =
      report.n_replicates >= 2 ? matrix_json(report.empirical_covariance) : json(nullptr);
  j["n_replicates"] = report.n_replicates;
  j["flags"] = {{"rank_deficient_design", report.rank_deficient_design},
                {"boundary_solution", report.boundary_solution}};
  j["design"] = {{"placements", placements_json(design.placements)},
                 {"trials_per_placement", design.trials_per_placement},
                 {"seed", design.seed},
                 {"replicates", replicates}};
  if (truth) j["truth"] = state_json(*truth);
  j["rng"] = report.rng_algorithm;
  return j;
}

void emit(std::ostream& out, const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot write " + out_path);
  file << payload;
}

struct EscapeProbArgs {
  std::string alpha, beta, m;
  double rho = 0.5;
  std::string method = "closed";
  double tol = 1e-8;
  int steps = 10000;
};

void run_escape_prob(const EscapeProbArgs& args, std::ostream& out) {
  const BlochState state = canonicalize(parse_angle(args.alpha), parse_angle(args.beta));
  const Placement m = Placement::parse(args.m);
  json j;
  j["alpha"] = jnum(state.alpha);
  j["beta"] = jnum(state.beta);
  j["m"] = m.str();
  j["rho"] = jnum(args.rho);
  j["method"] = args.method;
  if (args.method == "closed") {
    if (args.rho != 0.5)
      throw std::domain_error("escape-prob: closed form requires rho = 0.5");
    j["value"] = jnum(escape_prob_closed(state, m));
    j["achieved_tol"] = 0.0;
  } else if (args.method == "quadrature") {
    const EscapeQuadrature q = escape_prob_quadrature_detailed(state, m, args.rho, args.tol);
    j["value"] = jnum(q.value);
    j["achieved_tol"] = jnum(q.error_estimate);
  } else if (args.method == "simulate") {
    if (m.is_infinite())
      throw std::domain_error("escape-prob: simulate requires a finite boundary");
    WalkConfig config{args.rho, m.distance(), args.steps};
    const SurvivalTrace trace = run(config, state);
    j["value"] = jnum(trace.escape_estimate);
    j["achieved_tol"] = jnum(tail_residual(trace, std::max(1, args.steps / 10)));
    j["steps"] = trace.steps_run;
  } else {
    throw std::domain_error("escape-prob: unknown method '" + args.method + "'");
  }
  out << j.dump(2) << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Escape statistics and coin-state estimation for an absorbing quantum walk"};
  app.require_subcommand(1);

  // escape-prob
  auto args_ep = std::make_shared<EscapeProbArgs>();
  CLI::App* ep = app.add_subcommand("escape-prob", "Asymptotic escape probability");
  ep->add_option("--alpha", args_ep->alpha, "polar angle (accepts pi literals)")->required();
  ep->add_option("--beta", args_ep->beta, "relative phase (accepts pi literals)")->required();
  ep->add_option("--m", args_ep->m, "absorber distance (integer or 'inf')")->required();
  ep->add_option("--rho", args_ep->rho, "coin parameter in (0, 1]");
  ep->add_option("--method", args_ep->method, "closed | quadrature | simulate");
  ep->add_option("--tol", args_ep->tol, "quadrature tolerance");
  ep->add_option("--steps", args_ep->steps, "simulation steps");

  // simulate
  auto sim_alpha = std::make_shared<std::string>();
  auto sim_beta = std::make_shared<std::string>();
  auto sim_m = std::make_shared<int>(1);
  auto sim_rho = std::make_shared<double>(0.5);
  auto sim_steps = std::make_shared<int>(10000);
  auto sim_out = std::make_shared<std::string>();
  CLI::App* sim = app.add_subcommand("simulate", "Per-step absorption trace (CSV)");
  sim->add_option("--alpha", *sim_alpha)->required();
  sim->add_option("--beta", *sim_beta)->required();
  sim->add_option("--m", *sim_m, "absorber distance")->required();
  sim->add_option("--rho", *sim_rho);
  sim->add_option("--steps", *sim_steps);
  sim->add_option("--out", *sim_out, "output file (default stdout)");

  // grid
  auto grid_quantity = std::make_shared<std::string>("P_E");
  auto grid_m = std::make_shared<std::string>();
  auto grid_placements = std::make_shared<std::string>();
  auto grid_na = std::make_shared<int>(41);
  auto grid_nb = std::make_shared<int>(81);
  auto grid_cap = std::make_shared<double>(-1.0);
  auto grid_offset = std::make_shared<bool>(false);
  auto grid_format = std::make_shared<std::string>("csv");
  auto grid_out = std::make_shared<std::string>();
  CLI::App* grid = app.add_subcommand("grid", "Scan a quantity over the Bloch rectangle");
  grid->add_option("--quantity", *grid_quantity,
                   "P_E | F_alpha | F_beta | eta_alpha | eta_beta | detF_tot");
  grid->add_option("--m", *grid_m, "single placement");
  grid->add_option("--placements", *grid_placements, "comma list (detF_tot)");
  grid->add_option("--res-alpha", *grid_na);
  grid->add_option("--res-beta", *grid_nb);
  grid->add_option("--cap-percentile", *grid_cap, "display cap percentile (0 disables)");
  grid->add_flag("--offset", *grid_offset, "half-cell-offset axes");
  grid->add_option("--format", *grid_format, "csv | json");
  grid->add_option("--out", *grid_out);

  // fisher
  auto fish_alpha = std::make_shared<std::string>();
  auto fish_beta = std::make_shared<std::string>();
  auto fish_m = std::make_shared<std::string>();
  auto fish_placements = std::make_shared<std::string>();
  CLI::App* fish = app.add_subcommand("fisher", "Fisher information, QFI, efficiencies");
  fish->add_option("--alpha", *fish_alpha)->required();
  fish->add_option("--beta", *fish_beta)->required();
  fish->add_option("--m", *fish_m, "single placement");
  fish->add_option("--placements", *fish_placements, "comma list");

  // hot-spots
  auto hs_m = std::make_shared<std::string>();
  auto hs_res = std::make_shared<int>(64);
  CLI::App* hs = app.add_subcommand("hot-spots", "Local maxima of F_beta");
  hs->add_option("--m", *hs_m)->required();
  hs->add_option("--resolution", *hs_res);

  // estimate
  auto est_alpha = std::make_shared<std::string>();
  auto est_beta = std::make_shared<std::string>();
  auto est_placements = std::make_shared<std::string>("1,2");
  auto est_trials = std::make_shared<std::int64_t>(10000);
  auto est_seed = std::make_shared<std::uint64_t>(0);
  auto est_reps = std::make_shared<int>(0);
  auto est_grid_res = std::make_shared<int>(41);
  auto est_tol = std::make_shared<double>(1e-6);
  CLI::App* est = app.add_subcommand("estimate", "Sample counts and run the MLE");
  est->add_option("--alpha", *est_alpha, "true state")->required();
  est->add_option("--beta", *est_beta, "true state")->required();
  est->add_option("--placements", *est_placements);
  est->add_option("--trials", *est_trials, "trials per placement");
  est->add_option("--seed", *est_seed);
  est->add_option("--replicates", *est_reps, "0/1 = single experiment; >= 100 = Monte Carlo");
  est->add_option("--grid-res", *est_grid_res);
  est->add_option("--refine-tol", *est_tol);

  // compare-tomo
  auto ct_steps = std::make_shared<int>(0);
  auto ct_placements = std::make_shared<int>(0);
  CLI::App* ct = app.add_subcommand("compare-tomo", "Measurement-settings comparison");
  ct->add_option("--steps", *ct_steps, "walk steps T")->required();
  ct->add_option("--placements", *ct_placements, "absorption placements used")->required();

  // reproduce-figures
  auto fig_out = std::make_shared<std::string>();
  auto fig_surface = std::make_shared<int>(101);
  auto fig_cut = std::make_shared<int>(201);
  CLI::App* fig = app.add_subcommand("reproduce-figures", "Write all figure data files");
  fig->add_option("--out", *fig_out, "output directory")->required();
  fig->add_option("--surface-res", *fig_surface);
  fig->add_option("--cut-res", *fig_cut);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qwalk");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ep->parsed()) {
      run_escape_prob(*args_ep, out);
    } else if (sim->parsed()) {
      const BlochState state = canonicalize(parse_angle(*sim_alpha), parse_angle(*sim_beta));
      WalkConfig config{*sim_rho, *sim_m, *sim_steps};
      const SurvivalTrace trace = run(config, state);
      std::ostringstream csv;
      csv << "t,absorbed_step,absorbed_cum,survival\n";
      double cum = 0.0;
      for (int t = 0; t < trace.steps_run; ++t) {
        cum += trace.absorbed_per_step(t);
        csv << (t + 1) << ',' << format12(trace.absorbed_per_step(t)) << ',' << format12(cum)
            << ',' << format12(1.0 - cum) << '\n';
      }
      emit(out, *sim_out, csv.str());
    } else if (grid->parsed()) {
      if (grid_m->empty() == grid_placements->empty())
        throw std::domain_error("grid: give exactly one of --m or --placements");
      const std::vector<Placement> placements =
          grid_m->empty() ? parse_placements(*grid_placements)
                          : std::vector<Placement>{Placement::parse(*grid_m)};
      const std::optional<double> cap =
          *grid_cap > 0.0 ? std::optional<double>(*grid_cap) : std::nullopt;
      const Grid g = grid_scan(placements, quantity_from_name(*grid_quantity), *grid_na,
                               *grid_nb, cap, *grid_offset);
      if (*grid_format == "csv") {
        std::ostringstream csv;
        write_grid_csv(csv, g);
        emit(out, *grid_out, csv.str());
      } else if (*grid_format == "json") {
        emit(out, *grid_out, grid_to_json(g).dump(2) + "\n");
      } else {
        throw std::domain_error("grid: unknown format '" + *grid_format + "'");
      }
    } else if (fish->parsed()) {
      if (fish_m->empty() == fish_placements->empty())
        throw std::domain_error("fisher: give exactly one of --m or --placements");
      const BlochState state = canonicalize(parse_angle(*fish_alpha), parse_angle(*fish_beta));
      const std::vector<Placement> placements =
          fish_m->empty() ? parse_placements(*fish_placements)
                          : std::vector<Placement>{Placement::parse(*fish_m)};
      json j;
      j["alpha"] = jnum(state.alpha);
      j["beta"] = jnum(state.beta);
      const Qfi h = qfi(state);
      j["qfi"] = {{"h_alpha", jnum(h.h_alpha)}, {"h_beta", jnum(h.h_beta)}};
      json per = json::array();
      for (const Placement& m : placements) {
        const Efficiency eta = efficiency(state, m);
        per.push_back({{"m", m.str()},
                       {"f_alpha", scalar_json(fisher_alpha(state, m))},
                       {"f_beta", scalar_json(fisher_beta(state, m))},
                       {"eta_alpha", scalar_json(eta.eta_alpha)},
                       {"eta_beta", scalar_json(eta.eta_beta)}});
      }
      j["per_placement"] = per;
      const FisherMatrix total = fisher_total(state, placements);
      j["total"] = {{"matrix", total.tag == ValueTag::kRegular ? matrix_json(total.info)
                                                               : json(nullptr)},
                    {"det", total.tag == ValueTag::kRegular
                                ? json(jnum(total.info.determinant()))
                                : json(nullptr)},
                    {"tag", tag_name(total.tag)},
                    {"skipped", placements_json(total.skipped)}};
      out << j.dump(2) << '\n';
    } else if (hs->parsed()) {
      const Placement m = Placement::parse(*hs_m);
      const std::vector<HotSpot> spots = hot_spots(m, *hs_res);
      json j;
      j["m"] = m.str();
      j["resolution"] = *hs_res;
      json arr = json::array();
      for (const HotSpot& s : spots)
        arr.push_back({{"alpha", jnum(s.alpha)},
                       {"beta", jnum(s.beta)},
                       {"f_beta", jnum(s.f_beta)},
                       {"p_e", jnum(s.p_e)}});
      j["hot_spots"] = arr;
      out << j.dump(2) << '\n';
    } else if (est->parsed()) {
      const BlochState truth = canonicalize(parse_angle(*est_alpha), parse_angle(*est_beta));
      ExperimentDesign design;
      design.placements = parse_placements(*est_placements);
      design.trials_per_placement = *est_trials;
      design.seed = *est_seed;
      MleOptions options;
      options.grid_resolution = *est_grid_res;
      options.refine_tol = *est_tol;
      EstimationReport report;
      if (*est_reps >= 2) {
        report = monte_carlo(truth, design, *est_reps, options);
      } else {
        const CountRecord counts = sample_counts(truth, design, 0);
        report = mle(counts, options);
      }
      out << report_json(report, design, *est_reps, truth).dump(2) << '\n';
    } else if (ct->parsed()) {
      const TomographyComparison cmp = tomography_comparison(*ct_steps, *ct_placements);
      json j;
      j["modes"] = cmp.modes;
      j["settings_tomo"] = cmp.settings_tomo;
      j["settings_abs"] = cmp.settings_abs;
      j["ratio"] = jnum(cmp.ratio);
      out << j.dump(2) << '\n';
    } else if (fig->parsed()) {
      const json manifest = figures::reproduce_figures(*fig_out, *fig_surface, *fig_cut);
      json j;
      j["out_dir"] = *fig_out;
      j["manifest"] = *fig_out + "/manifest.json";
      j["grids"] = manifest.at("figure_grids").size();
      j["cuts"] = manifest.at("figure_cuts").size();
      out << j.dump(2) << '\n';
    }
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const QuadratureError& e) {
    err << "error: " << e.what() << " (estimate " << format12(e.estimate)
        << ", achieved tolerance " << format12(e.achieved_tol) << ")\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qwalk::cli
