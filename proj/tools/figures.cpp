#include "figures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qwalk/fisher.hpp"
#include "qwalk/grid_io.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk::figures {

namespace {

constexpr double kPi = std::numbers::pi;
using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("reproduce_figures: cannot write " + path.string());
  return out;
}

json grid_file(const std::filesystem::path& dir, const std::string& name, int figure,
               Placement m, const std::vector<Grid>& grids) {
  std::ofstream out = open_out(dir / name);
  write_grids_csv_long(out, grids);
  json entry;
  entry["file"] = name;
  entry["figure"] = figure;
  entry["m"] = m.str();
  json quantities = json::array();
  json caps = json::object();
  bool any_cap = false;
  for (const Grid& g : grids) {
    quantities.push_back(g.quantity);
    if (std::isfinite(g.cap_value)) {
      caps[g.quantity] = g.cap_value;
      any_cap = true;
    }
  }
  entry["quantities"] = quantities;
  entry["res"] = {grids[0].alpha_axis.size(), grids[0].beta_axis.size()};
  entry["half_cell_offset"] = grids[0].half_cell_offset;
  if (any_cap)
    entry["cap"] = {{"percentile", grids[0].cap_percentile}, {"values", caps}};
  else
    entry["cap"] = nullptr;
  return entry;
}

json cut_file(const std::filesystem::path& dir, const std::string& name, Placement m,
              bool alpha_fixed, const std::string& label, double fixed, int res) {
  std::ofstream out = open_out(dir / name);
  out << "alpha,beta,value,tag\n";
  for (int i = 0; i < res; ++i) {
    const double sweep = alpha_fixed ? 2.0 * kPi * i / (res - 1) : kPi * i / (res - 1);
    const double alpha = alpha_fixed ? fixed : sweep;
    const double beta = alpha_fixed ? sweep : fixed;
    out << format12(round12(alpha)) << ',' << format12(round12(beta)) << ','
        << format12(round12(escape_prob_closed(alpha, beta, m))) << ",regular\n";
  }
  json entry;
  entry["file"] = name;
  entry["figure"] = 2;
  entry["m"] = m.str();
  entry["fixed_axis"] = alpha_fixed ? "alpha" : "beta";
  entry["fixed_label"] = label;
  entry["fixed_value"] = round12(fixed);
  entry["res"] = res;
  return entry;
}

}  // namespace

json reproduce_figures(const std::string& out_dir, int surface_res, int cut_res) {
  if (surface_res < 2 || cut_res < 2)
    throw std::domain_error("reproduce_figures: resolutions must be >= 2");
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  const Placement m1 = Placement::finite(1);
  const Placement m2 = Placement::finite(2);
  const Placement minf = Placement::infinite();
  const auto one = [](Placement m) { return std::vector<Placement>{m}; };

  json grids = json::array();
  for (auto [m, name] : {std::pair{m1, "fig2_pe_m1.csv"}, {m2, "fig2_pe_m2.csv"},
                         {minf, "fig2_pe_minf.csv"}})
    grids.push_back(grid_file(
        dir, name, 2, m,
        {grid_scan(one(m), GridQuantity::kEscapeProb, surface_res, surface_res)}));

  for (auto [m, name] : {std::pair{m1, "fig3_fisher_m1.csv"}, {minf, "fig3_fisher_minf.csv"}})
    grids.push_back(grid_file(
        dir, name, 3, m,
        {grid_scan(one(m), GridQuantity::kFisherAlpha, surface_res, surface_res, std::nullopt,
                   true),
         grid_scan(one(m), GridQuantity::kFisherBeta, surface_res, surface_res, std::nullopt,
                   true)}));

  for (auto [m, name] : {std::pair{m1, "fig4_eta_m1.csv"}, {m2, "fig4_eta_m2.csv"},
                         {minf, "fig4_eta_minf.csv"}})
    grids.push_back(grid_file(
        dir, name, 4, m,
        {grid_scan(one(m), GridQuantity::kEtaAlpha, surface_res, surface_res, 99.0, true),
         grid_scan(one(m), GridQuantity::kEtaBeta, surface_res, surface_res, 99.0, true)}));

  json cuts = json::array();
  const struct {
    const char* label;
    double value;
  } fixed[3] = {{"0", 0.0}, {"pi2", kPi / 2.0}, {"pi", kPi}};
  for (Placement m : {m1, m2, minf}) {
    const std::string tag = m.is_infinite() ? "minf" : "m" + m.str();
    for (const auto& fx : fixed) {
      cuts.push_back(cut_file(dir, "fig2_cut_" + tag + "_alpha_" + fx.label + ".csv", m,
                              /*alpha_fixed=*/true, fx.label, fx.value, cut_res));
      cuts.push_back(cut_file(dir, "fig2_cut_" + tag + "_beta_" + fx.label + ".csv", m,
                              /*alpha_fixed=*/false, fx.label, fx.value, cut_res));
    }
  }

  json manifest;
  manifest["figure_grids"] = grids;
  manifest["figure_cuts"] = cuts;
  manifest["parameters"] = {{"surface_res", surface_res}, {"cut_res", cut_res}};
  std::ofstream mf = open_out(dir / "manifest.json");
  mf << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace qwalk::figures
