#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qwalk/fisher.hpp"
#include "qwalk/grid_io.hpp"
#include "qwalk/num_format.hpp"

using namespace qwalk;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

Grid sample_grid(GridQuantity q, int na, int nb, std::optional<double> cap = std::nullopt,
                 bool offset = false) {
  const std::array<Placement, 1> one = {Placement::finite(1)};
  return grid_scan(one, q, na, nb, cap, offset);
}

bool matrices_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const bool na = std::isnan(a(i, j)), nb = std::isnan(b(i, j));
      if (na != nb) return false;
      if (!na && a(i, j) != b(i, j)) return false;
    }
  return true;
}
}  // namespace

TEST_CASE("12-digit formatting round-trips through text bit-exactly") {
  for (double x : {kPi, 1.0 / 3.0, 2.0 - 4.0 / kPi, 1e-17, -0.0, 123456789.123, 5e301}) {
    const double q = round12(x);
    CHECK(round12(q) == q);                       // quantization is idempotent
    CHECK(std::strtod(format12(q).c_str(), nullptr) == q);  // text preserves the value
  }
  CHECK(format12(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format12(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format12(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format12(0.5) == "0.5");
  CHECK(format12(round12(kPi)) == "3.14159265359");
}

TEST_CASE("rectangular CSV round-trips values, axes and tags bit-exactly") {
  // eta_beta on an endpoint grid has undefined cells at the alpha poles.
  const Grid g = sample_grid(GridQuantity::kEtaBeta, 5, 6);
  std::stringstream io;
  write_grid_csv(io, g);
  const std::string text = io.str();
  CHECK(text.rfind("alpha,beta,value,tag\n", 0) == 0);
  std::stringstream in(text);
  const Grid back = read_grid_csv(in);
  REQUIRE(back.alpha_axis.size() == g.alpha_axis.size());
  REQUIRE(back.beta_axis.size() == g.beta_axis.size());
  CHECK(back.alpha_axis == g.alpha_axis);
  CHECK(back.beta_axis == g.beta_axis);
  CHECK(matrices_equal(back.raw, g.raw));
  bool saw_undefined = false;
  for (Eigen::Index i = 0; i < g.alpha_axis.size(); ++i)
    for (Eigen::Index j = 0; j < g.beta_axis.size(); ++j) {
      CHECK(back.tag(i, j) == g.tag(i, j));
      if (g.tag(i, j) == ValueTag::kUndefined) saw_undefined = true;
    }
  CHECK(saw_undefined);  // the pole rows must actually exercise the NaN path
}

TEST_CASE("stacked long CSV keeps multiple quantities and raw values under a cap") {
  const Grid a = sample_grid(GridQuantity::kEtaAlpha, 8, 8, 90.0, true);
  const Grid b = sample_grid(GridQuantity::kEtaBeta, 8, 8, 90.0, true);
  std::stringstream io;
  write_grids_csv_long(io, {a, b});
  std::string header;
  std::getline(io, header);
  CHECK(header == "quantity,alpha,beta,value,raw_value,tag");
  io.seekg(0);
  const std::vector<Grid> back = read_grids_csv_long(io);
  REQUIRE(back.size() == 2);
  CHECK(back[0].quantity == "eta_alpha");
  CHECK(back[1].quantity == "eta_beta");
  CHECK(matrices_equal(back[0].display, a.display));
  CHECK(matrices_equal(back[0].raw, a.raw));
  CHECK(matrices_equal(back[1].display, b.display));
  CHECK(matrices_equal(back[1].raw, b.raw));
  CHECK(back[0].alpha_axis == a.alpha_axis);
  CHECK(back[1].beta_axis == b.beta_axis);
}

TEST_CASE("uncapped long CSV omits the raw column") {
  const Grid g = sample_grid(GridQuantity::kEscapeProb, 4, 4);
  std::stringstream io;
  write_grids_csv_long(io, {g});
  std::string header;
  std::getline(io, header);
  CHECK(header == "quantity,alpha,beta,value,tag");
  io.seekg(0);
  const std::vector<Grid> back = read_grids_csv_long(io);
  REQUIRE(back.size() == 1);
  CHECK(matrices_equal(back[0].raw, g.raw));
}

TEST_CASE("JSON round-trip preserves the full grid record") {
  const Grid g = sample_grid(GridQuantity::kEtaBeta, 6, 6, 85.0, true);
  const nlohmann::json j = grid_to_json(g);
  CHECK(j.at("quantity") == "eta_beta");
  CHECK(j.at("half_cell_offset") == true);
  CHECK(j.at("cap").at("percentile") == 85.0);
  const Grid back = grid_from_json(j);
  CHECK(back.quantity == g.quantity);
  REQUIRE(back.placements.size() == 1);
  CHECK(back.placements[0] == g.placements[0]);
  CHECK(back.half_cell_offset == g.half_cell_offset);
  CHECK(back.cap_percentile == g.cap_percentile);
  CHECK(back.cap_value == g.cap_value);
  CHECK(back.alpha_axis == g.alpha_axis);
  CHECK(back.beta_axis == g.beta_axis);
  CHECK(matrices_equal(back.raw, g.raw));
  CHECK(matrices_equal(back.display, g.display));
  for (Eigen::Index i = 0; i < g.alpha_axis.size(); ++i)
    for (Eigen::Index j2 = 0; j2 < g.beta_axis.size(); ++j2)
      CHECK(back.tag(i, j2) == g.tag(i, j2));
}

TEST_CASE("JSON of an uncapped all-regular grid stays compact") {
  const Grid g = sample_grid(GridQuantity::kEscapeProb, 4, 5);
  const nlohmann::json j = grid_to_json(g);
  CHECK(j.at("cap").is_null());
  CHECK_FALSE(j.contains("tags"));  // all-regular grids skip the tag matrix
  const Grid back = grid_from_json(j);
  CHECK(matrices_equal(back.raw, g.raw));
  for (Eigen::Index i = 0; i < back.alpha_axis.size(); ++i)
    for (Eigen::Index j2 = 0; j2 < back.beta_axis.size(); ++j2)
      CHECK(back.tag(i, j2) == ValueTag::kRegular);
}
