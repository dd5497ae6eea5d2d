#include "qwalk/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace qwalk {

std::string format12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_value(const std::string& s) {
  if (s.empty() || s == "nan") return kNaN;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

std::string value_field(double v) { return std::isnan(v) ? "" : format12(v); }

// Rebuilds axes/matrices from row-major (alpha outer, beta inner) records.
struct GridAssembler {
  std::vector<double> alpha_axis, beta_axis;
  std::vector<double> display, raw;
  std::vector<ValueTag> tags;

  void add(double a, double b, double value, double raw_value, ValueTag tag) {
    if (alpha_axis.empty() || a != alpha_axis.back()) {
      if (!alpha_axis.empty() && !beta_axis.empty() && display.size() % beta_axis.size() != 0)
        throw std::invalid_argument("csv: ragged grid rows");
      alpha_axis.push_back(a);
    }
    if (alpha_axis.size() == 1) {
      beta_axis.push_back(b);
    } else if (beta_axis[display.size() % beta_axis.size()] != b) {
      throw std::invalid_argument("csv: inconsistent beta axis");
    }
    display.push_back(value);
    raw.push_back(raw_value);
    tags.push_back(tag);
  }

  Grid finish(const std::string& quantity) const {
    Grid grid;
    grid.quantity = quantity;
    const Eigen::Index na = static_cast<Eigen::Index>(alpha_axis.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(beta_axis.size());
    if (na == 0 || nb == 0 || static_cast<Eigen::Index>(display.size()) != na * nb)
      throw std::invalid_argument("csv: incomplete grid");
    grid.alpha_axis = Eigen::Map<const Eigen::VectorXd>(alpha_axis.data(), na);
    grid.beta_axis = Eigen::Map<const Eigen::VectorXd>(beta_axis.data(), nb);
    grid.display.resize(na, nb);
    grid.raw.resize(na, nb);
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < nb; ++j) {
        grid.display(i, j) = display[static_cast<std::size_t>(i) * nb + j];
        grid.raw(i, j) = raw[static_cast<std::size_t>(i) * nb + j];
      }
    grid.tags = tags;
    return grid;
  }
};

}  // namespace

void write_grid_csv(std::ostream& out, const Grid& grid) {
  out << "alpha,beta,value,tag\n";
  for (Eigen::Index i = 0; i < grid.alpha_axis.size(); ++i)
    for (Eigen::Index j = 0; j < grid.beta_axis.size(); ++j)
      out << format12(grid.alpha_axis(i)) << ',' << format12(grid.beta_axis(j)) << ','
          << value_field(grid.display(i, j)) << ',' << tag_name(grid.tag(i, j)) << '\n';
}

Grid read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"alpha", "beta", "value", "tag"})
    throw std::invalid_argument("csv: expected header alpha,beta,value,tag");
  GridAssembler assembler;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4) throw std::invalid_argument("csv: expected 4 fields");
    const double v = parse_value(f[2]);
    assembler.add(parse_value(f[0]), parse_value(f[1]), v, v, tag_from_name(f[3]));
  }
  return assembler.finish("");
}

void write_grids_csv_long(std::ostream& out, const std::vector<Grid>& grids) {
  if (grids.empty()) throw std::invalid_argument("csv: no grids to write");
  bool any_cap = false;
  for (const Grid& g : grids) any_cap = any_cap || std::isfinite(g.cap_value);
  out << (any_cap ? "quantity,alpha,beta,value,raw_value,tag\n"
                  : "quantity,alpha,beta,value,tag\n");
  for (const Grid& grid : grids)
    for (Eigen::Index i = 0; i < grid.alpha_axis.size(); ++i)
      for (Eigen::Index j = 0; j < grid.beta_axis.size(); ++j) {
        out << grid.quantity << ',' << format12(grid.alpha_axis(i)) << ','
            << format12(grid.beta_axis(j)) << ',' << value_field(grid.display(i, j));
        if (any_cap) out << ',' << value_field(grid.raw(i, j));
        out << ',' << tag_name(grid.tag(i, j)) << '\n';
      }
}

std::vector<Grid> read_grids_csv_long(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty stream");
  const std::vector<std::string> header = split_csv_line(line);
  bool has_raw = false;
  if (header == std::vector<std::string>{"quantity", "alpha", "beta", "value", "raw_value",
                                         "tag"})
    has_raw = true;
  else if (header != std::vector<std::string>{"quantity", "alpha", "beta", "value", "tag"})
    throw std::invalid_argument("csv: unexpected long-format header");

  std::vector<std::string> order;
  std::vector<GridAssembler> assemblers;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != (has_raw ? 6u : 5u)) throw std::invalid_argument("csv: bad field count");
    std::size_t slot = 0;
    while (slot < order.size() && order[slot] != f[0]) ++slot;
    if (slot == order.size()) {
      order.push_back(f[0]);
      assemblers.emplace_back();
    }
    const double v = parse_value(f[3]);
    const double rv = has_raw ? parse_value(f[4]) : v;
    assemblers[slot].add(parse_value(f[1]), parse_value(f[2]), v, rv,
                         tag_from_name(f[has_raw ? 5 : 4]));
  }
  std::vector<Grid> grids;
  grids.reserve(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) grids.push_back(assemblers[s].finish(order[s]));
  return grids;
}

nlohmann::json grid_to_json(const Grid& grid) {
  nlohmann::json j;
  j["quantity"] = grid.quantity;
  nlohmann::json placements = nlohmann::json::array();
  for (const Placement& m : grid.placements) placements.push_back(m.str());
  j["placements"] = placements;
  j["half_cell_offset"] = grid.half_cell_offset;
  j["alpha_axis"] = std::vector<double>(grid.alpha_axis.data(),
                                        grid.alpha_axis.data() + grid.alpha_axis.size());
  j["beta_axis"] =
      std::vector<double>(grid.beta_axis.data(), grid.beta_axis.data() + grid.beta_axis.size());

  const auto matrix_to_json = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j2 = 0; j2 < m.cols(); ++j2) {
        if (std::isnan(m(i, j2)))
          row.push_back(nullptr);
        else
          row.push_back(m(i, j2));
      }
      rows.push_back(row);
    }
    return rows;
  };
  j["values"] = matrix_to_json(grid.raw);
  if (std::isfinite(grid.cap_value)) {
    j["cap"] = {{"percentile", grid.cap_percentile}, {"value", grid.cap_value}};
    j["display"] = matrix_to_json(grid.display);
  } else {
    j["cap"] = nullptr;
  }

  bool any_tag = false;
  for (ValueTag t : grid.tags) any_tag = any_tag || t != ValueTag::kRegular;
  if (any_tag) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < grid.alpha_axis.size(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j2 = 0; j2 < grid.beta_axis.size(); ++j2)
        row.push_back(tag_name(grid.tag(i, j2)));
      rows.push_back(row);
    }
    j["tags"] = rows;
  }
  return j;
}

Grid grid_from_json(const nlohmann::json& j) {
  Grid grid;
  grid.quantity = j.at("quantity").get<std::string>();
  for (const auto& p : j.at("placements"))
    grid.placements.push_back(Placement::parse(p.get<std::string>()));
  grid.half_cell_offset = j.at("half_cell_offset").get<bool>();
  const std::vector<double> aa = j.at("alpha_axis").get<std::vector<double>>();
  const std::vector<double> bb = j.at("beta_axis").get<std::vector<double>>();
  grid.alpha_axis = Eigen::Map<const Eigen::VectorXd>(aa.data(), aa.size());
  grid.beta_axis = Eigen::Map<const Eigen::VectorXd>(bb.data(), bb.size());

  const auto matrix_from_json = [&](const nlohmann::json& rows) {
    Eigen::MatrixXd m(grid.alpha_axis.size(), grid.beta_axis.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j2 = 0; j2 < m.cols(); ++j2) {
        const auto& cell = rows.at(i).at(j2);
        m(i, j2) = cell.is_null() ? kNaN : cell.get<double>();
      }
    return m;
  };
  grid.raw = matrix_from_json(j.at("values"));
  if (!j.at("cap").is_null()) {
    grid.cap_percentile = j.at("cap").at("percentile").get<double>();
    grid.cap_value = j.at("cap").at("value").get<double>();
    grid.display = matrix_from_json(j.at("display"));
  } else {
    grid.display = grid.raw;
  }
  grid.tags.assign(static_cast<std::size_t>(grid.alpha_axis.size()) * grid.beta_axis.size(),
                   ValueTag::kRegular);
  if (j.contains("tags"))
    for (Eigen::Index i = 0; i < grid.alpha_axis.size(); ++i)
      for (Eigen::Index j2 = 0; j2 < grid.beta_axis.size(); ++j2)
        grid.tags[static_cast<std::size_t>(i) * grid.beta_axis.size() + j2] =
            tag_from_name(j.at("tags").at(i).at(j2).get<std::string>());
  return grid;
}

}  // namespace qwalk
