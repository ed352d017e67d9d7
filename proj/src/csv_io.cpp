#include "gripdist/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gripdist/raster.hpp"

namespace grip {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string &s, const char *what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
      throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument(std::string("csv: bad ") + what + " value: " + s);
  }
}

std::vector<std::string> read_lines(const std::filesystem::path &path) {
  const std::string bytes = read_file_bytes(path);
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : bytes) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty())
    lines.push_back(cur);
  return lines;
}

void expect_header(const std::vector<std::string> &lines, const char *header,
                   const std::filesystem::path &path) {
  if (lines.empty() || lines.front() != header)
    throw std::invalid_argument("csv: expected header '" + std::string(header) +
                                "' in " + path.string());
}

} // namespace

void write_density_csv(const std::filesystem::path &path,
                       const std::vector<PiecewiseLinearDensity> &densities) {
  std::vector<const PiecewiseLinearDensity *> sorted;
  for (const auto &d : densities)
    sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto *a, const auto *b) { return a->class_name() < b->class_name(); });
  std::ostringstream out;
  out << "class,knot_x,density\n";
  for (const auto *d : sorted)
    for (size_t i = 0; i < d->knots().size(); ++i)
      out << d->class_name() << ',' << fmt17(d->knots()[i]) << ','
          << fmt17(d->densities()[i]) << '\n';
  write_file_atomic(path, out.str());
}

std::vector<PiecewiseLinearDensity>
load_density_csv(const std::filesystem::path &path) {
  const auto lines = read_lines(path);
  expect_header(lines, "class,knot_x,density", path);
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 3)
      throw std::invalid_argument("csv: expected 3 fields per density row in " +
                                  path.string());
    if (!rows.count(f[0]))
      order.push_back(f[0]);
    auto &[knots, dens] = rows[f[0]];
    knots.push_back(parse_double(f[1], "knot_x"));
    dens.push_back(parse_double(f[2], "density"));
  }
  if (rows.empty())
    throw std::invalid_argument("csv: no density rows in " + path.string());
  std::vector<PiecewiseLinearDensity> out;
  for (const auto &name : order) {
    auto &[knots, dens] = rows[name];
    out.push_back(PiecewiseLinearDensity::build(name, std::move(knots),
                                                std::move(dens), false));
  }
  return out;
}

void write_histogram_csv(const std::filesystem::path &path,
                         const std::vector<GripHistogram> &hists) {
  std::ostringstream out;
  out << "class,bin_left,bin_right,count\n";
  for (const auto &h : hists)
    for (size_t k = 0; k < h.counts.size(); ++k)
      out << h.class_name << ',' << fmt17(h.edges[k]) << ','
          << fmt17(h.edges[k + 1]) << ',' << fmt17(h.counts[k]) << '\n';
  write_file_atomic(path, out.str());
}

std::vector<GripHistogram>
load_histogram_csv(const std::filesystem::path &path) {
  const auto lines = read_lines(path);
  expect_header(lines, "class,bin_left,bin_right,count", path);
  std::vector<std::string> order;
  std::map<std::string, GripHistogram> hists;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 4)
      throw std::invalid_argument("csv: expected 4 fields per histogram row in " +
                                  path.string());
    const double left = parse_double(f[1], "bin_left");
    const double right = parse_double(f[2], "bin_right");
    const double count = parse_double(f[3], "count");
    auto it = hists.find(f[0]);
    if (it == hists.end()) {
      order.push_back(f[0]);
      GripHistogram h;
      h.class_name = f[0];
      h.edges = {left, right};
      h.counts = {count};
      hists.emplace(f[0], std::move(h));
    } else {
      GripHistogram &h = it->second;
      if (std::fabs(left - h.edges.back()) > 1e-12)
        throw std::invalid_argument("csv: non-contiguous histogram bins in " +
                                    path.string());
      h.edges.push_back(right);
      h.counts.push_back(count);
    }
  }
  if (hists.empty())
    throw std::invalid_argument("csv: no histogram rows in " + path.string());
  std::vector<GripHistogram> out;
  for (const auto &name : order) {
    hists[name].validate();
    out.push_back(std::move(hists[name]));
  }
  return out;
}

void write_ground_truth_csv(const std::filesystem::path &path,
                            const GroundTruthSample &sample) {
  std::ostringstream out;
  out << "row,col,grip,state\n";
  for (const auto &p : sample.pixels)
    out << p.row << ',' << p.col << ',' << fmt17(p.grip) << ','
        << to_string(p.state) << '\n';
  write_file_atomic(path, out.str());
}

GroundTruthSample load_ground_truth_csv(const std::filesystem::path &path,
                                        uint32_t image_height,
                                        uint32_t horizon_row,
                                        std::string sample_id) {
  const auto lines = read_lines(path);
  expect_header(lines, "row,col,grip,state", path);
  GroundTruthSample s;
  s.id = std::move(sample_id);
  s.image_height = image_height;
  s.horizon_row = horizon_row;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 4)
      throw std::invalid_argument("csv: expected 4 fields per ground-truth row in " +
                                  path.string());
    GroundTruthPixel p;
    p.row = uint32_t(parse_double(f[0], "row"));
    p.col = uint32_t(parse_double(f[1], "col"));
    p.grip = parse_double(f[2], "grip");
    if (!(p.grip >= 0.0) || !(p.grip <= 1.0))
      throw std::invalid_argument("csv: grip value outside [0,1] in " +
                                  path.string());
    p.state = surface_state_from_string(f[3]);
    s.pixels.push_back(p);
  }
  if (s.pixels.empty())
    throw std::invalid_argument("csv: no ground-truth rows in " + path.string());
  return s;
}

} // namespace grip
