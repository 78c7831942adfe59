#pragma once

#include "json.hpp"
#include "tfub/feasibility.hpp"
#include "tfub/rank.hpp"

#include <sstream>
#include <string>

namespace tfub::io {

using nlohmann::json;

inline json complex_array(const ComplexVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

inline ComplexVector complex_vector(const json& a) {
  ComplexVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& e = a.at(i);
    if (e.is_number()) v(static_cast<Eigen::Index>(i)) = Complex(e.get<double>(), 0.0);
    else v(static_cast<Eigen::Index>(i)) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
  }
  return v;
}

inline json signal_to_json(const SignalVector& f) {
  return {{"group", f.group().spec()}, {"values", complex_array(f.values())}};
}

inline SignalVector signal_from_json(const json& j) {
  return SignalVector(FiniteAbelianGroup::parse(j.at("group").get<std::string>()), complex_vector(j.at("values")));
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json histogram_to_json(const RankHistogram& h) {
  json j;
  j["matrix"] = to_string(h.matrix_kind);
  j["group"] = h.group;
  if (h.seed) j["seed"] = *h.seed;
  j["tol"] = h.tol;
  json counts = json::object();
  for (const auto& [size, by_rank] : h.counts) {
    json row = json::object();
    for (const auto& [rank, c] : by_rank) row[std::to_string(rank)] = c;
    counts[std::to_string(size)] = row;
  }
  j["counts"] = counts;
  j["uncertain"] = h.uncertain;
  j["min_gap_ratio"] = number_or_string(h.min_gap_ratio);
  j["min_margin"] = number_or_string(h.min_margin);
  j["truncated"] = h.truncated;
  return j;
}

inline RankHistogram histogram_from_json(const json& j) {
  RankHistogram h;
  auto kind = j.at("matrix").get<std::string>();
  h.matrix_kind = kind == "dft" ? MatrixKind::Dft : kind == "gabor" ? MatrixKind::Gabor : MatrixKind::Other;
  h.group = j.at("group").get<std::string>();
  if (j.contains("seed")) h.seed = j.at("seed").get<std::uint64_t>();
  h.tol = j.value("tol", kDefaultRankTol);
  for (const auto& [size, row] : j.at("counts").items())
    for (const auto& [rank, c] : row.items()) h.counts[std::stoi(size)][std::stoi(rank)] = c.get<std::uint64_t>();
  h.uncertain = j.value("uncertain", std::uint64_t{0});
  h.truncated = j.value("truncated", false);
  return h;
}

inline std::string histogram_to_csv(const RankHistogram& h) {
  std::ostringstream os;
  os << "size,rank,count\n";
  for (const auto& [size, by_rank] : h.counts)
    for (const auto& [rank, c] : by_rank) os << size << ',' << rank << ',' << c << '\n';
  return os.str();
}

inline json map_to_json(const FeasibilityMap& m) {
  json j;
  j["transform"] = m.transform;
  j["group"] = m.group;
  json axes = json::array();
  for (std::size_t i = 0; i < m.axes.size(); ++i)
    axes.push_back({{"name", m.axes[i]}, {"min", m.ranges[i].first}, {"max", m.ranges[i].second}});
  j["axes"] = axes;
  if (m.seed) j["seed"] = *m.seed;
  if (m.window) j["window"] = complex_array(*m.window);
  json cells = json::array();
  for (const auto& [key, c] : m.cells) {
    json cj;
    for (std::size_t i = 0; i < m.axes.size() && i < key.size(); ++i) cj[m.axes[i]] = key[i];
    cj["status"] = to_string(c.status);
    cj["checked"] = c.checked;
    if (!c.note.empty()) cj["note"] = c.note;
    if (!c.witness.empty()) {
      json w = json::array();
      for (const auto& v : c.witness) w.push_back(complex_array(v));
      cj["witness"] = w;
    }
    cells.push_back(cj);
  }
  j["cells"] = cells;
  return j;
}

inline FeasibilityMap map_from_json(const json& j) {
  FeasibilityMap m;
  m.transform = j.at("transform").get<std::string>();
  m.group = j.at("group").get<std::string>();
  for (const auto& a : j.at("axes")) {
    m.axes.push_back(a.at("name").get<std::string>());
    m.ranges.emplace_back(a.at("min").get<int>(), a.at("max").get<int>());
  }
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("window")) m.window = complex_vector(j.at("window"));
  for (const auto& cj : j.at("cells")) {
    Cell c;
    for (const auto& name : m.axes) c.key.push_back(cj.at(name).get<int>());
    c.status = cell_status_from_string(cj.at("status").get<std::string>());
    c.checked = cj.value("checked", std::uint64_t{0});
    c.note = cj.value("note", std::string{});
    if (cj.contains("witness"))
      for (const auto& w : cj.at("witness")) c.witness.push_back(complex_vector(w));
    m.cells[c.key] = c;
  }
  return m;
}

/// Status grid with codes F/I/X/U. Two-axis maps: one row per k, one column per l.
/// Three-axis maps: one row per (kf, kg).
inline std::string map_to_csv(const FeasibilityMap& m) {
  std::ostringstream os;
  const auto& last = m.ranges.back();
  bool triple = m.axes.size() == 3;
  os << (triple ? "kf,kg" : csv_field(m.axes[0]));
  for (int l = last.first; l <= last.second; ++l) os << ',' << m.axes.back() << '=' << l;
  os << '\n';
  auto emit_row = [&](std::vector<int> prefix) {
    for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? "," : "") << prefix[i];
    for (int l = last.first; l <= last.second; ++l) {
      auto key = prefix;
      key.push_back(l);
      auto it = m.cells.find(key);
      os << ',' << (it == m.cells.end() ? 'U' : status_code(it->second.status));
    }
    os << '\n';
  };
  if (triple) {
    for (int a = m.ranges[0].first; a <= m.ranges[0].second; ++a)
      for (int b = m.ranges[1].first; b <= m.ranges[1].second; ++b) emit_row({a, b});
  } else {
    for (int a = m.ranges[0].first; a <= m.ranges[0].second; ++a) emit_row({a});
  }
  return os.str();
}

}  // namespace tfub::io
