// tfub command line front end. Each subcommand writes one artifact (JSON by default, CSV on request)
// that echoes its configuration, the tool version and the wall time.
#include "CLI11.hpp"
#include "tfub/io.hpp"
#include "tfub/tfub.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

using namespace tfub;
using nlohmann::json;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kContradiction = 2;
constexpr int kUncertain = 3;
constexpr int kUsage = 64;

struct RunConfig {
  std::string command;
  std::string group = "Z6";
  std::uint64_t seed = 1;
  double tol = kDefaultRankTol;
  int threads = 0;
  std::string format = "json";
  std::string out;
  std::uint64_t budget_minors = 0;  // 0 = no cap
  int trials = 0;                   // 0 = scenario default
  json extra = json::object();      // subcommand options

  json to_json() const {
    json j = extra;
    j["command"] = command;
    j["group"] = group;
    j["seed"] = seed;
    j["tol"] = tol;
    j["threads"] = threads;
    j["format"] = format;
    j["out"] = out;
    j["budget_minors"] = budget_minors;
    j["trials"] = trials;
    return j;
  }
  EnumerationOptions enumeration() const {
    EnumerationOptions e;
    e.tol = tol;
    e.threads = threads;
    if (budget_minors) e.budget = budget_minors;
    return e;
  }
  SearchOptions search() const {
    SearchOptions s;
    s.tol = tol;
    s.threads = threads;
    s.seed = seed;
    if (budget_minors) s.budget = budget_minors;
    return s;
  }
};

struct Artifact {
  json result = json::object();
  std::string csv;  // empty: CSV not supported for this command
  bool contradiction = false;
  std::uint64_t uncertain = 0;
};

using Clock = std::chrono::steady_clock;

int emit(const RunConfig& cfg, const Artifact& a, Clock::time_point start) {
  double wall = std::chrono::duration<double>(Clock::now() - start).count();
  json meta;
  meta["tool"] = "tfub";
  meta["version"] = kVersion;
  meta["config"] = cfg.to_json();
  meta["wall_time_s"] = wall;
  std::string text;
  if (cfg.format == "csv") {
    if (a.csv.empty()) {
      std::cerr << "tfub: " << cfg.command << " has no CSV projection, use --format json\n";
      return kUsage;
    }
    // '#' header lines carry the metadata; the table itself is plain RFC 4180
    json m = meta;
    m.erase("wall_time_s");
    text = "# " + m.dump() + "\n# wall_time_s=" + std::to_string(wall) + "\n" + a.csv;
  } else {
    json j = meta;
    j["result"] = a.result;
    text = j.dump(2) + "\n";
  }
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) {
      std::cerr << "tfub: cannot write " << cfg.out << "\n";
      return kUsage;
    }
    os << text;
  }
  if (a.contradiction) return kContradiction;
  if (a.uncertain) {
    std::cerr << "tfub: " << a.uncertain << " rank decision(s) inside the uncertainty band\n";
    return kUncertain;
  }
  return kOk;
}

SignalVector make_window(const FiniteAbelianGroup& G, const std::string& kind, std::uint64_t seed) {
  if (kind == "random") return random_window(G, seed);
  if (kind == "unimodular") return unimodular_window(G, seed);
  if (kind == "delta") return delta_window(G);
  if (kind == "constant") return SignalVector(G, ComplexVector::Ones(G.order()));
  throw std::invalid_argument("unknown window kind: " + kind);
}

json int_list(const std::vector<int>& v) { return json(v); }

// ---- rank-histogram ----

Artifact cmd_rank_histogram(const RunConfig& cfg, const std::string& matrix, const std::string& window,
                            std::vector<int> sizes) {
  auto G = FiniteAbelianGroup::parse(cfg.group);
  ComplexMatrix M;
  MatrixKind kind = MatrixKind::Other;
  std::optional<std::uint64_t> seed;
  if (matrix == "dft") {
    M = dft_matrix(G);
    kind = MatrixKind::Dft;
  } else if (matrix == "fourier") {
    M = fourier_matrix(G);
    kind = MatrixKind::Dft;
  } else if (matrix == "gabor") {
    M = gabor_matrix(G, make_window(G, window, cfg.seed)).matrix;
    kind = MatrixKind::Gabor;
    seed = cfg.seed;
  } else {
    throw std::invalid_argument("unknown matrix kind: " + matrix);
  }
  int maxs = static_cast<int>(std::min(M.rows(), M.cols()));
  if (sizes.empty())
    for (int s = 1; s <= maxs; ++s) sizes.push_back(s);
  auto h = minor_rank_histogram(M, sizes, cfg.enumeration());
  h.matrix_kind = kind;
  h.group = G.spec();
  h.seed = seed;
  Artifact a;
  a.result = io::histogram_to_json(h);
  if (h.truncated) a.result["truncated_note"] = "minor budget exhausted; counts are partial";
  a.csv = io::histogram_to_csv(h);
  if (h.truncated) a.csv += "# truncated\n";
  a.uncertain = h.uncertain;
  return a;
}

// ---- feasibility ----

struct OracleCheck {
  std::vector<std::string> contradictions;
  void fail(const std::vector<int>& key, const std::string& why) {
    std::string k;
    for (int v : key) k += (k.empty() ? "" : ",") + std::to_string(v);
    contradictions.push_back("(" + k + "): " + why);
  }
};

// Built-in facts every map must agree with. Any disagreement aborts the run.
void check_fourier(const FeasibilityMap& m, const FiniteAbelianGroup& G, OracleCheck& oc) {
  int n = G.order();
  for (const auto& [key, c] : m.cells) {
    int k = key[0], l = key[1];
    if (!verify_cell(m, c)) oc.fail(key, "stored witness does not reproduce");
    if (is_feasible(c.status) && k * l < n) oc.fail(key, "feasible below the k*l >= |G| bound");
    if (c.status == CellStatus::Unknown) continue;
    if (is_prime(n) && is_feasible(c.status) != (k + l >= n + 1)) oc.fail(key, "prime-order sum rule");
    if (n % k == 0 && l == n / k && is_infeasible(c.status)) oc.fail(key, "subgroup indicator exists");
    if (n == 6 && is_feasible(c.status) != (k * l >= 6 && !(k == 3 && l == 3))) oc.fail(key, "Z6 oracle");
    if (n == 10 && G.factors().size() == 1 && ((k == 3 && l == 4) || (k == 4 && l == 3)) && is_feasible(c.status))
      oc.fail(key, "Z10 (3,4) oracle");
  }
}

void check_stft(const FeasibilityMap& m, const FiniteAbelianGroup& G, OracleCheck& oc) {
  for (const auto& [key, c] : m.cells) {
    if (!verify_cell(m, c)) oc.fail(key, "stored witness does not reproduce");
    if (is_feasible(c.status) && Rational(key[1]) < phi_lower_main(G, key[0])) oc.fail(key, "below the phi lower bound");
  }
}

void check_triple(const FeasibilityMap& m, const FiniteAbelianGroup& G, OracleCheck& oc) {
  int n = G.order();
  bool cyclic3 = n == 3;
  for (const auto& [key, c] : m.cells) {
    int kf = key[0], kg = key[1], l = key[2];
    if (!verify_cell(m, c)) oc.fail(key, "stored witness does not reproduce");
    if (is_prime(n) && is_feasible(c.status) && l < prime_stft_bound(n, kf, kg)) oc.fail(key, "below the prime bound");
    if (cyclic3 && c.status != CellStatus::Unknown) {
      std::set<int> want;
      if (kf == 1 || kg == 1) want = {3 * (kf == 1 ? kg : kf)};
      else if (kf == 2 && kg == 2) want = {8, 9};
      else if (kf == 3 && kg == 3) want = {3, 6, 7, 8, 9};
      else want = {6, 7, 8, 9};
      if (is_feasible(c.status) != (want.count(l) > 0)) oc.fail(key, "Z3 classification");
    }
  }
}

json map_summary(const FeasibilityMap& m) {
  std::map<std::string, int> counts;
  for (const auto& [key, c] : m.cells) ++counts[to_string(c.status)];
  return counts;
}

Artifact cmd_feasibility(const RunConfig& cfg, const std::string& transform, const std::string& window,
                         bool override_guard) {
  auto G = FiniteAbelianGroup::parse(cfg.group);
  Artifact a;
  OracleCheck oc;
  FeasibilityMap m;
  if (transform == "fourier") {
    MapOptions opt;
    opt.search = cfg.search();
    opt.override_guard = override_guard;
    m = fourier_pair_map(G, opt);
    check_fourier(m, G, oc);
  } else if (transform == "stft" || transform == "conjecture") {
    StftMapOptions opt;
    opt.search = cfg.search();
    opt.override_guard = override_guard;
    if (cfg.budget_minors) opt.phi_budget = cfg.budget_minors;
    auto g = make_window(G, window, cfg.seed);
    if (transform == "stft") {
      m = stft_pair_map(G, g, opt);
      m.seed = cfg.seed;
      check_stft(m, G, oc);
    } else {
      MapOptions fopt;
      fopt.search = cfg.search();
      auto rep = conjecture_check(G, g, opt, fopt);
      m = rep.stft_map;
      m.seed = cfg.seed;
      check_stft(m, G, oc);
      check_fourier(rep.fourier_map, G, oc);
      a.result["conjecture"] = {{"agreements", rep.agreements},
                                {"violations", rep.violations},
                                {"undecided", rep.undecided}};
      json v = json::array();
      for (const auto& c : rep.cells)
        if (c.verdict == ConjectureCell::Verdict::Violation) v.push_back({c.k, c.l});
      a.result["conjecture"]["violation_cells"] = v;
    }
  } else if (transform == "stft-triple") {
    TripleMapOptions opt;
    opt.seed = cfg.seed;
    opt.override_guard = override_guard;
    if (cfg.trials > 0) opt.trials = cfg.trials;
    m = stft_triple_map(G, opt);
    check_triple(m, G, oc);
  } else {
    throw std::invalid_argument("unknown transform: " + transform);
  }
  if (!oc.contradictions.empty()) {
    for (const auto& s : oc.contradictions) std::cerr << "tfub: oracle contradiction at " << s << "\n";
    a.contradiction = true;
  }
  a.result["map"] = io::map_to_json(m);
  a.result["summary"] = map_summary(m);
  a.result["oracle_contradictions"] = oc.contradictions;
  a.csv = io::map_to_csv(m);
  return a;
}

// ---- bounds ----

struct BoundRow {
  int k;
  std::string name;
  Rational value;
};

std::string bounds_csv(const std::vector<BoundRow>& rows) {
  std::string s = "k,bound_name,value_num,value_den\n";
  for (const auto& r : rows)
    s += std::to_string(r.k) + "," + io::csv_field(r.name) + "," + std::to_string(r.value.num()) + "," +
         std::to_string(r.value.den()) + "\n";
  return s;
}

json rational_json(const Rational& r) { return {{"num", r.num()}, {"den", r.den()}, {"value", r.to_double()}}; }

ThetaKind provider_kind(const std::string& s) {
  if (s == "naive") return ThetaKind::NaivePlusOne;
  if (s == "exact") return ThetaKind::Exact;
  if (s == "meshulam") return ThetaKind::Meshulam;
  if (s == "tao") return ThetaKind::TaoPrime;
  throw std::invalid_argument("unknown provider: " + s);
}

std::pair<int, int> parse_pair(const std::string& s, const std::string& prefix) {
  // "f=2,3" -> (2, 3)
  auto eq = s.find('=');
  if (eq == std::string::npos || s.substr(0, eq) != prefix) throw std::invalid_argument("expected " + prefix + "=a,b");
  auto rest = s.substr(eq + 1);
  auto comma = rest.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("expected " + prefix + "=a,b");
  return {std::stoi(rest.substr(0, comma)), std::stoi(rest.substr(comma + 1))};
}

Artifact cmd_bounds(const RunConfig& cfg, const std::string& which, int only_k, const std::string& provider,
                    const std::vector<std::string>& cell) {
  auto G = FiniteAbelianGroup::parse(cfg.group);
  int n = G.order();
  Artifact a;
  std::vector<BoundRow> rows;
  std::vector<int> ks;
  if (only_k > 0) {
    if (only_k > n) throw std::invalid_argument("--k exceeds |G|");
    ks.push_back(only_k);
  } else {
    for (int k = 1; k <= n; ++k) ks.push_back(k);
  }
  auto add_rows = [&](const std::string& name, auto&& fn) {
    for (int k : ks) rows.push_back({k, name, fn(k)});
  };

  if (which == "table2") {
    // rows and columns are the feasible Fourier support pairs of G
    auto fm = fourier_pair_map(G);
    std::vector<std::pair<int, int>> cols, rws;
    for (const auto& [key, c] : fm.cells)
      if (is_feasible(c.status)) {
        cols.emplace_back(key[0], key[1]);
        if (key[0] <= key[1]) rws.emplace_back(key[0], key[1]);
      }
    ThetaProvider theta(provider_kind(provider), G);
    if (cell.size() == 2) {
      auto f = parse_pair(cell[0], "f"), g = parse_pair(cell[1], "g");
      rws = {f};
      cols = {g};
    } else if (!cell.empty()) {
      throw std::invalid_argument("--cell takes f=a,b g=c,d");
    }
    json table = json::array();
    std::string csv = "f_k,f_khat,g_k,g_khat,bound_name,value_num,value_den\n";
    for (auto [kf, kfh] : rws)
      for (auto [kg, kgh] : cols) {
        auto b = stft_lower_general(theta, kf, kfh, kg, kgh);
        table.push_back({{"f", {kf, kfh}}, {"g", {kg, kgh}}, {"max_form", rational_json(b.max_form)},
                         {"mean_form", rational_json(b.mean_form)}, {"geometric_form", b.geometric_form}});
        csv += std::to_string(kf) + "," + std::to_string(kfh) + "," + std::to_string(kg) + "," + std::to_string(kgh) +
               ",max_form," + std::to_string(b.max_form.num()) + "," + std::to_string(b.max_form.den()) + "\n";
      }
    a.result["provider"] = to_string(theta.kind());
    a.result["provider_note"] = provider == "naive"
                                    ? "theta(k) = |G| + 1 - k, the naive provider"
                                    : "theta values from the selected provider";
    a.result["table"] = table;
    a.csv = csv;
    return a;
  }

  if (which == "donoho-stark") add_rows(which, [&](int k) { return Rational(donoho_stark(n, k)); });
  else if (which == "tao") add_rows(which, [&](int k) { return Rational(tao_bound(n, k)); });
  else if (which == "meshulam") add_rows(which, [&](int k) { return meshulam_theta_lower(G, k); });
  else if (which == "theta-exact") {
    for (int k : ks) {
      auto t = theta_exact(G, k);
      rows.push_back({k, which, Rational(t.value)});
      a.uncertain += t.certificate.uncertain;
      if (!t.witness_verified) a.contradiction = true;
    }
  } else if (which == "phi-exact") {
    auto g = random_window(G, cfg.seed);
    for (int k : ks) {
      auto p = phi_exact(G, k, g);
      rows.push_back({k, which, Rational(p.value)});
      a.uncertain += p.certificate.uncertain;
      if (!p.witness_verified) a.contradiction = true;
    }
  } else if (which == "table4-main" || which == "phi-main") {
    add_rows("phi_lower_main", [&](int k) { return phi_lower_main(G, k); });
  } else if (which == "table4") {
    add_rows("phi_lower_main", [&](int k) { return phi_lower_main(G, k); });
    if (G.factors().size() == 1 && n == 6) {
      add_rows("phi_lower_zpq_literal", [&](int k) { return phi_lower_zpq(3, 2, k); });
      add_rows("phi_lower_zpq_reference",
               [&](int k) { return Rational(phi_lower_zpq_reference_z6()[static_cast<std::size_t>(k - 1)]); });
      a.result["note"] = "phi_lower_zpq_reference is the reference row and phi_lower_zpq_literal evaluates the formula; they differ for k >= 2";
    } else {
      // pq with q < p primes
      int p = 0, q = 0;
      for (int d : divisors(n))
        if (d > 1 && d < n && is_prime(d) && is_prime(n / d) && n / d < d) p = d, q = n / d;
      if (p) add_rows("phi_lower_zpq_literal", [&](int k) { return phi_lower_zpq(p, q, k); });
    }
  } else {
    throw std::invalid_argument("unknown bound table: " + which);
  }
  json arr = json::array();
  for (const auto& r : rows) arr.push_back({{"k", r.k}, {"bound_name", r.name}, {"value", rational_json(r.value)}});
  a.result["rows"] = arr;
  a.csv = bounds_csv(rows);
  return a;
}

// ---- certify ----

Artifact cmd_certify(const RunConfig& cfg, const std::string& window) {
  auto G = FiniteAbelianGroup::parse(cfg.group);
  int n = G.order();
  if (n > 8) throw std::length_error("certify is limited to |G| <= 8");
  auto g = make_window(G, window, cfg.seed);
  ComplexMatrix A = gabor_matrix(G, g).matrix;
  Artifact a;
  auto opt = cfg.enumeration();
  // every square minor of every size
  bool all_nonzero = true, truncated = false;
  json zero_minor = nullptr;
  std::uint64_t checked = 0;
  for (int r = 1; r <= n && all_nonzero; ++r) {
    if (cfg.budget_minors && checked + detail::pair_count(n * n, n, r, r) > cfg.budget_minors) {
      truncated = true;
      break;
    }
    auto res = all_minors_nonzero(A, r, opt);
    checked += res.checked;
    a.uncertain += res.uncertain;
    if (!res.all_full_rank) {
      all_nonzero = false;
      zero_minor = {{"size", r}, {"rows", int_list(*res.rows)}, {"cols", int_list(*res.cols)}};
    }
  }
  auto robust = certify_max_robust(gabor_system(g), opt);
  json dependent = nullptr;
  if (robust.dependent_subset) dependent = int_list(*robust.dependent_subset);
  a.result["window"] = io::signal_to_json(g);
  a.result["window_kind"] = window;
  a.result["seed"] = cfg.seed;
  a.result["all_minors_nonzero"] = truncated ? json("truncated") : json(all_nonzero);
  a.result["zero_minor"] = zero_minor;
  a.result["minors_checked"] = checked;
  a.result["max_robust"] = robust.robust;
  a.result["dependent_subset"] = dependent;
  a.result["subsets_checked"] = robust.checked;
  a.result["verdict"] = truncated ? "truncated" : (all_nonzero ? "pass" : "fail");
  // all minors nonzero implies full spark; the reverse need not hold off prime order
  if (all_nonzero && !truncated && !robust.robust) a.contradiction = true;
  a.csv = "property,value\nall_minors_nonzero," + std::string(truncated ? "truncated" : all_nonzero ? "true" : "false") +
          "\nmax_robust," + (robust.robust ? "true" : "false") + "\nverdict," +
          a.result["verdict"].get<std::string>() + "\n";
  return a;
}

// ---- recover ----

std::vector<int> random_subset(int n, int k, std::mt19937_64& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

ComplexVector sparse_vector(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexVector v = ComplexVector::Zero(n);
  for (int i : random_subset(n, k, rng)) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Tally {
  int trials = 0, unique = 0, correct = 0, ambiguous = 0, nofit = 0;
  double max_error = 0.0, max_residual = 0.0;
  json to_json() const {
    return {{"trials", trials},       {"unique", unique},   {"correct", correct},
            {"ambiguous", ambiguous}, {"no_fit", nofit},    {"max_relative_error", max_error},
            {"max_residual", max_residual}, {"success_rate", trials ? double(correct) / trials : 0.0}};
  }
  void add(DecodeStatus s, double err, double residual) {
    ++trials;
    if (s == DecodeStatus::Unique) ++unique;
    if (s == DecodeStatus::Ambiguous) ++ambiguous;
    if (s == DecodeStatus::NoFit) ++nofit;
    if (s == DecodeStatus::Unique && err <= 1e-8) ++correct;
    if (s != DecodeStatus::NoFit) max_error = std::max(max_error, err);
    max_residual = std::max(max_residual, residual);
  }
};

Artifact cmd_recover(RunConfig& cfg, const std::string& scenario, int& samples, int& sparsity, bool group_given) {
  std::mt19937_64 rng(cfg.seed);
  Artifact a;
  Tally t;
  bool guaranteed = false;
  std::string preset_group;
  if (scenario == "z16-spectral") preset_group = "Z16";
  else if (scenario == "z17-spectral") preset_group = "Z17";
  else if (scenario == "stft" || scenario == "erasures" || scenario == "operator") preset_group = "Z5";
  if (!group_given && !preset_group.empty()) cfg.group = preset_group;
  auto G = FiniteAbelianGroup::parse(cfg.group);
  int n = G.order();

  if (scenario == "spectral" || scenario == "z16-spectral" || scenario == "z17-spectral") {
    // f = sum of at most `sparsity` characters, observed on `samples` random points
    if (samples <= 0) samples = scenario == "z17-spectral" ? 6 : 13;
    if (sparsity <= 0) sparsity = 3;
    int trials = cfg.trials > 0 ? cfg.trials : (scenario == "z17-spectral" ? 1000 : 100);
    if (samples > n || 2 * sparsity > n) throw std::invalid_argument("samples or sparsity exceed |G|");
    ComplexMatrix D = character_dictionary(G);
    // m samples fix every s-sparse spectrum iff theta(2s) > |G| - m
    if (n <= 16) {
      int th = theta_exact(G, 2 * sparsity).value;
      guaranteed = th > n - samples;
      a.result["theta_2s"] = th;
    } else if (is_prime(n)) {
      guaranteed = tao_bound(n, 2 * sparsity) > n - samples;
    }
    for (int i = 0; i < trials; ++i) {
      ComplexVector c = sparse_vector(n, 1 + static_cast<int>(rng() % static_cast<unsigned>(sparsity)), rng);
      auto rows = random_subset(n, samples, rng);
      ComplexVector f = D * c, s(samples);
      for (int j = 0; j < samples; ++j) s(j) = f(rows[static_cast<std::size_t>(j)]);
      auto d = l0_decode(D, rows, s, sparsity);
      t.add(d.status, (d.coefficients - c).norm() / c.norm(), d.residual);
    }
  } else if (scenario == "stft") {
    if (sparsity <= 0) sparsity = n / 2;
    if (samples <= 0) samples = 2 * sparsity;
    int trials = cfg.trials > 0 ? cfg.trials : 100;
    auto g = random_window(G, cfg.seed);
    guaranteed = samples >= 2 * sparsity && certify_max_robust(gabor_system(g)).robust;
    for (int i = 0; i < trials; ++i) {
      int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(sparsity));
      SignalVector f(G, sparse_vector(n, k, rng));
      auto L = random_subset(n * n, samples, rng);
      ComplexMatrix V = stft(f, g);
      ComplexVector s(samples);
      for (int j = 0; j < samples; ++j) s(j) = V(L[static_cast<std::size_t>(j)] / n, L[static_cast<std::size_t>(j)] % n);
      auto r = recover_from_stft_samples(g, L, s, sparsity);
      double err = r.signal ? (r.signal->values() - f.values()).norm() / f.norm() : 1.0;
      t.add(r.status, err, r.residual);
    }
  } else if (scenario == "erasures") {
    if (samples <= 0) samples = n;
    int trials = cfg.trials > 0 ? cfg.trials : 100;
    auto g = random_window(G, cfg.seed);
    auto frame = gabor_system(g);
    guaranteed = samples >= n && certify_max_robust(frame).robust;
    for (int i = 0; i < trials; ++i) {
      auto f = random_window(G, rng());
      auto r = erase_and_recover(f, frame, {random_subset(n * n, samples, rng)});
      bool ok = r.status == RecoveryStatus::Recovered;
      double err = ok ? (r.signal->values() - f.values()).norm() / f.norm() : 1.0;
      t.add(ok ? DecodeStatus::Unique : DecodeStatus::NoFit, err, 0.0);
    }
  } else if (scenario == "operator") {
    if (samples <= 0) samples = n;  // |Lambda|
    int trials = cfg.trials > 0 ? cfg.trials : 100;
    auto g = random_window(G, cfg.seed);
    guaranteed = samples <= n && certify_max_robust(gabor_system(g)).robust;
    std::normal_distribution<double> nd;
    for (int i = 0; i < trials; ++i) {
      OperatorClass H;
      for (int idx : random_subset(n * n, samples, rng)) {
        H.Lambda.push_back(TimeFrequencyIndex::from_flat(idx, n));
        H.coefficients.emplace_back(nd(rng), nd(rng));
      }
      auto id = identify_operator(g, H.Lambda, apply_operator(H, g));
      double err = 0, norm = 0;
      if (id.status == IdentifyStatus::Identified)
        for (std::size_t j = 0; j < H.coefficients.size(); ++j) {
          err += std::norm(id.coefficients[j] - H.coefficients[j]);
          norm += std::norm(H.coefficients[j]);
        }
      t.add(id.status == IdentifyStatus::Identified ? DecodeStatus::Unique : DecodeStatus::NoFit,
            id.status == IdentifyStatus::Identified ? std::sqrt(err / norm) : 1.0, id.residual);
    }
  } else {
    throw std::invalid_argument("unknown scenario: " + scenario);
  }
  a.result["scenario"] = scenario;
  a.result["group"] = G.spec();
  a.result["samples"] = samples;
  a.result["sparsity"] = sparsity;
  a.result["guaranteed"] = guaranteed;
  a.result["tally"] = t.to_json();
  // a guaranteed scenario that misses a trial contradicts the theory
  if (guaranteed && t.correct != t.trials) a.contradiction = true;
  a.csv = "scenario,group,samples,trials,correct,ambiguous,no_fit,max_relative_error\n" + scenario + "," + G.spec() +
          "," + std::to_string(samples) + "," + std::to_string(t.trials) + "," + std::to_string(t.correct) + "," +
          std::to_string(t.ambiguous) + "," + std::to_string(t.nofit) + "," + sci(t.max_error) + "\n";
  return a;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--group", cfg.group, "group as Zd1xZd2x... (Z1 is the trivial group)");
  sub->add_option("--seed", cfg.seed, "seed for windows and random trials");
  sub->add_option("--tol", cfg.tol, "relative rank tolerance");
  sub->add_option("--threads", cfg.threads, "worker threads, 0 = TFUB_THREADS or all cores");
  sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", cfg.out, "output file, default stdout");
  sub->add_option("--budget-minors", cfg.budget_minors, "cap on submatrices per enumeration, 0 = none");
  sub->add_option("--trials", cfg.trials, "random trials, 0 = default for the command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty principles on finite Abelian groups: ranks, bounds, feasibility, recovery"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig cfg;

  std::string matrix = "dft", window = "random", transform = "fourier", which = "table2", provider = "naive",
              scenario = "z16-spectral";
  std::vector<int> sizes;
  std::vector<std::string> cell;
  int only_k = 0, samples = 0, sparsity = 0;
  bool override_guard = false;

  auto* rh = app.add_subcommand("rank-histogram", "rank counts of all square submatrices");
  add_common(rh, cfg);
  rh->add_option("--matrix", matrix, "dft, fourier or gabor")->check(CLI::IsMember({"dft", "fourier", "gabor"}));
  rh->add_option("--window", window, "gabor window: random, unimodular, delta, constant");
  rh->add_option("--sizes", sizes, "minor sizes, default all");

  auto* fe = app.add_subcommand("feasibility", "support-pair feasibility map with witnesses");
  add_common(fe, cfg);
  fe->add_option("--transform", transform, "fourier, stft, stft-triple or conjecture")
      ->check(CLI::IsMember({"fourier", "stft", "stft-triple", "conjecture"}));
  fe->add_option("--window", window, "stft window: random, unimodular, delta, constant");
  fe->add_flag("--override-guard", override_guard, "allow groups above the size guard");

  auto* bo = app.add_subcommand("bounds", "closed-form and exact bound tables");
  add_common(bo, cfg);
  bo->add_option("--which", which,
                 "table2, table4, table4-main, donoho-stark, tao, meshulam, theta-exact, phi-exact");
  bo->add_option("--k", only_k, "single k");
  bo->add_option("--provider", provider, "theta provider for table2: naive, exact, meshulam, tao");
  bo->add_option("--cell", cell, "table2 cell, e.g. --cell f=2,3 g=2,3")->expected(2);

  auto* ce = app.add_subcommand("certify", "all-minors and erasure-robustness certificate for a Gabor window");
  add_common(ce, cfg);
  ce->add_option("--window", window, "random, unimodular, delta, constant");

  auto* re = app.add_subcommand("recover", "seeded sparse recovery experiments");
  add_common(re, cfg);
  re->add_option("--scenario", scenario, "z16-spectral, z17-spectral, spectral, stft, erasures, operator");
  re->add_option("--samples", samples, "samples (or |Lambda| for operator), 0 = scenario default");
  re->add_option("--sparsity", sparsity, "maximum support size, 0 = scenario default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto start = Clock::now();
  try {
    Artifact a;
    if (rh->parsed()) {
      cfg.command = "rank-histogram";
      cfg.extra = {{"matrix", matrix}, {"window", window}, {"sizes", sizes}};
      a = cmd_rank_histogram(cfg, matrix, window, sizes);
    } else if (fe->parsed()) {
      cfg.command = "feasibility";
      cfg.extra = {{"transform", transform}, {"window", window}, {"override_guard", override_guard}};
      a = cmd_feasibility(cfg, transform, window, override_guard);
    } else if (bo->parsed()) {
      cfg.command = "bounds";
      cfg.extra = {{"which", which}, {"k", only_k}, {"provider", provider}, {"cell", cell}};
      a = cmd_bounds(cfg, which, only_k, provider, cell);
    } else if (ce->parsed()) {
      cfg.command = "certify";
      cfg.extra = {{"window", window}};
      a = cmd_certify(cfg, window);
    } else {
      cfg.command = "recover";
      bool group_given = re->count("--group") > 0;
      a = cmd_recover(cfg, scenario, samples, sparsity, group_given);
      cfg.extra = {{"scenario", scenario}, {"samples", samples}, {"sparsity", sparsity}};
    }
    return emit(cfg, a, start);
  } catch (const std::length_error& e) {
    std::cerr << "tfub: guard: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "tfub: " << e.what() << "\n";
    return kUsage;
  }
}
