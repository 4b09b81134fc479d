// sggraph: spatial Gibbs random graphs on Z^2 -- exact finite-volume tables,
// forward birth-and-death simulation, perfect sampling via the backward clan
// of ancestors, and closed-form bound evaluation.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sggraph/analysis.hpp"
#include "sggraph/exact.hpp"
#include "sggraph/experiments.hpp"
#include "sggraph/forward.hpp"
#include "sggraph/perfect.hpp"

using json = nlohmann::ordered_json;
using namespace sggraph;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kGuardRefusal = 3,
  kCapExceeded = 4,
  kValidationFailure = 5,
};

struct RunConfig {
  std::string model = "edge";
  double h0 = 0.3;
  double h1 = 0.5;
  double beta = 3.0;
  std::string window = "0:1,0:1";
  std::uint64_t samples = 1000;
  double horizon = 10000.0;
  double burn = 100.0;
  std::uint64_t seed = 1;
  std::uint64_t max_rect = 1'000'000;
  double max_depth = 1e4;
  std::uint64_t replicas = 500;
  int margin = 3;
  std::string out;
  std::string format = "json";

  std::string config_path;
  std::string config_raw;  // config file contents, echoed verbatim
  std::vector<std::string> argv_echo;
};

EnergyModel make_model(const RunConfig& c) {
  if (c.model == "edge") return EnergyModel::edge_only();
  if (c.model == "ferrari") return EnergyModel::ferrari(c.h0, c.h1);
  if (c.model == "twostar") return EnergyModel::two_star();
  throw ConfigError("unknown model '" + c.model + "' (expected edge|ferrari|twostar)");
}

long parse_int_at(const std::string& s, std::size_t& pos) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s.substr(pos), &used);
  } catch (const std::exception&) {
    throw ConfigError("window parse error at position " + std::to_string(pos) + " in '" + s +
                      "'");
  }
  pos += used;
  return v;
}

void expect_char(const std::string& s, std::size_t& pos, char want) {
  if (pos >= s.size() || s[pos] != want)
    throw ConfigError("window parse error at position " + std::to_string(pos) + " in '" + s +
                      "': expected '" + want + "'");
  ++pos;
}

// Box "x0:x1,y0:y1" or vertex list "x,y;x,y;...".
Window parse_window(const std::string& s) {
  std::size_t pos = 0;
  if (s.find(':') != std::string::npos) {
    const long x0 = parse_int_at(s, pos);
    expect_char(s, pos, ':');
    const long x1 = parse_int_at(s, pos);
    expect_char(s, pos, ',');
    const long y0 = parse_int_at(s, pos);
    expect_char(s, pos, ':');
    const long y1 = parse_int_at(s, pos);
    if (pos != s.size())
      throw ConfigError("window parse error at position " + std::to_string(pos) + " in '" + s +
                        "': trailing characters");
    if (x1 < x0 || y1 < y0)
      throw ConfigError("window parse error in '" + s + "': empty box range");
    return Window::from_box(Box(static_cast<int>(x0), static_cast<int>(x1),
                                static_cast<int>(y0), static_cast<int>(y1)));
  }
  std::vector<Vertex> vs;
  while (pos < s.size()) {
    const long x = parse_int_at(s, pos);
    expect_char(s, pos, ',');
    const long y = parse_int_at(s, pos);
    vs.push_back({static_cast<int>(x), static_cast<int>(y)});
    if (pos < s.size()) expect_char(s, pos, ';');
  }
  if (vs.empty()) throw ConfigError("window parse error: empty vertex list");
  return Window::from_vertices(vs);
}

json config_echo(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["h0"] = c.h0;
  j["h1"] = c.h1;
  j["beta"] = c.beta;
  j["window"] = c.window;
  j["samples"] = c.samples;
  j["horizon"] = c.horizon;
  j["burn"] = c.burn;
  j["seed"] = c.seed;
  j["max_rect"] = c.max_rect;
  j["max_depth"] = c.max_depth;
  j["replicas"] = c.replicas;
  j["margin"] = c.margin;
  j["out"] = c.out;
  j["format"] = c.format;
  j["argv"] = c.argv_echo;
  if (!c.config_path.empty()) {
    j["config_file"] = c.config_path;
    j["config_file_contents"] = c.config_raw;
  }
  return j;
}

// Common report head; duration is appended by finish_report. NDJSON/CSV
// headers stay byte-stable across runs, so they never carry timings.
json report_header(const RunConfig& c) {
  json j;
  j["tool"] = "sggraph";
  j["version"] = kVersion;
  j["seed"] = c.seed;
  j["config"] = config_echo(c);
  return j;
}

std::string stable_header_line(const RunConfig& c) { return report_header(c).dump(); }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file: " + path);
  os << contents;
}

void finish_report(json& j, const Timer& timer, const std::string& path) {
  j["duration_seconds"] = timer.seconds();
  write_file(path, j.dump(2) + "\n");
  std::cout << path << "\n";
}

ClanCaps caps_of(const RunConfig& c) {
  ClanCaps caps;
  caps.max_rectangles = c.max_rect;
  caps.max_time_depth = c.max_depth;
  return caps;
}

void check_subcritical(const RunConfig& c, double M) {
  if (alpha(c.beta, M) >= 1.0) {
    std::ostringstream os;
    os << "subcriticality refusal: beta = " << c.beta << " <= beta*(M=" << M
       << ") = " << beta_star(M);
    throw GuardError(os.str());
  }
}

json marginal_json(const EdgeMarginal& em) {
  json j;
  j["edge"] = {em.edge.a.x, em.edge.a.y, em.edge.b.x, em.edge.b.y};
  j["empirical"] = em.empirical;
  j["sigma"] = em.sigma;
  j["free_bound"] = em.free_bound;
  j["within_bound_3sigma"] = em.empirical <= em.free_bound + 3.0 * em.sigma;
  return j;
}

json tail_json(const TailCheck& t) {
  json j;
  j["threshold"] = t.threshold;
  j["empirical"] = t.empirical;
  j["bound"] = t.bound;
  j["sigma"] = t.sigma;
  j["ok"] = t.ok;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_exact(const RunConfig& c) {
  Timer timer;
  const auto m = make_model(c);
  const Window V = parse_window(c.window);
  const auto d = exact_distribution(m, V, c.beta);

  std::ostringstream csv;
  csv << "# sggraph " << kVersion << " exact seed=" << c.seed << "\n";
  write_distribution_csv(d, csv);
  write_file(c.out + ".csv", csv.str());
  std::cout << c.out + ".csv" << "\n";

  json j = report_header(c);
  j["log_z"] = d.log_z;
  j["z"] = std::exp(d.log_z);
  j["states"] = d.size();
  json margs = json::array();
  for (const Edge& e : d.edges) {
    json em;
    em["edge"] = {e.a.x, e.a.y, e.b.x, e.b.y};
    em["probability"] = d.edge_marginal(e);
    margs.push_back(em);
  }
  j["edge_marginals"] = margs;
  j["detailed_balance_residual"] = detailed_balance_residual(m, V, c.beta);
  finish_report(j, timer, c.out + ".json");
  return kOk;
}

int cmd_forward(const RunConfig& c) {
  Timer timer;
  const auto m = make_model(c);
  const Window V = parse_window(c.window);
  const auto est = ergodic_average(
      m, V, c.beta, [](const GraphState& x) { return static_cast<double>(x.edge_count()); },
      c.burn, c.horizon, c.seed);

  if (c.format == "csv") {
    std::vector<TraceRow> trace;
    simulate_dependent(m, V, c.beta, GraphState(V), std::min(c.horizon, 1000.0), c.seed, &trace);
    std::ostringstream os;
    os << "# sggraph " << kVersion << " forward-trace seed=" << c.seed << "\n";
    write_trace_csv(trace, os);
    write_file(c.out + ".trace.csv", os.str());
    std::cout << c.out + ".trace.csv" << "\n";
  }

  json j = report_header(c);
  j["observable"] = "edge_count";
  j["estimate"] = est.mean;
  j["std_error"] = est.std_error;
  j["batches"] = est.batches;
  j["events"] = est.events;
  finish_report(j, timer, c.out + ".json");
  return kOk;
}

int cmd_perfect(const RunConfig& c) {
  Timer timer;
  const auto m = make_model(c);
  const double M = m.constant_M();
  check_subcritical(c, M);
  const Window V = parse_window(c.window);
  const auto caps = caps_of(c);

  std::ostringstream nd;
  nd << stable_header_line(c) << "\n";

  const auto edges = V.all_edges();
  std::vector<std::size_t> present(edges.size(), 0);
  std::map<int, std::size_t> degree_hist;
  std::map<std::size_t, std::size_t> clan_hist;
  double deg_sum = 0.0;
  std::optional<std::pair<Clan, CleaningResult>> first_clan;

  for (std::uint64_t r = 0; r < c.samples; ++r) {
    Engine g = replica_engine(c.seed, r);
    auto res = perfect_sample_detailed(m, V, c.beta, g, caps);
    ++clan_hist[res.clan.rects.size()];
    nd << "{\"i\":" << r << ",\"edges\":[";
    bool first = true;
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (!res.state.has(edges[b])) continue;
      ++present[b];
      if (!first) nd << ',';
      first = false;
      nd << '[' << edges[b].a.x << ',' << edges[b].a.y << ',' << edges[b].b.x << ','
         << edges[b].b.y << ']';
    }
    nd << "]}\n";
    for (const Vertex& v : V.vertices()) {
      const int d = res.state.degree(v);
      ++degree_hist[d];
      deg_sum += d;
    }
    if (r == 0) first_clan = {std::move(res.clan), std::move(res.cleaning)};
  }
  write_file(c.out + ".ndjson", nd.str());
  std::cout << c.out + ".ndjson" << "\n";

  if (c.format == "csv" && first_clan) {
    std::ostringstream os;
    os << "# sggraph " << kVersion << " clan-trace seed=" << c.seed << " replica=0\n";
    write_clan_csv(first_clan->first, first_clan->second, os);
    write_file(c.out + ".clan.csv", os.str());
    std::cout << c.out + ".clan.csv" << "\n";
  }

  json j = report_header(c);
  j["replicas"] = c.samples;
  json margs = json::array();
  for (std::size_t b = 0; b < edges.size(); ++b) {
    EdgeMarginal em;
    em.edge = edges[b];
    em.empirical = static_cast<double>(present[b]) / static_cast<double>(c.samples);
    em.sigma = binomial_sigma(em.empirical, c.samples);
    em.free_bound = birth_rate(edges[b], c.beta, M);
    margs.push_back(marginal_json(em));
  }
  j["edge_marginals"] = margs;
  j["mean_degree"] = deg_sum / static_cast<double>(c.samples * V.size());
  j["degree_bound_half_alpha"] = expected_degree_bound(c.beta, M);
  json dh = json::object();
  for (const auto& [d, cnt] : degree_hist) dh[std::to_string(d)] = cnt;
  j["degree_histogram"] = dh;
  json ch = json::object();
  for (const auto& [s, cnt] : clan_hist) ch[std::to_string(s)] = cnt;
  j["clan_size_histogram"] = ch;

  const std::size_t tail_reps = std::min<std::uint64_t>(c.samples, 10000);
  const auto tails =
      clan_tail_experiment(c.beta, M, tail_reps, derive_seed(c.seed, 0x7a11ULL),
                           {1, 2, 3, 4, 5}, {0.5, 1, 2, 3, 5}, caps);
  json sd = json::array(), tl = json::array();
  for (const auto& t : tails.sd) sd.push_back(tail_json(t));
  for (const auto& t : tails.tl) tl.push_back(tail_json(t));
  j["sd_tail_vs_bound"] = sd;
  j["tl_tail_vs_bound"] = tl;
  j["beta_tilde"] = tails.beta_tilde;
  finish_report(j, timer, c.out + ".stats.json");
  return kOk;
}

int cmd_bounds(const RunConfig& c) {
  Timer timer;
  const auto m = make_model(c);
  const double M = m.constant_M();
  json j = report_header(c);
  j["M"] = M;
  j["alpha"] = alpha(c.beta, M);
  j["beta_star"] = beta_star(M, 1e-9);
  j["subcritical"] = alpha(c.beta, M) < 1.0;
  j["expected_degree_bound"] = expected_degree_bound(c.beta, M);
  if (alpha(c.beta, M) < 1.0) {
    const double bt = default_beta_tilde(c.beta, M);
    j["beta_tilde_default"] = bt;
    json sdv = json::array(), sde = json::array(), tlv = json::array();
    for (int k = 1; k <= 5; ++k) {
      sdv.push_back(sd_tail_bound(ClanRootKind::VertexRoot, k, c.beta, bt, M));
      sde.push_back(sd_tail_bound(ClanRootKind::EdgeRoot, k, c.beta, bt, M, 1));
      tlv.push_back(tl_tail_bound(1, 1.0, k, c.beta, M));
    }
    j["sd_tail_bounds_vertex_k1_5"] = sdv;
    j["sd_tail_bounds_edge_k1_5"] = sde;
    j["tl_tail_bounds_t1_5"] = tlv;
  }
  json rates = json::array();
  for (int L = 1; L <= 5; ++L) rates.push_back(std::exp(-c.beta * L - c.beta * M));
  j["free_edge_rates_L1_5"] = rates;
  finish_report(j, timer, c.out + ".json");
  return kOk;
}

int cmd_clt(const RunConfig& c) {
  Timer timer;
  const auto m = make_model(c);
  check_subcritical(c, m.constant_M());
  if (c.replicas < 100)
    throw GuardError("clt refusal: replicas = " + std::to_string(c.replicas) +
                     " < 100; no p-value is reported below 100 replicas");
  const Window V = parse_window(c.window);
  if (!V.box()) throw ConfigError("clt requires a box window");
  const int inner = V.box()->x1 - V.box()->x0 + 1;
  if (inner != V.box()->y1 - V.box()->y0 + 1) throw ConfigError("clt requires a square box");

  const auto rep = clt_experiment(
      m, c.beta,
      [](const GraphState& x, const Vertex& v) { return x.degree(v) >= 1 ? 1.0 : 0.0; }, inner,
      c.margin, c.replicas, c.seed, caps_of(c));

  json j = report_header(c);
  j["statistic"] = "normalized sum over the inner window of 1{deg >= 1}";
  j["inner_size"] = rep.inner_size;
  j["margin"] = rep.margin;
  j["replicas"] = rep.replicas;
  j["degenerate_sigma2"] = rep.degenerate;
  j["sigma2"] = rep.sigma2;
  j["ks_statistic"] = rep.ks_statistic;
  j["ks_p_value"] = rep.ks_p_value;
  j["skewness"] = rep.skewness;
  j["excess_kurtosis"] = rep.excess_kurtosis;
  j["ks_statistic_replica_centering"] = rep.ks_statistic_replica_centering;
  j["ks_p_value_replica_centering"] = rep.ks_p_value_replica_centering;
  j["note"] =
      "finite-size property check with empirical grand-mean centering; "
      "not a reproduction of the asymptotic theorem";
  finish_report(j, timer, c.out + ".json");
  return kOk;
}

int cmd_validate(const RunConfig& c) {
  Timer timer;
  json checks = json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, bool ok, json detail) {
    detail["name"] = name;
    detail["pass"] = ok;
    checks.push_back(detail);
    all_ok = all_ok && ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  };
  // --samples scales the statistical checks.
  const std::size_t n = std::max<std::uint64_t>(c.samples, 2000);

  {
    double worst = 0.0;
    const std::vector<Window> windows = {Window::from_vertices({{0, 0}, {1, 0}}),
                                         Window::from_vertices({{0, 0}, {1, 0}, {0, 1}}),
                                         Window::from_box(Box(0, 1, 0, 1))};
    for (const auto& m :
         {EnergyModel::edge_only(), EnergyModel::ferrari(0.3, 0.5), EnergyModel::two_star()})
      for (const auto& V : windows)
        for (double beta : {0.5, 1.0, 3.0, 6.0})
          worst = std::max(worst, detailed_balance_residual(m, V, beta));
    record("detailed_balance_residual", worst < 1e-12, {{"worst", worst}});
  }

  {
    const Window V = Window::from_box(Box(0, 1, 0, 1));
    const auto ens =
        perfect_ensemble(EnergyModel::edge_only(), V, 3.0, n, derive_seed(c.seed, 1));
    bool ok = true;
    double worst_dev = 0.0;
    for (const auto& em : ens.marginals) {
      const double r = std::exp(-3.0 * edge_length(em.edge));
      const double want = r / (1.0 + r);
      const double dev = std::abs(em.empirical - want) / binomial_sigma(want, n);
      worst_dev = std::max(worst_dev, dev);
      ok = ok && dev <= 3.0;
    }
    record("perfect_edgeonly_marginals", ok, {{"worst_sigmas", worst_dev}});
  }

  {
    const EnergyModel m = EnergyModel::ferrari(0.3, 0.5);
    const double beta = 6.0;
    const Window W = Window::from_vertices({{0, 0}, {1, 0}, {0, 1}});
    const auto oracle = exact_distribution(m, W, beta);
    auto table_of = [&](std::optional<Window> domain, std::uint64_t tag) {
      std::vector<double> tab(8, 0.0);
      for (std::uint64_t r = 0; r < n; ++r) {
        Engine g = replica_engine(derive_seed(c.seed, tag), r);
        const auto x = perfect_sample(m, W, beta, g, caps_of(c), domain);
        std::size_t mask = 0;
        for (std::size_t b = 0; b < oracle.edges.size(); ++b)
          if (x.has(oracle.edges[b])) mask |= 1ull << b;
        tab[mask] += 1.0 / static_cast<double>(n);
      }
      return tab;
    };
    const double tv_oracle = total_variation(table_of(W, 2), oracle.prob);
    record("perfect_ferrari_vs_oracle", tv_oracle < 0.02, {{"tv", tv_oracle}});

    const int l = embedding_margin(W, beta, m.constant_M(), 0.005);
    const double tv_embed =
        total_variation(table_of(std::nullopt, 3), table_of(W.dilated(l), 4));
    record("perfect_ferrari_embedding", tv_embed < 0.02, {{"tv", tv_embed}, {"margin", l}});
  }

  {
    const Window V = Window::from_vertices({{0, 0}, {1, 0}, {0, 1}});
    bool ok = true;
    json detail = json::array();
    const struct {
      EnergyModel m;
      double beta;
    } cases[] = {{EnergyModel::edge_only(), 1.0},
                 {EnergyModel::ferrari(0.3, 0.5), 2.0},
                 {EnergyModel::two_star(), 1.5}};
    for (const auto& cs : cases) {
      const auto d = exact_distribution(cs.m, V, cs.beta);
      const double want = exact_expectation(
          d, [](const GraphState& x) { return static_cast<double>(x.edge_count()); });
      const auto est = ergodic_average(
          cs.m, V, cs.beta,
          [](const GraphState& x) { return static_cast<double>(x.edge_count()); }, 500.0,
          std::max(20000.0, c.horizon), derive_seed(c.seed, 5));
      const double dev = std::abs(est.mean - want) / est.std_error;
      ok = ok && dev <= 3.0;
      detail.push_back({{"model", cs.m.name()}, {"sigmas", dev}});
    }
    record("forward_matches_exact", ok, {{"cases", detail}});
  }

  {
    const Window V = Window::from_box(Box(0, 1, 0, 1));
    bool ok = true;
    const struct {
      EnergyModel m;
      double beta;
    } cases[] = {{EnergyModel::edge_only(), 1.0},
                 {EnergyModel::ferrari(0.3, 0.5), 6.0},
                 {EnergyModel::two_star(), 3.0}};
    std::size_t min_events = SIZE_MAX;
    for (const auto& cs : cases) {
      GraphState x0(V);
      x0.add(Edge({0, 0}, {0, 1}));
      MultigraphState z0;
      z0.set_count(Edge({0, 0}, {0, 1}), 2);
      const auto res = coupled_run(cs.m, V, cs.beta, x0, z0, 40000.0, derive_seed(c.seed, 6));
      ok = ok && res.violations == 0 && res.events >= 10000;
      min_events = std::min(min_events, res.events);
    }
    record("coupled_dominance", ok, {{"min_events", min_events}});
  }

  {
    const Edge e({0, 0}, {1, 0});
    const Window V = Window::from_vertices({{0, 0}, {1, 0}});
    const double beta = 1.0, M = -0.6;
    const double lambda = birth_rate(e, beta, M);
    std::vector<std::size_t> hist;
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t seed = derive_seed(derive_seed(c.seed, 7), stream_tag::replica, k);
      Engine g = make_engine(derive_seed(seed, 0xFACEULL));
      int cnt = 0;
      double acc = exponential1(g);
      while (acc < lambda) {
        ++cnt;
        acc += exponential1(g);
      }
      MultigraphState z0;
      z0.set_count(e, cnt);
      const auto z = simulate_free(V, beta, M, z0, 2.0, seed);
      const std::size_t v = static_cast<std::size_t>(z.count(e));
      if (hist.size() <= v) hist.resize(v + 1, 0);
      ++hist[v];
    }
    const auto fit = chi_square_poisson_fit(hist, lambda, n);
    record("free_process_poisson", fit.p_value > 0.001, {{"p_value", fit.p_value}});
  }

  {
    bool ok = true;
    for (double M : {-0.6, 0.0, 1.0}) ok = ok && std::abs(alpha(beta_star(M), M) - 1.0) < 1e-9;
    const double bs0 = beta_star(0.0);
    ok = ok && std::abs(bs0 - 2.29243) < 1e-3;
    record("constants_beta_star", ok, {{"beta_star_0", bs0}});
  }

  {
    const auto rep = clan_tail_experiment(3.0, 0.0, std::min<std::size_t>(n, 10000),
                                          derive_seed(c.seed, 8));
    record("clan_tail_bounds", rep.all_ok, {{"mean_rectangles", rep.mean_rectangles}});
  }

  {
    const Window V = Window::from_box(Box(0, 1, 0, 1));
    const auto ens =
        perfect_ensemble(EnergyModel::ferrari(0.3, 0.5), V, 6.0, n, derive_seed(c.seed, 9));
    bool ok = ens.mean_degree <= ens.degree_bound + 3.0 * ens.mean_degree_sigma;
    for (const auto& em : ens.marginals)
      ok = ok && em.empirical <= em.free_bound + 3.0 * binomial_sigma(em.free_bound, n);
    record("marginal_and_degree_bounds", ok,
           {{"mean_degree", ens.mean_degree}, {"bound", ens.degree_bound}});
  }

  json j = report_header(c);
  j["checks"] = checks;
  j["all_pass"] = all_ok;
  finish_report(j, timer, c.out + ".json");
  return all_ok ? kOk : kValidationFailure;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     std::string& raw_out) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  raw_out = buf.str();
  std::map<std::string, std::string> kv;
  std::istringstream lines(raw_out);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config file line " + std::to_string(lineno) + ": expected key = value");
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return kv;
}

template <typename T>
void apply_key(const std::map<std::string, std::string>& kv, const std::string& key, T& target) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  std::istringstream is(it->second);
  is >> target;
  if (is.fail()) throw ConfigError("config file: bad value for '" + key + "'");
}

void apply_key(const std::map<std::string, std::string>& kv, const std::string& key,
               std::string& target) {
  auto it = kv.find(key);
  if (it != kv.end()) target = it->second;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  for (int i = 0; i < argc; ++i) cfg.argv_echo.push_back(argv[i]);

  CLI::App app{"spatial Gibbs random graphs: exact tables, forward simulation, perfect sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("sggraph ") + kVersion);

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override");

  auto* o_model = app.add_option("--model", cfg.model, "edge|ferrari|twostar");
  auto* o_h0 = app.add_option("--h0", cfg.h0, "Ferrari isolated-vertex weight");
  auto* o_h1 = app.add_option("--h1", cfg.h1, "Ferrari 2-star weight");
  auto* o_beta = app.add_option("--beta", cfg.beta, "inverse temperature");
  auto* o_window = app.add_option("--window", cfg.window, "box x0:x1,y0:y1 or list x,y;x,y");
  auto* o_samples = app.add_option("--samples", cfg.samples, "sample / replica count");
  auto* o_horizon = app.add_option("--horizon", cfg.horizon, "forward horizon");
  auto* o_burn = app.add_option("--burn", cfg.burn, "forward burn-in");
  auto* o_seed = app.add_option("--seed", cfg.seed, "64-bit master seed");
  auto* o_maxrect = app.add_option("--max-rect", cfg.max_rect, "clan rectangle cap");
  auto* o_maxdepth = app.add_option("--max-depth", cfg.max_depth, "clan time-depth cap");
  auto* o_replicas = app.add_option("--replicas", cfg.replicas, "clt replica count");
  auto* o_margin = app.add_option("--margin", cfg.margin, "clt sampling-window margin");
  auto* o_out = app.add_option("--out", cfg.out, "output path prefix");
  auto* o_format = app.add_option("--format", cfg.format, "json|csv");

  auto* sc_exact = app.add_subcommand("exact", "brute-force finite-volume table");
  auto* sc_forward = app.add_subcommand("forward", "forward birth-and-death simulation");
  auto* sc_perfect = app.add_subcommand("perfect", "perfect samples of a window");
  auto* sc_bounds = app.add_subcommand("bounds", "closed-form constants and bounds");
  auto* sc_validate = app.add_subcommand("validate", "oracle-equivalence and bound suites");
  auto* sc_clt = app.add_subcommand("clt", "normality check of the spatial CLT statistic");
  for (auto* sc : {sc_exact, sc_forward, sc_perfect, sc_bounds, sc_validate, sc_clt})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    // Precedence: flags > config file > SGGRAPH_SEED env (seed only) > defaults.
    bool seed_from_config = false;
    if (!config_path.empty()) {
      cfg.config_path = config_path;
      const auto kv = parse_config_file(config_path, cfg.config_raw);
      seed_from_config = kv.count("seed") != 0;
      if (!*o_model) apply_key(kv, "model", cfg.model);
      if (!*o_h0) apply_key(kv, "h0", cfg.h0);
      if (!*o_h1) apply_key(kv, "h1", cfg.h1);
      if (!*o_beta) apply_key(kv, "beta", cfg.beta);
      if (!*o_window) apply_key(kv, "window", cfg.window);
      if (!*o_samples) apply_key(kv, "samples", cfg.samples);
      if (!*o_horizon) apply_key(kv, "horizon", cfg.horizon);
      if (!*o_burn) apply_key(kv, "burn", cfg.burn);
      if (!*o_seed) apply_key(kv, "seed", cfg.seed);
      if (!*o_maxrect) apply_key(kv, "max_rect", cfg.max_rect);
      if (!*o_maxdepth) apply_key(kv, "max_depth", cfg.max_depth);
      if (!*o_replicas) apply_key(kv, "replicas", cfg.replicas);
      if (!*o_margin) apply_key(kv, "margin", cfg.margin);
      if (!*o_out) apply_key(kv, "out", cfg.out);
      if (!*o_format) apply_key(kv, "format", cfg.format);
    }
    if (!*o_seed && !seed_from_config) {
      if (const char* env = std::getenv("SGGRAPH_SEED")) {
        std::istringstream is(env);
        is >> cfg.seed;
        if (is.fail()) throw ConfigError("SGGRAPH_SEED: not a 64-bit unsigned integer");
      }
    }
    if (cfg.out.empty()) {
      for (const auto& [sc, name] :
           std::initializer_list<std::pair<CLI::App*, const char*>>{{sc_exact, "exact"},
                                                                    {sc_forward, "forward"},
                                                                    {sc_perfect, "perfect"},
                                                                    {sc_bounds, "bounds"},
                                                                    {sc_validate, "validate"},
                                                                    {sc_clt, "clt"}})
        if (sc->parsed()) cfg.out = name;
    }
    if (cfg.beta <= 0) throw ConfigError("beta must be > 0");

    if (sc_exact->parsed()) return cmd_exact(cfg);
    if (sc_forward->parsed()) return cmd_forward(cfg);
    if (sc_perfect->parsed()) return cmd_perfect(cfg);
    if (sc_bounds->parsed()) return cmd_bounds(cfg);
    if (sc_validate->parsed()) return cmd_validate(cfg);
    if (sc_clt->parsed()) return cmd_clt(cfg);
    return kConfigError;
  } catch (const CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << " (rectangles=" << e.rectangles
              << ", time_depth=" << e.time_depth << ")\n";
    return kCapExceeded;
  } catch (const GuardError& e) {
    std::cerr << "refusal: " << e.what() << "\n";
    return kGuardRefusal;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
