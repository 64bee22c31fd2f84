// bafo: command-line front end for the two-stage auction analysis library.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bafo/bafo.hpp"
#include "bafo/io.hpp"

namespace {

using bafo::io::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExpectation = 2;
constexpr int kExitConfig = 64;

struct Options {
  std::string command;
  std::string spec_path;
  std::vector<std::string> structures;
  std::optional<int> n;
  int n_max = 0;
  std::string p_range = "0.05:0.50:0.01";
  int jobs = bafo::default_jobs();
  std::uint64_t seed = 1;
  std::string out;
  std::string expect;
  std::int64_t trials = 100000;
  std::string profile;
  std::string m_range = "4:8";
  std::string n_range = "4:8";
  int grid_points = 25;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("bafo");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BAFO_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

void emit(const Options& o, const std::string& file, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / file;
  std::ofstream f(path);
  if (!f) throw bafo::ConfigError("cannot write " + path.string());
  f << content;
  if (!content.empty() && content.back() != '\n') f << '\n';
  spdlog::info("wrote {}", path.string());
}

json load_spec_json(const Options& o) {
  if (o.spec_path.empty()) throw bafo::ConfigError("--spec is required for " + o.command);
  return bafo::io::parse_json(bafo::io::read_file(o.spec_path), o.spec_path);
}

bafo::AuctionSpec load_spec(const Options& o) { return bafo::io::parse_spec(load_spec_json(o), o.n); }

std::vector<bafo::InformationStructure> load_structures(const Options& o, std::vector<std::string> fallback) {
  const auto& names = o.structures.empty() ? fallback : o.structures;
  std::vector<bafo::InformationStructure> out;
  for (const auto& s : names) out.push_back(bafo::io::parse_structure_arg(s));
  return out;
}

bafo::SymmetricStrategy load_profile(const Options& o, const bafo::AuctionSpec& spec) {
  if (o.profile.empty()) return bafo::revenue_maximizing_profile(spec);
  const bool inline_json = o.profile.front() == '{';
  const auto j = bafo::io::parse_json(inline_json ? o.profile : bafo::io::read_file(o.profile), "profile");
  return bafo::io::parse_profile(j, spec);
}

// "a:b" inclusive integer range.
std::pair<int, int> parse_int_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw bafo::ConfigError(std::string(flag) + " expects a:b");
  }
}

// "a:b:step", evaluated exactly on the decimal grid.
std::vector<double> parse_p_range(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 3) throw bafo::ConfigError("--p-range expects a:b:step");
  const auto a = bafo::Decimal::parse(parts[0]);
  const auto b = bafo::Decimal::parse(parts[1]);
  const auto step = bafo::Decimal::parse(parts[2]);
  if (step.scaled() <= 0 || b < a) throw bafo::ConfigError("--p-range needs a <= b and a positive step");
  std::vector<double> out;
  for (std::int64_t x = a.scaled(); x <= b.scaled(); x += step.scaled()) {
    out.push_back(bafo::Decimal::from_scaled(x).to_double());
  }
  return out;
}

bool check_expect(const Options& o, const std::string& actual) {
  if (o.expect.empty()) return true;
  if (o.expect != actual) {
    spdlog::error("expected {}, got {}", o.expect, actual);
    return false;
  }
  return true;
}

int cmd_verify(const Options& o) {
  const auto spec = load_spec(o);
  const auto structures = load_structures(o, {"non_informative"});
  const auto profile = load_profile(o, spec);
  json out = json::array();
  bool all = true;
  for (const auto& s : structures) {
    const auto cert = bafo::is_equilibrium(spec, s, profile);
    all = all && cert.equilibrium;
    out.push_back(bafo::io::certificate_json(spec, s, cert));
  }
  emit(o, "certificate.json", (out.size() == 1 ? out[0] : out).dump(2));
  return check_expect(o, all ? "equilibrium" : "refuted") ? kExitOk : kExitExpectation;
}

int cmd_threshold(const Options& o) {
  const auto base = load_spec_json(o);
  const auto structures = load_structures(o, {"non_informative"});
  const int n_max = o.n_max > 0 ? o.n_max : 1000;
  auto family = [&base](int n) { return bafo::io::parse_spec(base, n); };
  json out = json::array();
  bool found_all = true;
  for (const auto& s : structures) {
    try {
      out.push_back(bafo::io::threshold_json(bafo::threshold_n(family, s, n_max)));
    } catch (const bafo::NotFound& e) {
      found_all = false;
      out.push_back({{"structure", s.name()}, {"N", nullptr}, {"n_max", n_max}, {"error", e.what()}});
    }
  }
  emit(o, "threshold.json", (out.size() == 1 ? out[0] : out).dump(2));
  if (!found_all) return kExitError;
  return check_expect(o, "found") ? kExitOk : kExitExpectation;
}

int cmd_sweep(const Options& o) {
  const auto base = load_spec_json(o);
  const auto structures = load_structures(o, {"non_informative", "opponent_bid"});
  const auto ps = parse_p_range(o.p_range);
  const int n_max = o.n_max > 0 ? o.n_max : 200;
  const auto probe = bafo::io::parse_spec(base, 3);
  if (probe.num_types() != 2) throw bafo::ConfigError("sweep needs a two-type spec; p is the high-type probability");

  const std::size_t S = structures.size();
  const auto results = bafo::parallel_map(ps.size() * S, o.jobs, [&](std::size_t i) -> std::optional<bafo::ThresholdResult> {
    const double p = ps[i / S];
    auto family = [&](int n) { return probe.with_dist(bafo::JointTypeDistribution::iid({1.0 - p, p})).with_bidders(n); };
    try {
      return bafo::threshold_n(family, structures[i % S], n_max);
    } catch (const bafo::NotFound&) {
      return std::nullopt;
    }
  });

  std::string csv = "p";
  for (const auto& s : structures) csv += ",N_" + s.name();
  for (const auto& s : structures) csv += ",monotone_" + s.name();
  csv += '\n';
  std::string steps = "structure,p,N\n";
  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    csv += bafo::io::format_number(ps[pi]);
    for (std::size_t s = 0; s < S; ++s) {
      const auto& r = results[pi * S + s];
      csv += ',' + (r ? std::to_string(r->N) : std::string());
      if (r) steps += structures[s].name() + ',' + bafo::io::format_number(ps[pi]) + ',' + std::to_string(r->N) + '\n';
    }
    for (std::size_t s = 0; s < S; ++s) {
      const auto& r = results[pi * S + s];
      csv += ',' + (r ? std::string(r->monotone ? "1" : "0") : std::string());
    }
    csv += '\n';
  }
  emit(o, "sweep.csv", csv);
  if (!o.out.empty()) emit(o, "sweep_steps.csv", steps);
  return kExitOk;
}

int cmd_enumerate(const Options& o) {
  const auto spec = load_spec(o);
  const auto structures = load_structures(o, {"non_informative"});
  json out = json::array();
  bool unique = true;
  for (const auto& s : structures) {
    const auto report = s.structurally_non_informative() ? bafo::enumerate_equilibria_ni(spec, o.jobs)
                                                         : bafo::enumerate_equilibria_fi(spec, s, o.jobs);
    unique = unique && bafo::sigma_star_unique(spec, report);
    out.push_back(bafo::io::enumeration_json(spec, s, report));
  }
  emit(o, "enumeration.json", (out.size() == 1 ? out[0] : out).dump(2));
  return check_expect(o, unique ? "unique" : "not_unique") ? kExitOk : kExitExpectation;
}

int cmd_grid(const Options& o) {
  const auto M = parse_int_range(o.m_range, "--m-range");
  const auto n = parse_int_range(o.n_range, "--n-range");
  int per_axis = 0;
  while ((per_axis + 1) * (per_axis + 1) <= o.grid_points) ++per_axis;
  if (per_axis * per_axis != o.grid_points) throw bafo::ConfigError("--grid-points must be a perfect square");
  const auto points = bafo::rectangular_grid(per_axis, 0.1, 0.4, 0.09, 0.5);
  const auto report = bafo::uniqueness_grid_search(M, n, points, o.jobs);
  json summary = {{"cells", report.cells.size()},
                  {"rows", report.rows.size()},
                  {"counterexamples", report.counterexamples}};
  if (!o.out.empty()) {
    emit(o, "grid_rows.csv", bafo::io::grid_rows_csv(report));
    emit(o, "grid_cells.csv", bafo::io::grid_cells_csv(report));
    emit(o, "grid_summary.json", summary.dump(2));
  } else {
    std::cout << bafo::io::grid_cells_csv(report);
  }
  return check_expect(o, report.counterexamples == 0 ? "no_counterexample" : "counterexample") ? kExitOk
                                                                                             : kExitExpectation;
}

int cmd_simulate(const Options& o) {
  if (o.trials < 1) throw bafo::ConfigError("--trials must be at least 1");
  const auto spec = load_spec(o);
  const auto structures = load_structures(o, {"non_informative"});
  const auto profile = load_profile(o, spec);
  json out = json::array();
  for (const auto& s : structures) {
    auto j = bafo::io::simulation_json(bafo::simulate(spec, s, profile, o.trials, o.seed, o.jobs));
    j["structure"] = s.name();
    out.push_back(j);
  }
  emit(o, "simulation.json", (out.size() == 1 ? out[0] : out).dump(2));
  return kExitOk;
}

int cmd_compare_info(const Options& o) {
  const auto spec = load_spec(o);
  if (o.structures.size() != 2) throw bafo::ConfigError("compare-info takes exactly two --structure values");
  const auto structures = load_structures(o, {});
  const auto profile = load_profile(o, spec);
  json out;
  out["more"] = structures[0].name();
  out["less"] = structures[1].name();
  const auto cmp = bafo::more_informative(structures[0], structures[1], spec, profile);
  out["comparison"] = bafo::io::comparison_json(cmp);
  json ni = json::array();
  for (const auto& s : structures) {
    const auto r = bafo::is_non_informative(s, spec);
    json e = {{"structure", s.name()}, {"non_informative", r.non_informative}};
    if (r.witness) {
      e["witness"] = {{"own_bid", r.witness->own_bid},
                      {"profile_a", r.witness->profile_a},
                      {"profile_b", r.witness->profile_b}};
    }
    ni.push_back(e);
  }
  out["non_informative"] = ni;
  emit(o, "compare.json", out.dump(2));
  return check_expect(o, cmp.comparable ? "comparable" : "not_comparable") ? kExitOk : kExitExpectation;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  Options o;
  CLI::App app{"Exact analysis of two-stage first-price auctions with a best-and-final-offer round"};
  app.require_subcommand(1);

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "Auction spec JSON file")->check(CLI::ExistingFile);
    sub->add_option("--structure", o.structures, "Information structure: name, inline JSON or JSON file");
    sub->add_option("--n", o.n, "Number of bidders (overrides the spec)");
    sub->add_option("--n-max", o.n_max, "Largest bidder count searched");
    sub->add_option("--p-range", o.p_range, "High-type probabilities a:b:step");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory (default: stdout)");
    sub->add_option("--expect", o.expect, "Exit 2 unless the verdict matches");
    sub->add_option("--profile", o.profile, "Strategy profile JSON (file or inline); default is the revenue-maximizing profile");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"verify", "Check whether a profile is an equilibrium", cmd_verify},
      {"threshold", "Smallest bidder count from which the revenue-maximizing profile is an equilibrium", cmd_threshold},
      {"sweep", "Thresholds over a range of high-type probabilities", cmd_sweep},
      {"enumerate", "All pure symmetric equilibria", cmd_enumerate},
      {"grid", "Uniqueness search over a parameter grid", cmd_grid},
      {"simulate", "Monte Carlo play-out", cmd_simulate},
      {"compare-info", "Garbling order and non-informativeness", cmd_compare_info},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, &c);
  }
  for (auto& [sub, c] : subs) {
    const std::string name = c->name;
    if (name == "simulate") sub->add_option("--trials", o.trials, "Number of simulated auctions");
    if (name == "grid") {
      sub->add_option("--m-range", o.m_range, "Bid grid sizes a:b");
      sub->add_option("--n-range", o.n_range, "Bidder counts a:b");
      sub->add_option("--grid-points", o.grid_points, "Points in the (p, v1) rectangle (perfect square)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (auto& [sub, c] : subs) {
    if (!sub->parsed()) continue;
    o.command = c->name;
    try {
      return c->run(o);
    } catch (const bafo::ConfigError& e) {
      spdlog::error("{}", e.what());
      return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
      spdlog::error("malformed input: {}", e.what());
      return kExitConfig;
    } catch (const bafo::Error& e) {
      spdlog::error("{}", e.what());
      return kExitError;
    }
  }
  return kExitError;
}
