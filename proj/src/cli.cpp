#include "patentkb/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "patentkb/citegraph.hpp"
#include "patentkb/corpus.hpp"
#include "patentkb/error.hpp"
#include "patentkb/geo.hpp"
#include "patentkb/indicators.hpp"
#include "patentkb/io.hpp"
#include "patentkb/stats.hpp"
#include "patentkb/synthetic.hpp"

namespace patentkb::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kIndicatorColumns = {"sd",  "sdf", "uf",  "id",
                                                    "idf", "rid", "ipd", "rd"};

struct Options {
  std::vector<std::string> corpora;
  std::vector<std::string> offices;
  std::string tech_defs;
  std::string europe_set;
  std::string jurisdiction = "home";
  std::string out_dir = ".";
  bool strict = false;
  unsigned threads = 0;

  std::string ipd_mode = "auto";
  std::uint64_t ipd_samples = kDefaultIpdSamples;
  std::optional<std::uint64_t> seed;

  std::string indicator;
  std::optional<double> bin_base;
  std::optional<double> bin_width;

  std::string table;
  std::vector<std::string> columns = kIndicatorColumns;
  std::vector<std::string> exclude = {"non_fossil_fuels"};
  double alpha = 0.1;
  std::string tails = "two";
  std::string y;
  std::vector<std::string> x;

  std::string tech;
  bool svg = false;
  std::size_t top = 5;
  bool edges = false;

  std::string config;
  std::optional<std::size_t> count;
  std::optional<std::string> synth_office;
};

/// Artifacts are collected in memory and written only after every step succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;

  void add(const Options& o, const std::string& name, std::string content) {
    files.emplace_back((fs::path(o.out_dir) / name).string(), std::move(content));
  }
};

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError(fmt::format("{} '{}' does not exist", what, path));
}

struct Inputs {
  std::vector<Corpus> corpora;
  std::vector<TechnologyDef> techs;
  CountrySet europe;
  JurisdictionRule rule = JurisdictionRule::Home;
};

/// Checks every flag and input path before loading anything.
void check_corpus_flags(const Options& o) {
  if (o.corpora.empty()) throw ValidationError("at least one --corpus is required");
  if (o.offices.size() != o.corpora.size())
    throw ValidationError(fmt::format("{} --corpus given but {} --office", o.corpora.size(),
                                      o.offices.size()));
  std::vector<Office> seen;
  for (const auto& text : o.offices) {
    const Office office = parse_office(text);
    if (std::find(seen.begin(), seen.end(), office) != seen.end())
      throw ValidationError(fmt::format("office {} given twice", to_string(office)));
    seen.push_back(office);
  }
  const JurisdictionRule rule = parse_jurisdiction(o.jurisdiction);
  for (Office office : seen) {
    if ((rule == JurisdictionRule::ForeignUsInEp && office != Office::EP) ||
        (rule == JurisdictionRule::ForeignEpInUs && office != Office::US))
      throw ValidationError(fmt::format("jurisdiction {} does not apply to office {}",
                                        to_string(rule), to_string(office)));
  }
  for (const auto& path : o.corpora) require_file(path, "corpus");
  if (!o.tech_defs.empty()) require_file(o.tech_defs, "technology definitions");
  if (!o.europe_set.empty()) require_file(o.europe_set, "country set");
}

Inputs load_inputs(const Options& o) {
  check_corpus_flags(o);
  Inputs in;
  in.rule = parse_jurisdiction(o.jurisdiction);
  in.techs = o.tech_defs.empty() ? default_technologies() : load_technologies_file(o.tech_defs);
  in.europe = o.europe_set.empty() ? default_europe_set() : load_country_set_file(o.europe_set);
  ParseOptions parse;
  parse.strict = o.strict;
  for (std::size_t i = 0; i < o.corpora.size(); ++i)
    in.corpora.push_back(parse_corpus_file(o.corpora[i], parse_office(o.offices[i]), parse));
  return in;
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

std::string suffix(const Corpus& corpus, const std::string& tech) {
  std::string s(to_string(corpus.office()));
  if (!tech.empty()) s += "_" + tech;
  return s;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

// ---------------------------------------------------------------------------

void cmd_ingest_validate(const Options& o, Outputs& outputs, std::ostream& out) {
  const Inputs in = load_inputs(o);
  for (const auto& corpus : in.corpora) {
    const auto graph = build_graph(corpus);
    out << fmt::format("{}: {} records, {} citation edges, {} dangling citations\n",
                       to_string(corpus.office()), corpus.size(), graph.edge_count(),
                       graph.dangling_count());
    if (o.edges)
      outputs.add(o, fmt::format("edges_{}.csv", to_string(corpus.office())),
                  render([&](std::ostream& s) { write_edge_list(s, graph, corpus); }));
  }
}

void cmd_indicators(const Options& o, Outputs& outputs, std::ostream& err) {
  IpdOptions ipd;
  ipd.mode = parse_ipd_mode(o.ipd_mode);
  ipd.samples = o.ipd_samples;
  ipd.seed = o.seed;
  ipd.threads = o.threads;
  if (ipd.mode == IpdMode::Sampled && !ipd.seed)
    throw ValidationError("--seed is required with --ipd-mode sampled");
  if (ipd.samples == 0) throw ValidationError("--ipd-samples must be positive");

  const Inputs in = load_inputs(o);
  for (const auto& corpus : in.corpora) {
    const auto graph = build_graph(corpus);
    IndicatorTable table;
    std::vector<MobilityResult> mobility;
    for (const auto& tech : in.techs) {
      const PatentSet ms = members(corpus, tech);
      if (ms.empty()) {
        err << fmt::format("{}: no patents for {}, skipped\n", to_string(corpus.office()),
                           tech.short_name);
        continue;
      }
      table.rows.push_back(compute_indicator_row(tech, corpus, graph));

      MobilityResult m;
      m.technology = tech.short_name;
      const auto located = std::count_if(ms.begin(), ms.end(), [](const PatentRecord* p) {
        return !p->inventor_locations.empty();
      });
      if (located >= 2) m.ipd = inter_patent_distance(ms, ipd);
      const PatentSet home = jurisdiction_filter(ms, corpus.office(), in.rule, in.europe);
      m.rd_population = home.size();
      const bool any_rd = std::any_of(home.begin(), home.end(), [&](const PatentRecord* p) {
        return reference_distance_patent(*p, corpus).has_value();
      });
      if (any_rd) m.rd = reference_distance_technology(home, corpus);
      mobility.push_back(std::move(m));
    }
    if (table.rows.empty())
      throw ValidationError(
          fmt::format("{}: no technology has any patent", to_string(corpus.office())));

    const std::string office(to_string(corpus.office()));
    outputs.add(o, "indicators_" + office + ".csv",
                render([&](std::ostream& s) { write_indicator_csv(s, table); }));
    outputs.add(o, "mobility_" + office + ".csv",
                render([&](std::ostream& s) { write_mobility_csv(s, mobility); }));
    outputs.add(o, "summary_" + office + ".csv", render([&](std::ostream& s) {
                  s << "technology,n_patents";
                  for (const auto& c : kIndicatorColumns) s << ',' << c;
                  s << '\n';
                  for (std::size_t i = 0; i < table.rows.size(); ++i) {
                    const auto& r = table.rows[i];
                    const auto& m = mobility[i];
                    s << r.technology << ',' << r.n_patents << ',' << format_number(r.sd.mean)
                      << ','
                      << optional_cell(r.sdf ? std::optional(r.sdf->mean) : std::nullopt)
                      << ',' << format_number(r.uf) << ',' << format_number(r.id.mean) << ','
                      << optional_cell(r.idf ? std::optional(r.idf->mean) : std::nullopt)
                      << ',' << format_number(r.rid) << ','
                      << optional_cell(m.ipd ? std::optional(m.ipd->mean_km) : std::nullopt)
                      << ','
                      << optional_cell(m.rd ? std::optional(m.rd->mean_km) : std::nullopt)
                      << '\n';
                  }
                }));
  }
}

void cmd_bins(const Options& o, Outputs& outputs, std::ostream& err) {
  const bool sdf = o.indicator == "sdf";
  if (!sdf && o.indicator != "idf")
    throw ValidationError(fmt::format("unknown indicator '{}' (sdf, idf)", o.indicator));
  const Inputs in = load_inputs(o);
  for (const auto& corpus : in.corpora) {
    const auto graph = build_graph(corpus);
    const auto scope = ReferenceScope::cpc_group();
    const PatentSet patents =
        jurisdiction_filter(all_patents(corpus), corpus.office(), in.rule, in.europe);

    std::vector<double> values;
    std::vector<std::optional<double>> responses;
    for (const PatentRecord* p : patents) {
      const auto rd = reference_distance_patent(*p, corpus);
      if (!rd) continue;
      const auto v = sdf ? sdf_patent(*p) : idf_patent(*p, graph, scope, corpus);
      // Zero sdf has no place on a logarithmic axis.
      if (!v || (sdf && *v == 0.0)) continue;
      values.push_back(*v);
      responses.push_back(rd);
    }
    const std::string office(to_string(corpus.office()));
    if (values.empty())
      throw ValidationError(fmt::format("{}: no patent has both a defined {} and rd", office,
                                        o.indicator));

    const double width = o.bin_width.value_or(corpus.office() == Office::EP ? 0.02 : 0.01);
    const BinAssignment assignment =
        sdf ? exponential_bins(values, o.bin_base.value_or(1.25)) : constant_bins(values, width);
    const BinSeries series = bin_response(assignment, responses);
    outputs.add(o, fmt::format("bins_{}_{}.csv", o.indicator, office),
                render([&](std::ostream& s) { write_bin_csv(s, series); }));

    if (sdf) continue;
    std::vector<double> mid;
    std::vector<double> mean;
    for (std::size_t b = 0; b < series.bin_count(); ++b) {
      if (!series.means[b]) continue;
      mid.push_back(0.5 * (series.edges[b] + series.edges[b + 1]));
      mean.push_back(*series.means[b]);
    }
    if (mid.size() < 3) {
      err << fmt::format("{}: {} non-empty bins, no linear fit\n", office, mid.size());
      continue;
    }
    const auto f = fit(Eigen::Map<const Eigen::VectorXd>(mid.data(), static_cast<Eigen::Index>(mid.size())),
                       Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                       FitKind::Linear);
    outputs.add(o, fmt::format("fit_idf_{}.csv", office),
                fmt::format("kind,slope,intercept,r_squared,n\nlinear,{},{},{},{}\n",
                            format_number(f.slope), format_number(f.intercept),
                            format_number(f.r_squared), f.n));
  }
}

DataTable load_table(const Options& o) {
  if (o.table.empty()) throw ValidationError("--table is required");
  require_file(o.table, "table");
  return read_data_table_file(o.table);
}

void cmd_correlate(const Options& o, Outputs& outputs) {
  const Tails tails = parse_tails(o.tails);
  const DataTable table = load_table(o);
  const auto m = correlation_matrix(table, o.columns, o.exclude, o.alpha, tails);
  outputs.add(o, "correlation.csv", render([&](std::ostream& s) { write_correlation_csv(s, m); }));
}

void cmd_regress(const Options& o, Outputs& outputs, std::ostream& out) {
  if (o.y.empty() || o.x.empty()) throw ValidationError("--y and --x are required");
  const DataTable table = load_table(o);

  std::vector<Eigen::Index> cols{table.column_index(o.y)};
  for (const auto& name : o.x) cols.push_back(table.column_index(name));
  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < table.row_names.size(); ++r)
    if (std::find(o.exclude.begin(), o.exclude.end(), table.row_names[r]) == o.exclude.end())
      rows.push_back(static_cast<Eigen::Index>(r));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(o.x.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c <= k; ++c) {
      const double v = table.values(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(c)]);
      if (std::isnan(v))
        throw ValidationError(fmt::format("regress: missing value in column '{}' for '{}'",
                                          table.columns[static_cast<std::size_t>(cols[static_cast<std::size_t>(c)])],
                                          table.row_names[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]));
      if (c == 0)
        y(i) = v;
      else
        X(i, c - 1) = v;
    }
  }
  const auto result = regress(y, X, o.x);
  const std::string text = format_regression_table(result, o.y);
  out << text;
  outputs.add(o, "regression_" + o.y + ".txt", text);
  outputs.add(o, "regression_" + o.y + ".json", regression_to_json(result, o.y));
}

PatentSet selection(const Corpus& corpus, const Inputs& in, const std::string& tech) {
  return tech.empty() ? all_patents(corpus) : members(corpus, find_technology(in.techs, tech));
}

void cmd_map_grid(const Options& o, Outputs& outputs) {
  const Inputs in = load_inputs(o);
  for (const auto& corpus : in.corpora) {
    const GridCounts grid = grid_counts(selection(corpus, in, o.tech));
    const std::string sfx = suffix(corpus, o.tech);
    outputs.add(o, "grid_" + sfx + ".csv", render([&](std::ostream& s) { write_grid_csv(s, grid); }));
    if (o.svg)
      outputs.add(o, "grid_" + sfx + ".svg",
                  render([&](std::ostream& s) { write_grid_svg(s, grid, sfx); }));
  }
}

void cmd_rank(const Options& o, Outputs& outputs) {
  if (o.top == 0) throw ValidationError("--top must be positive");
  const Inputs in = load_inputs(o);
  for (const auto& corpus : in.corpora) {
    const auto ranking = country_ranking(selection(corpus, in, o.tech), o.top);
    outputs.add(o, "ranking_" + suffix(corpus, o.tech) + ".csv",
                render([&](std::ostream& s) { write_ranking_csv(s, ranking); }));
  }
}

void cmd_synth(const Options& o, Outputs& outputs) {
  if (!o.seed) throw ValidationError("--seed is required for synth");
  GeneratorConfig config;
  if (!o.config.empty()) {
    require_file(o.config, "generator config");
    config = generator_config_from_json(read_text_file(o.config));
  }
  if (o.count) config.count = *o.count;
  if (o.synth_office) config.office = parse_office(*o.synth_office);
  if (!o.tech_defs.empty()) {
    require_file(o.tech_defs, "technology definitions");
    config.technologies = load_technologies_file(o.tech_defs);
  }
  const Corpus corpus = generate_synthetic(config, *o.seed);
  outputs.add(o, fmt::format("synthetic_{}.jsonl", to_string(corpus.office())),
              serialize_corpus(corpus));
}

void write_outputs(const Options& o, const Outputs& outputs, std::ostream& out) {
  if (outputs.files.empty()) return;
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec || !fs::is_directory(o.out_dir))
    throw IoError(fmt::format("cannot create output directory '{}'", o.out_dir));
  for (const auto& [path, content] : outputs.files) {
    write_file_atomically(path, content);
    out << "wrote " << path << '\n';
  }
}

void add_corpus_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpora, "JSON-lines corpus (repeatable, one per office)");
  cmd->add_option("--office", o.offices, "Office of each --corpus (EP or US)");
  cmd->add_option("--tech-defs", o.tech_defs, "Technology definitions (TSV)");
  cmd->add_option("--europe-set", o.europe_set, "European country codes, one per line");
  cmd->add_option("--jurisdiction", o.jurisdiction,
                  "home, foreign-us-in-ep or foreign-ep-in-us")
      ->capture_default_str();
  cmd->add_flag("--strict", o.strict, "Reject unknown record keys");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out-dir", o.out_dir, "Directory for artifacts")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Patent knowledge-base indicators"};
  app.name("patentkb");
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest-validate", "Parse and validate corpora");
  add_corpus_flags(ingest, o);
  add_output_flags(ingest, o);
  ingest->add_flag("--edges", o.edges, "Also write the citation edge list");

  auto* indicators = app.add_subcommand("indicators", "Per-technology indicator tables");
  add_corpus_flags(indicators, o);
  add_output_flags(indicators, o);
  indicators->add_option("--ipd-mode", o.ipd_mode, "exact, sampled or auto")->capture_default_str();
  indicators->add_option("--ipd-samples", o.ipd_samples, "Pairs drawn when sampling")
      ->capture_default_str();
  indicators->add_option("--seed", o.seed, "Seed for sampled ipd");

  auto* bins = app.add_subcommand("bins", "Mean rd per sdf or idf bin");
  add_corpus_flags(bins, o);
  add_output_flags(bins, o);
  bins->add_option("--indicator", o.indicator, "sdf or idf")->required();
  bins->add_option("--bin-base", o.bin_base, "Exponential bin base for sdf (default 1.25)");
  bins->add_option("--bin-width", o.bin_width, "Constant bin width for idf (default EP 0.02, US 0.01)");

  auto* correlate = app.add_subcommand("correlate", "Pearson matrix over a summary table");
  correlate->add_option("--table", o.table, "Summary CSV")->required();
  correlate->add_option("--columns", o.columns, "Columns to correlate")->delimiter(',');
  correlate->add_option("--exclude", o.exclude, "Rows to leave out")->delimiter(',');
  correlate->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
  correlate->add_option("--tails", o.tails, "two or one")->capture_default_str();
  add_output_flags(correlate, o);

  auto* regress_cmd = app.add_subcommand("regress", "OLS over a summary table");
  regress_cmd->add_option("--table", o.table, "Summary CSV")->required();
  regress_cmd->add_option("--y", o.y, "Dependent column")->required();
  regress_cmd->add_option("--x", o.x, "Predictor columns")->delimiter(',')->required();
  regress_cmd->add_option("--exclude", o.exclude, "Rows to leave out")->delimiter(',');
  add_output_flags(regress_cmd, o);

  auto* map = app.add_subcommand("map-grid", "Half-degree grid counts");
  add_corpus_flags(map, o);
  add_output_flags(map, o);
  map->add_option("--tech", o.tech, "Restrict to one technology (short name)");
  map->add_flag("--svg", o.svg, "Also write an SVG heat map");

  auto* rank = app.add_subcommand("rank-countries", "Top inventor countries");
  add_corpus_flags(rank, o);
  add_output_flags(rank, o);
  rank->add_option("--tech", o.tech, "Restrict to one technology (short name)");
  rank->add_option("--top", o.top, "Number of countries")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth->add_option("--config", o.config, "Generator config (JSON)");
  synth->add_option("--seed", o.seed, "Generator seed")->required();
  synth->add_option("--count", o.count, "Number of records");
  synth->add_option("--office", o.synth_office, "EP or US");
  synth->add_option("--tech-defs", o.tech_defs, "Technology definitions (TSV)");
  add_output_flags(synth, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Outputs outputs;
    if (ingest->parsed()) cmd_ingest_validate(o, outputs, out);
    else if (indicators->parsed()) cmd_indicators(o, outputs, err);
    else if (bins->parsed()) cmd_bins(o, outputs, err);
    else if (correlate->parsed()) cmd_correlate(o, outputs);
    else if (regress_cmd->parsed()) cmd_regress(o, outputs, out);
    else if (map->parsed()) cmd_map_grid(o, outputs);
    else if (rank->parsed()) cmd_rank(o, outputs);
    else if (synth->parsed()) cmd_synth(o, outputs);
    write_outputs(o, outputs, out);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace patentkb::cli
