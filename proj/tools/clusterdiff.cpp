// Copyright 2026 The clusterdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 ok, 2 input error, 3 judgements
// needed (a sample manifest was written), 4 reasoning infeasible.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <clusterdiff/clusterdiff.hpp>

namespace cd = clusterdiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitJudgements = 3;
constexpr int kExitInfeasible = 4;

// Raised after a manifest has been written for the user to judge.
class JudgementsNeeded : public cd::Error {
 public:
  explicit JudgementsNeeded(const std::string& path)
      : cd::Error("judgements needed: sample manifest written to " + path) {}
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

struct QualityArgs {
  std::string mode = "exact";
  std::string ideal;
  std::string judgements;
  std::string manifest = "manifest.tsv";
  std::size_t n = 1000;
};

struct ReasoningArgs {
  std::string variant = "auto";
  std::string policy = "dampened";
  double fixed_recall = 0.70;
  std::optional<double> precision;
  std::string clip = "clip";
};

void write_text(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) {
    throw cd::ValidationError("cannot write " + g.out);
  }
  f << text;
}

void emit(const Globals& g, const cd::Json& report) {
  std::ostringstream s;
  if (g.format == "csv") {
    cd::write_flat_csv(s, report);
  } else {
    s << report.dump(2) << '\n';
  }
  write_text(g, s.str());
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw cd::ValidationError("cannot write " + path);
  }
  writer(f);
}

struct Loaded {
  cd::ClusteringPair pair;
  cd::Json provenance;
};

Loaded load_pair(const std::string& base_path, const std::string& exp_path, const Globals& g) {
  auto base = cd::load_clustering(base_path);
  auto exp = cd::load_clustering(exp_path);
  auto pair = cd::restrict_to_common(base, exp);
  cd::Json prov;
  prov["base"] = base_path;
  prov["exp"] = exp_path;
  prov["seed"] = g.seed;
  prov["dropped_items"] = pair.dropped();
  prov["warnings"] = pair.warnings();
  return {std::move(pair), std::move(prov)};
}

cd::Clustering load_ideal(const std::string& path, const cd::Population& pop) {
  return cd::align_to(cd::load_clustering(path), pop);
}

struct QualityOutcome {
  cd::QualityRates rates;
  std::optional<cd::SampledQuality> sampled;
  std::optional<cd::Estimate> delta_recall;
  std::optional<cd::Clustering> ideal;
};

void write_manifest_file(const std::string& path, const cd::Population& pop, const cd::QualitySample& sample) {
  write_file(path, [&](std::ostream& out) { cd::write_manifest(out, pop, sample); });
}

// Exact rates from an Ideal, or sampled estimates from judgements (or from the
// Ideal acting as an oracle judge).
QualityOutcome obtain_quality(const cd::ClusteringPair& pair, const QualityArgs& q, const Globals& g,
                              cd::Json& provenance) {
  QualityOutcome out;
  const auto& pop = pair.population();
  if (!q.ideal.empty()) {
    out.ideal = load_ideal(q.ideal, pop);
    provenance["ideal"] = q.ideal;
  }
  provenance["quality_mode"] = q.mode;
  if (q.mode == "exact") {
    if (!out.ideal) {
      throw cd::ConfigError("exact mode needs --ideal");
    }
    out.rates = cd::exact_quality(pair, *out.ideal);
    return out;
  }
  if (q.mode != "sampled") {
    throw cd::ConfigError("unknown quality mode: " + q.mode);
  }
  provenance["sample_size"] = q.n;
  auto sample = cd::draw_quality_sample(pair, q.n, g.seed);
  std::unique_ptr<cd::Judge> judge;
  if (!q.judgements.empty()) {
    auto fj = cd::FileJudge::load(q.judgements, pop);
    provenance["judgements"] = q.judgements;
    provenance["judgements_skipped"] = fj.skipped();
    judge = std::make_unique<cd::FileJudge>(std::move(fj));
  } else if (out.ideal) {
    judge = std::make_unique<cd::IdealJudge>(*out.ideal);
  } else {
    write_manifest_file(q.manifest, pop, sample);
    throw JudgementsNeeded(q.manifest);
  }
  try {
    out.sampled = cd::estimate_quality_rates(sample, *judge, pop);
  } catch (const cd::UnjudgedPairError&) {
    write_manifest_file(q.manifest, pop, sample);
    throw JudgementsNeeded(q.manifest);
  }
  out.rates = out.sampled->rates;
  if (out.ideal) {
    auto iw = cd::ideal_weights(pop, *out.ideal);
    out.delta_recall = cd::estimate_delta_recall(cd::sample_delta_recall_pairs(pair, iw, q.n, g.seed), *judge, pop);
    out.rates.delta_recall = out.delta_recall->value;
  }
  return out;
}

cd::Json quality_json(const QualityOutcome& q, const cd::ImpactMetrics& impact) {
  cd::Json j;
  j["population"] = cd::to_json(q.rates);
  j["affected"] = impact.affected_weight_fraction > 0.0 ? cd::to_json(q.rates.to_affected(impact.affected_weight_fraction))
                                                        : cd::Json(nullptr);
  if (q.sampled) {
    cd::Json e;
    e["bad_split_rate"] = cd::to_json(q.sampled->bad_split);
    e["good_merge_rate"] = cd::to_json(q.sampled->good_merge);
    e["delta_precision"] = q.sampled->delta_precision ? cd::to_json(*q.sampled->delta_precision) : cd::Json(nullptr);
    e["delta_recall"] = q.delta_recall ? cd::to_json(*q.delta_recall) : cd::Json(nullptr);
    j["estimates"] = e;
  }
  return j;
}

cd::RecallPolicy make_policy(const ReasoningArgs& r) {
  if (r.policy == "fixed") {
    return cd::RecallPolicy::fixed(r.fixed_recall);
  }
  if (r.policy == "dampened") {
    return cd::RecallPolicy::dampened();
  }
  throw cd::ConfigError("unknown policy: " + r.policy);
}

cd::ClipPolicy make_clip(const ReasoningArgs& r) {
  if (r.clip == "clip") {
    return cd::ClipPolicy::clip;
  }
  if (r.clip == "abort") {
    return cd::ClipPolicy::abort;
  }
  throw cd::ConfigError("unknown clip policy: " + r.clip);
}

std::vector<cd::Variant> make_variants(const ReasoningArgs& r) {
  if (r.variant == "1") {
    return {cd::Variant::v1};
  }
  if (r.variant == "2") {
    return {cd::Variant::v2};
  }
  if (r.variant == "both") {
    return {cd::Variant::v1, cd::Variant::v2};
  }
  // auto: every variant the inputs allow.
  if (r.variant == "auto") {
    if (r.precision) {
      return {cd::Variant::v1, cd::Variant::v2};
    }
    return {cd::Variant::v1};
  }
  throw cd::ConfigError("variant must be 1, 2, both or auto");
}

void add_quality_options(CLI::App* app, QualityArgs& q) {
  app->add_option("--mode", q.mode, "exact (needs --ideal) or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  app->add_option("--ideal", q.ideal, "ideal clustering (exact rates, or oracle judge when sampled)");
  app->add_option("--judgements", q.judgements, "judgement TSV: item_a, item_b, 0|1");
  app->add_option("--manifest", q.manifest, "where to write the sample manifest when judgements are missing");
  app->add_option("--n", q.n, "pairs drawn per sample");
}

void add_reasoning_options(CLI::App* app, ReasoningArgs& r) {
  app->add_option("--variant", r.variant, "1, 2, both or auto (both when --precision is given, else 1)");
  app->add_option("--policy", r.policy, "dampened or fixed")->check(CLI::IsMember({"dampened", "fixed"}));
  app->add_option("--recall", r.fixed_recall, "assumed baseline recall for --policy fixed");
  app->add_option("--precision", r.precision, "assumed baseline precision of the affected items (variant 2)");
  app->add_option("--clip", r.clip, "clip or abort")->check(CLI::IsMember({"clip", "abort"}));
}

int run(int argc, char** argv) {
  CLI::App app{"Evaluate the difference between two clusterings"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (default: stdout)");
  auto* format_opt = app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string base_path;
  std::string exp_path;
  QualityArgs q;
  ReasoningArgs r;

  auto* impact = app.add_subcommand("impact", "exact impact metrics");
  impact->add_option("base", base_path)->required();
  impact->add_option("exp", exp_path)->required();

  auto* quality = app.add_subcommand("quality", "quality rates, exact or sampled");
  quality->add_option("base", base_path)->required();
  quality->add_option("exp", exp_path)->required();
  add_quality_options(quality, q);

  std::string curve_path;
  std::string heatmap_path;
  auto* delta = app.add_subcommand("delta-recall", "approximate ΔRecall of the change");
  delta->add_option("base", base_path)->required();
  delta->add_option("exp", exp_path)->required();
  add_quality_options(delta, q);
  add_reasoning_options(delta, r);
  delta->add_option("--curve", curve_path, "write the ΔRecall(T) curve CSV here");
  delta->add_option("--heatmap", heatmap_path, "write the variant-2 heatmap CSV here");

  bool approx_from_quality = false;
  auto* iq = app.add_subcommand("iq", "IQ of the change");
  iq->add_option("base", base_path)->required();
  iq->add_option("exp", exp_path)->required();
  add_quality_options(iq, q);
  add_reasoning_options(iq, r);
  iq->add_flag("--approx-from-quality", approx_from_quality, "also estimate IQ from the quality rates");

  cd::GeometrySpec geo;
  std::vector<double> x_range;
  std::vector<double> y_range;
  auto* geometry = app.add_subcommand("geometry", "grid of the planar IQ function");
  geometry->add_option("--d", geo.d, "distance from Base to Ideal");
  geometry->add_option("--grid", geo.resolution, "points per axis");
  geometry->add_option("--x-range", x_range, "x range: lo hi")->expected(2);
  geometry->add_option("--y-range", y_range, "y range: lo hi")->expected(2);

  std::string snapshot_path;
  std::string reference = "perfect_precision";
  bool allow_perfect_recall = false;
  auto* snapshot = app.add_subcommand("snapshot", "absolute quality of one clustering");
  snapshot->add_option("snapshot", snapshot_path)->required();
  add_quality_options(snapshot, q);
  snapshot->add_option("--reference", reference, "perfect_precision or perfect_recall")
      ->check(CLI::IsMember({"perfect_precision", "perfect_recall"}));
  snapshot->add_flag("--allow-perfect-recall", allow_perfect_recall, "run the PerfectRecall experiment anyway");

  std::string config_path;
  std::string study_csv;
  auto* simulate = app.add_subcommand("simulate", "synthetic validation study");
  simulate->add_option("config", config_path, "study config JSON (default study when omitted)");
  simulate->add_option("--study-csv", study_csv, "also write the per-change CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (impact->parsed()) {
    auto loaded = load_pair(base_path, exp_path, g);
    auto report = cd::make_report("impact");
    report["provenance"] = loaded.provenance;
    report["impact"] = cd::to_json(cd::compute_impact(loaded.pair));
    emit(g, report);
    return kExitOk;
  }

  if (quality->parsed()) {
    auto loaded = load_pair(base_path, exp_path, g);
    auto impact_m = cd::compute_impact(loaded.pair);
    auto outcome = obtain_quality(loaded.pair, q, g, loaded.provenance);
    auto report = cd::make_report("quality");
    report["provenance"] = loaded.provenance;
    report["impact"] = cd::to_json(impact_m);
    report["quality"] = quality_json(outcome, impact_m);
    emit(g, report);
    return kExitOk;
  }

  if (delta->parsed()) {
    auto loaded = load_pair(base_path, exp_path, g);
    auto impact_m = cd::compute_impact(loaded.pair);
    auto outcome = obtain_quality(loaded.pair, q, g, loaded.provenance);
    auto inputs = cd::DiagramInputs::from(impact_m, outcome.rates);
    auto policy = make_policy(r);
    auto clip = make_clip(r);
    auto variants = make_variants(r);
    loaded.provenance["policy"] = policy.name();
    loaded.provenance["assumed_recall_base"] = cd::assumed_recall(policy, inputs);
    loaded.provenance["clip"] = cd::to_string(clip);
    if (r.precision) {
      loaded.provenance["assumed_precision_base"] = *r.precision;
    }

    cd::Json points = cd::Json::array();
    std::vector<cd::Variant> computed;
    std::string why;
    for (auto v : variants) {
      if (v == cd::Variant::v2 && !r.precision) {
        if (variants.size() == 1) {
          throw cd::ConfigError("variant 2 needs --precision");
        }
        points.push_back({{"variant", 2}, {"unavailable", "no assumed precision (--precision)"}});
        continue;
      }
      try {
        points.push_back(cd::to_json(cd::delta_recall_point(inputs, v, policy, r.precision, clip)));
        computed.push_back(v);
      } catch (const cd::VariantInapplicableError& e) {
        if (variants.size() == 1) {
          throw;
        }
        why = e.what();
        points.push_back({{"variant", cd::to_int(v)}, {"unavailable", e.what()}});
      }
    }
    if (computed.empty()) {
      throw cd::VariantInapplicableError(why.empty() ? "no variant applies" : why);
    }
    cd::Json dr;
    dr["points"] = points;
    if (!curve_path.empty()) {
      auto v = computed.front();
      auto curve = cd::emit_recall_curve(inputs, v, v == cd::Variant::v2 ? r.precision : std::nullopt);
      write_file(curve_path, [&](std::ostream& out) { cd::write_curve_csv(out, curve); });
      dr["curve"] = {{"path", curve_path},
                     {"variant", cd::to_int(v)},
                     {"points", curve.points.size()},
                     {"domain_max", curve.domain_max},
                     {"clipped", curve.clipped}};
    }
    if (!heatmap_path.empty()) {
      auto map = cd::emit_recall_heatmap(inputs);
      write_file(heatmap_path, [&](std::ostream& out) { cd::write_heatmap_csv(out, map); });
      std::size_t feasible = 0;
      for (const auto& c : map.cells) {
        feasible += c.feasible ? 1 : 0;
      }
      dr["heatmap"] = {{"path", heatmap_path},
                       {"variant", 2},
                       {"precision_points", map.precision_points},
                       {"recall_points", map.recall_points},
                       {"feasible_cells", feasible},
                       {"precision_bounds", {map.precision_bounds.lower, map.precision_bounds.upper}}};
    }
    auto report = cd::make_report("delta-recall");
    report["provenance"] = loaded.provenance;
    report["impact"] = cd::to_json(impact_m);
    report["quality"] = quality_json(outcome, impact_m);
    report["delta_recall"] = dr;
    emit(g, report);
    return kExitOk;
  }

  if (iq->parsed()) {
    auto loaded = load_pair(base_path, exp_path, g);
    auto impact_m = cd::compute_impact(loaded.pair);
    auto report = cd::make_report("iq");
    cd::Json out;
    if (!approx_from_quality) {
      if (q.ideal.empty()) {
        throw cd::ConfigError("iq needs --ideal or --approx-from-quality");
      }
      loaded.provenance["ideal"] = q.ideal;
      out["exact"] = cd::to_json(cd::iq_exact(loaded.pair, load_ideal(q.ideal, loaded.pair.population())));
    } else {
      auto outcome = obtain_quality(loaded.pair, q, g, loaded.provenance);
      auto inputs = cd::DiagramInputs::from(impact_m, outcome.rates);
      auto variants = make_variants(r);
      auto policy = make_policy(r);
      // First variant that applies.
      std::optional<cd::DeltaRecallPoint> found;
      cd::Variant v = variants.front();
      for (std::size_t k = 0; k < variants.size() && !found; ++k) {
        v = variants[k];
        if (v == cd::Variant::v2 && !r.precision) {
          throw cd::ConfigError("variant 2 needs --precision");
        }
        try {
          found = cd::delta_recall_point(inputs, v, policy, r.precision, make_clip(r));
        } catch (const cd::VariantInapplicableError&) {
          if (k + 1 == variants.size()) {
            throw;
          }
        }
      }
      const auto& point = *found;
      loaded.provenance["policy"] = policy.name();
      loaded.provenance["variant"] = cd::to_int(v);
      loaded.provenance["assumed_recall_base"] = point.diagram.assumed_recall_base;
      if (outcome.ideal) {
        out["exact"] = cd::to_json(cd::iq_exact(loaded.pair, *outcome.ideal));
      }
      auto approx = cd::to_json(
          cd::iq_approx(point.diagram, impact_m.affected_weight_fraction, impact_m.jaccard_distance));
      approx["variant"] = cd::to_int(v);
      approx["policy"] = point.policy;
      approx["diagram_clipped"] = point.diagram.any_clipping();
      out["approx"] = approx;
    }
    report["provenance"] = loaded.provenance;
    report["impact"] = cd::to_json(impact_m);
    report["iq"] = out;
    emit(g, report);
    return kExitOk;
  }

  if (geometry->parsed()) {
    if (!x_range.empty()) {
      geo.x_min = x_range[0];
      geo.x_max = x_range[1];
    }
    if (!y_range.empty()) {
      geo.y_min = y_range[0];
      geo.y_max = y_range[1];
    }
    auto grid = cd::iq_geometry(geo);
    // Geometry is a table first: CSV unless JSON is asked for explicitly.
    if (format_opt->count() == 0 || g.format == "csv") {
      std::ostringstream s;
      cd::write_geometry_csv(s, grid);
      write_text(g, s.str());
      return kExitOk;
    }
    auto report = cd::make_report("geometry");
    report["d"] = geo.d;
    report["resolution"] = geo.resolution;
    cd::Json cells = cd::Json::array();
    for (const auto& c : grid) {
      cells.push_back({c.x, c.y, c.f ? cd::Json(*c.f) : cd::Json(nullptr)});
    }
    report["grid"] = cells;
    write_text(g, report.dump(2) + "\n");
    return kExitOk;
  }

  if (snapshot->parsed()) {
    auto lc = cd::load_clustering(snapshot_path);
    const auto& pop = lc.population;
    cd::Json prov;
    prov["snapshot"] = snapshot_path;
    prov["seed"] = g.seed;
    prov["quality_mode"] = q.mode;
    cd::SnapshotOptions opts;
    opts.mode = q.mode == "exact" ? cd::JudgeMode::exact : cd::JudgeMode::sampled;
    opts.n = q.n;
    opts.seed = g.seed;
    opts.reference = reference == "perfect_recall" ? cd::Reference::perfect_recall : cd::Reference::perfect_precision;
    opts.allow_perfect_recall = allow_perfect_recall;

    std::optional<cd::Clustering> ideal;
    if (!q.ideal.empty()) {
      ideal = load_ideal(q.ideal, pop);
      prov["ideal"] = q.ideal;
    }
    std::unique_ptr<cd::Judge> judge;
    if (opts.mode == cd::JudgeMode::exact) {
      if (!ideal) {
        throw cd::ConfigError("exact mode needs --ideal");
      }
      judge = std::make_unique<cd::IdealJudge>(*ideal);
    } else if (!q.judgements.empty()) {
      judge = std::make_unique<cd::FileJudge>(cd::FileJudge::load(q.judgements, pop));
      prov["judgements"] = q.judgements;
    } else if (ideal) {
      judge = std::make_unique<cd::IdealJudge>(*ideal);
    }
    auto needs_manifest = [&] {
      cd::ClusteringPair pair(pop, lc.clustering, cd::perfect_precision_clustering(pop));
      write_manifest_file(q.manifest, pop, cd::draw_quality_sample(pair, opts.n, opts.seed));
      return JudgementsNeeded(q.manifest);
    };
    if (!judge) {
      if (lc.clustering == cd::perfect_precision_clustering(pop)) {
        throw cd::ValidationError("snapshot equals PerfectPrecision");
      }
      throw needs_manifest();
    }
    cd::SnapshotQuality result;
    try {
      result = cd::snapshot_eval(pop, lc.clustering, *judge, opts);
    } catch (const cd::UnjudgedPairError&) {
      throw needs_manifest();
    }
    auto report = cd::make_report("snapshot");
    report["provenance"] = prov;
    report["snapshot"] = cd::to_json(result);
    emit(g, report);
    return kExitOk;
  }

  if (simulate->parsed()) {
    cd::StudyConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        throw cd::ValidationError("cannot open config: " + config_path);
      }
      cd::Json j;
      try {
        j = cd::Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw cd::ConfigError(std::string("invalid JSON config: ") + e.what());
      }
      cfg = cd::parse_study_config(j);
    }
    auto study = cd::validation_study(cfg.family, cfg.world, cfg.options);
    if (!study_csv.empty()) {
      write_file(study_csv, [&](std::ostream& out) { cd::write_study_csv(out, study); });
    }
    if (g.format == "csv") {
      std::ostringstream s;
      cd::write_study_csv(s, study);
      write_text(g, s.str());
      return kExitOk;
    }
    auto report = cd::make_report("simulate");
    cd::Json prov;
    prov["config"] = config_path.empty() ? cd::Json(nullptr) : cd::Json(config_path);
    prov["world_seed"] = cfg.world.seed;
    prov["study_csv"] = study_csv.empty() ? cd::Json(nullptr) : cd::Json(study_csv);
    report["provenance"] = prov;
    report["study"] = cd::to_json(study);
    emit(g, report);
    return kExitOk;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const JudgementsNeeded& e) {
    std::cerr << "clusterdiff: " << e.what() << '\n';
    return kExitJudgements;
  } catch (const cd::UnjudgedPairError& e) {
    std::cerr << "clusterdiff: " << e.what() << '\n';
    return kExitJudgements;
  } catch (const cd::InfeasibleParameterError& e) {
    std::cerr << "clusterdiff: reasoning infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const cd::VariantInapplicableError& e) {
    std::cerr << "clusterdiff: variant inapplicable: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const cd::Error& e) {
    std::cerr << "clusterdiff: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "clusterdiff: " << e.what() << '\n';
    return kExitInput;
  }
}
