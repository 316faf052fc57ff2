// Command-line front end. Every subcommand takes --config <file.json>.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "hbc/config.hpp"
#include "hbc/errors.hpp"
#include "hbc/report.hpp"
#include "hbc/session_io.hpp"
#include "hbc/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const hbc::RunConfig& cfg) {
  if (const char* env = std::getenv("HBC_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

void write_json(const fs::path& p, const json& j) { hbc::write_file_atomic(p, j.dump(2) + "\n"); }

void write_provenance(const fs::path& dir, const hbc::RunConfig& cfg, const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  write_json(dir / "provenance.json", {{"command", command},
                                       {"config_hash", cfg.hash},
                                       {"seed", cfg.seed},
                                       {"version", hbc::kVersion},
                                       {"timestamp", stamp},
                                       {"config", cfg.raw}});
}

struct Built {
  hbc::Dataset data;
  std::vector<std::string> class_names;
  std::vector<std::string> notes;
};

// Rows for classification. Collaboration data goes through the class
// mapping; pairwise mode fuses both users of every pair.
Built build(const hbc::RunConfig& cfg, const std::vector<hbc::Session>& sessions, bool pairwise) {
  Built b;
  if (cfg.label_set != hbc::LabelSetId::kCollab) {
    if (pairwise) throw hbc::ConfigError("pair-eval needs collaboration data", "data");
    b.data = hbc::build_dataset(sessions, cfg.featurize);
    b.class_names = hbc::label_set(cfg.label_set).class_names;
    return b;
  }
  if (pairwise && cfg.pairwise.mode == hbc::MappingMode::kPairwise) {
    const auto mapping = hbc::pairwise_mapping(cfg.pairwise.hard_lift_drop);
    std::vector<hbc::SessionPair> pairs;
    if (cfg.pairwise.pairs) {
      pairs = hbc::pairs_from_json(json::parse(hbc::read_file(*cfg.pairwise.pairs)));
    } else {
      pairs = hbc::enumerate_pairs(sessions);
      b.notes.push_back("pairs: all unordered pairs of users per group session");
    }
    b.data = hbc::build_pair_dataset(sessions, pairs, cfg.featurize, mapping);
    b.class_names = mapping.target.class_names;
    return b;
  }
  const auto mapping = hbc::single_user_mapping(cfg.pairwise.hard_lift_drop);
  b.data = hbc::build_dataset(sessions, cfg.featurize, &mapping);
  b.class_names = mapping.target.class_names;
  return b;
}

int run(const std::string& command, const fs::path& config_path, bool grid) {
  const hbc::RunConfig cfg = hbc::load_run_config(config_path);
  const fs::path out = output_dir(cfg);
  fs::create_directories(out);

  if (command == "report") {
    if (cfg.report_inputs.empty()) throw hbc::ConfigError("report needs report.inputs", "report.inputs");
    json written = json::array();
    for (const auto& in : cfg.report_inputs) {
      const json j = json::parse(hbc::read_file(in));
      const fs::path target = out / (in.stem().string() + ".svg");
      if (j.value("kind", "") == "count_report")
        hbc::write_file_atomic(target, hbc::render_count_box_svg(j));
      else
        hbc::write_file_atomic(target, hbc::render_confusion_svg(hbc::EvalReport::from_json(j)));
      written.push_back(target.string());
    }
    write_provenance(out, cfg, command);
    std::cout << json{{"written", written}}.dump() << "\n";
    return 0;
  }

  if (command == "simulate" && !cfg.data.simulate)
    throw hbc::ConfigError("simulate needs data.simulate", "data.simulate");
  const std::vector<hbc::Session> sessions = hbc::load_sessions(cfg);

  json summary;
  if (command == "simulate") {
    fs::create_directories(out / "sessions");
    json index = json::array();
    for (const auto& s : sessions) {
      const fs::path p = out / "sessions" / (s.id + ".csv");
      hbc::save_session(s, p);
      index.push_back({{"id", s.id}, {"path", fs::relative(p, out).string()}});
    }
    write_json(out / "sessions.json", index);
    if (cfg.label_set == hbc::LabelSetId::kCollab) write_json(out / "pairs.json", hbc::pairs_to_json(hbc::enumerate_pairs(sessions)));
    summary = {{"sessions", sessions.size()}};
  } else if (command == "preprocess") {
    fs::create_directories(out / "preprocessed");
    for (const auto& s : sessions)
      hbc::save_session(hbc::preprocess_session(s, cfg.featurize.preprocess), out / "preprocessed" / (s.id + ".csv"));
    summary = {{"sessions", sessions.size()}};
  } else if (command == "count") {
    hbc::CountReport rep;
    rep.config = cfg.counting;
    for (const auto& s : sessions) {
      const hbc::Session p = hbc::preprocess_session(s, cfg.featurize.preprocess);
      for (auto& c : hbc::count_session(p, cfg.counting)) rep.segments.push_back(std::move(c));
    }
    json j = rep.to_json();
    j["config_hash"] = cfg.hash;
    j["seed"] = cfg.seed;
    write_json(out / "count_report.json", j);
    summary = {{"segments", rep.segments.size()}, {"overall", j["overall"]}};
  } else {
    const bool pairwise = command == "pair-eval";
    Built b = build(cfg, sessions, pairwise);
    hbc::HarnessConfig h = cfg.harness;
    h.class_names = b.class_names;
    if (command == "featurize") {
      hbc::write_file_atomic(out / "features.csv", hbc::dataset_to_csv(b.data, b.class_names));
      write_json(out / "feature_manifest.json", b.data.manifest->to_json());
      summary = {{"rows", b.data.size()}, {"features", b.data.manifest->size()}};
    } else if (command == "train" && grid) {
      const auto points = hbc::forest_grid_search(b.data, h, cfg.grid.n_trees, cfg.grid.max_depth);
      json arr = json::array();
      for (const auto& g : points)
        arr.push_back({{"n_trees", g.n_trees},
                       {"max_depth", g.max_depth},
                       {"hamming_loss", g.hamming_loss},
                       {"macro_f", g.macro_f},
                       {"accuracy", g.accuracy}});
      write_json(out / "grid.json", {{"scheme", hbc::to_string(h.scheme.kind)},
                                     {"config_hash", cfg.hash},
                                     {"seed", cfg.seed},
                                     {"points", arr}});
      summary = {{"points", arr.size()}};
    } else if (command == "train") {
      const auto fp = hbc::fit_pipeline(b.data, h);
      json j = fp.to_json();
      j["class_names"] = b.class_names;
      j["feature_manifest"] = b.data.manifest->to_json();
      write_json(out / "model.json", j);
      summary = {{"rows", b.data.size()}, {"classes", fp.model.n_classes()}};
    } else {  // evaluate, pair-eval
      if (h.title.empty()) h.title = std::string(hbc::to_string(cfg.label_set)) + " " + command;
      hbc::EvalReport rep = hbc::cross_validate(b.data, h);
      for (auto& n : b.notes) rep.notes.push_back(n);
      write_json(out / "eval_report.json", rep.to_json());
      hbc::write_file_atomic(out / "confusion.csv", rep.confusion_csv());
      summary = {{"folds", rep.folds.size()}, {"macro_f", rep.pooled_macro_f()}};
    }
  }
  write_provenance(out, cfg, command);
  summary["output_dir"] = out.string();
  std::cout << summary.dump() << "\n";
  return 0;
}

int fail(int code, const std::string& kind, const std::string& message, const std::string& key = "") {
  json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Body-capacitance activity recognition toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hbc::kVersion);
  fs::path config;
  bool grid = false;
  for (const char* name : {"simulate", "preprocess", "featurize", "train", "evaluate", "count", "pair-eval", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config, "run configuration (JSON)")->required();
    if (std::string(name) == "train") sub->add_flag("--grid", grid, "sweep n_trees x max_depth instead of fitting");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(2, "usage", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config, grid);
  } catch (const hbc::ConfigError& e) {
    return fail(2, "config", e.what(), e.key());
  } catch (const hbc::ParseError& e) {
    return fail(3, "data", e.what());
  } catch (const hbc::FormatError& e) {
    return fail(3, "data", e.what());
  } catch (const hbc::ValidationError& e) {
    return fail(3, "data", e.what());
  } catch (const hbc::SchemaError& e) {
    return fail(3, "data", e.what());
  } catch (const hbc::DomainError& e) {
    return fail(4, "numerical", e.what());
  } catch (const hbc::TrainingError& e) {
    return fail(4, "numerical", e.what());
  } catch (const json::exception& e) {
    return fail(3, "data", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
}
