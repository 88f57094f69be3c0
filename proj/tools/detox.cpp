#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <detox/detox.hpp>

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

unsigned env_jobs() {
  const char* v = std::getenv("DETOX_JOBS");
  if (!v) return 1;
  long n = std::strtol(v, nullptr, 10);
  return n >= 1 ? static_cast<unsigned>(n) : 1;
}

ordered_json counts_json(const detox::PredictedCounts& c) {
  ordered_json j;
  j["sdc"] = c.sdc;
  j["detected"] = c.detected;
  j["benign"] = c.benign;
  j["trap"] = c.trap;
  j["timeout"] = c.timeout;
  return j;
}

ordered_json prediction_json(const std::string& config, const detox::PredictedCounts& c) {
  ordered_json j;
  j["config"] = config;
  j["counts"] = counts_json(c);
  j["runtime"] = c.runtime;
  j["area"] = c.area;
  return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

void print_counts_row(const std::string& config, const detox::PredictedCounts& c) {
  std::cout << std::left << std::setw(std::max<size_t>(8, config.size() + 2)) << config
            << std::right << std::setw(8) << c.sdc << std::setw(10) << c.detected
            << std::setw(8) << c.benign << std::setw(7) << c.trap << std::setw(9) << c.timeout
            << std::setw(9) << c.runtime << std::setw(9) << c.area << "\n";
}

void print_counts_header(size_t config_width) {
  std::cout << std::left << std::setw(std::max<size_t>(8, config_width + 2)) << "config"
            << std::right << std::setw(8) << "sdc" << std::setw(10) << "detected"
            << std::setw(8) << "benign" << std::setw(7) << "trap" << std::setw(9) << "timeout"
            << std::setw(9) << "runtime" << std::setw(9) << "area" << "\n";
}

int exit_code = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic single-bit-flip lab for assertion configurations"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "human-readable output instead of JSON");

  std::string workload, results, config_str, out_path, method = "exhaustive";
  double timeout_factor = 10.0;
  unsigned jobs = env_jobs();
  bool all_configs = false;
  size_t max_n = 20;
  uint64_t seed = 1;
  uint32_t population = 32, generations = 100;

  auto* golden_cmd = app.add_subcommand("golden", "fault-free run summary");
  golden_cmd->add_option("workload", workload)->required();

  auto* campaign_cmd = app.add_subcommand("campaign", "run the discovery campaign");
  campaign_cmd->add_option("workload", workload)->required();
  campaign_cmd->add_option("-o,--output", out_path, "result file (JSON lines)")->required();
  campaign_cmd->add_option("--timeout-factor", timeout_factor);
  campaign_cmd->add_option("-j,--jobs", jobs);

  auto* predict_cmd = app.add_subcommand("predict", "predict counts from a result file");
  predict_cmd->add_option("results", results)->required();
  auto* cfg_opt = predict_cmd->add_option("--config", config_str, "assertion bit string");
  predict_cmd->add_flag("--all", all_configs, "every configuration")->excludes(cfg_opt);
  predict_cmd->add_option("--max-n", max_n);

  auto* oracle_cmd = app.add_subcommand("oracle", "measure ground truth for one configuration");
  oracle_cmd->add_option("workload", workload)->required();
  oracle_cmd->add_option("--config", config_str)->required();
  oracle_cmd->add_option("--timeout-factor", timeout_factor);
  oracle_cmd->add_option("-j,--jobs", jobs);

  auto* verify_cmd = app.add_subcommand("verify", "compare prediction against ground truth");
  verify_cmd->add_option("workload", workload)->required();
  verify_cmd->add_option("--max-n", max_n);
  verify_cmd->add_option("--timeout-factor", timeout_factor);
  verify_cmd->add_option("-j,--jobs", jobs);

  auto* search_cmd = app.add_subcommand("search", "find a minimum-SDC configuration");
  search_cmd->add_option("results", results)->required();
  search_cmd->add_option("--method", method)
      ->check(CLI::IsMember({"exhaustive", "greedy", "ga"}));
  search_cmd->add_option("--seed", seed);
  search_cmd->add_option("--population", population);
  search_cmd->add_option("--generations", generations);
  search_cmd->add_option("--max-n", max_n);

  auto* render_cmd = app.add_subcommand("render", "fault-space diagram as SVG");
  render_cmd->add_option("results", results)->required();
  render_cmd->add_option("--config", config_str)->required();
  render_cmd->add_option("-o,--output", out_path)->required();

  try {
    app.parse(argc, argv);

    if (golden_cmd->parsed()) {
      detox::Program p = detox::parse(read_file(workload));
      detox::GoldenTrace golden = detox::golden_run(p);
      if (pretty) {
        std::cout << "digest         " << p.source_digest << "\n"
                  << "T              " << golden.total_steps << "\n"
                  << "workload steps " << golden.workload_steps << "\n"
                  << "total bits     " << golden.memory.total_bits << "\n";
        for (const detox::AssertionWindow& w : golden.windows)
          std::cout << "window         " << p.assertions[w.assertion].id << "#" << w.instance
                    << " [" << w.t_start << "," << w.t_end << ")\n";
      } else {
        ordered_json j;
        j["program_digest"] = p.source_digest;
        j["T"] = golden.total_steps;
        j["workload_steps"] = golden.workload_steps;
        j["total_bits"] = golden.memory.total_bits;
        j["outputs"] = golden.outputs;
        auto ja = ordered_json::array();
        for (const detox::AssertionInfo& a : detox::list_assertions(p)) {
          ordered_json w;
          w["index"] = a.index;
          w["id"] = a.id;
          auto windows = ordered_json::array();
          for (const detox::AssertionWindow& win : golden.windows)
            if (win.assertion == a.index) windows.push_back({win.t_start, win.t_end});
          w["windows"] = std::move(windows);
          ja.push_back(std::move(w));
        }
        j["assertions"] = std::move(ja);
        emit(j);
      }
    } else if (campaign_cmd->parsed()) {
      detox::Program p = detox::parse(read_file(workload));
      detox::CampaignOptions opts;
      opts.timeout_factor = timeout_factor;
      opts.jobs = jobs;
      detox::CampaignResult c = detox::run_discovery(p, opts);
      detox::save_campaign(c, out_path);
      size_t experiments = 0;
      for (const detox::FaultRecord& r : c.records)
        experiments += r.origin == detox::FaultClassKind::Experiment;
      if (pretty) {
        std::cout << "wrote " << out_path << ": " << c.records.size() << " records ("
                  << experiments << " experiments) over " << c.total_steps << "x"
                  << c.total_bits << " cells\n";
      } else {
        ordered_json j;
        j["output"] = out_path;
        j["program_digest"] = c.program_digest;
        j["T"] = c.total_steps;
        j["total_bits"] = c.total_bits;
        j["records"] = c.records.size();
        j["experiments"] = experiments;
        emit(j);
      }
    } else if (predict_cmd->parsed()) {
      detox::CampaignResult c = detox::load_campaign(results);
      if (all_configs) {
        auto table = detox::predict_all(c, max_n);
        if (pretty) {
          print_counts_header(c.assertions.size());
          for (const auto& [cfg, counts] : table) print_counts_row(cfg, counts);
        } else {
          auto ja = ordered_json::array();
          for (const auto& [cfg, counts] : table) ja.push_back(prediction_json(cfg, counts));
          ordered_json j;
          j["configs"] = std::move(ja);
          emit(j);
        }
      } else {
        if (config_str.empty())
          throw std::invalid_argument("predict needs --config <bits> or --all");
        detox::Configuration cfg = detox::Configuration::from_string(config_str);
        detox::PredictedCounts counts = detox::predict(c, cfg);
        if (pretty) {
          print_counts_header(config_str.size());
          print_counts_row(config_str, counts);
        } else {
          emit(prediction_json(config_str, counts));
        }
      }
    } else if (oracle_cmd->parsed()) {
      detox::Program p = detox::parse(read_file(workload));
      detox::Configuration cfg = detox::Configuration::from_string(config_str);
      detox::CampaignOptions opts;
      opts.timeout_factor = timeout_factor;
      opts.jobs = jobs;
      detox::TrueCounts counts = detox::ground_truth(p, cfg, opts);
      if (pretty) {
        print_counts_header(config_str.size());
        print_counts_row(config_str, counts);
      } else {
        ordered_json j;
        j["source"] = "oracle";
        ordered_json body = prediction_json(config_str, counts);
        j.update(body);
        emit(j);
      }
    } else if (verify_cmd->parsed()) {
      detox::Program p = detox::parse(read_file(workload));
      size_t n = p.assertions.size();
      if (n > max_n)
        throw std::invalid_argument("workload has " + std::to_string(n) +
                                    " assertions, threshold is " + std::to_string(max_n));
      detox::CampaignOptions opts;
      opts.timeout_factor = timeout_factor;
      opts.jobs = jobs;
      detox::CampaignResult campaign = detox::run_discovery(p, opts);
      size_t exact = 0;
      auto mismatches = ordered_json::array();
      for (uint64_t k = 0; k < (1ull << n); ++k) {
        detox::Configuration cfg = detox::Configuration::from_index(k, n);
        detox::PredictedCounts predicted = detox::predict(campaign, cfg);
        detox::TrueCounts actual = detox::ground_truth(p, cfg, opts);
        if (predicted == actual) {
          ++exact;
        } else {
          ordered_json m;
          m["config"] = cfg.to_string();
          m["predicted"] = prediction_json(cfg.to_string(), predicted);
          m["actual"] = prediction_json(cfg.to_string(), actual);
          mismatches.push_back(std::move(m));
        }
      }
      uint64_t total = 1ull << n;
      if (pretty) {
        std::cout << exact << "/" << total << " configurations exact\n";
        for (const auto& m : mismatches)
          std::cout << "mismatch at " << m["config"].get<std::string>() << "\n";
      } else {
        ordered_json j;
        j["program_digest"] = p.source_digest;
        j["configurations"] = total;
        j["exact"] = exact;
        j["mismatches"] = std::move(mismatches);
        emit(j);
      }
      if (exact != total) exit_code = 1;
    } else if (search_cmd->parsed()) {
      detox::CampaignResult c = detox::load_campaign(results);
      detox::SearchOutcome outcome;
      if (method == "exhaustive") {
        outcome = detox::exhaustive_search(c, max_n);
      } else if (method == "greedy") {
        outcome = detox::greedy_search(c);
      } else {
        detox::GaParams params;
        params.population = population;
        params.generations = generations;
        params.seed = seed;
        outcome = detox::ga_search(c, params);
      }
      if (pretty) {
        std::cout << detox::search_method_name(outcome.method) << " best "
                  << outcome.best.to_string() << " after " << outcome.evaluations
                  << " evaluations\n";
        print_counts_header(outcome.best.size());
        print_counts_row(outcome.best.to_string(), outcome.best_counts);
      } else {
        ordered_json j;
        j["method"] = detox::search_method_name(outcome.method);
        j["best_config"] = outcome.best.to_string();
        j["counts"] = counts_json(outcome.best_counts);
        j["runtime"] = outcome.best_counts.runtime;
        j["area"] = outcome.best_counts.area;
        j["evaluations"] = outcome.evaluations;
        if (method == "ga") j["seed"] = seed;
        emit(j);
      }
    } else if (render_cmd->parsed()) {
      detox::CampaignResult c = detox::load_campaign(results);
      detox::Configuration cfg = detox::Configuration::from_string(config_str);
      std::string svg = detox::render_svg(c, cfg);
      std::ofstream os(out_path, std::ios::binary);
      if (!os) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
      os << svg;
      if (!os) throw std::invalid_argument("write to '" + out_path + "' failed");
      if (pretty) {
        std::cout << "wrote " << out_path << " for config " << config_str << "\n";
      } else {
        ordered_json j;
        j["output"] = out_path;
        j["config"] = config_str;
        emit(j);
      }
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const detox::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const detox::CampaignIoError& e) {
    std::cerr << "result file error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const detox::GoldenRunError& e) {
    std::cerr << "golden run failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
