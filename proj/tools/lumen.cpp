// lumen: low-light image enhancement and quality metrics on PGM/PPM files.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lumen/cli.hpp"

namespace {

using lumen::Metric;
using lumen::cli::RunConfig;

struct MetricFlag {
  const char* flag;
  Metric metric;
  const char* help;
};

constexpr MetricFlag kMetricFlags[] = {
    {"--ssim", Metric::Ssim, "SSIM of two P5 images"},
    {"--entropy", Metric::Entropy, "Shannon entropy (bits) of a P5 image"},
    {"--normalized-entropy", Metric::NormalizedEntropy, "entropy(treated)/entropy(original): ORIGINAL TREATED"},
    {"--weber-contrast", Metric::WeberContrast, "(Lmax-Lmin)/Lmin of a P5 image"},
    {"--colorfulness", Metric::Colorfulness, "opponent-channel colorfulness of a P6 image"},
    {"--cef", Metric::Cef, "colorfulness enhancement factor: ORIGINAL ENHANCED"},
    {"--jpqm", Metric::Jpqm, "no-reference JPEG quality score of a P5/P6 image"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-light image enhancement (morphological/Weber and block-DCT) with quality metrics"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string input;
  std::string output;

  auto* gray = app.add_subcommand("enhance-gray", "Enhance a P5 image with a background-driven log map");
  gray->add_option("--method", cfg.method, "blocks|eroded|reconstruction")->required();
  gray->add_option("--mu", cfg.mu, "structuring element scale (window 2mu+1)")->expected(1);
  gray->add_option("--block", cfg.blocks, "block size WxH for the blocks method")->expected(1);
  gray->add_option("--emit-background", cfg.emit_background, "also write the background map (P5)");
  gray->add_option("input", input, "input P5 file")->required();
  gray->add_option("output", output, "output P5 file")->required();

  auto* color = app.add_subcommand("enhance-color", "Enhance a P6 image by scaling 8x8 DCT coefficients");
  color->add_option("--map", cfg.mapping, "twisting|eta[:exponent]|s")->capture_default_str();
  color->add_option("--mode", cfg.mode, "dc|dc-ac|dc-ac-chroma")->capture_default_str();
  color->add_option("input", input, "input P6 file")->required();
  color->add_option("output", output, "output P6 file")->required();

  auto* metrics = app.add_subcommand("metrics", "Print quality metrics as name,value rows");
  std::map<CLI::Option*, Metric> metric_options;
  for (const auto& m : kMetricFlags) {
    auto* opt = metrics->add_option(m.flag, m.help)
                    ->expected(static_cast<int>(lumen::cli::metric_arity(m.metric)))
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    metric_options.emplace(opt, m.metric);
  }

  auto* sweep = app.add_subcommand("sweep", "Run a method or mapping grid and emit a comparison table");
  sweep->add_option("kind", cfg.sweep_kind, "gray|color")->required();
  sweep->add_option("input", input, "input P5 (gray) or P6 (color) file")->required();
  sweep->add_option("--methods", cfg.methods, "comma-separated gray methods")->delimiter(',');
  sweep->add_option("--mu", cfg.mu, "comma-separated scales")->delimiter(',');
  sweep->add_option("--block", cfg.blocks, "comma-separated block sizes WxH")->delimiter(',');
  sweep->add_option("--maps", cfg.mappings, "comma-separated mappings")->delimiter(',');
  sweep->add_option("--modes", cfg.modes, "comma-separated modes")->delimiter(',');
  sweep->add_option("--out-dir", cfg.out_dir, "directory for per-cell images")->capture_default_str();
  sweep->add_option("--table", cfg.table, "also write the table to this file");
  sweep->add_option("--format", cfg.format, "csv|markdown")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lumen::cli::kExitParam;
  }

  if (!input.empty()) cfg.inputs.emplace_back(input);
  if (!output.empty()) cfg.output = output;

  if (gray->parsed()) return lumen::cli::cmd_enhance_gray(cfg, std::cout, std::cerr);
  if (color->parsed()) return lumen::cli::cmd_enhance_color(cfg, std::cout, std::cerr);
  if (sweep->parsed()) return lumen::cli::cmd_sweep(cfg, std::cout, std::cerr);

  // Rows follow the order the flags were given in.
  std::map<CLI::Option*, std::size_t> consumed;
  for (auto* opt : metrics->parse_order()) {
    const auto it = metric_options.find(opt);
    if (it == metric_options.end()) continue;
    const auto arity = lumen::cli::metric_arity(it->second);
    const auto& results = opt->results();
    auto& at = consumed[opt];
    if (at + arity > results.size()) continue;
    lumen::cli::MetricRequest req{it->second, {}};
    for (std::size_t i = 0; i < arity; ++i) req.inputs.emplace_back(results[at + i]);
    at += arity;
    cfg.metrics.push_back(std::move(req));
  }
  return lumen::cli::cmd_metrics(cfg, std::cout, std::cerr);
}
