#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "medjargon/errors.hpp"
#include "medjargon/gateway.hpp"
#include "medjargon/orchestrator.hpp"

namespace {

int dispatch(const std::string& command, const std::string& config_path,
             const std::string& run_dir, const std::string& format_name,
             const medjargon::CompareRequest& compare) {
  using namespace medjargon;
  if (command == "evaluate") {
    const EvaluateConfig cfg = load_evaluate_config(config_path);
    const RunReport report = run_evaluate(cfg, make_http_transport());
    std::fputs(render_report_table(report, TableFormat::Markdown).c_str(), stdout);
    std::fprintf(stdout, "run written to %s\n", cfg.output_dir.c_str());
    return 0;
  }
  if (command == "augment") {
    const AugmentConfig cfg = load_augment_config(config_path);
    const AugmentOutcome outcome = run_augment(cfg, make_http_transport());
    std::fprintf(stdout, "accepted %zu records (%zu parse failures)\n", outcome.accepted,
                 outcome.parse_failed);
    for (const auto& path : outcome.training_files) {
      std::fprintf(stdout, "wrote %s\n", path.c_str());
    }
    std::fprintf(stdout, "wrote %s\n", outcome.config_file.c_str());
    return 0;
  }
  if (command == "report") {
    const TableFormat format =
        format_name == "csv" ? TableFormat::Csv : TableFormat::Markdown;
    std::fputs(run_report(run_dir, format).c_str(), stdout);
    return 0;
  }
  // compare
  const CompareResult result = run_compare(compare);
  std::fprintf(stdout, "%s\n", result.line.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medical jargon extraction benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_dir;
  std::string format_name = "md";
  medjargon::CompareRequest compare;
  std::string cell_spec;

  CLI::App* evaluate = app.add_subcommand("evaluate", "run the prompt/model grid");
  evaluate->add_option("--config", config_path, "evaluation config json")->required();

  CLI::App* augment = app.add_subcommand("augment", "distill training sets from a teacher");
  augment->add_option("--config", config_path, "augmentation config json")->required();

  CLI::App* report = app.add_subcommand("report", "re-render tables for a finished run");
  report->add_option("--run", run_dir, "run output directory")->required();
  report->add_option("--format", format_name, "md or csv")
      ->check(CLI::IsMember({"md", "csv"}));

  CLI::App* cmp = app.add_subcommand("compare", "paired significance test between two runs");
  cmp->add_option("--a", compare.run_a, "first run directory")->required();
  cmp->add_option("--b", compare.run_b, "second run directory")->required();
  cmp->add_option("--metric", compare.metric, "f1 or mrr")->required();
  cmp->add_option("--cell", cell_spec, "grid cell as STYLE,SHOTS,K")->required();
  cmp->add_option("--model", compare.model, "model name when a run holds several");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmp->parsed()) medjargon::parse_cell_spec(cell_spec, compare);
    const std::string command = evaluate->parsed()  ? "evaluate"
                                : augment->parsed() ? "augment"
                                : report->parsed()  ? "report"
                                                    : "compare";
    return dispatch(command, config_path, run_dir, format_name, compare);
  } catch (const medjargon::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return medjargon::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
