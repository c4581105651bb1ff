#include "condbb/cli/app.hpp"
#include "condbb/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using condbb::cli::Json;

Json read_json(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw condbb::InvalidArgument("cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw condbb::InvalidArgument("'" + (path.empty() ? std::string("-") : path) + "' is not valid JSON: " + e.what());
  }
}

void write_json(const Json& j, const std::string& path) {
  const auto text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw condbb::InvalidArgument("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional expectations, Lyapunov partitions and bang-bang selections on discretized spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", condbb::cli::version);

  condbb::cli::Options options;
  std::string input, output, report;
  std::string tolerance, mode;
  std::string target;
  std::size_t cells = 6;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", input, "problem document (default stdin)");
    sub->add_option("-o,--output", output, "where to write the result (default stdout)");
    sub->add_option("--mode", mode, "splittable or atomic, overriding the document")
        ->check(CLI::IsMember({"splittable", "atomic"}));
    sub->add_option("--seed", options.seed, "seed for randomized helpers");
  };

  for (const auto& name : condbb::cli::command_names()) {
    auto* sub = app.add_subcommand(name, "run " + name);
    common(sub);
    sub->add_option("--tol", tolerance, "tolerance for float arithmetic (default 1e-9)");
    sub->add_flag("--exact", options.exact, "exact rational arithmetic");
    sub->add_flag("--diagonal-only", options.diagonal_only, "match only the diagonal moments in bang-bang");
    sub->add_flag("--timing", options.timing, "add wall_time_ms to the report");
  }
  auto* verify = app.add_subcommand("verify", "recompute every claim of a report");
  common(verify);
  verify->add_option("-r,--report", report, "report to check")->required();
  auto* generate = app.add_subcommand("generate", "write a random problem document");
  common(generate);
  generate->add_option("--for", target, "command the problem is for (or partition-multi)")->required();
  generate->add_option("--cells", cells, "number of cells")->check(CLI::Range(1, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (!tolerance.empty()) options.tolerance = tolerance;
    if (!mode.empty()) options.mode = mode;
    if (sub == verify) {
      condbb::cli::verify(read_json(input), read_json(report));
      write_json(Json{{"verified", true}}, output);
    } else if (sub == generate) {
      const auto space = mode.empty() ? condbb::SpaceMode::Splittable : condbb::parse_space_mode(mode);
      write_json(condbb::cli::generate(target, options.seed, cells, space), output);
    } else {
      options.command = sub->get_name();
      write_json(condbb::cli::run(options, read_json(input)), output);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << condbb::cli::error_json(e).dump(2) << "\n";
    return condbb::cli::exit_code(e);
  }
}
