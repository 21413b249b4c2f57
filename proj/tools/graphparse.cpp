// Command-line front end: validate models, scan input into lexical graphs
// and parse it into ranked syntax graphs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "graphparse/error.hpp"
#include "graphparse/export.hpp"
#include "graphparse/pipeline.hpp"

namespace gp = graphparse;

namespace {

// Exit statuses.
constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageError = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string read_input(const std::string& input) {
  if (input != "-") return input;
  std::ostringstream buffer;
  buffer << std::cin.rdbuf();
  return buffer.str();
}

gp::Registry make_registry() {
  gp::Registry registry = gp::Registry::with_builtins();
  if (const char* manifest = std::getenv("GRAPHPARSE_REGISTRY"); manifest && *manifest) {
    registry.load_manifest(read_file(manifest));
  }
  return registry;
}

// Diagnostics for names the registry does not know.
std::vector<gp::Diagnostic> registry_diagnostics(const gp::LanguageModel& model, const gp::Registry& registry) {
  std::vector<gp::Diagnostic> out;
  for (const auto& e : model.elements) {
    const std::string path = "/elements/" + e.name;
    for (const auto& c : e.constraints) {
      if (!c.name.empty() && registry.constraint(c.name) == nullptr) {
        out.push_back({gp::Severity::error, path + "/constraints", "unregistered constraint '" + c.name + "'"});
      }
    }
    if (e.probability.mode == gp::ProbabilityMode::evaluator && e.probability.evaluator &&
        registry.evaluator(*e.probability.evaluator) == nullptr) {
      out.push_back({gp::Severity::error, path + "/probability/evaluator",
                     "unregistered evaluator '" + *e.probability.evaluator + "'"});
    }
    if (e.pattern && e.pattern->strategy == gp::PatternStrategy::heuristic && e.pattern->heuristic_name &&
        registry.heuristic(*e.pattern->heuristic_name) == nullptr) {
      out.push_back({gp::Severity::error, path + "/pattern/heuristicName",
                     "unregistered heuristic '" + *e.pattern->heuristic_name + "'"});
    }
  }
  return out;
}

void print_diagnostics(const std::vector<gp::Diagnostic>& diagnostics, std::ostream& out) {
  for (const auto& d : diagnostics) out << gp::to_string(d.severity) << " " << d.path << ": " << d.message << "\n";
}

int cmd_validate(const std::string& model_path) {
  gp::LanguageModel model;
  try {
    model = gp::load_model(read_file(model_path));
  } catch (const gp::ModelLoadError& e) {
    std::cout << "ERROR " << e.location() << ": " << e.what() << "\n";
    return kDomainFailure;
  }
  auto diagnostics = gp::validate_model(model);
  for (auto& d : registry_diagnostics(model, make_registry())) diagnostics.push_back(std::move(d));
  print_diagnostics(diagnostics, std::cout);
  return gp::has_errors(diagnostics) ? kDomainFailure : kOk;
}

gp::Pipeline load_pipeline(const std::string& model_path, const std::string& lexicon_path) {
  gp::LanguageModel model = gp::load_model(read_file(model_path));
  gp::Lexicon lexicon = gp::load_lexicon(read_file(lexicon_path));
  return gp::Pipeline(std::move(model), std::move(lexicon), make_registry());
}

int cmd_scan(const std::string& model_path, const std::string& lexicon_path, const std::string& input,
             const std::string& format) {
  const gp::Pipeline pipeline = load_pipeline(model_path, lexicon_path);
  const gp::LexicalAnalysisGraph graph = pipeline.scan(read_input(input));
  if (format == "json") {
    std::cout << gp::to_json(graph).dump(2) << "\n";
  } else if (format == "dot") {
    std::cout << gp::to_dot(graph);
  } else {
    std::cout << gp::to_text(graph);
  }
  std::cout << "sequences: " << gp::count_sequences(graph) << "\n";
  return kOk;
}

int cmd_parse(const std::string& model_path, const std::string& lexicon_path, const std::string& input,
              std::size_t k, const std::string& algebra, bool explain, const std::string& format) {
  const gp::Pipeline pipeline = load_pipeline(model_path, lexicon_path);
  gp::PipelineOptions options;
  options.algebra = algebra;
  const std::string text = read_input(input);
  const gp::Analysis analysis = pipeline.analyze(text, k, options);

  if (format == "json") {
    nlohmann::ordered_json out;
    out["input"] = text;
    out["treeCount"] = analysis.tree_count;
    out["graphs"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < analysis.graphs.size(); ++i) {
      out["graphs"].push_back(gp::to_json(analysis.graphs[i], analysis.breakdowns[i], explain));
    }
    std::cout << out.dump(2) << "\n";
  } else if (format == "dot") {
    for (std::size_t i = 0; i < analysis.graphs.size(); ++i) {
      std::cout << gp::to_dot(analysis.graphs[i], "g" + std::to_string(i + 1));
    }
  } else {
    for (std::size_t i = 0; i < analysis.graphs.size(); ++i) {
      std::cout << "# graph " << (i + 1) << "\n" << gp::to_text(analysis.graphs[i]);
      if (explain) {
        for (const auto& f : analysis.breakdowns[i].factors) {
          std::cout << "factor " << gp::to_string(f.kind) << " " << f.id << " " << f.value << "\n";
        }
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic model-driven parser"};
  app.require_subcommand(1);

  std::string model_path, lexicon_path, input, format = "json", algebra = "probabilistic";
  std::size_t k = 3;
  bool explain = false;
  const std::vector<std::string> formats{"json", "dot", "text"};

  auto* validate = app.add_subcommand("validate", "Check a model document");
  validate->add_option("--model", model_path, "Model document")->required();

  auto* scan = app.add_subcommand("scan", "Print the lexical analysis graph of the input");
  auto* parse = app.add_subcommand("parse", "Print the best syntax graphs of the input");
  for (auto* cmd : {scan, parse}) {
    cmd->add_option("--model", model_path, "Model document")->required();
    cmd->add_option("--lexicon", lexicon_path, "Lexicon file")->required();
    cmd->add_option("--input", input, "Input text, or - for standard input")->required();
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember(formats));
  }
  parse->add_option("--top-k", k, "Number of graphs to print")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  parse->add_option("--algebra", algebra, "Uncertainty algebra")
      ->check(CLI::IsMember({"probabilistic", "possibilistic"}));
  parse->add_flag("--explain", explain, "Include every score factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (validate->parsed()) return cmd_validate(model_path);
    if (scan->parsed()) return cmd_scan(model_path, lexicon_path, input, format);
    return cmd_parse(model_path, lexicon_path, input, k, algebra, explain, format);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const gp::RegistryError& e) {
    std::cerr << "error: registry: " << e.what() << "\n";
    return kUsageError;
  } catch (const gp::ScanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  } catch (const gp::ParseError& e) {
    std::cerr << "error: " << e.what() << " (offset " << e.offset() << ")\n";
    return kDomainFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
}
