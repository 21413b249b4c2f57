#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphparse/xbar.hpp"
#include "json.hpp"
#include "support.hpp"

namespace gp = graphparse;
namespace fs = std::filesystem;
using namespace gptest;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

// Fixture files for one test run, removed at exit.
struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("graphparse-cli-" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

fs::path scratch() {
  static const Scratch s;
  return s.dir;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

std::string write(const std::string& name, const std::string& content) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

// Runs the CLI through the shell. `prefix` goes before the binary
// (environment assignments, a pipe source).
Run run(const std::string& args, const std::string& prefix = "") {
  const std::string err = (scratch() / "stderr.txt").string();
  const std::string cmd = prefix + quote(GRAPHPARSE_CLI) + " " + args + " 2>" + quote(err);
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream e(err);
  std::ostringstream s;
  s << e.rdbuf();
  r.err = s.str();
  return r;
}

std::string source(const std::string& rel) { return quote(std::string(GRAPHPARSE_SOURCE_DIR) + "/" + rel); }

std::string bundled() {
  return "--model " + source("models/xbar.model.json") + " --lexicon " + source("lexicons/english.tsv");
}

std::string catalan_args() {
  return "--model " + quote(write("catalan.json", gp::serialize_model(catalan_model()))) + " --lexicon " +
         quote(write("empty.tsv", ""));
}

// Splits off the trailing "sequences: N" line of scan output.
std::pair<std::string, std::string> split_last_line(const std::string& out) {
  REQUIRE(!out.empty());
  REQUIRE(out.back() == '\n');
  const std::size_t cut = out.find_last_of('\n', out.size() - 2);
  if (cut == std::string::npos) return {"", out.substr(0, out.size() - 1)};
  return {out.substr(0, cut + 1), out.substr(cut + 1, out.size() - cut - 2)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// ---- schema checks for parse output -----------------------------------------

bool is_span(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number_unsigned() && j[1].is_number_unsigned() && j[0] <= j[1];
}

void check_instance(const json& j) {
  REQUIRE(j.is_object());
  CHECK(j["id"].is_number_unsigned());
  CHECK(j["element"].is_string());
  CHECK(is_span(j["span"]));
  CHECK(j["score"].is_number());
  REQUIRE(j["members"].is_object());
  for (const auto& [name, children] : j["members"].items()) {
    REQUIRE(children.is_array());
    CHECK(!children.empty());
    for (const auto& c : children) check_instance(c);
  }
  if (j.contains("variant")) check_instance(j["variant"]);
  if (j.contains("lexeme")) {
    CHECK(j["lexeme"].is_string());
    CHECK(j["tokenId"].is_number_unsigned());
    CHECK(j["posProb"].is_number());
  }
}

void check_graph(const json& g, bool explain) {
  check_instance(g["tree"]);
  REQUIRE(g["references"].is_array());
  for (const auto& r : g["references"]) {
    CHECK(r["from"].is_array());
    CHECK(r["from"].size() == 2);
    CHECK((r["to"].is_number_unsigned() || r["to"].is_null()));
    CHECK((r["kind"].is_null() || r["kind"] == "anaphoric" || r["kind"] == "cataphoric" || r["kind"] == "recursive"));
    CHECK(r["score"].is_number());
  }
  const json& s = g["score"];
  CHECK((s["algebra"] == "probabilistic" || s["algebra"] == "possibilistic"));
  CHECK(s["value"].is_number());
  CHECK(s.contains("factors") == explain);
  if (explain) {
    for (const auto& f : s["factors"]) {
      CHECK(f.size() == 2);
      CHECK((f.contains("instanceId") || f.contains("tokenId") || f.contains("referenceId")));
      CHECK(f["value"].is_number());
    }
  }
}

}  // namespace

TEST_CASE("validate") {
  Run ok = run("validate --model " + source("models/xbar.model.json"));
  CHECK(ok.status == 0);
  CHECK(ok.out.empty());

  gp::LanguageModel m = toy_pcfg();
  m.elements[1].probability.value = 1.2;
  Run bad = run("validate --model " + quote(write("bad.json", gp::serialize_model(m))));
  CHECK(bad.status == 1);
  const auto out = lines(bad.out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].rfind("ERROR /elements/", 0) == 0);

  CHECK(run("validate --model " + quote((scratch() / "missing.json").string())).status == 2);
  Run garbled = run("validate --model " + quote(write("garbled.json", "{\"name\":")));
  CHECK(garbled.status == 1);
  CHECK(garbled.out.rfind("ERROR ", 0) == 0);
}

TEST_CASE("validate consults the registry manifest") {
  gp::LanguageModel m = catalan_model();
  m.elements[1].constraints.push_back({"left_first", {}});
  const std::string model = quote(write("custom.json", gp::serialize_model(m)));
  Run without = run("validate --model " + model);
  CHECK(without.status == 1);
  CHECK(without.out.find("unregistered constraint 'left_first'") != std::string::npos);

  const std::string manifest = write(
      "manifest.json",
      R"({"constraints":[{"name":"left_first","base":"precedes","params":{"first":"left","second":"right"}}]})");
  Run with = run("validate --model " + model, "GRAPHPARSE_REGISTRY=" + quote(manifest) + " ");
  CHECK(with.status == 0);
  CHECK(with.out.empty());

  // the registered constraint is live while parsing
  Run parsed = run("parse " + catalan_args() + " --input 'a a a' --top-k 5", "GRAPHPARSE_REGISTRY=" + quote(manifest) + " ");
  CHECK(parsed.status == 0);

  const std::string missing = quote((scratch() / "no-manifest.json").string());
  CHECK(run("validate --model " + model, "GRAPHPARSE_REGISTRY=" + missing + " ").status == 2);
  const std::string broken = quote(write("broken-manifest.json", R"({"constraints":[{"name":"x","base":"nope"}]})"));
  CHECK(run("validate --model " + model, "GRAPHPARSE_REGISTRY=" + broken + " ").status == 2);
}

TEST_CASE("scan formats") {
  const char* demo = "'I saw a picture of New York'";
  const auto& pipe = gp::english_pipeline();
  const auto api = pipe.scan("I saw a picture of New York");

  Run text = run("scan " + bundled() + " --input " + demo + " --format text");
  CHECK(text.status == 0);
  auto [body, count] = split_last_line(text.out);
  CHECK(count == "sequences: " + std::to_string(gp::count_sequences(api)));
  for (const auto& t : api.tokens) CHECK(body.find(t.lexeme) != std::string::npos);

  Run js = run("scan " + bundled() + " --input " + demo + " --format json");
  CHECK(js.status == 0);
  auto [doc, count2] = split_last_line(js.out);
  CHECK(count2 == count);
  const json j = json::parse(doc);
  REQUIRE(j["tokens"].size() == api.tokens.size());
  for (std::size_t i = 0; i < api.tokens.size(); ++i) {
    CHECK(j["tokens"][i]["lexeme"] == api.tokens[i].lexeme);
    CHECK(j["tokens"][i]["element"] == api.tokens[i].element);
  }
  CHECK(j["edges"].size() == api.edges.size());

  Run dot = run("scan " + bundled() + " --input " + demo + " --format dot");
  CHECK(dot.status == 0);
  auto [graph, count3] = split_last_line(dot.out);
  CHECK(count3 == count);
  std::string why;
  CHECK_MESSAGE(valid_dot(graph, &why), why);

  Run empty = run("scan " + bundled() + " --input ''");
  CHECK(empty.status == 0);
  CHECK(split_last_line(empty.out).second == "sequences: 0");

  Run uncovered = run("scan " + catalan_args() + " --input 'a b'");
  CHECK(uncovered.status == 1);
  CHECK(uncovered.err.find("offset 2") != std::string::npos);
}

TEST_CASE("parse output follows the schema") {
  Run r = run("parse " + bundled() + " --input 'I saw a picture of New York' --top-k 1");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["input"] == "I saw a picture of New York");
  CHECK(j["treeCount"].is_number_unsigned());
  REQUIRE(j["graphs"].size() == 1);
  check_graph(j["graphs"][0], false);
  const double score = j["graphs"][0]["score"]["value"];
  CHECK(score > 0);
  CHECK(score <= 1);

  Run all = run("parse " + catalan_args() + " --input 'a a a' --top-k 1000");
  CHECK(all.status == 0);
  const json c = json::parse(all.out);
  CHECK(c["treeCount"] == 2);
  CHECK(c["graphs"].size() == 2);

  Run dot = run("parse " + bundled() + " --input 'the cat slept' --format dot --top-k 2");
  CHECK(dot.status == 0);
  std::string why;
  CHECK_MESSAGE(valid_dot(dot.out, &why), why);

  Run text = run("parse " + bundled() + " --input 'the cat slept' --format text --explain");
  CHECK(text.status == 0);
  CHECK(text.out.rfind("# graph 1\n", 0) == 0);
  CHECK(text.out.find("factor instanceId 0 ") != std::string::npos);
}

TEST_CASE("explained scores factor exactly") {
  for (const auto& sentence : gp::corpus_sentences(gp::bundle_data::corpus)) {
    CAPTURE(sentence);
    for (const char* algebra : {"probabilistic", "possibilistic"}) {
      Run r = run("parse " + bundled() + " --input " + quote(sentence) + " --top-k 3 --explain --algebra " + algebra);
      REQUIRE(r.status == 0);
      const json j = json::parse(r.out);
      REQUIRE(!j["graphs"].empty());
      double last = 2.0;
      for (const auto& g : j["graphs"]) {
        check_graph(g, true);
        CHECK(g["score"]["algebra"] == algebra);
        const double value = g["score"]["value"];
        CHECK(value <= last);
        last = value;
        if (std::string(algebra) == "probabilistic") {
          double product = 1;
          for (const auto& f : g["score"]["factors"]) product *= f["value"].get<double>();
          CHECK(std::fabs(product - value) <= 1e-12 * value);
        } else {
          double least = 1;
          for (const auto& f : g["score"]["factors"]) least = std::min(least, f["value"].get<double>());
          CHECK(least == value);
        }
      }
    }
  }
}

TEST_CASE("failures and usage errors map to exit codes") {
  Run none = run("parse " + bundled() + " --input 'saw I'");
  CHECK(none.status == 1);
  CHECK(none.out.empty());
  CHECK(none.err.find("offset") != std::string::npos);

  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("--help").status == 0);
  CHECK(run("parse --help").status == 0);
  CHECK(run("parse " + bundled()).status == 2);  // no input
  CHECK(run("parse " + bundled() + " --input x --top-k 0").status == 2);
  CHECK(run("parse " + bundled() + " --input x --top-k many").status == 2);
  CHECK(run("parse " + bundled() + " --input x --format yaml").status == 2);
  CHECK(run("parse " + bundled() + " --input x --algebra fuzzy").status == 2);
  CHECK(run("scan --model " + source("models/xbar.model.json") + " --lexicon /nonexistent --input x").status == 2);
  CHECK(run("parse --model /nonexistent --lexicon " + source("lexicons/english.tsv") + " --input x").status == 2);

  // domain failures in the documents themselves
  CHECK(run("scan --model " + source("models/xbar.model.json") + " --lexicon " +
            quote(write("bad.tsv", "word\tNoun\tlots\n")) + " --input x")
            .status == 1);
  gp::LanguageModel m = toy_pcfg();
  m.start = "Nowhere";
  CHECK(run("parse --model " + quote(write("nostart.json", gp::serialize_model(m))) + " --lexicon " +
            quote(write("empty.tsv", "")) + " --input n")
            .status == 1);
}

TEST_CASE("standard input stands in for -") {
  Run direct = run("parse " + bundled() + " --input 'the cat slept'");
  Run piped = run("parse " + bundled() + " --input -", "printf 'the cat slept' | ");
  CHECK(piped.status == 0);
  CHECK(piped.out == direct.out);
  Run scanned = run("scan " + bundled() + " --input - --format text", "printf 'Peter saw her' | ");
  CHECK(scanned.status == 0);
  CHECK(scanned.out == run("scan " + bundled() + " --input 'Peter saw her' --format text").out);
}

TEST_CASE("outputs are byte-identical across runs") {
  std::vector<std::string> commands{"validate --model " + source("models/xbar.model.json")};
  for (const auto& s : gp::corpus_sentences(gp::bundle_data::corpus)) {
    for (const char* f : {"json", "dot", "text"}) {
      commands.push_back("scan " + bundled() + " --input " + quote(s) + " --format " + f);
      commands.push_back("parse " + bundled() + " --input " + quote(s) + " --explain --top-k 3 --format " + f);
    }
  }
  for (const auto& c : commands) {
    CAPTURE(c);
    const Run a = run(c), b = run(c);
    CHECK(a.status == b.status);
    CHECK(a.out == b.out);
  }
}
