#include "doctest.h"

#include "case_study.hpp"

#include "ontotier/cli.hpp"
#include "ontotier/owl_model.hpp"
#include "ontotier/profile.hpp"
#include "ontotier/serializer.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ontotier;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(ONTOTIER_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int status;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ontotier");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli: validate") {
  auto ok = cli({"validate", data("case-study.eaf.rdf")});
  CHECK(ok.status == 0);
  CHECK(ok.out.empty());

  auto tmp = fs::temp_directory_path() / ("ontotier-cli-" + std::to_string(::getpid()) + ".eaf.rdf");
  auto bytes = slurp(data("case-study.eaf.rdf"));
  auto at = bytes.find("#Symbolic_Association");
  REQUIRE(at != std::string::npos);
  bytes.replace(at, 21, "#Included_In");
  std::ofstream(tmp, std::ios::binary) << bytes;
  auto bad = cli({"--json", "validate", tmp.string()});
  fs::remove(tmp);
  CHECK(bad.status == 1);
  auto j = json::parse(bad.out);
  CHECK(j["error"]["code"] == "UnknownConstraint");
  bool flagged = false;
  for (const auto& f : j["findings"]) flagged |= f["rule"] == "unknown-constraint";
  CHECK(flagged);
  CHECK(bad.err.find("UnknownConstraint") != std::string::npos);

  auto missing = cli({"validate", "/nonexistent/file.eaf.rdf"});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("IoError") != std::string::npos);
}

TEST_CASE("cli: search prints the engine's hits") {
  auto doc = load_document(slurp(data("case-study.eaf.rdf")));
  auto want = search(doc, "neko", std::nullopt, true);
  REQUIRE(!want.empty());
  auto r = cli({"search", data("case-study.eaf.rdf"), "neko"});
  CHECK(r.status == 0);
  std::ostringstream expect;
  for (const auto& h : want) {
    expect << h.tier_id << '\t' << h.annotation_id << '\t' << h.extent.begin << '\t' << h.extent.end << '\t' << h.text
           << '\n';
  }
  CHECK(r.out == expect.str());

  auto filtered = cli({"--json", "search", data("case-study.eaf.rdf"), "NEKO", "-i", "--tier", "Words"});
  auto hits = json::parse(filtered.out);
  auto words = search(doc, "NEKO", std::vector<std::string>{"Words"}, false);
  REQUIRE(hits.size() == words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    CHECK(hits[i]["tier"] == "Words");
    CHECK(hits[i]["annotation"] == words[i].annotation_id);
  }
}

TEST_CASE("cli: profile-new and profile-check") {
  auto r = cli({"profile-new", "--author", "A", "--version", "1", "--source", fixtures::kGold, "--term",
                "NI=Noun,Inanimate", "--term-description", "NI=inanimate noun"});
  REQUIRE(r.status == 0);
  auto p = parse_profile(r.out);
  REQUIRE(p.terms.size() == 1);
  CHECK(p.terms[0].ontology_terms == std::vector<std::string>{"Noun", "Inanimate"});
  CHECK(p.terms[0].description == "inanimate noun");

  CHECK(cli({"profile-new", "--author", "A", "--version", "1", "--source", ""}).status == 1);
  CHECK(cli({"profile-new", "--author", "A", "--version", "1", "--source", "s", "--term", "oops"}).status == 1);
  CHECK(cli({"profile-new", "--author", "A"}).status != 0);

  auto check = cli({"profile-check", data("ni-profile.prf"), data("gold-mini.owl"), "--base", fixtures::kGold});
  CHECK(check.status == 0);
  CHECK(check.out.empty());
  auto wabo = cli({"--json", "profile-check", data("wabo4.prf"), data("gold-mini.owl"), "--base", fixtures::kGold});
  auto expected = validate_against_ontology(parse_profile(slurp(data("wabo4.prf"))),
                                            owl::parse_ontology(slurp(data("gold-mini.owl")), fixtures::kGold));
  CHECK(wabo.status == (expected.empty() ? 0 : 1));
  CHECK(json::parse(wabo.out).size() == expected.size());
}

TEST_CASE("cli: ontology tree and index") {
  auto onto = owl::parse_ontology(slurp(data("gold-mini.owl")), fixtures::kGold);
  auto index = cli({"ontology-index", data("gold-mini.owl"), "--base", fixtures::kGold});
  CHECK(index.status == 0);
  std::ostringstream want;
  for (const auto& e : owl::term_index(onto)) want << e.label << '\t' << e.iri << '\n';
  CHECK(index.out == want.str());

  auto tree = cli({"--json", "ontology-tree", data("gold-mini.owl"), "--base", fixtures::kGold});
  CHECK(tree.status == 0);
  auto j = json::parse(tree.out);
  CHECK(j.size() == owl::class_tree(onto).size());
  auto text = cli({"ontology-tree", data("gold-mini.owl"), "--base", fixtures::kGold});
  CHECK(text.out.find("  Noun\t" + fixtures::kGold + "#Noun\n") != std::string::npos);
}

TEST_CASE("cli: export outline") {
  auto r = cli({"export", data("case-study.eaf.rdf")});
  CHECK(r.status == 0);
  CHECK(r.out.starts_with("document " + fixtures::kCaseBase + "\n"));
  CHECK(r.out.find("tier Orthographic (") != std::string::npos);
  CHECK(r.out.find("profile " + fixtures::kCaseProfileRef) != std::string::npos);
}

TEST_CASE("cli: usage") {
  CHECK(cli({}).status != 0);
  auto help = cli({"--help"});
  CHECK(help.status == 0);
  CHECK(help.out.find("profile-check") != std::string::npos);
}
