#include "doctest.h"

#include "case_study.hpp"

#include "ontotier/serializer.hpp"
#include "ontotier/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace ontotier;
using namespace ontotier::service;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string data(const std::string& name) { return slurp(fs::path(ONTOTIER_DATA_DIR) / name); }

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("ontotier-svc-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Client {
  Workspace ws;
  Api api{ws};
  explicit Client(const fs::path& root) : ws(root) {}

  Response call(std::string method, std::string path, const json& body = nullptr,
                std::multimap<std::string, std::string> params = {}) {
    return api.handle({std::move(method), std::move(path), std::move(params), body.is_null() ? "" : body.dump()});
  }
  json ok(std::string method, std::string path, const json& body = nullptr, int want = 200) {
    auto r = call(method, path, body);
    INFO(method << " " << path << " -> " << r.body);
    REQUIRE(r.status == want);
    return json::parse(r.body);
  }
};

std::string error_code(const Response& r) { return json::parse(r.body)["error"]["code"]; }

}  // namespace

TEST_CASE("service: editing a document end to end") {
  TempDir tmp;
  Client c(tmp.path);
  CHECK(c.ok("GET", "/api/health")["status"] == "ok");

  auto doc = c.ok("POST", "/api/documents", {{"id", "s/one.eaf.rdf"}, {"media", {{{"url", "file:///m.wav"}}}}}, 201);
  CHECK(doc["base"].get<std::string>().ends_with("/s/one.eaf.rdf"));
  CHECK(doc["media"][0]["url"] == "file:///m.wav");

  const std::string D = "/api/documents/s/one.eaf.rdf";
  c.ok("POST", D + "/types", {{"id", "utt"}, {"stereotype", "None"}});
  c.ok("POST", D + "/types", {{"id", "seg"}, {"stereotype", "Time_Subdivision"}});
  c.ok("POST", D + "/types", {{"id", "gl"}, {"stereotype", "Symbolic_Association"}});
  c.ok("POST", D + "/tiers", {{"id", "Utt"}, {"type", "utt"}});
  c.ok("POST", D + "/tiers", {{"id", "Seg"}, {"type", "seg"}, {"parent", "Utt"}});
  c.ok("POST", D + "/tiers", {{"id", "Gl"}, {"type", "gl"}, {"parent", "Utt"}});

  auto r = c.ok("POST", D + "/annotations/alignable", {{"tier", "Utt"}, {"begin", 0}, {"end", 900}, {"value", "hello"}});
  CHECK(r["result"] == "a1");
  r = c.ok("POST", D + "/annotations/subdivide", {{"parent", "a1"}, {"tier", "Seg"}, {"cuts", {300, 600}}});
  CHECK(r["result"] == json({"a2", "a3", "a4"}));
  r = c.ok("POST", D + "/annotations/referring", {{"tier", "Gl"}, {"parent", "a1"}, {"value", {{"text", "hi"}}}});
  CHECK(r["result"] == "a5");

  auto ext = c.ok("GET", D + "/annotations/a3/extent");
  CHECK(ext == json({{"begin", 300}, {"end", 600}}));

  // a clash is refused and nothing changes
  auto before = c.ok("GET", D);
  auto clash = c.call("POST", D + "/annotations/alignable", {{"tier", "Utt"}, {"begin", 500}, {"end", 1200}});
  CHECK(clash.status == 409);
  CHECK(error_code(clash) == "OverlapRejected");
  CHECK(c.ok("GET", D) == before);

  auto hits = json::parse(c.call("GET", D + "/search", nullptr, {{"q", "HI"}, {"case", "insensitive"}}).body);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0]["annotation"] == "a5");
  CHECK(hits[0]["begin"] == 0);
  CHECK(hits[0]["end"] == 900);
  CHECK(json::parse(c.call("GET", D + "/search", nullptr, {{"q", "HI"}}).body).empty());

  // a2 starts on its own slot at 0, so moving ts1 alone would strand it
  auto stranded = c.call("PUT", D + "/slots/ts1", {{"value", 100}});
  CHECK(stranded.status == 422);
  CHECK(error_code(stranded) == "ChildWouldEscape");
  c.ok("PUT", D + "/slots/ts1", {{"value", 100}, {"mode", "trim"}});
  CHECK(c.ok("GET", D + "/annotations/a1/extent")["begin"] == 100);
  CHECK(c.ok("GET", D + "/annotations/a2/extent")["begin"].get<int>() >= 100);
  CHECK(c.ok("GET", D + "/check").empty());
  auto bad_mode = c.call("PUT", D + "/slots/ts1", {{"value", 1}, {"mode", "squash"}});
  CHECK(bad_mode.status == 400);

  r = c.ok("DELETE", D + "/annotations/a1");
  CHECK(r["document"]["annotations"].empty());
  CHECK(c.ok("GET", D + "/check").empty());

  c.ok("DELETE", D + "/tiers/Seg");
  auto tiers = c.ok("GET", D)["tiers"];
  CHECK(tiers.size() == 2);
}

TEST_CASE("service: save, export and reopen") {
  TempDir tmp;
  const std::string D = "/api/documents/w.eaf.rdf";
  json saved;
  {
    Client c(tmp.path);
    c.ok("POST", "/api/documents", {{"id", "w.eaf.rdf"}}, 201);
    c.ok("POST", D + "/types", {{"id", "utt"}});
    c.ok("POST", D + "/tiers", {{"id", "Utt"}, {"type", "utt"}});
    c.ok("POST", D + "/annotations/alignable", {{"tier", "Utt"}, {"begin", 10}, {"end", 20}, {"value", "x<y"}});
    auto s = c.ok("POST", D + "/save");
    auto exported = c.call("GET", D + "/export");
    CHECK(exported.content_type == "application/rdf+xml");
    CHECK(slurp(tmp.path / "w.eaf.rdf") == exported.body);
    CHECK(s["bytes"] == exported.body.size());
    saved = c.ok("GET", D);
    CHECK(c.ok("GET", "/api/documents") == json({"w.eaf.rdf"}));
    c.ok("DELETE", D);
    CHECK(c.ok("GET", D) == saved);  // reopened from disk
  }
  Client fresh(tmp.path);
  CHECK(fresh.ok("GET", D) == saved);
  CHECK(fresh.call("POST", "/api/documents", {{"id", "w.eaf.rdf"}}).status == 409);
}

TEST_CASE("service: the case study loads from the workspace") {
  TempDir tmp;
  fs::copy_file(fs::path(ONTOTIER_DATA_DIR) / "case-study.eaf.rdf", tmp.path / "case.eaf.rdf");
  Client c(tmp.path);
  auto doc = c.ok("GET", "/api/documents/case.eaf.rdf");
  CHECK(doc["tiers"].size() == 6);
  CHECK(doc["tiers"][0]["id"] == "Orthographic");
  // the tier's profile reference does not name a workspace file
  auto v = c.ok("GET", "/api/documents/case.eaf.rdf/check");
  REQUIRE(!v.empty());
  CHECK(v[0]["rule"] == "value-profile");
}

TEST_CASE("service: ontologies and profiles") {
  TempDir tmp;
  Client c(tmp.path);
  auto up = c.api.handle({"POST", "/api/ontologies", {{"base", fixtures::kGold}}, data("gold-mini.owl")});
  REQUIRE(up.status == 201);
  auto info = json::parse(up.body);
  CHECK(info["classes"] == 7);
  const std::string O = "/api/ontologies/" + info["id"].get<std::string>();
  CHECK(c.ok("GET", "/api/ontologies") == json({info["id"]}));

  auto tree = c.ok("GET", O + "/tree");
  CHECK(!tree.empty());
  auto index = c.ok("GET", O + "/index");
  CHECK(index.size() >= 7);

  auto props = json::parse(c.call("GET", O + "/properties", nullptr, {{"class", "Noun"}}).body);
  REQUIRE(props.size() == 2);
  CHECK(props[1]["iri"] == fixtures::kGold + "#hasGender");
  CHECK(props[1]["max"] == 1);
  CHECK(props[0]["max"].is_null());
  CHECK(c.call("GET", O + "/properties").status == 400);
  CHECK(c.call("GET", O + "/properties", nullptr, {{"class", "Nope"}}).status == 404);

  auto made = c.ok("POST", O + "/individuals",
                   {{"class", "Noun"},
                    {"id", "neko1"},
                    {"assertions",
                     {{{"property", fixtures::kGold + "#hasGender"}, {"resource", fixtures::kGold + "#inanimateGender"}},
                      {{"property", fixtures::kGold + "#hasForm"}, {"literal", "neko"}}}}},
                   201);
  CHECK(made["iri"] == fixtures::kGold + "#neko1");
  auto inst = json::parse(c.call("GET", O + "/instances", nullptr, {{"class", "Noun"}}).body);
  CHECK(inst.size() == 1);
  auto missing = c.call("POST", O + "/individuals", {{"class", "Noun"}, {"id", "neko2"}});
  CHECK(missing.status == 422);
  CHECK(error_code(missing) == "CardinalityViolation");

  auto p = c.ok("POST", "/api/profiles",
                {{"id", "p/x.prf"}, {"author", "me"}, {"version", "1"}, {"source", "urn:x"},
                 {"terms", {{{"name", "N"}, {"ontology_terms", {"Noun"}}}}}},
                201);
  CHECK(p["terms"].size() == 1);
  CHECK(fs::exists(tmp.path / "p" / "x.prf"));
  c.ok("POST", "/api/profiles/p/x.prf/terms", {{"name", "Z"}, {"ontology_terms", {"Zebra"}}}, 201);
  auto dup = c.call("POST", "/api/profiles/p/x.prf/terms", {{"name", "Z"}, {"ontology_terms", {"Noun"}}});
  CHECK(dup.status == 409);
  auto findings = json::parse(
      c.call("GET", "/api/profiles/p/x.prf/validate", nullptr, {{"ontology", info["id"].get<std::string>()}}).body);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0]["kind"] == "unresolved");
  CHECK(findings[0]["ontology_term"] == "Zebra");
  CHECK(c.ok("GET", "/api/profiles") == json({"p/x.prf"}));
  CHECK(c.call("POST", "/api/profiles", {{"id", "y.prf"}, {"author", "a"}, {"version", "1"}, {"source", ""}}).status ==
        422);
}

TEST_CASE("service: ontological tiers use workspace profiles") {
  TempDir tmp;
  Client c(tmp.path);
  c.ok("POST", "/api/profiles",
       {{"id", "pp.prf"}, {"author", "a"}, {"version", "1"}, {"source", "urn:x"},
        {"terms", {{{"name", "N"}, {"ontology_terms", {"Noun"}}}}}},
       201);
  const std::string D = "/api/documents/o.eaf.rdf";
  c.ok("POST", "/api/documents", {{"id", "o.eaf.rdf"}}, 201);
  c.ok("POST", D + "/types", {{"id", "utt"}});
  c.ok("POST", D + "/types", {{"id", "ont"}, {"stereotype", "Symbolic_Association"}, {"ontological", true}});
  c.ok("POST", D + "/tiers", {{"id", "Utt"}, {"type", "utt"}});
  c.ok("POST", D + "/tiers", {{"id", "Ont"}, {"type", "ont"}, {"parent", "Utt"}, {"profile", "pp.prf"}});
  c.ok("POST", D + "/annotations/alignable", {{"tier", "Utt"}, {"begin", 0}, {"end", 5}});
  json v{{"kind", "ontology"}, {"term", "N"}, {"instances", {"g#n1"}}};
  c.ok("POST", D + "/annotations/referring", {{"tier", "Ont"}, {"parent", "a1"}, {"value", v}});
  auto unknown = c.call("PUT", D + "/annotations/a2/value", {{"value", {{"kind", "ontology"}, {"term", "Q"}, {"instances", {"i"}}}}});
  CHECK(unknown.status == 422);
  CHECK(error_code(unknown) == "TermNotInProfile");
  auto plain = c.call("PUT", D + "/annotations/a2/value", {{"value", "text"}});
  CHECK(plain.status == 422);
  CHECK(c.ok("GET", D + "/check").empty());
}

TEST_CASE("service: request errors") {
  TempDir tmp;
  Client c(tmp.path);
  auto esc = c.call("POST", "/api/documents", {{"id", "../out.eaf.rdf"}});
  CHECK(esc.status == 400);
  CHECK(error_code(esc) == "BadRequest");
  CHECK(c.call("POST", "/api/documents", {{"id", "/abs.eaf.rdf"}}).status == 400);
  CHECK(c.call("GET", "/api/documents/../../etc/passwd").status == 400);
  CHECK(c.call("GET", "/api/documents/none.eaf.rdf").status == 404);
  CHECK(c.call("GET", "/api/nothing").status == 404);
  CHECK(c.call("PATCH", "/api/health").status == 405);
  CHECK(c.api.handle({"POST", "/api/documents", {}, "{not json"}).status == 400);
  CHECK(c.call("POST", "/api/documents", {{"id", 3}}).status == 400);
  CHECK(c.call("GET", "/api/ontologies/abc").status == 404);
  CHECK(c.call("GET", "/api/ontologies/zz").status == 404);
  auto bad_owl = c.api.handle({"POST", "/api/ontologies", {}, "<rdf:RDF"});
  CHECK(bad_owl.status == 400);
  CHECK(error_code(bad_owl) == "MalformedXml");
  c.ok("POST", "/api/documents", {{"id", "e.eaf.rdf"}}, 201);
  CHECK(error_code(c.call("POST", "/api/documents/e.eaf.rdf/tiers", {{"id", "T"}, {"type", "missing"}})) ==
        "UnknownType");
  CHECK(c.call("POST", "/api/documents/e.eaf.rdf/types", {{"id", "t"}, {"stereotype", "Sideways"}}).status == 400);
  CHECK(c.call("POST", "/api/documents/e.eaf.rdf/annotations/alignable", {{"tier", "T"}, {"begin", "0"}}).status ==
        400);
}

TEST_CASE("service: the server hosts the api, media ranges and static files") {
  TempDir tmp;
  fs::create_directories(tmp.path / "media");
  fs::create_directories(tmp.path / "web");
  std::string audio(4096, '\0');
  for (std::size_t i = 0; i < audio.size(); ++i) audio[i] = static_cast<char>(i % 251);
  Workspace::write_atomically(tmp.path / "media" / "clip.wav", audio);
  Workspace::write_atomically(tmp.path / "web" / "index.html", "<html>ui</html>");

  Options o;
  o.port = 0;
  o.root = tmp.path;
  o.web_dir = tmp.path / "web";
  Server server(o);
  int port = server.bind();
  REQUIRE(port > 0);
  std::thread t([&] { server.run(); });

  httplib::Client http("127.0.0.1", port);
  httplib::Result health;
  for (int i = 0; i < 100 && !health; ++i) {
    health = http.Get("/api/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["status"] == "ok");

  auto range = http.Get("/media/clip.wav", {{"Range", "bytes=100-199"}});
  REQUIRE(range);
  CHECK(range->status == 206);
  CHECK(range->body == audio.substr(100, 100));
  CHECK(range->get_header_value("Content-Type") == "audio/wav");
  auto whole = http.Get("/media/clip.wav");
  REQUIRE(whole);
  CHECK(whole->body == audio);

  auto page = http.Get("/");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body == "<html>ui</html>");

  auto created = http.Post("/api/documents", R"({"id":"h.eaf.rdf"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto listed = http.Get("/api/documents");
  REQUIRE(listed);
  CHECK(json::parse(listed->body) == json({"h.eaf.rdf"}));
  auto missing = http.Get("/api/documents/x.eaf.rdf");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  t.join();
}
