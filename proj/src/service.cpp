#include "ontotier/service.hpp"

#include "ontotier/error.hpp"
#include "ontotier/serializer.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace ontotier::service {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + p.string(), {{"path", p.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string percent_encode_path(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '/' || c == '-' || c == '_' || c == '.' || c == '~' || c == ':') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownClass:
    case ErrorCode::UnknownTier:
    case ErrorCode::UnknownType:
    case ErrorCode::UnknownAnnotation:
    case ErrorCode::UnknownSlot:
      return 404;
    case ErrorCode::DuplicateIri:
    case ErrorCode::DuplicateName:
    case ErrorCode::DuplicateId:
    case ErrorCode::ProfileAlreadyBound:
    case ErrorCode::OverlapRejected:
    case ErrorCode::AlreadySubdivided:
    case ErrorCode::AssociationAlreadyPresent:
      return 409;
    case ErrorCode::MalformedXml:
    case ErrorCode::SchemaViolation:
    case ErrorCode::UnresolvableBase:
    case ErrorCode::BadRequest:
      return 400;
    case ErrorCode::IoError:
      return 500;
    default:
      return 422;
  }
}

Error bad_request(const std::string& message) { return Error(ErrorCode::BadRequest, message); }

// ---- JSON shapes ----

json value_json(const AnnotationValue& v) {
  if (const auto* s = std::get_if<StringValue>(&v)) return {{"kind", "string"}, {"text", s->text}};
  const auto& o = std::get<OntologyValue>(v);
  return {{"kind", "ontology"},
          {"term", o.user_defined_term},
          {"instances", o.instances},
          {"descriptions", o.descriptions},
          {"ont_id", o.ont_annotation_id}};
}

AnnotationValue value_from(const json& j) {
  if (j.is_string()) return StringValue{j.get<std::string>()};
  if (!j.is_object()) throw bad_request("value must be a string or an object");
  auto kind = j.value("kind", "string");
  if (kind == "string") return StringValue{j.value("text", "")};
  if (kind != "ontology") throw bad_request("unknown value kind '" + kind + "'");
  OntologyValue o;
  o.user_defined_term = j.value("term", "");
  o.ont_annotation_id = j.value("ont_id", "");
  o.instances = j.value("instances", std::vector<std::string>{});
  o.descriptions = j.value("descriptions", std::vector<std::string>{});
  return o;
}

json optional_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json document_json(const std::string& id, const AnnotationDocument& doc) {
  json j;
  j["id"] = id;
  j["base"] = doc.id;
  j["time_unit"] = "milliseconds";
  j["media"] = json::array();
  for (const auto& m : doc.media) {
    j["media"].push_back({{"url", m.media_url},
                          {"mime_type", m.mime_type},
                          {"time_origin", m.time_origin_offset},
                          {"extracted_from", optional_json(m.extracted_from)}});
  }
  j["slots"] = json::array();
  for (const auto& s : doc.time_order) {
    const auto& v = doc.slots.at(s).value;
    j["slots"].push_back({{"id", s}, {"value", v ? json(*v) : json(nullptr)}});
  }
  j["types"] = json::array();
  for (const auto& [tid, t] : doc.linguistic_types) {
    j["types"].push_back({{"id", tid},
                          {"stereotype", to_string(t.stereotype)},
                          {"time_alignable", t.time_alignable},
                          {"ontological", t.ontological},
                          {"graphic_ref", t.graphic_ref}});
  }
  j["tiers"] = json::array();
  for (const auto& tid : tiers_top_down(doc)) {
    const auto& t = doc.tiers.at(tid);
    j["tiers"].push_back(
        {{"id", tid}, {"parent", optional_json(t.parent)}, {"type", t.type_id}, {"profile", optional_json(t.profile_ref)}});
  }
  std::vector<std::string> ids;
  for (const auto& [aid, a] : doc.annotations) ids.push_back(aid);
  std::sort(ids.begin(), ids.end(), [](const auto& x, const auto& y) { return annotation_ordinal(x) < annotation_ordinal(y); });
  j["annotations"] = json::array();
  for (const auto& aid : ids) {
    const auto& a = doc.annotations.at(aid);
    json ja{{"id", aid}, {"tier", annotation_tier(a)}, {"value", value_json(annotation_value(a))}};
    if (const auto* al = std::get_if<AlignableAnnotation>(&a)) {
      ja["kind"] = "alignable";
      ja["begin_slot"] = al->begin_slot;
      ja["end_slot"] = al->end_slot;
      ja["parent"] = optional_json(al->parent);
    } else {
      const auto& r = std::get<ReferringAnnotation>(a);
      ja["kind"] = "referring";
      ja["ref"] = r.ref_annotation;
      ja["previous"] = optional_json(r.previous);
    }
    try {
      auto ext = resolve_time_extent(doc, aid);
      ja["begin"] = ext.begin;
      ja["end"] = ext.end;
    } catch (const Error&) {
      ja["begin"] = nullptr;
      ja["end"] = nullptr;
    }
    j["annotations"].push_back(std::move(ja));
  }
  j["next_annotation_ordinal"] = doc.next_annotation_ordinal;
  j["next_slot_ordinal"] = doc.next_slot_ordinal;
  return j;
}

json class_node_json(const owl::ClassNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(class_node_json(c));
  return {{"iri", n.iri}, {"label", n.label}, {"children", children}};
}

json owl_value_json(const owl::Value& v) {
  if (const auto* r = std::get_if<owl::Resource>(&v)) return {{"resource", r->iri}};
  const auto& l = std::get<owl::Literal>(v);
  return {{"literal", l.lexical}, {"datatype", l.datatype}};
}

json individual_json(const owl::Individual& i) {
  json assertions = json::array();
  for (const auto& [p, v] : i.assertions) {
    auto jv = owl_value_json(v);
    jv["property"] = p;
    assertions.push_back(std::move(jv));
  }
  return {{"iri", i.iri}, {"label", owl::local_name(i.iri)}, {"types", i.types}, {"assertions", assertions}};
}

json profile_json(const std::string& id, const Profile& p) {
  json terms = json::array();
  for (const auto& t : p.terms) {
    terms.push_back({{"name", t.name}, {"description", t.description}, {"ontology_terms", t.ontology_terms}});
  }
  return {{"id", id},         {"author", p.author}, {"description", p.description},
          {"version", p.version}, {"source", p.source}, {"terms", terms}};
}

Profile profile_from(const json& j) {
  auto p = new_profile(j.value("author", ""), j.value("version", ""), j.value("source", ""));
  p.description = j.value("description", "");
  for (const auto& t : j.value("terms", json::array())) {
    add_term(p, t.value("name", ""), t.value("ontology_terms", std::vector<std::string>{}), t.value("description", ""));
  }
  return p;
}

json violations_json(const std::vector<Violation>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"rule", x.rule}, {"subject", x.subject}, {"message", x.message}});
  return out;
}

json parse_body(const Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw bad_request(std::string("invalid JSON body: ") + e.what());
  }
}

std::string need_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw bad_request(std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

std::int64_t need_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) throw bad_request(std::string("missing integer field '") + key + "'");
  return it->get<std::int64_t>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw bad_request(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

Response json_response(const json& j, int status = 200) { return {status, "application/json", j.dump()}; }

std::vector<std::string> list_files(const fs::path& root, std::string_view suffix) {
  std::vector<std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), root).generic_string();
    if (rel.ends_with(suffix) && !rel.starts_with("ontologies/")) out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<std::string> Request::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

// ---- Workspace ----

Workspace::Workspace(fs::path root) : root_(fs::absolute(std::move(root))) {
  std::error_code ec;
  fs::create_directories(root_ / "ontologies", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create workspace " + root_.string() + ": " + ec.message());
}

fs::path Workspace::path_of(std::string_view id) const {
  fs::path rel(id);
  if (id.empty() || rel.is_absolute()) throw bad_request("'" + std::string(id) + "' is not a workspace-relative path");
  for (const auto& part : rel) {
    if (part == "..") throw bad_request("'" + std::string(id) + "' leaves the workspace");
  }
  return root_ / rel;
}

std::string Workspace::url_of(std::string_view id) const {
  return "file://" + percent_encode_path(path_of(id).generic_string());
}

template <class T>
std::shared_ptr<Slot<T>> Workspace::find(std::map<std::string, std::shared_ptr<Slot<T>>>& m, const std::string& id) {
  std::lock_guard g(registry_);
  auto it = m.find(id);
  return it == m.end() ? nullptr : it->second;
}

std::shared_ptr<Slot<owl::OntologyDocument>> Workspace::ontology(const std::string& id) {
  if (auto s = find(ontologies_, id)) return s;
  if (id.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw Error(ErrorCode::NotFound, "no ontology '" + id + "'", {{"ontology", id}});
  }
  auto file = root_ / "ontologies" / (id + ".owl");
  if (!fs::exists(file)) throw Error(ErrorCode::NotFound, "no ontology '" + id + "'", {{"ontology", id}});
  auto base_file = root_ / "ontologies" / (id + ".base");
  std::string base = fs::exists(base_file) ? read_file(base_file) : "file://" + file.generic_string();
  auto slot = std::make_shared<Slot<owl::OntologyDocument>>();
  slot->value = owl::parse_ontology(read_file(file), base, file.string());
  std::lock_guard g(registry_);
  return ontologies_.emplace(id, slot).first->second;
}

std::string Workspace::add_ontology(std::string_view bytes, std::string_view base) {
  auto id = fnv1a_hex(bytes);
  if (find(ontologies_, id)) return id;
  std::string b = base.empty() ? "urn:ontotier:" + id : std::string(base);
  auto slot = std::make_shared<Slot<owl::OntologyDocument>>();
  slot->value = owl::parse_ontology(bytes, b, id);
  write_atomically(root_ / "ontologies" / (id + ".owl"), bytes);
  write_atomically(root_ / "ontologies" / (id + ".base"), b);
  std::lock_guard g(registry_);
  ontologies_.emplace(id, slot);
  return id;
}

std::shared_ptr<Slot<Profile>> Workspace::profile(const std::string& id) {
  if (auto s = find(profiles_, id)) return s;
  auto file = path_of(id);
  if (!fs::is_regular_file(file)) throw Error(ErrorCode::NotFound, "no profile '" + id + "'", {{"profile", id}});
  auto slot = std::make_shared<Slot<Profile>>();
  slot->value = parse_profile(read_file(file));
  std::lock_guard g(registry_);
  return profiles_.emplace(id, slot).first->second;
}

void Workspace::add_profile(const std::string& id, Profile p) {
  write_atomically(path_of(id), serialize_profile(p));
  std::lock_guard g(registry_);
  auto& slot = profiles_[id];
  if (!slot) slot = std::make_shared<Slot<Profile>>();
  std::unique_lock lock(slot->lock);
  slot->value = std::move(p);
}

std::shared_ptr<Slot<AnnotationDocument>> Workspace::document(const std::string& id) {
  if (auto s = find(documents_, id)) return s;
  auto file = path_of(id);
  if (!fs::is_regular_file(file)) throw Error(ErrorCode::NotFound, "no document '" + id + "'", {{"document", id}});
  auto slot = std::make_shared<Slot<AnnotationDocument>>();
  slot->value = load_document(read_file(file));
  std::lock_guard g(registry_);
  return documents_.emplace(id, slot).first->second;
}

void Workspace::add_document(const std::string& id, AnnotationDocument doc) {
  auto file = path_of(id);
  std::lock_guard g(registry_);
  if (documents_.contains(id) || fs::exists(file)) {
    throw Error(ErrorCode::DuplicateId, "document '" + id + "' already exists", {{"document", id}});
  }
  auto slot = std::make_shared<Slot<AnnotationDocument>>();
  slot->value = std::move(doc);
  documents_.emplace(id, slot);
}

void Workspace::close_document(const std::string& id) {
  std::lock_guard g(registry_);
  if (documents_.erase(id) == 0) throw Error(ErrorCode::NotFound, "document '" + id + "' is not open");
}

std::vector<std::string> Workspace::ontology_ids() {
  std::set<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_ / "ontologies")) {
    if (e.path().extension() == ".owl") ids.insert(e.path().stem().string());
  }
  std::lock_guard g(registry_);
  for (const auto& [id, s] : ontologies_) ids.insert(id);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> Workspace::profile_ids() {
  auto files = list_files(root_, ".prf");
  std::set<std::string> ids(files.begin(), files.end());
  std::lock_guard g(registry_);
  for (const auto& [id, s] : profiles_) ids.insert(id);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> Workspace::document_ids() {
  auto files = list_files(root_, ".eaf.rdf");
  std::set<std::string> ids(files.begin(), files.end());
  std::lock_guard g(registry_);
  for (const auto& [id, s] : documents_) ids.insert(id);
  return {ids.begin(), ids.end()};
}

ProfileLookup Workspace::profile_lookup() {
  auto cache = std::make_shared<std::map<std::string, Profile>>();
  return [this, cache](std::string_view ref) -> const Profile* {
    std::string key(ref);
    if (auto it = cache->find(key); it != cache->end()) return &it->second;
    try {
      auto slot = profile(key);
      std::shared_lock lock(slot->lock);
      return &cache->emplace(key, slot->value).first->second;
    } catch (const Error&) {
      return nullptr;
    }
  };
}

void Workspace::write_atomically(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "cannot write " + tmp.string(), {{"path", path.string()}});
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message(), {{"path", path.string()}});
  }
}

// ---- Api ----

namespace {

struct Route {
  std::string method;
  std::regex pattern;
  std::function<Response(const Request&, const std::smatch&)> run;
};

}  // namespace

Response Api::handle(const Request& req) {
  auto with_document = [&](const std::string& id, auto&& f) {
    auto slot = ws_.document(id);
    std::unique_lock lock(slot->lock);
    AnnotationDocument work = slot->value;
    json result = f(work);
    if (auto v = check_invariants(work); !v.empty()) {
      throw Error(ErrorCode::InvariantViolation, v.front().subject + ": " + v.front().message,
                  {{"rule", v.front().rule}});
    }
    slot->value = std::move(work);
    return json_response({{"result", result}, {"document", document_json(id, slot->value)}});
  };
  auto read_document = [&](const std::string& id, auto&& f) {
    auto slot = ws_.document(id);
    std::shared_lock lock(slot->lock);
    return f(static_cast<const AnnotationDocument&>(slot->value));
  };
  auto read_ontology = [&](const std::string& id, auto&& f) {
    auto slot = ws_.ontology(id);
    std::shared_lock lock(slot->lock);
    return f(static_cast<const owl::OntologyDocument&>(slot->value));
  };
  // Accepts a full IRI or a bare local name when that is unambiguous.
  auto resolve_class = [](const owl::OntologyDocument& doc, const std::string& c) {
    if (doc.classes.contains(c)) return c;
    std::optional<std::string> found;
    for (const auto& [iri, cls] : doc.classes) {
      if (owl::local_name(iri) == c) {
        if (found) throw Error(ErrorCode::UnknownClass, "class name '" + c + "' is ambiguous", {{"class", c}});
        found = iri;
      }
    }
    return found.value_or(c);
  };
  auto class_param = [&](const owl::OntologyDocument& doc) {
    auto c = req.param("class");
    if (!c) throw bad_request("missing query parameter 'class'");
    return resolve_class(doc, *c);
  };

  static const std::string D = "^/api/documents/(.+)";
  static const std::string P = "^/api/profiles/(.+)";
  static const std::string O = "^/api/ontologies/([0-9a-f]+)";

  std::vector<Route> routes = {
      {"GET", std::regex("^/api/health$"), [&](auto&, auto&) { return json_response({{"status", "ok"}}); }},

      // ontologies
      {"GET", std::regex("^/api/ontologies$"), [&](auto&, auto&) { return json_response(ws_.ontology_ids()); }},
      {"POST", std::regex("^/api/ontologies$"),
       [&](const Request& r, auto&) {
         auto id = ws_.add_ontology(r.body, r.param("base").value_or(""));
         return read_ontology(id, [&](const owl::OntologyDocument& doc) {
           return json_response({{"id", id},
                                 {"base", doc.base_iri},
                                 {"classes", doc.classes.size()},
                                 {"properties", doc.properties.size()},
                                 {"individuals", doc.individuals.size()},
                                 {"warnings", doc.warnings}},
                                201);
         });
       }},
      {"GET", std::regex(O + "/tree$"),
       [&](auto&, const std::smatch& m) {
         return read_ontology(m[1], [&](const owl::OntologyDocument& doc) {
           json out = json::array();
           for (const auto& n : owl::class_tree(doc)) out.push_back(class_node_json(n));
           return json_response(out);
         });
       }},
      {"GET", std::regex(O + "/index$"),
       [&](auto&, const std::smatch& m) {
         return read_ontology(m[1], [&](const owl::OntologyDocument& doc) {
           json out = json::array();
           for (const auto& e : owl::term_index(doc)) out.push_back({{"label", e.label}, {"iri", e.iri}});
           return json_response(out);
         });
       }},
      {"GET", std::regex(O + "/instances$"),
       [&](const Request& r, const std::smatch& m) {
         return read_ontology(m[1], [&](const owl::OntologyDocument& doc) {
           json out = json::array();
           for (const auto& i : owl::instances_of(doc, class_param(doc), r.param("transitive") != "false")) {
             out.push_back(individual_json(i));
           }
           return json_response(out);
         });
       }},
      {"GET", std::regex(O + "/properties$"),
       [&](auto&, const std::smatch& m) {
         return read_ontology(m[1], [&](const owl::OntologyDocument& doc) {
           json out = json::array();
           for (const auto& ap : owl::applicable_properties(doc, class_param(doc))) {
             const auto& c = ap.constraints;
             json has = json::array();
             for (const auto& v : c.has_values) has.push_back(owl_value_json(v));
             out.push_back({{"iri", ap.property.iri},
                            {"label", ap.property.label},
                            {"kind", ap.property.kind == owl::PropertyKind::Object ? "object" : "datatype"},
                            {"ranges", ap.property.ranges},
                            {"min", c.min},
                            {"max", c.max ? json(*c.max) : json(nullptr)},
                            {"all_values_from", c.all_values_from},
                            {"some_values_from", c.some_values_from},
                            {"has_values", has}});
           }
           return json_response(out);
         });
       }},
      {"POST", std::regex(O + "/individuals$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         auto slot = ws_.ontology(m[1]);
         std::unique_lock lock(slot->lock);
         auto work = slot->value;
         std::multimap<owl::Iri, owl::Value> assertions;
         for (const auto& a : body.value("assertions", json::array())) {
           auto prop = need_string(a, "property");
           if (a.contains("resource")) {
             assertions.emplace(prop, owl::Resource{need_string(a, "resource")});
           } else {
             assertions.emplace(prop, owl::Literal{need_string(a, "literal"), a.value("datatype", "")});
           }
         }
         auto cls = resolve_class(work, need_string(body, "class"));
         const auto& ind = owl::create_individual(work, cls, need_string(body, "id"), std::move(assertions));
         auto out = individual_json(ind);
         slot->value = std::move(work);
         return json_response(out, 201);
       }},
      {"GET", std::regex(O + "$"),
       [&](auto&, const std::smatch& m) {
         return read_ontology(m[1], [&](const owl::OntologyDocument& doc) {
           return json_response({{"id", m[1].str()},
                                 {"base", doc.base_iri},
                                 {"classes", doc.classes.size()},
                                 {"properties", doc.properties.size()},
                                 {"individuals", doc.individuals.size()},
                                 {"warnings", doc.warnings}});
         });
       }},

      // profiles
      {"GET", std::regex("^/api/profiles$"), [&](auto&, auto&) { return json_response(ws_.profile_ids()); }},
      {"POST", std::regex("^/api/profiles$"),
       [&](const Request& r, auto&) {
         auto body = parse_body(r);
         auto id = need_string(body, "id");
         if (fs::exists(ws_.path_of(id))) {
           throw Error(ErrorCode::DuplicateId, "profile '" + id + "' already exists", {{"profile", id}});
         }
         auto p = profile_from(body);
         ws_.add_profile(id, p);
         return json_response(profile_json(id, p), 201);
       }},
      {"GET", std::regex(P + "/validate$"),
       [&](const Request& r, const std::smatch& m) {
         auto onto = r.param("ontology");
         if (!onto) throw bad_request("missing query parameter 'ontology'");
         auto pslot = ws_.profile(m[1]);
         std::shared_lock plock(pslot->lock);
         return read_ontology(*onto, [&](const owl::OntologyDocument& doc) {
           json out = json::array();
           for (const auto& f : validate_against_ontology(pslot->value, doc)) {
             out.push_back({{"kind", f.kind == ProfileFinding::Kind::Unresolved ? "unresolved" : "ambiguous"},
                            {"user_term", f.user_term},
                            {"ontology_term", f.ontology_term},
                            {"candidates", f.candidates},
                            {"message", f.message()}});
           }
           return json_response(out);
         });
       }},
      {"POST", std::regex(P + "/terms$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         auto id = m[1].str();
         auto slot = ws_.profile(id);
         Profile p;
         {
           std::shared_lock lock(slot->lock);
           p = slot->value;
         }
         add_term(p, need_string(body, "name"), body.value("ontology_terms", std::vector<std::string>{}),
                  body.value("description", ""));
         ws_.add_profile(id, p);
         return json_response(profile_json(id, p), 201);
       }},
      {"GET", std::regex(P + "$"),
       [&](auto&, const std::smatch& m) {
         auto slot = ws_.profile(m[1]);
         std::shared_lock lock(slot->lock);
         return json_response(profile_json(m[1], slot->value));
       }},
      {"PUT", std::regex(P + "$"),
       [&](const Request& r, const std::smatch& m) {
         auto p = profile_from(parse_body(r));
         ws_.add_profile(m[1], p);
         return json_response(profile_json(m[1], p));
       }},

      // documents
      {"GET", std::regex("^/api/documents$"), [&](auto&, auto&) { return json_response(ws_.document_ids()); }},
      {"POST", std::regex("^/api/documents$"),
       [&](const Request& r, auto&) {
         auto body = parse_body(r);
         auto id = need_string(body, "id");
         std::vector<MediaDescriptor> media;
         for (const auto& m : body.value("media", json::array())) {
           MediaDescriptor md{need_string(m, "url"), m.value("mime_type", ""), m.value("time_origin", std::int64_t{0}),
                              opt_string(m, "extracted_from")};
           if (md.media_url.empty()) throw bad_request("media url must not be empty");
           media.push_back(std::move(md));
         }
         auto doc = new_document(ws_.url_of(id), std::move(media));
         ws_.add_document(id, doc);
         return json_response(document_json(id, doc), 201);
       }},
      {"POST", std::regex(D + "/save$"),
       [&](auto&, const std::smatch& m) {
         auto id = m[1].str();
         auto bytes = read_document(id, [](const AnnotationDocument& d) { return save_document(d); });
         Workspace::write_atomically(ws_.path_of(id), bytes);
         return json_response({{"saved", id}, {"bytes", bytes.size()}});
       }},
      {"GET", std::regex(D + "/export$"),
       [&](auto&, const std::smatch& m) {
         auto bytes = read_document(m[1], [](const AnnotationDocument& d) { return save_document(d); });
         return Response{200, "application/rdf+xml", std::move(bytes)};
       }},
      {"GET", std::regex(D + "/check$"),
       [&](auto&, const std::smatch& m) {
         auto lookup = ws_.profile_lookup();
         return read_document(m[1], [&](const AnnotationDocument& d) {
           return json_response(violations_json(check_invariants(d, lookup)));
         });
       }},
      {"GET", std::regex(D + "/search$"),
       [&](const Request& r, const std::smatch& m) {
         std::optional<std::vector<std::string>> tiers;
         if (auto t = r.param("tiers"); t && !t->empty()) {
           tiers.emplace();
           std::stringstream ss(*t);
           for (std::string part; std::getline(ss, part, ',');) tiers->push_back(part);
         }
         bool cs = r.param("case") != "insensitive";
         auto q = r.param("q").value_or("");
         return read_document(m[1], [&](const AnnotationDocument& d) {
           json out = json::array();
           for (const auto& h : search(d, q, tiers, cs)) {
             out.push_back({{"tier", h.tier_id},
                            {"annotation", h.annotation_id},
                            {"text", h.text},
                            {"begin", h.extent.begin},
                            {"end", h.extent.end}});
           }
           return json_response(out);
         });
       }},
      {"POST", std::regex(D + "/types$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         return with_document(m[1], [&](AnnotationDocument& d) {
           auto s = parse_stereotype(body.value("stereotype", "None"));
           if (!s) throw bad_request("unknown stereotype");
           auto id = need_string(body, "id");
           add_linguistic_type(d, id, *s, body.value("ontological", false));
           return json(id);
         });
       }},
      {"POST", std::regex(D + "/tiers$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         return with_document(m[1], [&](AnnotationDocument& d) {
           auto id = need_string(body, "id");
           add_tier(d, id, opt_string(body, "parent"), need_string(body, "type"), opt_string(body, "profile"));
           return json(id);
         });
       }},
      {"DELETE", std::regex(D + "/tiers/([^/]+)$"),
       [&](auto&, const std::smatch& m) {
         return with_document(m[1], [&](AnnotationDocument& d) {
           delete_tier(d, m[2].str());
           return json(m[2].str());
         });
       }},
      {"POST", std::regex(D + "/annotations/alignable$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         return with_document(m[1], [&](AnnotationDocument& d) {
           AnnotationValue v = body.contains("value") ? value_from(body["value"]) : StringValue{};
           return json(add_alignable_annotation(d, need_string(body, "tier"), need_int(body, "begin"),
                                                need_int(body, "end"), v));
         });
       }},
      {"POST", std::regex(D + "/annotations/subdivide$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         return with_document(m[1], [&](AnnotationDocument& d) {
           return json(subdivide_time(d, need_string(body, "parent"), need_string(body, "tier"),
                                      body.value("cuts", std::vector<std::int64_t>{})));
         });
       }},
      {"POST", std::regex(D + "/annotations/referring$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         auto lookup = ws_.profile_lookup();
         return with_document(m[1], [&](AnnotationDocument& d) {
           AnnotationValue v = body.contains("value") ? value_from(body["value"]) : StringValue{};
           return json(add_referring_annotation(d, need_string(body, "tier"), need_string(body, "parent"), v,
                                                opt_string(body, "after"), lookup));
         });
       }},
      {"PUT", std::regex(D + "/annotations/([^/]+)/value$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         auto lookup = ws_.profile_lookup();
         if (!body.contains("value")) throw bad_request("missing field 'value'");
         return with_document(m[1], [&](AnnotationDocument& d) {
           set_annotation_value(d, m[2].str(), value_from(body["value"]), lookup);
           return json(m[2].str());
         });
       }},
      {"GET", std::regex(D + "/annotations/([^/]+)/extent$"),
       [&](auto&, const std::smatch& m) {
         return read_document(m[1], [&](const AnnotationDocument& d) {
           auto e = resolve_time_extent(d, m[2].str());
           return json_response({{"begin", e.begin}, {"end", e.end}});
         });
       }},
      {"DELETE", std::regex(D + "/annotations/([^/]+)$"),
       [&](auto&, const std::smatch& m) {
         return with_document(m[1], [&](AnnotationDocument& d) {
           delete_annotation(d, m[2].str());
           return json(m[2].str());
         });
       }},
      {"PUT", std::regex(D + "/slots/([^/]+)$"),
       [&](const Request& r, const std::smatch& m) {
         auto body = parse_body(r);
         auto mode = body.value("mode", "reject");
         if (mode != "reject" && mode != "trim") throw bad_request("mode must be 'reject' or 'trim'");
         return with_document(m[1], [&](AnnotationDocument& d) {
           alter_time_slot(d, m[2].str(), need_int(body, "value"), mode == "trim" ? AlterMode::Trim : AlterMode::Reject);
           return json(m[2].str());
         });
       }},
      {"GET", std::regex(D + "$"),
       [&](auto&, const std::smatch& m) {
         return read_document(m[1], [&](const AnnotationDocument& d) { return json_response(document_json(m[1], d)); });
       }},
      {"DELETE", std::regex(D + "$"),
       [&](auto&, const std::smatch& m) {
         ws_.close_document(m[1]);
         return json_response({{"closed", m[1].str()}});
       }},
  };

  try {
    bool path_known = false;
    for (const auto& route : routes) {
      std::smatch m;
      if (!std::regex_match(req.path, m, route.pattern)) continue;
      path_known = true;
      if (route.method == req.method) return route.run(req, m);
    }
    if (path_known) return json_response({{"error", {{"code", "BadRequest"}, {"message", "method not allowed"}}}}, 405);
    throw Error(ErrorCode::NotFound, "no endpoint " + req.method + " " + req.path);
  } catch (const Error& e) {
    return json_response({{"error", {{"code", to_string(e.code())}, {"message", e.what()}, {"details", e.details()}}}},
                         status_for(e.code()));
  } catch (const json::exception& e) {
    return json_response({{"error", {{"code", "BadRequest"}, {"message", e.what()}, {"details", json::object()}}}}, 400);
  } catch (const std::exception& e) {
    return json_response({{"error", {{"code", "IoError"}, {"message", e.what()}, {"details", json::object()}}}}, 500);
  }
}

// ---- Server ----

struct Server::Impl {
  Options opts;
  Workspace ws;
  Api api;
  httplib::Server http;
  int port = -1;

  explicit Impl(Options o) : opts(std::move(o)), ws(opts.root), api(ws) {}
};

Server::Server(Options opts) : impl_(std::make_unique<Impl>(std::move(opts))) {
  auto& http = impl_->http;
  auto forward = [this](const httplib::Request& hreq, httplib::Response& hres) {
    Request req{hreq.method, hreq.path, {}, hreq.body};
    for (const auto& [k, v] : hreq.params) req.params.emplace(k, v);
    auto res = impl_->api.handle(req);
    hres.status = res.status;
    hres.set_content(res.body, res.content_type);
  };
  for (const char* pattern : {R"(/api/.*)"}) {
    http.Get(pattern, forward);
    http.Post(pattern, forward);
    http.Put(pattern, forward);
    http.Delete(pattern, forward);
  }
  std::error_code ec;
  fs::create_directories(impl_->ws.root() / "media", ec);
  http.set_mount_point("/media", (impl_->ws.root() / "media").string());
  http.set_file_extension_and_mimetype_mapping("wav", "audio/wav");
  if (impl_->opts.web_dir) http.set_mount_point("/", impl_->opts.web_dir->string());
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& i = *impl_;
  if (i.opts.port == 0) {
    i.port = i.http.bind_to_any_port(i.opts.bind);
  } else {
    i.port = i.http.bind_to_port(i.opts.bind, i.opts.port) ? i.opts.port : -1;
  }
  return i.port;
}

void Server::run() {
  if (impl_->opts.open_browser && impl_->port > 0) {
    auto url = "http://" + impl_->opts.bind + ":" + std::to_string(impl_->port) + "/";
    std::thread([url] { [[maybe_unused]] int rc = std::system(("xdg-open '" + url + "' >/dev/null 2>&1").c_str()); })
        .detach();
  }
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace ontotier::service
