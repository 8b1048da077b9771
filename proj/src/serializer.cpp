#include "ontotier/serializer.hpp"

#include "ontotier/error.hpp"
#include "ontotier/owl_model.hpp"
#include "ontotier/text.hpp"
#include "ontotier/xml.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

namespace ontotier {

namespace {

using xml::Element;

constexpr std::string_view kRdf = owl::ns::rdf;

// ---- writing ----

struct Writer {
  const std::string& base;
  std::string out;

  void line(int depth, std::string_view s) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += s;
    out += '\n';
  }
  void literal(int depth, std::string_view prop, std::string_view value) {
    line(depth, "<media:" + std::string(prop) + ">" + xml::escape_text(value) + "</media:" + std::string(prop) + ">");
  }
  void resource(int depth, std::string_view prop, std::string_view iri) {
    line(depth, "<media:" + std::string(prop) + " rdf:resource=\"" + xml::escape_attribute(iri) + "\"/>");
  }
  void local(int depth, std::string_view prop, std::string_view id) { resource(depth, prop, base + "#" + std::string(id)); }
  void open(int depth, std::string_view cls, std::string_view id) {
    line(depth, "<media:" + std::string(cls) + " rdf:ID=\"" + xml::escape_attribute(id) + "\">");
  }
  void close(int depth, std::string_view cls) { line(depth, "</media:" + std::string(cls) + ">"); }

  void type(int depth, const LinguisticType& t, bool standalone) {
    open(depth, "LinguisticType", t.id);
    literal(depth + 1, "hasTimeAlignable", t.time_alignable ? "true" : "false");
    literal(depth + 1, "hasLinguisticTypeID", t.id);
    if (t.stereotype != Stereotype::None) local(depth + 1, "hasConstraint", to_string(t.stereotype));
    literal(depth + 1, "hasGraphicRef", t.graphic_ref ? "true" : "false");
    if (standalone) literal(depth + 1, "hasOntologicalType", t.ontological ? "true" : "false");
    close(depth, "LinguisticType");
  }

  void value(int depth, const std::string& id, const AnnotationValue& v) {
    line(depth, "<media:hasAnnotationValue>");
    if (const auto* s = std::get_if<StringValue>(&v)) {
      open(depth + 1, "StringAnnotation", id + "Value");
      literal(depth + 2, "hasStringValue", s->text);
      close(depth + 1, "StringAnnotation");
    } else {
      const auto& o = std::get<OntologyValue>(v);
      open(depth + 1, "OntologyAnnotation", id + "Value");
      literal(depth + 2, "hasUserDefinedTerm", o.user_defined_term);
      for (const auto& i : o.instances) resource(depth + 2, "hasInstances", i);
      for (const auto& d : o.descriptions) literal(depth + 2, "hasOntAnnotationDescription", d);
      literal(depth + 2, "hasOntAnnotationId", o.ont_annotation_id);
      close(depth + 1, "OntologyAnnotation");
    }
    line(depth, "</media:hasAnnotationValue>");
  }
};

std::vector<std::string> by_ordinal(const AnnotationDocument& doc) {
  std::vector<std::string> ids;
  for (const auto& [id, a] : doc.annotations) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [](const std::string& x, const std::string& y) {
    return annotation_ordinal(x) < annotation_ordinal(y);
  });
  return ids;
}

// ---- reading ----

bool is_media(const Element& el, std::string_view name) { return el.is(kMediaNs, name); }

const std::string* rdf_id(const Element& el) { return el.attribute(kRdf, "ID"); }

std::vector<const Element*> props(const Element& el, std::string_view name) {
  std::vector<const Element*> out;
  for (const auto& c : el.children) {
    if (is_media(c, name)) out.push_back(&c);
  }
  return out;
}

Error schema(const Element& el, const std::string& message) {
  return Error(ErrorCode::SchemaViolation, "line " + std::to_string(el.line) + ": " + message,
               {{"element", el.name}, {"line", std::to_string(el.line)}});
}

const Element* optional_prop(const Element& el, std::string_view name) {
  auto list = props(el, name);
  if (list.size() > 1) throw schema(el, el.name + " has more than one " + std::string(name));
  return list.empty() ? nullptr : list.front();
}

const Element& required_prop(const Element& el, std::string_view name) {
  const auto* p = optional_prop(el, name);
  if (p == nullptr) throw schema(el, el.name + " lacks " + std::string(name));
  return *p;
}

std::int64_t parse_int(const Element& el) {
  auto s = text::trim(el.text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw schema(el, "'" + std::string(s) + "' is not an integer");
  }
  return v;
}

bool parse_bool(const Element& el) {
  auto s = text::trim(el.text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw schema(el, "'" + std::string(s) + "' is not a boolean");
}

struct Loader {
  std::string base;
  std::map<std::string, const Element*> nodes;

  void index(const Element& el) {
    if (const auto* id = rdf_id(el)) {
      if (!nodes.emplace(*id, &el).second) throw schema(el, "rdf:ID '" + *id + "' is used twice");
    }
    for (const auto& c : el.children) index(c);
  }

  std::string resource_of(const Element& prop) const {
    const auto* r = prop.attribute(kRdf, "resource");
    if (r == nullptr) throw schema(prop, prop.name + " needs an rdf:resource");
    return *r;
  }

  std::string fragment(const Element& prop) const {
    auto iri = resource_of(prop);
    auto prefix = base + "#";
    if (!iri.starts_with(prefix)) {
      throw Error(ErrorCode::DanglingReference,
                  "line " + std::to_string(prop.line) + ": " + prop.name + " points outside the document: " + iri,
                  {{"reference", iri}});
    }
    return iri.substr(prefix.size());
  }

  const Element& target(const Element& prop, std::string_view cls) const {
    auto id = fragment(prop);
    auto it = nodes.find(id);
    if (it == nodes.end()) {
      throw Error(ErrorCode::DanglingReference,
                  "line " + std::to_string(prop.line) + ": " + prop.name + " refers to missing '" + id + "'",
                  {{"reference", id}});
    }
    if (!cls.empty() && !is_media(*it->second, cls)) {
      throw schema(prop, prop.name + " refers to '" + id + "', which is not a " + std::string(cls));
    }
    return *it->second;
  }

  const Element& annotation_target(const Element& prop) const {
    const auto& t = target(prop, "");
    if (!is_media(t, "AlignableAnnotation") && !is_media(t, "RefAnnotation")) {
      throw schema(prop, prop.name + " does not refer to an annotation");
    }
    return t;
  }

  std::string own_id(const Element& el, std::string_view id_prop) const {
    const auto* id = rdf_id(el);
    if (id == nullptr) throw schema(el, el.name + " lacks rdf:ID");
    if (required_prop(el, id_prop).text != *id) {
      throw schema(el, std::string(id_prop) + " disagrees with rdf:ID '" + *id + "'");
    }
    return *id;
  }

  LinguisticType type(const Element& el) const {
    LinguisticType t;
    t.id = own_id(el, "hasLinguisticTypeID");
    t.time_alignable = parse_bool(required_prop(el, "hasTimeAlignable"));
    t.graphic_ref = parse_bool(required_prop(el, "hasGraphicRef"));
    if (const auto* c = optional_prop(el, "hasConstraint")) {
      auto name = fragment(*c);
      auto s = parse_stereotype(name);
      if (!s) {
        throw Error(ErrorCode::UnknownConstraint, "line " + std::to_string(c->line) + ": unknown constraint " + name,
                    {{"constraint", name}});
      }
      t.stereotype = *s;
    }
    if (t.time_alignable != is_time_alignable(t.stereotype)) {
      throw schema(el, "hasTimeAlignable contradicts the constraint of type " + t.id);
    }
    if (const auto* o = optional_prop(el, "hasOntologicalType")) t.ontological = parse_bool(*o);
    return t;
  }

  AnnotationValue value(const Element& el) const {
    const auto& holder = required_prop(el, "hasAnnotationValue");
    if (holder.children.size() != 1) throw schema(holder, "hasAnnotationValue must hold exactly one value node");
    const auto& v = holder.children.front();
    if (is_media(v, "StringAnnotation")) return StringValue{required_prop(v, "hasStringValue").text};
    if (is_media(v, "OntologyAnnotation")) {
      OntologyValue o;
      o.user_defined_term = required_prop(v, "hasUserDefinedTerm").text;
      o.ont_annotation_id = required_prop(v, "hasOntAnnotationId").text;
      for (const auto* i : props(v, "hasInstances")) o.instances.push_back(resource_of(*i));
      for (const auto* d : props(v, "hasOntAnnotationDescription")) o.descriptions.push_back(d->text);
      return o;
    }
    throw schema(v, "unexpected value node " + v.qualified_name());
  }
};

const std::set<std::string_view> kTopLevel = {"AnnotationDocument", "MediaDescriptor", "LinguisticType", "TimeSlot",
                                              "Tier", "AlignableAnnotation", "RefAnnotation"};

struct Card {
  std::string_view prop;
  std::size_t min;
  std::size_t max;
};

constexpr std::size_t kMany = static_cast<std::size_t>(-1);

const std::map<std::string_view, std::vector<Card>> kCardinalities = {
    {"AnnotationDocument",
     {{"hasTimeUnit", 1, 1}, {"hasNextAnnotationOrdinal", 1, 1}, {"hasNextTimeSlotOrdinal", 1, 1}}},
    {"MediaDescriptor", {{"hasMediaURL", 1, 1}, {"hasMimeType", 1, 1}, {"hasTimeOrigin", 1, 1}, {"hasExtractedFrom", 0, 1}}},
    {"TimeSlot", {{"hasTimeSlotID", 1, 1}, {"hasTimeValue", 1, 1}}},
    {"LinguisticType",
     {{"hasTimeAlignable", 1, 1},
      {"hasLinguisticTypeID", 1, 1},
      {"hasConstraint", 0, 1},
      {"hasGraphicRef", 1, 1},
      {"hasOntologicalType", 0, 1}}},
    {"Tier", {{"hasTierID", 1, 1}, {"hasParent", 0, 1}, {"hasProfile", 0, 1}, {"hasLinguisticType", 1, 1}}},
    {"AlignableAnnotation",
     {{"hasAnnotationID", 1, 1},
      {"hasBeginTimeSlot", 1, 1},
      {"hasEndTimeSlot", 1, 1},
      {"hasAnnotationRef", 0, 1},
      {"hasAnnotationValue", 1, 1}}},
    {"RefAnnotation",
     {{"hasAnnotationID", 1, 1}, {"hasAnnotationRef", 1, 1}, {"hasPreviousAnnotation", 0, 1}, {"hasAnnotationValue", 1, 1}}},
    {"StringAnnotation", {{"hasStringValue", 1, 1}}},
    {"OntologyAnnotation",
     {{"hasUserDefinedTerm", 1, 1},
      {"hasInstances", 1, kMany},
      {"hasOntAnnotationDescription", 0, kMany},
      {"hasOntAnnotationId", 1, 1}}},
};

}  // namespace

std::string save_document(const AnnotationDocument& doc) {
  if (doc.id.empty()) throw Error(ErrorCode::InvariantViolation, "document has no base IRI");
  for (const auto& [id, s] : doc.slots) {
    if (!s.value) throw Error(ErrorCode::UnsetTimes, "time slot " + id + " has no value", {{"slot", id}});
  }
  if (auto v = check_invariants(doc); !v.empty()) {
    throw Error(ErrorCode::InvariantViolation, v.front().subject + ": " + v.front().message,
                {{"rule", v.front().rule}, {"subject", v.front().subject}});
  }

  Writer w{doc.id, {}};
  w.line(0, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
  w.line(0, "<rdf:RDF xmlns:rdf=\"" + std::string(kRdf) + "\" xmlns:media=\"" + std::string(kMediaNs) +
                "\" xml:base=\"" + xml::escape_attribute(doc.id) + "\">");

  w.line(0, "<media:AnnotationDocument rdf:about=\"" + xml::escape_attribute(doc.id) + "\">");
  w.resource(1, "hasTimeUnit", std::string(kMediaNs) + "milliseconds");
  w.literal(1, "hasNextAnnotationOrdinal", std::to_string(doc.next_annotation_ordinal));
  w.literal(1, "hasNextTimeSlotOrdinal", std::to_string(doc.next_slot_ordinal));
  for (std::size_t i = 0; i < doc.media.size(); ++i) w.local(1, "hasMediaDescriptor", "media" + std::to_string(i + 1));
  for (const auto& [id, t] : doc.tiers) w.local(1, "hasTier", id);
  w.close(0, "AnnotationDocument");

  for (std::size_t i = 0; i < doc.media.size(); ++i) {
    const auto& m = doc.media[i];
    w.open(0, "MediaDescriptor", "media" + std::to_string(i + 1));
    w.literal(1, "hasMediaURL", m.media_url);
    w.literal(1, "hasMimeType", m.mime_type);
    w.literal(1, "hasTimeOrigin", std::to_string(m.time_origin_offset));
    if (m.extracted_from) w.literal(1, "hasExtractedFrom", *m.extracted_from);
    w.close(0, "MediaDescriptor");
  }

  // A type used by tiers is written inside the first of them; others stand alone.
  std::map<std::string, std::string> nesting_tier;
  for (const auto& [id, t] : doc.tiers) nesting_tier.emplace(t.type_id, id);
  for (const auto& [id, t] : doc.linguistic_types) {
    if (!nesting_tier.contains(id)) w.type(0, t, true);
  }

  for (const auto& id : doc.time_order) {
    w.open(0, "TimeSlot", id);
    w.literal(1, "hasTimeSlotID", id);
    w.literal(1, "hasTimeValue", std::to_string(*doc.slots.at(id).value));
    w.close(0, "TimeSlot");
  }

  auto ordered = by_ordinal(doc);
  for (const auto& [id, t] : doc.tiers) {
    w.open(0, "Tier", id);
    w.literal(1, "hasTierID", id);
    if (t.parent) w.local(1, "hasParent", *t.parent);
    if (t.profile_ref) w.literal(1, "hasProfile", *t.profile_ref);
    if (nesting_tier.at(t.type_id) == id) {
      w.line(1, "<media:hasLinguisticType>");
      w.type(2, doc.linguistic_types.at(t.type_id), false);
      w.line(1, "</media:hasLinguisticType>");
    } else {
      w.local(1, "hasLinguisticType", t.type_id);
    }
    for (const auto& a : ordered) {
      if (annotation_tier(doc.annotations.at(a)) == id) w.local(1, "hasAnnotation", a);
    }
    w.close(0, "Tier");
  }

  for (const auto& id : ordered) {
    const auto& a = doc.annotations.at(id);
    if (const auto* al = std::get_if<AlignableAnnotation>(&a)) {
      w.open(0, "AlignableAnnotation", id);
      w.literal(1, "hasAnnotationID", id);
      w.local(1, "hasBeginTimeSlot", al->begin_slot);
      w.local(1, "hasEndTimeSlot", al->end_slot);
      if (al->parent) w.local(1, "hasAnnotationRef", *al->parent);
      w.value(1, id, al->value);
      w.close(0, "AlignableAnnotation");
    } else {
      const auto& r = std::get<ReferringAnnotation>(a);
      w.open(0, "RefAnnotation", id);
      w.literal(1, "hasAnnotationID", id);
      w.local(1, "hasAnnotationRef", r.ref_annotation);
      if (r.previous) w.local(1, "hasPreviousAnnotation", *r.previous);
      w.value(1, id, r.value);
      w.close(0, "RefAnnotation");
    }
  }
  w.line(0, "</rdf:RDF>");
  return std::move(w.out);
}

AnnotationDocument load_document(std::string_view bytes) {
  auto root = xml::parse(bytes);
  if (!root.is(kRdf, "RDF")) throw schema(root, "root element must be rdf:RDF");
  const auto* base = root.attribute(xml::kXmlNs, "base");
  if (base == nullptr || base->empty()) throw schema(root, "rdf:RDF lacks xml:base");

  Loader L{*base, {}};
  for (const auto& el : root.children) {
    if (el.ns != kMediaNs || !kTopLevel.contains(el.name)) {
      throw schema(el, "unexpected top-level element " + el.qualified_name());
    }
  }
  L.index(root);

  AnnotationDocument doc;
  doc.id = *base;

  const Element* doc_node = nullptr;
  for (const auto& el : root.children) {
    if (!is_media(el, "AnnotationDocument")) continue;
    if (doc_node != nullptr) throw schema(el, "more than one AnnotationDocument");
    doc_node = &el;
  }
  if (doc_node == nullptr) throw schema(root, "no AnnotationDocument node");
  if (const auto* about = doc_node->attribute(kRdf, "about"); about == nullptr || *about != *base) {
    throw schema(*doc_node, "AnnotationDocument must be rdf:about the base IRI");
  }
  if (L.resource_of(required_prop(*doc_node, "hasTimeUnit")) != std::string(kMediaNs) + "milliseconds") {
    throw schema(*doc_node, "unsupported time unit");
  }
  doc.next_annotation_ordinal = static_cast<std::uint64_t>(parse_int(required_prop(*doc_node, "hasNextAnnotationOrdinal")));
  doc.next_slot_ordinal = static_cast<std::uint64_t>(parse_int(required_prop(*doc_node, "hasNextTimeSlotOrdinal")));

  std::set<const Element*> listed_media;
  for (const auto* p : props(*doc_node, "hasMediaDescriptor")) {
    const auto& m = L.target(*p, "MediaDescriptor");
    if (!listed_media.insert(&m).second) throw schema(*p, "media descriptor listed twice");
    MediaDescriptor md;
    md.media_url = required_prop(m, "hasMediaURL").text;
    md.mime_type = required_prop(m, "hasMimeType").text;
    md.time_origin_offset = parse_int(required_prop(m, "hasTimeOrigin"));
    if (const auto* x = optional_prop(m, "hasExtractedFrom")) md.extracted_from = x->text;
    doc.media.push_back(std::move(md));
  }
  std::set<std::string> listed_tiers;
  for (const auto* p : props(*doc_node, "hasTier")) {
    L.target(*p, "Tier");
    listed_tiers.insert(L.fragment(*p));
  }

  // Types: nested ones take their ontological flag from the enclosing tier.
  std::map<std::string, const Element*> type_nodes;
  for (const auto& [id, el] : L.nodes) {
    if (is_media(*el, "LinguisticType")) type_nodes.emplace(id, el);
  }
  for (const auto& [id, el] : type_nodes) doc.linguistic_types.emplace(id, L.type(*el));

  std::map<std::string, std::string> tier_of_annotation;
  for (const auto& el : root.children) {
    if (is_media(el, "MediaDescriptor") && !listed_media.contains(&el)) {
      throw schema(el, "media descriptor not listed by the document");
    }
    if (is_media(el, "TimeSlot")) {
      auto id = L.own_id(el, "hasTimeSlotID");
      doc.slots.emplace(id, TimeSlot{id, parse_int(required_prop(el, "hasTimeValue"))});
      doc.time_order.push_back(id);
    }
    if (!is_media(el, "Tier")) continue;
    Tier t;
    t.id = L.own_id(el, "hasTierID");
    if (!listed_tiers.contains(t.id)) throw schema(el, "tier " + t.id + " not listed by the document");
    if (const auto* p = optional_prop(el, "hasParent")) {
      L.target(*p, "Tier");
      t.parent = L.fragment(*p);
    }
    if (const auto* p = optional_prop(el, "hasProfile")) t.profile_ref = p->text;
    const auto& lt = required_prop(el, "hasLinguisticType");
    if (lt.children.empty()) {
      L.target(lt, "LinguisticType");
      t.type_id = L.fragment(lt);
    } else {
      if (lt.children.size() != 1 || !is_media(lt.children.front(), "LinguisticType")) {
        throw schema(lt, "hasLinguisticType must hold one LinguisticType");
      }
      const auto& nested = lt.children.front();
      t.type_id = *rdf_id(nested);
      if (!optional_prop(nested, "hasOntologicalType")) {
        doc.linguistic_types.at(t.type_id).ontological = t.profile_ref.has_value();
      }
    }
    for (const auto* a : props(el, "hasAnnotation")) {
      L.annotation_target(*a);
      if (!tier_of_annotation.emplace(L.fragment(*a), t.id).second) {
        throw schema(*a, "annotation " + L.fragment(*a) + " belongs to two tiers");
      }
    }
    doc.tiers.emplace(t.id, std::move(t));
  }
  if (listed_tiers.size() != doc.tiers.size()) throw schema(*doc_node, "document lists tiers that are not defined");

  for (const auto& el : root.children) {
    bool alignable = is_media(el, "AlignableAnnotation");
    if (!alignable && !is_media(el, "RefAnnotation")) continue;
    auto id = L.own_id(el, "hasAnnotationID");
    auto tier = tier_of_annotation.find(id);
    if (tier == tier_of_annotation.end()) throw schema(el, "annotation " + id + " belongs to no tier");
    if (alignable) {
      AlignableAnnotation a{id, tier->second, {}, {}, std::nullopt, L.value(el)};
      L.target(required_prop(el, "hasBeginTimeSlot"), "TimeSlot");
      L.target(required_prop(el, "hasEndTimeSlot"), "TimeSlot");
      a.begin_slot = L.fragment(required_prop(el, "hasBeginTimeSlot"));
      a.end_slot = L.fragment(required_prop(el, "hasEndTimeSlot"));
      if (const auto* p = optional_prop(el, "hasAnnotationRef")) {
        L.target(*p, "AlignableAnnotation");
        a.parent = L.fragment(*p);
      }
      doc.annotations.emplace(id, std::move(a));
    } else {
      ReferringAnnotation r{id, tier->second, {}, std::nullopt, L.value(el)};
      const auto& ref = required_prop(el, "hasAnnotationRef");
      L.annotation_target(ref);
      r.ref_annotation = L.fragment(ref);
      if (const auto* p = optional_prop(el, "hasPreviousAnnotation")) {
        L.target(*p, "RefAnnotation");
        r.previous = L.fragment(*p);
      }
      doc.annotations.emplace(id, std::move(r));
    }
  }

  if (auto v = check_invariants(doc); !v.empty()) {
    throw Error(ErrorCode::InvariantViolation, v.front().subject + ": " + v.front().message,
                {{"rule", v.front().rule}, {"subject", v.front().subject}});
  }
  return doc;
}

std::vector<Violation> validate_file(std::string_view bytes) {
  auto root = xml::parse(bytes);
  std::vector<Violation> out;
  auto fail = [&](std::string rule, std::string subject, std::string message) {
    out.push_back({std::move(rule), std::move(subject), std::move(message)});
  };
  if (!root.is(kRdf, "RDF")) {
    fail("root", root.qualified_name(), "root element must be rdf:RDF");
    return out;
  }
  std::string base;
  if (const auto* b = root.attribute(xml::kXmlNs, "base")) base = *b;
  if (base.empty()) fail("base", "rdf:RDF", "missing xml:base");

  std::set<std::string> ids;
  std::map<std::string, std::optional<std::string>> tier_parent;
  std::vector<std::pair<const Element*, std::string>> references;
  std::size_t documents = 0;

  auto subject_of = [](const Element& el) {
    const auto* id = rdf_id(el);
    return id ? *id : el.name + "@" + std::to_string(el.line);
  };

  std::function<void(const Element&)> node = [&](const Element& el) {
    auto subject = subject_of(el);
    if (const auto* id = rdf_id(el); id && !ids.insert(*id).second) fail("duplicate-id", *id, "rdf:ID used twice");
    if (el.ns != kMediaNs || !kCardinalities.contains(el.name)) {
      fail("unknown-class", subject, "unexpected node " + el.qualified_name());
      return;
    }
    if (el.name == "AnnotationDocument") ++documents;
    for (const auto& c : kCardinalities.at(el.name)) {
      auto n = props(el, c.prop).size();
      if (n < c.min || n > c.max) {
        std::string expected = c.max == kMany ? "at least " + std::to_string(c.min)
                               : c.min == c.max ? "exactly " + std::to_string(c.min)
                                                : "at most " + std::to_string(c.max);
        fail("cardinality", subject,
             el.name + " has " + std::to_string(n) + " " + std::string(c.prop) + ", expected " + expected);
      }
    }
    if (el.name == "Tier") {
      std::optional<std::string> parent;
      if (const auto* p = optional_prop(el, "hasParent")) {
        if (const auto* r = p->attribute(kRdf, "resource")) parent = r->starts_with(base + "#") ? r->substr(base.size() + 1) : *r;
      }
      tier_parent[subject] = parent;
    }
    for (const auto& p : el.children) {
      if (const auto* r = p.attribute(kRdf, "resource")) {
        if (p.name != "hasInstances" && p.name != "hasTimeUnit") references.push_back({&p, *r});
      }
      for (const auto& nested : p.children) node(nested);
    }
  };
  for (const auto& el : root.children) node(el);

  if (documents != 1) fail("document", base, "expected one AnnotationDocument, found " + std::to_string(documents));
  for (const auto& [p, iri] : references) {
    auto prefix = base + "#";
    if (!iri.starts_with(prefix)) {
      fail("dangling-reference", iri, p->name + " points outside the document");
    } else if (auto frag = iri.substr(prefix.size()); p->name == "hasConstraint") {
      if (!parse_stereotype(frag)) fail("unknown-constraint", frag, "unknown constraint");
    } else if (!ids.contains(frag)) {
      fail("dangling-reference", frag, p->name + " refers to a missing node");
    }
  }
  for (const auto& [tier, parent] : tier_parent) {
    std::set<std::string> seen{tier};
    for (auto p = parent; p;) {
      auto it = tier_parent.find(*p);
      if (it == tier_parent.end()) {
        fail("tier-forest", tier, "parent " + *p + " is not a tier");
        break;
      }
      if (!seen.insert(*p).second) {
        fail("tier-forest", tier, "tier parents form a cycle");
        break;
      }
      p = it->second;
    }
  }
  return out;
}

}  // namespace ontotier
