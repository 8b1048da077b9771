#include "ontotier/owl_model.hpp"

#include "ontotier/error.hpp"
#include "ontotier/text.hpp"
#include "ontotier/xml.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

namespace ontotier::owl {

namespace {

bool has_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    char c = s[i];
    if (c == ':') return true;
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  return false;
}

std::string_view strip_fragment(std::string_view iri) {
  auto pos = iri.find('#');
  return pos == std::string_view::npos ? iri : iri.substr(0, pos);
}

// Supported vocabulary. Anything else from the rdf/rdfs/owl namespaces is
// reported as a warning.
bool is_annotation_element(const xml::Element& el) {
  return el.is(ns::rdfs, "comment") || el.is(ns::rdfs, "seeAlso") || el.is(ns::rdfs, "isDefinedBy") ||
         el.is(ns::owl, "versionInfo");
}

bool is_builtin_ns(std::string_view n) { return n == ns::rdf || n == ns::rdfs || n == ns::owl; }

std::string owl_iri(std::string_view local) { return std::string(ns::owl) + std::string(local); }

class Parser {
public:
  explicit Parser(OntologyDocument& doc) : doc_(doc) {}

  void top_level(const xml::Element& el) {
    if (el.is(ns::owl, "Ontology")) {
      ontology_header(el);
    } else if (el.is(ns::owl, "Class") || el.is(ns::rdfs, "Class")) {
      if (auto iri = subject(el)) {
        class_node(el, *iri);
      } else {
        scan_anonymous(el, "anonymous top-level class");
      }
    } else if (auto kind = property_element_kind(el)) {
      if (auto iri = subject(el)) {
        property_node(el, *iri, kind->first, kind->second);
      } else {
        warn(el, "anonymous property declaration");
      }
    } else if (el.is(ns::rdf, "Description")) {
      description(el);
    } else if (!is_builtin_ns(el.ns) || el.is(ns::owl, "Thing")) {
      individual_node(el);
    } else {
      warn(el, "unsupported construct");
    }
  }

  void finish() {
    // Individuals may assert properties declared later in the file.
    for (auto& [iri, ind] : doc_.individuals) {
      for (auto it = ind.assertions.begin(); it != ind.assertions.end();) {
        if (!doc_.properties.contains(it->first)) {
          doc_.warnings.push_back("assertion on undeclared property " + it->first + " dropped from individual " + iri);
          it = ind.assertions.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& [iri, cls] : doc_.classes) {
      if (cls.superclasses.erase(iri) != 0) {
        doc_.warnings.push_back("class " + iri + " declared as its own subclass; axiom ignored");
      }
      for (const auto& sup : cls.superclasses) {
        if (!doc_.classes.contains(sup)) {
          doc_.warnings.push_back("superclass " + sup + " of " + iri + " is external to this document");
        }
      }
      for (const auto& r : cls.restrictions) {
        if (!doc_.properties.contains(r.on_property)) {
          doc_.warnings.push_back("restriction on undeclared property " + r.on_property + " in class " + iri);
        }
      }
    }
    for (auto& [iri, prop] : doc_.properties) {
      if (!explicit_kind_.contains(iri) && !prop.ranges.empty() &&
          std::all_of(prop.ranges.begin(), prop.ranges.end(),
                      [](const Iri& r) { return r.starts_with(ns::xsd) || r == std::string(ns::rdfs) + "Literal"; })) {
        prop.kind = PropertyKind::Datatype;
      }
      constexpr unsigned object_only = InverseFunctional | Transitive | Symmetric;
      if (prop.kind == PropertyKind::Datatype && (prop.characteristics & object_only) != 0) {
        doc_.warnings.push_back("datatype property " + iri +
                                " cannot be inverse-functional, transitive or symmetric; characteristic ignored");
        prop.characteristics &= ~object_only;
      }
    }
    check_acyclic();
  }

private:
  OntologyDocument& doc_;
  std::set<Iri> explicit_kind_;

  void warn(const xml::Element& el, std::string_view what) {
    doc_.warnings.push_back(std::string(what) + ": " + el.qualified_name() + " (line " + std::to_string(el.line) +
                            ")");
  }

  Iri resolve(std::string_view ref) { return resolve_iri(doc_.base_iri, ref); }

  std::optional<Iri> subject(const xml::Element& el) {
    if (const auto* id = el.attribute(ns::rdf, "ID")) return resolve("#" + *id);
    if (const auto* about = el.attribute(ns::rdf, "about")) return resolve(*about);
    return std::nullopt;
  }

  std::optional<Iri> resource(const xml::Element& el) {
    if (const auto* r = el.attribute(ns::rdf, "resource")) return resolve(*r);
    return std::nullopt;
  }

  static std::optional<std::pair<PropertyKind, unsigned>> property_element_kind(const xml::Element& el) {
    if (el.ns != ns::owl && !(el.ns == ns::rdf && el.name == "Property")) return std::nullopt;
    if (el.name == "ObjectProperty") return std::pair{PropertyKind::Object, 0u};
    if (el.name == "DatatypeProperty") return std::pair{PropertyKind::Datatype, 0u};
    if (el.name == "FunctionalProperty") return std::pair{PropertyKind::Object, unsigned{Functional}};
    if (el.name == "InverseFunctionalProperty") return std::pair{PropertyKind::Object, unsigned{InverseFunctional}};
    if (el.name == "TransitiveProperty") return std::pair{PropertyKind::Object, unsigned{Transitive}};
    if (el.name == "SymmetricProperty") return std::pair{PropertyKind::Object, unsigned{Symmetric}};
    if (el.name == "Property") return std::pair{PropertyKind::Object, 0u};
    return std::nullopt;
  }

  // Walks an unsupported or anonymous subtree, warning once for each
  // unsupported element at its root and never descending into it.
  void scan_anonymous(const xml::Element& el, std::string_view what) {
    bool found = false;
    for (const auto& child : el.children) {
      if (is_unsupported_expression(child)) {
        warn(child, "unsupported construct");
        found = true;
      }
    }
    if (!found) warn(el, what);
  }

  static bool is_unsupported_expression(const xml::Element& el) {
    return el.is(ns::owl, "unionOf") || el.is(ns::owl, "intersectionOf") || el.is(ns::owl, "complementOf");
  }

  void ontology_header(const xml::Element& el) {
    for (const auto& child : el.children) {
      if (child.is(ns::rdfs, "label") || is_annotation_element(child) || child.is(ns::owl, "priorVersion")) continue;
      warn(child, "unsupported ontology header property");
    }
  }

  static std::string label_of(const xml::Element& el) { return el.text; }

  OwlClass& declare_class(const Iri& iri) {
    auto [it, inserted] = doc_.classes.try_emplace(iri);
    if (inserted) {
      it->second.iri = iri;
      it->second.label = local_name(iri);
    }
    return it->second;
  }

  // Named class reference given either as rdf:resource or a nested named
  // owl:Class; nested anonymous class expressions produce warnings.
  std::optional<Iri> class_reference(const xml::Element& el) {
    if (auto r = resource(el)) return r;
    for (const auto& child : el.children) {
      if (child.is(ns::owl, "Class") || child.is(ns::rdfs, "Class")) {
        if (auto iri = subject(child)) {
          class_node(child, *iri);
          return iri;
        }
        scan_anonymous(child, "anonymous class expression");
      } else if (child.is(ns::rdfs, "Datatype")) {
        if (auto iri = subject(child)) return iri;
        warn(child, "anonymous datatype");
      } else {
        warn(child, "unsupported construct");
      }
    }
    return std::nullopt;
  }

  void class_node(const xml::Element& el, const Iri& iri) {
    declare_class(iri);
    bool labelled = false;
    for (const auto& child : el.children) {
      if (child.is(ns::rdfs, "subClassOf")) {
        if (auto r = resource(child)) {
          if (*r != owl_iri("Thing")) declare_class(iri).superclasses.insert(*r);
          continue;
        }
        for (const auto& nested : child.children) {
          if (nested.is(ns::owl, "Restriction")) {
            restriction(nested, iri);
          } else if (nested.is(ns::owl, "Class") || nested.is(ns::rdfs, "Class")) {
            if (auto sup = subject(nested)) {
              class_node(nested, *sup);
              if (*sup != owl_iri("Thing")) declare_class(iri).superclasses.insert(*sup);
            } else {
              scan_anonymous(nested, "anonymous superclass expression");
            }
          } else {
            warn(nested, "unsupported construct");
          }
        }
      } else if (child.is(ns::rdfs, "label")) {
        const auto* lang = child.attribute(xml::kXmlNs, "lang");
        bool preferred = lang == nullptr || *lang == "en" || lang->starts_with("en-");
        if (!labelled || preferred) {
          if (!child.text.empty()) declare_class(iri).label = label_of(child);
          labelled = labelled || preferred;
        }
      } else if (child.is(ns::owl, "equivalentClass")) {
        if (auto r = resource(child)) {
          declare_class(iri).equivalent_to.insert(*r);
          continue;
        }
        for (const auto& nested : child.children) {
          if (nested.is(ns::owl, "Restriction")) {
            restriction(nested, iri);
          } else if (nested.is(ns::owl, "Class")) {
            if (auto eq = subject(nested)) {
              class_node(nested, *eq);
              declare_class(iri).equivalent_to.insert(*eq);
            } else {
              scan_anonymous(nested, "anonymous equivalent class expression");
            }
          } else {
            warn(nested, "unsupported construct");
          }
        }
      } else if (child.is(ns::owl, "disjointWith")) {
        if (auto r = class_reference(child)) declare_class(iri).disjoint_with.insert(*r);
      } else if (child.is(ns::owl, "oneOf")) {
        std::vector<Iri> members;
        for (const auto& item : child.children) {
          if (auto m = subject(item)) {
            members.push_back(*m);
          } else {
            warn(item, "anonymous enumeration member");
          }
        }
        if (members.empty()) {
          warn(child, "empty enumeration");
        } else {
          declare_class(iri).one_of = std::move(members);
        }
      } else if (child.is(ns::rdf, "type")) {
        // Redundant typing of a class as owl:Class.
        continue;
      } else if (is_annotation_element(child)) {
        continue;
      } else {
        warn(child, "unsupported construct");
      }
    }
  }

  std::optional<std::size_t> cardinality(const xml::Element& el) {
    auto text = text::trim(el.text);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      warn(el, "invalid cardinality '" + std::string(text) + "'");
      return std::nullopt;
    }
    return n;
  }

  Value value_of(const xml::Element& el) {
    if (auto r = resource(el)) return Resource{*r};
    for (const auto& child : el.children) {
      if (auto iri = typed_node(child)) return Resource{*iri};
    }
    std::string datatype;
    if (const auto* dt = el.attribute(ns::rdf, "datatype")) datatype = resolve(*dt);
    return Literal{el.text, datatype};
  }

  void restriction(const xml::Element& el, const Iri& owner) {
    std::optional<Iri> on_property;
    std::vector<Constraint> constraints;
    for (const auto& child : el.children) {
      if (child.is(ns::owl, "onProperty")) {
        if (auto r = resource(child)) {
          on_property = *r;
        } else {
          for (const auto& nested : child.children) {
            if (auto iri = subject(nested)) on_property = *iri;
          }
        }
      } else if (child.is(ns::owl, "allValuesFrom")) {
        if (auto r = class_reference(child)) constraints.emplace_back(AllValuesFrom{*r});
      } else if (child.is(ns::owl, "someValuesFrom")) {
        if (auto r = class_reference(child)) constraints.emplace_back(SomeValuesFrom{*r});
      } else if (child.is(ns::owl, "hasValue")) {
        constraints.emplace_back(HasValue{value_of(child)});
      } else if (child.is(ns::owl, "minCardinality")) {
        if (auto n = cardinality(child)) constraints.emplace_back(MinCardinality{*n});
      } else if (child.is(ns::owl, "maxCardinality")) {
        if (auto n = cardinality(child)) constraints.emplace_back(MaxCardinality{*n});
      } else if (child.is(ns::owl, "cardinality")) {
        if (auto n = cardinality(child)) constraints.emplace_back(ExactCardinality{*n});
      } else if (is_annotation_element(child) || child.is(ns::rdfs, "label")) {
        continue;
      } else {
        warn(child, "unsupported construct");
      }
    }
    if (!on_property) {
      warn(el, "restriction without owl:onProperty");
      return;
    }
    auto& cls = declare_class(owner);
    for (auto& c : constraints) cls.restrictions.push_back(Restriction{*on_property, std::move(c)});
  }

  OwlProperty& declare_property(const Iri& iri) {
    auto [it, inserted] = doc_.properties.try_emplace(iri);
    if (inserted) {
      it->second.iri = iri;
      it->second.label = local_name(iri);
    }
    return it->second;
  }

  void set_kind(const Iri& iri, PropertyKind kind) {
    declare_property(iri).kind = kind;
    explicit_kind_.insert(iri);
  }

  void property_node(const xml::Element& el, const Iri& iri, PropertyKind kind, unsigned characteristic) {
    declare_property(iri).characteristics |= characteristic;
    if (el.name == "ObjectProperty" || el.name == "DatatypeProperty") set_kind(iri, kind);
    for (const auto& child : el.children) {
      if (child.is(ns::rdfs, "domain")) {
        if (auto r = class_reference(child)) declare_property(iri).domains.insert(*r);
      } else if (child.is(ns::rdfs, "range")) {
        if (auto r = class_reference(child)) declare_property(iri).ranges.insert(*r);
      } else if (child.is(ns::rdfs, "subPropertyOf")) {
        if (auto r = resource(child)) {
          declare_property(iri).superproperties.insert(*r);
        } else {
          warn(child, "anonymous superproperty");
        }
      } else if (child.is(ns::rdf, "type")) {
        auto r = resource(child);
        if (!r) {
          warn(child, "anonymous type");
        } else if (*r == owl_iri("FunctionalProperty")) {
          declare_property(iri).characteristics |= Functional;
        } else if (*r == owl_iri("InverseFunctionalProperty")) {
          declare_property(iri).characteristics |= InverseFunctional;
        } else if (*r == owl_iri("TransitiveProperty")) {
          declare_property(iri).characteristics |= Transitive;
        } else if (*r == owl_iri("SymmetricProperty")) {
          declare_property(iri).characteristics |= Symmetric;
        } else if (*r == owl_iri("ObjectProperty")) {
          set_kind(iri, PropertyKind::Object);
        } else if (*r == owl_iri("DatatypeProperty")) {
          set_kind(iri, PropertyKind::Datatype);
        } else {
          warn(child, "unsupported property type " + *r);
        }
      } else if (child.is(ns::rdfs, "label")) {
        if (!child.text.empty()) declare_property(iri).label = label_of(child);
      } else if (is_annotation_element(child)) {
        continue;
      } else {
        warn(child, "unsupported construct");
      }
    }
  }

  void description(const xml::Element& el) {
    auto iri = subject(el);
    if (!iri) {
      warn(el, "anonymous rdf:Description");
      return;
    }
    for (const auto& child : el.children) {
      if (!child.is(ns::rdf, "type")) continue;
      auto r = resource(child);
      if (!r) continue;
      if (*r == owl_iri("Class") || *r == std::string(ns::rdfs) + "Class") {
        xml::Element copy = el;
        std::erase_if(copy.children, [](const xml::Element& c) { return c.is(ns::rdf, "type"); });
        class_node(copy, *iri);
        return;
      }
      if (*r == owl_iri("ObjectProperty") || *r == owl_iri("DatatypeProperty")) {
        property_node(el, *iri, *r == owl_iri("ObjectProperty") ? PropertyKind::Object : PropertyKind::Datatype, 0);
        set_kind(*iri, *r == owl_iri("ObjectProperty") ? PropertyKind::Object : PropertyKind::Datatype);
        return;
      }
    }
    individual_node(el);
  }

  // A typed node describing an individual. Returns its IRI when it has one.
  std::optional<Iri> typed_node(const xml::Element& el) {
    if (el.is(ns::owl, "Class") || el.is(ns::rdfs, "Class")) {
      if (auto iri = subject(el)) {
        class_node(el, *iri);
        return iri;
      }
      scan_anonymous(el, "anonymous class expression");
      return std::nullopt;
    }
    if (is_builtin_ns(el.ns) && !el.is(ns::owl, "Thing") && !el.is(ns::rdf, "Description")) {
      warn(el, "unsupported construct");
      return std::nullopt;
    }
    return individual_node(el);
  }

  std::optional<Iri> individual_node(const xml::Element& el) {
    auto iri = subject(el);
    if (!iri) {
      warn(el, "anonymous individual");
      return std::nullopt;
    }
    auto [it, inserted] = doc_.individuals.try_emplace(*iri);
    if (inserted) it->second.iri = *iri;
    if (el.ns.empty()) {
      warn(el, "typed node without a namespace");
    } else if (!el.is(ns::rdf, "Description")) {
      it->second.types.insert(el.ns + el.name);
    }
    for (const auto& child : el.children) {
      if (child.is(ns::rdf, "type")) {
        if (auto r = resource(child)) doc_.individuals[*iri].types.insert(*r);
      } else if (child.is(ns::rdfs, "label") || is_annotation_element(child)) {
        continue;
      } else if (is_builtin_ns(child.ns)) {
        warn(child, "unsupported construct");
      } else {
        auto value = value_of(child);
        doc_.individuals[*iri].assertions.emplace(child.ns + child.name, std::move(value));
      }
    }
    auto& ind = doc_.individuals[*iri];
    if (ind.types.empty()) ind.types.insert(owl_iri("Thing"));
    return iri;
  }

  void check_acyclic() {
    enum class Mark { White, Grey, Black };
    std::map<Iri, Mark> marks;
    std::vector<Iri> path;
    std::function<void(const Iri&)> visit = [&](const Iri& iri) {
      marks[iri] = Mark::Grey;
      path.push_back(iri);
      for (const auto& sup : doc_.classes.at(iri).superclasses) {
        if (!doc_.classes.contains(sup)) continue;
        auto m = marks[sup];
        if (m == Mark::Grey) {
          auto start = std::find(path.begin(), path.end(), sup);
          std::string cycle;
          for (auto it = start; it != path.end(); ++it) cycle += local_name(*it) + " -> ";
          cycle += local_name(sup);
          throw Error(ErrorCode::CyclicHierarchy, "subclass cycle: " + cycle, {{"cycle", cycle}});
        }
        if (m == Mark::White) visit(sup);
      }
      path.pop_back();
      marks[iri] = Mark::Black;
    };
    for (const auto& [iri, cls] : doc_.classes) {
      if (marks[iri] == Mark::White) visit(iri);
    }
  }
};

bool value_typed_by(const OntologyDocument& doc, const Value& value, const Iri& type) {
  if (const auto* lit = std::get_if<Literal>(&value)) {
    if (doc.classes.contains(type)) return false;
    return lit->datatype.empty() || lit->datatype == type || type == std::string(ns::rdfs) + "Literal";
  }
  const auto& iri = std::get<Resource>(value).iri;
  auto ind = doc.individuals.find(iri);
  if (ind == doc.individuals.end()) return false;
  if (!doc.classes.contains(type)) return ind->second.types.contains(type);
  auto accepted = descendants_or_self(doc, type);
  return std::any_of(ind->second.types.begin(), ind->second.types.end(),
                     [&](const Iri& t) { return accepted.contains(t); });
}

std::string bounds_string(std::size_t min, const std::optional<std::size_t>& max) {
  return "[" + std::to_string(min) + "," + (max ? std::to_string(*max) : std::string("*")) + "]";
}

}  // namespace

std::string to_string(const Value& v) {
  if (const auto* r = std::get_if<Resource>(&v)) return r->iri;
  const auto& lit = std::get<Literal>(v);
  if (lit.datatype.empty()) return "\"" + lit.lexical + "\"";
  return "\"" + lit.lexical + "\"^^" + lit.datatype;
}

std::string local_name(std::string_view iri) {
  auto pos = iri.rfind('#');
  if (pos == std::string_view::npos) pos = iri.rfind('/');
  if (pos == std::string_view::npos) pos = iri.rfind(':');
  if (pos == std::string_view::npos) return std::string(iri);
  return std::string(iri.substr(pos + 1));
}

Iri resolve_iri(std::string_view base, std::string_view ref) {
  if (has_scheme(ref)) return std::string(ref);
  if (!has_scheme(base)) {
    throw Error(ErrorCode::UnresolvableBase,
                "cannot resolve '" + std::string(ref) + "' against base '" + std::string(base) + "'",
                {{"reference", std::string(ref)}, {"base", std::string(base)}});
  }
  auto doc_base = strip_fragment(base);
  if (ref.empty()) return std::string(doc_base);
  if (ref.front() == '#') return std::string(doc_base) + std::string(ref);
  auto scheme_end = doc_base.find(':');
  if (ref.starts_with("//")) return std::string(doc_base.substr(0, scheme_end + 1)) + std::string(ref);
  auto query = doc_base.find('?');
  if (query != std::string_view::npos) doc_base = doc_base.substr(0, query);
  if (ref.front() == '/') {
    std::size_t path_start = scheme_end + 1;
    if (doc_base.substr(path_start).starts_with("//")) {
      auto slash = doc_base.find('/', path_start + 2);
      path_start = slash == std::string_view::npos ? doc_base.size() : slash;
    }
    return std::string(doc_base.substr(0, path_start)) + std::string(ref);
  }
  auto last_slash = doc_base.rfind('/');
  if (last_slash == std::string_view::npos || last_slash < scheme_end) {
    throw Error(ErrorCode::UnresolvableBase,
                "base '" + std::string(base) + "' has no hierarchical path to resolve '" + std::string(ref) + "'",
                {{"reference", std::string(ref)}, {"base", std::string(base)}});
  }
  return std::string(doc_base.substr(0, last_slash + 1)) + std::string(ref);
}

OntologyDocument parse_ontology(std::string_view bytes, std::string_view base, std::string source) {
  auto root = xml::parse(bytes);
  OntologyDocument doc;
  doc.source = std::move(source);
  doc.base_iri = std::string(strip_fragment(base));
  if (const auto* xml_base = root.attribute(xml::kXmlNs, "base")) {
    doc.base_iri = std::string(strip_fragment(resolve_iri(doc.base_iri, *xml_base)));
  }
  if (!root.is(ns::rdf, "RDF")) {
    doc.warnings.push_back("root element " + root.qualified_name() + " is not rdf:RDF; nothing loaded");
    return doc;
  }
  Parser parser(doc);
  for (const auto& child : root.children) parser.top_level(child);
  parser.finish();
  return doc;
}

bool label_less(std::string_view a_label, std::string_view a_iri, std::string_view b_label, std::string_view b_iri) {
  auto a = text::ascii_lower(a_label);
  auto b = text::ascii_lower(b_label);
  if (a != b) return a < b;
  return a_iri < b_iri;
}

std::vector<ClassNode> class_tree(const OntologyDocument& doc) {
  std::map<Iri, std::vector<const OwlClass*>> children;
  std::vector<const OwlClass*> roots;
  for (const auto& [iri, cls] : doc.classes) {
    bool has_parent = false;
    for (const auto& sup : cls.superclasses) {
      if (doc.classes.contains(sup)) {
        children[sup].push_back(&cls);
        has_parent = true;
      }
    }
    if (!has_parent) roots.push_back(&cls);
  }
  auto by_label = [](const OwlClass* a, const OwlClass* b) { return label_less(a->label, a->iri, b->label, b->iri); };
  std::function<ClassNode(const OwlClass&)> build = [&](const OwlClass& cls) {
    ClassNode node{cls.iri, cls.label, {}};
    auto it = children.find(cls.iri);
    if (it != children.end()) {
      auto kids = it->second;
      std::sort(kids.begin(), kids.end(), by_label);
      for (const auto* kid : kids) node.children.push_back(build(*kid));
    }
    return node;
  };
  std::sort(roots.begin(), roots.end(), by_label);
  std::vector<ClassNode> forest;
  for (const auto* root : roots) forest.push_back(build(*root));
  return forest;
}

std::vector<IndexEntry> term_index(const OntologyDocument& doc) {
  std::vector<IndexEntry> entries;
  entries.reserve(doc.classes.size());
  for (const auto& [iri, cls] : doc.classes) entries.push_back({cls.label, iri});
  std::sort(entries.begin(), entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return label_less(a.label, a.iri, b.label, b.iri); });
  return entries;
}

std::set<Iri> ancestors_or_self(const OntologyDocument& doc, const Iri& cls) {
  std::set<Iri> seen{cls};
  std::vector<Iri> todo{cls};
  while (!todo.empty()) {
    auto cur = std::move(todo.back());
    todo.pop_back();
    auto it = doc.classes.find(cur);
    if (it == doc.classes.end()) continue;
    for (const auto& sup : it->second.superclasses) {
      if (doc.classes.contains(sup) && seen.insert(sup).second) todo.push_back(sup);
    }
  }
  return seen;
}

std::set<Iri> descendants_or_self(const OntologyDocument& doc, const Iri& cls) {
  std::set<Iri> result{cls};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [iri, c] : doc.classes) {
      if (result.contains(iri)) continue;
      for (const auto& sup : c.superclasses) {
        if (result.contains(sup)) {
          result.insert(iri);
          grew = true;
          break;
        }
      }
    }
  }
  return result;
}

static void require_class(const OntologyDocument& doc, const Iri& cls) {
  if (!doc.classes.contains(cls)) throw Error(ErrorCode::UnknownClass, "unknown class " + cls, {{"class", cls}});
}

std::vector<Individual> instances_of(const OntologyDocument& doc, const Iri& cls, bool transitive) {
  require_class(doc, cls);
  auto targets = transitive ? descendants_or_self(doc, cls) : std::set<Iri>{cls};
  std::vector<Individual> result;
  for (const auto& [iri, ind] : doc.individuals) {
    if (std::any_of(ind.types.begin(), ind.types.end(), [&](const Iri& t) { return targets.contains(t); })) {
      result.push_back(ind);
    }
  }
  return result;
}

std::vector<ApplicableProperty> applicable_properties(const OntologyDocument& doc, const Iri& cls) {
  require_class(doc, cls);
  auto lineage = ancestors_or_self(doc, cls);
  const Iri thing = owl_iri("Thing");

  std::map<Iri, EffectiveConstraints> merged;
  for (const auto& [iri, prop] : doc.properties) {
    bool in_domain = std::any_of(prop.domains.begin(), prop.domains.end(),
                                 [&](const Iri& d) { return lineage.contains(d) || d == thing; });
    if (in_domain) merged.try_emplace(iri);
  }
  for (const auto& c : lineage) {
    for (const auto& r : doc.classes.at(c).restrictions) {
      if (!doc.properties.contains(r.on_property)) continue;
      auto& ec = merged[r.on_property];
      std::visit(
          [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, MinCardinality>) {
              ec.min = std::max(ec.min, k.n);
            } else if constexpr (std::is_same_v<K, MaxCardinality>) {
              ec.max = ec.max ? std::min(*ec.max, k.n) : k.n;
            } else if constexpr (std::is_same_v<K, ExactCardinality>) {
              ec.min = std::max(ec.min, k.n);
              ec.max = ec.max ? std::min(*ec.max, k.n) : k.n;
            } else if constexpr (std::is_same_v<K, AllValuesFrom>) {
              if (std::find(ec.all_values_from.begin(), ec.all_values_from.end(), k.class_iri) ==
                  ec.all_values_from.end())
                ec.all_values_from.push_back(k.class_iri);
            } else if constexpr (std::is_same_v<K, SomeValuesFrom>) {
              if (std::find(ec.some_values_from.begin(), ec.some_values_from.end(), k.class_iri) ==
                  ec.some_values_from.end())
                ec.some_values_from.push_back(k.class_iri);
            } else {
              if (std::find(ec.has_values.begin(), ec.has_values.end(), k.value) == ec.has_values.end())
                ec.has_values.push_back(k.value);
            }
          },
          r.constraint);
    }
  }

  std::vector<ApplicableProperty> result;
  for (auto& [iri, ec] : merged) {
    if (ec.max && ec.min > *ec.max) {
      throw Error(ErrorCode::InconsistentConstraints,
                  "constraints on " + iri + " for class " + cls + " are unsatisfiable: " + bounds_string(ec.min, ec.max),
                  {{"property", iri}, {"class", cls}, {"min", std::to_string(ec.min)}, {"max", std::to_string(*ec.max)}});
    }
    result.push_back({doc.properties.at(iri), std::move(ec)});
  }
  std::sort(result.begin(), result.end(), [](const ApplicableProperty& a, const ApplicableProperty& b) {
    return label_less(a.property.label, a.property.iri, b.property.label, b.property.iri);
  });
  return result;
}

std::vector<ConstraintViolation> validate_individual(const OntologyDocument& doc, const Iri& cls,
                                                     const std::multimap<Iri, Value>& assertions) {
  using Kind = ConstraintViolation::Kind;
  std::vector<ConstraintViolation> out;
  auto add = [&](Kind kind, const Iri& property, std::string message) {
    ConstraintViolation v{kind, property, std::move(message), 0, std::nullopt, 0};
    out.push_back(std::move(v));
  };
  for (auto it = assertions.begin(); it != assertions.end(); it = assertions.upper_bound(it->first)) {
    auto pit = doc.properties.find(it->first);
    if (pit == doc.properties.end()) {
      add(Kind::UnknownProperty, it->first, "property " + it->first + " is not declared");
      continue;
    }
    const auto& p = pit->second;
    auto [first, last] = assertions.equal_range(p.iri);
    for (auto v = first; v != last; ++v) {
      bool is_resource = std::holds_alternative<Resource>(v->second);
      if (p.kind == PropertyKind::Object && !is_resource) {
        add(Kind::ValueType, p.iri, "object property " + local_name(p.iri) + " given a literal");
      } else if (p.kind == PropertyKind::Datatype && is_resource) {
        add(Kind::ValueType, p.iri, "datatype property " + local_name(p.iri) + " given a resource");
      }
    }
  }
  for (const auto& ap : applicable_properties(doc, cls)) {
    const auto& p = ap.property;
    const auto& ec = ap.constraints;
    auto [first, last] = assertions.equal_range(p.iri);
    std::vector<Value> values;
    for (auto it = first; it != last; ++it) values.push_back(it->second);
    auto count = values.size();

    if (count < ec.min || (ec.max && count > *ec.max)) {
      ConstraintViolation v{Kind::Cardinality, p.iri,
                            local_name(p.iri) + " expects " + bounds_string(ec.min, ec.max) + " values, got " +
                                std::to_string(count), 0, std::nullopt, 0};
      v.expected_min = ec.min;
      v.expected_max = ec.max;
      v.actual = count;
      out.push_back(std::move(v));
    }
    for (const auto& required : ec.has_values) {
      if (std::find(values.begin(), values.end(), required) == values.end()) {
        add(Kind::ValueType, p.iri, local_name(p.iri) + " must include value " + to_string(required));
      }
    }
    for (const auto& range : ec.all_values_from) {
      for (const auto& value : values) {
        if (!value_typed_by(doc, value, range)) {
          add(Kind::ValueType, p.iri,
                         "value " + to_string(value) + " of " + local_name(p.iri) + " is not a " + local_name(range));
        }
      }
    }
    for (const auto& range : ec.some_values_from) {
      if (std::none_of(values.begin(), values.end(), [&](const Value& v) { return value_typed_by(doc, v, range); })) {
        add(Kind::ValueType, p.iri, local_name(p.iri) + " needs at least one " + local_name(range));
      }
    }
  }
  return out;
}

const Individual& create_individual(OntologyDocument& doc, const Iri& cls, std::string_view id,
                                    std::multimap<Iri, Value> assertions) {
  require_class(doc, cls);
  if (!text::is_ncname(id)) {
    throw Error(ErrorCode::InvalidId, "'" + std::string(id) + "' is not a valid local name", {{"id", std::string(id)}});
  }
  auto iri = resolve_iri(doc.base_iri, "#" + std::string(id));
  if (doc.classes.contains(iri) || doc.properties.contains(iri) || doc.individuals.contains(iri)) {
    throw Error(ErrorCode::DuplicateIri, iri + " already exists", {{"iri", iri}});
  }
  auto violations = validate_individual(doc, cls, assertions);
  if (!violations.empty()) {
    const auto& v = violations.front();
    switch (v.kind) {
      case ConstraintViolation::Kind::Cardinality:
        throw Error(ErrorCode::CardinalityViolation, v.message,
                    {{"property", v.property},
                     {"expected", bounds_string(v.expected_min, v.expected_max)},
                     {"actual", std::to_string(v.actual)}});
      case ConstraintViolation::Kind::UnknownProperty:
        throw Error(ErrorCode::UnknownProperty, v.message, {{"property", v.property}});
      case ConstraintViolation::Kind::ValueType:
        throw Error(ErrorCode::ValueTypeViolation, v.message, {{"property", v.property}});
    }
  }
  Individual ind{iri, {cls}, std::move(assertions)};
  return doc.individuals.emplace(iri, std::move(ind)).first->second;
}

}  // namespace ontotier::owl
