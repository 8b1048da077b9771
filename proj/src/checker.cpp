// check_invariants. Written against the data model only, not reusing the
// mutation helpers, so it can serve as an oracle for them.

#include "ontotier/annodoc.hpp"

#include "ontotier/text.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace ontotier {

namespace {

struct Checker {
  const AnnotationDocument& doc;
  const ProfileLookup& profiles;
  std::vector<Violation> out;

  void fail(std::string rule, std::string subject, std::string message) {
    out.push_back({std::move(rule), std::move(subject), std::move(message)});
  }

  const LinguisticType* type_of(const Tier& t) const {
    auto it = doc.linguistic_types.find(t.type_id);
    return it == doc.linguistic_types.end() ? nullptr : &it->second;
  }

  const Tier* tier(const std::string& id) const {
    auto it = doc.tiers.find(id);
    return it == doc.tiers.end() ? nullptr : &it->second;
  }

  std::optional<std::int64_t> slot_value(const std::string& id) const {
    auto it = doc.slots.find(id);
    return it == doc.slots.end() ? std::nullopt : it->second.value;
  }

  void ids() {
    // Ids are compared on the records themselves; the map keys must agree.
    std::map<std::string, int> seen;
    auto record = [&](const std::string& key, const std::string& id, const char* what) {
      if (key != id) fail("record-key", key, std::string(what) + " stored under a different key than its id " + id);
      if (++seen[id] == 2) fail("id-unique", id, "identifier used by more than one record");
    };
    for (const auto& [key, t] : doc.linguistic_types) {
      record(key, t.id, "type");
      if (!text::is_ncname(t.id)) fail("id-syntax", t.id, "type id is not an NCName");
      if (is_reserved(t.id)) fail("id-reserved", t.id, "type id clashes with generated names");
      if (t.time_alignable != is_time_alignable(t.stereotype)) {
        fail("type-alignable", t.id, "time_alignable does not follow the stereotype");
      }
      if (t.ontological && is_time_alignable(t.stereotype)) {
        fail("type-ontological", t.id, "ontological type with a time-alignable stereotype");
      }
    }
    for (const auto& [key, t] : doc.tiers) {
      record(key, t.id, "tier");
      if (!text::is_ncname(t.id)) fail("id-syntax", t.id, "tier id is not an NCName");
      if (is_reserved(t.id)) fail("id-reserved", t.id, "tier id clashes with generated names");
    }
    for (const auto& [key, s] : doc.slots) {
      record(key, s.id, "slot");
      static const std::regex slot_id("ts[0-9]+");
      if (!std::regex_match(s.id, slot_id)) fail("slot-id", s.id, "slot id is not of the form ts<n>");
    }
    for (const auto& [key, a] : doc.annotations) {
      const auto& id = annotation_id(a);
      record(key, id, "annotation");
      static const std::regex annotation_id_form("a[1-9][0-9]*");
      if (!std::regex_match(id, annotation_id_form)) {
        fail("annotation-id", id, "annotation id is not of the form a<n>");
      } else if (std::stoull(id.substr(1)) >= doc.next_annotation_ordinal) {
        fail("annotation-ordinal", id, "id is not below the next annotation ordinal");
      }
    }
  }

  static bool is_reserved(const std::string& id) {
    static const std::regex generated("a[0-9]+(Value)?|ts[0-9]+|media[0-9]+|Time_Subdivision|Symbolic_Subdivision|Symbolic_Association");
    return std::regex_match(id, generated);
  }

  void media() {
    for (const auto& m : doc.media) {
      if (m.media_url.empty()) fail("media-url", doc.id, "media descriptor without a URL");
      check_chars(doc.id, m.media_url);
      check_chars(doc.id, m.mime_type);
      if (m.extracted_from) check_chars(doc.id, *m.extracted_from);
    }
  }

  void tiers() {
    std::set<std::string> bound;
    for (const auto& [id, t] : doc.tiers) {
      const auto* type = type_of(t);
      if (type == nullptr) {
        fail("tier-type", id, "unknown linguistic type " + t.type_id);
        continue;
      }
      if (!t.parent) {
        if (type->stereotype != Stereotype::None) fail("root-stereotype", id, "root tier with a dependent type");
      } else if (const auto* p = tier(*t.parent); p == nullptr) {
        fail("tier-parent", id, "unknown parent tier " + *t.parent);
      } else {
        if (type->stereotype == Stereotype::None) fail("child-stereotype", id, "child tier with a None type");
        const auto* ptype = type_of(*p);
        if (type->stereotype == Stereotype::TimeSubdivision && ptype != nullptr && !ptype->time_alignable) {
          fail("timesub-parent", id, "time subdivision under a symbolic tier");
        }
      }
      if (type->ontological) {
        if (!t.profile_ref || t.profile_ref->empty()) {
          fail("profile-missing", id, "ontological tier without a profile");
        } else if (!bound.insert(*t.profile_ref).second) {
          fail("profile-unique", id, "profile " + *t.profile_ref + " bound twice");
        }
        if (t.profile_ref) check_chars(id, *t.profile_ref);
      } else if (t.profile_ref) {
        fail("profile-unexpected", id, "profile on a non-ontological tier");
      }
    }
    // Parent links must form a forest.
    for (const auto& [id, t] : doc.tiers) {
      std::set<std::string> seen{id};
      for (auto p = t.parent; p;) {
        if (!seen.insert(*p).second) {
          fail("tier-cycle", id, "tier parent links form a cycle");
          break;
        }
        const auto* pt = tier(*p);
        p = pt ? pt->parent : std::nullopt;
      }
    }
  }

  void slots() {
    std::vector<std::string> sorted = doc.time_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> keys;
    for (const auto& [id, s] : doc.slots) keys.push_back(id);
    if (sorted != keys) fail("time-order", doc.id, "time order is not a permutation of the slots");

    std::optional<std::int64_t> last;
    for (const auto& id : doc.time_order) {
      auto v = slot_value(id);
      if (!v) continue;
      if (*v < 0) fail("slot-negative", id, "negative time value");
      if (last && *v < *last) fail("time-order", id, "time order is not sorted by value");
      last = v;
    }
    std::set<std::string> used;
    for (const auto& [id, a] : doc.annotations) {
      if (const auto* al = std::get_if<AlignableAnnotation>(&a)) {
        used.insert(al->begin_slot);
        used.insert(al->end_slot);
      }
    }
    for (const auto& [id, s] : doc.slots) {
      if (!used.contains(id)) fail("slot-orphan", id, "time slot used by no annotation");
      if (s.id.starts_with("ts")) {
        auto n = std::strtoull(s.id.c_str() + 2, nullptr, 10);
        if (n >= doc.next_slot_ordinal) fail("slot-ordinal", id, "id is not below the next slot ordinal");
      }
    }
  }

  std::optional<Extent> extent(const AlignableAnnotation& a) const {
    auto b = slot_value(a.begin_slot);
    auto e = slot_value(a.end_slot);
    if (!b || !e) return std::nullopt;
    return Extent{*b, *e};
  }

  // XML 1.0 cannot carry C0 controls other than tab, newline and return.
  void check_chars(const std::string& subject, std::string_view s) {
    if (std::any_of(s.begin(), s.end(), [](char c) { return c >= 0 && c < 0x20 && c != '\t' && c != '\n' && c != '\r'; })) {
      fail("text-chars", subject, "text contains a control character");
    }
  }

  void check_value(const std::string& id, const Tier& t, const LinguisticType& type, const AnnotationValue& v,
                   bool alignable) {
    const auto* onto = std::get_if<OntologyValue>(&v);
    if (onto) {
      check_chars(id, onto->ont_annotation_id);
      check_chars(id, onto->user_defined_term);
      for (const auto& s : onto->instances) check_chars(id, s);
      for (const auto& s : onto->descriptions) check_chars(id, s);
    } else {
      check_chars(id, std::get<StringValue>(v).text);
    }
    if (!type.ontological || alignable) {
      if (onto) fail("value-kind", id, "ontology value on a non-ontological tier");
      return;
    }
    if (!onto) {
      fail("value-kind", id, "string value on an ontological tier");
      return;
    }
    if (onto->instances.empty()) fail("value-instances", id, "ontology value without instances");
    if (profiles && t.profile_ref) {
      const auto* p = profiles(*t.profile_ref);
      if (p == nullptr) {
        fail("value-profile", id, "profile " + *t.profile_ref + " not available");
      } else if (p->find_term(onto->user_defined_term) == nullptr) {
        fail("value-term", id, "term " + onto->user_defined_term + " not in profile");
      }
    }
  }

  void annotations() {
    std::map<std::pair<std::string, std::string>, std::vector<const ReferringAnnotation*>> groups;
    std::map<std::pair<std::string, std::string>, std::vector<const AlignableAnnotation*>> subdivisions;
    std::map<std::string, std::vector<const AlignableAnnotation*>> top_level;

    for (const auto& [id, a] : doc.annotations) {
      const auto* t = tier(annotation_tier(a));
      if (t == nullptr) {
        fail("annotation-tier", id, "unknown tier " + annotation_tier(a));
        continue;
      }
      const auto* type = type_of(*t);
      if (type == nullptr) continue;
      const bool alignable = std::holds_alternative<AlignableAnnotation>(a);
      check_value(id, *t, *type, annotation_value(a), alignable);

      if (const auto* al = std::get_if<AlignableAnnotation>(&a)) {
        if (!type->time_alignable) fail("annotation-kind", id, "alignable annotation on a symbolic tier");
        if (!doc.slots.contains(al->begin_slot) || !doc.slots.contains(al->end_slot)) {
          fail("annotation-slot", id, "unknown time slot");
          continue;
        }
        if (auto ext = extent(*al); ext && ext->begin >= ext->end) {
          fail("annotation-interval", id, "begin is not before end");
        }
        if (type->stereotype == Stereotype::None) {
          if (al->parent) fail("annotation-parent", id, "top-level annotation with a parent");
          top_level[t->id].push_back(al);
        } else if (!al->parent) {
          fail("annotation-parent", id, "time-subdivision child without a parent");
        } else {
          auto pit = doc.annotations.find(*al->parent);
          const auto* parent = pit == doc.annotations.end() ? nullptr : std::get_if<AlignableAnnotation>(&pit->second);
          if (parent == nullptr) {
            fail("annotation-parent", id, "parent is missing or not alignable");
          } else if (parent->tier_id != t->parent) {
            fail("annotation-parent", id, "parent is not on the parent tier");
          } else {
            subdivisions[{t->id, parent->id}].push_back(al);
          }
        }
      } else {
        const auto& r = std::get<ReferringAnnotation>(a);
        if (type->time_alignable) fail("annotation-kind", id, "referring annotation on a time-aligned tier");
        auto pit = doc.annotations.find(r.ref_annotation);
        if (pit == doc.annotations.end()) {
          fail("annotation-ref", id, "dangling reference " + r.ref_annotation);
          continue;
        }
        if (annotation_tier(pit->second) != t->parent) fail("annotation-ref", id, "reference is not on the parent tier");
        groups[{t->id, r.ref_annotation}].push_back(&r);
      }
    }

    // Reference chains end at an alignable annotation.
    for (const auto& [id, a] : doc.annotations) {
      const Annotation* cur = &a;
      std::set<std::string> seen{id};
      while (const auto* r = std::get_if<ReferringAnnotation>(cur)) {
        auto it = doc.annotations.find(r->ref_annotation);
        if (it == doc.annotations.end()) break;
        if (!seen.insert(it->first).second) {
          fail("ref-cycle", id, "reference chain does not reach an alignable annotation");
          break;
        }
        cur = &it->second;
      }
    }

    for (const auto& [key, members] : groups) {
      const auto* type = type_of(*tier(key.first));
      if (type->stereotype == Stereotype::SymbolicAssociation) {
        if (members.size() > 1) fail("association", key.second, "more than one associated annotation on " + key.first);
        for (const auto* r : members) {
          if (r->previous) fail("association", r->id, "association annotation with a previous sibling");
        }
        continue;
      }
      // Sibling chain: exactly one head, each previous in the group, used once.
      std::set<std::string> ids;
      for (const auto* r : members) ids.insert(r->id);
      std::map<std::string, int> used;
      int heads = 0;
      for (const auto* r : members) {
        if (!r->previous) {
          ++heads;
        } else if (!ids.contains(*r->previous)) {
          fail("chain", r->id, "previous sibling " + *r->previous + " is not in the same group");
        } else if (++used[*r->previous] > 1) {
          fail("chain", r->id, "two annotations share the previous sibling " + *r->previous);
        }
      }
      if (heads != 1) fail("chain", key.second, "sibling chain on " + key.first + " does not have exactly one head");
      std::map<std::string, std::string> prev;
      for (const auto* r : members) {
        if (r->previous) prev[r->id] = *r->previous;
      }
      for (const auto* r : members) {
        std::set<std::string> seen{r->id};
        for (auto it = prev.find(r->id); it != prev.end(); it = prev.find(it->second)) {
          if (!seen.insert(it->second).second) {
            fail("chain", r->id, "sibling chain has a cycle");
            break;
          }
        }
      }
    }

    for (auto& [tier_id, list] : top_level) check_disjoint(tier_id, list);

    for (auto& [key, children] : subdivisions) {
      const auto& parent = std::get<AlignableAnnotation>(doc.annotations.at(key.second));
      auto pext = extent(parent);
      std::sort(children.begin(), children.end(), [&](const auto* x, const auto* y) {
        return slot_value(x->begin_slot).value_or(0) < slot_value(y->begin_slot).value_or(0);
      });
      for (std::size_t i = 0; i < children.size(); ++i) {
        auto ext = extent(*children[i]);
        if (pext && ext && (ext->begin < pext->begin || ext->end > pext->end)) {
          fail("subdivision-containment", children[i]->id, "child leaves the parent interval");
        }
        if (i + 1 < children.size() && children[i]->end_slot != children[i + 1]->begin_slot) {
          fail("subdivision-contiguity", children[i]->id, "children do not share a boundary slot");
        }
        if (i + 1 < children.size()) {
          auto next = extent(*children[i + 1]);
          if (ext && next && next->begin < ext->end) {
            fail("subdivision-overlap", children[i + 1]->id, "overlaps sibling " + children[i]->id);
          }
        }
      }
    }
  }

  void check_disjoint(const std::string& tier_id, std::vector<const AlignableAnnotation*>& list) {
    std::sort(list.begin(), list.end(), [&](const auto* x, const auto* y) {
      return slot_value(x->begin_slot).value_or(0) < slot_value(y->begin_slot).value_or(0);
    });
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
      auto x = extent(*list[i]);
      auto y = extent(*list[i + 1]);
      if (x && y && y->begin < x->end) fail("overlap", list[i + 1]->id, "overlaps " + list[i]->id + " on " + tier_id);
    }
  }
};

}  // namespace

std::vector<Violation> check_invariants(const AnnotationDocument& doc, const ProfileLookup& profiles) {
  Checker c{doc, profiles, {}};
  c.ids();
  c.media();
  c.tiers();
  c.slots();
  c.annotations();
  return std::move(c.out);
}

}  // namespace ontotier
