#include "ontotier/annodoc.hpp"

#include "ontotier/error.hpp"
#include "ontotier/text.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

namespace ontotier {

namespace {

Error unknown_annotation(std::string_view id) {
  return Error(ErrorCode::UnknownAnnotation, "no annotation '" + std::string(id) + "'", {{"annotation", std::string(id)}});
}

Error unknown_tier(std::string_view id) {
  return Error(ErrorCode::UnknownTier, "no tier '" + std::string(id) + "'", {{"tier", std::string(id)}});
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Fragment names the engine generates itself.
bool is_reserved_id(std::string_view id) {
  if (id == "Time_Subdivision" || id == "Symbolic_Subdivision" || id == "Symbolic_Association") return true;
  if (id.starts_with("a")) {
    auto rest = id.substr(1);
    if (rest.ends_with("Value")) rest.remove_suffix(5);
    if (all_digits(rest)) return true;
  }
  if (id.starts_with("ts") && all_digits(id.substr(2))) return true;
  if (id.starts_with("media") && all_digits(id.substr(5))) return true;
  return false;
}

void check_new_id(const AnnotationDocument& doc, std::string_view id) {
  if (!text::is_ncname(id) || is_reserved_id(id)) {
    throw Error(ErrorCode::InvalidId, "'" + std::string(id) + "' is not a usable identifier", {{"id", std::string(id)}});
  }
  if (doc.tiers.contains(std::string(id)) || doc.linguistic_types.contains(std::string(id))) {
    throw Error(ErrorCode::DuplicateId, "identifier '" + std::string(id) + "' is already used",
                {{"id", std::string(id)}});
  }
}

std::int64_t slot_value(const AnnotationDocument& doc, const std::string& slot) {
  const auto& s = doc.slots.at(slot);
  if (!s.value) throw Error(ErrorCode::UnsetTimes, "time slot " + slot + " has no value", {{"slot", slot}});
  return *s.value;
}

Extent own_extent(const AnnotationDocument& doc, const AlignableAnnotation& a) {
  return {slot_value(doc, a.begin_slot), slot_value(doc, a.end_slot)};
}

std::string new_slot(AnnotationDocument& doc, std::int64_t value) {
  auto id = "ts" + std::to_string(doc.next_slot_ordinal++);
  doc.slots.emplace(id, TimeSlot{id, value});
  auto pos = std::upper_bound(doc.time_order.begin(), doc.time_order.end(), value,
                              [&](std::int64_t v, const std::string& other) {
                                const auto& o = doc.slots.at(other).value;
                                return o && v < *o;
                              });
  doc.time_order.insert(pos, id);
  return id;
}

std::string next_annotation_id(AnnotationDocument& doc) { return "a" + std::to_string(doc.next_annotation_ordinal++); }

void sort_time_order(AnnotationDocument& doc) {
  std::stable_sort(doc.time_order.begin(), doc.time_order.end(), [&](const std::string& a, const std::string& b) {
    const auto& va = doc.slots.at(a).value;
    const auto& vb = doc.slots.at(b).value;
    if (va && vb) return *va < *vb;
    return va.has_value() && !vb.has_value();
  });
}

void collect_garbage_slots(AnnotationDocument& doc) {
  std::set<std::string> used;
  for (const auto& [id, a] : doc.annotations) {
    if (const auto* al = std::get_if<AlignableAnnotation>(&a)) {
      used.insert(al->begin_slot);
      used.insert(al->end_slot);
    }
  }
  std::erase_if(doc.time_order, [&](const std::string& s) { return !used.contains(s); });
  std::erase_if(doc.slots, [&](const auto& kv) { return !used.contains(kv.first); });
}

std::vector<const AlignableAnnotation*> alignables_on(const AnnotationDocument& doc, std::string_view tier) {
  std::vector<const AlignableAnnotation*> out;
  for (const auto& [id, a] : doc.annotations) {
    if (const auto* al = std::get_if<AlignableAnnotation>(&a); al && al->tier_id == tier) out.push_back(al);
  }
  return out;
}

// Children of one time-subdivided parent on one tier, ordered by begin.
std::map<std::pair<std::string, std::string>, std::vector<std::string>> subdivision_groups(
    const AnnotationDocument& doc) {
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
  for (const auto& [id, a] : doc.annotations) {
    if (const auto* al = std::get_if<AlignableAnnotation>(&a); al && al->parent) {
      groups[{al->tier_id, *al->parent}].push_back(id);
    }
  }
  for (auto& [key, ids] : groups) {
    std::sort(ids.begin(), ids.end(), [&](const std::string& x, const std::string& y) {
      const auto& ax = std::get<AlignableAnnotation>(doc.annotations.at(x));
      const auto& ay = std::get<AlignableAnnotation>(doc.annotations.at(y));
      return doc.slots.at(ax.begin_slot).value.value_or(0) < doc.slots.at(ay.begin_slot).value.value_or(0);
    });
  }
  return groups;
}

// Closes gaps left inside a time subdivision by extending the preceding child.
void close_subdivision_gaps(AnnotationDocument& doc) {
  for (const auto& [key, ids] : subdivision_groups(doc)) {
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      auto& cur = std::get<AlignableAnnotation>(doc.annotations.at(ids[i]));
      const auto& next = std::get<AlignableAnnotation>(doc.annotations.at(ids[i + 1]));
      if (cur.end_slot != next.begin_slot) cur.end_slot = next.begin_slot;
    }
  }
}

void check_value(const AnnotationDocument& doc, const Tier& tier, bool alignable, const AnnotationValue& value,
                 const ProfileLookup& profiles) {
  const auto& type = doc.type_of(tier);
  const auto* onto = std::get_if<OntologyValue>(&value);
  if (!type.ontological) {
    if (onto == nullptr) return;
    if (alignable) {
      throw Error(ErrorCode::OntologyValueOnAlignable, "tier " + tier.id + " is time-aligned and takes string values",
                  {{"tier", tier.id}});
    }
    throw Error(ErrorCode::WrongValueKind, "tier " + tier.id + " is not ontological and takes string values",
                {{"tier", tier.id}});
  }
  if (onto == nullptr) {
    throw Error(ErrorCode::WrongValueKind, "ontological tier " + tier.id + " takes ontology values",
                {{"tier", tier.id}});
  }
  if (onto->instances.empty()) {
    throw Error(ErrorCode::EmptyInstances, "an ontology value needs at least one instance", {{"tier", tier.id}});
  }
  const Profile* profile = profiles ? profiles(*tier.profile_ref) : nullptr;
  if (profile == nullptr) {
    throw Error(ErrorCode::ProfileUnavailable, "profile '" + *tier.profile_ref + "' is not loaded",
                {{"profile", *tier.profile_ref}});
  }
  if (profile->find_term(onto->user_defined_term) == nullptr) {
    throw Error(ErrorCode::TermNotInProfile,
                "'" + onto->user_defined_term + "' is not a term of profile '" + *tier.profile_ref + "'",
                {{"term", onto->user_defined_term}, {"profile", *tier.profile_ref}});
  }
}

// Removes the given annotations (already closed under dependency) and
// repairs sibling chains and subdivisions around them.
void remove_annotations(AnnotationDocument& doc, const std::set<std::string>& doomed) {
  std::map<std::string, std::optional<std::string>> previous_of;
  for (const auto& id : doomed) {
    if (const auto* r = std::get_if<ReferringAnnotation>(&doc.annotations.at(id))) previous_of[id] = r->previous;
  }
  for (const auto& id : doomed) doc.annotations.erase(id);
  for (auto& [id, a] : doc.annotations) {
    auto* r = std::get_if<ReferringAnnotation>(&a);
    if (r == nullptr) continue;
    while (r->previous && doomed.contains(*r->previous)) r->previous = previous_of.at(*r->previous);
  }
  close_subdivision_gaps(doc);
  collect_garbage_slots(doc);
}

std::set<std::string> dependency_closure(const AnnotationDocument& doc, std::string_view root) {
  std::multimap<std::string, std::string> children;
  for (const auto& [id, a] : doc.annotations) {
    if (auto p = annotation_parent(a)) children.emplace(*p, id);
  }
  std::set<std::string> closure{std::string(root)};
  std::deque<std::string> todo{std::string(root)};
  while (!todo.empty()) {
    auto cur = todo.front();
    todo.pop_front();
    auto [first, last] = children.equal_range(cur);
    for (auto it = first; it != last; ++it) {
      if (closure.insert(it->second).second) todo.push_back(it->second);
    }
  }
  return closure;
}

}  // namespace

std::string_view to_string(Stereotype s) noexcept {
  switch (s) {
    case Stereotype::None: return "None";
    case Stereotype::TimeSubdivision: return "Time_Subdivision";
    case Stereotype::SymbolicSubdivision: return "Symbolic_Subdivision";
    case Stereotype::SymbolicAssociation: return "Symbolic_Association";
  }
  return "None";
}

std::optional<Stereotype> parse_stereotype(std::string_view s) noexcept {
  if (s == "None") return Stereotype::None;
  if (s == "Time_Subdivision" || s == "TimeSubdivision") return Stereotype::TimeSubdivision;
  if (s == "Symbolic_Subdivision" || s == "SymbolicSubdivision") return Stereotype::SymbolicSubdivision;
  if (s == "Symbolic_Association" || s == "SymbolicAssociation") return Stereotype::SymbolicAssociation;
  return std::nullopt;
}

bool is_time_alignable(Stereotype s) noexcept { return s == Stereotype::None || s == Stereotype::TimeSubdivision; }

const std::string& annotation_id(const Annotation& a) {
  return std::visit([](const auto& x) -> const std::string& { return x.id; }, a);
}

const std::string& annotation_tier(const Annotation& a) {
  return std::visit([](const auto& x) -> const std::string& { return x.tier_id; }, a);
}

const AnnotationValue& annotation_value(const Annotation& a) {
  return std::visit([](const auto& x) -> const AnnotationValue& { return x.value; }, a);
}

std::optional<std::string> annotation_parent(const Annotation& a) {
  if (const auto* r = std::get_if<ReferringAnnotation>(&a)) return r->ref_annotation;
  return std::get<AlignableAnnotation>(a).parent;
}

std::uint64_t annotation_ordinal(std::string_view id) {
  if (!id.starts_with("a") || !all_digits(id.substr(1))) return 0;
  std::uint64_t n = 0;
  std::from_chars(id.data() + 1, id.data() + id.size(), n);
  return n;
}

const Tier& AnnotationDocument::tier(std::string_view tier_id) const {
  auto it = tiers.find(std::string(tier_id));
  if (it == tiers.end()) throw unknown_tier(tier_id);
  return it->second;
}

const LinguisticType& AnnotationDocument::type_of(const Tier& t) const {
  auto it = linguistic_types.find(t.type_id);
  if (it == linguistic_types.end()) {
    throw Error(ErrorCode::UnknownType, "no linguistic type '" + t.type_id + "'", {{"type", t.type_id}});
  }
  return it->second;
}

const Annotation& AnnotationDocument::annotation(std::string_view annotation_id) const {
  auto it = annotations.find(std::string(annotation_id));
  if (it == annotations.end()) throw unknown_annotation(annotation_id);
  return it->second;
}

AnnotationDocument new_document(std::string id, std::vector<MediaDescriptor> media) {
  AnnotationDocument doc;
  doc.id = std::move(id);
  doc.media = std::move(media);
  return doc;
}

void add_linguistic_type(AnnotationDocument& doc, std::string id, Stereotype stereotype, bool ontological) {
  check_new_id(doc, id);
  if (ontological && is_time_alignable(stereotype)) {
    throw Error(ErrorCode::InvalidOntologicalCombination,
                "ontological types must be Symbolic_Subdivision or Symbolic_Association, not " +
                    std::string(to_string(stereotype)),
                {{"type", id}, {"stereotype", std::string(to_string(stereotype))}});
  }
  LinguisticType t{id, stereotype, is_time_alignable(stereotype), ontological, false};
  doc.linguistic_types.emplace(std::move(id), std::move(t));
}

void add_tier(AnnotationDocument& doc, std::string id, std::optional<std::string> parent, std::string type_id,
              std::optional<std::string> profile_ref) {
  check_new_id(doc, id);
  auto type_it = doc.linguistic_types.find(type_id);
  if (type_it == doc.linguistic_types.end()) {
    throw Error(ErrorCode::UnknownType, "no linguistic type '" + type_id + "'", {{"type", type_id}});
  }
  const auto& type = type_it->second;
  if (parent && !doc.tiers.contains(*parent)) throw unknown_tier(*parent);

  if (!parent && type.stereotype != Stereotype::None) {
    throw Error(ErrorCode::RootMustBeAlignable,
                "root tier " + id + " needs a None-stereotype type, got " + std::string(to_string(type.stereotype)),
                {{"tier", id}, {"type", type_id}});
  }
  if (parent && type.stereotype == Stereotype::None) {
    throw Error(ErrorCode::ChildNeedsReferringType, "tier " + id + " has a parent but a None-stereotype type",
                {{"tier", id}, {"type", type_id}});
  }
  if (parent && type.stereotype == Stereotype::TimeSubdivision &&
      !doc.type_of(doc.tiers.at(*parent)).time_alignable) {
    throw Error(ErrorCode::TimeSubdivisionNeedsAlignableParent,
                "time-subdivision tier " + id + " needs a time-alignable parent, " + *parent + " is symbolic",
                {{"tier", id}, {"parent", *parent}});
  }
  if (type.ontological) {
    if (!profile_ref || profile_ref->empty()) {
      throw Error(ErrorCode::MissingProfile, "ontological tier " + id + " needs a profile", {{"tier", id}});
    }
    for (const auto& [other_id, other] : doc.tiers) {
      if (other.profile_ref == profile_ref) {
        throw Error(ErrorCode::ProfileAlreadyBound, "profile " + *profile_ref + " is already bound to tier " + other_id,
                    {{"profile", *profile_ref}, {"tier", other_id}});
      }
    }
  } else if (profile_ref) {
    throw Error(ErrorCode::UnexpectedProfile, "tier " + id + " is not ontological and cannot bind a profile",
                {{"tier", id}});
  }
  Tier tier{id, std::move(parent), std::move(type_id), std::move(profile_ref)};
  doc.tiers.emplace(std::move(id), std::move(tier));
}

void delete_tier(AnnotationDocument& doc, std::string_view id) {
  if (!doc.tiers.contains(std::string(id))) throw unknown_tier(id);
  std::set<std::string> doomed{std::string(id)};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [tid, t] : doc.tiers) {
      if (t.parent && doomed.contains(*t.parent) && doomed.insert(tid).second) grew = true;
    }
  }
  std::erase_if(doc.annotations, [&](const auto& kv) { return doomed.contains(annotation_tier(kv.second)); });
  std::erase_if(doc.tiers, [&](const auto& kv) { return doomed.contains(kv.first); });
  collect_garbage_slots(doc);
}

std::string add_alignable_annotation(AnnotationDocument& doc, std::string_view tier_id, std::int64_t begin_ms,
                                     std::int64_t end_ms, AnnotationValue value) {
  const auto& tier = doc.tier(tier_id);
  if (doc.type_of(tier).stereotype != Stereotype::None) {
    throw Error(ErrorCode::NotAlignableTier,
                "tier " + tier.id + " is not a top-level time-aligned tier; use subdivision or referring annotations",
                {{"tier", tier.id}});
  }
  if (std::holds_alternative<OntologyValue>(value)) {
    throw Error(ErrorCode::OntologyValueOnAlignable, "time-aligned annotations take string values",
                {{"tier", tier.id}});
  }
  if (begin_ms < 0 || begin_ms >= end_ms) {
    throw Error(ErrorCode::InvalidInterval,
                "invalid interval [" + std::to_string(begin_ms) + "," + std::to_string(end_ms) + "]",
                {{"begin", std::to_string(begin_ms)}, {"end", std::to_string(end_ms)}});
  }
  std::optional<std::string> begin_slot;
  std::optional<std::string> end_slot;
  for (const auto* other : alignables_on(doc, tier.id)) {
    auto ext = own_extent(doc, *other);
    if (begin_ms < ext.end && ext.begin < end_ms) {
      throw Error(ErrorCode::OverlapRejected,
                  "[" + std::to_string(begin_ms) + "," + std::to_string(end_ms) + "] overlaps " + other->id + " [" +
                      std::to_string(ext.begin) + "," + std::to_string(ext.end) + "]",
                  {{"tier", tier.id}, {"conflict", other->id}});
    }
    if (ext.end == begin_ms) begin_slot = other->end_slot;
    if (ext.begin == end_ms) end_slot = other->begin_slot;
  }
  if (!begin_slot) begin_slot = new_slot(doc, begin_ms);
  if (!end_slot) end_slot = new_slot(doc, end_ms);
  auto id = next_annotation_id(doc);
  doc.annotations.emplace(id, AlignableAnnotation{id, tier.id, *begin_slot, *end_slot, std::nullopt, std::move(value)});
  return id;
}

std::vector<std::string> subdivide_time(AnnotationDocument& doc, std::string_view parent_annotation,
                                        std::string_view child_tier, const std::vector<std::int64_t>& cut_points) {
  const auto& parent_any = doc.annotation(parent_annotation);
  const auto* parent = std::get_if<AlignableAnnotation>(&parent_any);
  const auto& tier = doc.tier(child_tier);
  if (parent == nullptr || doc.type_of(tier).stereotype != Stereotype::TimeSubdivision ||
      tier.parent != parent->tier_id) {
    throw Error(ErrorCode::NotTimeSubdivision,
                "tier " + tier.id + " is not a time subdivision of the tier holding " + std::string(parent_annotation),
                {{"tier", tier.id}, {"annotation", std::string(parent_annotation)}});
  }
  for (const auto* other : alignables_on(doc, tier.id)) {
    if (other->parent == parent->id) {
      throw Error(ErrorCode::AlreadySubdivided, parent->id + " is already subdivided on tier " + tier.id,
                  {{"tier", tier.id}, {"annotation", parent->id}});
    }
  }
  auto ext = own_extent(doc, *parent);
  for (auto cut : cut_points) {
    if (cut <= ext.begin || cut >= ext.end) {
      throw Error(ErrorCode::CutOutsideParent,
                  "cut " + std::to_string(cut) + " is not strictly inside [" + std::to_string(ext.begin) + "," +
                      std::to_string(ext.end) + "]",
                  {{"cut", std::to_string(cut)}});
    }
  }
  if (std::adjacent_find(cut_points.begin(), cut_points.end(), std::greater_equal<>()) != cut_points.end()) {
    throw Error(ErrorCode::InvalidInterval, "cut points must be strictly increasing");
  }

  std::vector<std::string> bounds;
  bounds.push_back(new_slot(doc, ext.begin));
  for (auto cut : cut_points) bounds.push_back(new_slot(doc, cut));
  bounds.push_back(new_slot(doc, ext.end));
  std::vector<std::string> ids;
  std::string parent_id = parent->id;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    auto id = next_annotation_id(doc);
    doc.annotations.emplace(id, AlignableAnnotation{id, tier.id, bounds[i], bounds[i + 1], parent_id, StringValue{}});
    ids.push_back(std::move(id));
  }
  return ids;
}

std::vector<std::string> chain_of(const AnnotationDocument& doc, std::string_view tier, std::string_view parent) {
  std::vector<const ReferringAnnotation*> members;
  for (const auto& [id, a] : doc.annotations) {
    const auto* r = std::get_if<ReferringAnnotation>(&a);
    if (r && r->tier_id == tier && r->ref_annotation == parent) members.push_back(r);
  }
  std::sort(members.begin(), members.end(), [](const auto* x, const auto* y) {
    return annotation_ordinal(x->id) < annotation_ordinal(y->id);
  });
  std::map<std::string, const ReferringAnnotation*> successor;
  std::vector<const ReferringAnnotation*> heads;
  for (const auto* r : members) {
    if (r->previous) {
      successor.emplace(*r->previous, r);
    } else {
      heads.push_back(r);
    }
  }
  std::vector<std::string> order;
  std::set<std::string> placed;
  for (const auto* head : heads) {
    for (const auto* cur = head; cur != nullptr && placed.insert(cur->id).second;) {
      order.push_back(cur->id);
      auto it = successor.find(cur->id);
      cur = it == successor.end() ? nullptr : it->second;
    }
  }
  for (const auto* r : members) {
    if (!placed.contains(r->id)) order.push_back(r->id);
  }
  return order;
}

std::string add_referring_annotation(AnnotationDocument& doc, std::string_view tier_id,
                                     std::string_view parent_annotation, AnnotationValue value,
                                     std::optional<std::string> after, const ProfileLookup& profiles) {
  const auto& tier = doc.tier(tier_id);
  auto stereotype = doc.type_of(tier).stereotype;
  if (stereotype != Stereotype::SymbolicSubdivision && stereotype != Stereotype::SymbolicAssociation) {
    throw Error(ErrorCode::NotReferringTier, "tier " + tier.id + " does not hold referring annotations",
                {{"tier", tier.id}});
  }
  const auto& parent = doc.annotation(parent_annotation);
  if (annotation_tier(parent) != tier.parent) {
    throw Error(ErrorCode::WrongTierParent,
                std::string(parent_annotation) + " is on tier " + annotation_tier(parent) + ", not on the parent of " +
                    tier.id,
                {{"tier", tier.id}, {"annotation", std::string(parent_annotation)}});
  }
  auto chain = chain_of(doc, tier.id, parent_annotation);
  if (stereotype == Stereotype::SymbolicAssociation) {
    if (!chain.empty()) {
      throw Error(ErrorCode::AssociationAlreadyPresent,
                  std::string(parent_annotation) + " already has an associated annotation on " + tier.id,
                  {{"tier", tier.id}, {"existing", chain.front()}});
    }
    if (after) {
      throw Error(ErrorCode::UnknownSibling, "symbolic association annotations have no siblings",
                  {{"sibling", *after}});
    }
  } else if (after && std::find(chain.begin(), chain.end(), *after) == chain.end()) {
    throw Error(ErrorCode::UnknownSibling,
                *after + " is not a sibling under " + std::string(parent_annotation) + " on " + tier.id,
                {{"sibling", *after}});
  }
  check_value(doc, tier, false, value, profiles);

  std::optional<std::string> previous = after;
  if (!previous && !chain.empty()) previous = chain.back();
  auto id = next_annotation_id(doc);
  if (after) {
    for (auto& [other_id, a] : doc.annotations) {
      auto* r = std::get_if<ReferringAnnotation>(&a);
      if (r && r->tier_id == tier.id && r->ref_annotation == parent_annotation && r->previous == after) {
        r->previous = id;
      }
    }
  }
  doc.annotations.emplace(
      id, ReferringAnnotation{id, tier.id, std::string(parent_annotation), std::move(previous), std::move(value)});
  return id;
}

void set_annotation_value(AnnotationDocument& doc, std::string_view annotation, AnnotationValue value,
                          const ProfileLookup& profiles) {
  const auto& a = doc.annotation(annotation);
  const auto& tier = doc.tier(annotation_tier(a));
  check_value(doc, tier, std::holds_alternative<AlignableAnnotation>(a), value, profiles);
  std::visit([&](auto& x) { x.value = std::move(value); }, doc.annotations.at(std::string(annotation)));
}

void delete_annotation(AnnotationDocument& doc, std::string_view id) {
  if (!doc.annotations.contains(std::string(id))) throw unknown_annotation(id);
  remove_annotations(doc, dependency_closure(doc, id));
}

void alter_time_slot(AnnotationDocument& doc, std::string_view slot, std::int64_t new_value_ms, AlterMode mode) {
  if (!doc.slots.contains(std::string(slot))) {
    throw Error(ErrorCode::UnknownSlot, "no time slot '" + std::string(slot) + "'", {{"slot", std::string(slot)}});
  }
  if (new_value_ms < 0) {
    throw Error(ErrorCode::InvalidInterval, "time values must be non-negative",
                {{"value", std::to_string(new_value_ms)}});
  }
  AnnotationDocument work = doc;
  work.slots.at(std::string(slot)).value = new_value_ms;

  // Parents are settled before their children.
  for (const auto& tier_id : tiers_top_down(work)) {
    if (work.type_of(work.tiers.at(tier_id)).stereotype != Stereotype::TimeSubdivision) continue;
    for (auto& [id, a] : work.annotations) {
      auto* child = std::get_if<AlignableAnnotation>(&a);
      if (child == nullptr || child->tier_id != tier_id || !child->parent) continue;
      auto bounds = own_extent(work, std::get<AlignableAnnotation>(work.annotations.at(*child->parent)));
      auto& b = *work.slots.at(child->begin_slot).value;
      auto& e = *work.slots.at(child->end_slot).value;
      if (b >= bounds.begin && e <= bounds.end) continue;
      if (mode == AlterMode::Reject) {
        throw Error(ErrorCode::ChildWouldEscape,
                    child->id + " would leave its parent interval [" + std::to_string(bounds.begin) + "," +
                        std::to_string(bounds.end) + "]",
                    {{"annotation", child->id}, {"parent", *child->parent}});
      }
      b = std::clamp(b, bounds.begin, bounds.end);
      e = std::clamp(e, bounds.begin, bounds.end);
    }
  }

  std::set<std::string> collapsed;
  for (const auto& [id, a] : work.annotations) {
    const auto& al = std::get_if<AlignableAnnotation>(&a);
    if (al == nullptr) continue;
    auto ext = own_extent(work, *al);
    if (ext.begin == ext.end && al->parent) {
      collapsed.insert(id);
    } else if (ext.begin >= ext.end) {
      throw Error(ErrorCode::InvalidInterval,
                  "moving " + std::string(slot) + " to " + std::to_string(new_value_ms) + " inverts " + id,
                  {{"annotation", id}, {"slot", std::string(slot)}});
    }
  }
  for (const auto& [tier_id, tier] : work.tiers) {
    if (work.type_of(tier).stereotype != Stereotype::None) continue;
    auto list = alignables_on(work, tier_id);
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        auto x = own_extent(work, *list[i]);
        auto y = own_extent(work, *list[j]);
        if (x.begin < y.end && y.begin < x.end) {
          throw Error(ErrorCode::OverlapRejected, list[i]->id + " would overlap " + list[j]->id,
                      {{"tier", tier_id}, {"conflict", list[j]->id}});
        }
      }
    }
  }
  if (!collapsed.empty()) {
    std::set<std::string> doomed;
    for (const auto& id : collapsed) {
      auto closure = dependency_closure(work, id);
      doomed.insert(closure.begin(), closure.end());
    }
    remove_annotations(work, doomed);
  }
  sort_time_order(work);
  doc = std::move(work);
}

Extent resolve_time_extent(const AnnotationDocument& doc, std::string_view annotation) {
  const Annotation* cur = &doc.annotation(annotation);
  for (std::size_t steps = 0; steps <= doc.annotations.size(); ++steps) {
    if (const auto* al = std::get_if<AlignableAnnotation>(cur)) return own_extent(doc, *al);
    cur = &doc.annotation(std::get<ReferringAnnotation>(*cur).ref_annotation);
  }
  throw Error(ErrorCode::InvariantViolation, "reference chain from " + std::string(annotation) + " does not terminate");
}

const std::string& searchable_text(const AnnotationValue& value) {
  if (const auto* s = std::get_if<StringValue>(&value)) return s->text;
  return std::get<OntologyValue>(value).user_defined_term;
}

std::vector<SearchHit> search(const AnnotationDocument& doc, std::string_view query,
                              const std::optional<std::vector<std::string>>& tiers, bool case_sensitive) {
  std::string needle = case_sensitive ? std::string(query) : text::ascii_lower(query);
  std::vector<std::pair<std::uint64_t, SearchHit>> hits;
  for (const auto& [id, a] : doc.annotations) {
    const auto& tier = annotation_tier(a);
    if (tiers && std::find(tiers->begin(), tiers->end(), tier) == tiers->end()) continue;
    const auto& text = searchable_text(annotation_value(a));
    std::string hay = case_sensitive ? text : text::ascii_lower(text);
    if (hay.find(needle) == std::string::npos) continue;
    hits.push_back({annotation_ordinal(id), SearchHit{tier, id, text, resolve_time_extent(doc, id)}});
  }
  std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
    if (x.second.extent.begin != y.second.extent.begin) return x.second.extent.begin < y.second.extent.begin;
    if (x.second.tier_id != y.second.tier_id) return x.second.tier_id < y.second.tier_id;
    return x.first < y.first;
  });
  std::vector<SearchHit> out;
  out.reserve(hits.size());
  for (auto& h : hits) out.push_back(std::move(h.second));
  return out;
}

std::vector<std::string> tiers_top_down(const AnnotationDocument& doc) {
  std::vector<std::string> order;
  std::set<std::string> placed;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& [id, t] : doc.tiers) {
      if (placed.contains(id)) continue;
      if (!t.parent || placed.contains(*t.parent)) {
        order.push_back(id);
        placed.insert(id);
        progress = true;
      }
    }
  }
  return order;
}

std::vector<std::string> dependents_of(const AnnotationDocument& doc, std::string_view annotation) {
  std::vector<std::string> out;
  for (const auto& [id, a] : doc.annotations) {
    if (annotation_parent(a) == annotation) out.push_back(id);
  }
  std::sort(out.begin(), out.end(),
            [](const std::string& x, const std::string& y) { return annotation_ordinal(x) < annotation_ordinal(y); });
  return out;
}

}  // namespace ontotier
