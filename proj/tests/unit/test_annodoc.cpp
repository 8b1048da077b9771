#include "doctest.h"

#include "case_study.hpp"

#include "ontotier/error.hpp"

using namespace ontotier;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::IoError;
}

// Root "Utt" with a time subdivision "Seg", symbolic "Tok" under Utt and
// an association "Note" under Tok.
AnnotationDocument small() {
  auto d = new_document("file:///tmp/small.eaf");
  add_linguistic_type(d, "utt", Stereotype::None, false);
  add_linguistic_type(d, "seg", Stereotype::TimeSubdivision, false);
  add_linguistic_type(d, "tok", Stereotype::SymbolicSubdivision, false);
  add_linguistic_type(d, "note", Stereotype::SymbolicAssociation, false);
  add_tier(d, "Utt", std::nullopt, "utt");
  add_tier(d, "Seg", "Utt", "seg");
  add_tier(d, "Tok", "Utt", "tok");
  add_tier(d, "Note", "Tok", "note");
  return d;
}

Extent ext(const AnnotationDocument& d, const std::string& id) { return resolve_time_extent(d, id); }

const AlignableAnnotation& al(const AnnotationDocument& d, const std::string& id) {
  return std::get<AlignableAnnotation>(d.annotation(id));
}

}  // namespace

TEST_CASE("annodoc: stereotype names") {
  CHECK(to_string(Stereotype::SymbolicAssociation) == "Symbolic_Association");
  CHECK(parse_stereotype("Time_Subdivision") == Stereotype::TimeSubdivision);
  CHECK(parse_stereotype("SymbolicSubdivision") == Stereotype::SymbolicSubdivision);
  CHECK(!parse_stereotype("Included_In"));
  CHECK(is_time_alignable(Stereotype::TimeSubdivision));
  CHECK(!is_time_alignable(Stereotype::SymbolicAssociation));
}

TEST_CASE("annodoc: identifiers") {
  auto d = small();
  CHECK(code_of([&] { add_linguistic_type(d, "Utt", Stereotype::None, false); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { add_tier(d, "utt", std::nullopt, "utt"); }) == ErrorCode::DuplicateId);
  for (const char* bad : {"", "1x", "a b", "a12", "a3Value", "ts4", "media1", "Symbolic_Subdivision"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { add_tier(d, bad, std::nullopt, "utt"); }) == ErrorCode::InvalidId);
  }
  add_tier(d, "a", std::nullopt, "utt");
  add_tier(d, "ab12", std::nullopt, "utt");
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: tier and type rules") {
  auto d = small();
  CHECK(code_of([&] { add_linguistic_type(d, "o", Stereotype::None, true); }) == ErrorCode::InvalidOntologicalCombination);
  CHECK(code_of([&] { add_linguistic_type(d, "o", Stereotype::TimeSubdivision, true); }) ==
        ErrorCode::InvalidOntologicalCombination);
  add_linguistic_type(d, "onto", Stereotype::SymbolicAssociation, true);

  CHECK(code_of([&] { add_tier(d, "X", std::nullopt, "nope"); }) == ErrorCode::UnknownType);
  CHECK(code_of([&] { add_tier(d, "X", "Nope", "tok"); }) == ErrorCode::UnknownTier);
  CHECK(code_of([&] { add_tier(d, "X", std::nullopt, "tok"); }) == ErrorCode::RootMustBeAlignable);
  CHECK(code_of([&] { add_tier(d, "X", "Utt", "utt"); }) == ErrorCode::ChildNeedsReferringType);
  CHECK(code_of([&] { add_tier(d, "X", "Tok", "seg"); }) == ErrorCode::TimeSubdivisionNeedsAlignableParent);
  CHECK(code_of([&] { add_tier(d, "X", "Tok", "onto"); }) == ErrorCode::MissingProfile);
  CHECK(code_of([&] { add_tier(d, "X", "Tok", "note", "p.prf"); }) == ErrorCode::UnexpectedProfile);
  add_tier(d, "O1", "Tok", "onto", "p.prf");
  CHECK(code_of([&] { add_tier(d, "O2", "Tok", "onto", "p.prf"); }) == ErrorCode::ProfileAlreadyBound);
  add_tier(d, "SegSeg", "Seg", "seg");
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: alignable annotations share boundary slots") {
  auto d = small();
  auto a = add_alignable_annotation(d, "Utt", 0, 1000, StringValue{"one"});
  auto b = add_alignable_annotation(d, "Utt", 1000, 2000);
  auto c = add_alignable_annotation(d, "Utt", 3000, 4000);
  CHECK(a == "a1");
  CHECK(al(d, a).end_slot == al(d, b).begin_slot);
  CHECK(al(d, b).end_slot != al(d, c).begin_slot);
  CHECK(d.slots.size() == 5);
  CHECK(d.time_order == std::vector<std::string>{"ts1", "ts2", "ts3", "ts4", "ts5"});

  auto before = d;
  CHECK(code_of([&] { add_alignable_annotation(d, "Utt", 1500, 2500); }) == ErrorCode::OverlapRejected);
  CHECK(code_of([&] { add_alignable_annotation(d, "Utt", 5000, 5000); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { add_alignable_annotation(d, "Utt", -5, 5); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { add_alignable_annotation(d, "Seg", 5000, 6000); }) == ErrorCode::NotAlignableTier);
  CHECK(code_of([&] { add_alignable_annotation(d, "Utt", 5000, 6000, OntologyValue{"", "T", {"i"}, {}}); }) ==
        ErrorCode::OntologyValueOnAlignable);
  CHECK(code_of([&] { add_alignable_annotation(d, "Nope", 5000, 6000); }) == ErrorCode::UnknownTier);
  CHECK(d == before);

  // A new annotation between two others picks up both neighbours' slots.
  auto between = add_alignable_annotation(d, "Utt", 2000, 3000);
  CHECK(al(d, between).begin_slot == al(d, b).end_slot);
  CHECK(al(d, between).end_slot == al(d, c).begin_slot);
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: time subdivision") {
  auto d = small();
  auto p = add_alignable_annotation(d, "Utt", 100, 900);
  auto kids = subdivide_time(d, p, "Seg", {300, 600});
  REQUIRE(kids.size() == 3);
  CHECK(ext(d, kids[0]) == Extent{100, 300});
  CHECK(ext(d, kids[1]) == Extent{300, 600});
  CHECK(ext(d, kids[2]) == Extent{600, 900});
  CHECK(al(d, kids[0]).end_slot == al(d, kids[1]).begin_slot);
  CHECK(al(d, kids[1]).parent == p);
  CHECK(check_invariants(d).empty());

  auto q = add_alignable_annotation(d, "Utt", 1000, 2000);
  auto before = d;
  CHECK(code_of([&] { subdivide_time(d, p, "Seg", {}); }) == ErrorCode::AlreadySubdivided);
  CHECK(code_of([&] { subdivide_time(d, q, "Seg", {1000}); }) == ErrorCode::CutOutsideParent);
  CHECK(code_of([&] { subdivide_time(d, q, "Seg", {2500}); }) == ErrorCode::CutOutsideParent);
  CHECK(code_of([&] { subdivide_time(d, q, "Seg", {1500, 1200}); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { subdivide_time(d, q, "Seg", {1500, 1500}); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { subdivide_time(d, q, "Tok", {1500}); }) == ErrorCode::NotTimeSubdivision);
  CHECK(code_of([&] { subdivide_time(d, kids[0], "Seg", {200}); }) == ErrorCode::NotTimeSubdivision);
  CHECK(d == before);

  auto whole = subdivide_time(d, q, "Seg", {});
  REQUIRE(whole.size() == 1);
  CHECK(ext(d, whole[0]) == Extent{1000, 2000});
}

TEST_CASE("annodoc: referring annotations and sibling chains") {
  auto d = small();
  auto u = add_alignable_annotation(d, "Utt", 0, 1000);
  auto t1 = add_referring_annotation(d, "Tok", u, StringValue{"one"});
  auto t3 = add_referring_annotation(d, "Tok", u, StringValue{"three"});
  auto t2 = add_referring_annotation(d, "Tok", u, StringValue{"two"}, t1);
  CHECK(chain_of(d, "Tok", u) == std::vector<std::string>{t1, t2, t3});
  CHECK(ext(d, t2) == Extent{0, 1000});
  auto n = add_referring_annotation(d, "Note", t2, StringValue{"note"});
  CHECK(dependents_of(d, t2) == std::vector<std::string>{n});
  CHECK(check_invariants(d).empty());

  auto before = d;
  CHECK(code_of([&] { add_referring_annotation(d, "Note", t2, StringValue{}); }) == ErrorCode::AssociationAlreadyPresent);
  CHECK(code_of([&] { add_referring_annotation(d, "Note", u, StringValue{}); }) == ErrorCode::WrongTierParent);
  CHECK(code_of([&] { add_referring_annotation(d, "Utt", u, StringValue{}); }) == ErrorCode::NotReferringTier);
  CHECK(code_of([&] { add_referring_annotation(d, "Tok", u, StringValue{}, "a99"); }) == ErrorCode::UnknownSibling);
  CHECK(code_of([&] { add_referring_annotation(d, "Note", t1, StringValue{}, t2); }) == ErrorCode::UnknownSibling);
  CHECK(code_of([&] { add_referring_annotation(d, "Tok", "a99", StringValue{}); }) == ErrorCode::UnknownAnnotation);
  CHECK(code_of([&] { add_referring_annotation(d, "Tok", u, OntologyValue{"", "T", {"i"}, {}}); }) ==
        ErrorCode::WrongValueKind);
  CHECK(d == before);

  // Deleting the middle sibling relinks the chain and drops its note.
  delete_annotation(d, t2);
  CHECK(chain_of(d, "Tok", u) == std::vector<std::string>{t1, t3});
  CHECK(!d.annotations.contains(n));
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: ontology values") {
  auto d = fixtures::build_case_study();
  auto lookup = fixtures::case_lookup();
  OntologyValue v{"x", "NI", {fixtures::kGold + "#Noun"}, {}};
  set_annotation_value(d, "a33", v, lookup);
  CHECK(std::get<OntologyValue>(annotation_value(d.annotation("a33"))).user_defined_term == "NI");

  auto before = d;
  CHECK(code_of([&] { set_annotation_value(d, "a33", OntologyValue{"x", "ZZ", {"i"}, {}}, lookup); }) ==
        ErrorCode::TermNotInProfile);
  CHECK(code_of([&] { set_annotation_value(d, "a33", OntologyValue{"x", "NI", {}, {}}, lookup); }) ==
        ErrorCode::EmptyInstances);
  CHECK(code_of([&] { set_annotation_value(d, "a33", StringValue{"N"}, lookup); }) == ErrorCode::WrongValueKind);
  CHECK(code_of([&] { set_annotation_value(d, "a33", v); }) == ErrorCode::ProfileUnavailable);
  CHECK(code_of([&] { set_annotation_value(d, "a1", v, lookup); }) == ErrorCode::OntologyValueOnAlignable);
  CHECK(code_of([&] { set_annotation_value(d, "a3", v, lookup); }) == ErrorCode::WrongValueKind);
  CHECK(d == before);
  CHECK(check_invariants(d, lookup).empty());
}

TEST_CASE("annodoc: cascades") {
  auto d = fixtures::build_case_study();
  auto words = chain_of(d, "Words", "a1");
  REQUIRE(words.size() == 7);
  delete_annotation(d, words[1]);
  // word 2 carried two parses, two glosses and two ontology annotations
  CHECK(d.annotations.size() == 42 - 7);
  CHECK(chain_of(d, "Words", "a1").size() == 6);
  CHECK(check_invariants(d, fixtures::case_lookup()).empty());

  delete_tier(d, "Parse");
  CHECK(!d.tiers.contains("Gloss"));
  CHECK(!d.tiers.contains("Ontology"));
  CHECK(d.tiers.size() == 3);
  CHECK(d.annotations.size() == 8);

  delete_annotation(d, "a1");
  CHECK(d.annotations.empty());
  CHECK(d.slots.empty());
  CHECK(d.time_order.empty());
  CHECK(d.next_annotation_ordinal == 43);
  CHECK(code_of([&] { delete_annotation(d, "a1"); }) == ErrorCode::UnknownAnnotation);
  CHECK(code_of([&] { delete_tier(d, "Parse"); }) == ErrorCode::UnknownTier);
}

TEST_CASE("annodoc: deleting a subdivision child closes the gap") {
  auto d = small();
  auto p = add_alignable_annotation(d, "Utt", 0, 900);
  auto kids = subdivide_time(d, p, "Seg", {300, 600});
  delete_annotation(d, kids[1]);
  CHECK(ext(d, kids[0]) == Extent{0, 600});
  CHECK(ext(d, kids[2]) == Extent{600, 900});
  CHECK(d.slots.size() == 5);
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: moving time slots") {
  auto d = small();
  auto p = add_alignable_annotation(d, "Utt", 0, 900);
  auto q = add_alignable_annotation(d, "Utt", 1000, 2000);
  auto kids = subdivide_time(d, p, "Seg", {300, 600});
  const auto end_slot = al(d, p).end_slot;
  const auto cut = al(d, kids[0]).end_slot;

  auto before = d;
  CHECK(code_of([&] { alter_time_slot(d, end_slot, 500, AlterMode::Reject); }) == ErrorCode::ChildWouldEscape);
  CHECK(code_of([&] { alter_time_slot(d, end_slot, 1500, AlterMode::Trim); }) == ErrorCode::OverlapRejected);
  CHECK(code_of([&] { alter_time_slot(d, cut, 700, AlterMode::Reject); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { alter_time_slot(d, cut, -1, AlterMode::Trim); }) == ErrorCode::InvalidInterval);
  CHECK(code_of([&] { alter_time_slot(d, "ts99", 1, AlterMode::Trim); }) == ErrorCode::UnknownSlot);
  CHECK(d == before);

  alter_time_slot(d, cut, 200, AlterMode::Reject);
  CHECK(ext(d, kids[0]) == Extent{0, 200});
  CHECK(ext(d, kids[1]) == Extent{200, 600});

  // Shrinking the parent trims the last child and collapses the middle one.
  alter_time_slot(d, end_slot, 500, AlterMode::Trim);
  CHECK(ext(d, p) == Extent{0, 500});
  CHECK(ext(d, kids[1]) == Extent{200, 500});
  CHECK(!d.annotations.contains(kids[2]));
  CHECK(check_invariants(d).empty());

  alter_time_slot(d, al(d, q).begin_slot, 700, AlterMode::Reject);
  CHECK(ext(d, q) == Extent{700, 2000});
  for (std::size_t i = 0; i + 1 < d.time_order.size(); ++i) {
    CHECK(*d.slots.at(d.time_order[i]).value <= *d.slots.at(d.time_order[i + 1]).value);
  }
  CHECK(check_invariants(d).empty());
}

TEST_CASE("annodoc: search") {
  auto d = fixtures::build_case_study();
  auto hits = search(d, "neko");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == SearchHit{"Words", "a3", "neko", {0, 4200}});
  CHECK(search(d, "NEKO").empty());
  CHECK(search(d, "NEKO", std::nullopt, false).size() == 1);
  CHECK(search(d, "neko", std::vector<std::string>{"Parse"}).empty());
  CHECK(search(d, "PV").size() == 1);
  auto morphs = search(d, "morph-2.");
  REQUIRE(morphs.size() == 2);
  CHECK(morphs[0].annotation_id < morphs[1].annotation_id);
  CHECK(search(d, "").size() == d.annotations.size());
}
