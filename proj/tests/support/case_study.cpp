#include "case_study.hpp"

using namespace ontotier;

namespace fixtures {

Profile case_profile() {
  auto p = new_profile("Artem", "1.0", kGold);
  add_term(p, "PC", {"Participle"});
  add_term(p, "PV", {"Preverb"});
  add_term(p, "N", {"Noun"});
  add_term(p, "V", {"Verb"});
  add_term(p, "NI", {"Noun", "Inanimate"});
  return p;
}

ProfileLookup case_lookup() {
  static const Profile profile = case_profile();
  return [](std::string_view ref) -> const Profile* { return ref == kCaseProfileRef ? &profile : nullptr; };
}

AnnotationDocument case_study_skeleton() {
  auto doc = new_document(kCaseBase, {{"file:///C:/wabo4.wav", "audio/x-wav", 0, std::nullopt}});
  add_linguistic_type(doc, "orthographic", Stereotype::None, false);
  add_linguistic_type(doc, "translation", Stereotype::SymbolicAssociation, false);
  add_linguistic_type(doc, "words", Stereotype::SymbolicSubdivision, false);
  add_linguistic_type(doc, "parse", Stereotype::SymbolicSubdivision, false);
  add_linguistic_type(doc, "gloss", Stereotype::SymbolicAssociation, false);
  add_linguistic_type(doc, "ontology", Stereotype::SymbolicAssociation, true);
  add_tier(doc, "Orthographic", std::nullopt, "orthographic");
  add_tier(doc, "Translation", "Orthographic", "translation");
  add_tier(doc, "Words", "Orthographic", "words");
  add_tier(doc, "Parse", "Words", "parse");
  add_tier(doc, "Gloss", "Parse", "gloss");
  add_tier(doc, "Ontology", "Gloss", "ontology", kCaseProfileRef);
  return doc;
}

AnnotationDocument build_case_study() {
  auto doc = case_study_skeleton();
  auto lookup = case_lookup();

  auto sentence = add_alignable_annotation(doc, "Orthographic", kSentenceBegin, kSentenceEnd,
                                           StringValue{"sentence (orthographic transcription)"});
  add_referring_annotation(doc, "Translation", sentence, StringValue{"free translation"});

  // Morph counts per word; eleven parses in all.
  const int morphs[] = {1, 2, 2, 1, 2, 1, 2};
  std::vector<std::string> words;
  for (int w = 0; w < 7; ++w) {
    std::string text = w == 0 ? "neko" : "word-" + std::to_string(w + 1);
    words.push_back(add_referring_annotation(doc, "Words", sentence, StringValue{text}));
  }
  std::vector<std::string> parses;
  for (int w = 0; w < 7; ++w) {
    for (int m = 0; m < morphs[w]; ++m) {
      auto text = "morph-" + std::to_string(w + 1) + "." + std::to_string(m + 1);
      parses.push_back(add_referring_annotation(doc, "Parse", words[w], StringValue{text}));
    }
  }
  std::vector<std::string> glosses;
  for (std::size_t i = 0; i < parses.size(); ++i) {
    std::string text = i == 0 ? "used to" : "gloss-" + std::to_string(i + 1);
    glosses.push_back(add_referring_annotation(doc, "Gloss", parses[i], StringValue{text}));
  }

  struct Tag {
    const char* term;
    std::vector<std::string> classes;
  };
  const Tag tags[] = {{"PC", {"Participle"}}, {"V", {"Verb"}}, {"N", {"Noun"}}, {"NI", {"Noun", "Inanimate"}},
                      {"PV", {"Preverb"}}};
  for (std::size_t i = 0; i < glosses.size(); ++i) {
    OntologyValue v;
    bool last = i + 1 == glosses.size();
    const auto& tag = last ? tags[4] : tags[i % 4];
    v.user_defined_term = tag.term;
    for (const auto& c : tag.classes) v.instances.push_back(kGold + "#" + c);
    if (last) {
      v.descriptions = {"comments"};
      v.ont_annotation_id = "e";
    } else {
      v.ont_annotation_id = "o" + std::to_string(i + 1);
    }
    add_referring_annotation(doc, "Ontology", glosses[i], v, std::nullopt, lookup);
  }
  return doc;
}

}  // namespace fixtures
