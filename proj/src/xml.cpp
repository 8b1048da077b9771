#include "ontotier/xml.hpp"

#include "ontotier/error.hpp"

#include <expat.h>

#include <memory>

namespace ontotier::xml {

namespace {

constexpr char kSeparator = '\x1f';

void split_name(const char* raw, std::string& ns, std::string& local) {
  std::string_view full(raw);
  auto pos = full.find(kSeparator);
  if (pos == std::string_view::npos) {
    ns.clear();
    local.assign(full);
  } else {
    ns.assign(full.substr(0, pos));
    local.assign(full.substr(pos + 1));
  }
}

struct Builder {
  XML_Parser parser = nullptr;
  Element root;
  bool have_root = false;
  std::vector<Element*> stack;

  static void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto* self = static_cast<Builder*>(user);
    Element el;
    split_name(name, el.ns, el.name);
    el.line = static_cast<long>(XML_GetCurrentLineNumber(self->parser));
    for (int i = 0; atts[i] != nullptr; i += 2) {
      Attribute a;
      split_name(atts[i], a.ns, a.name);
      a.value = atts[i + 1];
      el.attributes.push_back(std::move(a));
    }
    if (self->stack.empty()) {
      self->root = std::move(el);
      self->have_root = true;
      self->stack.push_back(&self->root);
    } else {
      auto& siblings = self->stack.back()->children;
      siblings.push_back(std::move(el));
      self->stack.push_back(&siblings.back());
    }
  }

  static void on_end(void* user, const XML_Char*) {
    static_cast<Builder*>(user)->stack.pop_back();
  }

  static void on_text(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<Builder*>(user);
    if (!self->stack.empty()) self->stack.back()->text.append(s, static_cast<std::size_t>(len));
  }
};

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

const std::string* Element::attribute(std::string_view want_ns, std::string_view want_name) const {
  for (const auto& a : attributes) {
    if (a.ns == want_ns && a.name == want_name) return &a.value;
  }
  return nullptr;
}

std::string Element::qualified_name() const {
  if (ns.empty()) return name;
  return "{" + ns + "}" + name;
}

Element parse(std::string_view bytes) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS(nullptr, kSeparator));
  if (!parser) throw Error(ErrorCode::MalformedXml, "cannot allocate XML parser");

  // Stack pointers stay valid: a vector only grows after its previous last
  // element has been closed and popped.
  Builder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);

  if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) == XML_STATUS_ERROR) {
    auto line = XML_GetCurrentLineNumber(parser.get());
    throw Error(ErrorCode::MalformedXml,
                "line " + std::to_string(line) + ": " + XML_ErrorString(XML_GetErrorCode(parser.get())),
                {{"line", std::to_string(line)}});
  }
  if (!builder.have_root) throw Error(ErrorCode::MalformedXml, "no root element");
  return std::move(builder.root);
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace ontotier::xml
