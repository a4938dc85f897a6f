#include "xml.hpp"

#include <limits>
#include <new>

#include <expat.h>

#include "boolsearch/errors.hpp"

namespace boolsearch::xml {

const std::string* Element::attribute(std::string_view key) const {
  const auto it = attributes.find(std::string(key));
  return it == attributes.end() ? nullptr : &it->second;
}

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c->name == child_name) return c.get();
  }
  return nullptr;
}

namespace {

void append_text(const Element& e, std::string& out) {
  out += e.text;
  for (const auto& c : e.children) {
    append_text(*c, out);
    out += c->tail;
  }
}

struct Builder {
  std::unique_ptr<Element> root;
  std::vector<Element*> stack;

  static void start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto& b = *static_cast<Builder*>(data);
    auto element = std::make_unique<Element>();
    element->name = name;
    for (int i = 0; attrs[i] != nullptr; i += 2) element->attributes[attrs[i]] = attrs[i + 1];
    Element* raw = element.get();
    if (b.stack.empty()) {
      b.root = std::move(element);
    } else {
      b.stack.back()->children.push_back(std::move(element));
    }
    b.stack.push_back(raw);
  }

  static void end(void* data, const XML_Char*) { static_cast<Builder*>(data)->stack.pop_back(); }

  static void chars(void* data, const XML_Char* s, int len) {
    auto& b = *static_cast<Builder*>(data);
    if (b.stack.empty()) return;
    Element& top = *b.stack.back();
    std::string& target = top.children.empty() ? top.text : top.children.back()->tail;
    target.append(s, static_cast<std::size_t>(len));
  }
};

}  // namespace

std::string Element::all_text() const {
  std::string out;
  append_text(*this, out);
  return out;
}

std::unique_ptr<Element> parse(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                      &XML_ParserFree);
  if (!parser) throw std::bad_alloc();
  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &Builder::start, &Builder::end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::chars);
  if (text.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw DataError("XML document too large");
  }
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    const auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser.get()));
    const auto column = static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser.get())) + 1;
    throw DataError("XML error at line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " +
                        XML_ErrorString(XML_GetErrorCode(parser.get())),
                    line, column);
  }
  if (!builder.root) throw DataError("XML document has no root element");
  return std::move(builder.root);
}

}  // namespace boolsearch::xml
