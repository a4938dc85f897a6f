#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace boolsearch::xml {

struct Element {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::string text;  ///< character data before the first child
  std::string tail;  ///< character data after this element's end tag, inside its parent

  const std::string* attribute(std::string_view key) const;
  const Element* child(std::string_view name) const;

  /// All character data inside this element, in document order.
  std::string all_text() const;

  /// Depth-first, pre-order visit of this element and its descendants.
  template <typename F>
  void walk(F&& f) const {
    f(*this);
    for (const auto& c : children) c->walk(f);
  }
};

/// Parses a whole document. Throws DataError carrying expat's line and column.
std::unique_ptr<Element> parse(std::string_view text);

}  // namespace boolsearch::xml
