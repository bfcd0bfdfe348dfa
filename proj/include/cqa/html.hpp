#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cqa {

struct HtmlTag {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::size_t begin = 0;  // offset of '<'
  std::size_t end = 0;    // offset one past '>'
  std::string_view attributes;
};

// Lexes every tag in document order. Comments and doctype declarations are
// skipped; a '<' that does not start a tag is treated as text.
std::vector<HtmlTag> scan_tags(std::string_view html);

// Decodes HTML character references (named subset plus numeric forms).
// Unknown references are left untouched.
std::string unescape_entities(std::string_view text);

// Removes tags, unescapes entities and collapses whitespace runs to a single
// space. Text inside <code>/<pre> is kept. Block-level tags act as word
// separators; inline formatting tags do not.
std::string strip_html(std::string_view html);

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace cqa
