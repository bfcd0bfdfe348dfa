#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace cqa::detail {

// Attribute view over one `<row .../>` element of a dump file. Values are
// already XML-unescaped by the parser.
class Row {
 public:
  Row(const char** attributes, long line) : attributes_(attributes), line_(line) {}

  std::optional<std::string_view> get(std::string_view name) const {
    for (const char** a = attributes_; *a != nullptr; a += 2) {
      if (name == a[0]) return std::string_view(a[1]);
    }
    return std::nullopt;
  }
  long line() const { return line_; }

 private:
  const char** attributes_;
  long line_;
};

// Streams every <row> element of a Stack Exchange dump through `on_row`.
// Throws DataError("<what>: line N: ...") on malformed XML.
void for_each_row(std::istream& in, std::string_view what, const std::function<void(const Row&)>& on_row);

}  // namespace cqa::detail
