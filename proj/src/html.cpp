#include "cqa/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <utility>

namespace cqa {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

constexpr std::array<std::pair<std::string_view, std::uint32_t>, 20> kNamedEntities{{
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},        {"quot", '"'},
    {"apos", '\''},    {"nbsp", ' '},     {"ndash", 0x2013},  {"mdash", 0x2014},
    {"hellip", 0x2026}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"copy", 0xA9},    {"reg", 0xAE},      {"trade", 0x2122},
    {"euro", 0x20AC},  {"times", 0xD7},   {"middot", 0xB7},   {"laquo", 0xAB},
}};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Tags that separate words when removed.
bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 24> kBlock{
      "p",  "br", "div", "li", "ul",    "ol",    "pre", "blockquote",
      "h1", "h2", "h3",  "h4", "h5",    "h6",    "hr",  "table",
      "tr", "td", "th",  "dd", "dt",    "dl",    "img", "section"};
  return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

}  // namespace

std::string unescape_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    const auto ref = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (ref.size() >= 2 && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = true;
      const bool hex = ref[1] == 'x' || ref[1] == 'X';
      const auto digits = ref.substr(hex ? 2 : 1);
      ok = !digits.empty();
      for (char c : digits) {
        const auto u = static_cast<unsigned char>(c);
        if (hex && std::isxdigit(u)) {
          cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(u) ? c - '0' : (std::tolower(u) - 'a' + 10));
        } else if (!hex && std::isdigit(u)) {
          cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        } else {
          ok = false;
          break;
        }
        if (cp > 0x10FFFF) {
          ok = false;
          break;
        }
      }
      if (ok) {
        append_utf8(out, cp == 0xA0 ? ' ' : cp);
        decoded = true;
      }
    } else {
      for (const auto& [name, cp] : kNamedEntities) {
        if (name == ref) {
          append_utf8(out, cp);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::vector<HtmlTag> scan_tags(std::string_view html) {
  std::vector<HtmlTag> tags;
  std::size_t i = 0;
  while ((i = html.find('<', i)) != std::string_view::npos) {
    if (html.substr(i, 4) == "<!--") {
      const auto close = html.find("-->", i + 4);
      i = close == std::string_view::npos ? html.size() : close + 3;
      continue;
    }
    std::size_t j = i + 1;
    bool closing = false;
    if (j < html.size() && html[j] == '/') {
      closing = true;
      ++j;
    }
    if (j < html.size() && html[j] == '!') {
      const auto close = html.find('>', j);
      i = close == std::string_view::npos ? html.size() : close + 1;
      continue;
    }
    const std::size_t name_begin = j;
    while (j < html.size() && std::isalnum(static_cast<unsigned char>(html[j]))) ++j;
    if (j == name_begin) {
      ++i;
      continue;
    }
    const auto close = html.find('>', j);
    if (close == std::string_view::npos) break;
    HtmlTag tag;
    tag.name.reserve(j - name_begin);
    for (std::size_t k = name_begin; k < j; ++k) {
      tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[k])));
    }
    tag.closing = closing;
    tag.self_closing = close > j && html[close - 1] == '/';
    tag.begin = i;
    tag.end = close + 1;
    tag.attributes = html.substr(j, close - j);
    tags.push_back(std::move(tag));
    i = close + 1;
  }
  return tags;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string strip_html(std::string_view html) {
  std::string raw;
  raw.reserve(html.size());
  std::size_t pos = 0;
  for (const auto& tag : scan_tags(html)) {
    raw.append(html.substr(pos, tag.begin - pos));
    if (is_block_tag(tag.name)) raw += ' ';
    pos = tag.end;
  }
  if (pos < html.size()) raw.append(html.substr(pos));
  return normalize_whitespace(unescape_entities(raw));
}

}  // namespace cqa
