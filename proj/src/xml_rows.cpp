#include "xml_rows.hpp"

#include <expat.h>

#include <array>
#include <memory>
#include <string>

#include "cqa/error.hpp"

namespace cqa::detail {

namespace {

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

struct Context {
  XML_Parser parser = nullptr;
  const std::function<void(const Row&)>* on_row = nullptr;
  std::exception_ptr error;
};

void on_start(void* user_data, const XML_Char* name, const XML_Char** attributes) {
  auto* ctx = static_cast<Context*>(user_data);
  if (ctx->error || std::string_view(name) != "row") return;
  try {
    const Row row(attributes, static_cast<long>(XML_GetCurrentLineNumber(ctx->parser)));
    (*ctx->on_row)(row);
  } catch (...) {
    ctx->error = std::current_exception();
    XML_StopParser(ctx->parser, XML_FALSE);
  }
}

}  // namespace

void for_each_row(std::istream& in, std::string_view what, const std::function<void(const Row&)>& on_row) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw std::runtime_error("cannot allocate XML parser");
  Context ctx;
  ctx.parser = parser.get();
  ctx.on_row = &on_row;
  XML_SetUserData(parser.get(), &ctx);
  XML_SetStartElementHandler(parser.get(), on_start);

  std::array<char, 1 << 16> buffer{};
  bool done = false;
  while (!done) {
    in.read(buffer.data(), buffer.size());
    const auto n = in.gcount();
    done = n < static_cast<std::streamsize>(buffer.size());
    if (XML_Parse(parser.get(), buffer.data(), static_cast<int>(n), done ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      if (ctx.error) std::rethrow_exception(ctx.error);
      throw DataError(std::string(what) + ": line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) +
                      ": " + XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
  }
  if (ctx.error) std::rethrow_exception(ctx.error);
}

}  // namespace cqa::detail
