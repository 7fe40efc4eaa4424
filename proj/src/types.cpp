#include "mrhet/types.hpp"

#include <algorithm>
#include <cctype>

#include "mrhet/errors.hpp"

namespace mrhet {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::MrWald: return "MrWald";
    case Method::MrWaldR: return "MrWaldR";
    case Method::MrWaldD: return "MrWaldD";
    case Method::Ivw: return "Ivw";
    case Method::Divw: return "Divw";
    case Method::Egger: return "Egger";
    case Method::WeightedMedian: return "WeightedMedian";
  }
  return "?";
}

namespace {

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::optional<Method> parse_method(std::string_view text) {
  const std::string key = squash(text);
  for (Method m : kAllMethods) {
    if (squash(method_name(m)) == key) return m;
  }
  if (key == "wm" || key == "wmedian" || key == "median") return Method::WeightedMedian;
  if (key == "mregger") return Method::Egger;
  return std::nullopt;
}

std::vector<Method> parse_method_list(std::string_view text) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    if (!item.empty()) {
      auto m = parse_method(item);
      if (!m) throw Error(ErrorKind::BadConfig, "unknown method '" + std::string(item) + "'");
      if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::BadConfig, "no methods selected");
  return out;
}

}  // namespace mrhet
