#include "qbgg/laurent.hpp"

#include <json.hpp>

#include <sstream>

namespace qbgg {

std::string Laurent::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [e, c] : c_) j[std::to_string(e)] = c.str();
  return j.dump();
}

Laurent Laurent::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Laurent out;
  for (auto& [key, val] : j.items()) out.set(std::stoi(key), Rational::parse(val.get<std::string>()));
  return out;
}

std::string Laurent::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : c_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    if (e != 0) os << "*t^" << e;
  }
  return os.str();
}

}  // namespace qbgg
