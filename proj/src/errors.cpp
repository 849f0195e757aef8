#include "unpred/errors.hpp"

namespace unpred {

void require(bool condition, const char* module, const std::string& message) {
  if (!condition) throw ConfigError(std::string(module) + ": " + message);
}

}  // namespace unpred
