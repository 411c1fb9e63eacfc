#include "c2f/errors.hpp"

namespace c2f {

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const IoError*>(&e) != nullptr) {
    return 3;
  }
  return 2;
}

}  // namespace c2f
