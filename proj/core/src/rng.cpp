#include "ooc/rng.hpp"

#include <sstream>

namespace ooc {

std::string Rng::state() const {
  std::ostringstream os;
  os << seed_ << " " << eng_;
  return os.str();
}

void Rng::restore(const std::string& s) {
  std::istringstream is(s);
  is >> seed_ >> eng_;
}

}  // namespace ooc
