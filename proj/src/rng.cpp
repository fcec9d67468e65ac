#include "fracdose/rng.hpp"

#include <sstream>

namespace fracdose {

std::string Rng::save_state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
}

void Rng::load_state(const std::string& text) {
    std::istringstream is(text);
    is >> gen_;
    if (!is) throw std::runtime_error("invalid rng state string");
}

}  // namespace fracdose
