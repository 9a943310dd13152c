#include "lobsim/core/types.hpp"

#include <string>

namespace lobsim {

std::string_view to_string(Side s) noexcept { return s == Side::Buy ? "Buy" : "Sell"; }

Side parse_side(std::string_view text) {
    if (text == "Buy" || text == "B" || text == "buy" || text == "BUY") return Side::Buy;
    if (text == "Sell" || text == "S" || text == "sell" || text == "SELL") return Side::Sell;
    throw DomainError("unknown side '" + std::string(text) + "'");
}

}  // namespace lobsim
