#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lobsim/lob/order_book.hpp"

namespace lobsim {

/// `step,event_type,order_id,agent_id,side,price,qty`
void write_event_log(std::ostream& out, std::span<const EngineEvent> events);
void write_event_log(const std::string& path, std::span<const EngineEvent> events);
std::vector<EngineEvent> read_event_log(const std::string& path);

}  // namespace lobsim
