#include "lobsim/lob/event_log.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "lobsim/data/csv.hpp"

namespace lobsim {

void write_event_log(std::ostream& out, std::span<const EngineEvent> events) {
    out << "step,event_type,order_id,agent_id,side,price,qty\n";
    for (const auto& e : events) {
        out << fmt::format("{},{},{},{},{},{},{}\n", e.step, to_string(e.type), e.order_id, e.agent_id,
                           to_string(e.side), e.price, e.qty);
    }
}

void write_event_log(const std::string& path, std::span<const EngineEvent> events) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write event log " + path);
    write_event_log(out, events);
}

std::vector<EngineEvent> read_event_log(const std::string& path) {
    CsvReader reader(path, {"step", "event_type", "order_id", "agent_id", "side", "price", "qty"});
    std::vector<EngineEvent> events;
    while (auto row = reader.next()) {
        EngineEvent e;
        auto type = parse_event_type((*row)[1]);
        if (!type) throw IoError(fmt::format("{}:{}: unknown event type", path, reader.line()));
        e.step = parse_int(row->at(0), reader);
        e.type = *type;
        e.order_id = parse_int(row->at(2), reader);
        e.agent_id = static_cast<AgentId>(parse_int(row->at(3), reader));
        e.side = parse_side((*row)[4]);
        e.price = parse_int(row->at(5), reader);
        e.qty = parse_int(row->at(6), reader);
        events.push_back(e);
    }
    return events;
}

}  // namespace lobsim
