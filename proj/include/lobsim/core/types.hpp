#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lobsim {

/// Prices are integer tick counts; quantities are whole contracts.
using Price = std::int64_t;
using Qty = std::int64_t;
using OrderId = std::int64_t;
using AgentId = std::int32_t;
using Step = std::int64_t;

enum class Side : std::uint8_t { Buy, Sell };
enum class OrderKind : std::uint8_t { Limit, Market };

constexpr Side opposite(Side s) noexcept { return s == Side::Buy ? Side::Sell : Side::Buy; }
constexpr int side_sign(Side s) noexcept { return s == Side::Buy ? 1 : -1; }

std::string_view to_string(Side s) noexcept;

/// Accepts Buy/Sell, B/S, buy/sell.
Side parse_side(std::string_view text);

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or inconsistent data (CLI exit code 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unreadable files, schema mismatches, bad configuration (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace lobsim
