// format.hpp: Locale-independent, round-trip exact number formatting for CSV output

#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fvheat {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw std::invalid_argument("parse_double: not a number: '" + std::string(text) + "'");
    return v;
}

}  // namespace fvheat
