#pragma once

// Textual observation and action codec.
//
// Canonical observation grammar (one item per line, sections separated by a
// blank line, the text ending with a blank line):
//
//   [Info]
//   Time: MM:SS | Race: <r> | Enemy Race: <r> | Map: <name>
//   Minerals: <n> (+<rate>/min) | Gas: <n> (+<rate>/min)
//   Supply: <used>/<cap> (Army: <a>, Workers: <w>)
//   Alerts: None | <a>, <b>, ...
//   Upgrades: None | <u>, ...
//
//   [Queue]
//    - <Kind> [<id>] at (<x>,<y>): <Task> (<p>%)
//    - Constructing: <Kind> [<id>] at (<x>,<y>) (<p>%)
//
//   [My Units]
//   > Workers: (<n>Mining:[<ids>], <m>Mule:[<ids>])
//    - <entity line>           (individually listed workers)
//   > Army:
//    - <entity line>
//
//   [My Structures]
//    - <entity line>
//
//   [Visible Hostiles]
//   > Enemy Units:
//   > Enemy Structures:
//   > Snapshot Enemy Structures:
//    - <Kind> at (<x>,<y>)
//
// Entity line: " - <Kind> [<id>] at (<x>,<y>) (HP:<p>%[, Energy:<p>%][, Status:<s>])".
// Empty lists render as "[Empty]".

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "starwm/observation.hpp"

namespace starwm {

enum class ParseErrorKind { MalformedSection, MalformedLine, OutOfBounds };

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, int line, std::string section, const std::string& detail);

    ParseErrorKind kind() const noexcept { return kind_; }
    /// 1-based; 0 when the error is not tied to a line (e.g. a missing header).
    int line() const noexcept { return line_; }
    const std::string& section() const noexcept { return section_; }

private:
    ParseErrorKind kind_;
    int line_;
    std::string section_;
};

Observation parse_observation(std::string_view text);
std::string serialize_observation(const Observation& obs);

/// Parses "- +<t>s: <Kind> [<id>] - <Command>[ - <Target>]" lines, keeping input order.
/// A lone "(none)" line denotes an empty sequence.
std::vector<TimedAction> parse_actions(std::string_view text);
TimedAction parse_action_line(std::string_view line, int line_no = 1);

std::string format_action(const TimedAction& action);
/// Lines joined by '\n' with no trailing newline; "(none)" when empty.
std::string format_actions(const std::vector<TimedAction>& actions);

}  // namespace starwm
