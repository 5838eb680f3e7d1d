#include "starwm/codec.hpp"

#include <array>
#include <charconv>
#include <set>
#include <sstream>

namespace starwm {

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::MalformedSection: return "MalformedSection";
        case ParseErrorKind::MalformedLine: return "MalformedLine";
        case ParseErrorKind::OutOfBounds: return "OutOfBounds";
    }
    return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, int line, std::string section, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at line " + std::to_string(line) +
                         (section.empty() ? "" : " in " + section) + ": " + detail),
      kind_(kind),
      line_(line),
      section_(std::move(section)) {}

namespace {

constexpr std::array<std::string_view, 5> kSections = {"[Info]", "[Queue]", "[My Units]",
                                                       "[My Structures]", "[Visible Hostiles]"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

class Cursor {
public:
    Cursor(std::string_view s, int line_no, std::string_view section)
        : s_(s), line_(line_no), section_(section) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(ParseErrorKind::MalformedLine, line_, std::string(section_), what);
    }

    bool consume(std::string_view lit) {
        if (s_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view lit) {
        if (!consume(lit)) fail("expected \"" + std::string(lit) + "\"");
    }

    void skip_spaces() {
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    }

    int read_int() {
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        int value = 0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr == first) fail("expected integer");
        pos_ += static_cast<size_t>(ptr - first);
        return value;
    }

    std::string_view read_until(std::string_view delim) {
        const auto at = s_.find(delim, pos_);
        if (at == std::string_view::npos) fail("expected \"" + std::string(delim) + "\"");
        auto out = s_.substr(pos_, at - pos_);
        pos_ = at;
        return out;
    }

    std::string_view read_until_last(std::string_view delim) {
        const auto at = s_.rfind(delim);
        if (at == std::string_view::npos || at < pos_) fail("expected \"" + std::string(delim) + "\"");
        auto out = s_.substr(pos_, at - pos_);
        pos_ = at;
        return out;
    }

    std::string_view rest() {
        auto out = s_.substr(pos_);
        pos_ = s_.size();
        return out;
    }

    bool done() const { return pos_ == s_.size(); }

    void expect_end() const {
        if (!done()) fail("unexpected trailing text \"" + std::string(s_.substr(pos_)) + "\"");
    }

    Point read_point() {
        expect("(");
        skip_spaces();
        Point p;
        p.x = read_int();
        skip_spaces();
        expect(",");
        skip_spaces();
        p.y = read_int();
        skip_spaces();
        expect(")");
        return p;
    }

    std::vector<int> read_id_list() {
        std::vector<int> ids;
        expect("[");
        if (consume("]")) return ids;
        while (true) {
            skip_spaces();
            ids.push_back(read_int());
            skip_spaces();
            if (consume("]")) return ids;
            expect(",");
        }
    }

    int line() const { return line_; }

private:
    std::string_view s_;
    size_t pos_ = 0;
    int line_;
    std::string_view section_;
};

std::string_view nonempty_token(Cursor& c, std::string_view tok, const char* what) {
    if (tok.empty()) c.fail(std::string("empty ") + what);
    return tok;
}

std::vector<std::string> split_list(std::string_view body) {
    std::vector<std::string> items;
    if (body == "None") return items;
    size_t start = 0;
    while (true) {
        const auto at = body.find(", ", start);
        items.emplace_back(trim(body.substr(start, at == std::string_view::npos ? at : at - start)));
        if (at == std::string_view::npos) break;
        start = at + 2;
    }
    return items;
}

class ObservationParser {
public:
    Observation parse(std::string_view text) {
        const auto lines = split_lines(text);
        size_t next_section = 0;
        bool started = false;
        for (size_t i = 0; i < lines.size(); ++i) {
            line_no_ = static_cast<int>(i) + 1;
            const auto line = trim(lines[i]);
            if (line.empty()) continue;
            if (is_header(line)) {
                if (next_section >= kSections.size() || line != kSections[next_section]) {
                    throw ParseError(ParseErrorKind::MalformedSection, line_no_, std::string(line),
                                     "unexpected section header; expected " +
                                         std::string(next_section < kSections.size()
                                                         ? kSections[next_section]
                                                         : "end of text"));
                }
                section_ = line;
                group_.clear();
                ++next_section;
                started = true;
                if (next_section == 1) obs_.map_size = map_size_for("");
                continue;
            }
            if (!started) {
                throw ParseError(ParseErrorKind::MalformedSection, line_no_, "",
                                 "text must begin with the [Info] tag");
            }
            parse_line(line);
        }
        if (next_section < kSections.size()) {
            throw ParseError(ParseErrorKind::MalformedSection, 0, std::string(kSections[next_section]),
                             "missing section header " + std::string(kSections[next_section]));
        }
        return std::move(obs_);
    }

private:
    static bool is_header(std::string_view line) {
        return line.size() > 2 && line.front() == '[' && line.back() == ']' && line != "[Empty]";
    }

    Cursor cursor(std::string_view line) const { return Cursor(line, line_no_, section_); }

    void check_bounds(Point p) const {
        if (p.x < 0 || p.y < 0 || p.x > obs_.map_size.width || p.y > obs_.map_size.height) {
            throw ParseError(ParseErrorKind::OutOfBounds, line_no_, std::string(section_),
                             "(" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                 ") outside map " + std::to_string(obs_.map_size.width) + "x" +
                                 std::to_string(obs_.map_size.height));
        }
    }

    void parse_line(std::string_view line) {
        if (section_ == "[Info]") return parse_info(line);
        if (line == "[Empty]" || line == "- [Empty]") return;
        if (section_ == "[Queue]") return parse_queue(line);
        if (section_ == "[My Units]") return parse_my_units(line);
        if (section_ == "[My Structures]") {
            return push_unique(obs_.my_structures, parse_entity(line), "my structures");
        }
        return parse_hostiles(line);
    }

    void once(std::string_view key) {
        if (!seen_info_.insert(std::string(key)).second) {
            cursor("").fail("duplicate " + std::string(key) + " line");
        }
    }

    void parse_info(std::string_view line) {
        auto c = cursor(line);
        if (c.consume("Time: ")) {
            once("Time");
            const int mm = c.read_int();
            c.expect(":");
            const int ss = c.read_int();
            if (mm < 0 || ss < 0 || ss >= 60) c.fail("invalid clock");
            obs_.time_s = mm * 60 + ss;
            c.expect(" | Race: ");
            obs_.race = c.read_until(" | ");
            c.expect(" | Enemy Race: ");
            obs_.enemy_race = c.read_until(" | ");
            c.expect(" | Map: ");
            obs_.map_name = c.rest();
            obs_.map_size = map_size_for(obs_.map_name);
        } else if (c.consume("Minerals: ")) {
            once("Minerals");
            obs_.minerals = c.read_int();
            c.expect(" (+");
            obs_.minerals_rate = c.read_int();
            c.expect("/min) | Gas: ");
            obs_.gas = c.read_int();
            c.expect(" (+");
            obs_.gas_rate = c.read_int();
            c.expect("/min)");
            c.expect_end();
            if (obs_.minerals < 0 || obs_.gas < 0 || obs_.minerals_rate < 0 || obs_.gas_rate < 0) {
                c.fail("negative economy value");
            }
        } else if (c.consume("Supply: ")) {
            once("Supply");
            obs_.supply_used = c.read_int();
            c.expect("/");
            obs_.supply_cap = c.read_int();
            if (c.consume(" (Army: ")) {
                obs_.supply_army = c.read_int();
                c.expect(", Workers: ");
                obs_.supply_workers = c.read_int();
                c.expect(")");
            }
            c.expect_end();
        } else if (c.consume("Alerts: ")) {
            once("Alerts");
            obs_.alerts = split_list(c.rest());
        } else if (c.consume("Upgrades: ")) {
            once("Upgrades");
            obs_.upgrades = split_list(c.rest());
        } else {
            c.fail("unrecognised [Info] line");
        }
    }

    Entity parse_entity(std::string_view line) {
        auto c = cursor(line);
        c.expect("- ");
        Entity e;
        e.kind = nonempty_token(c, c.read_until(" ["), "kind");
        c.expect(" [");
        e.id = c.read_int();
        c.expect("] at ");
        e.pos = c.read_point();
        c.expect(" (HP:");
        e.hp_pct = c.read_int();
        c.expect("%");
        if (e.hp_pct < 1 || e.hp_pct > 100) c.fail("hp must lie in [1,100]");
        if (c.consume(", Energy:")) {
            e.energy_pct = c.read_int();
            c.expect("%");
            if (*e.energy_pct < 0 || *e.energy_pct > 100) c.fail("energy must lie in [0,100]");
        }
        if (c.consume(", Status:")) {
            auto rest = c.rest();
            if (rest.empty() || rest.back() != ')') c.fail("unterminated attribute list");
            rest.remove_suffix(1);
            e.status = rest;
        } else {
            c.expect(")");
            c.expect_end();
        }
        check_bounds(e.pos);
        return e;
    }

    void push_unique(std::vector<Entity>& list, Entity e, const char* name) {
        for (const auto& other : list) {
            if (other.id == e.id) {
                cursor("").fail(std::string("duplicate id ") + std::to_string(e.id) + " in " + name);
            }
        }
        list.push_back(std::move(e));
    }

    void parse_queue(std::string_view line) {
        auto c = cursor(line);
        c.expect("- ");
        QueueEntry q;
        q.is_construction = c.consume("Constructing: ");
        q.owner_kind = nonempty_token(c, c.read_until(" ["), "kind");
        c.expect(" [");
        q.owner_id = c.read_int();
        c.expect("] at ");
        q.pos = c.read_point();
        if (q.is_construction) {
            c.expect(" (");
        } else {
            c.expect(": ");
            q.task = nonempty_token(c, c.read_until_last(" ("), "task");
            c.expect(" (");
        }
        q.progress_pct = c.read_int();
        c.expect("%)");
        c.expect_end();
        if (q.progress_pct < 0 || q.progress_pct >= 100) c.fail("progress must lie in [0,100)");
        check_bounds(q.pos);
        obs_.queue.push_back(std::move(q));
    }

    void parse_my_units(std::string_view line) {
        if (line.starts_with("> Workers:")) {
            if (seen_workers_) cursor(line).fail("duplicate Workers line");
            seen_workers_ = true;
            auto c = cursor(line);
            c.expect("> Workers: (");
            const int n_mining = c.read_int();
            c.expect("Mining:");
            obs_.workers.mining = c.read_id_list();
            c.expect(", ");
            const int n_mules = c.read_int();
            c.expect("Mule:");
            obs_.workers.mules = c.read_id_list();
            c.expect(")");
            c.expect_end();
            if (n_mining != static_cast<int>(obs_.workers.mining.size()) ||
                n_mules != static_cast<int>(obs_.workers.mules.size())) {
                c.fail("worker count does not match id list");
            }
            group_ = "workers";
            return;
        }
        if (line == "> Army:") {
            group_ = "army";
            return;
        }
        if (group_ == "workers") return push_unique(obs_.my_workers, parse_entity(line), "my workers");
        if (group_ == "army") return push_unique(obs_.my_army, parse_entity(line), "my army");
        cursor(line).fail("entity line outside a Workers/Army group");
    }

    void parse_hostiles(std::string_view line) {
        if (line == "> Enemy Units:") {
            group_ = "units";
            return;
        }
        if (line == "> Enemy Structures:") {
            group_ = "structures";
            return;
        }
        if (line == "> Snapshot Enemy Structures:") {
            group_ = "snapshots";
            return;
        }
        if (group_ == "units") return push_unique(obs_.enemy_units, parse_entity(line), "enemy units");
        if (group_ == "structures") {
            return push_unique(obs_.enemy_structures, parse_entity(line), "enemy structures");
        }
        if (group_ == "snapshots") {
            auto c = cursor(line);
            c.expect("- ");
            SnapshotEntity s;
            s.kind = nonempty_token(c, c.read_until(" at ("), "kind");
            c.expect(" at ");
            s.pos = c.read_point();
            c.expect_end();
            check_bounds(s.pos);
            obs_.snapshot_enemy_structures.push_back(std::move(s));
            return;
        }
        cursor(line).fail("hostile line outside an Enemy group");
    }

    Observation obs_;
    int line_no_ = 0;
    std::string_view section_;
    std::string group_;
    std::set<std::string> seen_info_;
    bool seen_workers_ = false;
};

void write_list(std::ostringstream& out, const std::vector<std::string>& items) {
    if (items.empty()) {
        out << "None";
        return;
    }
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out << ", ";
        out << items[i];
    }
}

void write_ids(std::ostringstream& out, const std::vector<int>& ids) {
    out << '[';
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ',';
        out << ids[i];
    }
    out << ']';
}

void write_point(std::ostringstream& out, Point p) { out << '(' << p.x << ',' << p.y << ')'; }

void write_entity(std::ostringstream& out, const Entity& e) {
    out << " - " << e.kind << " [" << e.id << "] at ";
    write_point(out, e.pos);
    out << " (HP:" << e.hp_pct << '%';
    if (e.energy_pct) out << ", Energy:" << *e.energy_pct << '%';
    if (!e.status.empty()) out << ", Status:" << e.status;
    out << ")\n";
}

void write_entities(std::ostringstream& out, const std::vector<Entity>& list) {
    if (list.empty()) out << "[Empty]\n";
    for (const auto& e : list) write_entity(out, e);
}

}  // namespace

Observation parse_observation(std::string_view text) { return ObservationParser{}.parse(text); }

std::string serialize_observation(const Observation& obs) {
    std::ostringstream out;
    out << "[Info]\n";
    out << "Time: " << format_clock(obs.time_s) << " | Race: " << obs.race
        << " | Enemy Race: " << obs.enemy_race << " | Map: " << obs.map_name << '\n';
    out << "Minerals: " << obs.minerals << " (+" << obs.minerals_rate << "/min) | Gas: " << obs.gas
        << " (+" << obs.gas_rate << "/min)\n";
    out << "Supply: " << obs.supply_used << '/' << obs.supply_cap;
    if (obs.supply_army && obs.supply_workers) {
        out << " (Army: " << *obs.supply_army << ", Workers: " << *obs.supply_workers << ')';
    }
    out << "\nAlerts: ";
    write_list(out, obs.alerts);
    out << "\nUpgrades: ";
    write_list(out, obs.upgrades);
    out << "\n\n[Queue]\n";
    if (obs.queue.empty()) out << "[Empty]\n";
    for (const auto& q : obs.queue) {
        out << " - ";
        if (q.is_construction) out << "Constructing: ";
        out << q.owner_kind << " [" << q.owner_id << "] at ";
        write_point(out, q.pos);
        if (!q.is_construction) out << ": " << q.task;
        out << " (" << q.progress_pct << "%)\n";
    }
    out << "\n[My Units]\n> Workers: (" << obs.workers.mining.size() << "Mining:";
    write_ids(out, obs.workers.mining);
    out << ", " << obs.workers.mules.size() << "Mule:";
    write_ids(out, obs.workers.mules);
    out << ")\n";
    for (const auto& e : obs.my_workers) write_entity(out, e);
    out << "> Army:\n";
    write_entities(out, obs.my_army);
    out << "\n[My Structures]\n";
    write_entities(out, obs.my_structures);
    out << "\n[Visible Hostiles]\n> Enemy Units:\n";
    write_entities(out, obs.enemy_units);
    out << "> Enemy Structures:\n";
    write_entities(out, obs.enemy_structures);
    out << "> Snapshot Enemy Structures:\n";
    if (obs.snapshot_enemy_structures.empty()) out << "[Empty]\n";
    for (const auto& s : obs.snapshot_enemy_structures) {
        out << " - " << s.kind << " at ";
        write_point(out, s.pos);
        out << '\n';
    }
    out << '\n';
    return out.str();
}

TimedAction parse_action_line(std::string_view raw, int line_no) {
    Cursor c(trim(raw), line_no, "actions");
    TimedAction a;
    c.expect("- +");
    const int whole = c.read_int();
    c.expect(".");
    const auto frac = c.read_until("s: ");
    if (frac.size() != 1 || frac[0] < '0' || frac[0] > '9' || whole < 0) c.fail("offset must have one decimal");
    a.offset_ds = whole * 10 + (frac[0] - '0');
    c.expect("s: ");
    a.subject_kind = nonempty_token(c, c.read_until(" ["), "subject kind");
    c.expect(" [");
    a.subject_id = c.read_int();
    c.expect("] - ");
    auto rest = c.rest();
    const auto sep = rest.find(" - ");
    a.command = rest.substr(0, sep);
    if (a.command.empty()) c.fail("empty command");
    if (sep == std::string_view::npos) return a;
    Cursor t(rest.substr(sep + 3), line_no, "actions");
    if (rest.substr(sep + 3).starts_with("(")) {
        a.target = Target::at(t.read_point());
        t.expect_end();
        return a;
    }
    auto kind = nonempty_token(t, t.read_until(" ["), "target kind");
    t.expect(" [");
    const int id = t.read_int();
    t.expect("]");
    t.expect_end();
    a.target = Target::unit(std::string(kind), id);
    return a;
}

std::vector<TimedAction> parse_actions(std::string_view text) {
    std::vector<TimedAction> out;
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty() || line == "(none)") continue;
        out.push_back(parse_action_line(line, static_cast<int>(i) + 1));
    }
    return out;
}

std::string format_action(const TimedAction& a) {
    std::ostringstream out;
    out << "- +" << a.offset_ds / 10 << '.' << a.offset_ds % 10 << "s: " << a.subject_kind << " ["
        << a.subject_id << "] - " << a.command;
    switch (a.target.kind) {
        case Target::Kind::None: break;
        case Target::Kind::Point:
            out << " - (" << a.target.point.x << ", " << a.target.point.y << ')';
            break;
        case Target::Kind::Entity:
            out << " - " << a.target.entity_kind << " [" << a.target.entity_id << ']';
            break;
    }
    return out.str();
}

std::string format_actions(const std::vector<TimedAction>& actions) {
    if (actions.empty()) return "(none)";
    std::string out;
    for (size_t i = 0; i < actions.size(); ++i) {
        if (i) out += '\n';
        out += format_action(actions[i]);
    }
    return out;
}

}  // namespace starwm
