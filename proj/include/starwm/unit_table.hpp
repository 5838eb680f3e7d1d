#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace starwm {

class UnknownKind : public std::runtime_error {
public:
    explicit UnknownKind(const std::string& kind)
        : std::runtime_error("kind not in unit table: " + kind), kind_(kind) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct UnitSpec {
    std::string kind;
    int mineral_cost = 0;
    int gas_cost = 0;
    int supply_cost = 0;
    int supply_provided = 0;
    /// Nominal (normal game speed) seconds.
    double build_time_s = 0.0;
    double speed = 0.0;
    double dps = 0.0;
    int max_hp = 100;
    double sight = 9.0;
    bool is_structure = false;
};

struct ResearchSpec {
    std::string name;
    int mineral_cost = 0;
    int gas_cost = 0;
    double build_time_s = 0.0;
};

/// Kind lookups ignore case, so "SiegeTank" and "Siegetank" resolve alike.
class UnitTable {
public:
    static UnitTable from_json(std::string_view text);
    static UnitTable load(const std::string& path);
    /// The table compiled into the library from data/unit_table.json.
    static const UnitTable& builtin();

    const std::string& version() const noexcept { return version_; }

    const UnitSpec* find(std::string_view kind) const;
    const UnitSpec& at(std::string_view kind) const;
    const ResearchSpec* find_research(std::string_view name) const;
    const ResearchSpec& research_at(std::string_view name) const;

    void add(UnitSpec spec);
    void add(ResearchSpec spec);

    std::vector<const UnitSpec*> units() const;
    std::string to_json() const;

private:
    std::string version_;
    std::map<std::string, UnitSpec> units_;
    std::map<std::string, ResearchSpec> research_;
};

std::string lower(std::string_view s);
/// "siegetank" -> "Siegetank".
std::string capitalize(std::string_view s);

}  // namespace starwm
