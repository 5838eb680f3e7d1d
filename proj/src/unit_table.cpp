#include "starwm/unit_table.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "starwm/assets.hpp"

namespace starwm {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string capitalize(std::string_view s) {
    std::string out = lower(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

UnitTable UnitTable::from_json(std::string_view text) {
    const json doc = json::parse(text);
    UnitTable table;
    table.version_ = doc.value("version", "");
    for (const auto& u : doc.at("units")) {
        UnitSpec s;
        s.kind = u.at("kind").get<std::string>();
        s.mineral_cost = u.value("mineral_cost", 0);
        s.gas_cost = u.value("gas_cost", 0);
        s.supply_cost = u.value("supply_cost", 0);
        s.supply_provided = u.value("supply_provided", 0);
        s.build_time_s = u.value("build_time_s", 0.0);
        s.speed = u.value("speed", 0.0);
        s.dps = u.value("dps", 0.0);
        s.max_hp = u.value("max_hp", 100);
        s.sight = u.value("sight", 9.0);
        s.is_structure = u.value("is_structure", false);
        if (s.mineral_cost < 0 || s.gas_cost < 0 || s.build_time_s < 0 || s.speed < 0 || s.max_hp <= 0) {
            throw std::invalid_argument("invalid unit table entry: " + s.kind);
        }
        table.add(std::move(s));
    }
    if (doc.contains("research")) {
        for (const auto& r : doc.at("research")) {
            ResearchSpec s;
            s.name = r.at("name").get<std::string>();
            s.mineral_cost = r.value("mineral_cost", 0);
            s.gas_cost = r.value("gas_cost", 0);
            s.build_time_s = r.value("build_time_s", 0.0);
            table.add(std::move(s));
        }
    }
    return table;
}

UnitTable UnitTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open unit table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

const UnitTable& UnitTable::builtin() {
    static const UnitTable table = from_json(embedded_asset("data/unit_table.json"));
    return table;
}

const UnitSpec* UnitTable::find(std::string_view kind) const {
    auto it = units_.find(lower(kind));
    return it == units_.end() ? nullptr : &it->second;
}

const UnitSpec& UnitTable::at(std::string_view kind) const {
    if (const auto* s = find(kind)) return *s;
    throw UnknownKind(std::string(kind));
}

const ResearchSpec* UnitTable::find_research(std::string_view name) const {
    auto it = research_.find(lower(name));
    return it == research_.end() ? nullptr : &it->second;
}

const ResearchSpec& UnitTable::research_at(std::string_view name) const {
    if (const auto* s = find_research(name)) return *s;
    throw UnknownKind(std::string(name));
}

void UnitTable::add(UnitSpec spec) {
    auto key = lower(spec.kind);
    units_[key] = std::move(spec);
}

void UnitTable::add(ResearchSpec spec) {
    auto key = lower(spec.name);
    research_[key] = std::move(spec);
}

std::vector<const UnitSpec*> UnitTable::units() const {
    std::vector<const UnitSpec*> out;
    for (const auto& [_, s] : units_) out.push_back(&s);
    return out;
}

std::string UnitTable::to_json() const {
    json doc;
    doc["version"] = version_;
    doc["units"] = json::array();
    for (const auto& [_, s] : units_) {
        doc["units"].push_back({{"kind", s.kind},
                                {"mineral_cost", s.mineral_cost},
                                {"gas_cost", s.gas_cost},
                                {"supply_cost", s.supply_cost},
                                {"supply_provided", s.supply_provided},
                                {"build_time_s", s.build_time_s},
                                {"speed", s.speed},
                                {"dps", s.dps},
                                {"max_hp", s.max_hp},
                                {"sight", s.sight},
                                {"is_structure", s.is_structure}});
    }
    doc["research"] = json::array();
    for (const auto& [_, r] : research_) {
        doc["research"].push_back({{"name", r.name},
                                   {"mineral_cost", r.mineral_cost},
                                   {"gas_cost", r.gas_cost},
                                   {"build_time_s", r.build_time_s}});
    }
    return doc.dump(1);
}

}  // namespace starwm
