#include "starwm/rule_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace starwm {

void SimConfig::check() const {
    if (!(game_speed > 0.0)) throw std::invalid_argument("game_speed must be positive");
    if (combat_radius < 0.0) throw std::invalid_argument("combat_radius must be nonnegative");
    if (income_per_worker < 0) throw std::invalid_argument("income_per_worker must be nonnegative");
    if (queue_limit < 1) throw std::invalid_argument("queue_limit must be at least 1");
}

std::string_view to_string(ActionOutcome outcome) {
    switch (outcome) {
        case ActionOutcome::Accepted: return "accepted";
        case ActionOutcome::InsufficientResources: return "insufficient resources";
        case ActionOutcome::SupplyBlocked: return "supply blocked";
        case ActionOutcome::QueueFull: return "queue full";
        case ActionOutcome::InvalidSubject: return "invalid subject";
        case ActionOutcome::InvalidTarget: return "invalid target";
        case ActionOutcome::Unsupported: return "unsupported command";
    }
    return "unknown";
}

bool supply_blocked(const Observation& obs, int supply_limit) {
    return obs.supply_used >= obs.supply_cap && obs.supply_cap < supply_limit;
}

double progress_per_second(double nominal_build_time_s, double game_speed) {
    return game_speed * 100.0 / nominal_build_time_s;
}

namespace {

enum class Cmd { Train, Build, Addon, Research, UpgradeTo, Morph, Move, Attack, Gather, Smart, Stop, Unsupported };

struct ParsedCmd {
    Cmd type = Cmd::Unsupported;
    std::string arg;
};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

ParsedCmd classify(std::string_view command) {
    const std::string lc = lower(command);
    auto after = [&](std::string_view marker) { return lc.substr(lc.find(marker) + marker.size()); };
    if (starts_with(lc, "morph_")) return {Cmd::Morph, lc.substr(6)};
    if (starts_with(lc, "upgradeto")) return {Cmd::UpgradeTo, lc.substr(lc.rfind('_') + 1)};
    if (lc.find("research_") != std::string::npos) return {Cmd::Research, after("research_")};
    if (lc.find("train_") != std::string::npos) return {Cmd::Train, after("train_")};
    if (starts_with(lc, "build_techlab") || starts_with(lc, "build_reactor")) return {Cmd::Addon, lc.substr(6)};
    if (lc.find("build_") != std::string::npos) return {Cmd::Build, after("build_")};
    if (lc == "move" || starts_with(lc, "move_")) return {Cmd::Move, {}};
    if (starts_with(lc, "attack") || lc == "scan_move") return {Cmd::Attack, {}};
    if (starts_with(lc, "harvest_")) return {Cmd::Gather, {}};
    if (starts_with(lc, "smart")) return {Cmd::Smart, {}};
    if (starts_with(lc, "stop") || starts_with(lc, "hold")) return {Cmd::Stop, {}};
    return {};
}

bool is_townhall(std::string_view kind) {
    static const std::set<std::string> k = {"commandcenter", "orbitalcommand", "planetaryfortress",
                                            "nexus", "hatchery", "lair", "hive"};
    return k.count(lower(kind)) > 0;
}

bool is_resource(std::string_view kind) {
    const std::string lc = lower(kind);
    return lc.find("mineral") != std::string::npos || lc.find("vespene") != std::string::npos ||
           lc == "refinery" || lc == "refineryrich" || lc == "assimilator" || lc == "extractor";
}

struct Order {
    bool attack = false;
    Point dest;
};

std::optional<Order> parse_order(const std::string& status) {
    int x = 0, y = 0;
    if (std::sscanf(status.c_str(), "moving to (%d,%d)", &x, &y) == 2) return Order{false, {x, y}};
    if (std::sscanf(status.c_str(), "attacking (%d,%d)", &x, &y) == 2) return Order{true, {x, y}};
    return std::nullopt;
}

std::string order_status(bool attack, Point p) {
    return std::string(attack ? "attacking (" : "moving to (") + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

long accrual(long rate, long t) {
    // Telescoping floors keep the integer total equal to floor(rate * elapsed / 60).
    auto total = [&](long s) {
        const long v = rate * s;
        return v >= 0 ? v / 60 : -((-v + 59) / 60);
    };
    return total(t + 1) - total(t);
}

template <typename T>
bool erase_value(std::vector<T>& v, const T& value) {
    auto it = std::find(v.begin(), v.end(), value);
    if (it == v.end()) return false;
    v.erase(it);
    return true;
}

class Stepper {
public:
    Stepper(Observation& obs, const SimConfig& cfg, SimLog* log) : o_(obs), cfg_(cfg), log_(log) {
        if (o_.minerals < 0 || o_.gas < 0) {
            warn("negative resources clamped to 0");
            o_.minerals = std::max(o_.minerals, 0);
            o_.gas = std::max(o_.gas, 0);
        }
    }

    void step(const std::vector<const TimedAction*>& actions) {
        SecondRecord sec;
        const long t = o_.time_s;
        const int dm = static_cast<int>(accrual(o_.minerals_rate, t));
        const int dg = static_cast<int>(accrual(o_.gas_rate, t));
        o_.time_s += 1;
        o_.minerals += dm;
        o_.gas += dg;
        sec.t_s = o_.time_s;
        sec.minerals_collected = dm;
        sec.gas_collected = dg;
        sec_ = &sec;

        for (const auto* a : actions) {
            const ActionOutcome outcome = apply(*a);
            if (log_) log_->actions.push_back({o_.time_s, *a, outcome});
        }
        progress_queue();
        move_entities();
        combat();
        visibility();

        sec.supply_blocked = supply_blocked(o_, cfg_.supply_limit);
        sec_ = nullptr;
        if (log_) log_->seconds.push_back(sec);
    }

private:
    Observation& o_;
    const SimConfig& cfg_;
    SimLog* log_;
    SecondRecord* sec_ = nullptr;

    void warn(std::string msg) {
        if (log_) log_->warnings.push_back(std::move(msg));
    }

    int max_id() const {
        int m = 0;
        auto scan = [&](const std::vector<Entity>& v) {
            for (const auto& e : v) m = std::max(m, e.id);
        };
        scan(o_.my_workers);
        scan(o_.my_army);
        scan(o_.my_structures);
        scan(o_.enemy_units);
        scan(o_.enemy_structures);
        for (int id : o_.workers.mining) m = std::max(m, id);
        for (int id : o_.workers.mules) m = std::max(m, id);
        for (const auto& q : o_.queue) m = std::max(m, q.owner_id);
        return m;
    }

    const UnitSpec* spec(std::string_view kind) const { return cfg_.units.find(kind); }

    Entity* find_in(std::vector<Entity>& v, int id) {
        for (auto& e : v) {
            if (e.id == id) return &e;
        }
        return nullptr;
    }

    Entity* my_unit(int id) {
        if (auto* e = find_in(o_.my_workers, id)) return e;
        return find_in(o_.my_army, id);
    }

    Entity* my_structure(int id) { return find_in(o_.my_structures, id); }

    std::optional<Point> position_of(const Target& t) {
        if (t.kind == Target::Kind::Point) return t.point;
        if (t.kind != Target::Kind::Entity) return std::nullopt;
        for (auto* v : {&o_.my_workers, &o_.my_army, &o_.my_structures, &o_.enemy_units, &o_.enemy_structures}) {
            if (auto* e = find_in(*v, t.entity_id)) return e->pos;
        }
        return std::nullopt;
    }

    bool is_enemy(int id) {
        return find_in(o_.enemy_units, id) != nullptr || find_in(o_.enemy_structures, id) != nullptr;
    }

    bool in_bounds(Point p) const {
        return p.x >= 0 && p.y >= 0 && p.x <= o_.map_size.width && p.y <= o_.map_size.height;
    }

    Point clamp(Point p) const {
        return {std::clamp(p.x, 0, o_.map_size.width), std::clamp(p.y, 0, o_.map_size.height)};
    }

    int queued_for(int owner) const {
        return static_cast<int>(std::count_if(o_.queue.begin(), o_.queue.end(),
                                              [&](const QueueEntry& q) { return q.owner_id == owner; }));
    }

    bool pay(int minerals, int gas) {
        if (o_.minerals < minerals || o_.gas < gas) return false;
        o_.minerals -= minerals;
        o_.gas -= gas;
        if (sec_) {
            sec_->minerals_spent += minerals;
            sec_->gas_spent += gas;
        }
        return true;
    }

    void change_rate(int workers) {
        o_.minerals_rate = std::max(0, o_.minerals_rate + workers * cfg_.income_per_worker);
    }

    void add_supply(const std::string& kind, int amount) {
        o_.supply_used = std::max(0, o_.supply_used + amount);
        auto& bucket = is_worker_kind(kind) ? o_.supply_workers : o_.supply_army;
        if (bucket) *bucket = std::max(0, *bucket + amount);
    }

    void change_cap(int amount) {
        o_.supply_cap = std::clamp(o_.supply_cap + amount, 0, cfg_.supply_limit);
    }

    Point nearest_townhall(Point from) const {
        std::optional<Point> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& s : o_.my_structures) {
            if (!is_townhall(s.kind)) continue;
            const double d = distance(s.pos, from);
            if (d < best_d) {
                best_d = d;
                best = s.pos;
            }
        }
        return best.value_or(from);
    }

    /// Takes a gathering worker off the aggregated line and places it on the map.
    Entity* release_worker(int id, const std::string& kind, Point near) {
        const bool mule = erase_value(o_.workers.mules, id);
        if (!mule && !erase_value(o_.workers.mining, id)) return nullptr;
        change_rate(-1);
        Entity e;
        e.id = id;
        e.kind = kind.empty() ? (mule ? "Mule" : "Scv") : capitalize(kind);
        e.pos = nearest_townhall(near);
        o_.my_workers.push_back(e);
        return &o_.my_workers.back();
    }

    bool gathering(int id) const {
        return std::find(o_.workers.mining.begin(), o_.workers.mining.end(), id) != o_.workers.mining.end() ||
               std::find(o_.workers.mules.begin(), o_.workers.mules.end(), id) != o_.workers.mules.end();
    }

    ActionOutcome apply(const TimedAction& a) {
        const ParsedCmd cmd = classify(a.command);
        switch (cmd.type) {
            case Cmd::Train: return train(a, cmd.arg);
            case Cmd::Build: return build(a, cmd.arg);
            case Cmd::Addon: return addon(a, cmd.arg);
            case Cmd::Research: return research(a, cmd.arg);
            case Cmd::UpgradeTo: return upgrade_to(a, cmd.arg);
            case Cmd::Morph: return morph(a, cmd.arg);
            case Cmd::Move: return order(a, false);
            case Cmd::Attack: return order(a, true);
            case Cmd::Gather: return gather(a);
            case Cmd::Smart: return smart(a);
            case Cmd::Stop: return stop(a);
            case Cmd::Unsupported: return ActionOutcome::Unsupported;
        }
        return ActionOutcome::Unsupported;
    }

    ActionOutcome enqueue(const Entity& owner, const TimedAction& a, int minerals, int gas, int supply,
                          const std::string& unit_kind) {
        if (queued_for(owner.id) >= cfg_.queue_limit) return ActionOutcome::QueueFull;
        if (o_.minerals < minerals || o_.gas < gas) return ActionOutcome::InsufficientResources;
        if (supply > 0 && o_.supply_used + supply > o_.supply_cap) return ActionOutcome::SupplyBlocked;
        pay(minerals, gas);
        if (supply > 0) add_supply(unit_kind, supply);
        QueueEntry q;
        q.owner_id = owner.id;
        q.owner_kind = owner.kind;
        q.pos = owner.pos;
        q.task = a.command;
        o_.queue.push_back(std::move(q));
        return ActionOutcome::Accepted;
    }

    ActionOutcome train(const TimedAction& a, const std::string& arg) {
        const Entity* owner = my_structure(a.subject_id);
        if (!owner) return ActionOutcome::InvalidSubject;
        const UnitSpec& u = cfg_.units.at(capitalize(arg));
        return enqueue(*owner, a, u.mineral_cost, u.gas_cost, u.supply_cost, u.kind);
    }

    ActionOutcome research(const TimedAction& a, const std::string& arg) {
        const Entity* owner = my_structure(a.subject_id);
        if (!owner) return ActionOutcome::InvalidSubject;
        const ResearchSpec& r = cfg_.units.research_at(arg);
        const std::string name = capitalize(r.name);
        if (std::find(o_.upgrades.begin(), o_.upgrades.end(), name) != o_.upgrades.end()) {
            return ActionOutcome::InvalidTarget;
        }
        for (const auto& q : o_.queue) {
            if (!q.is_construction && lower(q.task) == lower(a.command)) return ActionOutcome::InvalidTarget;
        }
        return enqueue(*owner, a, r.mineral_cost, r.gas_cost, 0, {});
    }

    ActionOutcome upgrade_to(const TimedAction& a, const std::string& arg) {
        const Entity* owner = my_structure(a.subject_id);
        if (!owner) return ActionOutcome::InvalidSubject;
        const UnitSpec& u = cfg_.units.at(capitalize(arg));
        return enqueue(*owner, a, u.mineral_cost, u.gas_cost, 0, {});
    }

    ActionOutcome construct(const std::string& kind, Point where, int minerals, int gas) {
        if (!in_bounds(where)) return ActionOutcome::InvalidTarget;
        if (!pay(minerals, gas)) return ActionOutcome::InsufficientResources;
        QueueEntry q;
        q.owner_id = max_id() + 1;
        q.owner_kind = kind;
        q.pos = where;
        q.is_construction = true;
        o_.queue.push_back(std::move(q));
        return ActionOutcome::Accepted;
    }

    ActionOutcome build(const TimedAction& a, const std::string& arg) {
        const bool mining = gathering(a.subject_id);
        Entity* worker = my_unit(a.subject_id);
        if (!mining && (!worker || !is_worker_kind(worker->kind))) return ActionOutcome::InvalidSubject;
        const UnitSpec& u = cfg_.units.at(capitalize(arg));
        std::optional<Point> where = position_of(a.target);
        if (!where && a.target.kind == Target::Kind::Entity) where = worker ? worker->pos : nearest_townhall({0, 0});
        if (!where) return ActionOutcome::InvalidTarget;
        if (o_.minerals < u.mineral_cost || o_.gas < u.gas_cost) return ActionOutcome::InsufficientResources;
        const ActionOutcome r = construct(u.kind, *where, u.mineral_cost, u.gas_cost);
        if (r != ActionOutcome::Accepted) return r;
        const int site = o_.queue.back().owner_id;
        if (mining) worker = release_worker(a.subject_id, a.subject_kind, *where);
        worker->pos = *where;
        worker->status = "constructing [" + std::to_string(site) + "]";
        return ActionOutcome::Accepted;
    }

    ActionOutcome addon(const TimedAction& a, const std::string& arg) {
        const Entity* parent = my_structure(a.subject_id);
        if (!parent) return ActionOutcome::InvalidSubject;
        const std::string part = arg.substr(0, arg.find('_'));
        const UnitSpec& u = cfg_.units.at(capitalize(lower(parent->kind) + part));
        return construct(u.kind, clamp({parent->pos.x + 3, parent->pos.y}), u.mineral_cost, u.gas_cost);
    }

    ActionOutcome morph(const TimedAction& a, const std::string& arg) {
        Entity* e = my_structure(a.subject_id);
        if (!e) e = my_unit(a.subject_id);
        if (!e) return ActionOutcome::InvalidSubject;
        const std::string kind = lower(e->kind);
        std::string to;
        auto ends_with = [](std::string_view s, std::string_view suffix) {
            return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
        };
        if (ends_with(arg, "_lower") && kind == arg.substr(0, arg.size() - 6)) {
            to = kind + "lowered";
        } else if (ends_with(arg, "_raise") && ends_with(kind, "lowered")) {
            to = kind.substr(0, kind.size() - 7);
        } else if (arg == "siegemode" && kind == "siegetank") {
            to = "siegetanksieged";
        } else if (arg == "unsiege" && kind == "siegetanksieged") {
            to = "siegetank";
        } else {
            return ActionOutcome::Unsupported;
        }
        const UnitSpec* target = spec(to);
        e->kind = target ? target->kind : capitalize(to);
        return ActionOutcome::Accepted;
    }

    Entity* mobile_subject(const TimedAction& a, Point near) {
        if (Entity* e = my_unit(a.subject_id)) return e;
        if (gathering(a.subject_id)) return release_worker(a.subject_id, a.subject_kind, near);
        return nullptr;
    }

    ActionOutcome order(const TimedAction& a, bool attack) {
        const bool mobile = my_unit(a.subject_id) || gathering(a.subject_id);
        if (!mobile) return my_structure(a.subject_id) ? ActionOutcome::Accepted : ActionOutcome::InvalidSubject;
        const auto dest = position_of(a.target);
        if (!dest || !in_bounds(*dest)) return ActionOutcome::InvalidTarget;
        Entity* e = mobile_subject(a, *dest);
        e->status = order_status(attack, *dest);
        return ActionOutcome::Accepted;
    }

    bool gather_target(const Target& t) {
        if (t.kind != Target::Kind::Entity) return false;
        if (is_resource(t.entity_kind)) return true;
        const Entity* s = my_structure(t.entity_id);
        return s && (is_townhall(s->kind) || is_resource(s->kind));
    }

    ActionOutcome gather(const TimedAction& a) {
        if (gathering(a.subject_id)) return ActionOutcome::Accepted;
        Entity* w = find_in(o_.my_workers, a.subject_id);
        if (!w || !is_worker_kind(w->kind)) return ActionOutcome::InvalidSubject;
        if (!gather_target(a.target)) return ActionOutcome::InvalidTarget;
        const bool mule = lower(w->kind) == "mule";
        (mule ? o_.workers.mules : o_.workers.mining).push_back(w->id);
        erase_if(o_.my_workers, [&](const Entity& e) { return e.id == a.subject_id; });
        change_rate(1);
        return ActionOutcome::Accepted;
    }

    ActionOutcome smart(const TimedAction& a) {
        if (my_structure(a.subject_id)) return ActionOutcome::Accepted;  // rally point
        if (gather_target(a.target)) {
            const bool worker = gathering(a.subject_id) ||
                                (find_in(o_.my_workers, a.subject_id) &&
                                 is_worker_kind(find_in(o_.my_workers, a.subject_id)->kind));
            if (worker) return gather(a);
        }
        const bool attack = a.target.kind == Target::Kind::Entity && is_enemy(a.target.entity_id);
        return order(a, attack);
    }

    ActionOutcome stop(const TimedAction& a) {
        if (gathering(a.subject_id) || my_structure(a.subject_id)) return ActionOutcome::Accepted;
        Entity* e = my_unit(a.subject_id);
        if (!e) return ActionOutcome::InvalidSubject;
        e->status = "idle";
        return ActionOutcome::Accepted;
    }

    std::optional<double> nominal_time(const QueueEntry& q) const {
        if (q.is_construction) {
            const UnitSpec* u = spec(q.owner_kind);
            return u ? std::optional<double>(u->build_time_s) : std::nullopt;
        }
        const ParsedCmd cmd = classify(q.task);
        if (cmd.type == Cmd::Research) {
            const ResearchSpec* r = cfg_.units.find_research(cmd.arg);
            return r ? std::optional<double>(r->build_time_s) : std::nullopt;
        }
        if (cmd.type == Cmd::Train || cmd.type == Cmd::UpgradeTo) {
            const UnitSpec* u = spec(capitalize(cmd.arg));
            return u ? std::optional<double>(u->build_time_s) : std::nullopt;
        }
        return std::nullopt;
    }

    Point spawn_point(Point owner) const { return clamp({owner.x, owner.y - 2}); }

    void complete(const QueueEntry& q) {
        if (q.is_construction) {
            Entity s;
            s.id = q.owner_id;
            s.kind = q.owner_kind;
            s.pos = q.pos;
            o_.my_structures.push_back(s);
            if (const UnitSpec* u = spec(q.owner_kind)) change_cap(u->supply_provided);
            const std::string marker = "constructing [" + std::to_string(q.owner_id) + "]";
            for (auto& w : o_.my_workers) {
                if (w.status == marker) w.status.clear();
            }
            return;
        }
        const ParsedCmd cmd = classify(q.task);
        if (cmd.type == Cmd::Research) {
            const std::string name = capitalize(cfg_.units.research_at(cmd.arg).name);
            if (std::find(o_.upgrades.begin(), o_.upgrades.end(), name) == o_.upgrades.end()) {
                o_.upgrades.push_back(name);
            }
        } else if (cmd.type == Cmd::UpgradeTo) {
            if (Entity* s = my_structure(q.owner_id)) {
                const UnitSpec& to = cfg_.units.at(capitalize(cmd.arg));
                const UnitSpec* from = spec(s->kind);
                change_cap(to.supply_provided - (from ? from->supply_provided : 0));
                s->kind = to.kind;
            }
        } else if (cmd.type == Cmd::Train) {
            const UnitSpec& u = cfg_.units.at(capitalize(cmd.arg));
            const int id = max_id() + 1;
            if (is_worker_kind(u.kind) && lower(u.kind) != "mule") {
                o_.workers.mining.push_back(id);
                change_rate(1);
            } else {
                Entity e;
                e.id = id;
                e.kind = u.kind;
                e.pos = spawn_point(q.pos);
                o_.my_army.push_back(e);
            }
        }
    }

    void progress_queue() {
        std::set<int> active;
        std::vector<size_t> done;
        for (size_t i = 0; i < o_.queue.size(); ++i) {
            auto& q = o_.queue[i];
            if (!active.insert(q.owner_id).second) continue;
            const auto total = nominal_time(q);
            if (!total) {
                warn("no build time for queue task " + q.task_name());
                continue;
            }
            const double gain = *total > 0 ? progress_per_second(*total, cfg_.game_speed) : 100.0;
            // Round half up: the integer percent stands for the midpoint of its bucket.
            const int next = static_cast<int>(std::floor(q.progress_pct + gain + 0.5 + 1e-9));
            if (next >= 100) {
                done.push_back(i);
            } else {
                q.progress_pct = next;
            }
        }
        // Finished entries stay queued while completing so their ids are not handed out again.
        for (size_t i : done) complete(QueueEntry(o_.queue[i]));
        for (auto it = done.rbegin(); it != done.rend(); ++it) {
            o_.queue.erase(o_.queue.begin() + static_cast<long>(*it));
        }
    }

    bool hostile_near(const Entity& e, bool mine) const {
        auto near = [&](const std::vector<Entity>& v) {
            return std::any_of(v.begin(), v.end(),
                               [&](const Entity& h) { return distance(h.pos, e.pos) <= cfg_.combat_radius; });
        };
        if (mine) return near(o_.enemy_units) || near(o_.enemy_structures);
        return near(o_.my_workers) || near(o_.my_army) || near(o_.my_structures);
    }

    void move_all(std::vector<Entity>& units, bool mine) {
        for (auto& e : units) {
            const auto ord = parse_order(e.status);
            if (!ord) continue;
            const UnitSpec* u = spec(e.kind);
            const double speed = u ? u->speed : 0.0;
            if (ord->attack && hostile_near(e, mine)) continue;
            const double dx = ord->dest.x - e.pos.x;
            const double dy = ord->dest.y - e.pos.y;
            const double remaining = std::hypot(dx, dy);
            if (remaining <= speed) {
                e.pos = ord->dest;
                e.status = "idle";
            } else if (speed > 0.0) {
                const double f = speed / remaining;
                e.pos = clamp({static_cast<int>(std::lround(e.pos.x + dx * f)),
                               static_cast<int>(std::lround(e.pos.y + dy * f))});
                if (e.pos == ord->dest) e.status = "idle";
            }
        }
    }

    void move_entities() {
        move_all(o_.my_workers, true);
        move_all(o_.my_army, true);
        move_all(o_.enemy_units, false);
    }

    struct Ref {
        std::vector<Entity>* list;
        size_t index;
    };

    void combat() {
        std::vector<std::vector<Entity>*> mine = {&o_.my_workers, &o_.my_army, &o_.my_structures};
        std::vector<std::vector<Entity>*> theirs = {&o_.enemy_units, &o_.enemy_structures};
        std::map<std::pair<std::vector<Entity>*, size_t>, double> damage;

        auto engage = [&](const std::vector<std::vector<Entity>*>& attackers,
                          const std::vector<std::vector<Entity>*>& targets) {
            for (auto* list : attackers) {
                for (const auto& a : *list) {
                    const UnitSpec* u = spec(a.kind);
                    if (!u || u->dps <= 0.0) continue;
                    std::optional<Ref> best;
                    double best_d = std::numeric_limits<double>::infinity();
                    int best_id = 0;
                    for (auto* tl : targets) {
                        for (size_t i = 0; i < tl->size(); ++i) {
                            const Entity& t = (*tl)[i];
                            const double d = distance(a.pos, t.pos);
                            if (d > cfg_.combat_radius) continue;
                            if (d < best_d || (d == best_d && t.id < best_id)) {
                                best_d = d;
                                best_id = t.id;
                                best = Ref{tl, i};
                            }
                        }
                    }
                    if (best) damage[{best->list, best->index}] += u->dps;
                }
            }
        };
        engage(mine, theirs);
        engage(theirs, mine);
        if (damage.empty()) return;

        std::map<std::vector<Entity>*, std::vector<size_t>> dead;
        for (const auto& [ref, dmg] : damage) {
            Entity& e = (*ref.first)[ref.second];
            const UnitSpec* u = spec(e.kind);
            const double max_hp = u ? u->max_hp : 100.0;
            const double left = e.hp_pct / 100.0 * max_hp - dmg;
            if (left <= 0.0) {
                dead[ref.first].push_back(ref.second);
            } else {
                e.hp_pct = std::clamp(static_cast<int>(std::ceil(left * 100.0 / max_hp - 1e-9)), 1, 100);
            }
        }
        for (auto& [list, idx] : dead) {
            const bool is_mine = list == &o_.my_workers || list == &o_.my_army || list == &o_.my_structures;
            std::sort(idx.rbegin(), idx.rend());
            for (size_t i : idx) {
                const Entity e = (*list)[i];
                list->erase(list->begin() + static_cast<long>(i));
                if (log_) log_->deaths.push_back({o_.time_s, is_mine, e.id, e.kind});
                if (is_mine) lose(e, list == &o_.my_structures);
            }
        }
    }

    void lose(const Entity& e, bool structure) {
        const UnitSpec* u = spec(e.kind);
        if (!structure) {
            if (u) add_supply(e.kind, -u->supply_cost);
            return;
        }
        if (u) change_cap(-u->supply_provided);
        for (auto it = o_.queue.begin(); it != o_.queue.end();) {
            if (it->owner_id != e.id || it->is_construction) {
                ++it;
                continue;
            }
            const ParsedCmd cmd = classify(it->task);
            if (cmd.type == Cmd::Train) {
                if (const UnitSpec* t = spec(capitalize(cmd.arg))) add_supply(t->kind, -t->supply_cost);
            }
            it = o_.queue.erase(it);
        }
    }

    bool seen(Point p) const {
        auto sees = [&](const std::vector<Entity>& v) {
            return std::any_of(v.begin(), v.end(), [&](const Entity& e) {
                const UnitSpec* u = spec(e.kind);
                return distance(e.pos, p) <= (u ? u->sight : 9.0);
            });
        };
        return sees(o_.my_workers) || sees(o_.my_army) || sees(o_.my_structures);
    }

    void visibility() {
        erase_if(o_.enemy_units, [&](const Entity& e) { return !seen(e.pos); });
        for (auto it = o_.enemy_structures.begin(); it != o_.enemy_structures.end();) {
            if (seen(it->pos)) {
                ++it;
                continue;
            }
            SnapshotEntity s{it->kind, it->pos};
            auto& snaps = o_.snapshot_enemy_structures;
            if (std::find(snaps.begin(), snaps.end(), s) == snaps.end()) snaps.push_back(s);
            it = o_.enemy_structures.erase(it);
        }
    }
};

}  // namespace

Observation simulate(const Observation& obs, const std::vector<TimedAction>& actions, int delta_s,
                     const SimConfig& cfg, SimLog* log) {
    if (delta_s < 1) throw std::invalid_argument("delta_s must be at least 1");
    cfg.check();
    std::vector<std::vector<const TimedAction*>> by_step(static_cast<size_t>(delta_s));
    for (const auto& a : actions) {
        const int step = std::clamp(a.offset_ds / 10, 0, delta_s - 1);
        by_step[static_cast<size_t>(step)].push_back(&a);
    }
    Observation out = obs;
    Stepper stepper(out, cfg, log);
    for (const auto& step_actions : by_step) stepper.step(step_actions);
    return out;
}

}  // namespace starwm
