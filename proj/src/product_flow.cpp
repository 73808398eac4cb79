#include "flowledger/product_flow.hpp"

#include <algorithm>
#include <set>

#include "flowledger/error.hpp"

namespace flowledger {

std::string_view lod_name(Lod lod) noexcept { return lod == Lod::PerElement ? "per_element" : "aggregate"; }

Lod lod_from_name(std::string_view name) {
    if (name == "per_element") return Lod::PerElement;
    if (name == "aggregate") return Lod::Aggregate;
    throw Error(Errc::Malformed, "unknown level of detail " + std::string(name));
}

Json ProgressSnapshot::to_json() const {
    Json items = Json::array();
    for (const auto& [k, bp] : progress) items.push_back({{"key", k.key}, {"trade", k.trade}, {"bp", bp}});
    return {{"id", snapshot_id},
            {"captured_at", captured_at},
            {"lod", std::string(lod_name(lod))},
            {"source", source},
            {"progress", items}};
}

ProgressSnapshot ProgressSnapshot::from_json(const Json& doc) {
    ProgressSnapshot s;
    s.snapshot_id = doc.at("id").get<std::string>();
    s.captured_at = doc.at("captured_at").get<std::uint64_t>();
    s.lod = lod_from_name(doc.at("lod").get<std::string>());
    s.source = doc.at("source").get<std::string>();
    for (const auto& item : doc.at("progress")) {
        ProgressKey k{item.at("key").get<std::string>(), item.at("trade").get<std::string>()};
        if (!s.progress.emplace(std::move(k), item.at("bp").get<std::uint32_t>()).second) {
            throw Error(Errc::Malformed, "snapshot " + s.snapshot_id + " repeats a progress key");
        }
    }
    return s;
}

std::uint64_t WorkDelta::total_cents() const {
    std::uint64_t total = 0;
    for (const auto& i : items) total += i.amount_cents;
    return total;
}

std::uint64_t valuation(std::uint32_t delta_bp, std::uint64_t value_cents) {
    return static_cast<std::uint64_t>(static_cast<u128>(value_cents) * delta_bp / kFullProgressBp);
}

std::uint64_t item_amount(std::uint32_t paid_bp_before, std::uint32_t delta_bp, std::uint64_t value_cents,
                          std::uint64_t paid_cents_before) {
    if (paid_bp_before + delta_bp == kFullProgressBp && delta_bp > 0) {
        return value_cents >= paid_cents_before ? value_cents - paid_cents_before : 0;
    }
    return valuation(delta_bp, value_cents);
}

Project::Project(std::string name, Horizon horizon, std::vector<BuildingElement> elements,
                 std::map<ProgressKey, std::uint64_t> schedule_of_values)
    : name_(std::move(name)), horizon_(std::move(horizon)), elements_(std::move(elements)), sov_(std::move(schedule_of_values)) {
    if (horizon_.end <= horizon_.start) throw Error(Errc::Malformed, "project horizon must have end > start");
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        const auto& e = elements_[i];
        if (e.guid.empty()) throw Error(Errc::Malformed, "element without GUID");
        if (e.trades.empty()) throw Error(Errc::Malformed, "element " + e.guid + " has no trades");
        if (!by_guid_.emplace(e.guid, i).second) throw Error(Errc::DuplicateElement, e.guid);
        if (std::find(types_.begin(), types_.end(), e.element_type) == types_.end()) types_.push_back(e.element_type);
        for (const auto& t : e.trades) {
            if (std::find(trades_.begin(), trades_.end(), t) == trades_.end()) trades_.push_back(t);
            if (!sov_.contains({e.guid, t})) {
                throw Error(Errc::Malformed, "schedule of values lacks (" + e.guid + ", " + t + ")");
            }
        }
    }
    for (const auto& [k, _] : sov_) {
        auto it = by_guid_.find(k.key);
        if (it == by_guid_.end()) throw Error(Errc::UnknownElement, "schedule entry for " + k.key);
        const auto& trades = elements_[it->second].trades;
        if (std::find(trades.begin(), trades.end(), k.trade) == trades.end()) {
            throw Error(Errc::UnknownTrade, "schedule entry (" + k.key + ", " + k.trade + ")");
        }
    }
}

const BuildingElement& Project::element(const std::string& guid) const {
    auto it = by_guid_.find(guid);
    if (it == by_guid_.end()) throw Error(Errc::UnknownElement, guid);
    return elements_[it->second];
}

std::vector<const BuildingElement*> Project::elements_of_type(const std::string& type) const {
    std::vector<const BuildingElement*> out;
    for (const auto& e : elements_) {
        if (e.element_type == type) out.push_back(&e);
    }
    return out;
}

std::vector<std::string> Project::trades_of_type(const std::string& type) const {
    std::set<std::string> used;
    for (const auto* e : elements_of_type(type)) used.insert(e->trades.begin(), e->trades.end());
    std::vector<std::string> out;
    for (const auto& t : trades_) {
        if (used.contains(t)) out.push_back(t);
    }
    return out;
}

std::uint64_t Project::value_of(const std::string& guid, const std::string& trade) const {
    auto it = sov_.find({guid, trade});
    if (it == sov_.end()) throw Error(Errc::UnknownTrade, "(" + guid + ", " + trade + ") has no scheduled value");
    return it->second;
}

std::uint64_t Project::type_value(const std::string& type, const std::string& trade) const {
    std::uint64_t total = 0;
    for (const auto* e : elements_of_type(type)) {
        if (auto it = sov_.find({e->guid, trade}); it != sov_.end()) total += it->second;
    }
    return total;
}

std::uint64_t Project::total_value() const {
    std::uint64_t total = 0;
    for (const auto& [_, v] : sov_) total += v;
    return total;
}

Cid Project::ingest_snapshot(ProgressSnapshot snapshot, ContentStore& store) {
    if (snapshot_cids_.contains(snapshot.snapshot_id)) throw Error(Errc::DuplicateSnapshotId, snapshot.snapshot_id);
    for (const auto& [k, bp] : snapshot.progress) {
        if (bp > kFullProgressBp) {
            throw Error(Errc::InvalidProgress, snapshot.snapshot_id + ": " + std::to_string(bp) + " bp exceeds 10000");
        }
        if (std::find(trades_.begin(), trades_.end(), k.trade) == trades_.end()) {
            throw Error(Errc::UnknownTrade, snapshot.snapshot_id + ": trade " + k.trade);
        }
        if (snapshot.lod == Lod::PerElement) {
            const auto& e = element(k.key);
            if (std::find(e.trades.begin(), e.trades.end(), k.trade) == e.trades.end()) {
                throw Error(Errc::UnknownTrade, snapshot.snapshot_id + ": " + k.trade + " does not apply to " + k.key);
            }
        } else {
            if (std::find(types_.begin(), types_.end(), k.key) == types_.end()) {
                throw Error(Errc::UnknownElement, snapshot.snapshot_id + ": element type " + k.key);
            }
            auto trades = trades_of_type(k.key);
            if (std::find(trades.begin(), trades.end(), k.trade) == trades.end()) {
                throw Error(Errc::UnknownTrade, snapshot.snapshot_id + ": " + k.trade + " does not apply to " + k.key);
            }
        }
    }
    Cid cid = store.put(canonical_json(snapshot.to_json()));
    snapshot_cids_.emplace(snapshot.snapshot_id, cid);
    auto pos = std::upper_bound(snapshots_.begin(), snapshots_.end(), snapshot.captured_at,
                                [](std::uint64_t t, const ProgressSnapshot& s) { return t < s.captured_at; });
    snapshots_.insert(pos, std::move(snapshot));
    return cid;
}

namespace {
Json schedule_to_json(const std::map<ProgressKey, std::uint64_t>& sov) {
    Json entries = Json::array();
    for (const auto& [k, v] : sov) entries.push_back({{"guid", k.key}, {"trade", k.trade}, {"value_cents", v}});
    return entries;
}
}  // namespace

Cid Project::publish_schedule(ContentStore& store) const {
    Json doc{{"kind", "schedule_of_values"}, {"project", name_}, {"entries", schedule_to_json(sov_)}};
    return store.put(canonical_json(doc));
}

Cid Project::publish(ContentStore& store) const {
    for (const auto& s : snapshots_) store.put(canonical_json(s.to_json()));
    return publish_schedule(store);
}

std::optional<Cid> Project::snapshot_cid(const std::string& snapshot_id) const {
    auto it = snapshot_cids_.find(snapshot_id);
    if (it == snapshot_cids_.end()) return std::nullopt;
    return it->second;
}

Json Project::to_json() const {
    Json elements = Json::array();
    for (const auto& e : elements_) elements.push_back({{"guid", e.guid}, {"type", e.element_type}, {"trades", e.trades}});
    Json snapshots = Json::array();
    for (const auto& s : snapshots_) snapshots.push_back(s.to_json());
    return {{"name", name_},
            {"horizon", {{"label", horizon_.label}, {"start", horizon_.start}, {"end", horizon_.end}}},
            {"elements", elements},
            {"schedule_of_values", schedule_to_json(sov_)},
            {"snapshots", snapshots}};
}

Project Project::from_json(const Json& doc, ContentStore& store) {
    try {
        Horizon horizon{doc.at("horizon").at("start").get<std::uint64_t>(), doc.at("horizon").at("end").get<std::uint64_t>(),
                        doc.at("horizon").at("label").get<std::string>()};
        std::vector<BuildingElement> elements;
        for (const auto& e : doc.at("elements")) {
            elements.push_back({e.at("guid").get<std::string>(), e.at("type").get<std::string>(),
                                e.at("trades").get<std::vector<std::string>>()});
        }
        std::map<ProgressKey, std::uint64_t> sov;
        for (const auto& s : doc.at("schedule_of_values")) {
            sov[{s.at("guid").get<std::string>(), s.at("trade").get<std::string>()}] = s.at("value_cents").get<std::uint64_t>();
        }
        Project p(doc.at("name").get<std::string>(), std::move(horizon), std::move(elements), std::move(sov));
        p.publish_schedule(store);
        for (const auto& s : doc.at("snapshots")) p.ingest_snapshot(ProgressSnapshot::from_json(s), store);
        return p;
    } catch (const Json::exception& e) {
        throw Error(Errc::Malformed, std::string("project dataset: ") + e.what());
    }
}

std::uint64_t aggregate_valuation(const Project& project, const std::string& element_type, const std::string& trade,
                                  std::uint32_t delta_bp) {
    return valuation(delta_bp, project.type_value(element_type, trade));
}

WorkDelta compute_delta(const Project& project, const PaidState& paid, const BillingPeriod& window,
                        const ScopeSelector& scope) {
    WorkDelta delta;
    delta.period = window;

    std::vector<const ProgressSnapshot*> in_window;
    bool has_per_element = false;
    for (const auto& s : project.snapshots()) {
        if (s.captured_at > window.start && s.captured_at <= window.end) {
            in_window.push_back(&s);
            has_per_element = has_per_element || s.lod == Lod::PerElement;
        }
    }
    if (in_window.empty()) return delta;
    if (scope.guid && !has_per_element) {
        throw Error(Errc::LoDMismatch, "scope " + *scope.guid + " needs per-element progress but " + window.label +
                                           " only has aggregate snapshots");
    }
    delta.lod = has_per_element ? Lod::PerElement : Lod::Aggregate;

    // Latest observation per key; the window is already in timeline order.
    std::map<ProgressKey, std::uint32_t> latest;
    std::set<std::string> contributing;
    for (const auto* s : in_window) {
        if (s->lod != delta.lod) continue;
        for (const auto& [k, bp] : s->progress) {
            bool in_scope = delta.lod == Lod::PerElement
                                ? (scope.guid ? k.key == *scope.guid : project.element(k.key).element_type == scope.element_type)
                                : k.key == scope.element_type;
            if (!in_scope) continue;
            latest[k] = bp;
            contributing.insert(s->snapshot_id);
        }
    }
    for (const auto* s : in_window) {
        if (contributing.contains(s->snapshot_id)) delta.snapshot_ids.push_back(s->snapshot_id);
    }

    auto add_item = [&](const std::string& key, const std::string& trade, std::uint64_t value) {
        auto obs = latest.find({key, trade});
        if (obs == latest.end()) return;
        PaidEntry before;
        if (auto p = paid.find({key, trade}); p != paid.end()) before = p->second;
        if (obs->second < before.bp) {
            delta.regressions.push_back({{key, trade}, before.bp, obs->second});
            return;
        }
        std::uint32_t d = std::min(obs->second - before.bp, kFullProgressBp - before.bp);
        if (d == 0) return;
        delta.items.push_back({key, trade, before.bp, d, value, before.cents, item_amount(before.bp, d, value, before.cents)});
    };

    if (delta.lod == Lod::PerElement) {
        std::vector<const BuildingElement*> members;
        if (scope.guid) {
            members.push_back(&project.element(*scope.guid));
        } else {
            members = project.elements_of_type(scope.element_type);
        }
        for (const auto* e : members) {
            for (const auto& t : e->trades) add_item(e->guid, t, project.value_of(e->guid, t));
        }
    } else {
        for (const auto& t : project.trades_of_type(scope.element_type)) {
            add_item(scope.element_type, t, project.type_value(scope.element_type, t));
        }
    }
    return delta;
}

}  // namespace flowledger
