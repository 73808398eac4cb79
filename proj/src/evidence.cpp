#include "flowledger/evidence.hpp"

#include "flowledger/error.hpp"

namespace flowledger {

Json WorkScope::to_json() const {
    return {{"element_type", element_type},
            {"guids", guids},
            {"trades", trades},
            {"period", {{"label", period.label}, {"start", period.start}, {"end", period.end}}}};
}

WorkScope WorkScope::from_json(const Json& doc) {
    WorkScope s;
    s.element_type = doc.at("element_type").get<std::string>();
    s.guids = doc.at("guids").get<std::vector<std::string>>();
    s.trades = doc.at("trades").get<std::vector<std::string>>();
    const auto& p = doc.at("period");
    s.period = {p.at("start").get<std::uint64_t>(), p.at("end").get<std::uint64_t>(), p.at("label").get<std::string>()};
    return s;
}

Json EvidenceBundle::to_json() const {
    Json items_json = Json::array();
    for (const auto& i : items) {
        items_json.push_back({{"key", i.key},
                              {"trade", i.trade},
                              {"paid_bp_before", i.paid_bp_before},
                              {"delta_bp", i.delta_bp},
                              {"value_cents", i.value_cents},
                              {"paid_cents_before", i.paid_cents_before},
                              {"amount_cents", i.amount_cents}});
    }
    Json cids = Json::array();
    for (const auto& c : snapshot_cids) cids.push_back(c.str());
    return {{"kind", "flowledger.evidence.v1"},
            {"project", project},
            {"scenario", scenario_id},
            {"config", config},
            {"payee", payee.hex()},
            {"payee_role", payee_role},
            {"payer_escrow", payer_escrow.hex()},
            {"asset", asset},
            {"scope", scope.to_json()},
            {"lod", std::string(lod_name(lod))},
            {"items", items_json},
            {"amount_cents", amount_cents},
            {"snapshot_ids", snapshot_ids},
            {"snapshot_cids", cids},
            {"sov_cid", sov_cid.str()},
            {"bim_ref", bim_ref ? Json(*bim_ref) : Json(nullptr)}};
}

EvidenceBundle EvidenceBundle::from_json(const Json& doc) {
    try {
        if (doc.at("kind") != "flowledger.evidence.v1") throw Error(Errc::Malformed, "not an evidence bundle");
        EvidenceBundle b;
        b.project = doc.at("project").get<std::string>();
        b.scenario_id = doc.at("scenario").get<int>();
        b.config = doc.at("config").get<std::string>();
        b.payee = Address::from_hex(doc.at("payee").get<std::string>());
        b.payee_role = doc.at("payee_role").get<std::string>();
        b.payer_escrow = Address::from_hex(doc.at("payer_escrow").get<std::string>());
        b.asset = doc.at("asset").get<std::string>();
        b.scope = WorkScope::from_json(doc.at("scope"));
        b.lod = lod_from_name(doc.at("lod").get<std::string>());
        for (const auto& i : doc.at("items")) {
            b.items.push_back({i.at("key").get<std::string>(), i.at("trade").get<std::string>(),
                               i.at("paid_bp_before").get<std::uint32_t>(), i.at("delta_bp").get<std::uint32_t>(),
                               i.at("value_cents").get<std::uint64_t>(), i.at("paid_cents_before").get<std::uint64_t>(),
                               i.at("amount_cents").get<std::uint64_t>()});
        }
        b.amount_cents = doc.at("amount_cents").get<std::uint64_t>();
        b.snapshot_ids = doc.at("snapshot_ids").get<std::vector<std::string>>();
        for (const auto& c : doc.at("snapshot_cids")) b.snapshot_cids.push_back(Cid::parse(c.get<std::string>()));
        b.sov_cid = Cid::parse(doc.at("sov_cid").get<std::string>());
        if (!doc.at("bim_ref").is_null()) b.bim_ref = doc.at("bim_ref").get<std::string>();
        return b;
    } catch (const Json::exception& e) {
        throw Error(Errc::Malformed, std::string("evidence bundle: ") + e.what());
    }
}

EvidenceBundle EvidenceBundle::load(const ContentStore& store, const Cid& cid) {
    return from_json(parse_canonical_json(store.get_text(cid)));
}

std::uint64_t EvidenceBundle::rederive_amount() const {
    std::uint64_t total = 0;
    for (const auto& i : items) {
        if (i.delta_bp == 0 || i.paid_bp_before + i.delta_bp > kFullProgressBp) {
            throw Error(Errc::Malformed, "evidence item (" + i.key + ", " + i.trade + ") has an impossible delta");
        }
        total += item_amount(i.paid_bp_before, i.delta_bp, i.value_cents, i.paid_cents_before);
    }
    return total;
}

}  // namespace flowledger
