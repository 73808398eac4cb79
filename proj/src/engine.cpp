#include "flowledger/engine.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
constexpr std::uint64_t kWeekSeconds = 7ull * 24 * 3600;

std::string_view level_name(Level l) { return l == Level::Low ? "low" : "high"; }
}  // namespace

// --- granularity -------------------------------------------------------------

int GranularityConfig::scenario_id() const noexcept {
    return 1 + 4 * static_cast<int>(product) + 2 * static_cast<int>(time) + static_cast<int>(trade);
}

GranularityConfig GranularityConfig::from_scenario_id(int id) {
    if (id < 1 || id > 8) throw Error(Errc::Malformed, "scenario id must be in 1..8, got " + std::to_string(id));
    int bits = id - 1;
    return {static_cast<Level>((bits >> 2) & 1), static_cast<Level>((bits >> 1) & 1), static_cast<Level>(bits & 1)};
}

std::vector<GranularityConfig> GranularityConfig::all() {
    std::vector<GranularityConfig> out;
    for (int id = 1; id <= 8; ++id) out.push_back(from_scenario_id(id));
    return out;
}

std::string GranularityConfig::label() const {
    return "product=" + std::string(level_name(product)) + ",time=" + std::string(level_name(time)) +
           ",trade=" + std::string(level_name(trade));
}

std::vector<BillingPeriod> plan_periods(Level time, const Project::Horizon& horizon) {
    const std::string prefix = horizon.label.empty() ? "" : horizon.label + " ";
    if (time == Level::Low) return {{horizon.start, horizon.end, horizon.label.empty() ? "month" : horizon.label}};
    std::vector<BillingPeriod> out;
    int week = 1;
    for (std::uint64_t start = horizon.start; start < horizon.end; start += kWeekSeconds, ++week) {
        out.push_back({start, std::min(start + kWeekSeconds, horizon.end), prefix + "w" + std::to_string(week)});
    }
    return out;
}

std::vector<ScopeSelector> partition_scope(Level product, const std::vector<BuildingElement>& elements) {
    std::vector<ScopeSelector> out;
    if (product == Level::High) {
        for (const auto& e : elements) out.push_back({e.element_type, e.guid});
        return out;
    }
    for (const auto& e : elements) {
        bool seen = std::any_of(out.begin(), out.end(), [&](const ScopeSelector& s) { return s.element_type == e.element_type; });
        if (!seen) out.push_back({e.element_type, std::nullopt});
    }
    return out;
}

Parties Parties::standard(const std::vector<std::string>& trades) {
    Parties p;
    p.owner = Address::derive("owner");
    p.general_contractor = Address::derive("general-contractor");
    for (const auto& t : trades) p.subcontractors.emplace(t, Address::derive("subcontractor:" + t));
    p.escrow = Address::derive("payment-escrow");
    p.token_contract = Address::derive("erc20-settlement-token");
    p.lien_registry = Address::derive("erc721-lien-registry");
    return p;
}

std::vector<PayeeRoute> resolve_payees(Level trade, const std::vector<std::string>& trades, const Parties& parties) {
    if (trade == Level::Low) return {{parties.general_contractor, "general_contractor", trades}};
    std::vector<PayeeRoute> out;
    for (const auto& t : trades) {
        auto it = parties.subcontractors.find(t);
        if (it == parties.subcontractors.end()) throw Error(Errc::UnmappedTrade, t + " has no subcontractor");
        out.push_back({it->second, "subcontractor:" + t, {t}});
    }
    return out;
}

std::string_view asset_name(SettlementAsset asset) noexcept { return asset == SettlementAsset::Native ? "native" : "token"; }

SettlementAsset asset_from_name(std::string_view name) {
    if (name == "native") return SettlementAsset::Native;
    if (name == "token") return SettlementAsset::Token;
    throw Error(Errc::Malformed, "unknown settlement asset " + std::string(name));
}

// --- metrics -----------------------------------------------------------------

Rational Rational::of(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw Error(Errc::Malformed, "zero denominator");
    if (num == 0) return {0, 1};
    auto g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

std::strong_ordering Rational::operator<=>(const Rational& other) const {
    return static_cast<u128>(num) * other.den <=> static_cast<u128>(other.num) * den;
}

GranularityMetrics compute_metrics(const std::vector<PaymentRecord>& payments, std::size_t failure_count) {
    GranularityMetrics m;
    m.failure_count = static_cast<std::uint32_t>(failure_count);
    if (payments.empty()) return m;
    std::set<std::string> trades;
    std::uint64_t trade_slots = 0;
    std::uint64_t elements = 0;
    for (const auto& p : payments) {
        trades.insert(p.trades.begin(), p.trades.end());
        trade_slots += p.trades.size();
        elements += p.element_count;
    }
    m.payments_per_trade_per_month = Rational::of(payments.size(), trades.size());
    m.mean_payees_per_payment = Rational::of(trade_slots, payments.size());
    m.mean_elements_per_payment = Rational::of(elements, payments.size());
    return m;
}

// --- dataset -----------------------------------------------------------------

std::uint64_t PaymentDataset::total_paid() const {
    std::uint64_t total = 0;
    for (const auto& p : payments) total += p.amount_cents;
    return total;
}

namespace {
std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

Json metrics_json(const GranularityMetrics& m) {
    return {{"payments_per_trade_per_month", m.payments_per_trade_per_month.str()},
            {"mean_payees_per_payment", m.mean_payees_per_payment.str()},
            {"mean_elements_per_payment", m.mean_elements_per_payment.str()},
            {"failure_count", m.failure_count}};
}
}  // namespace

Json PaymentDataset::to_json() const {
    Json pays = Json::array();
    for (const auto& p : payments) {
        pays.push_back({{"period", p.period_label},
                        {"period_index", p.period_index},
                        {"payee", p.payee.hex()},
                        {"payee_role", p.payee_role},
                        {"trades", p.trades},
                        {"element_type", p.element_type},
                        {"element_count", p.element_count},
                        {"amount_cents", p.amount_cents},
                        {"evidence_cid", p.evidence_cid.str()},
                        {"lien_token_id", p.lien_token_id},
                        {"block_height", p.block_height},
                        {"payment_tx", to_hex_prefixed(p.payment.id().view())},
                        {"lien_tx", to_hex_prefixed(p.lien.id().view())}});
    }
    Json fails = Json::array();
    for (const auto& f : failures) {
        fails.push_back({{"period", f.period_label}, {"scope", f.scope}, {"code", std::string(errc_name(f.code))},
                         {"reason", f.reason}});
    }
    return {{"dataset", dataset},
            {"scenario", scenario_id},
            {"config", config.label()},
            {"asset", std::string(asset_name(asset))},
            {"payments", pays},
            {"failures", fails},
            {"notes", notes},
            {"total_paid_cents", total_paid()},
            {"metrics", metrics_json(metrics)}};
}

std::string PaymentDataset::to_csv() const {
    std::ostringstream out;
    out << "scenario,period,payee,trades,element_count,amount_cents,evidence_cid,lien_token_id\n";
    for (const auto& p : payments) {
        out << scenario_id << ',' << p.period_label << ',' << p.payee.hex() << ',' << join(p.trades, ';') << ','
            << p.element_count << ',' << p.amount_cents << ',' << p.evidence_cid.str() << ',' << p.lien_token_id << '\n';
    }
    return out.str();
}

// --- scenario execution --------------------------------------------------------

GenesisSpec scenario_genesis(const Parties& parties, SettlementAsset asset, std::uint64_t funding, std::uint64_t timestamp) {
    GenesisSpec g;
    g.timestamp = timestamp;
    g.accounts.push_back({parties.owner, 0, {}});
    g.accounts.push_back({parties.general_contractor, 0, {}});
    for (const auto& [_, sub] : parties.subcontractors) g.accounts.push_back({sub, 0, {}});
    g.accounts.push_back({parties.escrow, asset == SettlementAsset::Native ? u128{funding} : u128{0}, escrow_code_hash()});
    GenesisSpec::FungibleDeploy token{parties.token_contract, parties.owner, {}};
    if (asset == SettlementAsset::Token) token.mints.emplace_back(parties.escrow, funding);
    g.fungibles.push_back(std::move(token));
    g.lien_registries.push_back({parties.lien_registry, parties.escrow});
    return g;
}

ScenarioRunner::ScenarioRunner(const Project& project, GranularityConfig config, ContentStore& store,
                               ScenarioOptions options)
    : project_(project),
      config_(config),
      store_(store),
      options_(options),
      parties_(Parties::standard(project.trades())),
      sov_cid_(Cid{}),
      chain_(scenario_genesis(parties_, options.asset,
                              options.escrow_funding ? options.escrow_funding : project.total_value(),
                              project.horizon().start),
             [&store](const Cid& cid) { return store.resolves(cid); }) {
    // Bundles reference the schedule and snapshots by CID, so they must resolve in this store.
    sov_cid_ = project.publish(store_);
}

u128 ScenarioRunner::escrow_balance() const {
    if (options_.asset == SettlementAsset::Native) return chain_.state().balance(parties_.escrow);
    return chain_.state().fungible(parties_.token_contract).balance_of(parties_.escrow);
}

ScenarioRunner::PeriodOutcome ScenarioRunner::settle_period(const BillingPeriod& period, std::uint64_t period_index) {
    struct Group {
        ScopeSelector scope;
        PayeeRoute route;
        WorkDelta delta;  // items restricted to the route's trades
        std::uint64_t amount = 0;
    };

    PeriodOutcome outcome;
    std::vector<Group> groups;
    for (const auto& scope : partition_scope(config_.product, project_.elements())) {
        WorkDelta delta;
        try {
            delta = compute_delta(project_, paid_, period, scope);
        } catch (const Error& e) {
            if (e.code() != Errc::LoDMismatch) throw;
            outcome.failures.push_back({period.label, scope.guid ? scope.element_type + "/" + *scope.guid : scope.element_type,
                                        e.code(), e.what()});
            continue;
        }
        for (const auto& r : delta.regressions) {
            outcome.notes.push_back(period.label + ": progress regression on (" + r.key.key + ", " + r.key.trade + ") " +
                                    std::to_string(r.paid_bp) + " -> " + std::to_string(r.observed_bp) + " bp, no clawback");
        }
        if (delta.items.empty()) continue;
        std::vector<std::string> active;
        for (const auto& t : project_.trades()) {
            bool used = std::any_of(delta.items.begin(), delta.items.end(), [&](const WorkItem& i) { return i.trade == t; });
            if (used) active.push_back(t);
        }
        for (auto& route : resolve_payees(config_.trade, active, parties_)) {
            Group g{scope, std::move(route), {}, 0};
            g.delta.period = delta.period;
            g.delta.lod = delta.lod;
            g.delta.snapshot_ids = delta.snapshot_ids;
            for (const auto& item : delta.items) {
                if (std::find(g.route.trades.begin(), g.route.trades.end(), item.trade) != g.route.trades.end()) {
                    g.delta.items.push_back(item);
                    g.amount += item.amount_cents;
                }
            }
            // Progress worth less than a cent stays unpaid and accrues into a later delta.
            if (g.amount > 0) groups.push_back(std::move(g));
        }
    }

    std::uint64_t period_total = 0;
    for (const auto& g : groups) period_total += g.amount;
    if (period_total > escrow_balance()) {
        throw Error(Errc::EscrowInsufficient, period.label + " needs " + std::to_string(period_total) + " cents, escrow holds " +
                                                  u128_to_string(escrow_balance()));
    }

    const auto& state = chain_.state();
    std::uint64_t nonce = state.nonce(parties_.escrow);
    std::uint64_t next_token = state.liens(parties_.lien_registry).next_id();
    const std::uint64_t height = chain_.tip().height + 1;
    std::vector<AtomicBatch> batches;
    for (auto& g : groups) {
        WorkScope scope;
        scope.element_type = g.scope.element_type;
        scope.period = period;
        std::set<std::string> covered_keys;
        for (const auto& i : g.delta.items) covered_keys.insert(i.key);
        for (const auto& t : project_.trades()) {
            bool used = std::any_of(g.delta.items.begin(), g.delta.items.end(), [&](const WorkItem& i) { return i.trade == t; });
            if (used) scope.trades.push_back(t);
        }
        for (const auto* e : project_.elements_of_type(g.scope.element_type)) {
            bool covered = g.delta.lod == Lod::Aggregate
                               ? std::any_of(e->trades.begin(), e->trades.end(),
                                             [&](const std::string& t) {
                                                 return std::find(scope.trades.begin(), scope.trades.end(), t) != scope.trades.end();
                                             })
                               : covered_keys.contains(e->guid);
            if (covered) scope.guids.push_back(e->guid);
        }

        EvidenceBundle bundle;
        bundle.project = project_.name();
        bundle.scenario_id = config_.scenario_id();
        bundle.config = config_.label();
        bundle.payee = g.route.payee;
        bundle.payee_role = g.route.role;
        bundle.payer_escrow = parties_.escrow;
        bundle.asset = std::string(asset_name(options_.asset));
        bundle.scope = scope;
        bundle.lod = g.delta.lod;
        bundle.items = g.delta.items;
        bundle.amount_cents = g.amount;
        bundle.snapshot_ids = g.delta.snapshot_ids;
        for (const auto& id : g.delta.snapshot_ids) bundle.snapshot_cids.push_back(*project_.snapshot_cid(id));
        bundle.sov_cid = sov_cid_;
        bundle.bim_ref = "as-built:" + project_.name() + ":" + period.label;
        Cid cid = store_.put(bundle.canonical());

        Transaction pay;
        pay.from = parties_.escrow;
        pay.to = g.route.payee;
        pay.amount = g.amount;
        pay.evidence_cid = cid;
        pay.nonce = nonce++;
        if (options_.asset == SettlementAsset::Native) {
            pay.kind = TxKind::NativeTransfer;
        } else {
            pay.kind = TxKind::TokenTransfer;
            pay.payload = encode_payload(TokenTransferPayload{parties_.token_contract});
        }
        Transaction lien;
        lien.from = parties_.escrow;
        lien.to = parties_.owner;
        lien.kind = TxKind::LienMintTransfer;
        lien.payload = encode_payload(LienMintPayload{parties_.lien_registry, cid, scope.canonical()});
        lien.evidence_cid = cid;
        lien.nonce = nonce++;

        PaymentRecord rec;
        rec.period_index = period_index;
        rec.period_label = period.label;
        rec.payee = g.route.payee;
        rec.payee_role = g.route.role;
        rec.trades = scope.trades;
        rec.element_type = scope.element_type;
        rec.element_count = scope.guids.size();
        rec.amount_cents = g.amount;
        rec.evidence_cid = cid;
        rec.lien_token_id = next_token++;
        rec.block_height = height;
        rec.payment = pay;
        rec.lien = lien;
        outcome.payments.push_back(std::move(rec));
        batches.push_back(AtomicBatch{{std::move(pay), std::move(lien)}});
    }

    chain_.seal_block(std::move(batches), period.end);
    for (const auto& g : groups) {
        for (const auto& i : g.delta.items) {
            auto& entry = paid_[{i.key, i.trade}];
            entry.bp = i.paid_bp_before + i.delta_bp;
            entry.cents = i.paid_cents_before + i.amount_cents;
        }
    }
    return outcome;
}

PaymentDataset ScenarioRunner::run(const std::string& dataset_name) {
    PaymentDataset ds;
    ds.dataset = dataset_name;
    ds.scenario_id = config_.scenario_id();
    ds.config = config_;
    ds.asset = options_.asset;
    auto periods = plan_periods(config_.time, project_.horizon());
    for (std::size_t i = 0; i < periods.size(); ++i) {
        auto outcome = settle_period(periods[i], i);
        std::move(outcome.payments.begin(), outcome.payments.end(), std::back_inserter(ds.payments));
        std::move(outcome.failures.begin(), outcome.failures.end(), std::back_inserter(ds.failures));
        std::move(outcome.notes.begin(), outcome.notes.end(), std::back_inserter(ds.notes));
    }
    ds.metrics = compute_metrics(ds.payments, ds.failures.size());
    return ds;
}

ScenarioRun run_scenario(const Project& project, const std::string& dataset_name, GranularityConfig config,
                         ContentStore& store, ScenarioOptions options) {
    ScenarioRunner runner(project, config, store, options);
    auto dataset = runner.run(dataset_name);
    auto parties = runner.parties();
    return {std::move(dataset), std::move(runner).release_chain(), std::move(parties)};
}

}  // namespace flowledger
