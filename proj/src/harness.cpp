#include "flowledger/harness.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "flowledger/chain_io.hpp"
#include "flowledger/error.hpp"
#include "flowledger/evidence.hpp"
#include "flowledger/fiat.hpp"

namespace flowledger {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::NotFound, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

Json read_canonical_file(const std::filesystem::path& path) {
    auto text = read_text_file(path);
    if (text.empty() || text.back() != '\n') throw Error(Errc::Malformed, path.filename().string() + " lacks a final newline");
    text.pop_back();
    return parse_canonical_json(text);
}

Json AtomicityComparison::to_json() const {
    return {{"payments", payments},
            {"crypto_recovered", crypto_recovered},
            {"lien_tokens", lien_tokens},
            {"lien_recovered", lien_recovered},
            {"fiat_entries", fiat_entries},
            {"fiat_recovered", fiat_recovered},
            {"pooled_fiat_entries", pooled_fiat_entries},
            {"pooled_fiat_recovered", pooled_fiat_recovered}};
}

AtomicityComparison compare_atomicity(const PaymentDataset& dataset, const Chain& chain, const Parties& parties,
                                      const ContentStore& store) {
    AtomicityComparison cmp;
    const auto& registry = chain.state().liens(parties.lien_registry);

    // Crypto side: every payment and every lien token must lead back to its
    // evidence, and the evidence must reproduce the amount and scope.
    std::map<std::uint64_t, std::vector<std::pair<const PaymentRecord*, EvidenceBundle>>> by_period;
    for (const auto& p : dataset.payments) {
        ++cmp.payments;
        ++cmp.lien_tokens;
        try {
            auto bundle = EvidenceBundle::load(store, *p.payment.evidence_cid);
            if (bundle.rederive_amount() == p.amount_cents && bundle.amount_cents == p.amount_cents &&
                static_cast<u128>(p.amount_cents) == p.payment.amount && bundle.scope.guids.size() == p.element_count) {
                ++cmp.crypto_recovered;
            }
            auto token = registry.token(p.lien_token_id);
            auto via_lien = EvidenceBundle::load(store, token.uri_cid);
            if (WorkScope::from_json(parse_canonical_json(token.scope)) == via_lien.scope &&
                via_lien.rederive_amount() == p.amount_cents) {
                ++cmp.lien_recovered;
            }
            by_period[p.period_index].emplace_back(&p, std::move(bundle));
        } catch (const Error&) {
            // Unrecoverable; counted by omission.
        }
    }

    // Fiat side: the same payments cleared through banks, one clearing window per period.
    fiat::CentralReserve reserve;
    auto& owner_bank = reserve.register_bank("owner-bank");
    owner_bank.open_account(parties.owner.hex());
    reserve.register_bank("contractor-bank").open_account(parties.general_contractor.hex());
    auto& trade_bank = reserve.register_bank("trade-bank");
    for (const auto& [_, sub] : parties.subcontractors) trade_bank.open_account(sub.hex());
    auto bank_of = [&](const Address& a) { return a == parties.general_contractor ? "contractor-bank" : "trade-bank"; };

    for (const auto& [period, items] : by_period) {
        fiat::ClearingBatch batch{items.front().first->period_label, {}};
        for (const auto& [rec, _] : items) {
            batch.instructions.push_back({"owner-bank", bank_of(rec->payee), parties.owner.hex(), rec->payee.hex(),
                                          static_cast<std::int64_t>(rec->amount_cents)});
        }
        reserve.net_and_settle(batch);

        std::map<Address, std::pair<std::set<std::string>, std::map<std::string, std::int64_t>>> truth;
        for (const auto& [rec, bundle] : items) {
            auto& [guids, charges] = truth[rec->payee];
            guids.insert(bundle.scope.guids.begin(), bundle.scope.guids.end());
            if (bundle.lod == Lod::PerElement) {
                for (const auto& i : bundle.items) charges[i.key] += static_cast<std::int64_t>(i.amount_cents);
            }
        }
        for (const auto& [payee, t] : truth) {
            const auto& [guids, charges] = t;
            std::vector<fiat::ElementCharge> candidates;
            for (const auto& [g, c] : charges) candidates.push_back({g, c});
            for (const auto& entry : reserve.bank(bank_of(payee)).query_payment_records(payee.hex())) {
                if (entry.window != batch.window_id) continue;
                ++cmp.fiat_entries;
                const bool pooled = guids.size() >= 2;
                if (pooled) ++cmp.pooled_fiat_entries;
                auto recovered = fiat::reconstruct_scope(entry, candidates);
                bool ok = recovered && std::set<std::string>(recovered->begin(), recovered->end()) == guids;
                if (ok) {
                    ++cmp.fiat_recovered;
                    if (pooled) ++cmp.pooled_fiat_recovered;
                }
            }
        }
    }
    return cmp;
}

MatrixResult run_matrix(const MatrixOptions& options) {
    MatrixResult result;
    std::filesystem::create_directories(options.out);
    Json manifest_datasets = Json::array();
    std::optional<std::uint64_t> seed = options.seed;

    for (const auto& file : options.datasets) {
        const std::string text = read_text_file(file);
        Json doc = Json::parse(text, nullptr, false);
        if (doc.is_discarded()) throw Error(Errc::Malformed, file.string() + " is not valid JSON");
        const std::string name = doc.value("name", file.stem().string());
        ContentStore scratch;
        Project project = Project::from_json(doc, scratch);
        Profile profile = doc.contains("profile") ? profile_from_name(doc.at("profile").get<std::string>())
                          : (!project.snapshots().empty() && project.snapshots().front().lod == Lod::Aggregate)
                              ? Profile::UgvLike
                              : Profile::UavLike;
        if (!seed && doc.contains("seed")) seed = doc.at("seed").get<std::uint64_t>();
        manifest_datasets.push_back({{"name", name},
                                     {"file", file.filename().string()},
                                     {"profile", std::string(profile_name(profile))},
                                     {"sha256", sha256(text).hex()}});
        write_text_file(options.out / name / "project.json", canonical_json(project.to_json()) + "\n");

        for (int id : options.scenario_ids) {
            auto config = GranularityConfig::from_scenario_id(id);
            const std::string rel = name + "/scenario-" + std::to_string(id);
            const auto dir = options.out / rel;
            std::filesystem::remove_all(dir);
            ContentStore store(dir / "store");
            auto run = run_scenario(project, name, config, store, {options.asset, 0});
            write_text_file(dir / "chain.jsonl", export_chain_jsonl(run.chain));
            write_text_file(dir / "state.json", export_state_json(run.chain.state()));
            write_text_file(dir / "payments.csv", run.dataset.to_csv());
            write_text_file(dir / "dataset.json", canonical_json(run.dataset.to_json()) + "\n");
            auto atomicity = compare_atomicity(run.dataset, run.chain, run.parties, store);
            result.scenarios.push_back({name, profile, std::move(run.dataset), atomicity, rel});
        }
    }

    Json ids = options.scenario_ids;
    Json manifest{{"tool_version", kToolVersion},
                  {"seed", seed ? Json(*seed) : Json(nullptr)},
                  {"asset", std::string(asset_name(options.asset))},
                  {"datasets", manifest_datasets},
                  {"scenarios", ids}};
    write_text_file(options.out / "manifest.json", canonical_json(manifest) + "\n");
    result.report = build_report(result.scenarios, manifest);
    write_text_file(options.out / "report.json", canonical_json(result.report) + "\n");
    return result;
}

namespace {

Json metrics_to_json(const GranularityMetrics& m) {
    return {{"payments_per_trade_per_month", m.payments_per_trade_per_month.str()},
            {"mean_payees_per_payment", m.mean_payees_per_payment.str()},
            {"mean_elements_per_payment", m.mean_elements_per_payment.str()},
            {"failure_count", m.failure_count}};
}

std::string fraction(std::uint64_t num, std::uint64_t den) { return std::to_string(num) + "/" + std::to_string(den); }

}  // namespace

Json build_report(const std::vector<ScenarioSummary>& scenarios, const Json& manifest) {
    Json rows = Json::array();
    Json checks = Json::array();
    AtomicityComparison total;
    std::map<std::string, std::map<int, const ScenarioSummary*>> by_dataset;

    for (const auto& s : scenarios) {
        const auto& d = s.payments;
        rows.push_back({{"dataset", s.dataset},
                        {"profile", std::string(profile_name(s.profile))},
                        {"scenario", d.scenario_id},
                        {"paper_test", paper_test_number(s.profile, d.config)},
                        {"config", d.config.label()},
                        {"payments", d.payments.size()},
                        {"failures", d.failures.size()},
                        {"total_paid_cents", d.total_paid()},
                        {"metrics", metrics_to_json(d.metrics)},
                        {"atomicity", s.atomicity.to_json()},
                        {"dir", s.scenario_dir}});
        total.payments += s.atomicity.payments;
        total.crypto_recovered += s.atomicity.crypto_recovered;
        total.lien_tokens += s.atomicity.lien_tokens;
        total.lien_recovered += s.atomicity.lien_recovered;
        total.fiat_entries += s.atomicity.fiat_entries;
        total.fiat_recovered += s.atomicity.fiat_recovered;
        total.pooled_fiat_entries += s.atomicity.pooled_fiat_entries;
        total.pooled_fiat_recovered += s.atomicity.pooled_fiat_recovered;
        by_dataset[s.dataset][d.scenario_id] = &s;
    }

    // Granularity ordering between scenarios that differ in exactly one axis.
    for (const auto& [dataset, ids] : by_dataset) {
        for (const auto& [id, low] : ids) {
            auto cfg = low->payments.config;
            auto compare = [&](Level GranularityConfig::*axis, const char* axis_name) {
                if (cfg.*axis != Level::Low) return;
                auto hi_cfg = cfg;
                hi_cfg.*axis = Level::High;
                auto it = ids.find(hi_cfg.scenario_id());
                if (it == ids.end()) return;
                const auto& lm = low->payments.metrics;
                const auto& hm = it->second->payments.metrics;
                if (lm.failure_count > 0 || hm.failure_count > 0) return;
                bool passed = false;
                std::string detail;
                if (std::string(axis_name) == "product") {
                    passed = lm.mean_elements_per_payment >= hm.mean_elements_per_payment;
                    detail = "mean elements/payment " + lm.mean_elements_per_payment.str() + " >= " + hm.mean_elements_per_payment.str();
                } else if (std::string(axis_name) == "time") {
                    passed = hm.payments_per_trade_per_month >= lm.payments_per_trade_per_month;
                    detail = "payments/trade/month " + hm.payments_per_trade_per_month.str() + " >= " + lm.payments_per_trade_per_month.str();
                } else {
                    passed = lm.mean_payees_per_payment >= hm.mean_payees_per_payment;
                    detail = "trade parties/payment " + lm.mean_payees_per_payment.str() + " >= " + hm.mean_payees_per_payment.str();
                }
                checks.push_back({{"check", std::string("granularity-") + axis_name},
                                  {"dataset", dataset},
                                  {"scenarios", Json::array({id, hi_cfg.scenario_id()})},
                                  {"passed", passed},
                                  {"detail", detail}});
            };
            compare(&GranularityConfig::product, "product");
            compare(&GranularityConfig::time, "time");
            compare(&GranularityConfig::trade, "trade");
        }
        std::set<std::uint64_t> totals;
        for (const auto& [id, s] : ids) {
            if (s->payments.failures.empty()) totals.insert(s->payments.total_paid());
        }
        if (!totals.empty()) {
            checks.push_back({{"check", "total-paid-spread"},
                              {"dataset", dataset},
                              {"passed", true},
                              {"detail", "successful scenarios paid between " + std::to_string(*totals.begin()) + " and " +
                                             std::to_string(*totals.rbegin()) + " cents"}});
        }
    }

    return {{"tool_version", kToolVersion},
            {"manifest", manifest},
            {"scenario_numbering",
             "scenario = 1 + 4*product + 2*time + trade with low=0, high=1; paper_test maps UGV-like to tests 1-8 "
             "and UAV-like to tests 9-16"},
            {"metric_definitions",
             {{"payments_per_trade_per_month", "payments divided by distinct trades paid, over the one-month horizon (time axis)"},
              {"mean_payees_per_payment", "trade parties whose work one payment compensates (trade axis)"},
              {"mean_elements_per_payment", "building elements covered by one payment (product axis)"}}},
            {"rows", rows},
            {"checks", checks},
            {"atomicity",
             {{"totals", total.to_json()},
              {"crypto_recoverable", fraction(total.crypto_recovered, total.payments)},
              {"lien_recoverable", fraction(total.lien_recovered, total.lien_tokens)},
              {"fiat_recoverable", fraction(total.fiat_recovered, total.fiat_entries)},
              {"fiat_pooled_recoverable", fraction(total.pooled_fiat_recovered, total.pooled_fiat_entries)}}}};
}

std::string render_report_markdown(const Json& report) {
    std::ostringstream out;
    out << "# Payment integration report\n\n" << report.at("tool_version").get<std::string>() << "\n\n";
    out << report.at("scenario_numbering").get<std::string>() << "\n\n";
    out << "| dataset | scenario | paper test | config | payments | failures | total paid (cents) | "
           "payments/trade/month | trade parties/payment | elements/payment |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.at("rows")) {
        const auto& m = r.at("metrics");
        out << "| " << r.at("dataset").get<std::string>() << " | " << r.at("scenario") << " | " << r.at("paper_test")
            << " | " << r.at("config").get<std::string>() << " | " << r.at("payments") << " | " << r.at("failures")
            << " | " << r.at("total_paid_cents") << " | " << m.at("payments_per_trade_per_month").get<std::string>()
            << " | " << m.at("mean_payees_per_payment").get<std::string>() << " | "
            << m.at("mean_elements_per_payment").get<std::string>() << " |\n";
    }
    out << "\n## Checks\n\n";
    for (const auto& c : report.at("checks")) {
        out << "- [" << (c.at("passed").get<bool>() ? "pass" : "FAIL") << "] " << c.at("check").get<std::string>() << " ("
            << c.at("dataset").get<std::string>() << "): " << c.at("detail").get<std::string>() << "\n";
    }
    const auto& a = report.at("atomicity");
    out << "\n## Atomicity\n\n"
        << "- crypto payments traceable to evidence: " << a.at("crypto_recoverable").get<std::string>() << "\n"
        << "- lien tokens traceable to evidence: " << a.at("lien_recoverable").get<std::string>() << "\n"
        << "- fiat entries with recoverable element scope: " << a.at("fiat_recoverable").get<std::string>() << "\n"
        << "- pooled fiat entries with recoverable element scope: " << a.at("fiat_pooled_recoverable").get<std::string>()
        << "\n";
    return out.str();
}

std::string render_report_csv(const Json& report) {
    std::ostringstream out;
    out << "dataset,scenario,paper_test,config,payments,failures,total_paid_cents,payments_per_trade_per_month,"
           "mean_payees_per_payment,mean_elements_per_payment,crypto_recovered,fiat_entries,fiat_recovered\n";
    for (const auto& r : report.at("rows")) {
        const auto& m = r.at("metrics");
        const auto& a = r.at("atomicity");
        out << r.at("dataset").get<std::string>() << ',' << r.at("scenario") << ',' << r.at("paper_test") << ",\""
            << r.at("config").get<std::string>() << "\"," << r.at("payments") << ',' << r.at("failures") << ','
            << r.at("total_paid_cents") << ',' << m.at("payments_per_trade_per_month").get<std::string>() << ','
            << m.at("mean_payees_per_payment").get<std::string>() << ',' << m.at("mean_elements_per_payment").get<std::string>()
            << ',' << a.at("crypto_recovered") << ',' << a.at("fiat_entries") << ',' << a.at("fiat_recovered") << '\n';
    }
    return out.str();
}

}  // namespace flowledger
