#include <algorithm>
#include <sstream>

#include "flowledger/chain_io.hpp"
#include "flowledger/error.hpp"
#include "flowledger/evidence.hpp"
#include "flowledger/harness.hpp"

namespace flowledger {

namespace {

namespace fs = std::filesystem;

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

class ScenarioCheck {
public:
    ScenarioCheck(fs::path dir, std::string name, std::vector<std::string>& findings)
        : dir_(std::move(dir)), name_(std::move(name)), findings_(findings) {}

    void run() {
        Json dataset;
        try {
            dataset = read_canonical_file(dir_ / "dataset.json");
        } catch (const Error& e) {
            return fail(std::string("dataset.json: ") + e.what());
        }

        ChainImport chain;
        try {
            chain = import_chain_jsonl(read_text_file(dir_ / "chain.jsonl"));
        } catch (const ChainImportError& e) {
            return fail("chain.jsonl: " + std::string(e.what()));
        } catch (const Error& e) {
            return fail("chain.jsonl: " + std::string(e.what()));
        }

        if (!fs::is_directory(dir_ / "store")) return fail("store directory missing");
        ContentStore store(dir_ / "store");
        for (const auto& stray : store.stray_files()) fail("store: unexpected file " + stray);
        for (const auto& cid : store.list()) {
            try {
                (void)store.get(cid);
            } catch (const Error& e) {
                fail("store object " + cid.str() + ": " + e.what());
            }
        }

        WorldState replayed;
        auto report = replay_blocks(chain.genesis, chain.blocks, [&store](const Cid& c) { return store.resolves(c); },
                                    replayed);
        if (!report.ok) {
            return fail("chain replay" + (report.height ? " at block " + std::to_string(*report.height) : std::string()) +
                        ": " + report.finding);
        }
        try {
            if (export_state_json(replayed) != read_text_file(dir_ / "state.json")) {
                fail("state.json does not match the replayed world state");
            }
        } catch (const Error& e) {
            fail(std::string("state.json: ") + e.what());
        }

        const int scenario = dataset.value("scenario", 0);
        std::ostringstream csv;
        csv << "scenario,period,payee,trades,element_count,amount_cents,evidence_cid,lien_token_id\n";
        std::map<Address, std::uint64_t> next_token;
        {
            WorldState g = chain.genesis.build();
            for (const auto& [addr, _] : g.accounts()) {
                if (g.has_liens(addr)) next_token[addr] = g.liens(addr).next_id();
            }
        }
        std::vector<std::string> cids;
        for (const auto& block : chain.blocks) {
            if (block.height == 0) continue;
            const std::string where = "block " + std::to_string(block.height);
            for (const auto& batch : block.batches) {
                const auto& txs = batch.transactions;
                if (txs.size() != 2 || txs[1].kind != TxKind::LienMintTransfer ||
                    (txs[0].kind != TxKind::NativeTransfer && txs[0].kind != TxKind::TokenTransfer)) {
                    fail(where + ": batch is not [payment, lien mint]");
                    continue;
                }
                const auto& pay = txs[0];
                const auto& lien = txs[1];
                if (!pay.evidence_cid || !lien.evidence_cid || *pay.evidence_cid != *lien.evidence_cid) {
                    fail(where + ": payment and lien carry different evidence");
                    continue;
                }
                const Cid cid = *pay.evidence_cid;
                LienMintPayload lp;
                try {
                    lp = decode_lien_mint(lien.payload);
                } catch (const Error& e) {
                    fail(where + ": lien payload: " + e.what());
                    continue;
                }
                const std::uint64_t token_id = next_token[lp.registry]++;
                EvidenceBundle bundle;
                try {
                    bundle = EvidenceBundle::load(store, cid);
                } catch (const Error& e) {
                    fail("evidence " + cid.str() + ": " + e.what());
                    continue;
                }
                if (lp.uri_cid != cid) fail(where + ": lien URI differs from evidence " + cid.str());
                if (lp.scope != bundle.scope.canonical()) fail(where + ": lien scope differs from evidence " + cid.str());
                try {
                    if (replayed.liens(lp.registry).token_uri(token_id) != cid) {
                        fail(where + ": lien token " + std::to_string(token_id) + " does not resolve to " + cid.str());
                    }
                } catch (const Error& e) {
                    fail(where + ": lien token " + std::to_string(token_id) + ": " + e.what());
                }
                std::uint64_t rederived = 0;
                try {
                    rederived = bundle.rederive_amount();
                } catch (const Error& e) {
                    fail("evidence " + cid.str() + ": " + e.what());
                    continue;
                }
                if (rederived != bundle.amount_cents || pay.amount != u128{bundle.amount_cents}) {
                    fail(where + ": payment " + u128_to_string(pay.amount) + " does not match evidence " + cid.str() +
                         " (stated " + std::to_string(bundle.amount_cents) + ", rederived " + std::to_string(rederived) + ")");
                }
                if (pay.to != bundle.payee || pay.from != bundle.payer_escrow) {
                    fail(where + ": payment parties differ from evidence " + cid.str());
                }
                csv << scenario << ',' << bundle.scope.period.label << ',' << bundle.payee.hex() << ','
                    << join(bundle.scope.trades, ';') << ',' << bundle.scope.guids.size() << ',' << bundle.amount_cents
                    << ',' << cid.str() << ',' << token_id << '\n';
                cids.push_back(cid.str());
            }
        }

        try {
            if (csv.str() != read_text_file(dir_ / "payments.csv")) fail("payments.csv differs from the chain and evidence");
        } catch (const Error& e) {
            fail(std::string("payments.csv: ") + e.what());
        }
        const auto& pays = dataset.value("payments", Json::array());
        if (pays.size() != cids.size()) {
            fail("dataset.json lists " + std::to_string(pays.size()) + " payments, chain has " + std::to_string(cids.size()));
        } else {
            for (std::size_t i = 0; i < cids.size(); ++i) {
                if (pays[i].value("evidence_cid", std::string()) != cids[i]) {
                    fail("dataset.json payment " + std::to_string(i) + " cites the wrong evidence");
                }
            }
        }
    }

private:
    void fail(const std::string& what) { findings_.push_back(name_ + ": " + what); }

    fs::path dir_;
    std::string name_;
    std::vector<std::string>& findings_;
};

}  // namespace

std::vector<std::string> verify_scenario(const std::filesystem::path& scenario_dir) {
    std::vector<std::string> findings;
    ScenarioCheck(scenario_dir, scenario_dir.parent_path().filename().string() + "/" + scenario_dir.filename().string(),
                  findings)
        .run();
    return findings;
}

VerifyOutcome verify_run(const std::filesystem::path& run_dir) {
    VerifyOutcome out;
    for (const char* f : {"manifest.json", "report.json"}) {
        try {
            (void)read_canonical_file(run_dir / f);
        } catch (const Error& e) {
            out.findings.push_back(std::string(f) + ": " + e.what());
        }
    }
    std::vector<fs::path> dirs;
    if (fs::is_directory(run_dir)) {
        for (const auto& ds : fs::directory_iterator(run_dir)) {
            if (!ds.is_directory()) continue;
            for (const auto& sc : fs::directory_iterator(ds.path())) {
                if (sc.is_directory() && sc.path().filename().string().starts_with("scenario-")) dirs.push_back(sc.path());
            }
        }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) out.findings.push_back("no scenario directories under " + run_dir.string());
    for (const auto& d : dirs) {
        auto found = verify_scenario(d);
        out.findings.insert(out.findings.end(), found.begin(), found.end());
        ++out.scenarios_checked;
    }
    out.ok = out.findings.empty();
    return out;
}

}  // namespace flowledger
