#include "flowledger/chain_io.hpp"

namespace flowledger {

namespace {

std::string hx(ByteView b) { return to_hex_prefixed(b); }

Digest digest_field(const Json& j, const char* key) { return Digest::from_view(from_hex_prefixed(j.at(key).get<std::string>())); }
Address address_field(const Json& j, const char* key) { return Address::from_hex(j.at(key).get<std::string>()); }
u128 amount_field(const Json& j, const char* key) { return u128_from_string(j.at(key).get<std::string>()); }

void require_keys(const Json& j, std::initializer_list<const char*> keys) {
    if (!j.is_object() || j.size() != keys.size()) throw Error(Errc::Malformed, "unexpected object shape");
    for (const char* k : keys) {
        if (!j.contains(k)) throw Error(Errc::Malformed, std::string("missing field ") + k);
    }
}

}  // namespace

Json genesis_to_json(const GenesisSpec& g) {
    Json accounts = Json::array();
    for (const auto& a : g.accounts) {
        accounts.push_back({{"address", a.address.hex()}, {"balance", u128_to_string(a.balance)},
                            {"code_hash", hx(a.code_hash.view())}});
    }
    Json fungibles = Json::array();
    for (const auto& f : g.fungibles) {
        Json mints = Json::array();
        for (const auto& [to, amount] : f.mints) mints.push_back({{"to", to.hex()}, {"amount", u128_to_string(amount)}});
        fungibles.push_back({{"contract", f.contract.hex()}, {"owner", f.owner.hex()}, {"mints", mints}});
    }
    Json liens = Json::array();
    for (const auto& l : g.lien_registries) liens.push_back({{"contract", l.contract.hex()}, {"minter", l.minter.hex()}});
    return {{"accounts", accounts}, {"fungibles", fungibles}, {"lien_registries", liens}, {"timestamp", g.timestamp}};
}

GenesisSpec genesis_from_json(const Json& doc) {
    require_keys(doc, {"accounts", "fungibles", "lien_registries", "timestamp"});
    GenesisSpec g;
    g.timestamp = doc.at("timestamp").get<std::uint64_t>();
    for (const auto& a : doc.at("accounts")) {
        require_keys(a, {"address", "balance", "code_hash"});
        g.accounts.push_back({address_field(a, "address"), amount_field(a, "balance"), digest_field(a, "code_hash")});
    }
    for (const auto& f : doc.at("fungibles")) {
        require_keys(f, {"contract", "owner", "mints"});
        GenesisSpec::FungibleDeploy d{address_field(f, "contract"), address_field(f, "owner"), {}};
        for (const auto& m : f.at("mints")) {
            require_keys(m, {"to", "amount"});
            d.mints.emplace_back(address_field(m, "to"), amount_field(m, "amount"));
        }
        g.fungibles.push_back(std::move(d));
    }
    for (const auto& l : doc.at("lien_registries")) {
        require_keys(l, {"contract", "minter"});
        g.lien_registries.push_back({address_field(l, "contract"), address_field(l, "minter")});
    }
    return g;
}

Json transaction_to_json(const Transaction& tx) {
    return {{"amount", u128_to_string(tx.amount)},
            {"evidence_cid", tx.evidence_cid ? Json(tx.evidence_cid->str()) : Json(nullptr)},
            {"from", tx.from.hex()},
            {"id", hx(tx.id().view())},
            {"kind", std::string(tx_kind_name(tx.kind))},
            {"nonce", tx.nonce},
            {"payload", hx(tx.payload)},
            {"to", tx.to.hex()}};
}

Transaction transaction_from_json(const Json& doc) {
    require_keys(doc, {"amount", "evidence_cid", "from", "id", "kind", "nonce", "payload", "to"});
    Transaction tx;
    tx.amount = amount_field(doc, "amount");
    if (!doc.at("evidence_cid").is_null()) tx.evidence_cid = Cid::parse(doc.at("evidence_cid").get<std::string>());
    tx.from = address_field(doc, "from");
    tx.kind = tx_kind_from_name(doc.at("kind").get<std::string>());
    tx.nonce = doc.at("nonce").get<std::uint64_t>();
    tx.payload = from_hex_prefixed(doc.at("payload").get<std::string>());
    tx.to = address_field(doc, "to");
    if (tx.id() != digest_field(doc, "id")) throw Error(Errc::Malformed, "transaction id does not match contents");
    return tx;
}

Json block_to_json(const Block& b) {
    Json batches = Json::array();
    for (const auto& batch : b.batches) {
        Json txs = Json::array();
        for (const auto& tx : batch.transactions) txs.push_back(transaction_to_json(tx));
        batches.push_back({{"batch_id", hx(batch.batch_id().view())}, {"transactions", txs}});
    }
    return {{"batches", batches},
            {"hash", hx(b.hash().view())},
            {"height", b.height},
            {"parent", hx(b.parent.view())},
            {"state_root", hx(b.state_root.view())},
            {"timestamp", b.timestamp},
            {"tx_root", hx(b.tx_root.view())}};
}

std::string export_chain_jsonl(const Chain& chain) {
    std::string out;
    for (const auto& b : chain.blocks()) {
        Json line = block_to_json(b);
        if (b.height == 0) line["genesis"] = genesis_to_json(chain.genesis());
        out += canonical_json(line);
        out += '\n';
    }
    return out;
}

ChainImport import_chain_jsonl(std::string_view text) {
    ChainImport result;
    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    if (text.empty()) throw ChainImportError(0, "empty chain export");
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) throw ChainImportError(line_no, "missing trailing newline");
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        try {
            Json doc = parse_canonical_json(line);
            bool genesis = line_no == 0;
            if (genesis) {
                require_keys(doc, {"batches", "genesis", "hash", "height", "parent", "state_root", "timestamp", "tx_root"});
                result.genesis = genesis_from_json(doc.at("genesis"));
            } else {
                require_keys(doc, {"batches", "hash", "height", "parent", "state_root", "timestamp", "tx_root"});
            }
            Block b;
            b.height = doc.at("height").get<std::uint64_t>();
            b.parent = digest_field(doc, "parent");
            b.state_root = digest_field(doc, "state_root");
            b.tx_root = digest_field(doc, "tx_root");
            b.timestamp = doc.at("timestamp").get<std::uint64_t>();
            for (const auto& jb : doc.at("batches")) {
                require_keys(jb, {"batch_id", "transactions"});
                AtomicBatch batch;
                for (const auto& jt : jb.at("transactions")) batch.transactions.push_back(transaction_from_json(jt));
                if (batch.batch_id() != digest_field(jb, "batch_id")) throw Error(Errc::Malformed, "batch_id mismatch");
                b.batches.push_back(std::move(batch));
            }
            if (b.hash() != digest_field(doc, "hash")) throw Error(Errc::Malformed, "block hash mismatch");
            result.blocks.push_back(std::move(b));
        } catch (const ChainImportError&) {
            throw;
        } catch (const std::exception& e) {
            throw ChainImportError(line_no, e.what());
        }
        ++line_no;
    }
    return result;
}

std::string export_state_json(const WorldState& state) {
    Json accounts = Json::array();
    for (const auto& [address, a] : state.accounts()) {
        Json storage = Json::array();
        state.storage_of(address).for_each([&](const Bytes& k, const Bytes& v) {
            storage.push_back(Json::array({hx(k), hx(v)}));
        });
        accounts.push_back({{"address", address.hex()},
                            {"balance", u128_to_string(a.balance)},
                            {"code_hash", hx(a.code_hash.view())},
                            {"nonce", a.nonce},
                            {"storage", storage},
                            {"storage_root", hx(a.storage_root.view())}});
    }
    Json doc{{"accounts", accounts}, {"state_root", hx(state.root().view())}};
    return canonical_json(doc) + "\n";
}

}  // namespace flowledger
