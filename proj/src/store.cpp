#include "flowledger/store.hpp"

#include <fstream>
#include <iterator>

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
constexpr std::string_view kCidPrefix = "cidv1-12-";

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::NotFound, "cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}
}  // namespace

std::string Cid::str() const { return std::string(kCidPrefix) + digest.hex(); }

Cid Cid::parse(std::string_view text) {
    if (text.size() != kCidPrefix.size() + 2 * Digest::size || text.substr(0, kCidPrefix.size()) != kCidPrefix) {
        throw Error(Errc::Malformed, "not a cidv1-12 identifier: " + std::string(text));
    }
    return Cid{Digest::from_hex(text.substr(kCidPrefix.size()))};
}

Bytes Cid::binary() const {
    Bytes out{kVersion, kSha256};
    out.insert(out.end(), digest.bytes.begin(), digest.bytes.end());
    return out;
}

Cid Cid::from_binary(ByteView data) {
    if (data.size() != kBinarySize || data[0] != kVersion || data[1] != kSha256) {
        throw Error(Errc::Malformed, "bad binary CID");
    }
    return Cid{Digest::from_view(data.subspan(2))};
}

ContentStore::ContentStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(Errc::Io, "cannot create store directory " + dir_.string() + ": " + ec.message());
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        auto name = entry.path().filename().string();
        try {
            if (!entry.is_regular_file() || name.size() != 2 * Digest::size) throw Error(Errc::Malformed, name);
            index_.insert(Digest::from_hex(name));
        } catch (const Error&) {
            stray_.push_back(name);
        }
    }
}

std::filesystem::path ContentStore::object_path(const Cid& cid) const { return dir_ / cid.digest.hex(); }

Cid ContentStore::put(ByteView content) {
    if (content.empty()) throw Error(Errc::EmptyContent, "refusing to store empty content");
    Cid cid = Cid::of(content);
    std::lock_guard lock(mu_);
    if (index_.contains(cid.digest)) return cid;
    if (dir_.empty()) {
        memory_.emplace(cid.digest, Bytes(content.begin(), content.end()));
    } else {
        auto final_path = object_path(cid);
        auto tmp_path = final_path;
        tmp_path += ".tmp";
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
            if (!out) throw Error(Errc::Io, "write failed for " + tmp_path.string());
        }
        std::filesystem::rename(tmp_path, final_path);
    }
    index_.insert(cid.digest);
    return cid;
}

Bytes ContentStore::get(const Cid& cid) const {
    Bytes data;
    {
        std::lock_guard lock(mu_);
        if (!index_.contains(cid.digest)) throw Error(Errc::NotFound, cid.str());
        if (dir_.empty()) {
            data = memory_.at(cid.digest);
        }
    }
    if (!dir_.empty()) {
        std::error_code ec;
        if (!std::filesystem::exists(object_path(cid), ec)) throw Error(Errc::NotFound, cid.str());
        data = read_file(object_path(cid));
    }
    if (sha256(data) != cid.digest) throw Error(Errc::IntegrityFailure, cid.str());
    return data;
}

std::string ContentStore::get_text(const Cid& cid) const {
    auto data = get(cid);
    return {data.begin(), data.end()};
}

bool ContentStore::contains(const Cid& cid) const {
    std::lock_guard lock(mu_);
    return index_.contains(cid.digest);
}

bool ContentStore::resolves(const Cid& cid) const noexcept {
    try {
        (void)get(cid);
        return true;
    } catch (...) {
        return false;
    }
}

std::vector<Cid> ContentStore::list() const {
    std::lock_guard lock(mu_);
    std::vector<Cid> out;
    out.reserve(index_.size());
    for (const auto& d : index_) out.push_back(Cid{d});
    return out;
}

std::vector<std::string> ContentStore::stray_files() const {
    std::lock_guard lock(mu_);
    return stray_;
}

std::size_t ContentStore::size() const {
    std::lock_guard lock(mu_);
    return index_.size();
}

}  // namespace flowledger
