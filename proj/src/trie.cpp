#include "flowledger/trie.hpp"

#include <algorithm>
#include <array>

#include "flowledger/error.hpp"

namespace flowledger {

namespace trie_detail {

using Nibbles = std::vector<std::uint8_t>;
using NodePtr = std::shared_ptr<const Node>;

enum class Kind : std::uint8_t { Leaf = 0x00, Branch = 0x01, Extension = 0x02 };

struct Node {
    Kind kind = Kind::Leaf;
    Nibbles path;                        // leaf, extension
    std::optional<Bytes> value;          // leaf (always), branch (optional)
    std::array<NodePtr, 16> children{};  // branch
    NodePtr child;                       // extension
    Bytes encoding;
    Digest hash;
};

namespace {

Bytes encode(const Node& n) {
    RecordWriter w(static_cast<std::uint8_t>(n.kind));
    switch (n.kind) {
        case Kind::Leaf:
            w.field(n.path).field(*n.value);
            break;
        case Kind::Branch:
            for (const auto& c : n.children) {
                if (c) {
                    w.field(c->hash.view());
                } else {
                    w.field(ByteView{});
                }
            }
            if (n.value) w.field(*n.value);
            break;
        case Kind::Extension:
            w.field(n.path).field(n.child->hash.view());
            break;
    }
    return w.finish();
}

NodePtr seal(Node n) {
    n.encoding = encode(n);
    n.hash = sha256(n.encoding);
    return std::make_shared<const Node>(std::move(n));
}

NodePtr make_leaf(Nibbles path, Bytes value) {
    Node n;
    n.kind = Kind::Leaf;
    n.path = std::move(path);
    n.value = std::move(value);
    return seal(std::move(n));
}

NodePtr make_extension(Nibbles path, NodePtr child) {
    if (path.empty()) return child;
    Node n;
    n.kind = Kind::Extension;
    n.path = std::move(path);
    n.child = std::move(child);
    return seal(std::move(n));
}

Nibbles slice(const Nibbles& v, std::size_t from, std::size_t to) {
    return Nibbles(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to));
}

std::size_t common_prefix(const Nibbles& a, std::size_t a_off, const Nibbles& b, std::size_t b_off) {
    std::size_t n = 0;
    while (a_off + n < a.size() && b_off + n < b.size() && a[a_off + n] == b[b_off + n]) ++n;
    return n;
}

NodePtr insert(const NodePtr& node, const Nibbles& key, std::size_t off, const Bytes& value, bool& added) {
    if (!node) {
        added = true;
        return make_leaf(slice(key, off, key.size()), value);
    }
    switch (node->kind) {
        case Kind::Leaf: {
            std::size_t cp = common_prefix(node->path, 0, key, off);
            std::size_t rest = key.size() - off;
            if (cp == node->path.size() && cp == rest) {
                return make_leaf(node->path, value);
            }
            added = true;
            Node br;
            br.kind = Kind::Branch;
            if (cp == node->path.size()) {
                br.value = *node->value;
            } else {
                br.children[node->path[cp]] = make_leaf(slice(node->path, cp + 1, node->path.size()), *node->value);
            }
            if (cp == rest) {
                br.value = value;
            } else {
                br.children[key[off + cp]] = make_leaf(slice(key, off + cp + 1, key.size()), value);
            }
            return make_extension(slice(node->path, 0, cp), seal(std::move(br)));
        }
        case Kind::Extension: {
            std::size_t cp = common_prefix(node->path, 0, key, off);
            if (cp == node->path.size()) {
                return make_extension(node->path, insert(node->child, key, off + cp, value, added));
            }
            added = true;
            Node br;
            br.kind = Kind::Branch;
            br.children[node->path[cp]] = make_extension(slice(node->path, cp + 1, node->path.size()), node->child);
            if (off + cp == key.size()) {
                br.value = value;
            } else {
                br.children[key[off + cp]] = make_leaf(slice(key, off + cp + 1, key.size()), value);
            }
            return make_extension(slice(node->path, 0, cp), seal(std::move(br)));
        }
        case Kind::Branch: {
            Node br = *node;
            if (off == key.size()) {
                if (!br.value) added = true;
                br.value = value;
            } else {
                br.children[key[off]] = insert(node->children[key[off]], key, off + 1, value, added);
            }
            return seal(std::move(br));
        }
    }
    return node;
}

Nibbles to_nibbles(ByteView key) {
    Nibbles out;
    out.reserve(key.size() * 2);
    for (auto b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0x0f);
    }
    return out;
}

Bytes from_nibbles(const Nibbles& n) {
    Bytes out(n.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>((n[2 * i] << 4) | n[2 * i + 1]);
    return out;
}

void check_key(ByteView key) {
    if (key.empty()) throw Error(Errc::EmptyKey, "trie keys must be non-empty");
    if (key.size() > AuthenticatedMap::kMaxKeyBytes) {
        throw Error(Errc::KeyTooLong, "trie key of " + std::to_string(key.size()) + " bytes exceeds 64");
    }
}

void walk(const NodePtr& node, Nibbles& prefix,
          const std::function<void(const Bytes&, const Bytes&)>& fn) {
    if (!node) return;
    switch (node->kind) {
        case Kind::Leaf: {
            auto mark = prefix.size();
            prefix.insert(prefix.end(), node->path.begin(), node->path.end());
            fn(from_nibbles(prefix), *node->value);
            prefix.resize(mark);
            break;
        }
        case Kind::Extension: {
            auto mark = prefix.size();
            prefix.insert(prefix.end(), node->path.begin(), node->path.end());
            walk(node->child, prefix, fn);
            prefix.resize(mark);
            break;
        }
        case Kind::Branch:
            if (node->value) fn(from_nibbles(prefix), *node->value);
            for (std::uint8_t i = 0; i < 16; ++i) {
                prefix.push_back(i);
                walk(node->children[i], prefix, fn);
                prefix.pop_back();
            }
            break;
    }
}

bool valid_nibbles(const Bytes& path) {
    return std::all_of(path.begin(), path.end(), [](std::uint8_t n) { return n < 16; });
}

}  // namespace
}  // namespace trie_detail

using namespace trie_detail;

const Digest& AuthenticatedMap::empty_root() {
    static const Digest root = [] {
        const std::uint8_t zero = 0x00;
        return sha256(ByteView(&zero, 1));
    }();
    return root;
}

AuthenticatedMap AuthenticatedMap::put(ByteView key, ByteView value) const {
    check_key(key);
    auto nibbles = to_nibbles(key);
    bool added = false;
    AuthenticatedMap next;
    next.root_ = insert(root_, nibbles, 0, Bytes(value.begin(), value.end()), added);
    next.size_ = size_ + (added ? 1 : 0);
    return next;
}

std::optional<Bytes> AuthenticatedMap::get(ByteView key) const {
    if (key.empty() || key.size() > kMaxKeyBytes) return std::nullopt;
    auto nibbles = to_nibbles(key);
    std::size_t off = 0;
    const Node* node = root_.get();
    while (node) {
        switch (node->kind) {
            case Kind::Leaf:
                if (nibbles.size() - off == node->path.size() &&
                    std::equal(node->path.begin(), node->path.end(), nibbles.begin() + static_cast<std::ptrdiff_t>(off))) {
                    return node->value;
                }
                return std::nullopt;
            case Kind::Extension:
                if (nibbles.size() - off < node->path.size() ||
                    !std::equal(node->path.begin(), node->path.end(), nibbles.begin() + static_cast<std::ptrdiff_t>(off))) {
                    return std::nullopt;
                }
                off += node->path.size();
                node = node->child.get();
                break;
            case Kind::Branch:
                if (off == nibbles.size()) return node->value;
                node = node->children[nibbles[off++]].get();
                break;
        }
    }
    return std::nullopt;
}

Digest AuthenticatedMap::root_hash() const { return root_ ? root_->hash : empty_root(); }

InclusionProof AuthenticatedMap::prove(ByteView key) const {
    if (!get(key)) throw Error(Errc::AbsentKey, "no entry for key " + to_hex(key));
    auto nibbles = to_nibbles(key);
    InclusionProof proof;
    std::size_t off = 0;
    const Node* node = root_.get();
    while (node) {
        proof.path.push_back({static_cast<std::uint32_t>(off), node->encoding});
        switch (node->kind) {
            case Kind::Leaf:
                return proof;
            case Kind::Extension:
                off += node->path.size();
                node = node->child.get();
                break;
            case Kind::Branch:
                if (off == nibbles.size()) return proof;
                node = node->children[nibbles[off++]].get();
                break;
        }
    }
    return proof;
}

void AuthenticatedMap::for_each(const std::function<void(const Bytes&, const Bytes&)>& fn) const {
    Nibbles prefix;
    walk(root_, prefix, fn);
}

bool verify_proof(const Digest& root, ByteView key, ByteView value, const InclusionProof& proof) {
    if (key.empty() || key.size() > AuthenticatedMap::kMaxKeyBytes) return false;
    auto nibbles = to_nibbles(key);
    Digest expected = root;
    std::size_t off = 0;
    auto equals_value = [&](const Bytes& stored) {
        return stored.size() == value.size() && std::equal(stored.begin(), stored.end(), value.begin());
    };
    try {
        for (std::size_t i = 0; i < proof.path.size(); ++i) {
            const auto& step = proof.path[i];
            const bool last = i + 1 == proof.path.size();
            if (step.depth != off || sha256(step.node) != expected) return false;
            Record rec = parse_record(step.node);
            switch (static_cast<Kind>(rec.tag)) {
                case Kind::Leaf: {
                    if (!last || rec.fields.size() != 2 || !valid_nibbles(rec.fields[0])) return false;
                    const auto& path = rec.fields[0];
                    if (nibbles.size() - off != path.size() ||
                        !std::equal(path.begin(), path.end(), nibbles.begin() + static_cast<std::ptrdiff_t>(off))) {
                        return false;
                    }
                    return equals_value(rec.fields[1]);
                }
                case Kind::Extension: {
                    if (last || rec.fields.size() != 2 || !valid_nibbles(rec.fields[0])) return false;
                    const auto& path = rec.fields[0];
                    if (path.empty() || nibbles.size() - off < path.size() ||
                        !std::equal(path.begin(), path.end(), nibbles.begin() + static_cast<std::ptrdiff_t>(off))) {
                        return false;
                    }
                    off += path.size();
                    expected = Digest::from_view(rec.fields[1]);
                    break;
                }
                case Kind::Branch: {
                    if (rec.fields.size() != 16 && rec.fields.size() != 17) return false;
                    if (off == nibbles.size()) {
                        return last && rec.fields.size() == 17 && equals_value(rec.fields[16]);
                    }
                    if (last) return false;
                    const auto& slot = rec.fields[nibbles[off++]];
                    if (slot.size() != Digest::size) return false;
                    expected = Digest::from_view(slot);
                    break;
                }
                default:
                    return false;
            }
        }
    } catch (const Error&) {
        return false;
    }
    return false;
}

}  // namespace flowledger
