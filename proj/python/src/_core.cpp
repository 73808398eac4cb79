#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flowledger/error.hpp"
#include "flowledger/harness.hpp"
#include "flowledger/product_flow.hpp"
#include "flowledger/store.hpp"
#include "flowledger/trie.hpp"

namespace py = pybind11;
using namespace flowledger;

namespace {

Bytes to_vec(const py::bytes& b) {
    std::string_view s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes to_py(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

class PyStore {
public:
    PyStore() : store_(std::make_unique<ContentStore>()) {}
    explicit PyStore(const std::filesystem::path& dir) : store_(std::make_unique<ContentStore>(dir)) {}
    std::string put(const py::bytes& content) { return store_->put(to_vec(content)).str(); }
    py::bytes get(const std::string& cid) const { return to_py(store_->get(Cid::parse(cid))); }
    bool contains(const std::string& cid) const { return store_->contains(Cid::parse(cid)); }
    std::vector<std::string> list() const {
        std::vector<std::string> out;
        for (const auto& c : store_->list()) out.push_back(c.str());
        return out;
    }
    std::size_t size() const { return store_->size(); }

private:
    std::unique_ptr<ContentStore> store_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Product-flow payment ledger";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "FlowledgerError", PyExc_RuntimeError);

    m.def("sha256_hex", [](const py::bytes& data) { return sha256(to_vec(data)).hex(); });
    m.def("cid_of", [](const py::bytes& data) { return Cid::of(to_vec(data)).str(); });
    m.def("valuation", &valuation, py::arg("delta_bp"), py::arg("value_cents"));

    py::class_<AuthenticatedMap>(m, "AuthenticatedMap")
        .def(py::init<>())
        .def("put", [](const AuthenticatedMap& self, const py::bytes& k, const py::bytes& v) { return self.put(to_vec(k), to_vec(v)); })
        .def("get",
             [](const AuthenticatedMap& self, const py::bytes& k) -> std::optional<py::bytes> {
                 auto v = self.get(to_vec(k));
                 if (!v) return std::nullopt;
                 return to_py(*v);
             })
        .def("root_hash", [](const AuthenticatedMap& self) { return self.root_hash().hex(); })
        .def("prove",
             [](const AuthenticatedMap& self, const py::bytes& k) {
                 std::vector<std::pair<std::uint32_t, py::bytes>> out;
                 for (const auto& s : self.prove(to_vec(k)).path) out.emplace_back(s.depth, to_py(s.node));
                 return out;
             })
        .def("__len__", &AuthenticatedMap::size);

    m.def("verify_proof",
          [](const std::string& root_hex, const py::bytes& k, const py::bytes& v,
             const std::vector<std::pair<std::uint32_t, py::bytes>>& steps) {
              InclusionProof proof;
              for (const auto& [d, node] : steps) proof.path.push_back({d, to_vec(node)});
              return verify_proof(Digest::from_hex(root_hex), to_vec(k), to_vec(v), proof);
          });

    py::class_<PyStore>(m, "ContentStore")
        .def(py::init<>())
        .def(py::init<const std::filesystem::path&>(), py::arg("directory"))
        .def("put", &PyStore::put)
        .def("get", &PyStore::get)
        .def("__contains__", &PyStore::contains)
        .def("list", &PyStore::list)
        .def("__len__", &PyStore::size);

    m.def(
        "generate_dataset",
        [](const std::string& profile, std::uint32_t elements, std::uint64_t seed, bool divisible) {
            return canonical_json(generate_dataset({profile_from_name(profile), elements, seed, divisible}));
        },
        py::arg("profile") = "uav", py::arg("elements") = 0, py::arg("seed") = 42, py::arg("divisible") = false,
        "Returns the dataset as canonical JSON text.");

    m.def(
        "run_scenario",
        [](const std::string& dataset_json, int scenario, const std::string& asset) {
            ContentStore store;
            auto project = Project::from_json(Json::parse(dataset_json), store);
            auto run = run_scenario(project, project.name(), GranularityConfig::from_scenario_id(scenario), store,
                                    {asset_from_name(asset), 0});
            return canonical_json(run.dataset.to_json());
        },
        py::arg("dataset_json"), py::arg("scenario"), py::arg("asset") = "native",
        "Runs one scenario in memory and returns its payment dataset as canonical JSON text.");

    m.def(
        "run_matrix",
        [](const std::vector<std::filesystem::path>& datasets, const std::filesystem::path& out, std::vector<int> scenarios,
           const std::string& asset) {
            MatrixOptions opt;
            opt.datasets = datasets;
            opt.out = out;
            if (!scenarios.empty()) opt.scenario_ids = std::move(scenarios);
            opt.asset = asset_from_name(asset);
            return canonical_json(run_matrix(opt).report);
        },
        py::arg("datasets"), py::arg("out"), py::arg("scenarios") = std::vector<int>{}, py::arg("asset") = "native",
        "Runs the scenario matrix into `out` and returns report.json text.");

    m.def(
        "verify_run",
        [](const std::filesystem::path& dir) {
            auto o = verify_run(dir);
            return py::make_tuple(o.ok, o.findings);
        },
        py::arg("directory"), "Returns (ok, findings).");

    m.def(
        "render_report",
        [](const std::string& report_json, const std::string& format) {
            auto doc = Json::parse(report_json);
            if (format == "csv") return render_report_csv(doc);
            if (format == "md") return render_report_markdown(doc);
            throw Error(Errc::Malformed, "format must be csv or md");
        },
        py::arg("report_json"), py::arg("format") = "md");
}
