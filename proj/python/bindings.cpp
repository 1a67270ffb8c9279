#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entacc/json_io.hpp"

namespace py = pybind11;
using namespace entacc;

namespace {

// Python objects cross the boundary as JSON text.
Json to_json(const py::object& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return Json::parse(text);
}

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

OptimizerConfig config_of(const py::object& cfg) {
    if (cfg.is_none()) return {};
    auto c = config_from_json(to_json(cfg));
    c.validate();
    return c;
}

PureState state_of(const py::object& spec) {
    if (py::isinstance<py::str>(spec)) {
        const auto name = spec.cast<std::string>();
        if (name.rfind("ghz", 0) == 0 && name.size() > 3) return ghz_state(std::stoul(name.substr(3)));
        return make_named_state(name);
    }
    return state_from_json(to_json(spec));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiparty entanglement accounting core";

    m.def("binary_entropy", &binary_entropy, py::arg("x"));
    m.def("von_neumann_entropy", py::overload_cast<const Matrix&>(&von_neumann_entropy), py::arg("rho"));
    m.def("relative_entropy", py::overload_cast<const Matrix&, const Matrix&>(&relative_entropy), py::arg("rho"),
          py::arg("sigma"));

    m.def(
        "state",
        [](const std::string& name, std::vector<double> params, std::vector<std::string> labels) {
            return to_python(state_to_json(make_named_state(name, params, labels)));
        },
        py::arg("name"), py::arg("params") = std::vector<double>{}, py::arg("labels") = std::vector<std::string>{});

    m.def(
        "reduced_matrix",
        [](const py::object& state, const std::vector<std::string>& keep) {
            return partial_trace(state_of(state), keep).matrix();
        },
        py::arg("state"), py::arg("keep"));

    m.def(
        "entropies",
        [](const py::object& state) {
            const auto s = state_of(state);
            py::dict out;
            for (const auto& p : s.layout().parties()) out[py::str(p)] = von_neumann_entropy(partial_trace(s, {p}));
            return out;
        },
        py::arg("state"));

    m.def(
        "ree",
        [](const py::object& state, const std::string& partition, const py::object& config, bool with_model) {
            const auto part = Partition::parse(partition);
            const auto r = ree(partial_trace(state_of(state), part.parties()), part, config_of(config));
            auto j = ree_to_json(r);
            if (!with_model) j.erase("model");
            return to_python(j);
        },
        py::arg("state"), py::arg("partition"), py::arg("config") = py::none(), py::arg("with_model") = false);

    m.def(
        "run",
        [](const py::object& protocol, const std::vector<std::string>& splits, bool audit, const py::object& config) {
            const auto p = py::isinstance<py::str>(protocol) && protocol.cast<std::string>() == "ghz3_to_bc_singlet"
                               ? ghz3_to_bc_singlet()
                           : py::isinstance<py::str>(protocol) && protocol.cast<std::string>() == "two_singlets_to_ghz"
                               ? two_singlets_to_ghz()
                               : protocol_from_json(to_json(protocol));
            RunOptions o;
            o.ree_config = config_of(config);
            for (const auto& s : splits) o.splits.push_back(Partition::parse(s));
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(p, o);
            }
            Json out = {{"leaves", r.leaves.size()}, {"ledger", ledger_to_json(r.ledger)}};
            if (audit) {
                Json audits = Json::array();
                for (const auto& s : o.splits) audits.push_back(audit_to_json(audit_protocol(r.ledger, s)));
                out["audits"] = std::move(audits);
            }
            return to_python(out);
        },
        py::arg("protocol"), py::arg("splits") = std::vector<std::string>{}, py::arg("audit") = false,
        py::arg("config") = py::none());

    m.def(
        "random_protocol",
        [](const std::vector<std::string>& parties, int rounds, std::uint64_t seed) {
            return to_python(protocol_to_json(random_protocol(PartyLayout::qubits(parties), rounds, seed)));
        },
        py::arg("parties"), py::arg("rounds"), py::arg("seed"));

    m.def(
        "rates",
        [](const py::object& state, const py::object& config) {
            const auto profile = profile_of(state_of(state), config_of(config), state_of(state).layout().party_count() == 3);
            Json out = {{"profile", profile_to_json(profile)}, {"singlet_matching", matching_to_json(singlet_matching_lp(profile))}};
            if (profile.parties.size() == 3) out["solution"] = rates_to_json(solve_ghz_singlet_rates(profile));
            return to_python(out);
        },
        py::arg("state"), py::arg("config") = py::none());

    m.def(
        "singlet_matching",
        [](const std::vector<std::string>& parties, const std::vector<double>& entropies) {
            return to_python(matching_to_json(singlet_matching_lp(one_party_profile(parties, entropies))));
        },
        py::arg("parties"), py::arg("entropies"));

    m.def(
        "concentrate",
        [](double alpha2, int n) {
            const auto outcomes = concentrate_phi1(std::sqrt(alpha2), n);
            return to_python({{"outcomes", concentration_to_json(outcomes)}, {"expected_yield", expected_yield(outcomes)}});
        },
        py::arg("alpha2"), py::arg("n"));

    m.def("ghz_scan", [](int n, int k) { return to_python(ghz_scan_to_json(npartite_ghz_entanglement_scan(n, k))); },
          py::arg("n"), py::arg("k"));

    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
}
