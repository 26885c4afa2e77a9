#include "vfva/cli.hpp"
#include "vfva/elemprop.hpp"
#include "vfva/errors.hpp"
#include "vfva/expansion.hpp"
#include "vfva/scalars.hpp"
#include "vfva/valg.hpp"
#include "vfva/vmod.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;

namespace {

std::string check_structure(const std::string& config, const std::optional<long>& window,
                            const std::optional<long>& m_max)
{
    json j;
    try {
        j = json::parse(config);
    } catch (const json::exception& e) {
        throw vfva::ConfigError(std::string("malformed structure config: ") + e.what());
    }
    auto s = vfva::valg::structure_from_json(j);
    json out = json::array();
    for (const auto& r : vfva::valg::check_all(s, {window, m_max})) {
        out.push_back(vfva::valg::to_json(r));
    }
    return out.dump();
}

std::string borcherds(long k, bool unital)
{
    return vfva::valg::to_json(vfva::valg::borcherds_family(k, unital)).dump();
}

std::string prove(const std::string& which)
{
    using vfva::expansion::DeltaIdentity;
    if (which != "two-term" && which != "three-term") {
        throw vfva::ConfigError("unknown identity '" + which + "'");
    }
    auto trace = vfva::expansion::prove_identity(which == "three-term" ? DeltaIdentity::ThreeTerm
                                                                       : DeltaIdentity::TwoTerm);
    return vfva::expansion::to_json(trace).dump();
}

std::string run(const std::string& command, const std::vector<std::string>& inputs, std::uint64_t seed, long count)
{
    vfva::cli::RunConfig cfg;
    cfg.command = command;
    cfg.inputs = inputs;
    cfg.seed = seed;
    cfg.count = count;
    return vfva::cli::run_command(cfg).machine(cfg).dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Exact formal calculus and finite vertex-structure checks";

    py::register_exception<vfva::Error>(m, "VfvaError");

    m.def("binom", [](long n, long k) { return vfva::to_string(vfva::binom(n, k)); }, py::arg("n"), py::arg("k"));
    m.def("borcherds", &borcherds, py::arg("k"), py::arg("unital") = true);
    m.def("check_structure", &check_structure, py::arg("config"), py::arg("window") = std::nullopt,
          py::arg("m_max") = std::nullopt);
    m.def("prove_identity", &prove, py::arg("which"));
    m.def("run", &run, py::arg("command"), py::arg("inputs") = std::vector<std::string>{}, py::arg("seed") = 0,
          py::arg("count") = 100);
}
