#include "odo/config.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "odo/dynamics.hpp"
#include "odo/hierarchy.hpp"
#include "odo/observables.hpp"

namespace odo {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(path + "." + it.key(), "unknown key (strict mode)");
    }
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
    return j.at(key);
}

double need_number(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "must be a number");
    return v.get<double>();
}

int need_int(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "must be an integer");
    return v.get<int>();
}

std::string need_string(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "must be a string");
    return v.get<std::string>();
}

// row-major complex array [[re, im], ...] of length d*d
Matrix parse_matrix(const json& v, const std::string& path, int d) {
    if (!v.is_array() || static_cast<int>(v.size()) != d * d)
        throw ConfigError(path, "must be a row-major array of d*d [re, im] pairs");
    Matrix m(d, d);
    for (int i = 0; i < d * d; ++i) {
        const json& e = v.at(i);
        if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number())
            throw ConfigError(path, "entry " + std::to_string(i) + " is not [re, im]");
        m(i / d, i % d) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    return m;
}

SpectralDensityModel parse_bath_model(const json& j, const std::string& path) {
    const std::string type = need_string(j, path, "type");
    if (type == "drude_lorentz") {
        require_keys(j, path, {"type", "lambda", "gamma_c"});
        return SpectralDensityModel::drude(need_number(j, path, "lambda"),
                                           need_number(j, path, "gamma_c"));
    }
    if (type == "brownian_oscillator") {
        require_keys(j, path, {"type", "lambda", "omega0", "zeta"});
        return SpectralDensityModel::brownian(need_number(j, path, "lambda"),
                                              need_number(j, path, "omega0"),
                                              need_number(j, path, "zeta"));
    }
    if (type == "ohmic_exponential") {
        require_keys(j, path, {"type", "alpha", "s", "omega_c"});
        return SpectralDensityModel::ohmic(need_number(j, path, "alpha"),
                                           need_number(j, path, "s"),
                                           need_number(j, path, "omega_c"));
    }
    if (type == "discrete") {
        require_keys(j, path, {"type", "modes"});
        const json& ms = need(j, path, "modes");
        if (!ms.is_array() || ms.empty())
            throw ConfigError(path + ".modes", "must be a non-empty array of [c, omega]");
        std::vector<DiscreteMode> modes;
        for (const auto& e : ms) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(path + ".modes", "entries must be [c, omega]");
            modes.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        }
        return SpectralDensityModel::discrete(std::move(modes));
    }
    throw ConfigError(path + ".type", "unknown bath model '" + type + "'");
}

} // namespace

RunSpec parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("(root)", std::string("not valid JSON: ") + e.what());
    }
    require_keys(j, "(root)",
                 {"system", "bath", "decomposition", "hierarchy", "propagation",
                  "observables", "output"});
    RunSpec spec;

    // system
    const json& sys = need(j, "(root)", "system");
    require_keys(sys, "system", {"dim", "h_s", "rho0", "couplings"});
    const int d = need_int(sys, "system", "dim");
    if (d < 1) throw ConfigError("system.dim", "must be >= 1");
    const Matrix h_s = parse_matrix(need(sys, "system", "h_s"), "system.h_s", d);
    spec.rho0 = parse_matrix(need(sys, "system", "rho0"), "system.rho0", d);
    const json& cpl = need(sys, "system", "couplings");
    try {
        if (cpl.contains("q")) {
            require_keys(cpl, "system.couplings", {"q"});
            spec.system =
                SystemSpec::linear(h_s, parse_matrix(cpl.at("q"), "system.couplings.q", d));
        } else {
            require_keys(cpl, "system.couplings",
                         {"q0", "q1", "q2", "alpha0", "alpha1", "alpha2"});
            spec.system = SystemSpec::quadratic(
                h_s, parse_matrix(need(cpl, "system.couplings", "q0"),
                                  "system.couplings.q0", d),
                need_number(cpl, "system.couplings", "alpha0"),
                parse_matrix(need(cpl, "system.couplings", "q1"), "system.couplings.q1", d),
                need_number(cpl, "system.couplings", "alpha1"),
                parse_matrix(need(cpl, "system.couplings", "q2"), "system.couplings.q2", d),
                need_number(cpl, "system.couplings", "alpha2"));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("system", e.what());
    }

    // bath
    const json& bath = need(j, "(root)", "bath");
    require_keys(bath, "bath", {"model", "beta"});
    try {
        spec.bath_model = parse_bath_model(need(bath, "bath", "model"), "bath.model");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("bath.model", e.what());
    }
    const json& beta = need(bath, "bath", "beta");
    if (beta.is_string()) {
        if (beta.get<std::string>() != "inf")
            throw ConfigError("bath.beta", "must be a positive number or \"inf\"");
        spec.thermal = BathThermalState::zero_temperature();
    } else if (beta.is_number() && beta.get<double>() > 0) {
        spec.thermal = BathThermalState{beta.get<double>()};
    } else {
        throw ConfigError("bath.beta", "must be a positive number or \"inf\"");
    }

    // decomposition
    const json& dec = need(j, "(root)", "decomposition");
    require_keys(dec, "decomposition", {"method", "terms", "samples_file"});
    spec.decomposition_method = need_string(dec, "decomposition", "method");
    if (spec.decomposition_method != "matsubara" && spec.decomposition_method != "pade" &&
        spec.decomposition_method != "prony" && spec.decomposition_method != "discrete")
        throw ConfigError("decomposition.method",
                          "must be matsubara | pade | prony | discrete");
    spec.decomposition_terms = need_int(dec, "decomposition", "terms");
    if (dec.contains("samples_file"))
        spec.samples_file = need_string(dec, "decomposition", "samples_file");

    // hierarchy
    const json& hier = need(j, "(root)", "hierarchy");
    require_keys(hier, "hierarchy", {"side", "tier"});
    const std::string side = need_string(hier, "hierarchy", "side");
    if (side == "single")
        spec.side = Side::single;
    else if (side == "double")
        spec.side = Side::double_side;
    else
        throw ConfigError("hierarchy.side", "must be \"single\" or \"double\"");
    spec.tier = need_int(hier, "hierarchy", "tier");
    if (spec.tier < 0) throw ConfigError("hierarchy.tier", "must be >= 0");

    // propagation
    const json& prop = need(j, "(root)", "propagation");
    require_keys(prop, "propagation",
                 {"method", "dt", "rtol", "atol", "t_final", "snapshots"});
    const std::string method = need_string(prop, "propagation", "method");
    if (method == "rk4")
        spec.propagation.method = StepMethod::rk4;
    else if (method == "rk45")
        spec.propagation.method = StepMethod::rk45;
    else
        throw ConfigError("propagation.method", "must be \"rk4\" or \"rk45\"");
    spec.propagation.t_final = need_number(prop, "propagation", "t_final");
    if (spec.propagation.t_final <= 0)
        throw ConfigError("propagation.t_final", "must be > 0");
    if (spec.propagation.method == StepMethod::rk4) {
        spec.propagation.dt = need_number(prop, "propagation", "dt");
        if (spec.propagation.dt <= 0) throw ConfigError("propagation.dt", "must be > 0");
    } else {
        spec.propagation.rtol = need_number(prop, "propagation", "rtol");
        spec.propagation.atol = need_number(prop, "propagation", "atol");
        if (spec.propagation.rtol <= 0 || spec.propagation.atol <= 0)
            throw ConfigError("propagation.rtol", "tolerances must be > 0");
    }
    spec.snapshot_count = need_int(prop, "propagation", "snapshots");
    if (spec.snapshot_count < 2) throw ConfigError("propagation.snapshots", "must be >= 2");
    spec.propagation.snapshot_times.clear();
    for (int i = 0; i < spec.snapshot_count; ++i)
        spec.propagation.snapshot_times.push_back(
            spec.propagation.t_final * i / (spec.snapshot_count - 1));

    // observables
    const json& obs = need(j, "(root)", "observables");
    if (!obs.is_array() || obs.empty())
        throw ConfigError("observables", "must be a non-empty array of names");
    for (const auto& e : obs) {
        if (!e.is_string()) throw ConfigError("observables", "names must be strings");
        const std::string name = e.get<std::string>();
        bool ok = (name == "purity" || name == "moment1" || name == "moment2");
        if (name.size() == 5 && name.rfind("rho", 0) == 0 && std::isdigit(name[3]) &&
            std::isdigit(name[4])) {
            const int i = name[3] - '0', jx = name[4] - '0';
            ok = i < d && jx < d;
        }
        if (!ok)
            throw ConfigError("observables", "unknown observable '" + name + "'");
        spec.observables.push_back(name);
    }

    // output
    const json& outj = need(j, "(root)", "output");
    require_keys(outj, "output", {"dir"});
    spec.output_dir = need_string(outj, "output", "dir");
    return spec;
}

RunSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("(file)", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::vector<std::pair<double, Complex>> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("decomposition.samples_file", "cannot open '" + path + "'");
    std::vector<std::pair<double, Complex>> samples;
    std::string line;
    while (std::getline(in, line)) {
        for (char& c : line)
            if (c == ',' || c == ';') c = ' ';
        std::istringstream ls(line);
        double t, re, im;
        if (ls >> t >> re >> im) samples.push_back({t, Complex(re, im)});
    }
    if (samples.size() < 2)
        throw ConfigError("decomposition.samples_file",
                          "needs rows of t, Re C, Im C (header optional)");
    return samples;
}

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

BathDecomposition build_decomposition(const RunSpec& spec) {
    const auto& m = spec.decomposition_method;
    BathDecomposition dec;
    if (m == "discrete") {
        if (!spec.bath_model.is_discrete())
            throw ConfigError("decomposition.method",
                              "discrete decomposition needs a discrete bath model");
        dec = discrete_to_decomposition(spec.bath_model, spec.thermal);
    } else if (m == "matsubara") {
        dec = matsubara_decomposition(spec.bath_model, spec.thermal,
                                      spec.decomposition_terms);
    } else if (m == "pade") {
        dec = pade_decomposition(spec.bath_model, spec.thermal, spec.decomposition_terms);
    } else { // prony
        std::vector<double> ts;
        std::vector<Complex> cs;
        if (!spec.samples_file.empty()) {
            for (auto& [t, c] : read_samples_file(spec.samples_file)) {
                ts.push_back(t);
                cs.push_back(c);
            }
        } else {
            const int n = 256;
            const double horizon = spec.propagation.t_final;
            for (int i = 1; i <= n; ++i) {
                const double t = horizon * i / n;
                ts.push_back(t);
                cs.push_back(correlation_function(spec.bath_model, spec.thermal, t));
            }
        }
        dec = prony_fit(ts, cs, spec.decomposition_terms);
    }
    certify(dec, spec.bath_model, spec.thermal);
    return dec;
}

namespace {

struct ObservableWriter {
    const RunSpec& spec;
    const BathDecomposition& dec;

    Complex value(const std::string& name, const ODOState& state,
                  const Matrix& reduced) const {
        if (name == "purity") return (reduced * reduced).trace();
        if (name == "moment1")
            return correlated_moment(state, coupling(), 1, dec);
        if (name == "moment2")
            return correlated_moment(state, coupling(), 2, dec);
        const int i = name[3] - '0', j = name[4] - '0';
        return reduced(i, j);
    }
    const Matrix& coupling() const {
        return spec.system.has_quadratic ? spec.system.q1 : spec.system.q;
    }
};

int mapped_exit(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnpairedTerms& e) {
        std::cerr << "config error: " << e.what()
                  << " (single-side dynamics needs a paired decomposition)\n";
        return 2;
    } catch (const CapacityExceeded& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const DimensionBudget& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int run_simulation(const std::string& config_path) {
    return mapped_exit([&]() -> int {
        const auto t0 = std::chrono::steady_clock::now();
        RunSpec spec = parse_config_file(config_path);
        BathDecomposition dec = build_decomposition(spec);

        const bool wants_moments =
            std::any_of(spec.observables.begin(), spec.observables.end(),
                        [](const std::string& s) { return s.rfind("moment", 0) == 0; });
        if (wants_moments && spec.side != Side::single)
            throw ConfigError("observables",
                              "correlated moments need hierarchy.side = \"single\"");
        if (spec.system.has_quadratic && spec.side != Side::single)
            throw ConfigError("hierarchy.side", "quadratic coupling needs \"single\"");

        std::unique_ptr<RhsGenerator> gen;
        auto space = std::make_unique<HierarchySpace>(
            HierarchySpace::enumerate(dec.size(), spec.tier, spec.side));
        if (spec.side == Side::single) {
            dec = pairing_map(std::move(dec));
            if (spec.system.has_quadratic)
                gen = std::make_unique<QuadraticGenerator>(*space, spec.system, dec,
                                                           f_squared_mean(dec));
            else
                gen = std::make_unique<SingleSideGenerator>(*space, spec.system, dec);
        } else {
            if (dec.origin == DecompOrigin::discrete)
                gen = std::make_unique<DiscreteDoubleGenerator>(*space, spec.system, dec);
            else
                gen = std::make_unique<ContinuousDoubleGenerator>(*space, spec.system, dec);
        }
        if (const char* th = std::getenv("ODO_THREADS"))
            gen->set_threads(std::max(1, std::atoi(th)));

        ODOState st0 = gen->make_initial(spec.rho0);
        PropagationConfig pcfg = spec.propagation;
        pcfg.store_full = wants_moments;
        Trajectory traj = propagate(st0, *gen, pcfg);

        fs::create_directories(spec.output_dir);
        const std::string csv_path = spec.output_dir + "/trajectory.csv";
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw Error("cannot write " + csv_path);
        ObservableWriter ow{spec, dec};
        csv << "t";
        for (const auto& name : spec.observables) csv << "," << name << "_re,"
                                                       << name << "_im";
        csv << "\r\n";
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            const auto& snap = traj.snapshots[i];
            csv << format17(snap.t);
            for (const auto& name : spec.observables) {
                const ODOState& st = snap.full ? *snap.full : st0;
                const Complex v = ow.value(name, st, snap.reduced);
                csv << "," << format17(v.real()) << "," << format17(v.imag());
            }
            csv << "\r\n";
        }
        csv.close();

        json manifest;
        {
            std::ifstream cfg_in(config_path);
            std::stringstream ss;
            ss << cfg_in.rdbuf();
            manifest["config"] = json::parse(ss.str());
        }
        manifest["decomposition"] = json::parse(decomposition_to_json(dec));
        manifest["hierarchy"] = {{"side", spec.side == Side::single ? "single" : "double"},
                                 {"tier", spec.tier},
                                 {"terms", dec.size()},
                                 {"indices", space->size()}};
        manifest["max_trace_drift"] = traj.telemetry.max_trace_drift;
        manifest["max_herm_defect"] = traj.telemetry.max_herm_defect;
        manifest["steps"] = traj.telemetry.steps;
        manifest["rhs_evals"] = traj.telemetry.rhs_evals;
        manifest["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream mf(spec.output_dir + "/manifest.json");
        mf << manifest.dump(2) << "\n";
        return 0;
    });
}

int run_decompose(const std::string& config_path) {
    return mapped_exit([&]() -> int {
        RunSpec spec = parse_config_file(config_path);
        BathDecomposition dec = build_decomposition(spec);
        std::cout << decomposition_to_json(dec) << std::endl;
        return 0;
    });
}

} // namespace odo
