#include "gpps/io.hpp"

#include "gpps/kernels.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gpps {

namespace {

constexpr char snap_magic[8] = {'G', 'P', 'P', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t snap_version = 1;
constexpr std::uint32_t snap_dtype_c128 = 1;

std::string g17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_all(std::ofstream& os, const void* p, std::size_t n)
{
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

} // namespace

void write_snapshot(const std::string& path, const ComplexField& f)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    write_all(os, snap_magic, 8);
    const std::uint32_t head[4] = {snap_version, snap_dtype_c128,
                                   static_cast<std::uint32_t>(f.grid.dim), 0};
    write_all(os, head, sizeof head);
    std::uint64_t pts[3];
    for (int a = 0; a < 3; ++a)
        pts[a] = static_cast<std::uint64_t>(f.grid.points[a]);
    write_all(os, pts, sizeof pts);
    write_all(os, f.grid.half_extent.data(), 3 * sizeof(double));
    write_all(os, f.v.data(), f.v.size() * sizeof(cdouble));
    if (!os)
        throw std::runtime_error("short write: " + path);
}

ComplexField read_snapshot(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, snap_magic, 8) != 0)
        throw std::runtime_error("not a snapshot file: " + path);
    std::uint32_t head[4];
    is.read(reinterpret_cast<char*>(head), sizeof head);
    if (!is || head[0] != snap_version || head[1] != snap_dtype_c128)
        throw std::runtime_error("unsupported snapshot header: " + path);
    std::uint64_t pts[3];
    is.read(reinterpret_cast<char*>(pts), sizeof pts);
    std::array<double, 3> ext{};
    is.read(reinterpret_cast<char*>(ext.data()), 3 * sizeof(double));
    if (!is)
        throw std::runtime_error("truncated snapshot header: " + path);
    const Grid g = make_grid(static_cast<int>(head[2]), ext,
                             {static_cast<int>(pts[0]), static_cast<int>(pts[1]),
                              static_cast<int>(pts[2])});
    ComplexField f = zeros_complex(g);
    is.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(cdouble)));
    if (!is)
        throw std::runtime_error("truncated snapshot payload: " + path);
    return f;
}

void write_observables_csv(const std::string& path, const ObservableSeries& s)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "t, mass, E_total, E_kin, E_pot, E_contact, E_dip, sigmaV, dsigmaV, "
          "virial_residual, peak_density\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const EnergyBreakdown& e = s.energy[i];
        os << g17(s.t[i]) << ", " << g17(s.mass[i]) << ", " << g17(e.total) << ", "
           << g17(e.kinetic) << ", " << g17(e.potential) << ", " << g17(e.contact) << ", "
           << g17(e.dipolar) << ", " << g17(s.sigma_v[i]) << ", " << g17(s.dsigma_v[i]) << ", "
           << g17(s.virial_residual[i]) << ", " << g17(s.peak_density[i]) << "\n";
    }
}

void write_iterations_csv(const std::string& path,
                          const std::vector<std::array<double, 4>>& history)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "iter, tau, E_total, residual\n";
    for (const auto& row : history)
        os << g17(row[0]) << ", " << g17(row[1]) << ", " << g17(row[2]) << ", " << g17(row[3])
           << "\n";
}

void write_reduction_error_csv(const std::string& path, const ErrorSeries& e)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "t, err_total, err_transverse, err_projected, leak_grad\n";
    for (std::size_t i = 0; i < e.times.size(); ++i)
        os << g17(e.times[i]) << ", " << g17(e.total[i]) << ", " << g17(e.transverse[i]) << ", "
           << g17(e.projected[i]) << ", " << g17(e.leak_grad[i]) << "\n";
}

void write_kernel_check_csv(const std::string& path, const std::vector<KernelCheckRow>& rows)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "kernel, xi, eps, closed_form, quadrature, rel_err\n";
    for (const auto& r : rows)
        os << r.kernel << ", " << g17(r.xi) << ", " << g17(r.eps) << ", " << g17(r.closed_form)
           << ", " << g17(r.quadrature) << ", " << g17(r.rel_err) << "\n";
}

std::vector<KernelCheckRow> kernel_check_rows()
{
    std::vector<KernelCheckRow> rows;
    const int n = 20;
    auto node = [&](int i) { return std::pow(10.0, -2.0 + 4.0 * i / (n - 1)); };
    for (const char* kernel : {"u2d", "u1d"})
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                KernelCheckRow r;
                r.kernel = kernel;
                r.xi = node(i);
                r.eps = node(j);
                if (r.kernel == "u2d") {
                    r.closed_form = symbol_u2d(r.xi, r.eps);
                    r.quadrature = symbol_u2d_quadrature(r.xi, r.eps);
                } else {
                    r.closed_form = symbol_u1d(r.xi, r.eps);
                    r.quadrature = symbol_u1d_quadrature(r.xi, r.eps);
                }
                r.rel_err = std::fabs(r.closed_form - r.quadrature) /
                            std::max(std::fabs(r.quadrature), 1e-300);
                rows.push_back(r);
            }
    return rows;
}

ConfigText::ConfigText(const std::string& text)
{
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos)
            line = line.substr(0, cut);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            sections_[section]; // a section may be empty
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (!sections_[section].emplace(key, Entry{trim(line.substr(eq + 1)), false}).second)
            throw std::invalid_argument("config: duplicate key '" + section + "." + key + "'");
    }
}

ConfigText::Entry* ConfigText::find(const std::string& section, const std::string& key)
{
    auto s = sections_.find(section);
    if (s == sections_.end())
        return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigText::has(const std::string& section, const std::string& key) const
{
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

bool ConfigText::has_section(const std::string& section) const
{
    return sections_.count(section) > 0;
}

std::string ConfigText::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback)
{
    Entry* e = find(section, key);
    if (!e)
        return fallback;
    e->read = true;
    return e->value;
}

double ConfigText::get_double(const std::string& section, const std::string& key, double fallback)
{
    Entry* e = find(section, key);
    if (!e)
        return fallback;
    e->read = true;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e->value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != e->value.size())
        throw std::invalid_argument("config: '" + section + "." + key + "' is not a number: " +
                                    e->value);
    return v;
}

long ConfigText::get_long(const std::string& section, const std::string& key, long fallback)
{
    Entry* e = find(section, key);
    if (!e)
        return fallback;
    e->read = true;
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(e->value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != e->value.size())
        throw std::invalid_argument("config: '" + section + "." + key + "' is not an integer: " +
                                    e->value);
    return v;
}

bool ConfigText::get_bool(const std::string& section, const std::string& key, bool fallback)
{
    Entry* e = find(section, key);
    if (!e)
        return fallback;
    e->read = true;
    if (e->value == "true" || e->value == "1" || e->value == "yes")
        return true;
    if (e->value == "false" || e->value == "0" || e->value == "no")
        return false;
    throw std::invalid_argument("config: '" + section + "." + key + "' is not a boolean: " +
                                e->value);
}

std::vector<double> ConfigText::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback)
{
    Entry* e = find(section, key);
    if (!e)
        return fallback;
    e->read = true;
    std::vector<double> out;
    std::istringstream is(e->value);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size())
            throw std::invalid_argument("config: '" + section + "." + key +
                                        "' has a non-numeric entry: " + item);
        out.push_back(v);
    }
    if (out.empty())
        throw std::invalid_argument("config: '" + section + "." + key + "' is an empty list");
    return out;
}

std::vector<std::string> ConfigText::unread_keys() const
{
    std::vector<std::string> out;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, e] : keys)
            if (!e.read)
                out.push_back(sec.empty() ? key : sec + "." + key);
    return out;
}

std::string task_name(Task t)
{
    switch (t) {
    case Task::GroundState: return "groundstate";
    case Task::Evolve: return "evolve";
    case Task::Regime: return "regime";
    case Task::Reduce: return "reduce";
    case Task::KernelCheck: return "kernel-check";
    }
    return "?";
}

namespace {

Task parse_task(const std::string& s)
{
    if (s == "groundstate")
        return Task::GroundState;
    if (s == "evolve")
        return Task::Evolve;
    if (s == "regime")
        return Task::Regime;
    if (s == "reduce")
        return Task::Reduce;
    if (s == "kernel-check")
        return Task::KernelCheck;
    throw std::invalid_argument("config: unknown task '" + s + "'");
}

std::array<double, 3> triple(ConfigText& c, const std::string& sec, const std::string& key,
                             std::array<double, 3> fallback)
{
    if (!c.has(sec, key))
        return fallback;
    const auto v = c.get_list(sec, key, {});
    if (v.size() != 3)
        throw std::invalid_argument("config: '" + sec + "." + key + "' needs three values");
    return {v[0], v[1], v[2]};
}

} // namespace

ModelKind parse_model_kind(const std::string& s)
{
    if (s == "gpps3d")
        return ModelKind::Gpps3D;
    if (s == "quasi2dI" || s == "quasi2d_I")
        return ModelKind::Quasi2DI;
    if (s == "quasi2dII" || s == "quasi2d_II")
        return ModelKind::Quasi2DII;
    if (s == "quasi1d")
        return ModelKind::Quasi1D;
    if (s == "limit2d")
        return ModelKind::Limit2D;
    if (s == "limit1d")
        return ModelKind::Limit1D;
    throw std::invalid_argument("unknown model kind '" + s + "'");
}

RunConfig parse_config(const std::string& text)
{
    ConfigText c(text);
    RunConfig cfg;

    cfg.task = parse_task(c.get_string("run", "task", ""));
    cfg.out_dir = c.get_string("run", "out", cfg.out_dir);
    cfg.seed = static_cast<std::uint64_t>(c.get_long("run", "seed", 1));

    // [model]
    cfg.model.kind = parse_model_kind(c.get_string("model", "kind", "quasi2dI"));
    cfg.model.beta = c.get_double("model", "beta", 0.0);
    cfg.model.lambda = c.get_double("model", "lambda", 0.0);
    cfg.model.eps = c.get_double("model", "eps", 1.0);
    {
        const auto n = triple(c, "model", "axis", {0.0, 0.0, 1.0});
        const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        if (std::fabs(len - 1.0) >= 1e-6)
            throw std::invalid_argument("config: dipole axis must be unit length (|n| = " +
                                        g17(len) + ")");
        if (len != 1.0)
            std::cerr << "note: dipole axis renormalized (|n| - 1 = " << g17(len - 1.0) << ")\n";
        cfg.model.axis = DipoleAxis(n[0], n[1], n[2]);
    }

    // [potential]
    {
        const std::string kind = c.get_string("potential", "kind", "harmonic");
        if (kind == "zero")
            cfg.model.potential.kind = PotentialSpec::Kind::Zero;
        else if (kind == "harmonic")
            cfg.model.potential.kind = PotentialSpec::Kind::Harmonic;
        else if (kind == "lattice")
            cfg.model.potential.kind = PotentialSpec::Kind::HarmonicPlusLattice;
        else
            throw std::invalid_argument("config: unknown potential kind '" + kind + "'");
        cfg.model.potential.gamma = triple(c, "potential", "gamma", {1.0, 1.0, 1.0});
        cfg.model.potential.lattice_amplitude =
            c.get_double("potential", "lattice_amplitude", 0.0);
        cfg.model.potential.lattice_wavenumber =
            triple(c, "potential", "lattice_wavenumber", {1.0, 1.0, 1.0});
    }

    // [grid]
    {
        const int dim = cfg.task == Task::Reduce ? 3 : model_dimension(cfg.model.kind);
        std::array<double, 3> def_ext{8.0, 8.0, 8.0};
        std::array<double, 3> def_pts{128, 128, 128};
        for (int a = dim; a < 3; ++a) {
            def_ext[a] = 0.0;
            def_pts[a] = 1;
        }
        const auto ext = triple(c, "grid", "extent", def_ext);
        const auto pts = triple(c, "grid", "points", def_pts);
        std::array<int, 3> ip{1, 1, 1};
        for (int a = 0; a < dim; ++a) {
            ip[a] = static_cast<int>(pts[a]);
            if (ip[a] != pts[a] || ip[a] < 2)
                throw std::invalid_argument("config: grid points must be integers >= 2");
        }
        std::array<double, 3> e{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a)
            e[a] = ext[a];
        cfg.grid = make_grid(dim, e, ip);
    }

    // task sections
    cfg.ground.options.tau = c.get_double("groundstate", "tau", 0.0);
    cfg.ground.options.tol = c.get_double("groundstate", "tol", 1e-8);
    cfg.ground.options.max_iterations =
        static_cast<int>(c.get_long("groundstate", "max_iter", 200000));
    cfg.ground.options.record_every = static_cast<int>(c.get_long("groundstate", "record_every", 50));
    cfg.ground.init = c.get_string("groundstate", "init", "gaussian");
    if (cfg.ground.init != "gaussian" && cfg.ground.init != "random")
        throw std::invalid_argument("config: groundstate.init must be gaussian or random");
    cfg.ground.width = triple(c, "groundstate", "width", {1.0, 1.0, 1.0});

    cfg.evolve.T = c.get_double("evolve", "T", 1.0);
    cfg.evolve.dt = c.get_double("evolve", "dt", 1e-3);
    cfg.evolve.record_every = static_cast<int>(c.get_long("evolve", "record_every", 10));
    cfg.evolve.blowup_check = c.get_bool("evolve", "blowup_check", false);
    cfg.evolve.init = c.get_string("evolve", "init", "gaussian");
    cfg.evolve.width = triple(c, "evolve", "width", {1.0, 1.0, 1.0});
    cfg.evolve.init_file = c.get_string("evolve", "init_file", "");
    if (cfg.evolve.init != "gaussian" && cfg.evolve.init != "random" && cfg.evolve.init != "file")
        throw std::invalid_argument("config: evolve.init must be gaussian, random or file");
    if ((cfg.evolve.init == "file") != !cfg.evolve.init_file.empty())
        throw std::invalid_argument("config: evolve.init_file goes with init = file");

    cfg.regime.probe = c.get_bool("regime", "probe", false);
    cfg.regime.deltas = c.get_list("regime", "deltas", cfg.regime.deltas);
    cfg.regime.kappa = c.get_double("regime", "kappa", cfg.regime.kappa);

    {
        ReductionStudy& st = cfg.reduce.study;
        const std::string cs = c.get_string("reduce", "case", "pancake");
        if (cs == "pancake")
            st.confinement = ConfinementCase::Pancake;
        else if (cs == "cigar")
            st.confinement = ConfinementCase::Cigar;
        else
            throw std::invalid_argument("config: reduce.case must be pancake or cigar");
        st.beta = cfg.model.beta;
        st.lambda = cfg.model.lambda;
        st.axis = cfg.model.axis;
        st.potential = cfg.model.potential;
        st.eps_list = c.get_list("reduce", "eps_list", st.eps_list);
        st.T = c.get_double("reduce", "T", st.T);
        st.records = static_cast<int>(c.get_long("reduce", "records", st.records));
        st.hermite_modes = static_cast<int>(c.get_long("reduce", "hermite_modes", st.hermite_modes));
        st.nonlocal_pad = static_cast<int>(c.get_long("reduce", "nonlocal_pad", st.nonlocal_pad));
        if (c.has("grid", "extent") || c.has("grid", "points"))
            st.grid3 = cfg.grid;
    }

    const auto leftovers = c.unread_keys();
    if (!leftovers.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const auto& k : leftovers)
            msg += " " + k;
        throw std::invalid_argument(msg);
    }

    if (cfg.task == Task::GroundState || cfg.task == Task::Evolve) {
        validate(cfg.model);
        if (cfg.grid.dim != model_dimension(cfg.model.kind))
            throw std::invalid_argument("config: grid dimension does not match the model");
    }
    if (cfg.task == Task::Regime)
        validate(cfg.model);
    return cfg;
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("cannot open config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string config_echo_json(const RunConfig& cfg)
{
    nlohmann::json j;
    j["run"] = {{"task", task_name(cfg.task)}, {"out", cfg.out_dir}, {"seed", cfg.seed}};
    j["model"] = {{"kind", model_name(cfg.model.kind)},
                  {"beta", cfg.model.beta},
                  {"lambda", cfg.model.lambda},
                  {"eps", cfg.model.eps},
                  {"axis", {cfg.model.axis.n1, cfg.model.axis.n2, cfg.model.axis.n3}}};
    const PotentialSpec& v = cfg.model.potential;
    j["potential"] = {
        {"kind", v.kind == PotentialSpec::Kind::Zero ? "zero"
                 : v.kind == PotentialSpec::Kind::Harmonic ? "harmonic"
                 : v.kind == PotentialSpec::Kind::HarmonicPlusLattice ? "lattice" : "table"},
        {"gamma", v.gamma},
        {"lattice_amplitude", v.lattice_amplitude},
        {"lattice_wavenumber", v.lattice_wavenumber}};
    j["grid"] = {{"extent", cfg.grid.half_extent}, {"points", cfg.grid.points}};
    switch (cfg.task) {
    case Task::GroundState:
        j["groundstate"] = {{"tau", cfg.ground.options.tau},
                            {"tol", cfg.ground.options.tol},
                            {"max_iter", cfg.ground.options.max_iterations},
                            {"record_every", cfg.ground.options.record_every},
                            {"init", cfg.ground.init},
                            {"width", cfg.ground.width}};
        break;
    case Task::Evolve:
        j["evolve"] = {{"T", cfg.evolve.T},
                       {"dt", cfg.evolve.dt},
                       {"record_every", cfg.evolve.record_every},
                       {"blowup_check", cfg.evolve.blowup_check},
                       {"init", cfg.evolve.init},
                       {"width", cfg.evolve.width},
                       {"init_file", cfg.evolve.init_file}};
        break;
    case Task::Regime:
        j["regime"] = {{"probe", cfg.regime.probe},
                       {"deltas", cfg.regime.deltas},
                       {"kappa", cfg.regime.kappa}};
        break;
    case Task::Reduce:
        j["reduce"] = {{"case", confinement_name(cfg.reduce.study.confinement)},
                       {"eps_list", cfg.reduce.study.eps_list},
                       {"T", cfg.reduce.study.T},
                       {"records", cfg.reduce.study.records},
                       {"hermite_modes", cfg.reduce.study.hermite_modes},
                       {"nonlocal_pad", cfg.reduce.study.nonlocal_pad}};
        break;
    case Task::KernelCheck:
        break;
    }
    return j.dump(2);
}

} // namespace gpps
