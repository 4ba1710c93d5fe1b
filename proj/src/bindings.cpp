#include "gpps/run.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gpps;

namespace {

Grid grid_from(const std::vector<double>& extents, const std::vector<int>& points)
{
    if (extents.size() != points.size() || extents.empty() || extents.size() > 3)
        throw std::invalid_argument("extents and points must both have 1, 2 or 3 entries");
    std::array<double, 3> L{1.0, 1.0, 1.0};
    std::array<int, 3> N{1, 1, 1};
    for (std::size_t a = 0; a < extents.size(); ++a) {
        L[a] = extents[a];
        N[a] = points[a];
    }
    return make_grid(static_cast<int>(extents.size()), L, N);
}

py::array field_to_numpy(const ComplexField& f)
{
    std::vector<py::ssize_t> shape;
    for (int a = 0; a < f.grid.dim; ++a)
        shape.push_back(f.grid.points[a]);
    py::array_t<std::complex<double>> out(shape);
    std::copy(f.v.begin(), f.v.end(), out.mutable_data());
    return out;
}

ComplexField numpy_to_field(const py::array& arr, const Grid& g)
{
    auto a = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>::ensure(
        arr);
    if (!a)
        throw std::invalid_argument("field must be convertible to a complex array");
    if (a.ndim() != g.dim)
        throw std::invalid_argument("field rank does not match the grid dimension");
    for (int d = 0; d < g.dim; ++d)
        if (a.shape(d) != g.points[d])
            throw std::invalid_argument("field shape does not match the grid points");
    ComplexField f = zeros_complex(g);
    std::copy(a.data(), a.data() + f.v.size(), f.v.begin());
    return f;
}

ModelParams model_from(const std::string& kind, double beta, double lambda, double eps,
                       std::array<double, 3> axis, const std::string& potential,
                       std::array<double, 3> gamma, double lattice_amplitude,
                       std::array<double, 3> lattice_wavenumber)
{
    ModelParams p;
    p.kind = parse_model_kind(kind);
    p.beta = beta;
    p.lambda = lambda;
    p.eps = eps;
    p.axis = DipoleAxis(axis[0], axis[1], axis[2]);
    if (potential == "zero")
        p.potential.kind = PotentialSpec::Kind::Zero;
    else if (potential == "harmonic")
        p.potential.kind = PotentialSpec::Kind::Harmonic;
    else if (potential == "lattice")
        p.potential.kind = PotentialSpec::Kind::HarmonicPlusLattice;
    else
        throw std::invalid_argument("unknown potential kind '" + potential + "'");
    p.potential.gamma = gamma;
    p.potential.lattice_amplitude = lattice_amplitude;
    p.potential.lattice_wavenumber = lattice_wavenumber;
    validate(p);
    return p;
}

py::dict energy_dict(const EnergyBreakdown& e)
{
    py::dict d;
    d["total"] = e.total;
    d["kinetic"] = e.kinetic;
    d["potential"] = e.potential;
    d["contact"] = e.contact;
    d["dipolar"] = e.dipolar;
    return d;
}

} // namespace

PYBIND11_MODULE(_gpps, m)
{
    m.doc() = "dipolar Gross-Pitaevskii-Poisson toolbox";
    m.attr("__version__") = version_string;

    py::register_exception<numerical_alarm>(m, "NumericalAlarm", PyExc_RuntimeError);

    py::class_<Grid>(m, "Grid")
        .def(py::init(&grid_from), py::arg("extents"), py::arg("points"))
        .def_readonly("dim", &Grid::dim)
        .def_property_readonly("extents",
                               [](const Grid& g) {
                                   return std::vector<double>(g.half_extent.begin(),
                                                              g.half_extent.begin() + g.dim);
                               })
        .def_property_readonly("points",
                               [](const Grid& g) {
                                   return std::vector<int>(g.points.begin(),
                                                           g.points.begin() + g.dim);
                               })
        .def("coords", [](const Grid& g, int axis) {
            if (axis < 0 || axis >= g.dim)
                throw std::invalid_argument("axis out of range");
            py::array_t<double> x(g.points[axis]);
            for (int i = 0; i < g.points[axis]; ++i)
                x.mutable_data()[i] = g.coord(axis, i);
            return x;
        });

    py::class_<ModelParams>(m, "Model")
        .def(py::init(&model_from), py::arg("kind"), py::arg("beta") = 0.0, py::arg("lam") = 0.0,
             py::arg("eps") = 1.0, py::arg("axis") = std::array<double, 3>{0.0, 0.0, 1.0},
             py::arg("potential") = "harmonic",
             py::arg("gamma") = std::array<double, 3>{1.0, 1.0, 1.0},
             py::arg("lattice_amplitude") = 0.0,
             py::arg("lattice_wavenumber") = std::array<double, 3>{1.0, 1.0, 1.0})
        .def_property_readonly("kind",
                               [](const ModelParams& p) { return model_name(p.kind); })
        .def_readonly("beta", &ModelParams::beta)
        .def_property_readonly("lam", [](const ModelParams& p) { return p.lambda; })
        .def_readonly("eps", &ModelParams::eps)
        .def_property_readonly("axis",
                               [](const ModelParams& p) {
                                   return std::array<double, 3>{p.axis.n1, p.axis.n2, p.axis.n3};
                               })
        .def_property_readonly("dimension",
                               [](const ModelParams& p) { return model_dimension(p.kind); })
        .def("coefficient_audit", [](const ModelParams& p) { return coefficient_audit(p); });

    m.def("gaussian_init",
          [](const Grid& g, std::array<double, 3> width) {
              return field_to_numpy(gaussian_init(g, width));
          },
          py::arg("grid"), py::arg("width") = std::array<double, 3>{1.0, 1.0, 1.0});

    m.def("energy",
          [](const ModelParams& p, const py::array& psi, const Grid& g) {
              return energy_dict(energy(p, numpy_to_field(psi, g)));
          },
          py::arg("model"), py::arg("psi"), py::arg("grid"));

    m.def("groundstate",
          [](const ModelParams& p, const Grid& g, double tol, int max_iterations) {
              GradientFlowOptions opt;
              opt.tol = tol;
              opt.max_iterations = max_iterations;
              GroundStateResult r;
              {
                  py::gil_scoped_release nogil;
                  r = minimize_gradient_flow(p, gaussian_init(g, {1.0, 1.0, 1.0}), opt);
              }
              py::dict d;
              d["phi"] = field_to_numpy(to_complex(r.phi));
              d["energy"] = energy_dict(r.energy);
              d["iterations"] = r.iterations;
              d["residual"] = r.residual;
              d["converged"] = r.converged;
              d["nonexistence_suspected"] = r.nonexistence_suspected;
              return d;
          },
          py::arg("model"), py::arg("grid"), py::arg("tol") = 1e-8,
          py::arg("max_iterations") = 200000);

    m.def("evolve",
          [](const ModelParams& p, const py::array& psi0, const Grid& g, double T, double dt,
             int record_every) {
              const ComplexField f0 = numpy_to_field(psi0, g);
              EvolveResult r;
              {
                  py::gil_scoped_release nogil;
                  r = evolve(p, f0, T, dt, record_every);
              }
              py::dict d;
              d["t"] = r.series.t;
              d["mass"] = r.series.mass;
              std::vector<double> etot;
              for (const auto& e : r.series.energy)
                  etot.push_back(e.total);
              d["energy_total"] = etot;
              d["sigma_v"] = r.series.sigma_v;
              d["peak_density"] = r.series.peak_density;
              d["final"] = field_to_numpy(r.final_state);
              d["status"] = evolve_status_name(r.status);
              d["t_reached"] = r.t_reached;
              return d;
          },
          py::arg("model"), py::arg("psi0"), py::arg("grid"), py::arg("T"), py::arg("dt"),
          py::arg("record_every") = 10);

    m.def("estimate_cb",
          [](double tol) {
              GNConstant c;
              {
                  py::gil_scoped_release nogil;
                  c = estimate_cb(tol);
              }
              py::dict d;
              d["value"] = c.value;
              d["quotient"] = c.quotient;
              d["shooting"] = c.shooting;
              d["spread"] = c.spread;
              return d;
          },
          py::arg("tol") = 1e-3);

    m.def("classify_regime",
          [](const ModelParams& p, double cb) {
              if (cb <= 0.0) {
                  py::gil_scoped_release nogil;
                  cb = estimate_cb().value;
              }
              const RegimeVerdict v = classify_regime(p, cb);
              py::dict d;
              d["outcome"] = regime_outcome_name(v.outcome);
              d["matched_condition"] = v.matched_condition;
              d["margin"] = v.margin;
              d["cb_used"] = v.cb_used;
              return d;
          },
          py::arg("model"), py::arg("cb") = 0.0);

    m.def("blowup_criterion",
          [](const ModelParams& p, const py::array& psi0, const Grid& g, double cb) {
              const ComplexField f0 = numpy_to_field(psi0, g);
              if (cb <= 0.0) {
                  py::gil_scoped_release nogil;
                  cb = estimate_cb().value;
              }
              const BlowupVerdict v = blowup_criterion(p, f0, cb);
              py::dict d;
              d["verdict"] = blowup_case_name(v.verdict);
              d["assumption"] = v.assumption;
              d["bound"] = std::array<double, 3>{v.a, v.b, v.c};
              d["detail"] = v.detail;
              return d;
          },
          py::arg("model"), py::arg("psi0"), py::arg("grid"), py::arg("cb") = 0.0);

    m.def("symbol_u2d", [](double xi, double eps) { return symbol_u2d(xi, eps); },
          py::arg("xi"), py::arg("eps"));
    m.def("symbol_u1d", [](double xi, double eps) { return symbol_u1d(xi, eps); },
          py::arg("xi"), py::arg("eps"));
    m.def("symbol_u2d_quadrature",
          [](double xi, double eps) { return symbol_u2d_quadrature(xi, eps); }, py::arg("xi"),
          py::arg("eps"));
    m.def("symbol_u1d_quadrature",
          [](double xi, double eps) { return symbol_u1d_quadrature(xi, eps); }, py::arg("xi"),
          py::arg("eps"));

    m.def("reduction_study",
          [](const std::string& confinement, double beta, double lambda,
             const std::vector<double>& eps_list, double T, const std::vector<double>& extents,
             const std::vector<int>& points, int records) {
              ReductionStudy cfg;
              if (confinement == "pancake")
                  cfg.confinement = ConfinementCase::Pancake;
              else if (confinement == "cigar")
                  cfg.confinement = ConfinementCase::Cigar;
              else
                  throw std::invalid_argument("confinement must be 'pancake' or 'cigar'");
              cfg.beta = beta;
              cfg.lambda = lambda;
              if (!eps_list.empty())
                  cfg.eps_list = eps_list;
              cfg.T = T;
              cfg.records = records;
              if (!extents.empty())
                  cfg.grid3 = grid_from(extents, points);
              StudyOutcome out;
              {
                  py::gil_scoped_release nogil;
                  out = run_reduction_study(cfg);
              }
              py::dict d;
              py::list runs;
              for (const auto& r : out.runs) {
                  py::dict e;
                  e["eps"] = r.eps;
                  e["t"] = r.errors.times;
                  e["err_total"] = r.errors.total;
                  e["err_transverse"] = r.errors.transverse;
                  e["err_projected"] = r.errors.projected;
                  runs.append(e);
              }
              d["runs"] = runs;
              py::list fits;
              for (std::size_t q = 0; q < out.fit_times.size(); ++q) {
                  py::dict f;
                  f["t"] = out.fit_times[q];
                  f["slope"] = out.fits[q].slope;
                  f["residual"] = out.fits[q].residual;
                  fits.append(f);
              }
              d["fits"] = fits;
              return d;
          },
          py::arg("confinement"), py::arg("beta") = 1.0, py::arg("lam") = 0.5,
          py::arg("eps_list") = std::vector<double>{}, py::arg("T") = 1.0,
          py::arg("extents") = std::vector<double>{}, py::arg("points") = std::vector<int>{},
          py::arg("records") = 8);

    m.def("run_config",
          [](const std::string& config_text, const std::string& out_dir) {
              RunConfig cfg = parse_config(config_text);
              if (!out_dir.empty())
                  cfg.out_dir = out_dir;
              RunResult r;
              {
                  py::gil_scoped_release nogil;
                  r = run(cfg);
              }
              py::dict d;
              d["exit_code"] = r.exit_code;
              d["manifest"] = r.manifest_path;
              d["message"] = r.message;
              return d;
          },
          py::arg("config_text"), py::arg("out_dir") = "",
          "Parse an ini config and execute its task, as the command line tool does.");
}
