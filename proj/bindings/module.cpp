#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lowrank/experiment.hpp"

namespace py = pybind11;
using namespace lowrank;

namespace {

Tensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    std::vector<int> dims;
    for (py::ssize_t k = 0; k < a.ndim(); ++k) dims.push_back(static_cast<int>(a.shape(k)));
    std::vector<double> data(a.data(), a.data() + a.size());
    return Tensor::from_data(std::move(dims), std::move(data));
}

py::array_t<double> array_from_tensor(const Tensor& u) {
    std::vector<py::ssize_t> shape(u.dims().begin(), u.dims().end());
    py::array_t<double> out(shape);
    std::copy(u.data(), u.data() + u.size(), out.mutable_data());
    return out;
}

Splitting splitting_for(const Tensor& u, const std::vector<int>& modes) {
    return Splitting(modes, u.order());
}

py::dict trace_to_dict(const IterationTrace& trace) {
    py::dict out;
    py::list errors, residuals, ranks, bounds, overlaps, q_steps, labels;
    for (const auto& book : trace.books) labels.append(book.t.label());
    for (const auto& rec : trace.steps) {
        errors.append(rec.error);
        residuals.append(rec.residual);
        ranks.append(rec.ranks);
        bounds.append(rec.rank_bounds);
        if (trace.eigen_columns) {
            overlaps.append(rec.overlap);
            q_steps.append(rec.q_step);
        }
    }
    out["splittings"] = labels;
    out["errors"] = errors;
    out["residuals"] = residuals;
    out["ranks"] = ranks;
    out["rank_bounds"] = bounds;
    if (trace.eigen_columns) {
        out["overlap"] = overlaps;
        out["q_step"] = q_steps;
    }
    out["fixed_point"] = array_from_tensor(trace.fixed_point);
    return out;
}

std::string run_experiment_json(const std::string& config_text, const std::string& out_dir,
                                int jobs) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(config_text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::config_parse, std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg = ExperimentConfig::from_json(doc);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    require(!(cfg.rhs_spec.is_object() && cfg.rhs_spec.contains("chunks")), errc::config_invalid,
            "chunked right-hand sides run through the CLI");

    const bool write_files = !out_dir.empty();
    auto finish = [&](const auto& report) {
        if (write_files) report.write(cfg.out_dir);
        return report.to_json().dump();
    };
    switch (cfg.mode) {
        case ExperimentMode::linear: return finish(run_linear_experiment(cfg));
        case ExperimentMode::eigen: return finish(run_eigen_experiment(cfg));
        case ExperimentMode::commuting: return finish(run_commuting_experiment(cfg));
        case ExperimentMode::spectrum: return finish(run_spectrum_experiment(cfg));
        case ExperimentMode::d_sweep: return finish(run_d_sweep(cfg, cfg.d_list, jobs));
        case ExperimentMode::two_step: return finish(run_two_step_experiment(cfg, jobs));
    }
    fail(errc::config_invalid, "unhandled experiment mode");
}

} // namespace

PYBIND11_MODULE(_lowrank_lab, m) {
    m.doc() = "Singular-value decay measurements and certified tail bounds for "
              "Kronecker-structured linear systems and eigenvalue problems.";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    // tensor diagnostics ------------------------------------------------------
    m.def(
        "unfold",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t) {
            const Tensor u = tensor_from_array(a);
            return Eigen::MatrixXd(unfold(u, splitting_for(u, t)));
        },
        py::arg("tensor"), py::arg("t"),
        "Matricization with the 1-based modes in t as rows.");

    m.def(
        "singular_values",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t) {
            const Tensor u = tensor_from_array(a);
            return singular_spectrum(u, splitting_for(u, t)).values;
        },
        py::arg("tensor"), py::arg("t"));

    m.def(
        "t_rank",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t, double eps_rank) {
            const Tensor u = tensor_from_array(a);
            return t_rank(u, splitting_for(u, t), eps_rank);
        },
        py::arg("tensor"), py::arg("t"), py::arg("eps_rank") = kDefaultEpsRank);

    m.def(
        "tail_error",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t, long long r) {
            const Tensor u = tensor_from_array(a);
            return tail_error(u, splitting_for(u, t), r);
        },
        py::arg("tensor"), py::arg("t"), py::arg("r"));

    m.def(
        "truncate",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t, long long r) {
            const Tensor u = tensor_from_array(a);
            return array_from_tensor(truncate(u, splitting_for(u, t), r));
        },
        py::arg("tensor"), py::arg("t"), py::arg("r"));

    m.def(
        "von_neumann_entropy",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t) {
            const Tensor u = tensor_from_array(a);
            const EntropyPair pair = von_neumann_entropy(u, splitting_for(u, t));
            return py::make_tuple(pair.paper_signed, pair.conventional);
        },
        py::arg("tensor"), py::arg("t"));

    m.def(
        "overlap_theta",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<int>& t) {
            const Tensor u = tensor_from_array(a);
            return overlap_theta(u, splitting_for(u, t));
        },
        py::arg("tensor"), py::arg("t"));

    m.def(
        "tt_aggregate_error",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const std::vector<long long>& ranks) {
            return tt_aggregate_error(tensor_from_array(a), ranks);
        },
        py::arg("tensor"), py::arg("ranks"));

    // operators ---------------------------------------------------------------
    py::class_<KronSumOperator>(m, "KronSumOperator")
        .def_static(
            "from_factors",
            [](const std::vector<std::vector<Eigen::MatrixXd>>& terms, bool symmetric) {
                require(!terms.empty(), errc::construction, "need at least one term");
                std::vector<int> dims;
                for (const auto& f : terms.front()) dims.push_back(static_cast<int>(f.rows()));
                std::vector<ElementaryOp> ops;
                for (const auto& factors : terms)
                    ops.push_back(ElementaryOp::from_factors(factors));
                return KronSumOperator::from_terms(dims, std::move(ops), symmetric);
            },
            py::arg("terms"), py::arg("symmetric") = false,
            "Build from a list of terms, each a list of per-mode square matrices.")
        .def_property_readonly("dims", &KronSumOperator::dims)
        .def_property_readonly("n_terms",
                               [](const KronSumOperator& op) { return op.terms().size(); })
        .def("apply",
             [](const KronSumOperator& op,
                const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
                 return array_from_tensor(op.apply(tensor_from_array(a)));
             })
        .def("assemble_dense",
             [](const KronSumOperator& op) { return Eigen::MatrixXd(op.assemble_dense()); })
        .def(
            "t_rank",
            [](const KronSumOperator& op, const std::vector<int>& t, double eps_rank) {
                return op.t_rank(Splitting(t, static_cast<int>(op.dims().size())), eps_rank);
            },
            py::arg("t"), py::arg("eps_rank") = kDefaultEpsRank)
        .def("spectral_interval", &KronSumOperator::spectral_interval)
        .def_property_readonly("analytic_bounds", [](const KronSumOperator& op) -> py::object {
            if (!op.analytic_bounds()) return py::none();
            return py::make_tuple(op.analytic_bounds()->gamma, op.analytic_bounds()->Gamma);
        });

    m.def(
        "build_model",
        [](const std::string& kind, const std::vector<int>& dims, const py::kwargs& kwargs) {
            ModelParams params;
            params.dims = dims;
            if (kwargs.contains("A")) params.a = kwargs["A"].cast<Eigen::MatrixXd>();
            if (kwargs.contains("C")) params.c = kwargs["C"].cast<Eigen::MatrixXd>();
            if (kwargs.contains("A_factors"))
                params.a_factors = kwargs["A_factors"].cast<std::vector<Eigen::MatrixXd>>();
            if (kwargs.contains("B_factors"))
                params.b_factors = kwargs["B_factors"].cast<std::vector<Eigen::MatrixXd>>();
            if (kwargs.contains("C_factors"))
                params.c_factors = kwargs["C_factors"].cast<std::vector<Eigen::MatrixXd>>();
            if (kwargs.contains("gamma_A")) params.gamma_a = kwargs["gamma_A"].cast<double>();
            if (kwargs.contains("Gamma_A")) params.gamma_a_upper = kwargs["Gamma_A"].cast<double>();
            if (kwargs.contains("Gamma_B")) params.gamma_b_upper = kwargs["Gamma_B"].cast<double>();
            if (kwargs.contains("Gamma_C")) params.gamma_c_upper = kwargs["Gamma_C"].cast<double>();
            if (kwargs.contains("seed")) params.seed = kwargs["seed"].cast<std::uint64_t>();
            return build_model(model_kind_from_string(kind), params);
        },
        py::arg("kind"), py::arg("dims"),
        "Model operators: laplace_like, nn_interaction, laplace_plus_nn, lyapunov, "
        "generalized_lyapunov, diagonal_test.");

    // solvers and runs ----------------------------------------------------------
    m.def(
        "dense_solve",
        [](const KronSumOperator& op,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
            return array_from_tensor(dense_solve(op, tensor_from_array(b)));
        },
        py::arg("op"), py::arg("b"));

    m.def(
        "richardson_run",
        [](const KronSumOperator& op,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& b,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& u0, int n_steps,
           const std::vector<std::vector<int>>& splittings, double eps_rank) {
            RhsTensor rhs;
            rhs.b = tensor_from_array(b);
            std::vector<Splitting> splits;
            for (const auto& modes : splittings)
                splits.emplace_back(modes, static_cast<int>(op.dims().size()));
            const SpectralData sd = SpectralData::from_operator(op);
            py::dict out = trace_to_dict(
                richardson_run(op, rhs, tensor_from_array(u0), sd, n_steps, splits, eps_rank));
            out["gamma"] = sd.gamma;
            out["Gamma"] = sd.Gamma;
            out["kappa"] = sd.kappa;
            out["alpha"] = sd.alpha;
            out["q"] = sd.q;
            return out;
        },
        py::arg("op"), py::arg("b"), py::arg("u0"), py::arg("n_steps"), py::arg("splittings"),
        py::arg("eps_rank") = kDefaultEpsRank);

    m.def(
        "smallest_pair",
        [](const KronSumOperator& op) {
            auto [lambda1, lambda2, top, u_star] = smallest_pair(op);
            return py::make_tuple(lambda1, lambda2, top, array_from_tensor(u_star));
        },
        py::arg("op"));

    m.def(
        "shifted_richardson_run",
        [](const KronSumOperator& op,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& u0, int n_steps,
           const std::vector<std::vector<int>>& splittings, double eps_rank) {
            const EigenSetup setup = EigenSetup::from_operator(op);
            std::vector<Splitting> splits;
            for (const auto& modes : splittings)
                splits.emplace_back(modes, static_cast<int>(op.dims().size()));
            py::dict out = trace_to_dict(
                shifted_richardson_run(setup, op, tensor_from_array(u0), n_steps, splits, eps_rank));
            out["lambda1"] = setup.lambda1;
            out["lambda2"] = setup.lambda2;
            out["Gamma"] = setup.Gamma;
            out["delta"] = setup.delta;
            out["Delta"] = setup.Delta;
            out["beta"] = setup.beta;
            out["q"] = setup.q;
            out["u_star"] = array_from_tensor(setup.u_star);
            return out;
        },
        py::arg("op"), py::arg("u0"), py::arg("n_steps"), py::arg("splittings"),
        py::arg("eps_rank") = kDefaultEpsRank);

    m.def(
        "rank_one_start",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u_star,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& u_hat,
           const std::vector<int>& t) {
            const Tensor star = tensor_from_array(u_star);
            return array_from_tensor(
                rank_one_start(star, tensor_from_array(u_hat), splitting_for(star, t)));
        },
        py::arg("u_star"), py::arg("u_hat0"), py::arg("t"));

    m.def(
        "pi1_upper_bounds",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u_star,
           const std::vector<int>& t) {
            const Tensor star = tensor_from_array(u_star);
            const Pi1Bounds bounds = pi1_upper_bounds(star, splitting_for(star, t));
            return py::make_tuple(bounds.via_theta, bounds.naive, bounds.constructive);
        },
        py::arg("u_star"), py::arg("t"));

    m.def(
        "two_step_rank_probe",
        [](const KronSumOperator& op, const std::vector<int>& t, int samples, std::uint64_t seed,
           double eps_rank) {
            const EigenSetup setup = EigenSetup::from_operator(op);
            const TwoStepProbe probe = two_step_rank_probe(
                op, setup, Splitting(t, static_cast<int>(op.dims().size())), samples, seed,
                eps_rank);
            py::dict out;
            out["max_one_step_factor"] = probe.max_one_step_factor;
            out["max_two_step_factor"] = probe.max_two_step_factor;
            out["samples"] = probe.samples;
            out["claimed_two_step_cap"] = TwoStepProbe::kClaimedTwoStepCap;
            out["naive_two_step_cap"] = TwoStepProbe::kNaiveTwoStepCap;
            return out;
        },
        py::arg("op"), py::arg("t"), py::arg("samples"), py::arg("seed"),
        py::arg("eps_rank") = kDefaultEpsRank);

    // closed-form bounds --------------------------------------------------------
    m.def("contraction_rate", &contraction_rate, py::arg("kappa"));
    m.def("decay_exponent", &decay_exponent, py::arg("q"), py::arg("R"));
    m.def("tail_bound_full", &tail_bound_full, py::arg("r"), py::arg("q"), py::arg("R"),
          py::arg("c"), py::arg("pi1"));
    m.def("tail_bound_algebraic", &tail_bound_algebraic, py::arg("r"), py::arg("q"), py::arg("R"),
          py::arg("c"), py::arg("pi1"));
    m.def("linear_tail_bound", &linear_tail_bound, py::arg("r"), py::arg("q"), py::arg("R"),
          py::arg("norm_u"));
    m.def("singular_value_sq_bound", &singular_value_sq_bound, py::arg("r"), py::arg("q"),
          py::arg("R"), py::arg("c"), py::arg("pi1"));
    m.def("commuting_rank_bound", &commuting_rank_bound, py::arg("n"), py::arg("r0"),
          py::arg("rb"));
    m.def("eigenvector_tail_bound", &eigenvector_tail_bound, py::arg("r"), py::arg("q"),
          py::arg("R"), py::arg("pi1"));
    m.def("eigenvector_tail_bound_via_overlap", &eigenvector_tail_bound_via_overlap, py::arg("r"),
          py::arg("q"), py::arg("R"), py::arg("norm_u"));
    m.def("overlap_lower_bound", &overlap_lower_bound, py::arg("q"), py::arg("R"));
    m.def("overlap_bound_exponent", &overlap_bound_exponent, py::arg("q"), py::arg("R"));

    // experiments ----------------------------------------------------------------
    m.def("run_experiment_json", &run_experiment_json, py::arg("config_text"),
          py::arg("out_dir") = std::string(), py::arg("jobs") = 1,
          "Run one experiment cell from a JSON config; returns the report as JSON text.");

    m.attr("__version__") = LOWRANK_LAB_VERSION;
}
