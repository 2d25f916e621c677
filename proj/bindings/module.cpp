#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "groklab/experiment.hpp"

namespace py = pybind11;
using namespace groklab;

namespace {

TrainConfig train_config_from_kwargs(const py::kwargs& kw) {
    TrainConfig c;
    for (auto item : kw) {
        const std::string k = py::str(item.first);
        if (k == "lr") c.lr = item.second.cast<double>();
        else if (k == "weight_decay") c.eta = item.second.cast<double>();
        else if (k == "decoupled_decay") c.decoupled_decay = item.second.cast<bool>();
        else if (k == "optimizer") c.opt = optimizer_from_string(item.second.cast<std::string>());
        else if (k == "beta1") c.beta1 = item.second.cast<double>();
        else if (k == "beta2") c.beta2 = item.second.cast<double>();
        else if (k == "eps") c.eps = item.second.cast<double>();
        else if (k == "epochs") c.epochs = item.second.cast<long>();
        else if (k == "eval_every") c.eval_every = item.second.cast<long>();
        else if (k == "seed") c.seed = item.second.cast<std::uint64_t>();
        else if (k == "acc_threshold") c.acc_threshold = item.second.cast<double>();
        else if (k == "full_telemetry") c.full_telemetry = item.second.cast<bool>();
        else if (k == "stop_when_generalized") c.stop_when_generalized = item.second.cast<bool>();
        else throw std::invalid_argument("unknown train option: " + k);
    }
    return c;
}

ActFun act_fun(const std::string& name, double a, double b) {
    ActFun f;
    f.kind = activation_from_string(name);
    f.a = a;
    f.b = b;
    return f;
}

py::dict runlog_to_dict(const RunLog& log) {
    py::dict d;
    const auto n = static_cast<py::ssize_t>(log.records.size());
    auto col = [&](auto get) {
        py::list v(n);
        for (py::ssize_t i = 0; i < n; ++i) v[i] = get(log.records[static_cast<std::size_t>(i)]);
        return v;
    };
    d["epoch"] = col([](const RunRecord& r) { return r.epoch; });
    d["train_loss"] = col([](const RunRecord& r) { return r.train_loss; });
    d["test_loss"] = col([](const RunRecord& r) { return r.test_loss; });
    d["train_acc"] = col([](const RunRecord& r) { return r.train_acc; });
    d["test_acc"] = col([](const RunRecord& r) { return r.test_acc; });
    d["gf_norm"] = col([](const RunRecord& r) { return r.gf_norm; });
    d["dW_cos"] = col([](const RunRecord& r) { return r.dw_cos; });
    d["dV_cos"] = col([](const RunRecord& r) { return r.dv_cos; });
    d["diag_ftf"] = col([](const RunRecord& r) { return r.diag_ftf; });
    d["diag_fft"] = col([](const RunRecord& r) { return r.diag_fft; });
    d["align_gf"] = col([](const RunRecord& r) { return r.align_gf; });
    d["first_train_epoch"] = log.first_train_epoch;
    d["first_test_epoch"] = log.first_test_epoch;
    d["grokking_delay"] = log.grokking_delay();
    d["diverged"] = log.diverged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "grokking dynamics laboratory on finite-group arithmetic tasks";

    py::register_exception<GroupError>(m, "GroupError");
    py::register_exception<TaskError>(m, "TaskError");
    py::register_exception<NumericError>(m, "NumericError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<Group, std::shared_ptr<Group>>(m, "Group")
        .def_readonly("order", &Group::order)
        .def_readonly("name", &Group::name)
        .def_readonly("abelian", &Group::abelian)
        .def_readonly("identity", &Group::identity)
        .def_property_readonly("cayley", [](const Group& g) { return g.cayley; })
        .def_property_readonly("inverse", [](const Group& g) { return g.inverse; })
        .def("op", &Group::op)
        .def("inv", &Group::inv)
        .def("regular_rep", &Group::regular_rep)
        .def("inverse_op", &Group::inverse_op)
        .def("__repr__", [](const Group& g) { return "<Group " + g.name + ">"; });

    m.def("make_cyclic", [](int M) { return std::make_shared<Group>(make_cyclic(M)); });
    m.def("make_dihedral", [](int n) { return std::make_shared<Group>(make_dihedral(n)); });
    m.def("make_product", [](const std::vector<int>& orders) {
        std::vector<Group> fs;
        for (int o : orders) fs.push_back(make_cyclic(o));
        return std::make_shared<Group>(make_product(fs));
    });
    m.def("load_cayley", [](const std::string& text) {
        std::istringstream ss(text);
        return std::make_shared<Group>(load_cayley(ss));
    });
    m.def("load_cayley_file",
          [](const std::string& path) { return std::make_shared<Group>(load_cayley_file(path)); });
    m.def("to_cayley_text", &to_cayley_text);
    m.def("validate_group", [](const std::shared_ptr<Group>& g) { validate_group(*g); });

    py::class_<Irrep>(m, "Irrep")
        .def_readonly("id", &Irrep::id)
        .def_readonly("dim", &Irrep::dim)
        .def_readonly("partner", &Irrep::partner)
        .def_readonly("label", &Irrep::label)
        .def_property_readonly("kind",
                               [](const Irrep& e) {
                                   switch (e.kind) {
                                       case Irrep::Trivial: return "trivial";
                                       case Irrep::Real: return "real";
                                       default: return "complex-pair";
                                   }
                               })
        .def("character", &Irrep::character)
        .def("matrix", [](const Irrep& e, int h) { return e.matrices.at(static_cast<std::size_t>(h)); });

    py::class_<IrrepCatalog>(m, "IrrepCatalog")
        .def_readonly("group_order", &IrrepCatalog::group_order)
        .def_readonly("entries", &IrrepCatalog::entries)
        .def("merged_ids", &IrrepCatalog::merged_ids)
        .def("__len__", [](const IrrepCatalog& c) { return c.entries.size(); });

    m.def("abelian_irreps", &abelian_irreps);
    m.def("dihedral_irreps", &dihedral_irreps);
    m.def("isotypic_projector",
          [](const IrrepCatalog& cat, int id, const std::shared_ptr<Group>& g) {
              return isotypic_projector(cat, id, *g);
          });
    m.def("catalog_for", [](const std::shared_ptr<Group>& g) { return catalog_for(*g); });

    py::class_<PairTable>(m, "PairTable")
        .def_property_readonly("group", [](const PairTable& t) { return t.group; })
        .def("__len__", [](const PairTable& t) { return t.rows.size(); })
        .def("row", [](const PairTable& t, std::size_t i) {
            const PairRow& r = t.rows.at(i);
            return py::make_tuple(r.h1, r.h2, r.h);
        });

    m.def("full_task", [](const std::shared_ptr<Group>& g) { return full_task(g); });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("train_idx", &Dataset::train_idx)
        .def_readonly("test_idx", &Dataset::test_idx)
        .def_readonly("keep_ratio", &Dataset::keep_ratio)
        .def_readonly("seed", &Dataset::seed);

    m.def(
        "split",
        [](const PairTable& t, double p, std::uint64_t seed, const std::string& mode) {
            return split(t, p, seed, mode == "bernoulli" ? SplitMode::Bernoulli : SplitMode::FixedCount);
        },
        py::arg("table"), py::arg("p"), py::arg("seed") = 0, py::arg("mode") = "fixed-count");
    m.def("encode", [](const Dataset& ds) {
        EncodedSplit e = encode(ds);
        return py::make_tuple(e.X_train, e.Y_train, e.X_test, e.Y_test);
    });

    m.def("solve_spd", &solve_spd);
    m.def("polar_factor", &polar_factor, py::arg("G"), py::arg("tol") = 1e-8, py::arg("max_iter") = 50);
    m.def("sym_eig_extremes", &sym_eig_extremes);
    m.def("power_spectrum", &power_spectrum);

    py::class_<ModelState>(m, "ModelState")
        .def_property_readonly("hidden", [](const ModelState& s) { return s.hidden; })
        .def_property_readonly("output", [](const ModelState& s) { return s.output; })
        .def_property_readonly("depth", &ModelState::depth)
        .def_property_readonly("width", &ModelState::width);

    m.def(
        "init_model",
        [](int input_dim, int width, int classes, int depth, const std::string& act, bool residual,
           double init_scale, std::uint64_t seed, double lin_a, double lin_b) {
            return init_model(input_dim, width, classes, depth, act_fun(act, lin_a, lin_b), residual,
                              init_scale, seed);
        },
        py::arg("input_dim"), py::arg("width"), py::arg("classes"), py::arg("depth") = 1,
        py::arg("activation") = "quadratic", py::arg("residual") = false, py::arg("init_scale") = 1.0,
        py::arg("seed") = 0, py::arg("lin_a") = 1.0, py::arg("lin_b") = 1.0);

    m.def("forward", [](const ModelState& s, const Mat& X) {
        ForwardPass f = forward(s, X);
        return py::make_tuple(f.F, f.yhat);
    });
    m.def("loss_and_grads", [](const ModelState& s, const Mat& X, const Mat& Y, double eta) {
        GradResult g = loss_and_grads(s, X, Y, eta);
        py::dict d;
        d["loss"] = g.loss;
        d["d_hidden"] = g.d_hidden;
        d["d_output"] = g.d_output;
        d["gf"] = g.gf;
        return d;
    });
    m.def("ridge_top", &ridge_top);

    m.def(
        "train",
        [](ModelState& s, const Dataset& ds, const py::kwargs& kw) {
            return runlog_to_dict(train(s, ds, train_config_from_kwargs(kw)));
        },
        py::arg("model"), py::arg("dataset"));
    m.def(
        "train_arrays",
        [](ModelState& s, const Mat& Xtr, const Mat& Ytr, const Mat& Xte, const Mat& Yte,
           const py::kwargs& kw) {
            return runlog_to_dict(train(s, Xtr, Ytr, Xte, Yte, train_config_from_kwargs(kw)));
        },
        py::arg("model"), py::arg("X_train"), py::arg("Y_train"), py::arg("X_test"), py::arg("Y_test"));

    py::class_<EnergyTask>(m, "EnergyTask");
    m.def(
        "energy_task",
        [](const PairTable& t, const std::string& act, double a, double b) {
            return energy_task(t, act_fun(act, a, b));
        },
        py::arg("table"), py::arg("activation") = "quadratic", py::arg("lin_a") = 1.0,
        py::arg("lin_b") = 1.0);
    m.def(
        "single_target_energy_task",
        [](const std::shared_ptr<Group>& g, int target, const Vec& weights, const std::string& act) {
            return energy_task(single_target_task(g, target, weights), act_fun(act, 1, 1));
        },
        py::arg("group"), py::arg("target"), py::arg("weights"), py::arg("activation") = "quadratic");
    m.def(
        "modulated_task",
        [](const PairTable& t, const IrrepCatalog& cat, const std::vector<int>& suppressed,
           const std::string& act) { return modulated_task(t, act_fun(act, 1, 1), cat, suppressed); },
        py::arg("table"), py::arg("catalog"), py::arg("suppressed"), py::arg("activation") = "quadratic");

    m.def("energy", &energy);
    m.def("energy_grad", &energy_grad);

    py::class_<FlatnessResult>(m, "FlatnessResult")
        .def_readonly("lambda_min_abs", &FlatnessResult::lambda_min_abs)
        .def_readonly("lambda_max", &FlatnessResult::lambda_max)
        .def_readonly("lambda_max_abs", &FlatnessResult::lambda_max_abs);

    py::class_<AscentResult>(m, "AscentResult")
        .def_readonly("w", &AscentResult::w)
        .def_readonly("energy", &AscentResult::energy)
        .def_readonly("steps", &AscentResult::steps)
        .def_readonly("grad_norm", &AscentResult::grad_norm)
        .def_readonly("converged", &AscentResult::converged)
        .def_readonly("classified", &AscentResult::classified)
        .def_readonly("label", &AscentResult::label)
        .def_readonly("label_text", &AscentResult::label_text)
        .def_readonly("c_max", &AscentResult::c_max)
        .def_readonly("c_profile", &AscentResult::c_profile)
        .def_readonly("sign", &AscentResult::sign)
        .def_readonly("struct_residual", &AscentResult::struct_residual)
        .def_readonly("theory_energy", &AscentResult::theory_energy)
        .def_readonly("flatness", &AscentResult::flatness);

    m.def(
        "ascend",
        [](const Vec& w0, const EnergyTask& task, double lr, long max_steps, double tol) {
            AscendConfig cfg;
            cfg.lr = lr;
            cfg.max_steps = max_steps;
            cfg.tol = tol;
            return ascend(w0, task, cfg);
        },
        py::arg("w0"), py::arg("task"), py::arg("lr") = 0.1, py::arg("max_steps") = 20000,
        py::arg("tol") = 1e-8);
    m.def("classify_maximum",
          [](AscentResult& r, const IrrepCatalog& cat, const std::shared_ptr<Group>& g) {
              classify_maximum(r, cat, *g);
              return r;
          });
    m.def("flatness", &flatness, py::arg("w"), py::arg("task"), py::arg("step") = 1e-4);

    py::class_<MemorizationProfile>(m, "MemorizationProfile")
        .def_readonly("focused", &MemorizationProfile::focused)
        .def_readonly("s", &MemorizationProfile::s)
        .def_readonly("lambda_", &MemorizationProfile::lambda);

    m.def(
        "memorization_profile",
        [](const Vec& p, const std::string& act) { return memorization_profile(p, act_fun(act, 1, 1)); },
        py::arg("weights"), py::arg("activation"));

    py::class_<VerifyReport>(m, "VerifyReport")
        .def_readonly("check", &VerifyReport::check)
        .def_readonly("pass_", &VerifyReport::pass)
        .def_readonly("gating", &VerifyReport::gating)
        .def_readonly("stats", &VerifyReport::stats)
        .def_readonly("seconds", &VerifyReport::seconds)
        .def("to_json", &VerifyReport::to_json);

    m.def("run_verify", &run_verify, py::arg("suite") = "all", py::arg("seed") = 0, py::arg("workers") = 0);
    m.def("verify_suite_names", &verify_suite_names);
    m.def("boundary_fit", &boundary_fit);
}
