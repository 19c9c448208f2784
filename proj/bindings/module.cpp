#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "resdiff/config.hpp"
#include "resdiff/dataset.hpp"
#include "resdiff/denoiser.hpp"
#include "resdiff/diffusion.hpp"
#include "resdiff/e2e_stub.hpp"
#include "resdiff/experiment.hpp"
#include "resdiff/metrics.hpp"
#include "resdiff/rng.hpp"
#include "resdiff/sampler.hpp"
#include "resdiff/schedule.hpp"
#include "resdiff/selfcheck.hpp"
#include "resdiff/tensor_io.hpp"

namespace py = pybind11;

namespace {

using namespace resdiff;

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const DoubleArray& arr) {
    std::vector<std::size_t> shape(static_cast<std::size_t>(arr.ndim()));
    for (py::ssize_t i = 0; i < arr.ndim(); ++i) {
        shape[static_cast<std::size_t>(i)] = static_cast<std::size_t>(arr.shape(i));
    }
    std::vector<double> data(arr.data(), arr.data() + arr.size());
    return Tensor(std::move(shape), std::move(data));
}

py::array_t<double> to_array(const Tensor& t) {
    py::array_t<double> arr(t.shape());
    std::copy(t.data().begin(), t.data().end(), arr.mutable_data());
    return arr;
}

py::dict summary_dict(const ExperimentSummary& s) {
    py::dict d;
    d["run_dir"] = s.run_dir.string();
    d["iou_stub_mean"] = s.iou_stub_mean;
    d["iou_diffusion_mean"] = s.iou_diffusion_mean;
    d["mse_stub_mean"] = s.mse_stub_mean;
    d["mse_diffusion_mean"] = s.mse_diffusion_mean;
    d["iou_delta"] = py::make_tuple(s.iou_delta.mean, s.iou_delta.lo, s.iou_delta.hi);
    d["mse_delta"] = py::make_tuple(s.mse_delta.mean, s.mse_delta.lo, s.mse_delta.hi);
    d["gap_already_zero"] = s.gap_already_zero;
    d["train_seconds"] = s.train_seconds;
    d["sample_seconds"] = s.sample_seconds;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "residual-shifted diffusion core";

    py::class_<Schedule>(m, "Schedule")
        .def_readonly("steps", &Schedule::steps)
        .def_readonly("t_prime", &Schedule::t_prime)
        .def_readonly("beta", &Schedule::beta)
        .def_readonly("alpha", &Schedule::alpha)
        .def_readonly("alpha_bar", &Schedule::alpha_bar)
        .def_readonly("sqrt_alpha_bar", &Schedule::sqrt_alpha_bar)
        .def_readonly("tilde_beta", &Schedule::tilde_beta);
    m.def("build_schedule", &build_schedule, py::arg("steps"));
    m.def("acceleration_bias", &acceleration_bias, py::arg("schedule"));
    m.def("resnoise_coeff", &resnoise_coeff, py::arg("t"), py::arg("schedule"));

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &Rng::uniform)
        .def("uniform_int", &Rng::uniform_int, py::arg("n"))
        .def("gaussian",
             [](Rng& rng, const std::vector<std::size_t>& shape) {
                 return to_array(gaussian(rng, shape));
             },
             py::arg("shape"))
        .def("child", &Rng::child, py::arg("index"));

    m.def("residual",
          [](const DoubleArray& x_hat0, const DoubleArray& x0) {
              return to_array(residual(to_tensor(x_hat0), to_tensor(x0)));
          },
          py::arg("x_hat0"), py::arg("x0"));
    m.def("q_sample_step",
          [](const DoubleArray& x_prev, const DoubleArray& r, int t, const DoubleArray& eps,
             const Schedule& s) {
              return to_array(q_sample_step(to_tensor(x_prev), to_tensor(r), t, to_tensor(eps), s));
          },
          py::arg("x_prev"), py::arg("r"), py::arg("t"), py::arg("eps"), py::arg("schedule"));
    m.def("q_sample_closed",
          [](const DoubleArray& x0, const DoubleArray& r, int t, const DoubleArray& eps,
             const Schedule& s) {
              const ForwardSample fwd = q_sample_closed(to_tensor(x0), to_tensor(r), t, to_tensor(eps), s);
              return py::make_tuple(to_array(fwd.x_t), to_array(fwd.resnoise));
          },
          py::arg("x0"), py::arg("r"), py::arg("t"), py::arg("eps"), py::arg("schedule"),
          "returns (x_t, resnoise target)");
    m.def("q_sample_simplified",
          [](const DoubleArray& x0, const DoubleArray& x_hat0, int t, const DoubleArray& eps,
             const Schedule& s) {
              return to_array(q_sample_simplified(to_tensor(x0), to_tensor(x_hat0), t, to_tensor(eps), s));
          },
          py::arg("x0"), py::arg("x_hat0"), py::arg("t"), py::arg("eps"), py::arg("schedule"));
    m.def("resnoise_target",
          [](const DoubleArray& eps, const DoubleArray& r, int t, const Schedule& s) {
              return to_array(resnoise_target(to_tensor(eps), to_tensor(r), t, s));
          },
          py::arg("eps"), py::arg("r"), py::arg("t"), py::arg("schedule"));
    m.def("posterior_mean",
          [](const DoubleArray& x_t, const DoubleArray& x0, const DoubleArray& r, int t,
             const Schedule& s) {
              return to_array(posterior_mean(to_tensor(x_t), to_tensor(x0), to_tensor(r), t, s));
          },
          py::arg("x_t"), py::arg("x0"), py::arg("r"), py::arg("t"), py::arg("schedule"));
    m.def("mu_from_resnoise",
          [](const DoubleArray& x_t, const DoubleArray& eps_res, int t, const Schedule& s) {
              return to_array(mu_from_resnoise(to_tensor(x_t), to_tensor(eps_res), t, s));
          },
          py::arg("x_t"), py::arg("eps_resnoise"), py::arg("t"), py::arg("schedule"));
    m.def("init_x_tprime",
          [](const DoubleArray& x_hat0, const DoubleArray& eps, const Schedule& s) {
              return to_array(init_x_tprime(to_tensor(x_hat0), to_tensor(eps), s));
          },
          py::arg("x_hat0"), py::arg("eps"), py::arg("schedule"));

    py::class_<TimeEmbedding>(m, "TimeEmbedding")
        .def(py::init<>())
        .def_readwrite("dim", &TimeEmbedding::dim)
        .def_readwrite("base_period", &TimeEmbedding::base_period);
    m.def("embed_time",
          [](int t, const TimeEmbedding& emb) { return to_array(embed_time(t, emb)); },
          py::arg("t"), py::arg("embedding"));

    py::class_<DenoiserConfig>(m, "DenoiserConfig")
        .def(py::init<>())
        .def_readwrite("x_dim", &DenoiserConfig::x_dim)
        .def_readwrite("cond_dim", &DenoiserConfig::cond_dim)
        .def_readwrite("hidden", &DenoiserConfig::hidden)
        .def_readwrite("time_emb", &DenoiserConfig::time_emb)
        .def("param_count", &DenoiserConfig::param_count);
    py::class_<DenoiserParams>(m, "DenoiserParams")
        .def_static("zeros", &DenoiserParams::zeros, py::arg("config"))
        .def_static("init", &DenoiserParams::init, py::arg("config"), py::arg("rng"))
        .def_readonly("config", &DenoiserParams::config);
    m.def("predict_resnoise",
          [](const DenoiserParams& params, const DoubleArray& x_t, const DoubleArray& cond, int t) {
              return to_array(predict_resnoise(params, to_tensor(x_t), to_tensor(cond), t));
          },
          py::arg("params"), py::arg("x_t"), py::arg("cond"), py::arg("t"));
    m.def("gradcheck_max_rel_error", &gradcheck_max_rel_error, py::arg("seed"), py::arg("trials"));

    py::enum_<StubKind>(m, "StubKind")
        .value("identity", StubKind::identity)
        .value("affine_blur", StubKind::affine_blur);
    py::class_<StubSpec>(m, "StubSpec")
        .def(py::init<>())
        .def_readwrite("kind", &StubSpec::kind)
        .def_readwrite("gain", &StubSpec::gain)
        .def_readwrite("bias", &StubSpec::bias)
        .def_readwrite("kernel", &StubSpec::kernel);
    m.def("stub_apply",
          [](const StubSpec& spec, const DoubleArray& input, const DoubleArray& x0) {
              return to_array(stub_apply(spec, to_tensor(input), to_tensor(x0)));
          },
          py::arg("spec"), py::arg("input"), py::arg("x0"));

    py::enum_<ShapeFamily>(m, "ShapeFamily")
        .value("disc", ShapeFamily::disc)
        .value("rectangle", ShapeFamily::rectangle)
        .value("mixed", ShapeFamily::mixed);
    py::class_<DatasetSpec>(m, "DatasetSpec")
        .def(py::init<>())
        .def_readwrite("height", &DatasetSpec::height)
        .def_readwrite("width", &DatasetSpec::width)
        .def_readwrite("count", &DatasetSpec::count)
        .def_readwrite("family", &DatasetSpec::family)
        .def_readwrite("noise_sigma", &DatasetSpec::noise_sigma)
        .def_readwrite("gradient", &DatasetSpec::gradient)
        .def_readwrite("seed", &DatasetSpec::seed);
    m.def("make_dataset",
          [](const DatasetSpec& spec) {
              py::list out;
              for (const Sample& s : make_dataset(spec)) {
                  out.append(py::make_tuple(s.id, to_array(s.input), to_array(s.mask)));
              }
              return out;
          },
          py::arg("spec"), "list of (id, input, mask) tuples");

    m.def("sample_chain",
          [](const DoubleArray& x_hat0, const DoubleArray& cond, const DenoiserParams& params,
             const Schedule& s, Rng& rng, int snapshot_stride) {
              const SampleTrace trace =
                  sample(to_tensor(x_hat0), to_tensor(cond), params, s, rng, snapshot_stride);
              py::dict d;
              d["x_init"] = to_array(trace.x_init);
              d["x0"] = to_array(trace.x0);
              py::list snaps;
              for (const auto& [t, snap] : trace.snapshots) {
                  snaps.append(py::make_tuple(t, to_array(snap)));
              }
              d["snapshots"] = snaps;
              d["rms"] = trace.rms;
              return d;
          },
          py::arg("x_hat0"), py::arg("cond"), py::arg("params"), py::arg("schedule"),
          py::arg("rng"), py::arg("snapshot_stride") = 0);

    m.def("iou",
          [](const DoubleArray& pred, const DoubleArray& truth) {
              return iou(to_tensor(pred), to_tensor(truth));
          },
          py::arg("prediction"), py::arg("truth"));
    m.def("mse",
          [](const DoubleArray& pred, const DoubleArray& truth) {
              return mse(to_tensor(pred), to_tensor(truth));
          },
          py::arg("prediction"), py::arg("truth"));

    m.def("save_rsf1",
          [](const std::filesystem::path& path, const DoubleArray& arr) {
              save_rsf1(path, to_tensor(arr));
          },
          py::arg("path"), py::arg("tensor"));
    m.def("load_rsf1",
          [](const std::filesystem::path& path) { return to_array(load_rsf1(path)); },
          py::arg("path"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig").def(py::init<>());
    m.def("parse_config_text",
          [](const std::string& text) { return parse_config_text(text); },
          py::arg("text"));
    m.def("canonical_config", &canonical_config, py::arg("config"));
    m.def("run_dir_name", &run_dir_name, py::arg("config"));
    m.def("run_experiment",
          [](const ExperimentConfig& config, const std::optional<std::filesystem::path>& checkpoint) {
              return summary_dict(run_experiment(config, checkpoint));
          },
          py::arg("config"), py::arg("checkpoint") = std::nullopt);
}
