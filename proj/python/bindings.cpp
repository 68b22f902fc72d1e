#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptychodd/blind.hpp"
#include "ptychodd/ddplan.hpp"
#include "ptychodd/fft.hpp"
#include "ptychodd/forward.hpp"
#include "ptychodd/metrics.hpp"
#include "ptychodd/simulate.hpp"
#include "ptychodd/solver.hpp"
#include "ptychodd/stagm.hpp"

namespace py = pybind11;
using namespace ptychodd;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexField2D to_cfield(const CArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D complex array");
  const int64_t h = a.shape(0), w = a.shape(1);
  std::vector<cdouble> data(a.data(), a.data() + h * w);
  return ComplexField2D(h, w, std::move(data));
}

RealField2D to_rfield(const RArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D real array");
  const int64_t h = a.shape(0), w = a.shape(1);
  std::vector<double> data(a.data(), a.data() + h * w);
  return RealField2D(h, w, std::move(data));
}

py::array from_cfield(const ComplexField2D& f) {
  py::array_t<std::complex<double>> a({f.height(), f.width()});
  std::copy(f.data().begin(), f.data().end(), a.mutable_data());
  return a;
}

py::array from_rfield(const RealField2D& f) {
  py::array_t<double> a({f.height(), f.width()});
  std::copy(f.data().begin(), f.data().end(), a.mutable_data());
  return a;
}

FrameStack to_frames(const RArray& a, const ScanGeometry& geometry) {
  if (a.ndim() != 3) throw std::invalid_argument("expected a 3-D frame stack");
  FrameStack fs;
  fs.geometry = geometry;
  const int64_t n = a.shape(0), h = a.shape(1), w = a.shape(2);
  for (int64_t j = 0; j < n; ++j) {
    std::vector<double> data(a.data() + j * h * w, a.data() + (j + 1) * h * w);
    fs.frames.emplace_back(h, w, std::move(data));
  }
  fs.validate();
  return fs;
}

py::array from_frames(const FrameStack& fs) {
  const int64_t n = static_cast<int64_t>(fs.frames.size());
  const int64_t h = fs.frames.empty() ? 0 : fs.frames[0].height();
  const int64_t w = fs.frames.empty() ? 0 : fs.frames[0].width();
  py::array_t<double> a({n, h, w});
  for (int64_t j = 0; j < n; ++j)
    std::copy(fs.frames[j].data().begin(), fs.frames[j].data().end(),
              a.mutable_data() + j * h * w);
  return a;
}

StopRule parse_stop_rule(const std::string& s) {
  if (s == "rf") return StopRule::RFactor;
  if (s == "re") return StopRule::RelativeError;
  throw std::invalid_argument("stop rule must be 'rf' or 're'");
}

}  // namespace

PYBIND11_MODULE(_ptychodd, m) {
  m.doc() = "Overlapping domain-decomposition ADMM solvers for ptychography";

  py::class_<ScanGeometry>(m, "ScanGeometry")
      .def_readonly("frame_side", &ScanGeometry::frame_side)
      .def_readonly("step", &ScanGeometry::step)
      .def_readonly("image_height", &ScanGeometry::image_height)
      .def_readonly("image_width", &ScanGeometry::image_width)
      .def_readonly("grid_rows", &ScanGeometry::grid_rows)
      .def_readonly("grid_cols", &ScanGeometry::grid_cols)
      .def_readonly("positions", &ScanGeometry::positions)
      .def("frame_count", &ScanGeometry::frame_count);

  m.def("make_raster_scan", &make_raster_scan, py::arg("image_height"), py::arg("image_width"),
        py::arg("frame_side"), py::arg("step"));

  m.def("make_test_images", [](int64_t height, int64_t width, int64_t border, uint64_t seed) {
    auto [mag, ph] = make_test_images(height, width, border, seed);
    return py::make_tuple(from_rfield(mag), from_rfield(ph));
  }, py::arg("height"), py::arg("width"), py::arg("border"), py::arg("seed"));

  m.def("make_sample", [](const RArray& mag, const RArray& ph, const ScanGeometry* g) {
    return from_cfield(make_sample(to_rfield(mag), to_rfield(ph), g));
  }, py::arg("magnitude"), py::arg("phase"), py::arg("geometry") = nullptr);

  m.def("make_zone_plate_probe",
        [](int64_t side, double pupil_radius, int zones, double defocus, double total_flux) {
          return from_cfield(
              make_zone_plate_probe(side, {pupil_radius, zones, defocus, total_flux}));
        },
        py::arg("side"), py::arg("pupil_radius") = 0.0, py::arg("zones") = 8,
        py::arg("defocus") = 0.0, py::arg("total_flux") = 0.0);

  m.def("simulate_frames", [](const CArray& probe, const CArray& sample, const ScanGeometry& g) {
    return from_frames(simulate_frames(to_cfield(probe), to_cfield(sample), g));
  }, py::arg("probe"), py::arg("sample"), py::arg("geometry"));

  m.def("add_poisson_noise",
        [](const RArray& frames, const ScanGeometry& g, double scale, uint64_t seed) {
          auto [noisy, snr] = add_poisson_noise(to_frames(frames, g), NoiseSpec{scale, seed});
          return py::make_tuple(from_frames(noisy), snr);
        },
        py::arg("frames"), py::arg("geometry"), py::arg("scale"), py::arg("seed"));

  m.def("calibrate_noise_scale",
        [](const RArray& frames, const ScanGeometry& g, double target_snr_db, uint64_t seed) {
          return calibrate_noise_scale(to_frames(frames, g), target_snr_db, seed);
        },
        py::arg("frames"), py::arg("geometry"), py::arg("target_snr_db"), py::arg("seed"));

  m.def("vacuum_border_mask", [](int64_t height, int64_t width, int64_t border) {
    return from_rfield(vacuum_border_mask(height, width, border));
  }, py::arg("height"), py::arg("width"), py::arg("border"));

  m.def("forward", [](const CArray& probe, const CArray& image, const ScanGeometry& g) {
    auto frames = forward(to_cfield(probe), to_cfield(image), g);
    py::list out;
    for (const auto& f : frames) out.append(from_cfield(f));
    return out;
  }, py::arg("probe"), py::arg("image"), py::arg("geometry"));

  m.def("illumination_density", [](const CArray& probe, const ScanGeometry& g) {
    return from_rfield(illumination_density(to_cfield(probe), g));
  }, py::arg("probe"), py::arg("geometry"));

  m.def("stagm_value", [](const CArray& z, const RArray& f, double epsilon) {
    ComplexField2D zf = to_cfield(z);
    RealField2D ff = to_rfield(f);
    if (!(zf.height() == ff.height() && zf.width() == ff.width()))
      throw std::invalid_argument("stagm_value: shape mismatch");
    double s = 0.0;
    for (int64_t i = 0; i < zf.size(); ++i) s += stagm::pixel_value(zf[i], ff[i], epsilon);
    return s;
  }, py::arg("z"), py::arg("f"), py::arg("epsilon") = 0.5);

  m.def("stagm_prox", [](const CArray& y, const RArray& f, double lambda, double epsilon) {
    ComplexField2D yf = to_cfield(y);
    RealField2D ff = to_rfield(f);
    if (!(yf.height() == ff.height() && yf.width() == ff.width()))
      throw std::invalid_argument("stagm_prox: shape mismatch");
    ComplexField2D out(yf.height(), yf.width());
    for (int64_t i = 0; i < yf.size(); ++i)
      out[i] = stagm::pixel_prox(yf[i], ff[i], lambda, epsilon);
    return from_cfield(out);
  }, py::arg("y"), py::arg("f"), py::arg("lambda"), py::arg("epsilon") = 0.5);

  m.def("snr_db", [](const CArray& recovered, const CArray& truth) {
    return snr_db(to_cfield(recovered), to_cfield(truth));
  }, py::arg("recovered"), py::arg("truth"));

  m.def("reconstruct",
        [](const RArray& frames, const ScanGeometry& g, const CArray& probe, int subdomains,
           double epsilon, double eta, double r, int max_iters, double tol_rf, double tol_re,
           const std::string& stop, int threads, py::object pin) {
          DecompositionPlan plan = plan_stripes(g, subdomains);
          NonblindConfig cfg;
          cfg.epsilon = epsilon;
          cfg.eta = eta;
          cfg.r = r;
          cfg.max_iters = max_iters;
          cfg.tol_rf = tol_rf;
          cfg.tol_re = tol_re;
          cfg.stop_rule = parse_stop_rule(stop);
          cfg.threads = threads;
          std::optional<RealField2D> pin_field;
          if (!pin.is_none()) pin_field = to_rfield(pin.cast<RArray>());
          NonblindSolver solver(plan, to_frames(frames, g), to_cfield(probe), cfg,
                                pin_field ? &*pin_field : nullptr);
          NonblindResult res = solver.run();
          py::dict out;
          out["merged"] = from_cfield(res.merged);
          out["iterations"] = res.iterations;
          out["rf"] = res.final_rf;
          out["re"] = res.final_re;
          return out;
        },
        py::arg("frames"), py::arg("geometry"), py::arg("probe"), py::arg("subdomains") = 2,
        py::arg("epsilon") = 0.5, py::arg("eta") = 0.1, py::arg("r") = 4.0e3,
        py::arg("max_iters") = 1000, py::arg("tol_rf") = 1.0e-5, py::arg("tol_re") = 1.0e-3,
        py::arg("stop") = "rf", py::arg("threads") = 0, py::arg("pin") = py::none());

  m.def("reconstruct_blind",
        [](const RArray& frames, const ScanGeometry& g, int subdomains, double epsilon, double eta,
           double r, double mu, double gamma, int max_iters, double tol_rf, py::object pin) {
          DecompositionPlan plan = plan_stripes(g, subdomains);
          BlindConfig cfg;
          cfg.epsilon = epsilon;
          cfg.eta = eta;
          cfg.r = r;
          cfg.mu = mu;
          if (gamma > 0.0) cfg.gamma = gamma;
          cfg.max_iters = max_iters;
          cfg.tol_rf = tol_rf;
          std::optional<RealField2D> pin_field;
          if (!pin.is_none()) pin_field = to_rfield(pin.cast<RArray>());
          BlindSolver solver(plan, to_frames(frames, g), cfg, pin_field ? &*pin_field : nullptr);
          BlindResult res = solver.run();
          py::dict out;
          out["merged"] = from_cfield(res.merged);
          out["probe"] = from_cfield(res.probe);
          out["probe_fourier"] = from_cfield(res.probe_fourier);
          out["support_mask"] = from_rfield(res.support_mask);
          out["iterations"] = res.iterations;
          out["rf"] = res.final_rf;
          out["re"] = res.final_re;
          return out;
        },
        py::arg("frames"), py::arg("geometry"), py::arg("subdomains") = 2,
        py::arg("epsilon") = 0.5, py::arg("eta") = 0.1, py::arg("r") = 5.0e3,
        py::arg("mu") = 2.0e2, py::arg("gamma") = 0.0, py::arg("max_iters") = 1000,
        py::arg("tol_rf") = 1.0e-5, py::arg("pin") = py::none());
}
