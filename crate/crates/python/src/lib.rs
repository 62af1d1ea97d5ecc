//! Python module `parkscan`: images, the detection pipeline, synthetic
//! scenes, accuracy scoring and an embeddable slot service.

use std::path::PathBuf;

use parkscan_core::eval::{accuracy_from_counts, EvalResult};
use parkscan_core::imaging::{self, CannyThresholds};
use parkscan_core::synth::{generate, SynthParams};
use parkscan_core::{netpbm, Connectivity};
use parkscan_service::{Occupancy, SlotService, SlotState};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

create_exception!(parkscan, ParkscanError, PyException);
create_exception!(parkscan, ReservationError, ParkscanError);

fn err(e: impl std::fmt::Display) -> PyErr {
    ParkscanError::new_err(e.to_string())
}

/// An 8-bit RGB raster.
#[pyclass(frozen, skip_from_py_object, name = "RgbImage", module = "parkscan")]
#[derive(Clone)]
pub struct PyRgbImage(parkscan_core::RgbImage);

#[pymethods]
impl PyRgbImage {
    /// Builds an image from `width * height * 3` interleaved bytes.
    #[staticmethod]
    fn from_raw(width: usize, height: usize, data: &[u8]) -> PyResult<Self> {
        parkscan_core::RgbImage::from_raw(width, height, data.to_vec()).map(Self).map_err(err)
    }

    /// Decodes PPM or PGM bytes.
    #[staticmethod]
    fn decode(data: &[u8]) -> PyResult<Self> {
        netpbm::decode(data).map(|i| Self(i.into_rgb())).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        netpbm::decode_image(path).map(Self).map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    fn pixel(&self, x: usize, y: usize) -> PyResult<(u8, u8, u8)> {
        if x >= self.0.width() || y >= self.0.height() {
            return Err(PyValueError::new_err("pixel out of range"));
        }
        let [r, g, b] = self.0.get(x, y);
        Ok((r, g, b))
    }

    fn raw<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.0.as_raw())
    }

    /// Binary PPM encoding.
    fn encode_ppm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &netpbm::encode_ppm(&self.0))
    }

    fn to_grayscale(&self) -> PyGrayImage {
        PyGrayImage(imaging::to_grayscale(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("RgbImage({}x{})", self.0.width(), self.0.height())
    }
}

/// An 8-bit single-channel raster.
#[pyclass(frozen, skip_from_py_object, name = "GrayImage", module = "parkscan")]
#[derive(Clone)]
pub struct PyGrayImage(parkscan_core::GrayImage);

#[pymethods]
impl PyGrayImage {
    #[staticmethod]
    fn from_raw(width: usize, height: usize, data: &[u8]) -> PyResult<Self> {
        parkscan_core::GrayImage::from_raw(width, height, data.to_vec()).map(Self).map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<u8> {
        if x >= self.0.width() || y >= self.0.height() {
            return Err(PyValueError::new_err("pixel out of range"));
        }
        Ok(self.0.get(x, y))
    }

    fn raw<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.0.as_raw())
    }

    fn encode_pgm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &netpbm::encode_pgm(&self.0))
    }

    fn gaussian_blur(&self) -> Self {
        Self(imaging::gaussian_blur_3x3(&self.0))
    }

    /// `min(pixel, t)` for every pixel.
    fn truncate(&self, t: u8) -> Self {
        Self(imaging::truncate_threshold(&self.0, t))
    }

    /// Canny edge map as 0/255 pixels.
    #[pyo3(signature = (low = 50.0, high = 150.0))]
    fn canny(&self, low: f64, high: f64) -> PyResult<Self> {
        let edges = imaging::canny(&self.0, low, high).map_err(err)?;
        Ok(Self(edges.to_gray()))
    }

    /// External contours of the nonzero pixels.
    #[pyo3(signature = (eight_connected = true))]
    fn contours<'py>(&self, py: Python<'py>, eight_connected: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let bin = parkscan_core::BinaryImage::from_fn(self.0.width(), self.0.height(), |x, y| self.0.get(x, y) > 0)
            .map_err(err)?;
        let conn = if eight_connected { Connectivity::Eight } else { Connectivity::Four };
        parkscan_core::find_external_contours(&bin, conn)
            .contours
            .iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("area", c.area)?;
                d.set_item("bbox", (c.bbox.x, c.bbox.y, c.bbox.w, c.bbox.h))?;
                d.set_item("ellipse_angle", c.ellipse_angle)?;
                d.set_item("centroid", (c.centroid.x, c.centroid.y))?;
                d.set_item("points", c.points.clone())?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("GrayImage({}x{})", self.0.width(), self.0.height())
    }
}

/// Lot configuration: detector parameters, Canny thresholds and slot GPS.
#[pyclass(frozen, from_py_object, name = "LotConfig", module = "parkscan")]
#[derive(Clone)]
pub struct PyLotConfig(parkscan_core::LotConfig);

#[pymethods]
impl PyLotConfig {
    #[new]
    fn new() -> Self {
        Self(parkscan_core::LotConfig::default())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parkscan_core::LotConfig::from_json(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        parkscan_core::LotConfig::load(path).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn lot_id(&self) -> &str {
        &self.0.lot_id
    }

    #[getter]
    fn slot_count(&self) -> usize {
        self.0.slot_count()
    }

    fn __repr__(&self) -> String {
        format!("LotConfig(lot_id={:?}, slot_count={})", self.0.lot_id, self.0.slot_count())
    }
}

/// Detection result for one frame.
#[pyclass(frozen, name = "SlotReport", module = "parkscan")]
pub struct PySlotReport(parkscan_core::SlotReport);

#[pymethods]
impl PySlotReport {
    #[getter]
    fn bit_string(&self) -> &str {
        &self.0.bit_string
    }

    /// `"module1"` or `"module2"`.
    #[getter]
    fn module(&self) -> &'static str {
        match self.0.module {
            parkscan_core::Module::Module1 => "module1",
            parkscan_core::Module::Module2 => "module2",
        }
    }

    #[getter]
    fn annotated(&self) -> PyRgbImage {
        PyRgbImage(self.0.annotated.clone())
    }

    /// One dict per slot box: index, occupied, center, width, height, angle.
    #[getter]
    fn verdicts<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .verdicts
            .iter()
            .map(|v| {
                let d = PyDict::new(py);
                d.set_item("index", v.index)?;
                d.set_item("occupied", v.occupied)?;
                d.set_item("center", (v.slot_box.center.x, v.slot_box.center.y))?;
                d.set_item("width", v.slot_box.width)?;
                d.set_item("height", v.slot_box.height)?;
                d.set_item("angle", v.slot_box.angle_deg)?;
                d.set_item("contour_count", v.contour_count)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("SlotReport(bit_string={:?}, module={:?})", self.0.bit_string, self.module())
    }
}

/// Runs the occupancy pipeline on an image.
#[pyfunction]
#[pyo3(signature = (image, config = None))]
fn detect(image: &PyRgbImage, config: Option<&PyLotConfig>) -> PyResult<PySlotReport> {
    let cfg = config.map_or_else(parkscan_core::LotConfig::default, |c| c.0.clone());
    let t = CannyThresholds::new(cfg.canny_lo, cfg.canny_hi).map_err(err)?;
    parkscan_core::detect_with_stages(&image.0, &cfg.detector, t)
        .map(|d| PySlotReport(d.report))
        .map_err(err)
}

/// Renders a synthetic lot scene; returns `(image, truth_bits)`.
#[pyfunction]
#[pyo3(signature = (seed, speckles = 0, occupancy = 0.5))]
fn synth_scene(seed: u64, speckles: usize, occupancy: f64) -> PyResult<(PyRgbImage, String)> {
    let p = SynthParams {
        speckles,
        occupancy_prob: occupancy,
        ..SynthParams::default()
    };
    let s = generate(&p, seed).map_err(err)?;
    Ok((PyRgbImage(s.image), s.truth))
}

fn eval_dict<'py>(py: Python<'py>, r: &EvalResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("tests_performed", r.tests_performed)?;
    d.set_item("correct_detections", r.correct_detections)?;
    d.set_item("false_detections", r.false_detections)?;
    d.set_item("accuracy_pct", r.accuracy_pct)?;
    Ok(d)
}

/// Accuracy over whole tests: `correct / tests * 100`.
#[pyfunction]
#[pyo3(signature = (tests, correct, slots_per_test = 4))]
fn accuracy<'py>(py: Python<'py>, tests: usize, correct: usize, slots_per_test: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = accuracy_from_counts(tests, correct, slots_per_test).map_err(err)?;
    eval_dict(py, &r)
}

fn slot_dict<'py>(py: Python<'py>, s: &SlotState) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("index", s.index)?;
    d.set_item(
        "occupancy",
        match s.occupancy {
            Occupancy::Vacant => "vacant",
            Occupancy::Occupied => "occupied",
        },
    )?;
    d.set_item("reserved", s.reserved)?;
    d.set_item("reserved_by", &s.reserved_by)?;
    d.set_item("gps", (s.gps.lat, s.gps.lon))?;
    d.set_item("updated_at", s.updated_at)?;
    Ok(d)
}

fn service_err(e: parkscan_service::ServiceError) -> PyErr {
    use parkscan_service::ServiceError as E;
    match e {
        E::AlreadyReserved(_) | E::Occupied(_) | E::NotReserved(_) | E::Forbidden(_) => {
            ReservationError::new_err((e.code(), e.to_string()))
        }
        E::LengthMismatch { .. } | E::BadBitString | E::BadToken => PyValueError::new_err(e.to_string()),
        other => err(other),
    }
}

/// Slot occupancy plus reservations for one or more lots, in-process.
#[pyclass(frozen, name = "SlotService", module = "parkscan")]
pub struct PySlotService(SlotService);

#[pymethods]
impl PySlotService {
    /// Persists under `data_dir` when given, else keeps state in memory.
    #[new]
    #[pyo3(signature = (configs, data_dir = None))]
    fn new(configs: Vec<PyLotConfig>, data_dir: Option<PathBuf>) -> PyResult<Self> {
        let configs = configs.into_iter().map(|c| c.0).collect();
        let svc = match data_dir {
            Some(d) => SlotService::open(configs, d, true),
            None => SlotService::in_memory(configs),
        };
        svc.map(Self).map_err(service_err)
    }

    fn lot_ids(&self) -> Vec<String> {
        self.0.lot_ids()
    }

    fn slots<'py>(&self, py: Python<'py>, lot: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let slots = self.0.slots(lot).map_err(service_err)?;
        slots.iter().map(|s| slot_dict(py, s)).collect()
    }

    fn ingest_report(&self, py: Python<'_>, lot: &str, bit_string: &str) -> PyResult<()> {
        py.detach(|| self.0.ingest_report(lot, bit_string)).map(drop).map_err(service_err)
    }

    fn reserve<'py>(&self, py: Python<'py>, lot: &str, slot: usize, client: &str) -> PyResult<Bound<'py, PyDict>> {
        let s = py.detach(|| self.0.reserve(lot, slot, client)).map_err(service_err)?;
        slot_dict(py, &s)
    }

    fn release<'py>(&self, py: Python<'py>, lot: &str, slot: usize, client: &str) -> PyResult<Bound<'py, PyDict>> {
        let s = py.detach(|| self.0.release(lot, slot, client)).map_err(service_err)?;
        slot_dict(py, &s)
    }

    /// Reserves every vacant, unreserved slot; returns their indices.
    fn reserve_all(&self, py: Python<'_>, lot: &str, client: &str) -> PyResult<Vec<usize>> {
        py.detach(|| self.0.reserve_all(lot, client)).map_err(service_err)
    }

    /// Google Maps directions URL for a slot.
    fn navigation_url(&self, lot: &str, slot: usize) -> PyResult<String> {
        self.0.navigation(lot, slot).map(|n| n.url).map_err(service_err)
    }
}

#[pymodule]
fn parkscan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParkscanError", m.py().get_type::<ParkscanError>())?;
    m.add("ReservationError", m.py().get_type::<ReservationError>())?;
    m.add_class::<PyRgbImage>()?;
    m.add_class::<PyGrayImage>()?;
    m.add_class::<PyLotConfig>()?;
    m.add_class::<PySlotReport>()?;
    m.add_class::<PySlotService>()?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(synth_scene, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    Ok(())
}
