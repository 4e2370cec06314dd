//! TOML scenario files.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;

use serde::Deserialize;

use super::units::*;
use crate::discretization::Mesh1D;
use crate::error::{validation, Error, Result};
use crate::integrator::BdfOptions;
use crate::model::{BoundaryMode, ContactParams, Contacts, DeviceGeometry, MaterialParams};
use crate::solver::{Device, NewtonOptions, ScalingSet};

/// Low and high illumination presets (m^-3 s^-1).
pub const G_LOW: f64 = 4.3e28;
pub const G_HIGH: f64 = 4.3e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Full,
    Reduced,
    Steady,
}

/// How `gamma` and `k_diss` depend on the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    /// Pinned at the mean field `|dV| / L`.
    Frozen,
    /// Evaluated from the local field.
    Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// First positive output time.
    pub t_start: f64,
    pub t_end: f64,
    pub points_per_decade: usize,
    pub snapshots: Vec<f64>,
    /// Also write the memory-term diagnostics (full model only).
    pub memory: bool,
}

impl OutputSpec {
    /// Log-spaced output grid plus the snapshot times, ascending.
    pub fn times(&self) -> Vec<f64> {
        let decades = (self.t_end / self.t_start).log10();
        let count = (decades * self.points_per_decade as f64).ceil().max(1.0) as usize;
        let mut t: Vec<f64> = (0..=count)
            .map(|k| self.t_start * 10f64.powf(decades * k as f64 / count as f64))
            .collect();
        *t.last_mut().expect("non-empty") = self.t_end;
        t.extend(self.snapshots.iter().copied().filter(|&s| s <= self.t_end));
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        t
    }
}

/// Sweep axes; an empty axis keeps the base value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub mu: Vec<f64>,
    pub k_diss: Vec<f64>,
    pub k_rec: Vec<f64>,
    pub generation: Vec<f64>,
}

/// One point of a sweep. `None` keeps the base value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepPoint {
    pub mu: Option<f64>,
    pub k_diss: Option<f64>,
    pub k_rec: Option<f64>,
    pub generation: Option<f64>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.mu.is_empty() && self.k_diss.is_empty() && self.k_rec.is_empty() && self.generation.is_empty()
    }

    /// Names of the non-empty axes, in column order.
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (name, axis) in [("mu", &self.mu), ("k_diss", &self.k_diss), ("k_rec", &self.k_rec), ("G", &self.generation)] {
            if !axis.is_empty() {
                v.push(name);
            }
        }
        v
    }

    /// Cartesian product, last axis fastest.
    pub fn points(&self) -> Vec<SweepPoint> {
        fn axis(v: &[f64]) -> Vec<Option<f64>> {
            if v.is_empty() {
                vec![None]
            } else {
                v.iter().map(|&x| Some(x)).collect()
            }
        }
        let mut out = Vec::new();
        for &mu in &axis(&self.mu) {
            for &k_diss in &axis(&self.k_diss) {
                for &k_rec in &axis(&self.k_rec) {
                    for &generation in &axis(&self.generation) {
                        out.push(SweepPoint {
                            mu,
                            k_diss,
                            k_rec,
                            generation,
                        });
                    }
                }
            }
        }
        out
    }
}

impl SweepPoint {
    /// Values of the given axes, in the order of `names`.
    pub fn values(&self, names: &[&str]) -> Vec<f64> {
        names
            .iter()
            .map(|n| match *n {
                "mu" => self.mu,
                "k_diss" => self.k_diss,
                "k_rec" => self.k_rec,
                _ => self.generation,
            })
            .map(|v| v.unwrap_or(f64::NAN))
            .collect()
    }
}

/// Validated, SI-normalised scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: DeviceGeometry,
    pub material: MaterialParams,
    pub contacts: Contacts,
    pub coefficients: Coefficients,
    pub model: ModelKind,
    pub bdf: BdfOptions,
    pub output: OutputSpec,
    pub sweep: SweepAxes,
}

impl ScenarioConfig {
    pub fn device(&self) -> Result<Device> {
        let mesh = if self.geometry.grading == 1.0 {
            Mesh1D::uniform(self.geometry.length, self.geometry.node_count)?
        } else {
            Mesh1D::graded(self.geometry.length, self.geometry.node_count, self.geometry.grading)?
        };
        let d = Device::new(mesh, self.material, self.contacts)?;
        Ok(match self.coefficients {
            Coefficients::Frozen => d.frozen(),
            Coefficients::Field => d,
        })
    }

    /// Copy with the sweep point applied. `mu` sets both mobilities.
    pub fn at_point(&self, p: &SweepPoint) -> Self {
        let mut c = self.clone();
        if let Some(mu) = p.mu {
            c.material.mu_n = mu;
            c.material.mu_p = mu;
        }
        if let Some(k) = p.k_diss {
            c.material.kdiss_override = Some(k);
        }
        if let Some(k) = p.k_rec {
            c.material.k_rec = k;
        }
        if let Some(g) = p.generation {
            c.material.generation = g;
        }
        c.sweep = SweepAxes::default();
        c
    }

    /// Stable hash of the resolved scenario, for run metadata.
    pub fn hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        format!("{self:?}").hash(&mut h);
        h.finish()
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.material.validate()?;
        self.contacts.validate()?;
        self.bdf.validate().map_err(|e| validation("solver", e.to_string()))?;
        if self.model == ModelKind::Reduced
            && self.coefficients == Coefficients::Field
            && self.material.kdiss_override.is_none()
        {
            return Err(validation(
                "material.coefficients",
                "the reduced model needs frozen coefficients or a constant k_diss",
            ));
        }
        let o = &self.output;
        if !(o.t_start > 0.0 && o.t_end > o.t_start) {
            return Err(validation("output.t_end", "need 0 < t_start < t_end"));
        }
        if o.points_per_decade == 0 {
            return Err(validation("output.points_per_decade", "must be >= 1"));
        }
        if let Some(s) = o.snapshots.iter().find(|&&s| !(s > 0.0)) {
            return Err(validation("output.snapshots", format!("times must be > 0, got {s}")));
        }
        for (name, axis) in [
            ("sweep.mu", &self.sweep.mu),
            ("sweep.k_diss", &self.sweep.k_diss),
            ("sweep.k_rec", &self.sweep.k_rec),
            ("sweep.G", &self.sweep.generation),
        ] {
            if let Some(v) = axis.iter().find(|&&v| !(v > 0.0)) {
                return Err(validation(name, format!("values must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cfg = raw.resolve()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml_str(&text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    device: RawDevice,
    material: RawMaterial,
    contacts: RawContacts,
    illumination: RawIllumination,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    solver: RawSolver,
    output: RawOutput,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    length: String,
    nodes: usize,
    grading: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    mu_n: String,
    mu_p: String,
    eps_r: f64,
    temperature: String,
    k_rec: String,
    pair_distance: String,
    k_diss: Option<String>,
    gamma: Option<String>,
    v_max: Option<String>,
    coefficients: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContacts {
    mode: String,
    voltage: Option<String>,
    injection_density: Option<String>,
    cathode: Option<RawContact>,
    anode: Option<RawContact>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContact {
    psi: String,
    n: Option<String>,
    p: Option<String>,
    kappa_n: Option<f64>,
    kappa_p: Option<f64>,
    alpha_n: Option<String>,
    alpha_p: Option<String>,
    beta_n: Option<String>,
    beta_p: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIllumination {
    #[serde(rename = "G")]
    g: Option<String>,
    level: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    order_cap: Option<usize>,
    rtol: Option<f64>,
    atol_phi: Option<String>,
    atol_density: Option<String>,
    atol_x: Option<String>,
    dt_init: Option<String>,
    dt_max: Option<String>,
    max_steps: Option<usize>,
    newton_max_iterations: Option<usize>,
    newton_ftol: Option<f64>,
    scaling: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    t_start: String,
    t_end: String,
    points_per_decade: Option<usize>,
    snapshots: Option<Vec<String>>,
    memory: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    mu: Option<Vec<String>>,
    k_diss: Option<Vec<String>>,
    k_rec: Option<Vec<String>>,
    #[serde(rename = "G")]
    g: Option<Vec<String>>,
}

fn opt(v: &Option<String>, dim: Dimension, field: &str) -> Result<Option<f64>> {
    v.as_deref().map(|s| parse_quantity(s, dim, field)).transpose()
}

fn list(v: &Option<Vec<String>>, dim: Dimension, field: &str) -> Result<Vec<f64>> {
    v.iter()
        .flatten()
        .enumerate()
        .map(|(k, s)| parse_quantity(s, dim, &format!("{field}[{k}]")))
        .collect()
}

fn required(v: &Option<String>, dim: Dimension, field: &str) -> Result<f64> {
    opt(v, dim, field)?.ok_or_else(|| validation(field, "missing"))
}

impl RawConfig {
    fn resolve(self) -> Result<ScenarioConfig> {
        let geometry = DeviceGeometry {
            length: parse_quantity(&self.device.length, LENGTH, "device.length")?,
            node_count: self.device.nodes,
            grading: self.device.grading.unwrap_or(1.0),
        };
        let m = &self.material;
        let generation = match (&self.illumination.g, self.illumination.level.as_deref()) {
            (Some(g), None) => parse_quantity(g, GENERATION, "illumination.G")?,
            (None, Some("low")) => G_LOW,
            (None, Some("high")) => G_HIGH,
            (None, Some("dark")) => 0.0,
            (None, Some(other)) => {
                return Err(validation("illumination.level", format!("expected low, high or dark, got `{other}`")))
            }
            (Some(_), Some(_)) => return Err(validation("illumination", "give either G or level, not both")),
            (None, None) => return Err(validation("illumination", "give G or level")),
        };
        let material = MaterialParams {
            mu_n: parse_quantity(&m.mu_n, MOBILITY, "material.mu_n")?,
            mu_p: parse_quantity(&m.mu_p, MOBILITY, "material.mu_p")?,
            eps_r: m.eps_r,
            temperature: parse_quantity(&m.temperature, TEMPERATURE, "material.temperature")?,
            k_rec: parse_quantity(&m.k_rec, RATE, "material.k_rec")?,
            pair_distance: parse_quantity(&m.pair_distance, LENGTH, "material.pair_distance")?,
            generation,
            gamma_override: opt(&m.gamma, RATE_CONSTANT, "material.gamma")?,
            kdiss_override: opt(&m.k_diss, RATE, "material.k_diss")?,
            v_max: opt(&m.v_max, VELOCITY, "material.v_max")?,
        };
        material.validate()?;
        let coefficients = match m.coefficients.as_deref() {
            None | Some("frozen") => Coefficients::Frozen,
            Some("field") => Coefficients::Field,
            Some(o) => return Err(validation("material.coefficients", format!("expected frozen or field, got `{o}`"))),
        };
        let contacts = resolve_contacts(&self.contacts, material.thermal_voltage())?;
        let model = match self.model.kind.as_deref() {
            None | Some("full") => ModelKind::Full,
            Some("reduced") => ModelKind::Reduced,
            Some("steady") => ModelKind::Steady,
            Some(o) => return Err(validation("model.kind", format!("expected full, reduced or steady, got `{o}`"))),
        };
        let s = &self.solver;
        let mut bdf = BdfOptions::default();
        if let Some(k) = s.order_cap {
            bdf.order_cap = k;
        }
        if let Some(r) = s.rtol {
            bdf.rtol = r;
        }
        if let Some(a) = opt(&s.atol_phi, VOLTAGE, "solver.atol_phi")? {
            bdf.atol[0] = a;
        }
        if let Some(a) = opt(&s.atol_density, DENSITY, "solver.atol_density")? {
            bdf.atol[1] = a;
            bdf.atol[2] = a;
        }
        if let Some(a) = opt(&s.atol_x, DENSITY, "solver.atol_x")? {
            bdf.atol[3] = a;
        }
        if let Some(v) = opt(&s.dt_init, TIME, "solver.dt_init")? {
            bdf.dt_init = v;
        }
        if let Some(v) = opt(&s.dt_max, TIME, "solver.dt_max")? {
            bdf.dt_max = v;
        }
        if let Some(v) = s.max_steps {
            bdf.max_steps = v;
        }
        let mut newton = NewtonOptions::default();
        if let Some(v) = s.newton_max_iterations {
            newton.max_iterations = v;
        }
        if let Some(v) = s.newton_ftol {
            if !(v > 0.0) {
                return Err(validation("solver.newton_ftol", "must be > 0"));
            }
            newton.ftol = v;
        }
        newton.scaling = match s.scaling.as_deref() {
            None | Some("device") => ScalingSet::DEVICE,
            Some("unit") => ScalingSet::UNIT,
            Some(o) => return Err(validation("solver.scaling", format!("expected device or unit, got `{o}`"))),
        };
        bdf.newton = newton;
        let o = &self.output;
        let output = OutputSpec {
            t_start: parse_quantity(&o.t_start, TIME, "output.t_start")?,
            t_end: parse_quantity(&o.t_end, TIME, "output.t_end")?,
            points_per_decade: o.points_per_decade.unwrap_or(10),
            snapshots: list(&o.snapshots, TIME, "output.snapshots")?,
            memory: o.memory.unwrap_or(false),
        };
        let w = &self.sweep;
        let sweep = SweepAxes {
            mu: list(&w.mu, MOBILITY, "sweep.mu")?,
            k_diss: list(&w.k_diss, RATE, "sweep.k_diss")?,
            k_rec: list(&w.k_rec, RATE, "sweep.k_rec")?,
            generation: list(&w.g, GENERATION, "sweep.G")?,
        };
        Ok(ScenarioConfig {
            geometry,
            material,
            contacts,
            coefficients,
            model,
            bdf,
            output,
            sweep,
        })
    }
}

fn resolve_contacts(raw: &RawContacts, vth: f64) -> Result<Contacts> {
    match raw.mode.as_str() {
        "dirichlet" => {
            if let (Some(v), Some(nd)) = (&raw.voltage, &raw.injection_density) {
                if raw.cathode.is_some() || raw.anode.is_some() {
                    return Err(validation("contacts", "give voltage/injection_density or per-contact data, not both"));
                }
                let dv = parse_quantity(v, VOLTAGE, "contacts.voltage")?;
                let hi = parse_quantity(nd, DENSITY, "contacts.injection_density")?;
                if !(hi > 0.0) {
                    return Err(validation("contacts.injection_density", "must be > 0"));
                }
                let lo = hi * (-dv / vth).exp();
                return Ok(Contacts {
                    cathode: ContactParams::dirichlet(lo, hi, 0.0),
                    anode: ContactParams::dirichlet(hi, lo, dv),
                });
            }
            let side = |c: &Option<RawContact>, name: &str| -> Result<ContactParams> {
                let c = c.as_ref().ok_or_else(|| validation(format!("contacts.{name}"), "missing"))?;
                let f = |k: &str| format!("contacts.{name}.{k}");
                Ok(ContactParams::dirichlet(
                    required(&c.n, DENSITY, &f("n"))?,
                    required(&c.p, DENSITY, &f("p"))?,
                    parse_quantity(&c.psi, VOLTAGE, &f("psi"))?,
                ))
            };
            Ok(Contacts {
                cathode: side(&raw.cathode, "cathode")?,
                anode: side(&raw.anode, "anode")?,
            })
        }
        "robin" => {
            let side = |c: &Option<RawContact>, name: &str| -> Result<ContactParams> {
                let c = c.as_ref().ok_or_else(|| validation(format!("contacts.{name}"), "missing"))?;
                let f = |k: &str| format!("contacts.{name}.{k}");
                Ok(ContactParams {
                    kappa_n: c.kappa_n.ok_or_else(|| validation(f("kappa_n"), "missing"))?,
                    kappa_p: c.kappa_p.ok_or_else(|| validation(f("kappa_p"), "missing"))?,
                    alpha_n: required(&c.alpha_n, VELOCITY, &f("alpha_n"))?,
                    alpha_p: required(&c.alpha_p, VELOCITY, &f("alpha_p"))?,
                    beta_n: required(&c.beta_n, FLUX, &f("beta_n"))?,
                    beta_p: required(&c.beta_p, FLUX, &f("beta_p"))?,
                    psi_d: parse_quantity(&c.psi, VOLTAGE, &f("psi"))?,
                    mode: BoundaryMode::Robin,
                })
            };
            let contacts = Contacts {
                cathode: side(&raw.cathode, "cathode")?,
                anode: side(&raw.anode, "anode")?,
            };
            Ok(contacts)
        }
        other => Err(validation("contacts.mode", format!("expected dirichlet or robin, got `{other}`"))),
    }
}
