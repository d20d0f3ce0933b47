//! Scenario configs (TOML). Every table rejects unknown keys.
//!
//! ```toml
//! [domain]
//! kind = "sphere"          # or "product" (S² × S², same resolution per factor)
//! n_theta = 64             # optional, default 64 (file fields: taken from the file)
//! n_phi = 32               # optional, default 32
//! basepoint_first = 0      # product only: node of the first factor
//! basepoint_second = 0     # product only: node of the second factor
//!
//! [field]                  # exactly one of fixture / file / construct
//! fixture = "A"            # A | B | D | diagonal | P1 | Q1
//! # file = "field.ebf"     # relative to this config's directory
//! # construct = { kind = "clutching", tuple = [2, -1, -1] }
//! # construct = { kind = "bloch", k = 2 }
//! pullback = "first-factor" # optional: identity | first-factor | second-factor | wrap:<k>
//! transplant = [[0.0, 0.0], [1.0, 0.0]]  # optional: replace eigenvalues (Re, Im), sphere only
//!
//! [tolerances]             # optional
//! normal = 1e-9
//! gap = 1e-6
//!
//! [output]                 # optional
//! report = "report.txt"
//! ```

use std::path::{Path, PathBuf};

use eigenbundle::construct::{self, assemble, bloch, clutching, fixtures, maps, EigenvalueProfile, ProjectorFamily};
use eigenbundle::linalg::c;
use eigenbundle::matrixfield::{DEFAULT_GAP_TOL, DEFAULT_NORMAL_TOL};
use eigenbundle::spectral::order_on_basis;
use eigenbundle::{build_product_domain, CycleBasis, Domain, MatrixField, SphereGrid};
use serde::Deserialize;

use crate::error::CliError;
use crate::fieldfile::FieldFile;

pub const DEFAULT_N_THETA: usize = 64;
pub const DEFAULT_N_PHI: usize = 32;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainSpec,
    pub field: FieldSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Sphere,
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    #[serde(default)]
    pub basepoint_first: usize,
    #[serde(default)]
    pub basepoint_second: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub fixture: Option<String>,
    pub file: Option<PathBuf>,
    pub construct: Option<ConstructSpec>,
    pub pullback: Option<String>,
    pub transplant: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructKind {
    Bloch,
    Clutching,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSpec {
    pub kind: ConstructKind,
    pub k: Option<i64>,
    pub tuple: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_normal")]
    pub normal: f64,
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_normal() -> f64 {
    DEFAULT_NORMAL_TOL
}

fn default_gap() -> f64 {
    DEFAULT_GAP_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { normal: DEFAULT_NORMAL_TOL, gap: DEFAULT_GAP_TOL }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
}

/// Command-line settings that take precedence over the config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<(usize, usize)>,
    pub tol_normal: Option<f64>,
    pub tol_gap: Option<f64>,
}

/// Parse `NTxNP`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NTxNP, got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad n_theta in '{s}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad n_phi in '{s}'"))?;
    Ok((a, b))
}

/// Where the field of a scenario comes from, for the report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSource {
    Fixture(String),
    File(PathBuf),
    Construct(String),
}

impl std::fmt::Display for FieldSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSource::Fixture(name) => write!(f, "fixture:{name}"),
            FieldSource::File(p) => write!(f, "file:{}", p.display()),
            FieldSource::Construct(s) => write!(f, "construct:{s}"),
        }
    }
}

/// A loaded config with its domain and field built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Domain,
    pub basis: CycleBasis,
    pub field: MatrixField,
    pub source: FieldSource,
    pub tolerances: Tolerances,
    pub report: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.message().to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }
}

fn config_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.to_path_buf(), message: message.into() }
}

fn fixture_field(name: &str) -> Option<MatrixField> {
    Some(match name {
        "A" => fixtures::fixture_a(),
        "B" => fixtures::fixture_b(),
        "D" | "diagonal" => fixtures::fixture_d(),
        "P1" => fixtures::fixture_p1(),
        "Q1" => fixtures::fixture_q1(),
        _ => return None,
    })
}

enum Pullback {
    Identity,
    FirstFactor,
    SecondFactor,
    Wrap(i64),
}

fn parse_pullback(s: &str) -> Option<Pullback> {
    match s {
        "identity" => Some(Pullback::Identity),
        "first-factor" => Some(Pullback::FirstFactor),
        "second-factor" => Some(Pullback::SecondFactor),
        _ => s.strip_prefix("wrap:").and_then(|k| k.parse().ok()).map(Pullback::Wrap),
    }
}

/// The family of a constructor spec, with a short description.
pub fn construct_family(spec: &ConstructSpec) -> Result<(ProjectorFamily, String), ConstructSpecError> {
    match spec.kind {
        ConstructKind::Bloch => {
            let k = spec.k.ok_or(ConstructSpecError::Missing("k"))?;
            if spec.tuple.is_some() {
                return Err(ConstructSpecError::Unexpected("tuple"));
            }
            Ok((bloch(k), format!("bloch(k={k})")))
        }
        ConstructKind::Clutching => {
            let t = spec.tuple.clone().ok_or(ConstructSpecError::Missing("tuple"))?;
            if spec.k.is_some() {
                return Err(ConstructSpecError::Unexpected("k"));
            }
            let desc = format!("clutching({})", crate::report::join(&t));
            Ok((clutching(&t).map_err(ConstructSpecError::Compute)?, desc))
        }
    }
}

#[derive(Debug)]
pub enum ConstructSpecError {
    Missing(&'static str),
    Unexpected(&'static str),
    Compute(eigenbundle::Error),
}

/// Assemble a family with the default eigenvalue profile `j + i·j·z`.
pub fn assemble_default(family: &ProjectorFamily) -> eigenbundle::Result<MatrixField> {
    assemble(&EigenvalueProfile::default_for(family.dim()), family)
}

impl ScenarioConfig {
    /// Build the domain and field. `path` locates relative file references
    /// and labels errors.
    pub fn resolve(&self, path: &Path, overrides: &Overrides) -> Result<Scenario, CliError> {
        let base = path.parent().unwrap_or(Path::new("."));
        let f = &self.field;
        let chosen = [f.fixture.is_some(), f.file.is_some(), f.construct.is_some()].iter().filter(|&&b| b).count();
        if chosen != 1 {
            return Err(config_error(path, "[field] needs exactly one of fixture, file, construct"));
        }
        let pullback = match &f.pullback {
            None => None,
            Some(s) => Some(parse_pullback(s).ok_or_else(|| config_error(path, format!("unknown pullback '{s}'")))?),
        };
        let product = self.domain.kind == DomainKind::Product;
        match (&pullback, product) {
            (Some(Pullback::FirstFactor | Pullback::SecondFactor), false) => {
                return Err(config_error(path, "factor pullbacks need a product domain"))
            }
            (None | Some(Pullback::Identity | Pullback::Wrap(_)), true) => {
                return Err(config_error(path, "fields on a product domain need pullback = first-factor or second-factor"))
            }
            _ => {}
        }
        if product && f.transplant.is_some() {
            return Err(config_error(path, "transplant is supported on sphere domains only"));
        }

        // Field and its native grid (file fields fix the grid).
        let (mut field, source, file_grid) = if let Some(name) = &f.fixture {
            let fld = fixture_field(name).ok_or_else(|| config_error(path, format!("unknown fixture '{name}'")))?;
            (fld, FieldSource::Fixture(name.clone()), None)
        } else if let Some(file) = &f.file {
            let full = base.join(file);
            let ff = FieldFile::read(&full)?;
            let grid = ff.grid.clone();
            (ff.into_field(file.display().to_string())?, FieldSource::File(file.clone()), Some(grid))
        } else {
            let spec = f.construct.as_ref().expect("checked above");
            let (fam, desc) = construct_family(spec).map_err(|e| match e {
                ConstructSpecError::Missing(k) => config_error(path, format!("construct needs '{k}'")),
                ConstructSpecError::Unexpected(k) => config_error(path, format!("construct does not take '{k}'")),
                ConstructSpecError::Compute(e) => CliError::Compute(e),
            })?;
            (assemble_default(&fam)?, FieldSource::Construct(desc), None)
        };
        if file_grid.is_some() && product {
            return Err(config_error(path, "file fields live on a sphere domain"));
        }

        let requested = overrides.grid.or(match (self.domain.n_theta, self.domain.n_phi) {
            (None, None) => None,
            (Some(a), Some(b)) => Some((a, b)),
            _ => return Err(config_error(path, "set both n_theta and n_phi, or neither")),
        });
        let (nt, np) = match (&file_grid, requested) {
            (Some(g), Some(r)) if r != (g.n_theta(), g.n_phi()) => {
                return Err(CliError::Argument(format!(
                    "grid {}x{} does not match the field file's {}x{}",
                    r.0,
                    r.1,
                    g.n_theta(),
                    g.n_phi()
                )))
            }
            (Some(g), _) => (g.n_theta(), g.n_phi()),
            (None, r) => r.unwrap_or((DEFAULT_N_THETA, DEFAULT_N_PHI)),
        };
        let grid = SphereGrid::new(nt, np)?;
        let domain = if product {
            Domain::Product(build_product_domain(grid.clone(), grid, self.domain.basepoint_first, self.domain.basepoint_second)?)
        } else {
            Domain::Sphere(grid)
        };
        let basis = domain.cycle_basis();

        if let Some(pb) = pullback {
            let label = field.label().to_string();
            field = match pb {
                Pullback::Identity => field.pullback(maps::identity, label),
                Pullback::FirstFactor => field.pullback(maps::first_factor, format!("{label}∘π₁")),
                Pullback::SecondFactor => field.pullback(maps::second_factor, format!("{label}∘π₂")),
                Pullback::Wrap(k) => field.pullback(maps::azimuthal_wrap(k), format!("{label}∘wrap({k})")),
            };
        }
        if let Some(values) = &f.transplant {
            if values.len() != field.dim() {
                return Err(config_error(path, format!("transplant needs {} eigenvalues, got {}", field.dim(), values.len())));
            }
            let profile = EigenvalueProfile::constant(values.iter().map(|v| c(v[0], v[1])).collect());
            let spectra = order_on_basis(&field, &basis)?;
            field = construct::transplant(&spectra.cycles[0], &profile)?;
        }
        // Sanity: the field must accept points of this domain.
        field.eval(&basis.cycles()[0].point(0)).map_err(|e| match e {
            eigenbundle::Error::DomainMismatch { expected } => {
                config_error(path, format!("field is defined on a {expected} domain"))
            }
            other => CliError::Compute(other),
        })?;

        let mut tolerances = self.tolerances;
        if let Some(t) = overrides.tol_normal {
            tolerances.normal = t;
        }
        if let Some(t) = overrides.tol_gap {
            tolerances.gap = t;
        }
        let report = self.output.report.as_ref().map(|p| base.join(p));
        Ok(Scenario { domain, basis, field, source, tolerances, report })
    }
}
