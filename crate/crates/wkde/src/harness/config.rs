//! Line-based `key = value` experiment configuration with bracketed
//! section headers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bandwidths::{BandSequence, LargeNorming};
use crate::densities::{family_name, parse_family, DensityFamily, DensityModel, WeightSpec};
use crate::estimator::GridSpec;
use crate::exec::ExecMode;
use crate::kernels::{KernelFamily, KernelSpec};
use crate::{Error, Result};

/// Raw parsed sections.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::InvalidConfig(format!("line {}: malformed section header", lineno + 1))
                })?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            if current.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: key outside any [section]",
                    lineno + 1
                )));
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(RawConfig { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| {
                Error::InvalidConfig(format!("[{section}] {key} = `{v}` is not a number"))
            }),
        }
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }
}

/// Run mode of the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Full normalized deviation statistic under the classical norming.
    Classical,
    /// The statistic under an explicit large norming.
    Large,
    /// Only the extreme sample term `‖K‖_∞ max_i Ψ(X_i) / d_n`.
    MaxTermOnly,
}

impl Mode {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Mode::Classical),
            "large" => Ok(Mode::Large),
            "max_term_only" => Ok(Mode::MaxTermOnly),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Classical => "classical",
            Mode::Large => "large",
            Mode::MaxTermOnly => "max_term_only",
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: DensityModel,
    pub kernel: KernelSpec,
    pub weight: WeightSpec,
    pub band: BandSequence,
    pub norming: Option<LargeNorming>,
    pub mode: Mode,
    pub n_schedule: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub grid: GridSpec,
    /// Worker-count override; `WKDE_THREADS` takes precedence at run time.
    pub threads: Option<usize>,
    /// How scans and replication sweeps are driven.
    pub exec: ExecMode,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        Self::from_raw(&raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_str(&text)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let model_family = raw
            .get("model", "family")
            .ok_or_else(|| Error::InvalidConfig("[model] family is required".into()))?;
        let model = parse_family(model_family, &|key| {
            raw.get_f64("model", key).ok().flatten()
        })?;

        let kernel_family = KernelFamily::parse(raw.get("kernel", "family").unwrap_or("boxcar"))?;
        let kernel_dim = raw.get_f64("kernel", "dim")?.unwrap_or(1.0) as usize;
        let kernel = KernelSpec::new(kernel_family, kernel_dim)?;

        let beta = raw
            .get_f64("weight", "beta")?
            .ok_or_else(|| Error::InvalidConfig("[weight] beta is required".into()))?;
        let scale = raw.get_f64("weight", "scale")?.unwrap_or(1.0);
        let weight = WeightSpec::with_scale(beta, scale)?;

        let band_form = raw
            .get("bandwidth", "form")
            .ok_or_else(|| Error::InvalidConfig("[bandwidth] form is required".into()))?;
        let band = BandSequence::parse(
            band_form,
            kernel_dim,
            &|key| raw.get_f64("bandwidth", key).ok().flatten(),
            beta,
        )?;

        let norming = if raw.has_section("norming") {
            let form = raw
                .get("norming", "form")
                .ok_or_else(|| Error::InvalidConfig("[norming] form is required".into()))?;
            Some(LargeNorming::parse(form, &|key| {
                raw.get_f64("norming", key).ok().flatten()
            })?)
        } else {
            None
        };

        let mode = Mode::parse(raw.get("run", "mode").unwrap_or("classical"))?;
        let n_schedule: Vec<usize> = raw
            .get("run", "n_schedule")
            .ok_or_else(|| Error::InvalidConfig("[run] n_schedule is required".into()))?
            .split(',')
            .map(|s| {
                s.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidConfig(format!("bad n_schedule entry `{}`", s.trim()))
                })
            })
            .collect::<Result<_>>()?;
        let replications = raw.get_f64("run", "replications")?.unwrap_or(1.0) as usize;
        let master_seed = raw.get_f64("run", "master_seed")?.unwrap_or(0.0) as u64;
        let threads = raw.get_f64("run", "threads")?.map(|v| v as usize);

        let core_radius = match raw.get("grid", "core_radius") {
            None | Some("auto") => None,
            Some(v) => Some(v.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("[grid] core_radius = `{v}` is not a number"))
            })?),
        };
        let stencil_factor = raw.get_f64("grid", "stencil_factor")?.unwrap_or(8.0) as u32;

        let output_dir = raw.get("output", "dir").map(PathBuf::from);

        let cfg = ExperimentConfig {
            model,
            kernel,
            weight,
            band,
            norming,
            mode,
            n_schedule,
            replications,
            master_seed,
            grid: GridSpec { core_radius, stencil_factor },
            threads,
            exec: ExecMode::default(),
            output_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_schedule.is_empty() {
            return Err(Error::InvalidConfig("n_schedule must not be empty".into()));
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "n_schedule must be strictly increasing".into(),
            ));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if matches!(self.mode, Mode::Large | Mode::MaxTermOnly) && self.norming.is_none() {
            return Err(Error::InvalidConfig(format!(
                "mode `{}` requires a [norming] section",
                self.mode.name()
            )));
        }
        if self.grid.stencil_factor == 0 {
            return Err(Error::InvalidConfig("stencil_factor must be >= 1".into()));
        }
        if self.kernel.dim() != 1 && matches!(self.mode, Mode::Classical | Mode::Large) {
            return Err(Error::InvalidConfig(
                "sup-deviation runs are one-dimensional".into(),
            ));
        }
        Ok(())
    }

    /// Canonical echo of the parsed configuration.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        out.push_str("[model]\n");
        out.push_str(&format!("family = {}\n", family_name(&self.model)));
        match self.model.family() {
            DensityFamily::ExpTail { c1, c2, r } => {
                out.push_str(&format!("c1 = {c1:.17e}\nc2 = {c2:.17e}\nr = {r:.17e}\n"));
            }
            DensityFamily::PowerTail { c, r } => {
                out.push_str(&format!("c = {c:.17e}\nr = {r:.17e}\n"));
            }
            DensityFamily::ZeroAtOrigin { c, s, a } => {
                out.push_str(&format!("c = {c:.17e}\ns = {s:.17e}\na = {a:.17e}\n"));
            }
            DensityFamily::Normal { mu, sigma } => {
                out.push_str(&format!("mu = {mu:.17e}\nsigma = {sigma:.17e}\n"));
            }
            _ => {}
        }
        out.push_str("\n[kernel]\n");
        out.push_str(&format!(
            "family = {:?}\ndim = {}\n",
            self.kernel.family(),
            self.kernel.dim()
        ));
        out.push_str("\n[weight]\n");
        out.push_str(&format!(
            "beta = {:.17e}\nscale = {:.17e}\n",
            self.weight.beta(),
            self.weight.scale()
        ));
        out.push_str("\n[bandwidth]\n");
        out.push_str(&format!("form = {:?}\n", self.band.form()));
        if let Some(d) = &self.norming {
            out.push_str("\n[norming]\n");
            out.push_str(&format!(
                "coef = {:.17e}\ngamma = {:.17e}\np = {:.17e}\n",
                d.coef, d.gamma, d.p
            ));
        }
        out.push_str("\n[run]\n");
        out.push_str(&format!("mode = {}\n", self.mode.name()));
        out.push_str(&format!(
            "n_schedule = {}\n",
            self.n_schedule
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        out.push_str(&format!("replications = {}\n", self.replications));
        out.push_str(&format!("master_seed = {}\n", self.master_seed));
        out.push_str("\n[grid]\n");
        match self.grid.core_radius {
            Some(a) => out.push_str(&format!("core_radius = {a:.17e}\n")),
            None => out.push_str("core_radius = auto\n"),
        }
        out.push_str(&format!("stencil_factor = {}\n", self.grid.stencil_factor));
        out
    }
}
